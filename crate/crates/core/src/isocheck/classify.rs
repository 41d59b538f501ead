use crate::catalog::{Catalog, Provenance, Source};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldValue};
use crate::kernel::{self, FpAlg};
use crate::msc::{BaseChange, StructureMatrix};

use super::{fingerprint, Fingerprint};

/// A catalog entry at one parameter value.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub value: Option<FieldValue>,
    pub algebra: StructureMatrix,
    /// A red correction designates this instance as covered by another entry.
    pub redundant: bool,
}

impl Instance {
    pub fn label(&self) -> String {
        match &self.value {
            Some(v) => format!("{}[{v}]", self.id),
            None => self.id.clone(),
        }
    }
}

/// Whether some red correction designates `id` at `value` as covered by
/// another entry. The designation counts even where the printed base change
/// fails; `verify-claims` reports those separately.
fn covered_by_correction(catalog: &Catalog, id: &str, value: Option<&FieldValue>, spec: FieldSpec) -> Result<bool> {
    for claim in &catalog.claims {
        if !matches!(claim.provenance, Provenance::RedCorrection(_)) || claim.lhs.id != id {
            continue;
        }
        let params: Vec<Option<FieldValue>> = match claim.parameter {
            Some(_) => spec.elements()?.into_iter().map(Some).collect(),
            None => vec![None],
        };
        for t in params.iter().filter(|t| claim.holds_at(t.as_ref(), spec)) {
            let bound = match &claim.lhs.binding {
                Some(b) => match b.eval(t.as_ref(), spec) {
                    Ok(v) => Some(v),
                    Err(Error::DivisionByZero) => continue,
                    Err(e) => return Err(e),
                },
                None => None,
            };
            if bound.as_ref() == value {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Every entry of `source` over `F_p` at each admissible parameter value (or
/// only at orbit representatives when `fold_orbits`), flagged when a verified
/// correction folds it away.
pub fn canonical_instances(catalog: &Catalog, spec: FieldSpec, source: Source, fold_orbits: bool) -> Result<Vec<Instance>> {
    spec.require_finite()?;
    let mut out = Vec::new();
    for entry in catalog.entries.iter().filter(|e| e.source == source) {
        let values = if fold_orbits { entry.orbit_representatives(spec)? } else { entry.admissible_params(spec)? };
        for value in values {
            let algebra = entry.instantiate(value.as_ref(), spec)?;
            let redundant = covered_by_correction(catalog, &entry.id, value.as_ref(), spec)?;
            out.push(Instance { id: entry.id.clone(), value, algebra, redundant });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// The zero algebra.
    Trivial,
    /// `input = act(witness, entry at value)`.
    Match { id: String, value: Option<FieldValue>, witness: BaseChange },
    Unclassified,
}

impl Classification {
    pub fn label(&self) -> String {
        match self {
            Classification::Trivial => "trivial".into(),
            Classification::Match { id, value: Some(v), .. } => format!("{id}[{v}]"),
            Classification::Match { id, value: None, .. } => id.clone(),
            Classification::Unclassified => "unclassified".into(),
        }
    }
}

struct Candidate {
    instance: Instance,
    fast: FpAlg,
    fingerprint: Fingerprint,
}

/// Matches algebras against the canonical list of one dimension over `F_p`,
/// trying every admissible parameter value. Surviving entries are tried
/// before the ones corrections mark redundant.
pub struct Classifier {
    spec: FieldSpec,
    dim: usize,
    candidates: Vec<Candidate>,
}

impl Classifier {
    pub fn new(catalog: &Catalog, spec: FieldSpec, dim: usize) -> Result<Classifier> {
        let source = match dim {
            2 => Source::Paper2d,
            3 => Source::Paper3d,
            _ => return Err(Error::DimensionMismatch(format!("no catalog for dimension {dim}"))),
        };
        let mut instances = canonical_instances(catalog, spec, source, false)?;
        instances.sort_by_key(|i| i.redundant);
        let candidates = instances
            .into_iter()
            .map(|instance| {
                Ok(Candidate {
                    fast: FpAlg::from_structure(&instance.algebra)?,
                    fingerprint: fingerprint(&instance.algebra),
                    instance,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Classifier { spec, dim, candidates })
    }

    pub fn instances(&self) -> impl Iterator<Item = &Instance> {
        self.candidates.iter().map(|c| &c.instance)
    }

    pub fn classify(&self, a: &StructureMatrix) -> Result<Classification> {
        if a.spec() != self.spec {
            return Err(Error::MixedFields(self.spec, a.spec()));
        }
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!("{}D input, {}D catalog", a.dim(), self.dim)));
        }
        if !a.is_associative() {
            return Err(Error::NotAssociative);
        }
        if a.is_zero() {
            return Ok(Classification::Trivial);
        }
        let fp = fingerprint(a);
        let fast = FpAlg::from_structure(a)?;
        for c in self.candidates.iter().filter(|c| c.fingerprint == fp) {
            if let Some(g) = kernel::find_witness(&c.fast, &fast) {
                let p = self.spec.require_finite()?;
                let witness = BaseChange::new(kernel::grid_to_matrix(self.dim, p, &g))?;
                assert_eq!(&c.instance.algebra.act(&witness)?, a, "search returned a false witness");
                return Ok(Classification::Match {
                    id: c.instance.id.clone(),
                    value: c.instance.value.clone(),
                    witness,
                });
            }
        }
        Ok(Classification::Unclassified)
    }
}
