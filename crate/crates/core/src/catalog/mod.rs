//! The canonical lists of 2D and 3D algebras, the explicit isomorphisms
//! between them, and the machinery to instantiate them over a field.

mod expr;

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use expr::ParamExpr;

use crate::error::{Error, Result};
use crate::field::{parse_rational, FieldSpec, FieldValue};
use crate::msc::{BaseChange, Matrix, StructureMatrix, TraceClassKind};

pub const SCHEMA_VERSION: u32 = 1;

/// Default parameter samples over Q.
pub const Q_SAMPLES: [i64; 6] = [-2, -1, 0, 1, 2, 3];

const SHIPPED: &str = include_str!("../../data/catalog.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Paper2d,
    Kstt,
    Paper3d,
}

impl std::str::FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Source> {
        serde_json::from_value(serde_json::Value::String(s.to_lowercase()))
            .map_err(|_| Error::Parse(format!("unknown source {s:?} (paper2d, kstt, paper3d)")))
    }
}

/// A rational constant stored as text (`"-1"`, `"1/2"`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational(pub BigRational);

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(Rational).map_err(serde::de::Error::custom)
    }
}

impl Rational {
    pub fn value(&self, spec: FieldSpec) -> Result<FieldValue> {
        FieldValue::from_rational(spec, &self.0)
    }
}

/// Admissibility condition on a parameter (or, for `RequiresSqrtMinusOne`, on the field).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamConstraint {
    NotEqual(Rational),
    Nonzero,
    NoCubeRoot,
    RequiresSqrtMinusOne,
}

impl ParamConstraint {
    /// Whether the constraint holds at `value` over `spec`. Parameter
    /// conditions are vacuous when there is no parameter.
    pub fn holds(&self, value: Option<&FieldValue>, spec: FieldSpec) -> bool {
        match (self, value) {
            (ParamConstraint::RequiresSqrtMinusOne, _) => FieldValue::from_int(spec, -1).has_sqrt(),
            (_, None) => true,
            (ParamConstraint::NotEqual(c), Some(v)) => c.value(spec).map_or(true, |c| c != *v),
            (ParamConstraint::Nonzero, Some(v)) => !v.is_zero(),
            (ParamConstraint::NoCubeRoot, Some(v)) => !v.has_cbrt(),
        }
    }
}

impl std::fmt::Display for ParamConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamConstraint::NotEqual(c) => write!(f, "param != {}", c.0),
            ParamConstraint::Nonzero => f.write_str("param != 0"),
            ParamConstraint::NoCubeRoot => f.write_str("param is not a cube"),
            ParamConstraint::RequiresSqrtMinusOne => f.write_str("-1 is a square"),
        }
    }
}

/// Rescaling of the parameter that stays inside one isomorphism class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitRelation {
    /// `t ∼ a²t`, `a ≠ 0`.
    SquareScaling,
    /// `t ∼ a³t`, `a ≠ 0`.
    CubeScaling,
    /// `t ∼ −t`.
    Negation,
}

impl OrbitRelation {
    /// Every value related to `t` (including `t`).
    pub fn orbit(&self, t: &FieldValue) -> Result<Vec<FieldValue>> {
        let spec = t.spec();
        let mut out: Vec<FieldValue> = match self {
            OrbitRelation::Negation => vec![t.clone(), -t],
            OrbitRelation::SquareScaling | OrbitRelation::CubeScaling => {
                let e = if *self == OrbitRelation::SquareScaling { 2 } else { 3 };
                spec.elements()?
                    .into_iter()
                    .filter(|a| !a.is_zero())
                    .map(|a| t * &a.pow(e).expect("nonzero"))
                    .collect()
            }
        };
        out.sort_by_key(|v| v.as_residue());
        out.dedup();
        Ok(out)
    }

    /// The partner of `t` under the relation for scale factor `a`.
    pub fn apply(&self, t: &FieldValue, a: &FieldValue) -> FieldValue {
        match self {
            OrbitRelation::Negation => -t,
            OrbitRelation::SquareScaling => t * &(a * a),
            OrbitRelation::CubeScaling => t * &(a * &(a * a)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatedTraces {
    pub tr1: Vec<ParamExpr>,
    pub tr2: Vec<ParamExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub source: Source,
    /// Position in the source list (1-based).
    pub item: u32,
    pub dimension: usize,
    pub parameter: Option<String>,
    pub matrix: Vec<Vec<ParamExpr>>,
    pub constraints: Vec<ParamConstraint>,
    pub stated_traces: Option<StatedTraces>,
    pub orbit: Option<OrbitRelation>,
    /// Type (unital, curled, ...) or trace-class section label.
    pub group: Option<String>,
}

impl CatalogEntry {
    pub fn is_parametric(&self) -> bool {
        self.parameter.is_some()
    }

    pub fn admits(&self, value: Option<&FieldValue>, spec: FieldSpec) -> bool {
        self.constraints.iter().all(|c| c.holds(value, spec))
    }

    /// The structure matrix at `value`, after checking the entry's constraints.
    pub fn instantiate(&self, value: Option<&FieldValue>, spec: FieldSpec) -> Result<StructureMatrix> {
        if let Some(c) = self.constraints.iter().find(|c| !c.holds(value, spec)) {
            return Err(Error::ConstraintViolated(format!(
                "{} at {}: {c}",
                self.id,
                value.map_or("-".to_string(), ToString::to_string)
            )));
        }
        self.instantiate_unchecked(value, spec)
    }

    /// The structure matrix at `value`, ignoring admissibility constraints.
    pub fn instantiate_unchecked(&self, value: Option<&FieldValue>, spec: FieldSpec) -> Result<StructureMatrix> {
        match (&self.parameter, value) {
            (Some(p), None) => return Err(Error::UnboundParameter(format!("{} needs {p}", self.id))),
            (None, Some(_)) => return Err(Error::UnboundParameter(format!("{} takes no parameter", self.id))),
            _ => {}
        }
        let rows = eval_grid(&self.matrix, value, spec)?;
        StructureMatrix::new(Matrix::from_rows(spec, rows)?)
    }

    /// Every admissible parameter value over a finite field (`[None]` or `[]`
    /// for entries without a parameter).
    pub fn admissible_params(&self, spec: FieldSpec) -> Result<Vec<Option<FieldValue>>> {
        spec.require_finite()?;
        if !self.is_parametric() {
            return Ok(if self.admits(None, spec) { vec![None] } else { vec![] });
        }
        Ok(spec.elements()?.into_iter().filter(|v| self.admits(Some(v), spec)).map(Some).collect())
    }

    /// Admissible values with one representative (the least residue) per
    /// orbit of the entry's rescaling relation.
    pub fn orbit_representatives(&self, spec: FieldSpec) -> Result<Vec<Option<FieldValue>>> {
        let all = self.admissible_params(spec)?;
        let Some(rel) = self.orbit else { return Ok(all) };
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in all.into_iter().flatten() {
            if seen.contains(&v.as_residue()) {
                continue;
            }
            for w in rel.orbit(&v)? {
                seen.insert(w.as_residue());
            }
            out.push(Some(v));
        }
        Ok(out)
    }

    /// Admissible values among `samples` over Q (`[None]` for entries without a parameter).
    pub fn q_samples(&self, samples: &[BigRational]) -> Vec<Option<FieldValue>> {
        let q = FieldSpec::RATIONALS;
        if !self.is_parametric() {
            return if self.admits(None, q) { vec![None] } else { vec![] };
        }
        samples
            .iter()
            .map(|s| FieldValue::from_rational(q, s).expect("Q accepts every rational"))
            .filter(|v| self.admits(Some(v), q))
            .map(Some)
            .collect()
    }

    /// Trace vectors as rational functions of the parameter.
    pub fn symbolic_traces(&self) -> Result<StatedTraces> {
        let n = self.dimension;
        let c = |i: usize, j: usize, k: usize| &self.matrix[k][i * n + j];
        fn sum<'a>(n: usize, f: impl Fn(usize) -> &'a ParamExpr) -> Result<ParamExpr> {
            (0..n).try_fold(ParamExpr::integer(0), |acc, j| acc.try_add(f(j)))
        }
        let tr1 = (0..n).map(|k| sum(n, |j| c(j, k, j))).collect::<Result<_>>()?;
        let tr2 = (0..n).map(|k| sum(n, |j| c(k, j, j))).collect::<Result<_>>()?;
        Ok(StatedTraces { tr1, tr2 })
    }

    /// Trace class for a generic value of the parameter.
    pub fn generic_trace_class(&self) -> Result<TraceClassKind> {
        let t = self.symbolic_traces()?;
        let zero1 = t.tr1.iter().all(ParamExpr::is_zero);
        let zero2 = t.tr2.iter().all(ParamExpr::is_zero);
        Ok(match (zero1, zero2) {
            (true, true) => TraceClassKind::M0,
            (false, true) => TraceClassKind::M1Zero,
            (true, false) => TraceClassKind::M1Infinity,
            (false, false) => {
                let n = t.tr1.len();
                let mut dependent = true;
                for a in 0..n {
                    for b in 0..n {
                        let minor = t.tr1[a].try_mul(&t.tr2[b])?.try_sub(&t.tr1[b].try_mul(&t.tr2[a])?)?;
                        dependent &= minor.is_zero();
                    }
                }
                if dependent {
                    TraceClassKind::M1Lambda
                } else {
                    TraceClassKind::M2
                }
            }
        })
    }
}

fn eval_grid(grid: &[Vec<ParamExpr>], value: Option<&FieldValue>, spec: FieldSpec) -> Result<Vec<Vec<FieldValue>>> {
    grid.iter().map(|row| row.iter().map(|e| e.eval(value, spec)).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimSide {
    pub id: String,
    /// The entry's parameter as a function of the claim's parameter.
    pub binding: Option<ParamExpr>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// A correction marking the left side as redundant.
    RedCorrection(u32),
    /// A row of the correspondence between the two 3D lists.
    Table(u32),
    OrbitScaling,
}

/// An isomorphism between two catalog entries, with its base change.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoClaim {
    pub id: String,
    pub parameter: Option<String>,
    pub lhs: ClaimSide,
    pub rhs: ClaimSide,
    pub g: Vec<Vec<ParamExpr>>,
    pub validity: Vec<ParamConstraint>,
    pub provenance: Provenance,
    /// Parameter samples over Q when the defaults do not apply.
    pub samples: Option<Vec<Rational>>,
}

/// A claim evaluated at one parameter value.
#[derive(Clone, Debug)]
pub struct ClaimInstance {
    pub value: Option<FieldValue>,
    pub lhs: StructureMatrix,
    pub rhs: StructureMatrix,
    pub g: BaseChange,
}

impl IsoClaim {
    pub fn holds_at(&self, value: Option<&FieldValue>, spec: FieldSpec) -> bool {
        self.validity.iter().all(|c| c.holds(value, spec))
    }

    /// Instantiate both sides and `g`. The claim's validity list is enforced;
    /// the entries' own admissibility conditions are not.
    pub fn instantiate(&self, catalog: &Catalog, value: Option<&FieldValue>, spec: FieldSpec) -> Result<ClaimInstance> {
        if let Some(c) = self.validity.iter().find(|c| !c.holds(value, spec)) {
            return Err(Error::ConstraintViolated(format!("{}: {c}", self.id)));
        }
        if self.parameter.is_some() && value.is_none() {
            return Err(Error::UnboundParameter(self.id.clone()));
        }
        let side = |s: &ClaimSide| -> Result<StructureMatrix> {
            let entry = catalog.entry(&s.id)?;
            let v = s.binding.as_ref().map(|b| b.eval(value, spec)).transpose()?;
            entry.instantiate_unchecked(v.as_ref(), spec)
        };
        let lhs = side(&self.lhs)?;
        let rhs = side(&self.rhs)?;
        let g = BaseChange::new(Matrix::from_rows(spec, eval_grid(&self.g, value, spec)?)?)?;
        Ok(ClaimInstance { value: value.cloned(), lhs, rhs, g })
    }

    /// Parameter values to check over Q: the claim's own samples or the defaults.
    pub fn q_samples(&self) -> Vec<Option<FieldValue>> {
        let q = FieldSpec::RATIONALS;
        if self.parameter.is_none() {
            return vec![None];
        }
        let samples: Vec<BigRational> = match &self.samples {
            Some(s) => s.iter().map(|r| r.0.clone()).collect(),
            None => Q_SAMPLES.iter().map(|&i| BigRational::from_integer(i.into())).collect(),
        };
        samples
            .iter()
            .map(|s| FieldValue::from_rational(q, s).expect("rational"))
            .filter(|v| self.holds_at(Some(v), q))
            .map(Some)
            .collect()
    }
}

/// A named subset of entries, each optionally pinned to one parameter value
/// or restricted further.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct View {
    pub name: String,
    pub members: Vec<ViewMember>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewMember {
    pub id: String,
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binding: Option<Rational>,
    pub constraints: Vec<ParamConstraint>,
}

#[derive(Clone, Debug, Default)]
pub struct EntryFilter {
    pub source: Option<Source>,
    pub trace_class: Option<TraceClassKind>,
    pub unital: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub schema_version: u32,
    pub entries: Vec<CatalogEntry>,
    pub claims: Vec<IsoClaim>,
    pub views: Vec<View>,
}

impl Catalog {
    /// The catalog compiled into the binary.
    pub fn shipped() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::from_json(SHIPPED).expect("shipped catalog is valid"))
    }

    pub fn shipped_json() -> &'static str {
        SHIPPED
    }

    pub fn from_json(text: &str) -> Result<Catalog> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let found = raw.get("schema_version").and_then(serde_json::Value::as_u64);
        match found {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => return Err(Error::SchemaVersionMismatch { found: v as u32, expected: SCHEMA_VERSION }),
            None => return Err(Error::Parse("missing schema_version".into())),
        }
        let cat: Catalog = serde_json::from_value(raw).map_err(|e| Error::Parse(e.to_string()))?;
        cat.validate()?;
        Ok(cat)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("catalog serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Catalog> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Catalog::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parse(msg));
        let mut ids = BTreeSet::new();
        for e in &self.entries {
            if !ids.insert(e.id.as_str()) {
                return bad(format!("duplicate entry {}", e.id));
            }
            let n = e.dimension;
            if e.matrix.len() != n || e.matrix.iter().any(|r| r.len() != n * n) {
                return bad(format!("{}: matrix is not {n}x{}", e.id, n * n));
            }
            let mut exprs: Vec<&ParamExpr> = e.matrix.iter().flatten().collect();
            if let Some(t) = &e.stated_traces {
                if t.tr1.len() != n || t.tr2.len() != n {
                    return bad(format!("{}: stated traces have the wrong length", e.id));
                }
                exprs.extend(t.tr1.iter().chain(&t.tr2));
            }
            if let Some(x) = exprs.iter().find(|x| x.variable().is_some() && x.variable() != e.parameter.as_deref()) {
                return bad(format!("{}: expression {x} uses an undeclared parameter", e.id));
            }
        }
        for c in &self.claims {
            for side in [&c.lhs, &c.rhs] {
                let entry = self.entry(&side.id)?;
                if entry.is_parametric() != side.binding.is_some() {
                    return bad(format!("{}: binding for {} does not match its parameter", c.id, side.id));
                }
            }
            let n = self.entry(&c.lhs.id)?.dimension;
            if c.g.len() != n || c.g.iter().any(|r| r.len() != n) {
                return bad(format!("{}: g is not {n}x{n}", c.id));
            }
            let exprs = c.g.iter().flatten().chain(c.lhs.binding.iter()).chain(c.rhs.binding.iter());
            if let Some(x) = exprs.into_iter().find(|x| x.variable().is_some() && x.variable() != c.parameter.as_deref()) {
                return bad(format!("{}: expression {x} uses an undeclared parameter", c.id));
            }
        }
        for v in &self.views {
            for m in &v.members {
                let entry = self.entry(&m.id)?;
                if m.binding.is_some() && !entry.is_parametric() {
                    return bad(format!("view {}: {} takes no parameter", v.name, m.id));
                }
            }
        }
        Ok(())
    }

    pub fn entry(&self, id: &str) -> Result<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownEntry(id.to_string()))
    }

    pub fn view(&self, name: &str) -> Result<&View> {
        self.views.iter().find(|v| v.name == name).ok_or_else(|| Error::UnknownEntry(format!("view {name}")))
    }

    pub fn claim(&self, id: &str) -> Result<&IsoClaim> {
        self.claims.iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownEntry(format!("claim {id}")))
    }

    /// Entries matching every set field of `filter`, in catalog order (by
    /// source, then item number). An entry counts as unital when it has a unit
    /// at every admissible default sample over Q.
    pub fn list_entries(&self, filter: &EntryFilter) -> Vec<&CatalogEntry> {
        let samples: Vec<BigRational> = Q_SAMPLES.iter().map(|&i| BigRational::from_integer(i.into())).collect();
        let mut out: Vec<&CatalogEntry> = self
            .entries
            .iter()
            .filter(|e| filter.source.map_or(true, |s| e.source == s))
            .filter(|e| filter.trace_class.map_or(true, |k| e.generic_trace_class().ok() == Some(k)))
            .filter(|e| {
                filter.unital.map_or(true, |want| {
                    let unital = e.q_samples(&samples).iter().all(|v| {
                        e.instantiate(v.as_ref(), FieldSpec::RATIONALS).is_ok_and(|a| a.find_unit().is_some())
                    });
                    unital == want
                })
            })
            .collect();
        out.sort_by_key(|e| (e.source, e.item));
        out
    }

    /// Ids on the left of red corrections, i.e. entries the list keeps only for the record.
    pub fn redundant_ids(&self) -> BTreeSet<&str> {
        self.claims
            .iter()
            .filter(|c| matches!(c.provenance, Provenance::RedCorrection(_)))
            .map(|c| c.lhs.id.as_str())
            .collect()
    }
}
