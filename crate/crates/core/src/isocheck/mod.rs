//! Deciding isomorphism: explicit base changes, invariants, and exhaustive
//! search over small prime fields.

mod classify;
mod fingerprint;

use std::fmt;

use serde::Serialize;

pub use classify::{canonical_instances, Classification, Classifier, Instance};
pub use fingerprint::Fingerprint;

use crate::catalog::{Catalog, IsoClaim};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldValue};
use crate::kernel::{self, FpAlg};
use crate::msc::{BaseChange, Matrix, StructureMatrix};

pub fn fingerprint(a: &StructureMatrix) -> Fingerprint {
    fingerprint::fingerprint(a)
}

/// How a witness relates the pair `(lhs, rhs)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `rhs = act(g, lhs)`.
    Forward,
    /// `lhs = act(g, rhs)`.
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NonIsoReason {
    SeparatingInvariant(&'static str),
    /// Every invertible base change was tried.
    ExhaustedSearch,
    /// The one base change on offer works in neither orientation.
    WitnessRejected,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IsoVerdict {
    Isomorphic { witness: BaseChange, orientation: Orientation },
    NotIsomorphic(NonIsoReason),
    Unknown,
}

impl IsoVerdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic { .. })
    }

    pub fn outcome(&self) -> &'static str {
        match self {
            IsoVerdict::Isomorphic { .. } => "isomorphic",
            IsoVerdict::NotIsomorphic(_) => "not_isomorphic",
            IsoVerdict::Unknown => "unknown",
        }
    }

    pub fn witness(&self) -> Option<&BaseChange> {
        match self {
            IsoVerdict::Isomorphic { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn separating_invariant(&self) -> Option<&'static str> {
        match self {
            IsoVerdict::NotIsomorphic(NonIsoReason::SeparatingInvariant(s)) => Some(s),
            _ => None,
        }
    }

    /// The verdict for the swapped pair.
    pub fn swapped(&self) -> IsoVerdict {
        match self {
            IsoVerdict::Isomorphic { witness, orientation } => IsoVerdict::Isomorphic {
                witness: witness.inverse(),
                orientation: *orientation,
            },
            other => other.clone(),
        }
    }
}

impl fmt::Display for IsoVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoVerdict::Isomorphic { witness, orientation } => {
                write!(f, "isomorphic ({orientation:?}, g = {witness})")
            }
            IsoVerdict::NotIsomorphic(NonIsoReason::SeparatingInvariant(s)) => {
                write!(f, "not isomorphic (separated by {s})")
            }
            IsoVerdict::NotIsomorphic(NonIsoReason::ExhaustedSearch) => {
                write!(f, "not isomorphic (exhausted search)")
            }
            IsoVerdict::NotIsomorphic(NonIsoReason::WitnessRejected) => {
                write!(f, "claim fails in both orientations")
            }
            IsoVerdict::Unknown => write!(f, "unknown"),
        }
    }
}

/// Does `g` carry `a` to `b`, either way round?
pub fn check_witness(a: &StructureMatrix, b: &StructureMatrix, g: &BaseChange) -> Result<IsoVerdict> {
    if a.act(g)? == *b {
        return Ok(IsoVerdict::Isomorphic { witness: g.clone(), orientation: Orientation::Forward });
    }
    if b.act(g)? == *a {
        return Ok(IsoVerdict::Isomorphic { witness: g.clone(), orientation: Orientation::Reverse });
    }
    Ok(IsoVerdict::NotIsomorphic(NonIsoReason::WitnessRejected))
}

/// Outcome of checking one claim at one parameter value.
#[derive(Clone, Debug)]
pub struct ClaimCheck {
    pub claim: String,
    pub value: Option<FieldValue>,
    pub verdict: IsoVerdict,
    /// `act(g, lhs) − rhs` and `act(g, rhs) − lhs`, when both orientations fail.
    pub residuals: Option<(Matrix, Matrix)>,
}

pub fn verify_claim(
    claim: &IsoClaim,
    catalog: &Catalog,
    value: Option<&FieldValue>,
    spec: FieldSpec,
) -> Result<ClaimCheck> {
    let inst = claim.instantiate(catalog, value, spec)?;
    let verdict = check_witness(&inst.lhs, &inst.rhs, &inst.g)?;
    let residuals = if verdict.is_isomorphic() {
        None
    } else {
        let fwd = inst.lhs.act(&inst.g)?.matrix().sub(inst.rhs.matrix())?;
        let rev = inst.rhs.act(&inst.g)?.matrix().sub(inst.lhs.matrix())?;
        Some((fwd, rev))
    };
    Ok(ClaimCheck { claim: claim.id.clone(), value: value.cloned(), verdict, residuals })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Column-by-column search with solved columns.
    #[default]
    Pruned,
    /// Plain sweep of the whole group in lexicographic order.
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub prefilter: bool,
    pub mode: SearchMode,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { prefilter: true, mode: SearchMode::Pruned }
    }
}

/// Decide `a ≅ b` over `F_p`. A witness is the lexicographically least
/// (row-major) `g` with `act(g, a) = b`.
pub fn brute_force_iso(a: &StructureMatrix, b: &StructureMatrix) -> Result<IsoVerdict> {
    brute_force_iso_with(a, b, SearchOptions::default())
}

pub fn brute_force_iso_with(a: &StructureMatrix, b: &StructureMatrix, opts: SearchOptions) -> Result<IsoVerdict> {
    let p = a.spec().require_finite()?;
    if a.spec() != b.spec() {
        return Err(Error::MixedFields(a.spec(), b.spec()));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{}D vs {}D", a.dim(), b.dim())));
    }
    if opts.prefilter {
        if let Some(inv) = fingerprint(a).separating_invariant(&fingerprint(b)) {
            return Ok(IsoVerdict::NotIsomorphic(NonIsoReason::SeparatingInvariant(inv)));
        }
    }
    let (fa, fb) = (FpAlg::from_structure(a)?, FpAlg::from_structure(b)?);
    let found = match opts.mode {
        SearchMode::Pruned => kernel::find_witness(&fa, &fb),
        SearchMode::Sweep => kernel::sweep_witness(&fa, &fb),
    };
    match found {
        None => Ok(IsoVerdict::NotIsomorphic(NonIsoReason::ExhaustedSearch)),
        Some(g) => {
            let witness = BaseChange::new(kernel::grid_to_matrix(a.dim(), p, &g))?;
            // recheck in exact arithmetic, away from the search loop
            assert_eq!(&a.act(&witness)?, b, "search returned a false witness");
            Ok(IsoVerdict::Isomorphic { witness, orientation: Orientation::Forward })
        }
    }
}

/// All pairwise verdicts; entry `[i][j]` relates `items[i]` to `items[j]`.
pub fn pairwise_report(items: &[StructureMatrix]) -> Result<Vec<Vec<IsoVerdict>>> {
    let n = items.len();
    let mut out = vec![vec![IsoVerdict::Unknown; n]; n];
    for i in 0..n {
        items[i].spec().require_finite()?;
        out[i][i] = IsoVerdict::Isomorphic {
            witness: BaseChange::identity(items[i].spec(), items[i].dim()),
            orientation: Orientation::Forward,
        };
        for j in i + 1..n {
            let v = brute_force_iso(&items[i], &items[j])?;
            out[j][i] = v.swapped();
            out[i][j] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> FieldSpec {
        FieldSpec::prime(5).unwrap()
    }

    #[test]
    fn identity_claim_is_forward() {
        let a = StructureMatrix::from_ints(f5(), &[&[0, 0, 0, 0], &[1, 0, 0, 0]]).unwrap();
        let v = check_witness(&a, &a, &BaseChange::identity(f5(), 2)).unwrap();
        assert_eq!(v, IsoVerdict::Isomorphic { witness: BaseChange::identity(f5(), 2), orientation: Orientation::Forward });
    }

    #[test]
    fn reverse_orientation_detected() {
        let q = FieldSpec::RATIONALS;
        let a = StructureMatrix::from_ints(q, &[&[1, 0, 0, 0], &[0, 0, 0, 0]]).unwrap();
        let g = BaseChange::new(Matrix::from_ints(q, &[&[2, 0], &[1, 1]])).unwrap();
        let b = a.act(&g).unwrap();
        assert_eq!(check_witness(&b, &a, &g).unwrap().witness(), Some(&g));
        assert!(matches!(check_witness(&b, &a, &g).unwrap(), IsoVerdict::Isomorphic { orientation: Orientation::Reverse, .. }));
    }

    #[test]
    fn pairwise_diagonal_and_duplicates() {
        let a = StructureMatrix::from_ints(f5(), &[&[0, 0, 0, 0], &[1, 0, 0, 0]]).unwrap();
        let single = pairwise_report(std::slice::from_ref(&a)).unwrap();
        assert!(single[0][0].is_isomorphic());
        let dup = pairwise_report(&[a.clone(), a.clone()]).unwrap();
        assert!(dup[0][1].is_isomorphic() && dup[1][0].is_isomorphic());
    }

    #[test]
    fn requires_finite_field() {
        let a = StructureMatrix::zero(FieldSpec::RATIONALS, 2);
        assert_eq!(brute_force_iso(&a, &a), Err(Error::RequiresFiniteField));
    }
}
