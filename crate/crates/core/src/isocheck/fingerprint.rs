use serde::Serialize;

use crate::field::FieldValue;
use crate::kernel::{self, FpAlg};
use crate::msc::{StructureMatrix, TraceClass};

/// Isomorphism invariants. The counting fields are only filled over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub trace_class: TraceClass,
    pub dim_square: usize,
    pub commutative: bool,
    pub unital: bool,
    /// `(Tr₁·u, Tr₂·u)` for the unit `u`.
    pub trace_on_unit: Option<(FieldValue, FieldValue)>,
    pub idempotent_count: Option<usize>,
    /// Number of `x` with `x² = 0`.
    pub square_zero_count: Option<usize>,
    /// `left_rank_multiset[r]` = number of `x` whose left multiplication has rank `r`.
    pub left_rank_multiset: Option<Vec<usize>>,
    pub right_rank_multiset: Option<Vec<usize>>,
}

impl Fingerprint {
    /// Name of the first invariant on which `self` and `other` differ.
    pub fn separating_invariant(&self, other: &Fingerprint) -> Option<&'static str> {
        if self.trace_class != other.trace_class {
            Some("trace_class")
        } else if self.dim_square != other.dim_square {
            Some("dim_square")
        } else if self.commutative != other.commutative {
            Some("commutative")
        } else if self.unital != other.unital {
            Some("unital")
        } else if self.trace_on_unit != other.trace_on_unit {
            Some("trace_on_unit")
        } else if self.idempotent_count != other.idempotent_count {
            Some("idempotent_count")
        } else if self.square_zero_count != other.square_zero_count {
            Some("square_zero_count")
        } else if self.left_rank_multiset != other.left_rank_multiset {
            Some("left_rank_multiset")
        } else if self.right_rank_multiset != other.right_rank_multiset {
            Some("right_rank_multiset")
        } else {
            None
        }
    }
}

#[derive(Serialize)]
struct FingerprintJson {
    trace_class: String,
    dim_square: usize,
    commutative: bool,
    unital: bool,
    trace_on_unit: Option<(String, String)>,
    idempotent_count: Option<usize>,
    square_zero_count: Option<usize>,
    left_rank_multiset: Option<Vec<usize>>,
    right_rank_multiset: Option<Vec<usize>>,
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FingerprintJson {
            trace_class: self.trace_class.to_string(),
            dim_square: self.dim_square,
            commutative: self.commutative,
            unital: self.unital,
            trace_on_unit: self.trace_on_unit.as_ref().map(|(a, b)| (a.to_string(), b.to_string())),
            idempotent_count: self.idempotent_count,
            square_zero_count: self.square_zero_count,
            left_rank_multiset: self.left_rank_multiset.clone(),
            right_rank_multiset: self.right_rank_multiset.clone(),
        }
        .serialize(s)
    }
}

/// Counts over all of `F_p^n`.
struct Counts {
    idempotents: usize,
    square_zero: usize,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn counts_fast(a: &FpAlg) -> Counts {
    let (n, p) = (a.dim(), a.p());
    let basis: Vec<[u8; 3]> = (0..n)
        .map(|i| {
            let mut e = [0u8; 3];
            e[i] = 1;
            e
        })
        .collect();
    let mut c = Counts { idempotents: 0, square_zero: 0, left: vec![0; n + 1], right: vec![0; n + 1] };
    for x in kernel::vectors(n, p) {
        let sq = a.mul_vec(&x, &x);
        c.idempotents += (sq == x) as usize;
        c.square_zero += (sq == [0; 3]) as usize;
        let lcols: Vec<[u8; 3]> = basis.iter().map(|e| a.mul_vec(&x, e)).collect();
        let rcols: Vec<[u8; 3]> = basis.iter().map(|e| a.mul_vec(e, &x)).collect();
        c.left[kernel::rank(n, p, &lcols)] += 1;
        c.right[kernel::rank(n, p, &rcols)] += 1;
    }
    c
}

fn counts_exact(a: &StructureMatrix) -> Counts {
    let n = a.dim();
    let mut c = Counts { idempotents: 0, square_zero: 0, left: vec![0; n + 1], right: vec![0; n + 1] };
    for x in crate::msc::all_vectors(a.spec(), n).expect("finite field") {
        let sq = a.multiply(&x, &x).expect("dimensions agree");
        c.idempotents += (sq == x) as usize;
        c.square_zero += sq.is_zero() as usize;
        c.left[a.left_operator(&x).expect("dimensions agree").rank()] += 1;
        c.right[a.right_operator(&x).expect("dimensions agree").rank()] += 1;
    }
    c
}

pub fn fingerprint(a: &StructureMatrix) -> Fingerprint {
    let traces = a.trace_vectors();
    let unit = a.find_unit();
    let trace_on_unit = unit.as_ref().map(|u| (u.pair(&traces.tr1), u.pair(&traces.tr2)));
    let counts = if a.spec().is_finite() {
        Some(match FpAlg::from_structure(a) {
            Ok(fast) => counts_fast(&fast),
            Err(_) => counts_exact(a),
        })
    } else {
        None
    };
    let (idempotent_count, square_zero_count, left_rank_multiset, right_rank_multiset) = match counts {
        Some(c) => (Some(c.idempotents), Some(c.square_zero), Some(c.left), Some(c.right)),
        None => (None, None, None, None),
    };
    Fingerprint {
        trace_class: traces.class(),
        dim_square: a.square_dim(),
        commutative: a.is_commutative(),
        unital: unit.is_some(),
        trace_on_unit,
        idempotent_count,
        square_zero_count,
        left_rank_multiset,
        right_rank_multiset,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn fast_and_exact_counts_agree() {
        let f7 = FieldSpec::prime(7).unwrap();
        let a = StructureMatrix::from_ints(
            f7,
            &[&[1, 0, 0, 0, 0, 0, 0, 0, 1], &[0, 1, 0, 1, 0, 1, 0, -1, 0], &[0, 0, 1, 0, 0, 0, 1, 0, 0]],
        )
        .unwrap();
        let fast = counts_fast(&FpAlg::from_structure(&a).unwrap());
        let exact = counts_exact(&a);
        assert_eq!(fast.idempotents, exact.idempotents);
        assert_eq!(fast.square_zero, exact.square_zero);
        assert_eq!(fast.left, exact.left);
        assert_eq!(fast.right, exact.right);
    }

    #[test]
    fn zero_algebra() {
        let f5 = FieldSpec::prime(5).unwrap();
        let fp = fingerprint(&StructureMatrix::zero(f5, 3));
        assert_eq!(fp.dim_square, 0);
        assert_eq!(fp.idempotent_count, Some(1));
        assert_eq!(fp.square_zero_count, Some(125));
        assert_eq!(fp.left_rank_multiset, Some(vec![125, 0, 0, 0]));
        let q = fingerprint(&StructureMatrix::zero(FieldSpec::RATIONALS, 3));
        assert_eq!(q.idempotent_count, None);
        assert_eq!(fp.separating_invariant(&fp), None);
        assert_eq!(fp.separating_invariant(&q), Some("idempotent_count"));
    }
}
