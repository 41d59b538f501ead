//! Proptest strategies over F5.

use std::sync::OnceLock;

use assoc3d::{BaseChange, FieldSpec, FieldValue, Matrix, StructureMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use super::{catalog, f5};

pub fn config() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

pub fn residue() -> impl Strategy<Value = FieldValue> {
    (0u64..5).prop_map(|v| FieldValue::residue(f5(), v).unwrap())
}

pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(residue(), rows * cols).prop_map(move |d| Matrix::new(f5(), rows, cols, d).unwrap())
}

pub fn invertible(n: usize) -> impl Strategy<Value = BaseChange> {
    matrix(n, n).prop_filter_map("singular", |m| BaseChange::new(m).ok())
}

/// Random structure matrices, mostly zero so that some are associative.
pub fn msc(n: usize) -> impl Strategy<Value = StructureMatrix> {
    let cell = prop_oneof![6 => Just(0u64), 1 => 1u64..5];
    prop::collection::vec(cell, n * n * n).prop_map(move |d| {
        let vals = d.into_iter().map(|v| FieldValue::residue(f5(), v).unwrap()).collect();
        StructureMatrix::new(Matrix::new(f5(), n, n * n, vals).unwrap()).unwrap()
    })
}

/// Every 3D catalog instance over F5.
pub fn instances() -> &'static [StructureMatrix] {
    static CELL: OnceLock<Vec<StructureMatrix>> = OnceLock::new();
    CELL.get_or_init(|| {
        catalog()
            .entries
            .iter()
            .filter(|e| e.dimension == 3)
            .flat_map(|e| {
                e.admissible_params(f5())
                    .unwrap()
                    .into_iter()
                    .map(move |v| e.instantiate(v.as_ref(), f5()).unwrap())
            })
            .collect()
    })
}

/// An associative algebra: a catalog instance moved by a random base change.
pub fn associative() -> impl Strategy<Value = StructureMatrix> {
    (0..instances().len(), invertible(3)).prop_map(|(i, g)| instances()[i].act(&g).unwrap())
}

pub fn covector_times(v: &[FieldValue], g: &Matrix) -> Vec<FieldValue> {
    (0..g.cols())
        .map(|c| (0..v.len()).fold(FieldValue::zero(g.spec()), |s, r| s + &v[r] * g.get(r, c)))
        .collect()
}

pub fn small_rational() -> impl Strategy<Value = FieldValue> {
    (-20i64..20, 1i64..9).prop_map(|(n, d)| {
        FieldValue::from_rational(FieldSpec::RATIONALS, &BigRational::new(BigInt::from(n), BigInt::from(d))).unwrap()
    })
}

