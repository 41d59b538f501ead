//! Matrices of structure constants and the calculus built on them.
//!
//! An `n`-dimensional algebra with basis `e_1..e_n` is stored as the
//! `n × n²` matrix `A` whose column `(i-1)·n + j` holds the coordinates of
//! `e_i · e_j`; row `k` holds the coefficients of `e_k`. With that layout the
//! product of coordinate vectors is `x · y = A (x ⊗ y)`, associativity is the
//! matrix identity `A (A ⊗ I) = A (I ⊗ A)`, and a change of basis `g` acts by
//! `g⁻¹ A (g ⊗ g)`.

mod matrix;
mod text;
mod trace;

use std::fmt;

pub use matrix::{kron, Matrix};
pub use text::{parse_msc, render_msc};
pub use trace::{TraceClass, TraceClassKind, TraceProfile};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldValue};

/// Column coordinates of an algebra element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordinateVector(Vec<FieldValue>);

impl CoordinateVector {
    pub fn new(spec: FieldSpec, components: Vec<FieldValue>) -> Result<Self> {
        if let Some(v) = components.iter().find(|v| v.spec() != spec) {
            return Err(Error::MixedFields(spec, v.spec()));
        }
        Ok(CoordinateVector(components))
    }

    pub fn from_ints(spec: FieldSpec, components: &[i64]) -> Self {
        CoordinateVector(components.iter().map(|&v| FieldValue::from_int(spec, v)).collect())
    }

    pub fn zero(spec: FieldSpec, n: usize) -> Self {
        CoordinateVector(vec![FieldValue::zero(spec); n])
    }

    /// The basis vector `e_{i+1}` (zero-based `i`).
    pub fn basis(spec: FieldSpec, n: usize, i: usize) -> Self {
        let mut v = CoordinateVector::zero(spec, n);
        v.0[i] = FieldValue::one(spec);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[FieldValue] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(FieldValue::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        CoordinateVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: &FieldValue) -> Self {
        CoordinateVector(self.0.iter().map(|a| a * s).collect())
    }

    /// Covector-vector pairing `Σ row_k · self_k`.
    pub fn pair(&self, row: &[FieldValue]) -> FieldValue {
        let spec = self.0.first().map_or(FieldSpec::RATIONALS, FieldValue::spec);
        self.0.iter().zip(row).fold(FieldValue::zero(spec), |acc, (a, b)| acc + a * b)
    }

    fn as_column(&self, spec: FieldSpec) -> Matrix {
        Matrix::new(spec, self.0.len(), 1, self.0.clone()).expect("vector entries share a field")
    }
}

impl fmt::Display for CoordinateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// An invertible change of basis; the inverse is computed once at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseChange {
    g: Matrix,
    inv: Matrix,
}

impl BaseChange {
    pub fn new(g: Matrix) -> Result<Self> {
        if g.rows() != g.cols() {
            return Err(Error::DimensionMismatch("base change must be square".into()));
        }
        let inv = g.inverse()?;
        Ok(BaseChange { g, inv })
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Self {
        let g = Matrix::identity(spec, n);
        BaseChange { inv: g.clone(), g }
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.g
    }

    pub fn inverse_matrix(&self) -> &Matrix {
        &self.inv
    }

    pub fn inverse(&self) -> BaseChange {
        BaseChange { g: self.inv.clone(), inv: self.g.clone() }
    }

    /// The product `self · other`.
    pub fn compose(&self, other: &BaseChange) -> Result<BaseChange> {
        Ok(BaseChange { g: self.g.mul(&other.g)?, inv: other.inv.mul(&self.inv)? })
    }
}

impl fmt::Display for BaseChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.g.fmt(f)
    }
}

/// The `n × n²` matrix of structure constants of an `n`-dimensional algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructureMatrix {
    n: usize,
    m: Matrix,
}

impl StructureMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        let n = m.rows();
        if n == 0 || m.cols() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "structure matrix must be n x n^2, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(StructureMatrix { n, m })
    }

    pub fn from_ints(spec: FieldSpec, rows: &[&[i64]]) -> Result<Self> {
        StructureMatrix::new(Matrix::from_ints(spec, rows))
    }

    pub fn zero(spec: FieldSpec, n: usize) -> Self {
        StructureMatrix { n, m: Matrix::zeros(spec, n, n * n) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> FieldSpec {
        self.m.spec()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    /// Coefficient of `e_k` in `e_i · e_j` (zero-based indices).
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &FieldValue {
        self.m.get(k, i * self.n + j)
    }

    /// Coordinates of `e_i · e_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> CoordinateVector {
        CoordinateVector((0..self.n).map(|k| self.constant(i, j, k).clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    fn check_vector(&self, x: &CoordinateVector) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a {}-dimensional algebra",
                x.dim(),
                self.n
            )));
        }
        if let Some(v) = x.components().iter().find(|v| v.spec() != self.spec()) {
            return Err(Error::MixedFields(self.spec(), v.spec()));
        }
        Ok(())
    }

    /// `A (x ⊗ y)`.
    pub fn multiply(&self, x: &CoordinateVector, y: &CoordinateVector) -> Result<CoordinateVector> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        let spec = self.spec();
        let xy = x.as_column(spec).kron(&y.as_column(spec))?;
        let out = self.m.mul(&xy)?;
        Ok(CoordinateVector(out.entries().to_vec()))
    }

    /// `A (A ⊗ I) = A (I ⊗ A)`, checked entrywise.
    pub fn is_associative(&self) -> bool {
        let id = Matrix::identity(self.spec(), self.n);
        let left = self.m.mul(&self.m.kron(&id).expect("same field")).expect("shapes agree");
        let right = self.m.mul(&id.kron(&self.m).expect("same field")).expect("shapes agree");
        left == right
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (0..self.n).all(|k| self.constant(i, j, k) == self.constant(j, i, k))))
    }

    /// Dimension of the span of all products `e_i · e_j`.
    pub fn square_dim(&self) -> usize {
        self.m.rank()
    }

    /// `Tr₁(A)_k = Σ_j a_{jk}^j`, `Tr₂(A)_k = Σ_j a_{kj}^j`.
    pub fn trace_vectors(&self) -> TraceProfile {
        let spec = self.spec();
        let n = self.n;
        let sum = |f: &dyn Fn(usize) -> FieldValue| (0..n).fold(FieldValue::zero(spec), |acc, j| acc + f(j));
        let tr1 = (0..n).map(|k| sum(&|j| self.constant(j, k, j).clone())).collect();
        let tr2 = (0..n).map(|k| sum(&|j| self.constant(k, j, j).clone())).collect();
        TraceProfile { tr1, tr2 }
    }

    pub fn trace_class(&self) -> TraceClass {
        self.trace_vectors().class()
    }

    /// `ρ(g, A) = g⁻¹ A (g ⊗ g)`.
    pub fn act(&self, g: &BaseChange) -> Result<StructureMatrix> {
        if g.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} base change on a {}-dimensional algebra",
                g.dim(),
                g.dim(),
                self.n
            )));
        }
        let gg = g.matrix().kron(g.matrix())?;
        let m = g.inverse_matrix().mul(&self.m.mul(&gg)?)?;
        Ok(StructureMatrix { n: self.n, m })
    }

    /// `L_x` with `L_x · y = x · y`.
    pub fn left_operator(&self, x: &CoordinateVector) -> Result<Matrix> {
        self.check_vector(x)?;
        Ok(self.operator(x, |i, j, k| self.constant(i, j, k)))
    }

    /// `R_x` with `R_x · y = y · x`.
    pub fn right_operator(&self, x: &CoordinateVector) -> Result<Matrix> {
        self.check_vector(x)?;
        Ok(self.operator(x, |i, j, k| self.constant(j, i, k)))
    }

    fn operator<'a>(&'a self, x: &CoordinateVector, c: impl Fn(usize, usize, usize) -> &'a FieldValue) -> Matrix {
        let spec = self.spec();
        let n = self.n;
        let mut out = Matrix::zeros(spec, n, n);
        for k in 0..n {
            for j in 0..n {
                let v = (0..n).fold(FieldValue::zero(spec), |acc, i| acc + &x.0[i] * c(i, j, k));
                out.set(k, j, v);
            }
        }
        out
    }

    /// Linear system for `u` with `L_u = R_u = I`: one row per entry of each operator.
    fn unit_system(&self) -> (Matrix, Vec<FieldValue>) {
        let spec = self.spec();
        let n = self.n;
        let mut rows = Vec::with_capacity(2 * n * n);
        let mut rhs = Vec::with_capacity(2 * n * n);
        for left in [true, false] {
            for k in 0..n {
                for j in 0..n {
                    rows.push(
                        (0..n)
                            .map(|i| if left { self.constant(i, j, k) } else { self.constant(j, i, k) }.clone())
                            .collect(),
                    );
                    rhs.push(if j == k { FieldValue::one(spec) } else { FieldValue::zero(spec) });
                }
            }
        }
        (Matrix::from_rows(spec, rows).expect("rectangular"), rhs)
    }

    /// The two-sided unit, if any.
    pub fn find_unit(&self) -> Option<CoordinateVector> {
        let (sys, rhs) = self.unit_system();
        sys.solve(&rhs).map(|(u, _)| CoordinateVector(u))
    }

    /// Dimension of the solution space of the unit equations (`None` when inconsistent).
    pub fn unit_solution_nullity(&self) -> Option<usize> {
        let (sys, rhs) = self.unit_system();
        sys.solve(&rhs).map(|(_, nullity)| nullity)
    }

    /// Every `x` with `x · x = x`, in lexicographic coordinate order. Finite fields only.
    pub fn idempotents(&self) -> Result<Vec<CoordinateVector>> {
        let spec = self.spec();
        spec.require_finite()?;
        let mut out = Vec::new();
        for x in all_vectors(spec, self.n)? {
            if self.multiply(&x, &x)? == x {
                out.push(x);
            }
        }
        Ok(out)
    }
}

/// All of `F_p^n` in lexicographic order (first coordinate most significant).
pub fn all_vectors(spec: FieldSpec, n: usize) -> Result<Vec<CoordinateVector>> {
    let elems = spec.elements()?;
    let p = elems.len();
    let total = p.pow(n as u32);
    Ok((0..total)
        .map(|mut idx| {
            let mut comps = vec![FieldValue::zero(spec); n];
            for slot in comps.iter_mut().rev() {
                *slot = elems[idx % p].clone();
                idx /= p;
            }
            CoordinateVector(comps)
        })
        .collect())
}

impl fmt::Display for StructureMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.m.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::RATIONALS;

    fn as26(spec: FieldSpec) -> StructureMatrix {
        StructureMatrix::from_ints(
            spec,
            &[&[1, 0, 0, 0, 0, 0, 0, 0, 0], &[0, 0, 0, 0, 0, 0, 0, 1, 0], &[0, 0, 0, 0, 0, 0, 0, 0, 1]],
        )
        .unwrap()
    }

    fn e(i: usize) -> CoordinateVector {
        CoordinateVector::basis(Q, 3, i)
    }

    #[test]
    fn multiply_reads_columns() {
        let a = as26(Q);
        assert_eq!(a.multiply(&e(0), &e(0)).unwrap(), e(0));
        assert_eq!(a.multiply(&e(2), &e(1)).unwrap(), e(1));
        assert!(a.multiply(&CoordinateVector::zero(Q, 3), &e(1)).unwrap().is_zero());
        let short = CoordinateVector::zero(Q, 2);
        assert!(matches!(a.multiply(&short, &e(1)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn associativity_examples() {
        assert!(StructureMatrix::zero(Q, 3).is_associative());
        let as21 = StructureMatrix::from_ints(Q, &[&[0, 0, 0, 0], &[1, 0, 0, 0]]).unwrap();
        assert!(as21.is_associative());
        // e1e2 = e1, e2e2 = e2: (e_i e_j) e_k = e_i (e_j e_k) holds on every basis triple
        let m = StructureMatrix::from_ints(Q, &[&[0, 1, 0, 0], &[0, 0, 0, 1]]).unwrap();
        assert!(m.is_associative());
        // e1e1 = e2, e2e1 = e1: (e1e1)e1 = e1 but e1(e1e1) = e1e2 = 0
        let bad = StructureMatrix::from_ints(Q, &[&[0, 0, 1, 0], &[1, 0, 0, 0]]).unwrap();
        assert!(!bad.is_associative());
    }

    #[test]
    fn traces_of_unital_examples() {
        let u0 = StructureMatrix::from_ints(
            Q,
            &[&[1, 0, 0, 0, 0, 0, 0, 0, 0], &[0, 1, 0, 1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 0, 0, 1, 0, 0]],
        )
        .unwrap();
        let t = u0.trace_vectors();
        assert_eq!(t.to_string(), "(3,0,0) (3,0,0)");
        assert_eq!(u0.trace_class(), TraceClass::M1Lambda(FieldValue::one(Q)));
        let u1 = StructureMatrix::from_ints(
            Q,
            &[&[1, 0, 0, 0, 0, 0, 0, 0, 1], &[0, 1, 0, 1, 0, 1, 0, -1, 0], &[0, 0, 1, 0, 0, 0, 1, 0, 0]],
        )
        .unwrap();
        assert_eq!(u1.trace_vectors().to_string(), "(3,0,1) (3,0,-1)");
        assert_eq!(u1.trace_class(), TraceClass::M2);
        assert_eq!(StructureMatrix::zero(Q, 3).trace_class(), TraceClass::M0);
        let unit = u0.find_unit().unwrap();
        assert_eq!(u0.left_operator(&unit).unwrap(), Matrix::identity(Q, 3));
        assert_eq!(u0.right_operator(&unit).unwrap(), Matrix::identity(Q, 3));
        assert_eq!(u0.unit_solution_nullity(), Some(0));
    }

    #[test]
    fn unit_absent_for_degenerate_algebras() {
        assert!(StructureMatrix::zero(Q, 3).find_unit().is_none());
        let as1110 = StructureMatrix::from_ints(Q, &[&[1, 0, 0, 0, 0, 0, 0, 0, 0], &[0; 9], &[0; 9]]).unwrap();
        assert!(as1110.find_unit().is_none());
    }

    #[test]
    fn operators_extract_columns() {
        let a = as26(Q);
        let l = a.left_operator(&e(2)).unwrap();
        // e3 e1 = 0, e3 e2 = e2, e3 e3 = e3
        assert_eq!(l, Matrix::from_ints(Q, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
        for j in 0..3 {
            assert_eq!(a.multiply(&e(2), &e(j)).unwrap().components(), l.transpose().row(j));
        }
        assert!(a.left_operator(&CoordinateVector::zero(Q, 3)).unwrap().is_zero());
    }

    #[test]
    fn identity_action_is_trivial() {
        let a = as26(Q);
        assert_eq!(a.act(&BaseChange::identity(Q, 3)).unwrap(), a);
        let g2 = BaseChange::identity(Q, 2);
        assert!(matches!(a.act(&g2), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn idempotents_over_small_field() {
        let f5 = FieldSpec::prime(5).unwrap();
        let zero = StructureMatrix::zero(f5, 3);
        assert_eq!(zero.idempotents().unwrap(), vec![CoordinateVector::zero(f5, 3)]);
        let as1110 = StructureMatrix::from_ints(f5, &[&[1, 0, 0, 0, 0, 0, 0, 0, 0], &[0; 9], &[0; 9]]).unwrap();
        assert!(as1110.idempotents().unwrap().contains(&CoordinateVector::basis(f5, 3, 0)));
        assert_eq!(StructureMatrix::zero(Q, 2).idempotents(), Err(Error::RequiresFiniteField));
    }
}
