#![allow(dead_code)]

//! Independent oracles: everything here is computed from raw structure
//! constants with explicit index loops, never through the library's matrix
//! formulas.

pub mod gen;

use assoc3d::catalog::Catalog;
use assoc3d::{FieldSpec, FieldValue, Matrix, StructureMatrix};

pub fn f5() -> FieldSpec {
    FieldSpec::prime(5).unwrap()
}

pub fn f7() -> FieldSpec {
    FieldSpec::prime(7).unwrap()
}

pub fn q() -> FieldSpec {
    FieldSpec::RATIONALS
}

pub fn catalog() -> &'static Catalog {
    Catalog::shipped()
}

fn zero(spec: FieldSpec) -> FieldValue {
    FieldValue::zero(spec)
}

/// `(e_i e_j) e_k == e_i (e_j e_k)` for every basis triple.
pub fn associative_oracle(a: &StructureMatrix) -> bool {
    let n = a.dim();
    let spec = a.spec();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut lhs = zero(spec);
                    let mut rhs = zero(spec);
                    for m in 0..n {
                        lhs = lhs + a.constant(i, j, m) * a.constant(m, k, l);
                        rhs = rhs + a.constant(j, k, m) * a.constant(i, m, l);
                    }
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `Tr1_k = Σ_j c(j,k,j)`, `Tr2_k = Σ_j c(k,j,j)`.
pub fn traces_oracle(a: &StructureMatrix) -> (Vec<FieldValue>, Vec<FieldValue>) {
    let n = a.dim();
    let spec = a.spec();
    let mut t1 = vec![zero(spec); n];
    let mut t2 = vec![zero(spec); n];
    for k in 0..n {
        for j in 0..n {
            t1[k] = &t1[k] + a.constant(j, k, j);
            t2[k] = &t2[k] + a.constant(k, j, j);
        }
    }
    (t1, t2)
}

pub fn det_oracle(g: &Matrix) -> FieldValue {
    let e = |r: usize, c: usize| g.get(r, c).clone();
    match g.rows() {
        1 => e(0, 0),
        2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
        3 => {
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
        n => panic!("oracle handles n <= 3, got {n}"),
    }
}

/// `b = g⁻¹ a (g ⊗ g)`, checked as `g b = a (g ⊗ g)` entrywise with `g` invertible.
pub fn carries_oracle(g: &Matrix, a: &StructureMatrix, b: &StructureMatrix) -> bool {
    let n = a.dim();
    let spec = a.spec();
    if det_oracle(g).is_zero() {
        return false;
    }
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut lhs = zero(spec);
                for k in 0..n {
                    lhs = lhs + g.get(l, k) * b.constant(i, j, k);
                }
                let mut rhs = zero(spec);
                for x in 0..n {
                    for y in 0..n {
                        rhs = rhs + &(g.get(x, i) * g.get(y, j)) * a.constant(x, y, l);
                    }
                }
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Product of two coordinate vectors from constants.
pub fn product_oracle(a: &StructureMatrix, x: &[FieldValue], y: &[FieldValue]) -> Vec<FieldValue> {
    let n = a.dim();
    (0..n)
        .map(|k| {
            let mut s = zero(a.spec());
            for i in 0..n {
                for j in 0..n {
                    s = s + &(&x[i] * &y[j]) * a.constant(i, j, k);
                }
            }
            s
        })
        .collect()
}

/// Number of `x` with `x² = x`, by enumerating `F_p^n`.
pub fn idempotent_count_oracle(a: &StructureMatrix) -> usize {
    let p = a.spec().modulus().unwrap() as u64;
    let n = a.dim();
    let mut count = 0;
    for code in 0..p.pow(n as u32) {
        let x: Vec<FieldValue> = (0..n)
            .map(|i| FieldValue::residue(a.spec(), (code / p.pow(i as u32)) % p).unwrap())
            .collect();
        if product_oracle(a, &x, &x) == x {
            count += 1;
        }
    }
    count
}

pub fn ints(spec: FieldSpec, rows: &[&[i64]]) -> StructureMatrix {
    StructureMatrix::from_ints(spec, rows).unwrap()
}

pub fn vals(spec: FieldSpec, xs: &[i64]) -> Vec<FieldValue> {
    xs.iter().map(|&x| FieldValue::from_int(spec, x)).collect()
}

pub fn rat(spec: FieldSpec, text: &str) -> FieldValue {
    FieldValue::parse(text, spec).unwrap()
}
