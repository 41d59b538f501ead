//! Exact scalars over the rationals or a prime field `F_p` with `p ∉ {2, 3}`.
//!
//! Every [`FieldValue`] knows which field it belongs to. The checked
//! operations (`try_add`, `try_div`, ...) report mixed fields and division by
//! zero as errors; the `std::ops` impls panic on the same conditions and are
//! meant for code that has already validated its operands (matrices check
//! field agreement once at construction).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest modulus accepted by [`FieldSpec::prime`]. Residue products are
/// computed in `u64`, so anything below `2^32` would do; the cap keeps
/// exhaustive enumerations from being requested over absurd fields.
pub const MAX_PRIME: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    Rationals,
    Prime(u32),
}

/// The base field: `Q` or `F_p` for a prime `p ≥ 5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec(Kind);

impl FieldSpec {
    pub const RATIONALS: FieldSpec = FieldSpec(Kind::Rationals);

    /// `F_p`. Rejects composites and the excluded characteristics 2 and 3.
    pub fn prime(p: u64) -> Result<Self> {
        if p == 2 || p == 3 {
            return Err(Error::UnsupportedField(format!(
                "characteristic {p} is excluded (characteristic must not be 2 or 3)"
            )));
        }
        if !is_prime(p) {
            return Err(Error::UnsupportedField(format!("{p} is not prime")));
        }
        if p > MAX_PRIME {
            return Err(Error::UnsupportedField(format!("{p} exceeds the supported modulus bound")));
        }
        Ok(FieldSpec(Kind::Prime(p as u32)))
    }

    pub fn modulus(&self) -> Option<u32> {
        match self.0 {
            Kind::Rationals => None,
            Kind::Prime(p) => Some(p),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.modulus().is_some()
    }

    /// Modulus of a finite field, or `RequiresFiniteField`.
    pub fn require_finite(&self) -> Result<u32> {
        self.modulus().ok_or(Error::RequiresFiniteField)
    }

    /// All field elements in residue order `0, 1, .., p-1`.
    pub fn elements(&self) -> Result<Vec<FieldValue>> {
        let p = self.require_finite()?;
        Ok((0..p).map(|v| FieldValue::residue_unchecked(p, v)).collect())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Kind::Rationals => write!(f, "Q"),
            Kind::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(FieldSpec::RATIONALS);
        }
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("field selector `{s}` is neither `Q` nor a prime")));
        }
        let p: u64 = s
            .parse()
            .map_err(|_| Error::UnsupportedField(format!("{s} exceeds the supported modulus bound")))?;
        FieldSpec::prime(p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_mod(base: u32, mut exp: u64, p: u32) -> u32 {
    let p64 = p as u64;
    let mut acc = 1u64 % p64;
    let mut b = base as u64 % p64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p64;
        }
        b = b * b % p64;
        exp >>= 1;
    }
    acc as u32
}

/// Inverse of a nonzero residue (Fermat).
pub(crate) fn inv_mod(v: u32, p: u32) -> u32 {
    debug_assert!(v % p != 0);
    pow_mod(v, (p - 2) as u64, p)
}

fn reduce_bigint(n: &BigInt, p: u32) -> u32 {
    n.mod_floor(&BigInt::from(p)).to_u32().expect("residue fits in u32")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Rational(BigRational),
    Residue { p: u32, v: u32 },
}

/// An exact scalar: a reduced fraction over `Q` or a canonical residue in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldValue(Repr);

impl FieldValue {
    pub fn zero(spec: FieldSpec) -> Self {
        Self::from_int(spec, 0)
    }

    pub fn one(spec: FieldSpec) -> Self {
        Self::from_int(spec, 1)
    }

    pub fn from_int(spec: FieldSpec, n: i64) -> Self {
        match spec.0 {
            Kind::Rationals => FieldValue(Repr::Rational(BigRational::from_integer(n.into()))),
            Kind::Prime(p) => {
                FieldValue::residue_unchecked(p, n.rem_euclid(p as i64) as u32)
            }
        }
    }

    /// Maps a rational into the field; over `F_p` the denominator must be a unit.
    pub fn from_rational(spec: FieldSpec, q: &BigRational) -> Result<Self> {
        match spec.0 {
            Kind::Rationals => Ok(FieldValue(Repr::Rational(q.clone()))),
            Kind::Prime(p) => {
                let den = reduce_bigint(q.denom(), p);
                if den == 0 {
                    return Err(Error::DivisionByZero);
                }
                let num = reduce_bigint(q.numer(), p);
                let v = (num as u64 * inv_mod(den, p) as u64 % p as u64) as u32;
                Ok(FieldValue::residue_unchecked(p, v))
            }
        }
    }

    /// The residue `v mod p` in `F_p`.
    pub fn residue(spec: FieldSpec, v: u64) -> Result<Self> {
        let p = spec.require_finite()?;
        Ok(FieldValue::residue_unchecked(p, (v % p as u64) as u32))
    }

    pub(crate) fn residue_unchecked(p: u32, v: u32) -> Self {
        debug_assert!(v < p);
        FieldValue(Repr::Residue { p, v })
    }

    pub fn spec(&self) -> FieldSpec {
        match &self.0 {
            Repr::Rational(_) => FieldSpec::RATIONALS,
            Repr::Residue { p, .. } => FieldSpec(Kind::Prime(*p)),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rational(q) => Some(q),
            Repr::Residue { .. } => None,
        }
    }

    pub fn as_residue(&self) -> Option<u32> {
        match &self.0 {
            Repr::Rational(_) => None,
            Repr::Residue { v, .. } => Some(*v),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Rational(q) => q.is_zero(),
            Repr::Residue { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Rational(q) => q.is_one(),
            Repr::Residue { v, .. } => *v == 1,
        }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.spec() == other.spec() {
            Ok(())
        } else {
            Err(Error::MixedFields(self.spec(), other.spec()))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => FieldValue(Repr::Rational(a + b)),
            (Repr::Residue { p, v: a }, Repr::Residue { v: b, .. }) => {
                FieldValue::residue_unchecked(*p, ((*a as u64 + *b as u64) % *p as u64) as u32)
            }
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => FieldValue(Repr::Rational(a * b)),
            (Repr::Residue { p, v: a }, Repr::Residue { v: b, .. }) => {
                FieldValue::residue_unchecked(*p, (*a as u64 * *b as u64 % *p as u64) as u32)
            }
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Rational(q) => FieldValue(Repr::Rational(q.recip())),
            Repr::Residue { p, v } => FieldValue::residue_unchecked(*p, inv_mod(*v, *p)),
        })
    }

    fn neg_ref(&self) -> Self {
        match &self.0 {
            Repr::Rational(q) => FieldValue(Repr::Rational(-q)),
            Repr::Residue { p, v } => FieldValue::residue_unchecked(*p, (*p - *v) % *p),
        }
    }

    /// Integer power; negative exponents invert (and fail on zero).
    pub fn pow(&self, exp: i64) -> Result<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = FieldValue::one(self.spec());
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Whether `u² = self` has a solution in the field.
    pub fn has_sqrt(&self) -> bool {
        match &self.0 {
            Repr::Rational(q) => {
                !q.is_negative() && is_perfect_square(q.numer()) && is_perfect_square(q.denom())
            }
            Repr::Residue { p, v } => *v == 0 || pow_mod(*v, ((*p - 1) / 2) as u64, *p) == 1,
        }
    }

    /// Whether `u³ = self` has a solution in the field.
    pub fn has_cbrt(&self) -> bool {
        match &self.0 {
            Repr::Rational(q) => is_perfect_cube(q.numer()) && is_perfect_cube(q.denom()),
            Repr::Residue { p, v } => {
                // cubing is a bijection when 3 does not divide p - 1
                *v == 0 || (*p - 1) % 3 != 0 || pow_mod(*v, ((*p - 1) / 3) as u64, *p) == 1
            }
        }
    }

    /// Parses `[+-]digits[/digits]`. Over `F_p`, `a/b` means `a · b⁻¹`.
    pub fn parse(text: &str, spec: FieldSpec) -> Result<Self> {
        let q = parse_rational(text)?;
        FieldValue::from_rational(spec, &q)
    }
}

/// Parses the scalar text syntax into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("`{text}` is not a scalar (expected [+-]int[/int])"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t, None),
    };
    let digits = num.strip_prefix(['+', '-']).unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            d.parse().map_err(|_| bad())?
        }
    };
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}

fn is_perfect_cube(n: &BigInt) -> bool {
    let r = n.cbrt();
    &(&r * &r * &r) == n
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rational(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Repr::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Repr::Residue { v, .. } => write!(f, "{v}"),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldValue> for &FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: &FieldValue) -> FieldValue {
                self.$checked(rhs).unwrap_or_else(|e| panic!("field arithmetic: {e}"))
            }
        }
        impl $trait<FieldValue> for FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: FieldValue) -> FieldValue {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldValue> for FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: &FieldValue) -> FieldValue {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for &FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        self.neg_ref()
    }
}

impl Neg for FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        self.neg_ref()
    }
}
