//! Univariate rational functions with rational coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldValue};

/// Dense polynomial, coefficients from degree 0 upward, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Poly(Vec<BigRational>);

impl Poly {
    fn constant(c: BigRational) -> Poly {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    fn x() -> Poly {
        Poly(vec![BigRational::zero(), BigRational::one()])
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    fn add(&self, o: &Poly) -> Poly {
        let len = self.0.len().max(o.0.len());
        let zero = BigRational::zero();
        let mut p = Poly(
            (0..len).map(|i| self.0.get(i).unwrap_or(&zero) + o.0.get(i).unwrap_or(&zero)).collect(),
        );
        p.trim();
        p
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly(vec![]);
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let mut p = Poly(out);
        p.trim();
        p
    }

    fn scale(&self, s: &BigRational) -> Poly {
        let mut p = Poly(self.0.iter().map(|c| c * s).collect());
        p.trim();
        p
    }

    fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = vec![BigRational::zero(); self.0.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = rem.lead() / d.lead();
            quot[rd - dd] = c.clone();
            let mut shifted = vec![BigRational::zero(); rd - dd];
            shifted.extend(d.0.iter().map(|x| x * &c));
            rem = rem.add(&Poly(shifted).neg());
        }
        let mut q = Poly(quot);
        q.trim();
        (q, rem)
    }

    fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a
    }

    fn eval(&self, x: &FieldValue) -> Result<FieldValue> {
        let spec = x.spec();
        let mut acc = FieldValue::zero(spec);
        for c in self.0.iter().rev() {
            acc = acc.try_mul(x)?.try_add(&FieldValue::from_rational(spec, c)?)?;
        }
        Ok(acc)
    }

    /// Scaled to integer coefficients with unit content; returns the scale applied.
    fn primitive(&self) -> (Vec<BigInt>, BigRational) {
        let lcm = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let content = if content.is_zero() { BigInt::one() } else { content };
        let ints = ints.into_iter().map(|c| c / &content).collect();
        (ints, BigRational::new(lcm, content))
    }
}

/// A rational function of at most one named parameter, kept in lowest terms
/// with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamExpr {
    var: Option<String>,
    num: Poly,
    den: Poly,
}

impl ParamExpr {
    pub fn constant(c: BigRational) -> ParamExpr {
        ParamExpr { var: None, num: Poly::constant(c), den: Poly::constant(BigRational::one()) }
    }

    pub fn integer(c: i64) -> ParamExpr {
        ParamExpr::constant(BigRational::from_integer(c.into()))
    }

    pub fn var(name: &str) -> ParamExpr {
        ParamExpr { var: Some(name.to_string()), num: Poly::x(), den: Poly::constant(BigRational::one()) }
    }

    fn build(var: Option<String>, num: Poly, den: Poly) -> Result<ParamExpr> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let lead = den.lead().clone();
        num = num.scale(&lead.recip());
        den = den.scale(&lead.recip());
        let var = if num.degree().unwrap_or(0) == 0 && den.degree() == Some(0) { None } else { var };
        Ok(ParamExpr { var, num, den })
    }

    fn merge_var(&self, o: &ParamExpr) -> Result<Option<String>> {
        match (&self.var, &o.var) {
            (Some(a), Some(b)) if a != b => Err(Error::Parse(format!("expression mixes parameters {a} and {b}"))),
            (Some(a), _) | (None, Some(a)) => Ok(Some(a.clone())),
            (None, None) => Ok(None),
        }
    }

    pub fn try_add(&self, o: &ParamExpr) -> Result<ParamExpr> {
        let var = self.merge_var(o)?;
        ParamExpr::build(var, self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn try_sub(&self, o: &ParamExpr) -> Result<ParamExpr> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &ParamExpr) -> Result<ParamExpr> {
        let var = self.merge_var(o)?;
        ParamExpr::build(var, self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn try_div(&self, o: &ParamExpr) -> Result<ParamExpr> {
        let var = self.merge_var(o)?;
        ParamExpr::build(var, self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn neg(&self) -> ParamExpr {
        ParamExpr { var: self.var.clone(), num: self.num.neg(), den: self.den.clone() }
    }

    pub fn pow(&self, e: i64) -> Result<ParamExpr> {
        let mut acc = ParamExpr::integer(1);
        for _ in 0..e.unsigned_abs() {
            acc = acc.try_mul(self)?;
        }
        if e < 0 {
            ParamExpr::integer(1).try_div(&acc)
        } else {
            Ok(acc)
        }
    }

    /// The parameter name, or `None` for a constant.
    pub fn variable(&self) -> Option<&str> {
        self.var.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.var.is_none() {
            Some(self.num.0.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    /// Larger of numerator and denominator degree.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// Value at `x`; `x` is ignored for constants and may be `None` only then.
    pub fn eval(&self, x: Option<&FieldValue>, spec: FieldSpec) -> Result<FieldValue> {
        match (&self.var, x) {
            (None, _) => {
                let c = self.as_constant().expect("constant");
                FieldValue::from_rational(spec, &c)
            }
            (Some(v), None) => Err(Error::UnboundParameter(v.clone())),
            (Some(_), Some(x)) => {
                if x.spec() != spec {
                    return Err(Error::MixedFields(spec, x.spec()));
                }
                self.num.eval(x)?.try_div(&self.den.eval(x)?)
            }
        }
    }

    /// Substitute `inner` for the parameter.
    pub fn compose(&self, inner: &ParamExpr) -> Result<ParamExpr> {
        if self.var.is_none() {
            return Ok(self.clone());
        }
        let horner = |p: &Poly| -> Result<ParamExpr> {
            let mut acc = ParamExpr::integer(0);
            for c in p.0.iter().rev() {
                acc = acc.try_mul(inner)?.try_add(&ParamExpr::constant(c.clone()))?;
            }
            Ok(acc)
        };
        horner(&self.num)?.try_div(&horner(&self.den)?)
    }
}

fn render_poly(f: &mut String, coeffs: &[BigInt], var: &str) {
    let mut first = true;
    for (deg, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        if neg {
            f.push('-');
        } else if !first {
            f.push('+');
        }
        first = false;
        let mag = c.abs();
        if deg == 0 || !mag.is_one() {
            f.push_str(&mag.to_string());
        }
        if deg >= 1 {
            f.push_str(var);
        }
        if deg >= 2 {
            f.push('^');
            f.push_str(&deg.to_string());
        }
    }
    if first {
        f.push('0');
    }
}

fn term_count(coeffs: &[BigInt]) -> usize {
    coeffs.iter().filter(|c| !c.is_zero()).count()
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self.var.as_deref().unwrap_or("");
        let (mut num, ns) = self.num.primitive();
        let (mut den, ds) = self.den.primitive();
        // num/den = (num_int / ns) / (den_int / ds) = (ds/ns) · num_int / den_int
        let ratio = ds / ns;
        num = num.into_iter().map(|c| c * ratio.numer()).collect();
        den = den.into_iter().map(|c| c * ratio.denom()).collect();
        let mut out = String::new();
        let den_is_one = den.len() == 1 && den[0].is_one();
        if den_is_one {
            render_poly(&mut out, &num, var);
            return f.write_str(&out);
        }
        let mut n = String::new();
        render_poly(&mut n, &num, var);
        let mut d = String::new();
        render_poly(&mut d, &den, var);
        if term_count(&num) > 1 {
            n = format!("({n})");
        }
        let den_monomial_plain = term_count(&den) == 1 && (den.len() == 1 || den.last().is_some_and(|c| c.is_one()));
        if !den_monomial_plain {
            d = format!("({d})");
        }
        write!(f, "{n}/{d}")
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    var: Option<String>,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn peek(&mut self) -> Option<u8> {
        while self.s.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<ParamExpr> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.try_add(&t)? } else { acc.try_sub(&t)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ParamExpr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.try_mul(&self.factor()?)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.factor()?;
                    if d.is_zero() {
                        return Err(Error::DivisionByZero);
                    }
                    acc = acc.try_div(&d)?;
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    acc = acc.try_mul(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ParamExpr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.factor()?.neg());
        }
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = self.peek() == Some(b'-');
            if neg {
                self.pos += 1;
            }
            let start = self.pos;
            while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
            let e: i64 = std::str::from_utf8(&self.s[start..self.pos])
                .expect("ascii")
                .parse()
                .map_err(|_| self.err("expected integer exponent"))?;
            if e > 64 {
                return Err(self.err("exponent too large"));
            }
            if neg && base.is_zero() {
                return Err(Error::DivisionByZero);
            }
            return base.pow(if neg { -e } else { e });
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<ParamExpr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                Ok(ParamExpr::constant(BigRational::from_integer(digits.parse::<BigInt>().expect("digits"))))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.s.get(self.pos).is_some_and(u8::is_ascii_alphanumeric) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii").to_string();
                match &self.var {
                    Some(v) if *v != name => {
                        Err(Error::Parse(format!("expression mixes parameters {v} and {name}")))
                    }
                    _ => {
                        self.var = Some(name.clone());
                        Ok(ParamExpr::var(&name))
                    }
                }
            }
            _ => Err(self.err("expected number, parameter or '('")),
        }
    }
}

impl FromStr for ParamExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<ParamExpr> {
        let mut p = Parser { s: s.as_bytes(), pos: 0, var: None };
        let e = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

impl Serialize for ParamExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ParamExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ParamExpr {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_rendering() {
        for (input, want) in [
            ("1-t", "-t+1"),
            ("(t-1)/2", "(t-1)/2"),
            ("-(t+1)/2", "(-t-1)/2"),
            ("1/k^2", "1/k^2"),
            ("-1/k", "-1/k"),
            ("1-2t", "-2t+1"),
            ("3t", "3t"),
            ("0", "0"),
            ("-3/6", "-1/2"),
            ("alpha4", "alpha4"),
            ("(t^2-1)/(t-1)", "t+1"),
            ("1/(2k)", "1/(2k)"),
            ("t/(t+1)", "t/(t+1)"),
            ("2 - t", "-t+2"),
        ] {
            assert_eq!(p(input).to_string(), want, "{input}");
            assert_eq!(p(want), p(input));
        }
    }

    #[test]
    fn constants_lose_their_variable() {
        assert_eq!(p("t-t+2").variable(), None);
        assert_eq!(p("t/t").as_constant(), Some(BigRational::one()));
        assert_eq!(p("2t").variable(), Some("t"));
    }

    #[test]
    fn evaluation() {
        let q = FieldSpec::RATIONALS;
        let f5 = FieldSpec::prime(5).unwrap();
        let two = FieldValue::from_int(q, 2);
        assert_eq!(p("(t-1)/2").eval(Some(&two), q).unwrap().to_string(), "1/2");
        assert_eq!(p("1/k^2").eval(Some(&two), q).unwrap().to_string(), "1/4");
        assert_eq!(p("1/k").eval(Some(&FieldValue::zero(q)), q), Err(Error::DivisionByZero));
        assert_eq!(p("1/2").eval(None, f5).unwrap().to_string(), "3");
        assert!(matches!(p("t").eval(None, q), Err(Error::UnboundParameter(_))));
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "t+", "(t", "t k", "1/0", "2^x", "t)"] {
            assert!(bad.parse::<ParamExpr>().is_err(), "{bad}");
        }
    }

    #[test]
    fn composition() {
        assert_eq!(p("1-2t").compose(&p("1/k^2")).unwrap(), p("(k^2-2)/k^2"));
        assert_eq!(p("3").compose(&p("k")).unwrap(), p("3"));
    }
}
