use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::FieldValue;

use super::Matrix;

/// The pair of trace covectors `(Tr₁, Tr₂)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TraceProfile {
    pub tr1: Vec<FieldValue>,
    pub tr2: Vec<FieldValue>,
}

/// Which of the five invariant subsets an algebra falls in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TraceClass {
    /// `Tr₁`, `Tr₂` linearly independent.
    M2,
    /// `Tr₂ = λ·Tr₁` with both nonzero.
    M1Lambda(FieldValue),
    /// `Tr₁ ≠ 0`, `Tr₂ = 0`.
    M1Zero,
    /// `Tr₁ = 0`, `Tr₂ ≠ 0`.
    M1Infinity,
    M0,
}

/// [`TraceClass`] without the λ value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TraceClassKind {
    M2,
    M1Lambda,
    M1Zero,
    M1Infinity,
    M0,
}

impl TraceProfile {
    pub fn class(&self) -> TraceClass {
        let zero1 = self.tr1.iter().all(FieldValue::is_zero);
        let zero2 = self.tr2.iter().all(FieldValue::is_zero);
        match (zero1, zero2) {
            (true, true) => TraceClass::M0,
            (false, true) => TraceClass::M1Zero,
            (true, false) => TraceClass::M1Infinity,
            (false, false) => {
                let pivot = self.tr1.iter().position(|v| !v.is_zero()).expect("tr1 nonzero");
                let lambda = &self.tr2[pivot] / &self.tr1[pivot];
                if self.tr1.iter().zip(&self.tr2).all(|(a, b)| &(a * &lambda) == b) {
                    TraceClass::M1Lambda(lambda)
                } else {
                    TraceClass::M2
                }
            }
        }
    }

    /// Both covectors multiplied on the right by `g`.
    pub fn times(&self, g: &Matrix) -> TraceProfile {
        let apply = |v: &[FieldValue]| {
            (0..g.cols())
                .map(|c| v.iter().enumerate().fold(FieldValue::zero(g.spec()), |acc, (r, x)| acc + x * g.get(r, c)))
                .collect()
        };
        TraceProfile { tr1: apply(&self.tr1), tr2: apply(&self.tr2) }
    }
}

pub(crate) fn fmt_covector(f: &mut fmt::Formatter<'_>, v: &[FieldValue]) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

impl fmt::Display for TraceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_covector(f, &self.tr1)?;
        write!(f, " ")?;
        fmt_covector(f, &self.tr2)
    }
}

impl TraceClass {
    pub fn kind(&self) -> TraceClassKind {
        match self {
            TraceClass::M2 => TraceClassKind::M2,
            TraceClass::M1Lambda(_) => TraceClassKind::M1Lambda,
            TraceClass::M1Zero => TraceClassKind::M1Zero,
            TraceClass::M1Infinity => TraceClassKind::M1Infinity,
            TraceClass::M0 => TraceClassKind::M0,
        }
    }

    pub fn lambda(&self) -> Option<&FieldValue> {
        match self {
            TraceClass::M1Lambda(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for TraceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceClass::M1Lambda(l) => write!(f, "M1Lambda({l})"),
            other => write!(f, "{:?}", other.kind()),
        }
    }
}

impl fmt::Display for TraceClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for TraceClassKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "M2" => TraceClassKind::M2,
            "M1Lambda" => TraceClassKind::M1Lambda,
            "M1Zero" => TraceClassKind::M1Zero,
            "M1Infinity" => TraceClassKind::M1Infinity,
            "M0" => TraceClassKind::M0,
            _ => return Err(crate::error::Error::Parse(format!("unknown trace class {s:?}"))),
        })
    }
}
