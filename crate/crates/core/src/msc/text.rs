//! Plain-text MSC files: one line per row, `n²` whitespace-separated scalars
//! per line. Blank lines and lines starting with `#` are ignored.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldValue};

use super::{Matrix, StructureMatrix};

pub fn parse_msc(text: &str, spec: FieldSpec) -> Result<StructureMatrix> {
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|tok| FieldValue::parse(tok, spec)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("empty structure matrix".into()));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n * n) {
        return Err(Error::Parse(format!("row {} has {} entries, expected {}", i + 1, r.len(), n * n)));
    }
    StructureMatrix::new(Matrix::from_rows(spec, rows)?)
}

pub fn render_msc(a: &StructureMatrix) -> String {
    let m = a.matrix();
    let mut out = String::new();
    for r in 0..m.rows() {
        let line: Vec<String> = m.row(r).iter().map(ToString::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let q = FieldSpec::RATIONALS;
        let text = "# U_1\n1 0 0 0 0 0 0 0 1\n0 1 0 1 0 1 0 -1 0\n\n0 0 1 0 0 0 1 0 1/2\n";
        let a = parse_msc(text, q).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(parse_msc(&render_msc(&a), q).unwrap(), a);
        assert!(render_msc(&a).ends_with("1/2\n"));
    }

    #[test]
    fn rejects_bad_shapes() {
        let q = FieldSpec::RATIONALS;
        assert!(matches!(parse_msc("", q), Err(Error::Parse(_))));
        assert!(matches!(parse_msc("1 0 0\n0 0 0 0", q), Err(Error::Parse(_))));
        assert!(matches!(parse_msc("1 0 x 0\n0 0 0 0", q), Err(Error::Parse(_))));
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(parse_msc("1/5 0 0 0\n0 0 0 0", f5), Err(Error::DivisionByZero));
    }
}
