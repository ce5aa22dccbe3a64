//! Line-oriented text serialization of spin polynomials.
//!
//! One term per line, `X={0,2} Y={-1} coef=0.25`; interval coefficients
//! are written `coef=[lo,hi]`. An optional `const=<value>` line carries a
//! free energy. Blank lines and lines starting with `#` are ignored.
//! Floats are written in their shortest round-trip form, so writing and
//! reading back is exact.

use std::fmt::Write as _;

use rgstep_core::rg_map::RenormalizedHamiltonian;
use rgstep_core::spin_algebra::{SiteSet, SpinPolynomial};
use rgstep_core::{Interval, Scalar};

#[derive(Debug, thiserror::Error)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Core {
        line: usize,
        source: rgstep_core::Error,
    },
}

fn syntax(line: usize, message: impl Into<String>) -> TextError {
    TextError::Syntax {
        line,
        message: message.into(),
    }
}

/// Scalars with a text form.
pub trait TextScalar: Scalar {
    fn write_text(self, out: &mut String);
    fn parse_text(s: &str) -> Option<Self>;
}

fn parse_f64(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

impl TextScalar for f64 {
    fn write_text(self, out: &mut String) {
        let _ = write!(out, "{self:?}");
    }

    fn parse_text(s: &str) -> Option<Self> {
        parse_f64(s)
    }
}

impl TextScalar for Interval {
    fn write_text(self, out: &mut String) {
        let _ = write!(out, "[{:?},{:?}]", self.lo(), self.hi());
    }

    fn parse_text(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            Some(inner) => {
                let (lo, hi) = inner.split_once(',')?;
                let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
                (lo <= hi).then(|| Interval::new(lo, hi))
            }
            None => parse_f64(s).map(Interval::point),
        }
    }
}

fn write_set(out: &mut String, name: &str, set: &SiteSet) {
    out.push_str(name);
    out.push_str("={");
    for (i, s) in set.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{s}");
    }
    out.push('}');
}

/// Serializes `p`, preceded by a `const=` line when `constant` is given.
pub fn write_polynomial<S: TextScalar>(p: &SpinPolynomial<S>, constant: Option<S>) -> String {
    let mut out = String::new();
    if let Some(c) = constant {
        out.push_str("const=");
        c.write_text(&mut out);
        out.push('\n');
    }
    for (k, &v) in p.terms() {
        write_set(&mut out, "X", &k.x);
        out.push(' ');
        write_set(&mut out, "Y", &k.y);
        out.push_str(" coef=");
        v.write_text(&mut out);
        out.push('\n');
    }
    out
}

/// Renormalized couplings as block-spin terms plus the free energy.
pub fn write_renormalized<S: TextScalar>(h: &RenormalizedHamiltonian<S>) -> String {
    write_polynomial(&h.to_polynomial(), Some(h.free_energy))
}

fn parse_set(field: &str, name: &str, line: usize) -> Result<SiteSet, TextError> {
    let body = field
        .strip_prefix(name)
        .and_then(|r| r.strip_prefix("={"))
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| syntax(line, format!("expected {name}={{...}}, found `{field}`")))?;
    let mut sites = Vec::new();
    for s in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        sites.push(
            s.parse::<i32>()
                .map_err(|_| syntax(line, format!("bad site `{s}`")))?,
        );
    }
    SiteSet::new(sites).map_err(|source| TextError::Core { line, source })
}

/// Parses the output of [`write_polynomial`].
pub fn parse_polynomial<S: TextScalar>(
    text: &str,
) -> Result<(SpinPolynomial<S>, Option<S>), TextError> {
    let mut terms = Vec::new();
    let mut constant = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if let Some(v) = l.strip_prefix("const=") {
            if constant.is_some() {
                return Err(syntax(line, "repeated const= line"));
            }
            constant =
                Some(S::parse_text(v).ok_or_else(|| syntax(line, format!("bad value `{v}`")))?);
            continue;
        }
        let mut fields = l.split_whitespace();
        let (Some(x), Some(y), Some(c), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(syntax(line, "expected `X={..} Y={..} coef=..`"));
        };
        let x = parse_set(x, "X", line)?;
        let y = parse_set(y, "Y", line)?;
        let v = c
            .strip_prefix("coef=")
            .and_then(S::parse_text)
            .ok_or_else(|| syntax(line, format!("bad coefficient `{c}`")))?;
        terms.push((x, y, v));
    }
    let p = SpinPolynomial::from_terms_with_cap(terms, usize::MAX)
        .map_err(|source| TextError::Core { line: 0, source })?;
    Ok((p, constant))
}
