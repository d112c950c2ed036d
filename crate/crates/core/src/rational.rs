//! Exact rationals as they appear on the command line and in config files.

use num_rational::Rational64;

use crate::error::{Error, Result};

/// Parses `p/q` or a bare integer `p` into a reduced rational.
///
/// Whitespace around the tokens is allowed; the denominator must be a
/// positive integer.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let p: i64 = num
        .parse()
        .map_err(|e| Error::Parse(format!("bad numerator {num:?} in {s:?}: {e}")))?;
    let q: i64 = den
        .parse()
        .map_err(|e| Error::Parse(format!("bad denominator {den:?} in {s:?}: {e}")))?;
    if q <= 0 {
        return Err(Error::Parse(format!("denominator must be positive in {s:?}")));
    }
    if p == i64::MIN {
        return Err(Error::Parse(format!("numerator out of range in {s:?}")));
    }
    Ok(Rational64::new(p, q))
}

pub fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepted_forms() {
        assert_eq!(parse_rational("2").unwrap(), Rational64::from_integer(2));
        assert_eq!(parse_rational(" 1/2 ").unwrap(), Rational64::new(1, 2));
        assert_eq!(parse_rational("6/4").unwrap(), Rational64::new(3, 2));
        assert_eq!(parse_rational("-3 / 9").unwrap(), Rational64::new(-1, 3));
    }

    #[test]
    fn rejected_forms() {
        for bad in ["", "/", "1/", "/2", "1/0", "1/-2", "a/b", "0.5", "1/2/3", "99999999999999999999"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }
}
