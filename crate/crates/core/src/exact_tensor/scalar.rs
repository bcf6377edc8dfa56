use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar. `BigRational` keeps numerator and denominator reduced with a
/// positive denominator after every operation.
pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed rational literal {0:?}")]
pub struct ParseQError(pub String);

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`; rejects zero denominators and anything float-like.
pub fn parse_q(s: &str) -> Result<Q, ParseQError> {
    let err = || ParseQError(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Q::new(n, d))
}

/// Canonical `"p/q"` encoding used by every file format.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Compact human form: `p` for integers, `p/q` otherwise.
pub fn show_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        fmt_q(x)
    }
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-6/8", "5", "0/7"] {
            let x = parse_q(s).unwrap();
            assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
        }
        assert_eq!(fmt_q(&parse_q("-6/8").unwrap()), "-3/4");
        assert_eq!(fmt_q(&q(0)), "0/1");
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("0.5").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn denominators_stay_positive_and_reduced() {
        let x = qf(4, -6);
        assert_eq!(x.numer(), &BigInt::from(-2));
        assert_eq!(x.denom(), &BigInt::from(3));
    }
}
