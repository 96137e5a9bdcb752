//! Text form of exact rationals: `"3/4"`, `"-2"`, or a terminating decimal `"0.25"`.

use num_traits::{ToPrimitive, Zero};

use crate::error::{LabError, Result};
use crate::grid::Rational;

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || LabError::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: i64 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().map_err(|_| bad())?,
        };
        let den = 10i64.pow(frac.len() as u32);
        let num: i64 = frac.parse().map_err(|_| bad())?;
        let mag = Rational::from_integer(int_part) + Rational::new(num, den);
        return Ok(if negative { -mag } else { mag });
    }
    s.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

pub fn format(r: &Rational) -> String {
    if r.denom() == &1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Best rational with denominator at most `max_den` (continued fractions).
pub fn approximate(x: f64, max_den: i64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(LabError::Parse(format!("cannot approximate {x} by a rational")));
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > i64::MAX as f64 / 4.0 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a.saturating_mul(h1).saturating_add(h0), a.saturating_mul(k1).saturating_add(k0));
        if k2 > max_den || k2 <= 0 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let rem = y - a as f64;
        if rem.abs() < 1e-15 {
            break;
        }
        y = 1.0 / rem;
    }
    if k1.is_zero() {
        return Err(LabError::Parse(format!("cannot approximate {x} by a rational")));
    }
    Ok(Rational::new(h1, k1))
}

pub mod serde_str {
    //! `#[serde(with)]` adapter storing a rational as its text form.
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::grid::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_str_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::grid::Rational;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(super::format).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| super::parse(s).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/4").unwrap(), Rational::new(3, 4));
        assert_eq!(parse("-2").unwrap(), Rational::from_integer(-2));
        assert_eq!(parse("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse("-1.5").unwrap(), Rational::new(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert_eq!(format(&Rational::new(6, 8)), "3/4");
        assert_eq!(format(&Rational::from_integer(5)), "5");
    }

    #[test]
    fn approximation() {
        assert_eq!(approximate(0.75, 100).unwrap(), Rational::new(3, 4));
        assert_eq!(approximate(1.0 / 3.0, 1000).unwrap(), Rational::new(1, 3));
    }
}
