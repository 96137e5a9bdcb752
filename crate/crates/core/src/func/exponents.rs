use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::Rational;
use crate::rational;

/// `(n, α, p, q)` with every derived exponent kept as an exact rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ExponentRepr", into = "ExponentRepr")]
pub struct ExponentTuple {
    pub n: usize,
    pub alpha: Rational,
    pub p: Rational,
    pub q: Rational,
    pub p_prime: Rational,
    pub q_prime: Rational,
    pub beta: Rational,
    /// `s(p) = 1 + q/p'`
    pub s_p: Rational,
    /// `s(q') = 1 + p'/q`, the conjugate index of `s(p)`
    pub s_q_prime: Rational,
    pub gamma: Rational,
}

#[derive(Serialize, Deserialize)]
struct ExponentRepr {
    n: usize,
    #[serde(with = "rational::serde_str")]
    alpha: Rational,
    #[serde(with = "rational::serde_str")]
    p: Rational,
    #[serde(with = "rational::serde_str")]
    q: Rational,
}

impl TryFrom<ExponentRepr> for ExponentTuple {
    type Error = LabError;
    fn try_from(r: ExponentRepr) -> Result<Self> {
        make_exponents(r.n, r.alpha, r.p, r.q)
    }
}

impl From<ExponentTuple> for ExponentRepr {
    fn from(e: ExponentTuple) -> Self {
        ExponentRepr { n: e.n, alpha: e.alpha, p: e.p, q: e.q }
    }
}

pub fn conjugate(p: Rational) -> Rational {
    p / (p - Rational::one())
}

pub fn make_exponents(n: usize, alpha: Rational, p: Rational, q: Rational) -> Result<ExponentTuple> {
    let one = Rational::one();
    if n != 1 && n != 2 {
        return Err(LabError::UnsupportedDimension(n));
    }
    let nr = Rational::from_integer(n as i64);
    if alpha < Rational::zero() || alpha >= nr {
        return Err(LabError::InvalidExponents(format!(
            "alpha = {} must lie in [0, {n})",
            rational::format(&alpha)
        )));
    }
    for (name, v) in [("p", p), ("q", q)] {
        if v <= one {
            return Err(LabError::InvalidExponents(format!(
                "{name} = {} must exceed 1",
                rational::format(&v)
            )));
        }
    }
    let p_prime = conjugate(p);
    let q_prime = conjugate(q);
    let beta = nr * (p.recip() - q.recip());
    let s_p = one + q / p_prime;
    let s_q_prime = one + p_prime / q;
    let gamma = (alpha / nr + q.recip() - p.recip()) / ((one + q.recip() - p.recip()) / nr);
    Ok(ExponentTuple { n, alpha, p, q, p_prime, q_prime, beta, s_p, s_q_prime, gamma })
}

impl ExponentTuple {
    pub fn parse(n: usize, alpha: &str, p: &str, q: &str) -> Result<Self> {
        make_exponents(n, rational::parse(alpha)?, rational::parse(p)?, rational::parse(q)?)
    }

    /// `"n,alpha,p,q"`
    pub fn parse_list(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(LabError::Parse(format!("expected n,alpha,p,q but got {s:?}")));
        }
        let n: usize = parts[0].parse().map_err(|_| LabError::Parse(format!("bad dimension {:?}", parts[0])))?;
        Self::parse(n, parts[1], parts[2], parts[3])
    }

    /// Sobolev pair `(p, q)` with `1/p - 1/q = α/n` for the given `p`.
    pub fn sobolev(n: usize, alpha: Rational, p: Rational) -> Result<Self> {
        let inv_q = p.recip() - alpha / Rational::from_integer(n as i64);
        if inv_q <= Rational::zero() {
            return Err(LabError::InvalidExponents("p must be below n/alpha".into()));
        }
        make_exponents(n, alpha, p, inv_q.recip())
    }

    /// The tuple with roles swapped: `(p, q) -> (q', p')`.
    pub fn dual(&self) -> Result<Self> {
        make_exponents(self.n, self.alpha, self.q_prime, self.p_prime)
    }

    pub fn with_alpha(&self, alpha: Rational) -> Result<Self> {
        make_exponents(self.n, alpha, self.p, self.q)
    }

    pub fn is_sobolev(&self) -> bool {
        self.p.recip() - self.q.recip() == self.alpha / Rational::from_integer(self.n as i64)
    }

    pub fn p_less_than_q(&self) -> bool {
        self.p < self.q
    }

    /// `1/p - 1/q ≤ α/n`
    pub fn below_sobolev(&self) -> bool {
        self.p.recip() - self.q.recip() <= self.alpha / Rational::from_integer(self.n as i64)
    }

    /// Exponent of `|Q|` in the `A^α_{p,q}` functional: `α/n + 1/q − 1/p`.
    pub fn scale_exponent(&self) -> Rational {
        self.alpha / Rational::from_integer(self.n as i64) + self.q.recip() - self.p.recip()
    }

    pub fn alpha_f(&self) -> f64 {
        rational::to_f64(&self.alpha)
    }
    pub fn p_f(&self) -> f64 {
        rational::to_f64(&self.p)
    }
    pub fn q_f(&self) -> f64 {
        rational::to_f64(&self.q)
    }
    pub fn p_prime_f(&self) -> f64 {
        rational::to_f64(&self.p_prime)
    }
    pub fn q_prime_f(&self) -> f64 {
        rational::to_f64(&self.q_prime)
    }
    pub fn beta_f(&self) -> f64 {
        rational::to_f64(&self.beta)
    }
    pub fn gamma_f(&self) -> f64 {
        rational::to_f64(&self.gamma)
    }
    pub fn s_p_f(&self) -> f64 {
        rational::to_f64(&self.s_p)
    }
    pub fn s_q_prime_f(&self) -> f64 {
        rational::to_f64(&self.s_q_prime)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn derived_values() {
        let e = make_exponents(1, r(1, 2), r(2, 1), r(2, 1)).unwrap();
        assert_eq!(e.gamma, r(1, 2));
        assert_eq!(e.beta, r(0, 1));
        assert_eq!(e.p_prime, r(2, 1));

        let e = make_exponents(1, r(1, 2), r(4, 3), r(4, 1)).unwrap();
        assert!(e.is_sobolev());
        assert_eq!(e.s_p, r(2, 1));
        assert_eq!(e.s_p, e.q * (r(1, 1) - e.alpha));
        // s(q') is the conjugate index of s(p)
        assert_eq!(conjugate(e.s_p), e.s_q_prime);
    }

    #[test]
    fn sobolev_consistency_sweep() {
        for n in 1..=2i64 {
            for a in 1..(4 * n) {
                let alpha = r(a, 4);
                for pn in 5..12 {
                    let p = r(pn, 4);
                    if let Ok(e) = ExponentTuple::sobolev(n as usize, alpha, p) {
                        assert!(e.is_sobolev());
                        assert_eq!(e.s_p, e.q * (r(1, 1) - alpha / r(n, 1)));
                        assert!(e.gamma >= r(0, 1) && e.gamma <= e.alpha);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_exponents(1, r(1, 1), r(2, 1), r(2, 1)).is_err());
        assert!(make_exponents(1, r(1, 2), r(1, 1), r(2, 1)).is_err());
        assert!(make_exponents(3, r(1, 2), r(2, 1), r(2, 1)).is_err());
        assert!(ExponentTuple::parse_list("1,1/2,4/3").is_err());
    }

    #[test]
    fn dual_and_serde() {
        let e = ExponentTuple::parse_list("1, 1/4, 8/7, 2").unwrap();
        let d = e.dual().unwrap();
        assert_eq!(d.p, e.q_prime);
        assert_eq!(d.q, e.p_prime);
        assert_eq!(d.scale_exponent(), e.scale_exponent());
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"n":1,"alpha":"1/4","p":"8/7","q":"2"}"#);
        let back: ExponentTuple = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
