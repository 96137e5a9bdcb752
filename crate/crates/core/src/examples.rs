//! Weight pairs for the counterexample, factored weights and classical pairs.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::constants::WeightPair;
use crate::error::{LabError, Result};
use crate::func::{ExponentTuple, Mesh, SampledFunction};
use crate::grid::{GridFamily, Rational, RationalBox};
use crate::operators::frac_maximal;
use crate::rational;

fn interval(lo: Rational, hi: Rational) -> Result<RationalBox> {
    RationalBox::new(vec![lo], vec![hi])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Case1 {
    pub pair: WeightPair,
    pub f: SampledFunction,
    /// `t = q(1−α) − 1`
    #[serde(with = "rational::serde_str")]
    pub t: Rational,
    /// `q(α−1) + t`, exactly `−1`
    #[serde(with = "rational::serde_str")]
    pub minorant_exponent: Rational,
    /// `(X, ∫_1^X x^{q(α−1)} x^t dx, ∫_1^X M_α(fσ)^q u dx)`
    pub growth: Vec<(f64, f64, f64)>,
}

/// `∫_1^X x^e dx` from the antiderivative.
pub fn power_integral(e: Rational, x: f64) -> f64 {
    if e == -Rational::one() {
        x.ln()
    } else {
        let s = rational::to_f64(&(e + Rational::one()));
        (x.powf(s) - 1.0) / s
    }
}

/// `f = σ = χ_{[−2,−1]}`, `u = x^t χ_{[0,∞)}` on the window `[−2, X)`.
pub fn case1_pair(e: &ExponentTuple, x_max: i64, refinement: u32, grids_min_level: i32) -> Result<Case1> {
    if e.n != 1 {
        return Err(LabError::UnsupportedDimension(e.n));
    }
    if !(e.p.recip() - e.q.recip() > e.alpha) {
        return Err(LabError::InvalidExponents("case 1 needs 1/p − 1/q > α".into()));
    }
    if x_max < 2 {
        return Err(LabError::Precondition("case 1 window needs X >= 2".into()));
    }
    let t = e.q * (Rational::one() - e.alpha) - Rational::one();
    let minorant_exponent = e.q * (e.alpha - Rational::one()) + t;
    let window = interval(Rational::from_integer(-2), Rational::from_integer(x_max))?;
    let mesh = Mesh::new(&window, refinement)?;
    let f = SampledFunction::indicator(mesh, &interval(Rational::from_integer(-2), Rational::from_integer(-1))?)?;
    let tf = rational::to_f64(&t);
    let u = SampledFunction::from_fn(mesh, |x| if x[0] > 0.0 { x[0].powf(tf) } else { 0.0 })?;
    let pair = WeightPair::new(u, f.clone())?.with_provenance("case1");
    let grids = crate::grid::shifted_grids(1, &window, grids_min_level, refinement as i32)?;
    let fs = f.mul(&pair.sigma)?;
    let m = frac_maximal(&fs, e.alpha_f(), &grids)?.values;
    let q = e.q_f();
    let mut growth = Vec::new();
    let mut xk = 2i64;
    while xk <= x_max {
        let dv = mesh.cell_volume();
        let integral: f64 = (0..mesh.n_cells())
            .filter(|&i| {
                let lo = mesh.cell_lower(0, i);
                lo >= 1.0 && lo + mesh.h_f64() <= xk as f64
            })
            .map(|i| m.values()[i].powf(q) * pair.u.values()[i] * dv)
            .sum();
        growth.push((xk as f64, power_integral(minorant_exponent, xk as f64), integral));
        xk *= 2;
    }
    Ok(Case1 { pair, f, t, minorant_exponent, growth })
}

/// Intervals `[j, j + (j+1)^{−γ})` meeting `[0, X)`.
pub fn e_intervals(gamma: f64, x_max: f64) -> Vec<(f64, f64)> {
    (0..x_max.ceil() as i64)
        .map(|j| {
            let j = j as f64;
            (j, (j + (j + 1.0).powf(-gamma)).min(x_max))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetE {
    pub indicator: SampledFunction,
    /// cells per interval after rounding down, smallest over the window
    pub min_cells: usize,
    /// `|E ∩ window|` before and after rounding
    pub exact_measure: f64,
    pub rounded_measure: f64,
}

pub const MIN_CELLS_PER_INTERVAL: usize = 8;

/// `χ_E` on `[0, X)`, interval ends rounded down to cell boundaries.
pub fn build_e(gamma: f64, x_max: i64, refinement: u32) -> Result<SetE> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(LabError::Precondition(format!("gamma = {gamma} must lie in (0, 1)")));
    }
    let window = interval(Rational::zero(), Rational::from_integer(x_max))?;
    let mesh = Mesh::new(&window, refinement)?;
    let per_unit = mesh.cells_per_axis() / x_max as usize;
    let mut vals = vec![0.0; mesh.n_cells()];
    let mut min_cells = usize::MAX;
    let mut exact = 0.0;
    for j in 0..x_max as usize {
        let len = ((j + 1) as f64).powf(-gamma);
        exact += len;
        // floor(len / h) with h = 1/per_unit
        let cells = ((len * per_unit as f64) + 1e-9).floor() as usize;
        let cells = cells.min(per_unit);
        min_cells = min_cells.min(cells);
        for v in &mut vals[j * per_unit..j * per_unit + cells] {
            *v = 1.0;
        }
    }
    if min_cells < MIN_CELLS_PER_INTERVAL {
        return Err(LabError::InvalidMesh(format!(
            "E intervals need at least {MIN_CELLS_PER_INTERVAL} cells each; refinement {refinement} gives {min_cells} on [0, {x_max})"
        )));
    }
    let indicator = SampledFunction::new(mesh, vals)?;
    let rounded = indicator.total();
    Ok(SetE { indicator, min_cells, exact_measure: exact, rounded_measure: rounded })
}

/// Smallest refinement meeting the cells-per-interval requirement.
pub fn e_refinement(gamma: f64, x_max: i64) -> u32 {
    let shortest = (x_max as f64).powf(-gamma);
    (0..=crate::func::MAX_REFINEMENT)
        .find(|&l| (shortest * 3.0 * (1u64 << l) as f64 + 1e-9).floor() as usize >= MIN_CELLS_PER_INTERVAL)
        .unwrap_or(crate::func::MAX_REFINEMENT)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EMaximalReport {
    pub gamma: f64,
    pub x_max: i64,
    pub refinement: u32,
    /// `3·2^{γ−2}`
    pub floor: f64,
    pub min_on_unit: f64,
    pub min: f64,
    pub max: f64,
    /// `(k, min over [k, k+1))`
    pub unit_minima: Vec<(i64, f64)>,
}

/// `M_γ(χ_E)` over the window `[0, X)`.
pub fn verify_e_maximal(gamma: f64, x_max: i64, refinement: u32, grids: &[GridFamily]) -> Result<EMaximalReport> {
    let e = build_e(gamma, x_max, refinement)?;
    let m = frac_maximal(&e.indicator, gamma, grids)?.values;
    let per_unit = m.mesh().cells_per_axis() / x_max as usize;
    let vals = m.values();
    let unit_minima: Vec<(i64, f64)> = (0..x_max as usize)
        .map(|k| (k as i64, vals[k * per_unit..(k + 1) * per_unit].iter().copied().fold(f64::INFINITY, f64::min)))
        .collect();
    Ok(EMaximalReport {
        gamma,
        x_max,
        refinement,
        floor: 3.0 * 2f64.powf(gamma - 2.0),
        min_on_unit: unit_minima[0].1,
        min: vals.iter().copied().fold(f64::INFINITY, f64::min),
        max: vals.iter().copied().fold(0.0, f64::max),
        unit_minima,
    })
}

/// `u = w1 (M_γ w2)^{−q/p′}`, `σ = w2 (M_γ w1)^{−p′/q}`; cells where `M_γ w = 0` get 0.
pub fn factored_pair(w1: &SampledFunction, w2: &SampledFunction, e: &ExponentTuple, grids: &[GridFamily]) -> Result<WeightPair> {
    w1.mesh().ensure_same(w2.mesh())?;
    if !e.below_sobolev() {
        return Err(LabError::InvalidExponents("factored weights need 1/p − 1/q ≤ α/n".into()));
    }
    let gamma = e.gamma_f();
    let m1 = frac_maximal(w1, gamma, grids)?.values;
    let m2 = frac_maximal(w2, gamma, grids)?.values;
    let (q, pp) = (e.q_f(), e.p_prime_f());
    let part = |w: &SampledFunction, m: &SampledFunction, s: f64| {
        w.zip_with(m, |a, b| if b > 0.0 && a > 0.0 { a * b.powf(-s) } else { 0.0 })
    };
    Ok(WeightPair::new(part(w1, &m2, q / pp)?, part(w2, &m1, pp / q)?)?.with_provenance("factored"))
}

/// Factored pair from `w1 = χ_E`, `w2 = χ_{[0,1]}` on `[0, X)`, `E` built for `γ` of `e`.
pub fn case2_pair(e: &ExponentTuple, x_max: i64, refinement: u32, grids_min_level: i32) -> Result<(WeightPair, Vec<GridFamily>)> {
    if e.n != 1 {
        return Err(LabError::UnsupportedDimension(e.n));
    }
    let set = build_e(e.gamma_f(), x_max, refinement)?;
    let mesh = *set.indicator.mesh();
    let grids = crate::grid::shifted_grids(1, &mesh.window(), grids_min_level, refinement as i32)?;
    let w2 = SampledFunction::indicator(mesh, &interval(Rational::zero(), Rational::one())?)?;
    let pair = factored_pair(&set.indicator, &w2, e, &grids)?.with_provenance("case2");
    Ok((pair, grids))
}

/// `u = w^q`, `σ = w^{−p′}` for Sobolev exponents.
pub fn classical_pair(w: &SampledFunction, e: &ExponentTuple) -> Result<WeightPair> {
    if !e.is_sobolev() {
        return Err(LabError::InvalidExponents("classical pairs need Sobolev exponents".into()));
    }
    WeightPair::classical(w, e)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case2Report {
    #[serde(with = "rational::serde_str")]
    pub gamma: Rational,
    /// `(α−1)q + (1−γ)q/p′`
    #[serde(with = "rational::serde_str")]
    pub identity_lhs: Rational,
    pub identity_holds: bool,
    /// `(X, S(X), H(X))`
    pub points: Vec<(f64, f64, f64)>,
    /// `S(2X) − S(X)` per doubling
    pub doubling_increments: Vec<f64>,
    /// `min S(X)/H(X)`
    pub ratio_floor: f64,
    /// largest `j` checked for `(j+(j+1)^{−γ})^{γ−1}(j+1)^{−γ} ≥ (j+1)^{−1}`
    pub minorant_checked_to: u64,
    pub minorant_violations: u64,
}

/// `S(X) = ∫_2^X x^{γ−1} χ_E dx` from the exact intervals.
pub fn s_integral(gamma: f64, x: f64) -> f64 {
    let mut s = 0.0;
    for (a, b) in e_intervals(gamma, x) {
        let (a, b) = (a.max(2.0), b);
        if b > a {
            s += (b.powf(gamma) - a.powf(gamma)) / gamma;
        }
    }
    s
}

/// `H(X) = Σ_{2≤j<X} (j+1)^{−1}`
pub fn h_sum(x: f64) -> f64 {
    (2..x.ceil() as i64).map(|j| 1.0 / (j + 1) as f64).sum()
}

pub fn case2_divergence(e: &ExponentTuple, doublings: u32, minorant_to: u64) -> Result<Case2Report> {
    if e.n != 1 {
        return Err(LabError::UnsupportedDimension(e.n));
    }
    if !e.below_sobolev() {
        return Err(LabError::InvalidExponents("case 2 needs 1/p − 1/q ≤ α".into()));
    }
    let g = e.gamma;
    let one = Rational::one();
    let lhs = (e.alpha - one) * e.q + (one - g) * e.q / e.p_prime;
    let gf = rational::to_f64(&g);
    if !(gf > 0.0 && gf < 1.0) {
        return Err(LabError::InvalidExponents(format!("case 2 needs 0 < γ < 1, got {}", rational::format(&g))));
    }
    let points: Vec<(f64, f64, f64)> = (2..=doublings)
        .map(|k| {
            let x = 2f64.powi(k as i32);
            (x, s_integral(gf, x), h_sum(x))
        })
        .collect();
    let doubling_increments = points.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let ratio_floor = points.iter().filter(|p| p.2 > 0.0).map(|p| p.1 / p.2).fold(f64::INFINITY, f64::min);
    let violations = (0..=minorant_to)
        .filter(|&j| {
            let j1 = (j + 1) as f64;
            let lhs = (j as f64 + j1.powf(-gf)).powf(gf - 1.0) * j1.powf(-gf);
            lhs < 1.0 / j1 * (1.0 - 1e-14)
        })
        .count() as u64;
    Ok(Case2Report {
        gamma: g,
        identity_lhs: lhs,
        identity_holds: lhs == g - one,
        points,
        doubling_increments,
        ratio_floor,
        minorant_checked_to: minorant_to,
        minorant_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::apq_alpha_constant;
    use crate::grid::shifted_grids;

    #[test]
    fn case1_exponents() {
        let e = ExponentTuple::parse(1, "1/4", "8/7", "2").unwrap();
        let c = case1_pair(&e, 16, 1, -6).unwrap();
        assert_eq!(c.t, Rational::new(1, 2));
        assert_eq!(c.minorant_exponent, Rational::from_integer(-1));
        for (x, minorant, _) in &c.growth {
            assert!((minorant - x.ln()).abs() < 1e-12);
        }
        assert!(case1_pair(&ExponentTuple::parse(1, "1/2", "2", "2").unwrap(), 16, 1, -6).is_err());
    }

    #[test]
    fn set_e_basics() {
        let e = build_e(0.5, 4, 4).unwrap();
        let m = e.indicator.mesh();
        let at = |x: f64| e.indicator.values()[(x / m.h_f64()) as usize];
        assert_eq!(at(1.5), 1.0);
        assert_eq!(at(1.75), 0.0);
        assert!((0..m.cells_per_axis() / 4).all(|i| e.indicator.values()[i] == 1.0));
        assert!(e.rounded_measure <= e.exact_measure);
        assert!(e.exact_measure - e.rounded_measure <= 4.0 * m.h_f64());
        assert!(build_e(0.5, 64, 1).is_err());
    }

    #[test]
    fn factored_constant_at_most_one() {
        let mesh = Mesh::unit(1, 4).unwrap();
        let grids = shifted_grids(1, &mesh.window(), -2, 4).unwrap();
        let w1 = SampledFunction::from_fn(mesh, |x| 1.0 + (9.0 * x[0]).sin().abs()).unwrap();
        let w2 = SampledFunction::from_fn(mesh, |x| if x[0] < 0.3 { 2.0 } else { 0.1 }).unwrap();
        for t in ["1,1/2,2,2", "1,1/4,3/2,2", "1,3/4,2,3"] {
            let e = ExponentTuple::parse_list(t).unwrap();
            let pair = factored_pair(&w1, &w2, &e, &grids).unwrap();
            let c = apq_alpha_constant(&pair, &e, &grids).unwrap();
            assert!(c.value <= 1.0 + 1e-12, "{t}: {}", c.value);
        }
    }

    #[test]
    fn case2_identity_and_minorant() {
        let e = ExponentTuple::parse(1, "1/2", "2", "2").unwrap();
        let r = case2_divergence(&e, 10, 10_000).unwrap();
        assert_eq!(r.gamma, Rational::new(1, 2));
        assert!(r.identity_holds);
        assert_eq!(r.minorant_violations, 0);
        let (pair, grids) = case2_pair(&e, 16, 5, -5).unwrap();
        assert!(apq_alpha_constant(&pair, &e, &grids).unwrap().value <= 1.0 + 1e-12);
        assert!(r.ratio_floor >= 1.0);
        let last = r.doubling_increments.last().unwrap();
        assert!((last - 2f64.ln()).abs() < 0.05);
    }

    #[test]
    fn classical_needs_sobolev() {
        let mesh = Mesh::unit(1, 1).unwrap();
        let w = SampledFunction::constant(mesh, 1.0).unwrap();
        let p = classical_pair(&w, &ExponentTuple::parse(1, "1/2", "3/2", "6").unwrap()).unwrap();
        assert!(p.u.values().iter().chain(p.sigma.values()).all(|v| *v == 1.0));
        assert!(classical_pair(&w, &ExponentTuple::parse(1, "1/2", "2", "2").unwrap()).is_err());
    }
}
