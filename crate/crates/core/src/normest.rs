//! Operator norm lower bounds from test-function families, and the two-sided
//! checks built on them.
//!
//! Every estimate is `max_f ‖T f‖_target / ‖f‖_source` over a finite family,
//! hence a lower bound for the true norm.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{
    ap_ainfm_one_sup, ap_constant, apq_bump, md_sp_testing, outer_testing_constant, sawyer_maximal_testing, BumpSide,
    ConstantReport, TestingSide, WeightPair,
};
use crate::error::{LabError, Result};
use crate::func::{ExponentTuple, SampledFunction};
use crate::grid::{DyadicCube, GridFamily};
use crate::operators::{
    dyadic_frac_maximal, dyadic_riesz, dyadic_riesz_max, frac_maximal, geometric_maximal, orlicz_maximal, outer_riesz,
    riesz_potential_1d, weighted_dyadic_maximal,
};
use crate::orlicz::{bp_classify, BpMode, BpReport, YoungFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum NormOperator {
    /// `f ↦ f`, source `L^p(σ)`, target `L^q(u)`
    Identity,
    FracMaximal { alpha: f64 },
    DyadicFracMaximal { alpha: f64, grid: usize },
    /// `I_α` by kernel quadrature for `n = 1`, the shifted dyadic maximum otherwise
    Riesz { alpha: f64 },
    DyadicRiesz { alpha: f64, grid: usize },
    /// `M^D_{β,σ} f`, source `L^p(σ)`, target `L^q(σ)`
    WeightedDyadicMaximal { beta: f64, grid: usize },
    GeometricMaximal { grid: usize },
    OrliczMaximal { alpha: f64, phi: YoungFunction },
}

impl NormOperator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::FracMaximal { .. } => "frac-maximal",
            Self::DyadicFracMaximal { .. } => "dyadic-frac-maximal",
            Self::Riesz { .. } => "riesz",
            Self::DyadicRiesz { .. } => "dyadic-riesz",
            Self::WeightedDyadicMaximal { .. } => "weighted-dyadic-maximal",
            Self::GeometricMaximal { .. } => "geometric-maximal",
            Self::OrliczMaximal { .. } => "orlicz-maximal",
        }
    }

    /// Whether the operator acts on `f` with `σ` as its own measure.
    fn self_weighted(&self) -> bool {
        matches!(self, Self::WeightedDyadicMaximal { .. })
    }

    fn apply(&self, g: &SampledFunction, pair: &WeightPair, grids: &[GridFamily]) -> Result<SampledFunction> {
        let pick = |i: usize| grids.get(i).ok_or(LabError::EmptyGrid);
        Ok(match self {
            Self::Identity => g.clone(),
            Self::FracMaximal { alpha } => frac_maximal(g, *alpha, grids)?.values,
            Self::DyadicFracMaximal { alpha, grid } => dyadic_frac_maximal(g, *alpha, pick(*grid)?)?.values,
            Self::Riesz { alpha } => {
                if g.dim() == 1 {
                    riesz_potential_1d(g, *alpha)?.values
                } else {
                    dyadic_riesz_max(g, *alpha, grids)?.values
                }
            }
            Self::DyadicRiesz { alpha, grid } => dyadic_riesz(g, *alpha, pick(*grid)?)?.values,
            Self::WeightedDyadicMaximal { beta, grid } => weighted_dyadic_maximal(g, *beta, &pair.sigma, pick(*grid)?)?.values,
            Self::GeometricMaximal { grid } => geometric_maximal(g, pick(*grid)?)?.values,
            Self::OrliczMaximal { alpha, phi } => orlicz_maximal(g, *alpha, phi, grids)?.values,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Strong,
    Weak,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestFamily {
    /// `χ_Q` over the grid cubes with positive source measure
    pub indicators: bool,
    /// evenly strided subsample when more cubes are available
    pub max_indicators: usize,
    /// random nonnegative step functions on the unshifted grid
    pub random: usize,
    pub seed: u64,
    /// level of the random steps, clamped to the mesh refinement
    pub random_level: i32,
    /// duality functions `I_α(uχ_Q)^{p′−1}χ_Q` for the first cubes
    pub duality: usize,
}

impl Default for TestFamily {
    fn default() -> Self {
        Self { indicators: true, max_indicators: 256, random: 16, seed: 7, random_level: 3, duality: 8 }
    }
}

impl TestFamily {
    pub fn small() -> Self {
        Self { max_indicators: 32, random: 4, duality: 0, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    Indicator { cube: DyadicCube },
    Random { seed: u64, index: usize, level: i32 },
    Duality { cube: DyadicCube },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub exponent: f64,
    /// `"sigma"`, `"u"` or `"lebesgue"`
    pub weight: String,
    pub kind: NormKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub operator: NormOperator,
    pub source: Space,
    pub target: Space,
    pub value: f64,
    pub argmax: Option<TestFunction>,
    pub family_size: usize,
    /// test functions with zero source norm
    pub skipped: usize,
}

fn candidate_cubes(grids: &[GridFamily], sigma: &SampledFunction, max: usize) -> Result<Vec<DyadicCube>> {
    let mut cubes: Vec<DyadicCube> = grids.iter().flat_map(|g| g.cubes()).collect();
    cubes.sort();
    cubes.dedup();
    let mut keep = Vec::new();
    for q in cubes {
        if sigma.mesh().cube_cells(&q)?.is_some() && sigma.cube_integral(&q)? > 0.0 {
            keep.push(q);
        }
    }
    if keep.len() > max && max > 0 {
        let stride = keep.len() as f64 / max as f64;
        keep = (0..max).map(|i| keep[(i as f64 * stride) as usize]).collect();
    } else if max == 0 {
        keep.clear();
    }
    Ok(keep)
}

fn random_step(sigma: &SampledFunction, seed: u64, index: usize, level: i32) -> Result<SampledFunction> {
    let mesh = *sigma.mesh();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64));
    let g = GridFamily::new(&vec![false; mesh.dim()], level, level, mesh.window())?;
    let mut v = vec![0.0; mesh.n_cells()];
    for q in g.cubes() {
        let c = if rng.gen_bool(0.3) { 0.0 } else { (4.0 * rng.gen::<f64>() - 2.0).exp() };
        if let Some(r) = mesh.cube_cells(&q)? {
            for i in r.flat_indices(&mesh) {
                v[i] = c;
            }
        }
    }
    SampledFunction::new(mesh, v)
}

fn duality_function(q: &DyadicCube, pair: &WeightPair, alpha: f64, p_prime: f64, grids: &[GridFamily]) -> Result<SampledFunction> {
    let uq = pair.u.restrict(q)?;
    let i = if uq.dim() == 1 { riesz_potential_1d(&uq, alpha)? } else { dyadic_riesz_max(&uq, alpha, grids)? };
    let chi = SampledFunction::indicator_cube(*pair.mesh(), q)?;
    i.values.map(|v| v.powf(p_prime - 1.0))?.mul(&chi)
}

fn build_family(
    op: &NormOperator,
    pair: &WeightPair,
    e: &ExponentTuple,
    grids: &[GridFamily],
    family: &TestFamily,
) -> Result<Vec<(TestFunction, SampledFunction)>> {
    let mesh = *pair.mesh();
    let mut out = Vec::new();
    let cubes = candidate_cubes(grids, &pair.sigma, family.max_indicators.max(family.duality))?;
    if family.indicators {
        for q in cubes.iter().take(family.max_indicators) {
            out.push((TestFunction::Indicator { cube: *q }, SampledFunction::indicator_cube(mesh, q)?));
        }
    }
    let level = family.random_level.min(mesh.refinement() as i32);
    for i in 0..family.random {
        out.push((TestFunction::Random { seed: family.seed, index: i, level }, random_step(&pair.sigma, family.seed, i, level)?));
    }
    let alpha = match op {
        NormOperator::FracMaximal { alpha }
        | NormOperator::DyadicFracMaximal { alpha, .. }
        | NormOperator::Riesz { alpha }
        | NormOperator::DyadicRiesz { alpha, .. } => *alpha,
        _ => e.alpha_f(),
    };
    if alpha > 0.0 {
        let mut added = 0;
        for q in &cubes {
            if added == family.duality {
                break;
            }
            if pair.u.cube_integral(q)? > 0.0 {
                out.push((TestFunction::Duality { cube: *q }, duality_function(q, pair, alpha, e.p_prime_f(), grids)?));
                added += 1;
            }
        }
    }
    Ok(out)
}

/// `max_f ‖T(fσ)‖_{L^q(u)} / ‖f‖_{L^p(σ)}` over `family` (weak target when `kind` is weak).
pub fn estimate_norm(
    op: &NormOperator,
    kind: NormKind,
    pair: &WeightPair,
    e: &ExponentTuple,
    grids: &[GridFamily],
    family: &TestFamily,
) -> Result<NormEstimate> {
    if let NormOperator::OrliczMaximal { phi, .. } = op {
        phi.validate()?;
    }
    let tests = build_family(op, pair, e, grids, family)?;
    if tests.is_empty() {
        return Err(LabError::Precondition("empty test family".into()));
    }
    let (p, q) = (e.p_f(), e.q_f());
    let self_weighted = op.self_weighted();
    let target_w = if self_weighted { &pair.sigma } else { &pair.u };
    let ratios: Vec<Option<f64>> = tests
        .par_iter()
        .map(|(_, f)| -> Result<Option<f64>> {
            let src = f.lp_norm(p, &pair.sigma)?;
            if !(src > 0.0) {
                return Ok(None);
            }
            let input = if self_weighted { f.clone() } else { f.mul(&pair.sigma)? };
            let tf = op.apply(&input, pair, grids)?;
            let tgt = match kind {
                NormKind::Strong => tf.lp_norm(q, target_w)?,
                NormKind::Weak => tf.weak_lq_norm(q, target_w)?,
            };
            Ok(Some(tgt / src))
        })
        .collect::<Result<_>>()?;
    let skipped = ratios.iter().filter(|r| r.is_none()).count();
    if skipped == ratios.len() {
        return Err(LabError::Precondition("every test function has zero source norm".into()));
    }
    let mut best: Option<(f64, usize)> = None;
    for (i, r) in ratios.iter().enumerate() {
        if let Some(v) = r {
            if best.is_none_or(|(b, _)| *v > b) {
                best = Some((*v, i));
            }
        }
    }
    let (value, at) = best.expect("some ratio present");
    let sigma_name = if pair.sigma.values().iter().all(|&v| v == 1.0) { "lebesgue" } else { "sigma" };
    Ok(NormEstimate {
        operator: op.clone(),
        source: Space { exponent: p, weight: sigma_name.into(), kind: NormKind::Strong },
        target: Space { exponent: q, weight: if self_weighted { sigma_name.into() } else { "u".into() }, kind },
        value,
        argmax: Some(tests[at].0.clone()),
        family_size: tests.len(),
        skipped,
    })
}

/// `I_α` with the continuous kernel in one dimension, else the shifted dyadic maximum.
fn riesz_op(alpha: f64) -> NormOperator {
    NormOperator::Riesz { alpha }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainCube {
    pub cube: DyadicCube,
    pub testing: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainCheck {
    /// `(1−2^{α−n})^{−1}`
    pub constant: f64,
    pub cubes: Vec<ChainCube>,
    /// cubes where the testing quotient exceeds the bound beyond `1e−9` relative
    pub violations: usize,
    pub max_ratio: f64,
}

/// For each `Q_0`, `(∫ I_α^{Q_0}(σχ_{Q_0})^q u)^{1/q} σ(Q_0)^{−1/p}` against
/// `(1−2^{α−n})^{−1}(∫ M_α(σχ_{Q_0})^q u)^{1/q} σ(Q_0)^{−1/p}`, `M_α` in `Q_0`'s grid.
pub fn outer_chain_check(pair: &WeightPair, e: &ExponentTuple, grids: &[GridFamily], max_cubes: usize) -> Result<ChainCheck> {
    let mesh = *pair.mesh();
    let (alpha, n) = (e.alpha_f(), e.n as f64);
    let c = 1.0 / (1.0 - 2f64.powf(alpha - n));
    let (p, q) = (e.p_f(), e.q_f());
    let mut cands = Vec::new();
    for g in grids {
        for cube in g.cubes() {
            if let Some(r) = mesh.cube_cells(&cube)? {
                if r.contained && pair.sigma.cube_integral(&cube)? > 0.0 {
                    cands.push(cube);
                }
            }
        }
    }
    cands.sort();
    cands.dedup();
    if cands.len() > max_cubes && max_cubes > 0 {
        let stride = cands.len() as f64 / max_cubes as f64;
        cands = (0..max_cubes).map(|i| cands[(i as f64 * stride) as usize]).collect();
    }
    let cubes: Vec<ChainCube> = cands
        .par_iter()
        .map(|q0| -> Result<ChainCube> {
            let sq = pair.sigma.cube_integral(q0)?;
            let outer = outer_riesz(&pair.sigma, q0, alpha)?;
            let g = grids.iter().find(|g| g.shift == q0.shift()).ok_or(LabError::EmptyGrid)?;
            let ext = g.with_levels(g.min_level.min(outer.deepest_shell_level), g.max_level)?;
            let m = frac_maximal(&pair.sigma.restrict(q0)?, alpha, &[ext])?.values;
            let scale = sq.powf(-1.0 / p);
            Ok(ChainCube {
                cube: *q0,
                testing: outer.lattice.lp_norm(q, &pair.u)? * scale,
                bound: c * m.lp_norm(q, &pair.u)? * scale,
            })
        })
        .collect::<Result<_>>()?;
    let violations = cubes.iter().filter(|k| k.testing > k.bound * (1.0 + 1e-9)).count();
    let max_ratio = cubes.iter().filter(|k| k.bound > 0.0).map(|k| k.testing / k.bound).fold(0.0, f64::max);
    Ok(ChainCheck { constant: c, cubes, violations, max_ratio })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceRatios {
    /// weak Riesz over `(1−2^{α−n})^{−1}` times the dual maximal estimate
    pub weak_vs_dual_maximal: f64,
    pub forward_over_strong: f64,
    pub dual_over_strong: f64,
    /// strong Riesz over forward plus dual maximal
    pub strong_over_maximal_sum: f64,
    /// dual Sawyer testing constant over the weak Riesz estimate
    pub sawyer_dual_over_weak: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub exponents: ExponentTuple,
    pub degenerate: bool,
    pub strong_riesz: Option<NormEstimate>,
    pub weak_riesz: Option<NormEstimate>,
    pub forward_maximal: Option<NormEstimate>,
    pub dual_maximal: Option<NormEstimate>,
    pub outer_forward: Option<ConstantReport>,
    pub outer_dual: Option<ConstantReport>,
    pub sawyer_forward: Option<ConstantReport>,
    pub sawyer_dual: Option<ConstantReport>,
    pub chain: Option<ChainCheck>,
    pub ratios: Option<EquivalenceRatios>,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

/// Riesz norms against the two fractional maximal norms, plus the outer testing chain.
pub fn equivalence_report(pair: &WeightPair, e: &ExponentTuple, grids: &[GridFamily], family: &TestFamily) -> Result<EquivalenceReport> {
    if !e.p_less_than_q() {
        return Err(LabError::Precondition("the Riesz/maximal equivalence needs p < q; the restriction p < q is essential".into()));
    }
    if pair.sigma.is_zero() || pair.u.is_zero() {
        return Ok(EquivalenceReport {
            exponents: e.clone(),
            degenerate: true,
            strong_riesz: None,
            weak_riesz: None,
            forward_maximal: None,
            dual_maximal: None,
            outer_forward: None,
            outer_dual: None,
            sawyer_forward: None,
            sawyer_dual: None,
            chain: None,
            ratios: None,
        });
    }
    let alpha = e.alpha_f();
    let dual_e = e.dual()?;
    let swapped = pair.swapped();
    let riesz = riesz_op(alpha);
    let maximal = NormOperator::FracMaximal { alpha };
    let strong = estimate_norm(&riesz, NormKind::Strong, pair, e, grids, family)?;
    let weak = estimate_norm(&riesz, NormKind::Weak, pair, e, grids, family)?;
    let fwd = estimate_norm(&maximal, NormKind::Strong, pair, e, grids, family)?;
    let dual = estimate_norm(&maximal, NormKind::Strong, &swapped, &dual_e, grids, family)?;
    let outer_forward = outer_testing_constant(pair, e, grids)?;
    let outer_dual = outer_testing_constant(&swapped, &dual_e, grids)?;
    let sawyer_forward = sawyer_maximal_testing(pair, e, grids, TestingSide::Forward)?;
    let sawyer_dual = sawyer_maximal_testing(pair, e, grids, TestingSide::Dual)?;
    let chain = outer_chain_check(pair, e, grids, 64)?;
    let ratios = EquivalenceRatios {
        weak_vs_dual_maximal: ratio(weak.value, chain.constant * dual.value),
        forward_over_strong: ratio(fwd.value, strong.value),
        dual_over_strong: ratio(dual.value, strong.value),
        strong_over_maximal_sum: ratio(strong.value, fwd.value + dual.value),
        sawyer_dual_over_weak: ratio(sawyer_dual.value, weak.value),
    };
    Ok(EquivalenceReport {
        exponents: e.clone(),
        degenerate: false,
        strong_riesz: Some(strong),
        weak_riesz: Some(weak),
        forward_maximal: Some(fwd),
        dual_maximal: Some(dual),
        outer_forward: Some(outer_forward),
        outer_dual: Some(outer_dual),
        sawyer_forward: Some(sawyer_forward),
        sawyer_dual: Some(sawyer_dual),
        chain: Some(chain),
        ratios: Some(ratios),
    })
}

/// One inequality `lhs ≤ C·rhs`; `ratio = lhs/rhs` is the smallest admissible `C`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundLine {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl BoundLine {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Self { name: name.into(), lhs, rhs, ratio: ratio(lhs, rhs) }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BumpReport {
    pub exponents: ExponentTuple,
    pub phi: YoungFunction,
    pub psi: YoungFunction,
    pub beta: f64,
    /// `[u,σ]_{A^α_{p,q,Φ}}`
    pub apq_phi: ConstantReport,
    /// `[σ,u]_{A^α_{q′,p′,Ψ}}`
    pub apq_psi_dual: ConstantReport,
    /// `‖u^{1/q}‖_{Ψ,Q}‖σ^{1/p′}‖_{Φ,Q}` version
    pub double_bump: ConstantReport,
    pub bp_phi_bar: BpReport,
    pub bp_phi_bar_classical: BpReport,
    pub bp_psi_bar: BpReport,
    /// `‖M_{β,Φ̄}‖_{L^p→L^q}` estimated on Lebesgue measure
    pub direct_phi_bar: Option<NormEstimate>,
    pub direct_psi_bar: Option<NormEstimate>,
    pub maximal: NormEstimate,
    pub weak_riesz: NormEstimate,
    pub strong_riesz: NormEstimate,
    pub bounds: Vec<BoundLine>,
}

/// Separated and double bump bounds for `M_α(·σ)` and `I_α(·σ)`.
///
/// `direct` additionally estimates `‖M_{β,Φ̄}‖` and `‖M_{β,Ψ̄}‖` with a reduced
/// test family; with a numerically conjugated `Φ̄` this dominates the cost.
#[allow(clippy::too_many_arguments)]
pub fn bump_bound_check(
    pair: &WeightPair,
    e: &ExponentTuple,
    phi: &YoungFunction,
    psi: &YoungFunction,
    grids: &[GridFamily],
    family: &TestFamily,
    direct: bool,
) -> Result<BumpReport> {
    phi.validate()?;
    psi.validate()?;
    if !(e.p <= e.q) {
        return Err(LabError::Precondition("bump bounds need p <= q".into()));
    }
    let (p, q) = (e.p_f(), e.q_f());
    let (pp, qp) = (e.p_prime_f(), e.q_prime_f());
    let beta = e.beta_f();
    let alpha = e.alpha_f();
    let dual_e = e.dual()?;
    let swapped = pair.swapped();
    let phi_bar = phi.associate();
    let psi_bar = psi.associate();

    let apq_phi = apq_bump(pair, e, phi, grids, &BumpSide::Second)?;
    let apq_psi_dual = apq_bump(&swapped, &dual_e, psi, grids, &BumpSide::Second)?;
    let double_bump = apq_bump(pair, e, phi, grids, &BumpSide::Both { psi: psi.clone() })?;
    let bp_phi_bar = bp_classify(&phi_bar, p, BpMode::Fractional { q })?;
    let bp_phi_bar_classical = bp_classify(&phi_bar, p, BpMode::Classical)?;
    let bp_psi_bar = bp_classify(&psi_bar, qp, BpMode::Fractional { q: pp })?;

    let (direct_phi_bar, direct_psi_bar) = if direct && beta < e.n as f64 {
        let one = SampledFunction::constant(*pair.mesh(), 1.0)?;
        let lebesgue = WeightPair::new(one.clone(), one)?;
        let small = TestFamily::small();
        let d1 = estimate_norm(&NormOperator::OrliczMaximal { alpha: beta, phi: phi_bar.clone() }, NormKind::Strong, &lebesgue, e, grids, &small)?;
        let d2 = estimate_norm(&NormOperator::OrliczMaximal { alpha: beta, phi: psi_bar.clone() }, NormKind::Strong, &lebesgue, &dual_e, grids, &small)?;
        (Some(d1), Some(d2))
    } else {
        (None, None)
    };

    let maximal = estimate_norm(&NormOperator::FracMaximal { alpha }, NormKind::Strong, pair, e, grids, family)?;
    let weak_riesz = estimate_norm(&riesz_op(alpha), NormKind::Weak, pair, e, grids, family)?;
    let strong_riesz = estimate_norm(&riesz_op(alpha), NormKind::Strong, pair, e, grids, family)?;

    let max_rhs = apq_phi.value * bp_phi_bar.constant;
    let weak_rhs = apq_psi_dual.value * bp_psi_bar.constant;
    let mut bounds = vec![
        BoundLine::new("maximal_vs_bump_quadrature", maximal.value, max_rhs),
        BoundLine::new("weak_riesz_vs_dual_bump_quadrature", weak_riesz.value, weak_rhs),
        BoundLine::new("strong_riesz_vs_separated_bumps", strong_riesz.value, max_rhs + weak_rhs),
        BoundLine::new("strong_riesz_vs_weak_plus_dual", strong_riesz.value, weak_riesz.value + dual_weak(pair, e, grids, family)?),
    ];
    if let (Some(d1), Some(d2)) = (&direct_phi_bar, &direct_psi_bar) {
        bounds.push(BoundLine::new("maximal_vs_bump_direct", maximal.value, apq_phi.value * d1.value));
        bounds.push(BoundLine::new("weak_riesz_vs_dual_bump_direct", weak_riesz.value, apq_psi_dual.value * d2.value));
        bounds.push(BoundLine::new("direct_phi_bar_vs_quadrature", d1.value, bp_phi_bar.constant));
        bounds.push(BoundLine::new("direct_psi_bar_vs_quadrature", d2.value, bp_psi_bar.constant));
    }
    Ok(BumpReport {
        exponents: e.clone(),
        phi: phi.clone(),
        psi: psi.clone(),
        beta,
        apq_phi,
        apq_psi_dual,
        double_bump,
        bp_phi_bar,
        bp_phi_bar_classical,
        bp_psi_bar,
        direct_phi_bar,
        direct_psi_bar,
        maximal,
        weak_riesz,
        strong_riesz,
        bounds,
    })
}

/// `‖I_α(·u)‖_{L^{q′}(u)→L^{p′,∞}(σ)}`.
fn dual_weak(pair: &WeightPair, e: &ExponentTuple, grids: &[GridFamily], family: &TestFamily) -> Result<f64> {
    Ok(estimate_norm(&riesz_op(e.alpha_f()), NormKind::Weak, &pair.swapped(), &e.dual()?, grids, family)?.value)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogAinftyReport {
    pub exponents: ExponentTuple,
    /// `[w^q]_{A_{s(p)}}`
    pub ap_u: ConstantReport,
    /// `[w^{−p′}]_{A_{s(q′)}}`
    pub ap_sigma: ConstantReport,
    /// `[w^q]_{(A_{s(p)})^{1/q}(A_∞^M)^{1/p′}}`
    pub mixed_u: ConstantReport,
    /// `[w^{−p′}]_{(A_{s(q′)})^{1/p′}(A_∞^M)^{1/q}}`
    pub mixed_sigma: ConstantReport,
    pub md_testing: ConstantReport,
    pub maximal: NormEstimate,
    pub weak_riesz: NormEstimate,
    pub strong_riesz: NormEstimate,
    pub bounds: Vec<BoundLine>,
}

fn log_factor(t: f64) -> f64 {
    1.0 + t.max(1.0).ln()
}

/// Logarithmic mixed `A_p`–`A_∞` bounds for the classical pair `(w^q, w^{−p′})`.
pub fn log_ainfty_check(w: &SampledFunction, e: &ExponentTuple, grids: &[GridFamily], family: &TestFamily) -> Result<LogAinftyReport> {
    if !e.is_sobolev() {
        return Err(LabError::InvalidExponents("the logarithmic bounds need Sobolev exponents".into()));
    }
    let pair = WeightPair::classical(w, e)?;
    let (q, pp) = (e.q_f(), e.p_prime_f());
    let (sp, sq) = (e.s_p_f(), e.s_q_prime_f());
    let ap_u = ap_constant(&pair.u, sp, grids)?;
    let ap_sigma = ap_constant(&pair.sigma, sq, grids)?;
    let mixed_u = ap_ainfm_one_sup(&pair.u, sp, 1.0 / q, 1.0 / pp, grids)?;
    let mixed_sigma = ap_ainfm_one_sup(&pair.sigma, sq, 1.0 / pp, 1.0 / q, grids)?;
    let md_testing = md_sp_testing(&pair, e, grids)?;
    let alpha = e.alpha_f();
    let maximal = estimate_norm(&NormOperator::FracMaximal { alpha }, NormKind::Strong, &pair, e, grids, family)?;
    let weak_riesz = estimate_norm(&riesz_op(alpha), NormKind::Weak, &pair, e, grids, family)?;
    let strong_riesz = estimate_norm(&riesz_op(alpha), NormKind::Strong, &pair, e, grids, family)?;
    let rhs_max = log_factor(ap_sigma.value).powf(1.0 / q) * mixed_sigma.value;
    let rhs_weak = log_factor(ap_u.value).powf(1.0 / pp) * mixed_u.value;
    let bounds = vec![
        BoundLine::new("maximal_vs_log_mixed", maximal.value, rhs_max),
        BoundLine::new("weak_riesz_vs_log_mixed", weak_riesz.value, rhs_weak),
        BoundLine::new("strong_riesz_vs_log_mixed_sum", strong_riesz.value, rhs_weak + rhs_max),
        BoundLine::new("md_testing_vs_log_mixed", md_testing.value, rhs_max),
    ];
    Ok(LogAinftyReport { exponents: e.clone(), ap_u, ap_sigma, mixed_u, mixed_sigma, md_testing, maximal, weak_riesz, strong_riesz, bounds })
}
