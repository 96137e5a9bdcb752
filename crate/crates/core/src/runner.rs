//! Configured experiment runs: suites, hard assertions, JSON and CSV artifacts.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{
    ainfty_exp, ainfty_m, ap_constant, apq_alpha, apq_alpha_constant, md_sp_testing, outer_testing_constant,
    sawyer_maximal_testing, ConstantReport, TestingSide, WeightPair,
};
use crate::error::{LabError, Result};
use crate::examples::{case1_pair, case2_divergence, case2_pair, classical_pair, e_refinement, factored_pair, verify_e_maximal};
use crate::func::{ExponentTuple, Mesh, SampledFunction};
use crate::grid::{pow2, shifted_grids, DyadicCube, GridFamily, Rational, RationalBox};
use crate::normest::{bump_bound_check, equivalence_report, estimate_norm, log_ainfty_check, NormKind, NormOperator, TestFamily};
use crate::operators::{dyadic_frac_maximal, dyadic_riesz, frac_maximal, geometric_maximal, outer_riesz, riesz_potential_1d};
use crate::orlicz::{bp_classify, orlicz_holder_check, rescale_identity_check, BpMode, Verdict, YoungFunction};
use crate::rational;
use crate::sparse::{build_sparse, certify_carleson, default_ratio, domination_check, verify_sparse, CarlesonSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Geometry,
    Operators,
    Sparse,
    Orlicz,
    Constants,
    Equivalence,
    Counterexample,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Geometry, Suite::Operators, Suite::Sparse, Suite::Orlicz, Suite::Constants, Suite::Equivalence, Suite::Counterexample];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Operators => "operators",
            Suite::Sparse => "sparse",
            Suite::Orlicz => "orlicz",
            Suite::Constants => "constants",
            Suite::Equivalence => "equivalence",
            Suite::Counterexample => "counterexample",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| LabError::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// `[lo, hi]` per axis, as rationals; defaults to the unit cube
    #[serde(default)]
    pub window: Vec<[String; 2]>,
    /// `3·2^L` per unit length; must give an integer `L` for the longest side
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<u32>,
}

impl MeshConfig {
    pub fn build(&self, dim: usize) -> Result<Mesh> {
        let window = if self.window.is_empty() {
            RationalBox::unit(dim)?
        } else {
            if self.window.len() != dim {
                return Err(LabError::InvalidMesh(format!("window has {} axes, exponents say n = {dim}", self.window.len())));
            }
            let lo = self.window.iter().map(|w| rational::parse(&w[0])).collect::<Result<Vec<_>>>()?;
            let hi = self.window.iter().map(|w| rational::parse(&w[1])).collect::<Result<Vec<_>>>()?;
            RationalBox::new(lo, hi)?
        };
        let refinement = match (self.refinement, self.cells_per_axis) {
            (Some(l), _) => l,
            (None, Some(cells)) => {
                let side = (0..dim).map(|a| window.upper[a] - window.lower[a]).max().expect("dim >= 1");
                let per = Rational::from_integer(cells as i64) / (side * Rational::from_integer(3));
                (0..=crate::func::MAX_REFINEMENT as i32)
                    .find(|&l| pow2(l) == per)
                    .ok_or_else(|| LabError::InvalidMesh(format!("{cells} cells on side {} is not 3·2^L", rational::format(&side))))?
                    as u32
            }
            (None, None) => {
                if dim == 1 {
                    5
                } else {
                    3
                }
            }
        };
        Mesh::new(&window, refinement)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub min_level: i32,
    /// defaults to the mesh refinement
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_level: Option<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { value: f64 },
    /// `|x − center|^exponent`, Euclidean distance, `center` defaults to the origin
    Power {
        exponent: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `exp(amplitude·Σ sin(2π·frequency·x_i))`
    Smooth { amplitude: f64, frequency: f64 },
    /// positive step function on the unshifted grid at `level`, values in `[e^{−spread}, e^{spread}]`
    Random { seed: u64, level: i32, spread: f64 },
    /// `SampledFunction` JSON
    File { path: PathBuf },
}

impl WeightSpec {
    pub fn sample(&self, mesh: &Mesh) -> Result<SampledFunction> {
        match self {
            WeightSpec::Constant { value } => SampledFunction::constant(*mesh, *value),
            WeightSpec::Power { exponent, center } => SampledFunction::from_fn(*mesh, |x| {
                let d2: f64 = x.iter().enumerate().map(|(i, xi)| (xi - center.get(i).copied().unwrap_or(0.0)).powi(2)).sum();
                d2.sqrt().powf(*exponent)
            }),
            WeightSpec::Smooth { amplitude, frequency } => SampledFunction::from_fn(*mesh, |x| {
                (amplitude * x.iter().map(|xi| (std::f64::consts::TAU * frequency * xi).sin()).sum::<f64>()).exp()
            }),
            WeightSpec::Random { seed, level, spread } => random_positive(mesh, *seed, *level, *spread),
            WeightSpec::File { path } => {
                let f = SampledFunction::from_json(&fs::read_to_string(path)?)?;
                f.mesh().ensure_same(mesh)?;
                Ok(f)
            }
        }
    }
}

/// Positive step function, constant on the unshifted cubes of `level`.
pub fn random_positive(mesh: &Mesh, seed: u64, level: i32, spread: f64) -> Result<SampledFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let level = level.min(mesh.refinement() as i32);
    let g = GridFamily::new(&vec![false; mesh.dim()], level, level, mesh.window())?;
    let mut v = vec![1.0; mesh.n_cells()];
    for q in g.cubes() {
        let c = (spread * (2.0 * rng.gen::<f64>() - 1.0)).exp();
        if let Some(r) = mesh.cube_cells(&q)? {
            for i in r.flat_indices(mesh) {
                v[i] = c;
            }
        }
    }
    SampledFunction::new(*mesh, v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PairSpec {
    Unit,
    /// `u = w^q`, `σ = w^{−p′}`
    Classical { w: WeightSpec },
    Factored { w1: WeightSpec, w2: WeightSpec },
    Separate { u: WeightSpec, sigma: WeightSpec },
    /// `WeightPair` JSON
    File { path: PathBuf },
}

impl PairSpec {
    pub fn label(&self) -> String {
        match self {
            PairSpec::Unit => "unit".into(),
            PairSpec::Classical { .. } => "classical".into(),
            PairSpec::Factored { .. } => "factored".into(),
            PairSpec::Separate { .. } => "separate".into(),
            PairSpec::File { path } => format!("file:{}", path.display()),
        }
    }

    pub fn build(&self, mesh: &Mesh, e: &ExponentTuple, grids: &[GridFamily]) -> Result<WeightPair> {
        let pair = match self {
            PairSpec::Unit => {
                let one = SampledFunction::constant(*mesh, 1.0)?;
                WeightPair::new(one.clone(), one)?
            }
            PairSpec::Classical { w } => classical_pair(&w.sample(mesh)?, e)?,
            PairSpec::Factored { w1, w2 } => factored_pair(&w1.sample(mesh)?, &w2.sample(mesh)?, e, grids)?,
            PairSpec::Separate { u, sigma } => WeightPair::new(u.sample(mesh)?, sigma.sample(mesh)?)?,
            PairSpec::File { path } => {
                let p: WeightPair = serde_json::from_str(&fs::read_to_string(path)?)?;
                p.u.mesh().ensure_same(mesh)?;
                p
            }
        };
        Ok(pair.with_provenance(self.label()))
    }
}

/// A Young function as `"family:k=v,..."`, as tagged JSON, or as `{family, params}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum YoungEntry {
    Text(String),
    Inline(YoungFunction),
    Spec {
        family: String,
        #[serde(default)]
        params: BTreeMap<String, serde_json::Value>,
    },
}

impl YoungEntry {
    pub fn resolve(&self) -> Result<YoungFunction> {
        let y = match self {
            YoungEntry::Text(s) => s.parse()?,
            YoungEntry::Inline(y) => y.clone(),
            YoungEntry::Spec { family, params } => {
                let kv: Vec<String> = params
                    .iter()
                    .map(|(k, v)| match v {
                        serde_json::Value::String(s) => format!("{k}={s}"),
                        other => format!("{k}={other}"),
                    })
                    .collect();
                format!("{family}:{}", kv.join(",")).parse()?
            }
        };
        y.validate()?;
        Ok(y)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    /// `γ` as a rational; the divergence pair uses `(n, α, p, q) = (1, γ, 2, 2)`
    pub gamma: String,
    /// `X` for the `(X, S(X), H(X))` table
    pub window: i64,
    /// `X` for the `M_γ(χ_E)` scan, capped by `window`
    pub e_window: i64,
    pub minorant_to: u64,
    /// `X` for the factored constant of the divergence pair
    pub pair_window: i64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self { gamma: "1/2".into(), window: 4096, e_window: 256, minorant_to: 10_000, pair_window: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub suites: Vec<Suite>,
    #[serde(default = "default_exponents")]
    pub exponents: ExponentTuple,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub grids: GridConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub young: Vec<YoungEntry>,
    #[serde(default)]
    pub pairs: Vec<PairSpec>,
    #[serde(default)]
    pub family: TestFamily,
    #[serde(default)]
    pub counterexample: CounterexampleConfig,
    /// random functions per randomized check
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_exponents() -> ExponentTuple {
    ExponentTuple::parse(1, "1/2", "3/2", "6").expect("valid default exponents")
}

fn default_trials() -> usize {
    8
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suites: Vec::new(),
            exponents: default_exponents(),
            mesh: MeshConfig::default(),
            grids: GridConfig::default(),
            seed: 0,
            young: Vec::new(),
            pairs: Vec::new(),
            family: TestFamily::default(),
            counterexample: CounterexampleConfig::default(),
            trials: default_trials(),
        }
    }
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let mesh = self.mesh.build(self.exponents.n)?;
        let max = self.grids.max_level.unwrap_or(mesh.refinement() as i32);
        if self.grids.min_level > max {
            return Err(LabError::InvalidMesh(format!("grid levels {}..{max} are empty", self.grids.min_level)));
        }
        mesh.check_level(max)?;
        for y in &self.young {
            y.resolve()?;
        }
        rational::parse(&self.counterexample.gamma)?;
        Ok(())
    }

    fn mesh(&self) -> Result<Mesh> {
        self.mesh.build(self.exponents.n)
    }

    fn grids(&self, mesh: &Mesh) -> Result<Vec<GridFamily>> {
        let max = self.grids.max_level.unwrap_or(mesh.refinement() as i32);
        shifted_grids(mesh.dim(), &mesh.window(), self.grids.min_level, max)
    }

    fn pairs(&self) -> Vec<PairSpec> {
        if !self.pairs.is_empty() {
            return self.pairs.clone();
        }
        let mut v = vec![PairSpec::Unit];
        if self.exponents.is_sobolev() {
            v.push(PairSpec::Classical { w: WeightSpec::Smooth { amplitude: 0.3, frequency: 1.0 } });
        }
        if self.exponents.below_sobolev() {
            v.push(PairSpec::Factored {
                w1: WeightSpec::Random { seed: self.seed, level: 2, spread: 1.0 },
                w2: WeightSpec::Smooth { amplitude: 0.5, frequency: 2.0 },
            });
        }
        v
    }

    fn young_functions(&self) -> Result<Vec<YoungFunction>> {
        if !self.young.is_empty() {
            return self.young.iter().map(YoungEntry::resolve).collect();
        }
        let p = self.exponents.p_f();
        Ok(vec![
            YoungFunction::power_bump(p, 2.0),
            YoungFunction::LogBump { p, delta: 0.5 },
            // the damped family loses convexity near t = 3 for small p
            YoungFunction::LogDamped { p: p.max(2.0), eps: 0.5 },
            YoungFunction::Borderline { p, q: 2.0 * p, eps: 0.5 },
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// hard checks decide the exit status; soft checks are diagnostics
    pub hard: bool,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub description: String,
    /// `(column, meaning)`
    pub columns: Vec<(String, String)>,
    #[serde(skip)]
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, description: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            columns: columns.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            rows: Vec::new(),
        }
    }

    fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub data: serde_json::Value,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        Self { suite, checks: Vec::new(), tables: Vec::new(), data: serde_json::Value::Object(Default::default()) }
    }

    fn check(&mut self, name: impl Into<String>, hard: bool, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), hard, passed, detail: detail.into() });
    }

    fn put(&mut self, key: &str, v: impl Serialize) -> Result<()> {
        if let serde_json::Value::Object(m) = &mut self.data {
            m.insert(key.into(), serde_json::to_value(v)?);
        }
        Ok(())
    }

    pub fn hard_failures(&self) -> usize {
        self.checks.iter().filter(|c| c.hard && !c.passed).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub suites: Vec<SuiteReport>,
    pub hard_failures: usize,
    pub passed: bool,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn cube_str(q: &Option<DyadicCube>) -> String {
    q.map(|c| c.to_string()).unwrap_or_default()
}

/// Runs the configured suites on a pool of `workers` threads (all cores when `None`).
pub fn run_suite(config: &RunConfig, workers: Option<usize>) -> Result<RunReport> {
    config.validate()?;
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w.max(1));
    }
    let pool = b.build().map_err(|e| LabError::Precondition(format!("thread pool: {e}")))?;
    let suites: Vec<SuiteReport> = pool.install(|| {
        config.suites.par_iter().map(|s| run_one(config, *s)).collect::<Result<Vec<_>>>()
    })?;
    let hard_failures = suites.iter().map(SuiteReport::hard_failures).sum();
    Ok(RunReport { config: config.clone(), suites, hard_failures, passed: hard_failures == 0 })
}

fn run_one(config: &RunConfig, suite: Suite) -> Result<SuiteReport> {
    match suite {
        Suite::Geometry => geometry(config),
        Suite::Operators => operators(config),
        Suite::Sparse => sparse(config),
        Suite::Orlicz => orlicz(config),
        Suite::Constants => constants(config),
        Suite::Equivalence => equivalence(config),
        Suite::Counterexample => counterexample(config),
    }
}

/// The cube of `g`'s lattice at `level` containing the point `x`.
fn cube_at(x: &[Rational], level: i32, shift: &[bool]) -> Result<DyadicCube> {
    let third = Rational::new(1, 3);
    let sign = if level.rem_euclid(2) == 0 { Rational::one() } else { -Rational::one() };
    let idx: Vec<i64> = x
        .iter()
        .zip(shift)
        .map(|(xi, &s)| {
            let t = if s { third } else { Rational::zero() };
            (*xi / pow2(-level) - sign * t).floor().to_integer()
        })
        .collect();
    DyadicCube::new(level, &idx, shift)
}

fn geometry(config: &RunConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Geometry);
    let mesh = config.mesh()?;
    let grids = config.grids(&mesh)?;
    let h = mesh.h();
    let cell_vol = (0..mesh.dim()).fold(Rational::one(), |a, _| a * h);
    let mut counts = Table::new(
        "grid_levels",
        "cube counts per grid and level",
        &[("shift", "grid shift bits"), ("level", "dyadic level"), ("cubes", "cubes meeting the window"), ("contained", "cubes inside the window")],
    );
    let mut aligned = true;
    for g in &grids {
        for level in g.min_level..=g.max_level {
            let cubes = g.level_cubes(level);
            let mut contained = 0;
            for q in &cubes {
                let Some(r) = mesh.cube_cells(q)? else { continue };
                contained += r.contained as usize;
                let exact = q.realize().intersection(&mesh.window()).volume();
                aligned &= exact == cell_vol * Rational::from_integer(r.count(mesh.dim()) as i64);
            }
            let shift: String = g.shift.iter().map(|&s| if s { '1' } else { '0' }).collect();
            counts.row(vec![shift, level.to_string(), cubes.len().to_string(), contained.to_string()]);
        }
    }
    rep.check("cubes_are_cell_unions", true, aligned, "every window-clipped cube is an exact union of mesh cells");

    // one-third trick: every cell-aligned box sits in a shifted cube at most 6 times its side
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let cells = mesh.cells_per_axis();
    let mut worst = Rational::zero();
    let mut trick = Table::new(
        "one_third",
        "smallest shifted cube containing random boxes",
        &[("box", "lower corner and side"), ("cube", "containing cube"), ("ratio", "side(cube)/side(box)")],
    );
    let shifts: Vec<&Vec<bool>> = grids.iter().map(|g| &g.shift).collect();
    for _ in 0..config.trials.max(1) * 8 {
        let k = rng.gen_range(1..=cells.min(12));
        let lo: Vec<usize> = (0..mesh.dim()).map(|_| rng.gen_range(0..=cells - k)).collect();
        let side = h * Rational::from_integer(k as i64);
        let lower: Vec<Rational> = lo.iter().enumerate().map(|(a, &i)| mesh.window().lower[a] + h * Rational::from_integer(i as i64)).collect();
        let bx = RationalBox::new(lower.clone(), lower.iter().map(|l| *l + side).collect())?;
        let mut best: Option<DyadicCube> = None;
        let start = (0..=80).map(|j| mesh.refinement() as i32 - j).find(|&l| pow2(-l) >= side).unwrap_or(0);
        for s in &shifts {
            for level in (start - 6..=start).rev() {
                let q = cube_at(&lower, level, s)?;
                if q.realize().contains_box(&bx) {
                    if best.is_none_or(|b| q.side() < b.side()) {
                        best = Some(q);
                    }
                    break;
                }
            }
        }
        let Some(q) = best else {
            worst = Rational::from_integer(i64::MAX / 4);
            continue;
        };
        let ratio = q.side() / side;
        worst = worst.max(ratio);
        trick.row(vec![format!("{:?}+{}", lo, k), q.to_string(), rational::format(&ratio)]);
    }
    rep.check("one_third_trick", true, worst <= Rational::from_integer(6), format!("max side ratio {}", rational::format(&worst)));
    rep.put("grids", grids.len())?;
    rep.tables.push(counts);
    rep.tables.push(trick);
    Ok(rep)
}

fn alphas(dim: usize) -> Vec<f64> {
    [0.25, 0.5, 0.75].into_iter().filter(|&a| a < dim as f64).collect()
}

fn operators(config: &RunConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Operators);
    let mesh = config.mesh()?;
    let grids = config.grids(&mesh)?;
    let n = mesh.dim() as f64;
    let f = random_positive(&mesh, config.seed, 2, 1.5)?;
    let mut values = Table::new(
        "operator_values",
        "cellwise operator values for one random positive step function",
        &[("cell", "flat cell index"), ("alpha", "order"), ("f", "input"), ("m_alpha", "shifted-grid M_alpha f"), ("i_alpha_dyadic", "grid-0 dyadic I_alpha f"), ("i_alpha", "continuous I_alpha f (n = 1), empty otherwise")],
    );
    let mut md_le_id = true;
    for alpha in alphas(mesh.dim()) {
        let m = frac_maximal(&f, alpha, &grids)?.values;
        for g in &grids {
            let md = dyadic_frac_maximal(&f, alpha, g)?.values;
            let id = dyadic_riesz(&f, alpha, g)?.values;
            md_le_id &= md.values().iter().zip(id.values()).all(|(a, b)| *a <= b * (1.0 + 1e-12));
        }
        let id0 = dyadic_riesz(&f, alpha, &grids[0])?.values;
        let ic = if mesh.dim() == 1 { Some(riesz_potential_1d(&f, alpha)?.values) } else { None };
        for i in 0..mesh.n_cells() {
            values.row(vec![
                i.to_string(),
                num(alpha),
                num(f.values()[i]),
                num(m.values()[i]),
                num(id0.values()[i]),
                ic.as_ref().map(|v| num(v.values()[i])).unwrap_or_default(),
            ]);
        }
    }
    rep.check("dyadic_maximal_below_dyadic_riesz", true, md_le_id, "M^D_alpha f <= I^D_alpha f on every cell and grid");

    // outer potential against the maximal function, per Q_0
    let mut outer = Table::new(
        "outer_riesz",
        "outer potential of sigma chi_Q0 against (1-2^(alpha-n))^(-1) M_alpha",
        &[("q0", "root cube"), ("alpha", "order"), ("max_ratio", "max over cells of lattice / (C M_alpha)"), ("closed_form_error", "max relative lattice vs closed form")],
    );
    let mut outer_ok = true;
    let mut closed_ok = true;
    for alpha in alphas(mesh.dim()) {
        let c = 1.0 / (1.0 - 2f64.powf(alpha - n));
        for g in &grids {
            let mut cubes: Vec<DyadicCube> = g.cubes().into_iter().filter(|q| mesh.cube_cells(q).ok().flatten().is_some_and(|r| r.contained)).collect();
            cubes.truncate(config.trials.max(1) * 2);
            for q0 in cubes {
                let o = outer_riesz(&f, &q0, alpha)?;
                let ext = g.with_levels(g.min_level.min(o.deepest_shell_level), g.max_level)?;
                let m = frac_maximal(&f.restrict(&q0)?, alpha, &[ext])?.values;
                let mut ratio = 0.0f64;
                let mut err = 0.0f64;
                for ((l, cf), mv) in o.lattice.values().iter().zip(o.closed_form.values()).zip(m.values()) {
                    if *l > 0.0 {
                        ratio = ratio.max(l / (c * mv));
                        err = err.max((l - cf).abs() / l);
                    }
                }
                outer_ok &= ratio <= 1.0 + 1e-9;
                closed_ok &= err <= 1e-9;
                outer.row(vec![q0.to_string(), num(alpha), num(ratio), num(err)]);
            }
        }
    }
    rep.check("outer_riesz_below_maximal", true, outer_ok, "I^{Q0}(sigma chi_Q0) <= (1-2^(alpha-n))^(-1) M_alpha(sigma chi_Q0), rel 1e-9");
    rep.check("outer_riesz_closed_form", true, closed_ok, "lattice sum plus tail equals the shell closed form, rel 1e-9");

    // dimension-free bounds
    let mut bounds = Table::new(
        "maximal_bounds",
        "norm lower bounds against the dimension-free constants",
        &[("operator", "operator"), ("p", "source exponent"), ("q", "target exponent"), ("estimate", "norm lower bound"), ("bound", "analytic bound")],
    );
    let mut geo_ok = true;
    for (k, p) in ["3/2", "2", "3"].iter().enumerate() {
        let e = ExponentTuple::parse(mesh.dim(), "0", p, p)?;
        let w = random_positive(&mesh, config.seed + 1 + k as u64, 2, 2.0)?;
        let one = SampledFunction::constant(mesh, 1.0)?;
        let pair = WeightPair::new(one.clone(), one)?;
        let mut best = 0.0f64;
        for g in &grids {
            let m = geometric_maximal(&w, g)?.values;
            best = best.max(m.lp_norm_lebesgue(e.p_f()) / w.lp_norm_lebesgue(e.p_f()));
        }
        let est = estimate_norm(&NormOperator::GeometricMaximal { grid: 0 }, NormKind::Strong, &pair, &e, &grids, &TestFamily::small())?;
        best = best.max(est.value);
        geo_ok &= best <= std::f64::consts::E;
        bounds.row(vec!["geometric-maximal".into(), p.to_string(), p.to_string(), num(best), num(std::f64::consts::E)]);
    }
    rep.check("geometric_maximal_below_e", true, geo_ok, "||M_0^D f||_p <= e ||f||_p");
    let e = &config.exponents;
    let beta = e.beta_f();
    let mu = random_positive(&mesh, config.seed + 9, 2, 1.0)?;
    let pair = WeightPair::new(mu.clone(), mu)?;
    let bound = (1.0 + e.p_prime_f() / e.q_f()).powf(1.0 - beta / n);
    let mut wdm_ok = true;
    for gi in 0..grids.len() {
        let est = estimate_norm(&NormOperator::WeightedDyadicMaximal { beta, grid: gi }, NormKind::Strong, &pair, e, &grids, &config.family)?;
        wdm_ok &= est.value <= bound + 1e-9;
        bounds.row(vec![format!("weighted-dyadic-maximal/grid{gi}"), num(e.p_f()), num(e.q_f()), num(est.value), num(bound)]);
    }
    rep.check("weighted_dyadic_maximal_bound", true, wdm_ok, format!("||M^D_(beta,mu)|| <= (1+p'/q)^(1-beta/n) = {bound}"));
    rep.tables.extend([values, outer, bounds]);
    Ok(rep)
}

fn sparse(config: &RunConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Sparse);
    let mesh = config.mesh()?;
    let grids = config.grids(&mesh)?;
    let alpha = config.exponents.alpha_f();
    let a = default_ratio(mesh.dim());
    let mut table = Table::new(
        "sparse_families",
        "one row per stopping cube",
        &[("trial", "random generator index"), ("cube", "stopping cube"), ("generation", "k with A(Q) > a^k"), ("thickness", "|E_Q|/|Q|")],
    );
    let mut summary = Table::new(
        "sparse_summary",
        "per-trial sparsity, domination and Carleson diagnostics",
        &[("trial", "random generator index"), ("cubes", "stopping cubes"), ("min_thickness", "min |E_Q|/|Q|"), ("max_ratio", "max M^D_alpha f / L^S_alpha f"), ("c_a", "domination constant"), ("carleson", "Carleson constant of |E_Q cap window|")],
    );
    let (mut thick, mut dom, mut carl) = (true, true, true);
    for t in 0..config.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1000 + t as u64));
        let f = random_positive(&mesh, rng.gen(), rng.gen_range(1..=mesh.refinement() as i32), 2.0)?;
        let g = &grids[t % grids.len()];
        let s = build_sparse(&f, alpha, g, a)?;
        let v = verify_sparse(&s)?;
        let d = domination_check(&f, &s, g)?;
        let c = certify_carleson(&CarlesonSequence::from_sparse(&s)?, &SampledFunction::constant(mesh, 1.0)?)?;
        thick &= v.all_thick && v.disjoint && v.masks_inside_cubes;
        dom &= d.violations == 0;
        carl &= c <= 1.0 + 1e-9;
        for q in &s.cubes {
            table.row(vec![t.to_string(), q.cube.to_string(), q.generation.to_string(), num(q.e_units as f64 / q.volume_units as f64)]);
        }
        summary.row(vec![t.to_string(), v.n_cubes.to_string(), num(v.min_thickness), num(d.max_ratio), num(d.c_a), num(c)]);
    }
    rep.check("sparse_thick_disjoint", true, thick, "|E_Q| >= |Q|/2 in exact units, E_Q disjoint and inside Q");
    rep.check("sparse_domination", true, dom, format!("M^D_alpha f <= C_a L^S_alpha f with C_a = {a}"));
    rep.check("sparse_carleson", true, carl, "sum over Q in R of |E_Q cap W| <= |R cap W|");
    rep.tables.extend([summary, table]);
    Ok(rep)
}

fn orlicz(config: &RunConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Orlicz);
    let mut table = Table::new(
        "young_classification",
        "tail classification of each configured Young function",
        &[("young", "Young function"), ("p", "exponent"), ("classical", "B_p verdict"), ("classical_constant", "B_p constant"), ("fractional", "B_p^beta verdict (q from exponents)"), ("fractional_constant", "B_p^beta constant"), ("biconjugate_error", "max relative |bar bar Phi - Phi| on probes")],
    );
    let (p, q) = (config.exponents.p_f(), config.exponents.q_f());
    let probes = [0.2, 1.0, 3.0, 12.0];
    let mut bic_ok = true;
    let (fams, rejected): (Vec<YoungFunction>, Vec<YoungFunction>) =
        config.young_functions()?.into_iter().partition(|y| y.validate().is_ok());
    if !rejected.is_empty() {
        let names: Vec<String> = rejected.iter().map(ToString::to_string).collect();
        rep.check("not_young", false, false, format!("skipped, not convex: {}", names.join("; ")));
    }
    if fams.is_empty() {
        return Err(LabError::Precondition("no valid Young functions configured".into()));
    }
    for y in fams.iter() {
        let cls = bp_classify(y, p, BpMode::Classical)?;
        let frac = if q >= p { Some(bp_classify(y, p, BpMode::Fractional { q })?) } else { None };
        let dd = y.associate_numeric().associate_numeric();
        let err = probes.iter().map(|&t| ((dd.eval(t) - y.eval(t)) / y.eval(t)).abs()).fold(0.0, f64::max);
        bic_ok &= err <= 1e-6;
        table.row(vec![
            y.to_string(),
            num(p),
            format!("{:?}", cls.verdict),
            num(cls.constant),
            frac.as_ref().map(|r| format!("{:?}", r.verdict)).unwrap_or_default(),
            frac.as_ref().map(|r| num(r.constant)).unwrap_or_default(),
            num(err),
        ]);
    }
    rep.check("biconjugate", true, bic_ok, "numeric double associate recovers Phi within 1e-6");

    // borderline family with q/p = 2
    let mut verdicts = Table::new(
        "borderline_verdicts",
        "t^p / log(e+t)^((1+eps)p/q) with p = 2, q = 4",
        &[("eps", "epsilon"), ("classical", "B_p verdict"), ("fractional", "B_p^beta verdict")],
    );
    let mut match_ok = true;
    for eps in [0.1, 0.5, 0.9, 1.5, 2.0] {
        let y = YoungFunction::Borderline { p: 2.0, q: 4.0, eps };
        let c = bp_classify(&y, 2.0, BpMode::Classical)?.verdict;
        let fr = bp_classify(&y, 2.0, BpMode::Fractional { q: 4.0 })?.verdict;
        let want_c = if eps > 1.0 { Verdict::Convergent } else { Verdict::Divergent };
        match_ok &= c == want_c && (eps > 1.0 || fr == Verdict::Convergent);
        verdicts.row(vec![num(eps), format!("{c:?}"), format!("{fr:?}")]);
    }
    rep.check("borderline_verdicts", true, match_ok, "fractional convergent for eps < 1, classical convergent iff eps > q/p - 1");

    // Hölder and rescaling on random data
    let mesh = config.mesh()?;
    let grids = config.grids(&mesh)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(77));
    let (mut holder_ok, mut rescale_err) = (true, 0.0f64);
    for t in 0..config.trials * 4 {
        let y = &fams[t % fams.len()];
        let f = random_positive(&mesh, rng.gen(), mesh.refinement() as i32, 2.0)?;
        let g = random_positive(&mesh, rng.gen(), mesh.refinement() as i32, 2.0)?;
        let cubes = grids[t % grids.len()].cubes();
        let q = cubes[rng.gen_range(0..cubes.len())];
        if mesh.cube_cells(&q)?.is_none_or(|r| !r.contained) {
            continue;
        }
        let (lhs, rhs) = orlicz_holder_check(&f, &g, &q, y)?;
        holder_ok &= lhs <= rhs * (1.0 + 1e-9);
        let (a, b) = rescale_identity_check(&f, &q, y, 2.0)?;
        rescale_err = rescale_err.max((a - b).abs() / b.max(f64::MIN_POSITIVE));
    }
    rep.check("orlicz_holder", true, holder_ok, "avg(fg) <= 2 ||f||_Phi ||g||_Phibar");
    rep.check("rescaling_identity", true, rescale_err <= 1e-8, format!("max relative error {rescale_err:e}"));
    rep.tables.extend([table, verdicts]);
    Ok(rep)
}

fn constant_row(t: &mut Table, pair: &str, c: &ConstantReport) {
    t.row(vec![pair.into(), c.name.clone(), num(c.value), cube_str(&c.argmax), c.cubes_scored.to_string(), c.cubes_skipped.to_string()]);
}

fn constants(config: &RunConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Constants);
    let e = &config.exponents;
    let mesh = config.mesh()?;
    let grids = config.grids(&mesh)?;
    let mut table = Table::new(
        "constants",
        "weight and testing constants, maxima over contained family cubes",
        &[("pair", "pair label"), ("name", "constant"), ("value", "lower bound"), ("argmax", "maximizing cube"), ("scored", "cubes scored"), ("skipped", "cubes with a vanishing measure")],
    );
    let (mut sym_ok, mut link_ok, mut fact_ok, mut mono_ok) = (true, true, true, true);
    let dual = e.dual()?;
    for spec in config.pairs() {
        let label = spec.label();
        let pair = spec.build(&mesh, e, &grids)?;
        let apq = apq_alpha_constant(&pair, e, &grids)?;
        constant_row(&mut table, &label, &apq);
        for g in &grids {
            for q in g.cubes() {
                if !mesh.cube_cells(&q)?.is_some_and(|r| r.contained) {
                    continue;
                }
                let (a, b) = (apq_alpha(&pair, e, &q)?, apq_alpha(&pair.swapped(), &dual, &q)?);
                if a.is_finite() || b.is_finite() {
                    sym_ok &= (a - b).abs() <= 1e-12 * a.abs().max(1.0);
                }
            }
        }
        if let PairSpec::Classical { w } = &spec {
            let wq = w.sample(&mesh)?.map(|v| v.powf(e.q_f()))?;
            let ap = ap_constant(&wq, e.s_p_f(), &grids)?;
            let link = ap.value.powf(1.0 / e.q_f());
            link_ok &= (link - apq.value).abs() <= 1e-12 * apq.value;
            constant_row(&mut table, &label, &ap);
        }
        if matches!(spec, PairSpec::Factored { .. }) {
            fact_ok &= apq.value <= 1.05;
        }
        for (w, side) in [(&pair.u, "u"), (&pair.sigma, "sigma")] {
            if w.values().iter().all(|&v| v > 0.0) {
                let mut a = ainfty_exp(w, &grids)?;
                a.name = format!("ainfty_exp_{side}");
                constant_row(&mut table, &label, &a);
            }
            let mut m = ainfty_m(w, &grids)?;
            m.name = format!("ainfty_m_{side}");
            constant_row(&mut table, &label, &m);
        }
        if e.alpha_f() > 0.0 {
            constant_row(&mut table, &label, &outer_testing_constant(&pair, e, &grids)?);
        }
        for side in [TestingSide::Forward, TestingSide::Dual] {
            constant_row(&mut table, &label, &sawyer_maximal_testing(&pair, e, &grids, side)?);
        }
        if e.is_sobolev() {
            constant_row(&mut table, &label, &md_sp_testing(&pair, e, &grids)?);
        }
        // same data on a refined mesh with one more level can only raise the constant
        let fine = WeightPair::new(pair.u.refined()?, pair.sigma.refined()?)?;
        let fine_grids: Vec<GridFamily> = grids.iter().map(|g| g.with_levels(g.min_level, g.max_level + 1)).collect::<Result<_>>()?;
        let refined = apq_alpha_constant(&fine, e, &fine_grids)?;
        mono_ok &= refined.value >= apq.value * (1.0 - 1e-12);
    }
    rep.check("apq_duality_symmetry", true, sym_ok, "A(u,sigma,Q) for (p,q) equals A(sigma,u,Q) for (q',p') to 1e-12");
    rep.check("classical_link", true, link_ok, "[u,sigma]_{A_pq^alpha} = [w^q]_{A_s(p)}^(1/q) to 1e-12");
    rep.check("factored_at_most_one", true, fact_ok, "factored pairs have A-constant <= 1 + 0.05");
    rep.check("refinement_monotone", true, mono_ok, "constants never decrease on a refined mesh with one more level");
    rep.tables.push(table);
    Ok(rep)
}

fn equivalence(config: &RunConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Equivalence);
    let e = &config.exponents;
    let mesh = config.mesh()?;
    let grids = config.grids(&mesh)?;
    let mut table = Table::new(
        "equivalence",
        "norm lower bounds and ratio diagnostics per pair",
        &[
            ("pair", "pair label"),
            ("strong_riesz", "||I_alpha(. sigma)|| lower bound"),
            ("weak_riesz", "weak-type lower bound"),
            ("forward_maximal", "||M_alpha(. sigma)|| lower bound"),
            ("dual_maximal", "||M_alpha(. u)|| dual lower bound"),
            ("strong_over_maximal_sum", "strong / (forward + dual)"),
            ("weak_vs_dual_maximal", "weak / (C dual)"),
            ("chain_max_ratio", "max outer testing / bound over Q0"),
        ],
    );
    let mut bounds = Table::new(
        "upper_bounds",
        "lhs <= C rhs diagnostics, ratio = smallest admissible C",
        &[("pair", "pair label"), ("check", "report"), ("name", "inequality"), ("lhs", "left side"), ("rhs", "right side"), ("ratio", "lhs/rhs")],
    );
    let mut chain_ok = true;
    if !e.p_less_than_q() {
        rep.check("p_less_than_q", false, false, "equivalence needs p < q; skipped");
    }
    for spec in config.pairs() {
        let label = spec.label();
        let pair = spec.build(&mesh, e, &grids)?;
        if e.p_less_than_q() {
            let r = equivalence_report(&pair, e, &grids, &config.family)?;
            if let (Some(c), Some(ra)) = (&r.chain, &r.ratios) {
                chain_ok &= c.violations == 0;
                let v = |x: &Option<crate::normest::NormEstimate>| x.as_ref().map(|n| num(n.value)).unwrap_or_default();
                table.row(vec![
                    label.clone(),
                    v(&r.strong_riesz),
                    v(&r.weak_riesz),
                    v(&r.forward_maximal),
                    v(&r.dual_maximal),
                    num(ra.strong_over_maximal_sum),
                    num(ra.weak_vs_dual_maximal),
                    num(c.max_ratio),
                ]);
            }
            let phi = YoungFunction::power_bump(e.p_f(), 2.0);
            let psi = YoungFunction::power_bump(e.q_prime_f(), 2.0);
            let b = bump_bound_check(&pair, e, &phi, &psi, &grids, &config.family, false)?;
            for l in &b.bounds {
                bounds.row(vec![label.clone(), "bumps".into(), l.name.clone(), num(l.lhs), num(l.rhs), num(l.ratio)]);
            }
        }
        if let (PairSpec::Classical { w }, true) = (&spec, e.is_sobolev()) {
            let r = log_ainfty_check(&w.sample(&mesh)?, e, &grids, &config.family)?;
            for l in &r.bounds {
                bounds.row(vec![label.clone(), "log-ainfty".into(), l.name.clone(), num(l.lhs), num(l.rhs), num(l.ratio)]);
            }
        }
    }
    rep.check("outer_testing_chain", true, chain_ok, "per-Q0 outer testing <= (1-2^(alpha-n))^(-1) maximal testing, rel 1e-9");
    rep.tables.extend([table, bounds]);
    Ok(rep)
}

fn counterexample(config: &RunConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Counterexample);
    let cx = &config.counterexample;
    let gamma = rational::parse(&cx.gamma)?;
    let e = ExponentTuple::parse(1, &cx.gamma, "2", "2")?;
    if cx.window < 4 {
        return Err(LabError::Precondition("counterexample window must be at least 4".into()));
    }
    let doublings = (cx.window as f64).log2().floor() as u32;
    let r = case2_divergence(&e, doublings, cx.minorant_to)?;
    let mut growth = Table::new(
        "case2_growth",
        "divergence of the S integral against the harmonic minorant",
        &[("x", "window X"), ("s", "S(X), integral of x^(gamma-1) chi_E over [2,X]"), ("h", "H(X), sum of 1/(j+1) for 2 <= j < X")],
    );
    for (x, s, h) in &r.points {
        growth.row(vec![num(*x), num(*s), num(*h)]);
    }
    rep.check("case2_identity", true, r.identity_holds, format!("(alpha-1)q + (1-gamma)q/p' = {}", rational::format(&r.identity_lhs)));
    rep.check("case2_minorant", true, r.minorant_violations == 0, format!("termwise minorant for j <= {}", r.minorant_checked_to));
    let s_max = r.points.last().map_or(0.0, |p| p.1);
    rep.check("case2_exceeds_5", false, s_max > 5.0, format!("S({}) = {s_max}", cx.window));

    let xp = cx.pair_window.min(cx.window);
    let (pair, grids) = case2_pair(&e, xp, e_refinement(rational::to_f64(&gamma), xp), -((xp as f64).log2().ceil() as i32) - 2)?;
    let apq = apq_alpha_constant(&pair, &e, &grids)?;
    rep.check("case2_pair_constant", true, apq.value <= 1.0 + 1e-9, format!("A-constant of the divergence pair = {}", apq.value));

    let xe = cx.e_window.min(cx.window);
    let gf = rational::to_f64(&gamma);
    let l = e_refinement(gf, xe);
    let window = RationalBox::new(vec![Rational::zero()], vec![Rational::from_integer(xe)])?;
    let eg = shifted_grids(1, &window, -((xe as f64).log2().ceil() as i32) - 2, l as i32)?;
    let em = verify_e_maximal(gf, xe, l, &eg)?;
    let mut minima = Table::new(
        "e_maximal",
        "minimum of M_gamma(chi_E) on each unit interval",
        &[("k", "interval [k, k+1)"), ("min", "minimum over its cells")],
    );
    for (k, m) in &em.unit_minima {
        minima.row(vec![k.to_string(), num(*m)]);
    }
    rep.check(
        "e_maximal_band",
        true,
        em.min >= 0.5 * em.floor && em.max <= 10.0,
        format!("M_gamma(chi_E) in [{}, {}] against [{}, 10]", em.min, em.max, 0.5 * em.floor),
    );

    let e1 = ExponentTuple::parse(1, "1/4", "8/7", "2")?;
    let c1 = case1_pair(&e1, 64, 3, -8)?;
    let mut case1 = Table::new(
        "case1_growth",
        "finite-window identity for the first case",
        &[("x", "window X"), ("minorant", "integral of x^(q(alpha-1)+t) over [1,X]"), ("log_x", "log X"), ("maximal_integral", "integral of M_alpha(f sigma)^q u over [1,X]")],
    );
    let mut id_ok = true;
    for (x, m, i) in &c1.growth {
        id_ok &= (m - x.ln()).abs() <= 1e-6 * x.ln();
        case1.row(vec![num(*x), num(*m), num(x.ln()), num(*i)]);
    }
    rep.check("case1_log_identity", true, id_ok, "finite-X integral equals log X to 1e-6");
    rep.put("case2", &r)?;
    rep.put("e_maximal_band", [em.min, em.max])?;
    rep.tables.extend([growth, minima, case1]);
    Ok(rep)
}

/// Writes `report.json`, `tables/<suite>_<table>.csv` and `schema.txt` under `dir`.
pub fn write_artifacts(report: &RunReport, dir: &Path) -> Result<()> {
    let tables = dir.join("tables");
    fs::create_dir_all(&tables)?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)? + "\n")?;
    let mut schema = String::new();
    for s in &report.suites {
        for t in &s.tables {
            let file = format!("{}_{}.csv", s.suite, t.name);
            let mut w = csv::Writer::from_path(tables.join(&file)).map_err(csv_err)?;
            w.write_record(t.columns.iter().map(|c| &c.0)).map_err(csv_err)?;
            for r in &t.rows {
                w.write_record(r).map_err(csv_err)?;
            }
            w.flush()?;
            schema.push_str(&format!("tables/{file}: {}\n", t.description));
            for (c, d) in &t.columns {
                schema.push_str(&format!("  {c}: {d}\n"));
            }
            schema.push('\n');
        }
    }
    fs::write(dir.join("schema.txt"), schema)?;
    Ok(())
}

fn csv_err(e: csv::Error) -> LabError {
    LabError::Io(std::io::Error::other(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_list() {
        let r = run_suite(&RunConfig::default(), Some(1)).unwrap();
        assert!(r.passed && r.suites.is_empty());
    }

    #[test]
    fn config_roundtrip_and_rejects_unknown() {
        let c = RunConfig::from_json(r#"{"suites":["geometry"],"exponents":{"n":1,"alpha":"1/2","p":"3/2","q":"6"},"mesh":{"cells_per_axis":48},"young":["power:p=3",{"family":"log-bump","params":{"p":2,"delta":"1/2"}}]}"#).unwrap();
        assert_eq!(c.mesh.build(1).unwrap().refinement(), 4);
        assert_eq!(c.young[1].resolve().unwrap(), YoungFunction::LogBump { p: 2.0, delta: 0.5 });
        let back = RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(RunConfig::from_json(r#"{"suites":["nope"]}"#).is_err());
        assert!(RunConfig::from_json(r#"{"colour":1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"mesh":{"cells_per_axis":40}}"#).is_err());
    }

    #[test]
    fn cube_at_contains_point() {
        for level in -2..4 {
            for shift in [false, true] {
                let x = vec![Rational::new(5, 7)];
                let q = cube_at(&x, level, &[shift]).unwrap();
                assert!(q.contains_point(&x), "{q}");
            }
        }
    }

    #[test]
    fn geometry_suite_passes() {
        let c = RunConfig { suites: vec![Suite::Geometry], trials: 2, ..Default::default() };
        let r = run_suite(&c, Some(2)).unwrap();
        assert!(r.passed, "{:?}", r.suites[0].checks);
    }
}
