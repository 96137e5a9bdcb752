use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dyadic_lab::constants::{
    ainfty_exp, ainfty_m, ap_constant, apq_alpha_constant, apq_bump, md_sp_testing, mixed_one_sup, outer_testing_constant,
    sawyer_maximal_testing, BumpSide, ConstantReport, MixedFlavor, TestingSide, WeightPair,
};
use dyadic_lab::examples::{case1_pair, case2_divergence, case2_pair, classical_pair, e_refinement, factored_pair};
use dyadic_lab::grid::all_shifts;
use dyadic_lab::normest::{bump_bound_check, equivalence_report, estimate_norm, log_ainfty_check, NormKind, NormOperator, TestFamily};
use dyadic_lab::operators::{
    bilinear_maximal, dyadic_frac_maximal, dyadic_riesz, dyadic_riesz_max, frac_maximal, geometric_maximal, orlicz_maximal,
    riesz_potential_1d, weighted_dyadic_maximal,
};
use dyadic_lab::orlicz::{bp_classify, BpMode};
use dyadic_lab::runner::{run_suite, write_artifacts, RunConfig, Suite};
use dyadic_lab::sparse::{build_sparse, default_ratio, domination_check, sparse_operator, verify_sparse};
use dyadic_lab::{ExponentTuple, GridFamily, SampledFunction, SparseFamily, YoungFunction};

#[derive(Parser)]
#[command(name = "dyadic-lab", version, about = "Dyadic operators, weight constants and norm experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run configured suites and write report.json, tables/*.csv and schema.txt
    Run(RunArgs),
    /// Apply an operator to a sampled function
    Ops(OpsArgs),
    /// Build, verify and apply sparse families
    #[command(subcommand)]
    Sparse(SparseCmd),
    /// Classify a Young function under the B_p conditions
    Orlicz(OrliczArgs),
    /// Weight constants of a pair over the grid cubes
    #[command(subcommand)]
    Constants(ConstantsCmd),
    /// Norm lower bounds and two-weight diagnostics
    #[command(subcommand)]
    Norms(NormsCmd),
    /// Counterexample and reference weight pairs
    #[command(subcommand)]
    Examples(ExamplesCmd),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// overrides the configured suite list
    #[arg(long, num_args = 1..)]
    suite: Vec<Suite>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// counterexample gamma
    #[arg(long)]
    gamma: Option<String>,
    /// counterexample window X
    #[arg(long)]
    window: Option<i64>,
}

// grid selection shared by every command that scans cubes
#[derive(Args, Clone)]
struct GridArgs {
    /// `lo..hi`; `hi` defaults to the mesh refinement
    #[arg(long)]
    levels: Option<String>,
    /// comma-separated shift bits per grid, e.g. `00,11`; all shifts by default
    #[arg(long)]
    shifts: Option<String>,
}

impl GridArgs {
    fn build(&self, f: &SampledFunction) -> Result<Vec<GridFamily>> {
        let mesh = f.mesh();
        let (lo, hi) = match &self.levels {
            None => (0, mesh.refinement() as i32),
            Some(s) => {
                let (a, b) = s.split_once("..").ok_or_else(|| anyhow!("levels must look like lo..hi"))?;
                let hi = if b.is_empty() { mesh.refinement() as i32 } else { b.parse()? };
                (a.parse()?, hi)
            }
        };
        let shifts: Vec<Vec<bool>> = match &self.shifts {
            None => all_shifts(mesh.dim())?,
            Some(s) => s
                .split(',')
                .map(|bits| {
                    let v: Vec<bool> = bits.trim().chars().map(|c| c == '1').collect();
                    if v.len() != mesh.dim() {
                        bail!("shift {bits:?} needs {} bits", mesh.dim());
                    }
                    Ok(v)
                })
                .collect::<Result<_>>()?,
        };
        shifts.iter().map(|s| Ok(GridFamily::new(s, lo, hi, mesh.window())?)).collect()
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum OpName {
    FracMaximal,
    DyadicFracMaximal,
    Riesz,
    DyadicRiesz,
    DyadicRieszMax,
    WeightedDyadicMaximal,
    GeometricMaximal,
    OrliczMaximal,
    BilinearMaximal,
}

#[derive(Args)]
struct OpsArgs {
    #[arg(value_enum)]
    name: OpName,
    /// SampledFunction JSON
    #[arg(long)]
    function: PathBuf,
    #[arg(long, default_value = "0")]
    alpha: String,
    /// measure for the weighted maximal, second factor for the bilinear maximal
    #[arg(long)]
    weight: Option<PathBuf>,
    #[arg(long)]
    young: Option<String>,
    #[command(flatten)]
    grids: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SparseCmd {
    /// Build a sparse family by stopping times on one grid
    Build {
        #[arg(long)]
        function: PathBuf,
        #[arg(long, default_value = "0")]
        alpha: String,
        /// stopping ratio, 2^(n+1) by default
        #[arg(long)]
        ratio: Option<f64>,
        #[command(flatten)]
        grids: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check thickness and disjointness
    Verify {
        #[arg(long)]
        family: PathBuf,
        /// also check pointwise domination of M^D_alpha f
        #[arg(long)]
        function: Option<PathBuf>,
    },
    /// Evaluate the sparse operator on a function
    Apply {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OrliczArgs {
    #[arg(long)]
    young: String,
    #[arg(long)]
    p: String,
    /// fractional mode with this q
    #[arg(long)]
    q: Option<String>,
    /// classify the associate instead
    #[arg(long)]
    associate: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum ConstantName {
    Apq,
    AinftyExpU,
    AinftyExpSigma,
    AinftyMU,
    AinftyMSigma,
    ApU,
    ApSigma,
    MixedExp,
    Bump,
    DoubleBump,
    OuterTesting,
    SawyerForward,
    SawyerDual,
    MdSp,
}

#[derive(Subcommand)]
enum ConstantsCmd {
    /// Compute one or more constants; JSON for one, CSV rows for several
    Compute {
        /// one or more constants; several emit CSV rows
        #[arg(long, value_enum, num_args = 1..)]
        which: Vec<ConstantName>,
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        exponents: String,
        #[arg(long)]
        young: Option<String>,
        /// second Young function for the double bump
        #[arg(long)]
        psi: Option<String>,
        #[command(flatten)]
        grids: GridArgs,
        /// force CSV output
        #[arg(long)]
        batch: bool,
    },
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    pair: PathBuf,
    #[arg(long)]
    exponents: String,
    #[command(flatten)]
    grids: GridArgs,
    #[arg(long)]
    family: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum NormsCmd {
    /// Lower bound for one operator norm over a test family
    Estimate {
        #[arg(long, value_enum)]
        op: OpName,
        #[arg(long)]
        weak: bool,
        #[arg(long)]
        young: Option<String>,
        #[command(flatten)]
        common: PairArgs,
    },
    /// Riesz against fractional maximal norms, with the outer testing chain
    Equiv {
        #[command(flatten)]
        common: PairArgs,
    },
    /// Bump constants against the norm estimates they bound
    Bumps {
        #[arg(long)]
        young: String,
        #[arg(long)]
        psi: String,
        /// also estimate the Orlicz maximal norms directly
        #[arg(long)]
        direct: bool,
        #[command(flatten)]
        common: PairArgs,
    },
    /// A_p and A_infinity factors of a classical pair against its norms
    Logcheck {
        /// weight w as SampledFunction JSON
        #[arg(long)]
        weight: PathBuf,
        #[arg(long)]
        exponents: String,
        #[command(flatten)]
        grids: GridArgs,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExamplesCmd {
    /// Pair whose maximal integral grows like log X
    Case1 {
        #[arg(long, default_value = "1,1/4,8/7,2")]
        exponents: String,
        #[arg(long, default_value_t = 64)]
        window: i64,
        #[arg(long, default_value_t = 3)]
        refinement: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Divergence of S(X) and the factored pair built on E
    Case2 {
        #[arg(long, default_value = "1/2")]
        gamma: String,
        #[arg(long, default_value_t = 4096)]
        window: i64,
        #[arg(long, default_value_t = 10_000)]
        minorant_to: u64,
        /// window for the emitted weight pair
        #[arg(long, default_value_t = 64)]
        pair_window: i64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Factored pair from two weights
    Factored {
        #[arg(long)]
        w1: PathBuf,
        #[arg(long)]
        w2: PathBuf,
        #[arg(long)]
        exponents: String,
        #[command(flatten)]
        grids: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classical pair u = w^q, sigma = w^(-p')
    Classical {
        #[arg(long)]
        weight: PathBuf,
        #[arg(long)]
        exponents: String,
        #[command(flatten)]
        grids: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_function(p: &Path) -> Result<SampledFunction> {
    let s = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    SampledFunction::from_json(&s).with_context(|| format!("parsing {}", p.display()))
}

fn read_pair(p: &Path) -> Result<WeightPair> {
    let s = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    let pair: WeightPair = serde_json::from_str(&s).with_context(|| format!("parsing {}", p.display()))?;
    pair.u.mesh().ensure_same(pair.sigma.mesh())?;
    Ok(pair)
}

fn read_family(p: &Option<PathBuf>) -> Result<TestFamily> {
    match p {
        None => Ok(TestFamily::default()),
        Some(p) => Ok(serde_json::from_str(&fs::read_to_string(p)?)?),
    }
}

fn ratio(s: &str) -> Result<f64> {
    Ok(dyadic_lab::rational::to_f64(&dyadic_lab::rational::parse(s)?))
}

fn emit(value: &Value, out: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn write_json(dir: &Path, name: &str, v: &impl serde::Serialize) -> Result<()> {
    fs::write(dir.join(name), serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Ops(a) => cmd_ops(a).map(|_| true),
        Cmd::Sparse(c) => cmd_sparse(c),
        Cmd::Orlicz(a) => cmd_orlicz(a).map(|_| true),
        Cmd::Constants(c) => cmd_constants(c).map(|_| true),
        Cmd::Norms(c) => cmd_norms(c).map(|_| true),
        Cmd::Examples(c) => cmd_examples(c).map(|_| true),
    }
}

fn cmd_run(a: RunArgs) -> Result<bool> {
    let mut config = match &a.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => RunConfig::default(),
    };
    if !a.suite.is_empty() {
        config.suites = a.suite.clone();
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(g) = a.gamma {
        config.counterexample.gamma = g;
    }
    if let Some(w) = a.window {
        config.counterexample.window = w;
    }
    let report = run_suite(&config, a.workers)?;
    write_artifacts(&report, &a.out)?;
    for s in &report.suites {
        for c in &s.checks {
            let tag = match (c.hard, c.passed) {
                (_, true) => "PASS",
                (true, false) => "FAIL",
                (false, false) => "NOTE",
            };
            println!("{tag} {}/{}: {}", s.suite, c.name, c.detail);
        }
    }
    println!("{} hard failures; artifacts in {}", report.hard_failures, a.out.display());
    Ok(report.passed)
}

fn apply_op(
    name: OpName,
    f: &SampledFunction,
    alpha: f64,
    weight: Option<&SampledFunction>,
    young: Option<&YoungFunction>,
    grids: &[GridFamily],
) -> Result<dyadic_lab::operators::OpResult> {
    let need_w = || weight.ok_or_else(|| anyhow!("this operator needs --weight"));
    Ok(match name {
        OpName::FracMaximal => frac_maximal(f, alpha, grids)?,
        OpName::DyadicFracMaximal => dyadic_frac_maximal(f, alpha, &grids[0])?,
        OpName::Riesz => riesz_potential_1d(f, alpha)?,
        OpName::DyadicRiesz => dyadic_riesz(f, alpha, &grids[0])?,
        OpName::DyadicRieszMax => dyadic_riesz_max(f, alpha, grids)?,
        OpName::WeightedDyadicMaximal => weighted_dyadic_maximal(f, alpha, need_w()?, &grids[0])?,
        OpName::GeometricMaximal => geometric_maximal(f, &grids[0])?,
        OpName::OrliczMaximal => orlicz_maximal(f, alpha, young.ok_or_else(|| anyhow!("orlicz-maximal needs --young"))?, grids)?,
        OpName::BilinearMaximal => bilinear_maximal(f, need_w()?, alpha, grids)?,
    })
}

fn cmd_ops(a: OpsArgs) -> Result<()> {
    let f = read_function(&a.function)?;
    let grids = a.grids.build(&f)?;
    let w = a.weight.as_deref().map(read_function).transpose()?;
    let y = a.young.as_deref().map(str::parse::<YoungFunction>).transpose()?;
    let r = apply_op(a.name, &f, ratio(&a.alpha)?, w.as_ref(), y.as_ref(), &grids)?;
    emit(&serde_json::to_value(&r)?, &a.out)
}

fn cmd_sparse(c: SparseCmd) -> Result<bool> {
    match c {
        SparseCmd::Build { function, alpha, ratio: r, grids, out } => {
            let f = read_function(&function)?;
            let gs = grids.build(&f)?;
            let s = build_sparse(&f, ratio(&alpha)?, &gs[0], r.unwrap_or(default_ratio(f.dim())))?;
            emit(&serde_json::to_value(&s)?, &out)?;
            Ok(true)
        }
        SparseCmd::Verify { family, function } => {
            let s = SparseFamily::from_json(&fs::read_to_string(&family)?)?;
            let v = verify_sparse(&s)?;
            let mut ok = v.all_thick && v.disjoint && v.masks_inside_cubes;
            let mut out = json!({ "sparsity": v });
            if let Some(p) = function {
                let f = read_function(&p)?;
                let shift: Vec<bool> = s.grid.shift.iter().map(|&b| b == 1).collect();
                let g = GridFamily::new(&shift, s.grid.min_level, s.grid.max_level, s.window.clone())?;
                let d = domination_check(&f, &s, &g)?;
                ok &= d.violations == 0;
                out["domination"] = serde_json::to_value(d)?;
            }
            emit(&out, &None)?;
            Ok(ok)
        }
        SparseCmd::Apply { family, function, out } => {
            let s = SparseFamily::from_json(&fs::read_to_string(&family)?)?;
            let f = read_function(&function)?;
            emit(&serde_json::to_value(sparse_operator(&f, &s, s.alpha)?)?, &out)?;
            Ok(true)
        }
    }
}

fn cmd_orlicz(a: OrliczArgs) -> Result<()> {
    let y: YoungFunction = a.young.parse()?;
    y.validate()?;
    let y = if a.associate { y.associate() } else { y };
    let mode = match &a.q {
        Some(q) => BpMode::Fractional { q: ratio(q)? },
        None => BpMode::Classical,
    };
    emit(&serde_json::to_value(bp_classify(&y, ratio(&a.p)?, mode)?)?, &None)
}

fn compute_constant(
    which: ConstantName,
    pair: &WeightPair,
    e: &ExponentTuple,
    young: Option<&YoungFunction>,
    psi: Option<&YoungFunction>,
    grids: &[GridFamily],
) -> Result<ConstantReport> {
    let phi = || young.ok_or_else(|| anyhow!("bump constants need --young"));
    Ok(match which {
        ConstantName::Apq => apq_alpha_constant(pair, e, grids)?,
        ConstantName::AinftyExpU => ainfty_exp(&pair.u, grids)?,
        ConstantName::AinftyExpSigma => ainfty_exp(&pair.sigma, grids)?,
        ConstantName::AinftyMU => ainfty_m(&pair.u, grids)?,
        ConstantName::AinftyMSigma => ainfty_m(&pair.sigma, grids)?,
        ConstantName::ApU => ap_constant(&pair.u, e.s_p_f(), grids)?,
        ConstantName::ApSigma => ap_constant(&pair.sigma, e.s_q_prime_f(), grids)?,
        ConstantName::MixedExp => mixed_one_sup(pair, e, grids, MixedFlavor::ApqExp)?,
        ConstantName::Bump => apq_bump(pair, e, phi()?, grids, &BumpSide::Second)?,
        ConstantName::DoubleBump => {
            let psi = psi.ok_or_else(|| anyhow!("double-bump needs --psi"))?.clone();
            apq_bump(pair, e, phi()?, grids, &BumpSide::Both { psi })?
        }
        ConstantName::OuterTesting => outer_testing_constant(pair, e, grids)?,
        ConstantName::SawyerForward => sawyer_maximal_testing(pair, e, grids, TestingSide::Forward)?,
        ConstantName::SawyerDual => sawyer_maximal_testing(pair, e, grids, TestingSide::Dual)?,
        ConstantName::MdSp => md_sp_testing(pair, e, grids)?,
    })
}

fn cmd_constants(c: ConstantsCmd) -> Result<()> {
    let ConstantsCmd::Compute { which, pair, exponents, young, psi, grids, batch } = c;
    let pair = read_pair(&pair)?;
    let e = ExponentTuple::parse_list(&exponents)?;
    let gs = grids.build(&pair.u)?;
    let young = young.as_deref().map(str::parse::<YoungFunction>).transpose()?;
    let psi = psi.as_deref().map(str::parse::<YoungFunction>).transpose()?;
    if which.is_empty() {
        bail!("--which needs at least one constant");
    }
    let reports = which
        .iter()
        .map(|w| compute_constant(*w, &pair, &e, young.as_ref(), psi.as_ref(), &gs))
        .collect::<Result<Vec<_>>>()?;
    if batch || reports.len() > 1 {
        println!("name,value,argmax");
        for r in &reports {
            println!("{},{},{}", r.name, r.value, r.argmax.map(|q| q.to_string()).unwrap_or_default());
        }
        Ok(())
    } else {
        emit(&serde_json::to_value(&reports[0])?, &None)
    }
}

fn norm_operator(name: OpName, alpha: f64, young: Option<YoungFunction>, e: &ExponentTuple) -> Result<NormOperator> {
    Ok(match name {
        OpName::FracMaximal => NormOperator::FracMaximal { alpha },
        OpName::DyadicFracMaximal => NormOperator::DyadicFracMaximal { alpha, grid: 0 },
        OpName::Riesz | OpName::DyadicRieszMax => NormOperator::Riesz { alpha },
        OpName::DyadicRiesz => NormOperator::DyadicRiesz { alpha, grid: 0 },
        OpName::WeightedDyadicMaximal => NormOperator::WeightedDyadicMaximal { beta: e.beta_f(), grid: 0 },
        OpName::GeometricMaximal => NormOperator::GeometricMaximal { grid: 0 },
        OpName::OrliczMaximal => NormOperator::OrliczMaximal { alpha, phi: young.ok_or_else(|| anyhow!("orlicz-maximal needs --young"))? },
        OpName::BilinearMaximal => bail!("bilinear-maximal has no linear norm"),
    })
}

fn cmd_norms(c: NormsCmd) -> Result<()> {
    match c {
        NormsCmd::Estimate { op, weak, young, common } => {
            let pair = read_pair(&common.pair)?;
            let e = ExponentTuple::parse_list(&common.exponents)?;
            let gs = common.grids.build(&pair.u)?;
            let fam = read_family(&common.family)?;
            let young = young.as_deref().map(str::parse::<YoungFunction>).transpose()?;
            let op = norm_operator(op, e.alpha_f(), young, &e)?;
            let kind = if weak { NormKind::Weak } else { NormKind::Strong };
            let est = estimate_norm(&op, kind, &pair, &e, &gs, &fam)?;
            emit(&json!({ "exponents": e, "family": fam, "estimate": est }), &common.out)
        }
        NormsCmd::Equiv { common } => {
            let pair = read_pair(&common.pair)?;
            let e = ExponentTuple::parse_list(&common.exponents)?;
            let gs = common.grids.build(&pair.u)?;
            let fam = read_family(&common.family)?;
            let r = equivalence_report(&pair, &e, &gs, &fam)?;
            emit(&json!({ "family": fam, "report": r }), &common.out)
        }
        NormsCmd::Bumps { young, psi, direct, common } => {
            let pair = read_pair(&common.pair)?;
            let e = ExponentTuple::parse_list(&common.exponents)?;
            let gs = common.grids.build(&pair.u)?;
            let fam = read_family(&common.family)?;
            let r = bump_bound_check(&pair, &e, &young.parse()?, &psi.parse()?, &gs, &fam, direct)?;
            emit(&json!({ "family": fam, "report": r }), &common.out)
        }
        NormsCmd::Logcheck { weight, exponents, grids, family, out } => {
            let w = read_function(&weight)?;
            let e = ExponentTuple::parse_list(&exponents)?;
            let gs = grids.build(&w)?;
            let fam = read_family(&family)?;
            let r = log_ainfty_check(&w, &e, &gs, &fam)?;
            emit(&json!({ "family": fam, "report": r }), &out)
        }
    }
}

fn cmd_examples(c: ExamplesCmd) -> Result<()> {
    match c {
        ExamplesCmd::Case1 { exponents, window, refinement, out } => {
            let e = ExponentTuple::parse_list(&exponents)?;
            let levels = -((window as f64).log2().ceil() as i32) - 2;
            let c1 = case1_pair(&e, window, refinement, levels)?;
            fs::create_dir_all(&out)?;
            write_json(&out, "pair.json", &c1.pair)?;
            let mut csv = String::from("x,log_identity,maximal_integral\n");
            for (x, m, i) in &c1.growth {
                csv.push_str(&format!("{x},{m},{i}\n"));
            }
            fs::write(out.join("growth.csv"), csv)?;
        }
        ExamplesCmd::Case2 { gamma, window, minorant_to, pair_window, out } => {
            let e = ExponentTuple::parse(1, &gamma, "2", "2")?;
            let doublings = (window as f64).log2().floor() as u32;
            let r = case2_divergence(&e, doublings, minorant_to)?;
            let levels = -((pair_window as f64).log2().ceil() as i32) - 2;
            let (pair, grids) = case2_pair(&e, pair_window, e_refinement(e.gamma_f(), pair_window), levels)?;
            let apq = apq_alpha_constant(&pair, &e, &grids)?;
            fs::create_dir_all(&out)?;
            write_json(&out, "pair.json", &pair)?;
            write_json(&out, "report.json", &json!({ "divergence": r, "pair_constant": apq }))?;
            let mut csv = String::from("x,s,h\n");
            for (x, s, h) in &r.points {
                csv.push_str(&format!("{x},{s},{h}\n"));
            }
            fs::write(out.join("growth.csv"), csv)?;
        }
        ExamplesCmd::Factored { w1, w2, exponents, grids, out } => {
            let (w1, w2) = (read_function(&w1)?, read_function(&w2)?);
            let e = ExponentTuple::parse_list(&exponents)?;
            let gs = grids.build(&w1)?;
            let pair = factored_pair(&w1, &w2, &e, &gs)?;
            let apq = apq_alpha_constant(&pair, &e, &gs)?;
            fs::create_dir_all(&out)?;
            write_json(&out, "pair.json", &pair)?;
            fs::write(out.join("constants.csv"), format!("name,value,argmax\n{},{},{}\n", apq.name, apq.value, apq.argmax.map(|q| q.to_string()).unwrap_or_default()))?;
        }
        ExamplesCmd::Classical { weight, exponents, grids, out } => {
            let w = read_function(&weight)?;
            let e = ExponentTuple::parse_list(&exponents)?;
            let gs = grids.build(&w)?;
            let pair = classical_pair(&w, &e)?;
            let apq = apq_alpha_constant(&pair, &e, &gs)?;
            let wq = w.map(|v| v.powf(e.q_f()))?;
            let ap = ap_constant(&wq, e.s_p_f(), &gs)?;
            fs::create_dir_all(&out)?;
            write_json(&out, "pair.json", &pair)?;
            let mut csv = String::from("name,value,argmax\n");
            for r in [&apq, &ap] {
                csv.push_str(&format!("{},{},{}\n", r.name, r.value, r.argmax.map(|q| q.to_string()).unwrap_or_default()));
            }
            fs::write(out.join("constants.csv"), csv)?;
        }
    }
    Ok(())
}
