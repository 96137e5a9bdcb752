//! Weight and testing constants as maxima over enumerated cube families.
//!
//! Weights are only known on the window, so every supremum here runs over
//! the family cubes contained in the window. Values are lower bounds for the
//! corresponding suprema over all cubes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::func::{CellRange, ExponentTuple, Mesh, SampledFunction};
use crate::grid::{DyadicCube, GridFamily};
use crate::operators::GridSummary;
use crate::orlicz::{luxemburg_values, YoungFunction};
use crate::scan::{CubeScan, Prefix, ScannedCube};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightPair {
    pub u: SampledFunction,
    pub sigma: SampledFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl WeightPair {
    pub fn new(u: SampledFunction, sigma: SampledFunction) -> Result<Self> {
        u.mesh().ensure_same(sigma.mesh())?;
        Ok(Self { u, sigma, provenance: None })
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = Some(p.into());
        self
    }

    /// `u = w^q`, `σ = w^{−p′}`
    pub fn classical(w: &SampledFunction, e: &ExponentTuple) -> Result<Self> {
        if w.values().iter().any(|&v| v <= 0.0) {
            return Err(LabError::InvalidFunction("classical pair needs w > 0".into()));
        }
        let (q, pp) = (e.q_f(), e.p_prime_f());
        Ok(Self::new(w.map(|v| v.powf(q))?, w.map(|v| v.powf(-pp))?)?.with_provenance("classical"))
    }

    pub fn swapped(&self) -> Self {
        Self { u: self.sigma.clone(), sigma: self.u.clone(), provenance: self.provenance.clone() }
    }

    pub fn mesh(&self) -> &Mesh {
        self.u.mesh()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub name: String,
    pub value: f64,
    pub argmax: Option<DyadicCube>,
    pub grids: Vec<GridSummary>,
    pub cubes_scored: usize,
    /// cubes with a vanishing denominator measure
    pub cubes_skipped: usize,
    /// maximum over a finite family, hence a lower bound for the true supremum
    pub lower_bound: bool,
}

/// Per-grid scans of the whole window.
pub struct Family {
    mesh: Mesh,
    grids: Vec<GridFamily>,
    scans: Vec<CubeScan>,
}

impl Family {
    pub fn new(mesh: &Mesh, grids: &[GridFamily]) -> Result<Self> {
        if grids.is_empty() {
            return Err(LabError::EmptyGrid);
        }
        let scans = grids.iter().map(|g| CubeScan::new(mesh, g)).collect::<Result<Vec<_>>>()?;
        Ok(Self { mesh: *mesh, grids: grids.to_vec(), scans })
    }

    pub fn integrals(&self, values: &[f64]) -> Vec<Vec<Vec<f64>>> {
        self.scans.iter().map(|s| s.integrals(values)).collect()
    }

    /// `max` of `score` over contained family cubes; `None` scores are skipped.
    /// Ties go to the smallest cube in `(level, index, shift)` order.
    pub fn sup<F>(&self, name: &str, score: F) -> ConstantReport
    where
        F: Fn(usize, usize, usize, &ScannedCube) -> Option<f64> + Sync,
    {
        let mut cands = Vec::new();
        for (gi, s) in self.scans.iter().enumerate() {
            for (li, lv) in s.levels.iter().enumerate() {
                for (ci, c) in lv.cubes.iter().enumerate() {
                    if c.in_family && c.cells.contained {
                        cands.push((gi, li, ci, c));
                    }
                }
            }
        }
        let scored: Vec<(Option<f64>, DyadicCube)> =
            cands.par_iter().map(|&(gi, li, ci, c)| (score(gi, li, ci, c).filter(|v| !v.is_nan()), c.cube)).collect();
        let mut best: Option<(f64, DyadicCube)> = None;
        let mut skipped = 0;
        for (v, q) in &scored {
            match v {
                None => skipped += 1,
                Some(v) => {
                    let better = match best {
                        None => true,
                        Some((bv, bq)) => *v > bv || (*v == bv && *q < bq),
                    };
                    if better {
                        best = Some((*v, *q));
                    }
                }
            }
        }
        ConstantReport {
            name: name.into(),
            value: best.map_or(0.0, |b| b.0),
            argmax: best.map(|b| b.1),
            grids: self.grids.iter().map(GridSummary::from).collect(),
            cubes_scored: scored.len() - skipped,
            cubes_skipped: skipped,
            lower_bound: true,
        }
    }

    /// `M_α(wχ_Q)` on the cells of `q`, over every family grid or only grid `only`.
    fn local_maximal(&self, prefix: &Prefix, q: &CellRange, alpha: f64, only: Option<usize>) -> Vec<f64> {
        let mesh = &self.mesh;
        let n = mesh.dim() as f64;
        let dv = mesh.cell_volume();
        q.flat_indices(mesh)
            .map(|idx| {
                let mut best = 0.0f64;
                for (gi, scan) in self.scans.iter().enumerate() {
                    if only.is_some_and(|o| o != gi) {
                        continue;
                    }
                    for (li, lv) in scan.levels.iter().enumerate() {
                        let p = &lv.cubes[scan.locate(li, idx)];
                        if !p.in_family {
                            continue;
                        }
                        let mut r = p.cells;
                        for a in 0..mesh.dim() {
                            r.lo[a] = r.lo[a].max(q.lo[a]);
                            r.hi[a] = r.hi[a].min(q.hi[a]);
                        }
                        let v = p.volume.powf(alpha / n - 1.0) * prefix.sum(&r) * dv;
                        best = best.max(v);
                    }
                }
                best
            })
            .collect()
    }
}

fn cube_values<'a>(f: &'a SampledFunction, r: &'a CellRange) -> impl Iterator<Item = f64> + 'a {
    r.flat_indices(f.mesh()).map(move |i| f.values()[i])
}

fn inv(x: f64) -> f64 {
    1.0 / x
}

/// `|Q|^{α/n+1/q−1/p} (⨍_Q u)^{1/q} (⨍_Q σ)^{1/p′}`
pub fn apq_alpha(pair: &WeightPair, e: &ExponentTuple, q: &DyadicCube) -> Result<f64> {
    let s = crate::rational::to_f64(&e.scale_exponent());
    Ok(q.volume().powf(s) * pair.u.average(q)?.powf(inv(e.q_f())) * pair.sigma.average(q)?.powf(inv(e.p_prime_f())))
}

fn apq_from_integrals(vol: f64, iu: f64, is: f64, e: &ExponentTuple) -> f64 {
    let s = crate::rational::to_f64(&e.scale_exponent());
    vol.powf(s) * (iu / vol).powf(inv(e.q_f())) * (is / vol).powf(inv(e.p_prime_f()))
}

/// `[u,σ]_{A^α_{p,q}}`
pub fn apq_alpha_constant(pair: &WeightPair, e: &ExponentTuple, grids: &[GridFamily]) -> Result<ConstantReport> {
    let fam = Family::new(pair.mesh(), grids)?;
    let iu = fam.integrals(pair.u.values());
    let is = fam.integrals(pair.sigma.values());
    Ok(fam.sup("apq_alpha", |g, l, c, sc| Some(apq_from_integrals(sc.volume, iu[g][l][c], is[g][l][c], e))))
}

/// Per-cube `(⨍_Q w) exp(−⨍_Q log w)`; `None` when `w = 0` on `Q`.
fn ainfty_exp_cube(iw: f64, ilog: f64, zeros: f64, vol: f64) -> Option<f64> {
    if iw <= 0.0 {
        None
    } else if zeros > 0.0 {
        Some(f64::INFINITY)
    } else {
        Some(iw / vol * (-ilog / vol).exp())
    }
}

struct LogData {
    logs: Vec<Vec<Vec<f64>>>,
    zeros: Vec<Vec<Vec<f64>>>,
}

fn log_data(fam: &Family, w: &SampledFunction) -> LogData {
    let logs: Vec<f64> = w.values().iter().map(|&v| if v > 0.0 { v.ln() } else { 0.0 }).collect();
    let zeros: Vec<f64> = w.values().iter().map(|&v| (v <= 0.0) as u8 as f64).collect();
    LogData { logs: fam.integrals(&logs), zeros: fam.integrals(&zeros) }
}

/// `[w]_{A_∞^{exp}} = sup_Q (⨍_Q w) exp(−⨍_Q log w)`
pub fn ainfty_exp(w: &SampledFunction, grids: &[GridFamily]) -> Result<ConstantReport> {
    let fam = Family::new(w.mesh(), grids)?;
    let iw = fam.integrals(w.values());
    let ld = log_data(&fam, w);
    Ok(fam.sup("ainfty_exp", |g, l, c, sc| {
        ainfty_exp_cube(iw[g][l][c], ld.logs[g][l][c], ld.zeros[g][l][c], sc.volume)
    }))
}

fn ainfty_m_cube(fam: &Family, prefix: &Prefix, sc: &ScannedCube, iw: f64) -> Option<f64> {
    if iw <= 0.0 {
        return None;
    }
    let m = fam.local_maximal(prefix, &sc.cells, 0.0, None);
    Some(m.iter().sum::<f64>() * fam.mesh.cell_volume() / iw)
}

/// `[w]_{A_∞^M} = sup_Q w(Q)^{−1} ∫_Q M(wχ_Q)`, `M` over the family grids.
pub fn ainfty_m(w: &SampledFunction, grids: &[GridFamily]) -> Result<ConstantReport> {
    let fam = Family::new(w.mesh(), grids)?;
    let iw = fam.integrals(w.values());
    let prefix = Prefix::new(w.mesh(), w.values());
    Ok(fam.sup("ainfty_m", |g, l, c, sc| ainfty_m_cube(&fam, &prefix, sc, iw[g][l][c])))
}

/// `[w]_{A_p} = sup_Q ⨍_Q w (⨍_Q w^{1−p′})^{p−1}`
pub fn ap_constant(w: &SampledFunction, p: f64, grids: &[GridFamily]) -> Result<ConstantReport> {
    if !(p > 1.0) {
        return Err(LabError::Precondition(format!("A_p needs p > 1, got {p}")));
    }
    let fam = Family::new(w.mesh(), grids)?;
    let pp = p / (p - 1.0);
    let dual: Vec<f64> = w.values().iter().map(|&v| if v > 0.0 { v.powf(1.0 - pp) } else { f64::INFINITY }).collect();
    let zeros: Vec<f64> = w.values().iter().map(|&v| (v <= 0.0) as u8 as f64).collect();
    let dual: Vec<f64> = dual.iter().map(|v| if v.is_finite() { *v } else { 0.0 }).collect();
    let iw = fam.integrals(w.values());
    let id = fam.integrals(&dual);
    let iz = fam.integrals(&zeros);
    Ok(fam.sup("ap", |g, l, c, sc| {
        if iz[g][l][c] > 0.0 {
            return Some(f64::INFINITY);
        }
        Some(iw[g][l][c] / sc.volume * (id[g][l][c] / sc.volume).powf(p - 1.0))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "kebab-case")]
pub enum MixedFlavor {
    /// `sup_Q A^α_{p,q}(u,σ,Q) A_∞^{exp}(σ,Q)^{1/q}`
    ApqExp,
    /// `sup_Q A_p(u,Q)^β A_∞^M(u,Q)^γ`, with the pair's `u` as the weight
    ApAinfM { p: f64, beta: f64, gamma: f64 },
}

pub fn mixed_one_sup(pair: &WeightPair, e: &ExponentTuple, grids: &[GridFamily], flavor: MixedFlavor) -> Result<ConstantReport> {
    match flavor {
        MixedFlavor::ApqExp => {
            let fam = Family::new(pair.mesh(), grids)?;
            let iu = fam.integrals(pair.u.values());
            let is = fam.integrals(pair.sigma.values());
            let ld = log_data(&fam, &pair.sigma);
            Ok(fam.sup("mixed_apq_exp", |g, l, c, sc| {
                let a = apq_from_integrals(sc.volume, iu[g][l][c], is[g][l][c], e);
                let x = ainfty_exp_cube(is[g][l][c], ld.logs[g][l][c], ld.zeros[g][l][c], sc.volume)?;
                Some(a * x.powf(inv(e.q_f())))
            }))
        }
        MixedFlavor::ApAinfM { p, beta, gamma } => ap_ainfm_one_sup(&pair.u, p, beta, gamma, grids),
    }
}

/// `[w]_{(A_p)^β (A_∞^M)^γ} = sup_Q A_p(w,Q)^β A_∞^M(w,Q)^γ`
pub fn ap_ainfm_one_sup(w: &SampledFunction, p: f64, beta: f64, gamma: f64, grids: &[GridFamily]) -> Result<ConstantReport> {
    if !(p > 1.0) {
        return Err(LabError::Precondition(format!("A_p needs p > 1, got {p}")));
    }
    if w.values().iter().any(|&v| v <= 0.0) {
        return Err(LabError::InvalidFunction("A_p one-sup constant needs w > 0".into()));
    }
    let fam = Family::new(w.mesh(), grids)?;
    let pp = p / (p - 1.0);
    let dual: Vec<f64> = w.values().iter().map(|&v| v.powf(1.0 - pp)).collect();
    let iw = fam.integrals(w.values());
    let id = fam.integrals(&dual);
    let prefix = Prefix::new(w.mesh(), w.values());
    Ok(fam.sup("ap_ainfm_one_sup", |g, l, c, sc| {
        let ap = iw[g][l][c] / sc.volume * (id[g][l][c] / sc.volume).powf(p - 1.0);
        let am = ainfty_m_cube(&fam, &prefix, sc, iw[g][l][c])?;
        Some(ap.powf(beta) * am.powf(gamma))
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "side", rename_all = "kebab-case")]
pub enum BumpSide {
    /// `(⨍u)^{1/q} ‖σ^{1/p′}‖_{Φ,Q}`
    Second,
    /// `‖u^{1/q}‖_{Ψ,Q} ‖σ^{1/p′}‖_{Φ,Q}`
    Both { psi: YoungFunction },
}

/// `[u,σ]_{A^α_{p,q,Φ}}` and the double-bump variant.
pub fn apq_bump(
    pair: &WeightPair,
    e: &ExponentTuple,
    phi: &YoungFunction,
    grids: &[GridFamily],
    side: &BumpSide,
) -> Result<ConstantReport> {
    let fam = Family::new(pair.mesh(), grids)?;
    let mesh = *pair.mesh();
    let dv = mesh.cell_volume();
    let s = crate::rational::to_f64(&e.scale_exponent());
    let (q, pp) = (e.q_f(), e.p_prime_f());
    let sig = pair.sigma.map(|v| v.powf(inv(pp)))?;
    let uq = pair.u.map(|v| v.powf(inv(q)))?;
    let iu = fam.integrals(pair.u.values());
    let failure = std::sync::Mutex::new(None);
    let record = |r: Result<f64>| match r {
        Ok(v) => Some(v),
        Err(err) => {
            failure.lock().unwrap().get_or_insert(err);
            None
        }
    };
    let name = match side {
        BumpSide::Second => "apq_bump",
        BumpSide::Both { .. } => "apq_double_bump",
    };
    let rep = fam.sup(name, |g, l, c, sc| {
        let sv: Vec<f64> = cube_values(&sig, &sc.cells).collect();
        let right = record(luxemburg_values(&sv, dv, sc.volume, phi))?;
        let left = match side {
            BumpSide::Second => (iu[g][l][c] / sc.volume).powf(inv(q)),
            BumpSide::Both { psi } => {
                let uv: Vec<f64> = cube_values(&uq, &sc.cells).collect();
                record(luxemburg_values(&uv, dv, sc.volume, psi))?
            }
        };
        Some(sc.volume.powf(s) * left * right)
    });
    match failure.into_inner().unwrap() {
        Some(err) => Err(err),
        None => Ok(rep),
    }
}

/// `[u,σ]_{I_α^{out},p,q} = sup_{Q_0} (∫ I_α^{Q_0}(σχ_{Q_0})^q u)^{1/q} σ(Q_0)^{−1/p}`.
///
/// Uses the shell values `(1−2^{α−n})^{−1}|Q_j|^{α/n−1}σ(Q_0)` on `Q_j \ Q_{j−1}`.
pub fn outer_testing_constant(pair: &WeightPair, e: &ExponentTuple, grids: &[GridFamily]) -> Result<ConstantReport> {
    let fam = Family::new(pair.mesh(), grids)?;
    let mesh = *pair.mesh();
    let n = mesh.dim() as f64;
    let alpha = e.alpha_f();
    if !(alpha > 0.0) {
        return Err(LabError::Precondition("outer Riesz testing needs alpha > 0".into()));
    }
    let (p, q) = (e.p_f(), e.q_f());
    let c = 1.0 / (1.0 - 2f64.powf(alpha - n));
    let is = fam.integrals(pair.sigma.values());
    let pu = Prefix::new(&mesh, pair.u.values());
    let dv = mesh.cell_volume();
    let full = |r: &CellRange| (0..mesh.dim()).all(|a| r.lo[a] == 0 && r.hi[a] == mesh.cells_per_axis());
    Ok(fam.sup("outer_testing", |g, l, ci, sc| {
        let sq = is[g][l][ci];
        if sq <= 0.0 {
            return None;
        }
        let mut total = 0.0;
        let mut inner = 0.0;
        let mut cube = sc.cube;
        let mut cells = sc.cells;
        for _ in 0..=64 {
            let uq = pu.sum(&cells) * dv;
            total += (c * cube.volume().powf(alpha / n - 1.0) * sq).powf(q) * (uq - inner);
            inner = uq;
            if full(&cells) {
                break;
            }
            cube = cube.parent();
            cells = mesh.cube_cells(&cube).ok()??;
        }
        Some(total.max(0.0).powf(inv(q)) * sq.powf(-inv(p)))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestingSide {
    /// `sup_Q (∫_Q M_α(σχ_Q)^q u)^{1/q} σ(Q)^{−1/p}`
    Forward,
    /// `sup_Q (∫_Q M_α(uχ_Q)^{p′} σ)^{1/p′} u(Q)^{−1/q′}`
    Dual,
}

/// Sawyer testing constants for `M_α`, maximal function over the family grids.
pub fn sawyer_maximal_testing(pair: &WeightPair, e: &ExponentTuple, grids: &[GridFamily], which: TestingSide) -> Result<ConstantReport> {
    let fam = Family::new(pair.mesh(), grids)?;
    let (inw, outw, r, s, name) = match which {
        TestingSide::Forward => (&pair.sigma, &pair.u, e.q_f(), e.p_f(), "sawyer_forward"),
        TestingSide::Dual => (&pair.u, &pair.sigma, e.p_prime_f(), e.q_prime_f(), "sawyer_dual"),
    };
    let iin = fam.integrals(inw.values());
    let prefix = Prefix::new(inw.mesh(), inw.values());
    let dv = fam.mesh.cell_volume();
    let alpha = e.alpha_f();
    Ok(fam.sup(name, |g, l, c, sc| {
        let m = iin[g][l][c];
        if m <= 0.0 {
            return None;
        }
        let mx = fam.local_maximal(&prefix, &sc.cells, alpha, None);
        let integral: f64 = mx.iter().zip(cube_values(outw, &sc.cells)).map(|(a, w)| a.powf(r) * w).sum::<f64>() * dv;
        Some(integral.powf(inv(r)) * m.powf(-inv(s)))
    }))
}

/// `[u,σ]_{M^D,s(p)} = sup_R (∫_R M^D(σχ_R)^{s(p)} u)^{1/q} σ(R)^{−1/q}`, `M^D` in `R`'s grid.
pub fn md_sp_testing(pair: &WeightPair, e: &ExponentTuple, grids: &[GridFamily]) -> Result<ConstantReport> {
    if !e.is_sobolev() {
        return Err(LabError::InvalidExponents("the M^D, s(p) testing constant needs Sobolev exponents".into()));
    }
    let fam = Family::new(pair.mesh(), grids)?;
    let is = fam.integrals(pair.sigma.values());
    let prefix = Prefix::new(pair.mesh(), pair.sigma.values());
    let dv = fam.mesh.cell_volume();
    let (sp, q) = (e.s_p_f(), e.q_f());
    Ok(fam.sup("md_sp_testing", |g, l, c, sc| {
        let m = is[g][l][c];
        if m <= 0.0 {
            return None;
        }
        let mx = fam.local_maximal(&prefix, &sc.cells, 0.0, Some(g));
        let integral: f64 = mx.iter().zip(cube_values(&pair.u, &sc.cells)).map(|(a, w)| a.powf(sp) * w).sum::<f64>() * dv;
        Some(integral.powf(inv(q)) * m.powf(-inv(q)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::shifted_grids;

    fn setup(dim: usize, l: u32) -> (Mesh, Vec<GridFamily>) {
        let mesh = Mesh::unit(dim, l).unwrap();
        let grids = shifted_grids(dim, &mesh.window(), 0, l as i32).unwrap();
        (mesh, grids)
    }

    #[test]
    fn unit_weights() {
        let (mesh, grids) = setup(1, 3);
        let one = SampledFunction::constant(mesh, 1.0).unwrap();
        let pair = WeightPair::new(one.clone(), one.clone()).unwrap();
        let e = ExponentTuple::parse(1, "1/2", "3/2", "6").unwrap();
        assert!(e.is_sobolev());
        let root = DyadicCube::new1(0, 0, false);
        assert!((apq_alpha(&pair, &e, &root).unwrap() - 1.0).abs() < 1e-15);
        let a = apq_alpha_constant(&pair, &e, &grids).unwrap();
        assert!((a.value - 1.0).abs() < 1e-14);
        assert_eq!(a.argmax, Some(root));
        assert!((ainfty_exp(&one, &grids).unwrap().value - 1.0).abs() < 1e-14);
        assert!((ap_constant(&one, 2.0, &grids).unwrap().value - 1.0).abs() < 1e-14);
        assert!(ainfty_m(&one, &grids).unwrap().value >= 1.0 - 1e-14);
    }

    #[test]
    fn two_valued_exp_constant() {
        let (mesh, grids) = setup(1, 2);
        let t: f64 = 9.0;
        let w = SampledFunction::from_fn(mesh, |x| if x[0] < 0.5 { 1.0 } else { t }).unwrap();
        let root = DyadicCube::new1(0, 0, false);
        let only_root = vec![GridFamily::new(&[false], 0, 0, mesh.window()).unwrap()];
        let v = ainfty_exp(&w, &only_root).unwrap();
        assert_eq!(v.argmax, Some(root));
        assert!((v.value - (1.0 + t) / 2.0 / t.sqrt()).abs() < 1e-13);
        assert!(ainfty_exp(&w, &grids).unwrap().value >= v.value);
    }

    #[test]
    fn symmetry_and_classical_link() {
        let (mesh, grids) = setup(2, 2);
        let w = SampledFunction::from_fn(mesh, |x| 0.5 + x[0] * x[0] + (3.0 * x[1]).sin().abs()).unwrap();
        let e = ExponentTuple::parse(2, "1/2", "4/3", "2").unwrap();
        let pair = WeightPair::classical(&w, &e).unwrap();
        let d = e.dual().unwrap();
        for g in &grids {
            for q in g.cubes() {
                if !mesh.cube_cells(&q).unwrap().unwrap().contained {
                    continue;
                }
                let a = apq_alpha(&pair, &e, &q).unwrap();
                let b = apq_alpha(&pair.swapped(), &d, &q).unwrap();
                assert!((a - b).abs() <= 1e-12 * a);
            }
        }
        let wq = w.map(|v| v.powf(e.q_f())).unwrap();
        let a = apq_alpha_constant(&pair, &e, &grids).unwrap().value;
        let b = ap_constant(&wq, e.s_p_f(), &grids).unwrap().value.powf(1.0 / e.q_f());
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn bump_reduces_to_plain() {
        let (mesh, grids) = setup(1, 3);
        let u = SampledFunction::from_fn(mesh, |x| 1.0 + x[0]).unwrap();
        let s = SampledFunction::from_fn(mesh, |x| 2.0 - x[0] * x[0]).unwrap();
        let pair = WeightPair::new(u, s).unwrap();
        let e = ExponentTuple::parse(1, "1/4", "2", "4").unwrap();
        let plain = apq_alpha_constant(&pair, &e, &grids).unwrap();
        let phi = YoungFunction::Power { p: e.p_prime_f() };
        let bump = apq_bump(&pair, &e, &phi, &grids, &BumpSide::Second).unwrap();
        assert!((plain.value - bump.value).abs() < 1e-10 * plain.value);
        let psi = YoungFunction::Power { p: e.q_f() };
        let both = apq_bump(&pair, &e, &phi, &grids, &BumpSide::Both { psi }).unwrap();
        assert!((plain.value - both.value).abs() < 1e-10 * plain.value);
    }

    #[test]
    fn outer_testing_supported_in_q0() {
        let (mesh, _) = setup(1, 3);
        let q0 = DyadicCube::new1(1, 0, false);
        let u = SampledFunction::indicator_cube(mesh, &q0).unwrap();
        let s = SampledFunction::constant(mesh, 1.0).unwrap();
        let pair = WeightPair::new(u, s).unwrap();
        let e = ExponentTuple::parse(1, "1/2", "3/2", "6").unwrap();
        let g = vec![GridFamily::new(&[false], 1, 1, mesh.window()).unwrap()];
        let r = outer_testing_constant(&pair, &e, &g).unwrap();
        let c = 1.0 / (1.0 - 2f64.powf(-0.5));
        let v0 = c * 0.5f64.powf(-0.5) * 0.5;
        let want = (v0.powf(6.0) * 0.5).powf(1.0 / 6.0) * 0.5f64.powf(-1.0 / 1.5);
        // the other level-1 cube sees u only on the shell [0,1) \ [1/2,1)
        assert!(r.value >= want * (1.0 - 1e-12));
        let only = GridFamily::new(&[false], 1, 1, mesh.window()).unwrap();
        let direct = {
            let fam = Family::new(&mesh, &[only]).unwrap();
            let is = fam.integrals(pair.sigma.values());
            fam.sup("x", |g, l, c, sc| (sc.cube == q0).then(|| is[g][l][c]))
        };
        assert_eq!(direct.argmax, Some(q0));
    }

    #[test]
    fn testing_constants_basic() {
        let (mesh, grids) = setup(1, 3);
        let one = SampledFunction::constant(mesh, 1.0).unwrap();
        let pair = WeightPair::new(one.clone(), one).unwrap();
        let e = ExponentTuple::parse(1, "0", "2", "2").unwrap();
        let f = sawyer_maximal_testing(&pair, &e, &grids, TestingSide::Forward).unwrap();
        assert!(f.value >= 1.0 - 1e-12);
        let z = WeightPair::new(SampledFunction::zeros(mesh), SampledFunction::zeros(mesh)).unwrap();
        let r = sawyer_maximal_testing(&z, &e, &grids, TestingSide::Dual).unwrap();
        assert_eq!((r.value, r.cubes_scored), (0.0, 0));
        let es = ExponentTuple::parse(1, "1/2", "3/2", "6").unwrap();
        let pair = WeightPair::new(SampledFunction::constant(mesh, 1.0).unwrap(), SampledFunction::constant(mesh, 1.0).unwrap()).unwrap();
        // σ ≡ u ≡ 1: M^D(σχ_R) = 1 on R, value |R|^{1/q}|R|^{−1/q} = 1
        assert!((md_sp_testing(&pair, &es, &grids).unwrap().value - 1.0).abs() < 1e-12);
        assert!(md_sp_testing(&pair, &ExponentTuple::parse(1, "0", "2", "3").unwrap(), &grids).is_err());
    }
}
