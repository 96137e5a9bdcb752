//! Sparse families from a stopping-time construction, the sparse operator
//! `L_α^S`, and Carleson sequences.
//!
//! Stopping uses fractional averages `A(Q) = |Q|^{α/n} ⨍_Q f`. Generation `k`
//! consists of the maximal cubes with `A(Q) > a^k`, found in the unbounded
//! grid (zero extension makes `A(Q) → 0` for large cubes). Each cube owns
//! `E_Q = Q \ ∪{P ∈ S_{k_Q+1}}`, `k_Q` being its deepest generation.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::func::{Mesh, SampledFunction};
use crate::grid::{DyadicCube, GridFamily, RationalBox};
use crate::operators::{dyadic_frac_maximal, GridSummary};
use crate::scan::CubeScan;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseCube {
    pub cube: DyadicCube,
    /// deepest generation `k_Q`
    pub generation: i32,
    /// `|Q|^{α/n} ⨍_Q f` of the generating function
    pub fractional_average: f64,
    /// `|Q|` in units of `2^{-n·max_level}`
    pub volume_units: u128,
    /// `|E_Q|` in the same units, including the part outside the window
    pub e_units: u128,
    /// `E_Q ∩ window` as runs `[first flat cell, length]`
    pub e_runs: Vec<[usize; 2]>,
}

impl SparseCube {
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.e_runs.iter().flat_map(|&[s, l]| s..s + l)
    }

    /// Exact `|E_Q| ≥ |Q|/2`.
    pub fn is_thick(&self) -> bool {
        2 * self.e_units >= self.volume_units
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseFamily {
    pub window: RationalBox,
    pub refinement: u32,
    pub grid: GridSummary,
    pub alpha: f64,
    /// stopping ratio
    pub a: f64,
    /// coarsest level scanned; no coarser cube can stop
    pub coarse_level: i32,
    /// first generation
    pub k_lo: i32,
    pub cubes: Vec<SparseCube>,
}

fn runs(mut cells: Vec<usize>) -> Vec<[usize; 2]> {
    cells.sort_unstable();
    let mut out: Vec<[usize; 2]> = Vec::new();
    for c in cells {
        match out.last_mut() {
            Some([s, l]) if *s + *l == c => *l += 1,
            _ => out.push([c, 1]),
        }
    }
    out
}

/// Largest `k` with `a^k < x`.
fn generation_below(a: f64, x: f64) -> i32 {
    let mut k = (x.ln() / a.ln()).floor() as i32;
    while a.powi(k + 1) < x {
        k += 1;
    }
    while a.powi(k) >= x {
        k -= 1;
    }
    k
}

pub fn default_ratio(dim: usize) -> f64 {
    (1u32 << (dim + 1)) as f64
}

struct Stopping {
    scan: CubeScan,
    frac: Vec<Vec<f64>>,
    m: Vec<f64>,
    k_lo: i32,
}

fn stopping_scan(f: &SampledFunction, alpha: f64, g: &GridFamily, a: f64, level: i32) -> Result<Stopping> {
    let mesh = f.mesh();
    let n = f.dim() as f64;
    let fam = GridFamily::new(&g.shift, level, g.max_level, mesh.window())?;
    let scan = CubeScan::new(mesh, &fam)?;
    let ints = scan.integrals(f.values());
    let frac = scan.scores(|li, ci, c| c.volume.powf(alpha / n - 1.0) * ints[li][ci]);
    let m = scan.cellwise_max(&frac, 0.0);
    let min_m = m.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_m > 0.0) {
        return Err(LabError::Precondition("stopping scan left a cell with zero maximal function".into()));
    }
    Ok(Stopping { k_lo: generation_below(a, min_m), scan, frac, m })
}

/// Builds the sparse family of `f` in grid `g` with stopping ratio `a > 2^n`.
pub fn build_sparse(f: &SampledFunction, alpha: f64, g: &GridFamily, a: f64) -> Result<SparseFamily> {
    let mesh = *f.mesh();
    let dim = mesh.dim();
    let n = dim as f64;
    if g.dim != dim {
        return Err(LabError::MeshMismatch("grid and function differ in dimension".into()));
    }
    if g.min_level > g.max_level {
        return Err(LabError::EmptyGrid);
    }
    if !(alpha >= 0.0 && alpha < n) {
        return Err(LabError::Precondition(format!("alpha = {alpha} outside [0, {dim})")));
    }
    if !(a > (1u32 << dim) as f64) {
        return Err(LabError::Precondition(format!("stopping ratio {a} must exceed 2^n")));
    }
    if f.is_zero() {
        return Err(LabError::InvalidFunction("sparse construction needs f not identically zero".into()));
    }
    let mass = f.total();
    let lmax = g.max_level;
    // a cube at level ℓ has A(Q) ≤ 2^{ℓ(n−α)}‖f‖₁, so levels with that below a^{k_lo} never stop
    let mut level = g.min_level;
    let st = loop {
        let st = stopping_scan(f, alpha, g, a, level)?;
        let need = ((st.k_lo as f64 * a.ln() - mass.ln()) / ((n - alpha) * std::f64::consts::LN_2)).floor() as i32;
        if need >= level {
            break st;
        }
        if (lmax - need) as usize * dim > 120 {
            return Err(LabError::Precondition("stopping construction needs levels beyond exact volume range".into()));
        }
        level = need;
    };
    let Stopping { scan, frac, m, k_lo } = st;

    // ancestor max and parent position per cube
    let nl = scan.levels.len();
    let mut parent: Vec<Vec<usize>> = vec![Vec::new(); nl];
    let mut anc: Vec<Vec<f64>> = vec![Vec::new(); nl];
    anc[0] = vec![0.0; scan.levels[0].cubes.len()];
    parent[0] = vec![usize::MAX; scan.levels[0].cubes.len()];
    for li in 1..nl {
        let lv = &scan.levels[li];
        parent[li] = lv.cubes.iter().map(|c| scan.locate(li - 1, mesh.flatten(c.cells.lo))).collect();
        anc[li] = parent[li].iter().map(|&p| anc[li - 1][p].max(frac[li - 1][p])).collect();
    }
    // members: Q with k_Q ≥ k_lo and anc(Q) ≤ a^{k_Q}
    let mut member: BTreeMap<(usize, usize), i32> = BTreeMap::new();
    for li in 0..nl {
        for ci in 0..scan.levels[li].cubes.len() {
            let x = frac[li][ci];
            if x <= 0.0 {
                continue;
            }
            let kq = generation_below(a, x);
            if kq >= k_lo && anc[li][ci] <= a.powi(kq) {
                member.insert((li, ci), kq);
            }
        }
    }
    // owner of each cell: the coarsest cube with A > a^{g(x)}, g(x) = largest k with a^k < M(x)
    let owners: Vec<(usize, usize)> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|idx| {
            let gx = generation_below(a, m[idx]);
            let th = a.powi(gx);
            (0..nl)
                .map(|li| (li, scan.locate(li, idx)))
                .find(|&(li, ci)| frac[li][ci] > th)
                .expect("M(x) is attained in the scan")
        })
        .collect();
    let mut masks: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (idx, o) in owners.iter().enumerate() {
        if !member.contains_key(o) {
            return Err(LabError::Precondition(format!("cell {idx} owned by a non-stopping cube")));
        }
        masks.entry(*o).or_default().push(idx);
    }
    // removed volume: P ∈ S_k lies in Q ∈ S_{k−1}; counts against E_Q when k_Q = k − 1
    let units = |li: usize| -> u128 { 1u128 << (dim as u32 * (lmax - scan.levels[li].level) as u32) };
    let mut removed: BTreeMap<(usize, usize), u128> = BTreeMap::new();
    for (&(li, ci), &kp) in &member {
        let kmin = if anc[li][ci] <= 0.0 { k_lo } else { (generation_below(a, anc[li][ci]) + 1).max(k_lo) };
        for k in kmin.max(k_lo + 1)..=kp {
            let th = a.powi(k - 1);
            // coarsest ancestor with A > a^{k−1}
            let mut chain = vec![(li, ci)];
            let (mut l, mut c) = (li, ci);
            while l > 0 {
                c = parent[l][c];
                l -= 1;
                chain.push((l, c));
            }
            let q = *chain.iter().rev().find(|&&(l, c)| frac[l][c] > th).expect("P itself exceeds a^{k−1}");
            if q != (li, ci) && member.get(&q) == Some(&(k - 1)) {
                *removed.entry(q).or_default() += units(li);
            }
        }
    }
    let cubes = member
        .iter()
        .map(|(&(li, ci), &kq)| {
            let c = &scan.levels[li].cubes[ci];
            let vol = units(li);
            SparseCube {
                cube: c.cube,
                generation: kq,
                fractional_average: frac[li][ci],
                volume_units: vol,
                e_units: vol - removed.get(&(li, ci)).copied().unwrap_or(0),
                e_runs: runs(masks.remove(&(li, ci)).unwrap_or_default()),
            }
        })
        .collect();
    Ok(SparseFamily {
        window: mesh.window(),
        refinement: mesh.refinement(),
        grid: GridSummary::from(g),
        alpha,
        a,
        coarse_level: level,
        k_lo,
        cubes,
    })
}

impl SparseFamily {
    pub fn mesh(&self) -> Result<Mesh> {
        Mesh::new(&self.window, self.refinement)
    }

    /// `C_a` in `M_α^D f ≤ C_a L_α^S f`
    pub fn domination_constant(&self) -> f64 {
        self.a
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityReport {
    pub n_cubes: usize,
    pub all_thick: bool,
    /// `min |E_Q|/|Q|`
    pub min_thickness: f64,
    pub disjoint: bool,
    pub masks_inside_cubes: bool,
}

pub fn verify_sparse(s: &SparseFamily) -> Result<SparsityReport> {
    let mesh = s.mesh()?;
    let mut seen = vec![false; mesh.n_cells()];
    let mut disjoint = true;
    let mut inside = true;
    for q in &s.cubes {
        let rg = mesh.cube_cells(&q.cube)?;
        for idx in q.cells() {
            if idx >= seen.len() {
                inside = false;
                continue;
            }
            if std::mem::replace(&mut seen[idx], true) {
                disjoint = false;
            }
            let i = mesh.unflatten(idx);
            inside &= rg.is_some_and(|r| (0..mesh.dim()).all(|a| r.lo[a] <= i[a] && i[a] < r.hi[a]));
        }
    }
    Ok(SparsityReport {
        n_cubes: s.cubes.len(),
        all_thick: s.cubes.iter().all(SparseCube::is_thick),
        min_thickness: s
            .cubes
            .iter()
            .map(|q| q.e_units as f64 / q.volume_units as f64)
            .fold(f64::INFINITY, f64::min),
        disjoint,
        masks_inside_cubes: inside,
    })
}

/// `L_α^S f = Σ_{Q∈S} |Q|^{α/n} ⨍_Q f · χ_{E_Q}`
pub fn sparse_operator(f: &SampledFunction, s: &SparseFamily, alpha: f64) -> Result<SampledFunction> {
    f.mesh().ensure_same(&s.mesh()?)?;
    let n = f.dim() as f64;
    let mut out = vec![0.0; f.mesh().n_cells()];
    for q in &s.cubes {
        let v = q.cube.volume().powf(alpha / n - 1.0) * f.cube_integral(&q.cube)?;
        for idx in q.cells() {
            out[idx] += v;
        }
    }
    SampledFunction::new(*f.mesh(), out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub c_a: f64,
    /// `max M_α^D f / L_α^S f` over realized cells
    pub max_ratio: f64,
    pub violations: usize,
    pub cells_checked: usize,
    /// cells where `M_α^D f = 0`
    pub excluded: usize,
}

/// Checks `M_α^D f ≤ C_a L_α^S f` cellwise, `M_α^D` over the levels of `g`.
pub fn domination_check(f: &SampledFunction, s: &SparseFamily, g: &GridFamily) -> Result<DominationReport> {
    let m = dyadic_frac_maximal(f, s.alpha, g)?.values;
    let l = sparse_operator(f, s, s.alpha)?;
    let c = s.domination_constant();
    let mut rep = DominationReport { c_a: c, max_ratio: 0.0, violations: 0, cells_checked: 0, excluded: 0 };
    for (mv, lv) in m.values().iter().zip(l.values()) {
        if *mv <= 0.0 {
            rep.excluded += 1;
            continue;
        }
        rep.cells_checked += 1;
        let r = if *lv > 0.0 { mv / lv } else { f64::INFINITY };
        rep.max_ratio = rep.max_ratio.max(r);
        if *mv > c * lv * (1.0 + 1e-12) {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

/// Nonnegative cube weights `c_Q` with certified Carleson constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSequence {
    pub entries: Vec<(DyadicCube, f64)>,
    pub constant: f64,
}

impl CarlesonSequence {
    pub fn new(c: &BTreeMap<DyadicCube, f64>, mu: &SampledFunction) -> Result<Self> {
        Ok(Self { entries: c.iter().map(|(q, v)| (*q, *v)).collect(), constant: certify_carleson(c, mu)? })
    }

    /// `c_Q = |E_Q ∩ window|`, Carleson with constant at most 1 for Lebesgue measure.
    pub fn from_sparse(s: &SparseFamily) -> Result<BTreeMap<DyadicCube, f64>> {
        let dv = s.mesh()?.cell_volume();
        Ok(s.cubes.iter().map(|q| (q.cube, q.cells().count() as f64 * dv)).collect())
    }
}

fn same_grid(c: &BTreeMap<DyadicCube, f64>) -> Result<()> {
    let mut it = c.keys();
    if let Some(first) = it.next() {
        if it.any(|q| !q.same_grid(first)) {
            return Err(LabError::Precondition("Carleson sequence mixes grids".into()));
        }
    }
    Ok(())
}

/// `C(c) = max_{Q_0} Σ_{Q⊆Q_0} c_Q / μ(Q_0)`, `Q_0` over the support cubes and
/// their ancestors down to the coarsest support level.
pub fn certify_carleson(c: &BTreeMap<DyadicCube, f64>, mu: &SampledFunction) -> Result<f64> {
    same_grid(c)?;
    if c.values().any(|v| !(*v >= 0.0)) {
        return Err(LabError::Precondition("Carleson sequence must be nonnegative".into()));
    }
    let Some(top) = c.keys().map(|q| q.level()).min() else {
        return Ok(0.0);
    };
    let mut sums: BTreeMap<DyadicCube, f64> = BTreeMap::new();
    for (q, v) in c {
        for a in q.ancestors(top)? {
            *sums.entry(a).or_default() += v;
        }
    }
    let mut best = 0.0f64;
    for (q0, s) in sums {
        if s <= 0.0 {
            continue;
        }
        let m = mu.cube_integral(&q0)?;
        best = best.max(if m > 0.0 { s / m } else { f64::INFINITY });
    }
    Ok(best)
}

/// `(Σ |a_Q|^p c_Q, C(c)·∫ (M a)^p dμ)` with `M a(x) = sup_{Q∋x} |a_Q|`.
pub fn carleson_embed_check(
    a: &BTreeMap<DyadicCube, f64>,
    c: &CarlesonSequence,
    mu: &SampledFunction,
    p: f64,
) -> Result<(f64, f64)> {
    let mesh = mu.mesh();
    let cmap: BTreeMap<DyadicCube, f64> = c.entries.iter().copied().collect();
    let lhs: f64 = a.iter().map(|(q, v)| v.abs().powf(p) * cmap.get(q).copied().unwrap_or(0.0)).sum();
    let mut ma = vec![0.0f64; mesh.n_cells()];
    let support: BTreeSet<&DyadicCube> = a.keys().collect();
    for q in support {
        let v = a[q].abs();
        if let Some(rg) = mesh.cube_cells(q)? {
            for idx in rg.flat_indices(mesh) {
                ma[idx] = ma[idx].max(v);
            }
        }
    }
    let integral: f64 = ma.iter().zip(mu.values()).map(|(m, w)| m.powf(p) * w).sum::<f64>() * mesh.cell_volume();
    Ok((lhs, c.constant * integral))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Rational;

    fn unit_grid(mesh: &Mesh) -> GridFamily {
        GridFamily::new(&[false; 2][..mesh.dim()], 0, mesh.refinement() as i32, mesh.window()).unwrap()
    }

    #[test]
    fn constant_on_root() {
        let mesh = Mesh::unit(1, 3).unwrap();
        let f = SampledFunction::constant(mesh, 1.0).unwrap();
        let g = unit_grid(&mesh);
        let s = build_sparse(&f, 0.0, &g, 4.0).unwrap();
        // the maximal cube with average > 4^{k_lo} = 1/4 is [0,2)
        assert_eq!(s.cubes.len(), 1);
        assert_eq!(s.cubes[0].cube, DyadicCube::new1(-1, 0, false));
        assert_eq!(s.cubes[0].cells().count(), mesh.n_cells());
        let rep = verify_sparse(&s).unwrap();
        assert!(rep.all_thick && rep.disjoint && rep.masks_inside_cubes);
        let l = sparse_operator(&f, &s, 0.0).unwrap();
        assert!(l.values().iter().all(|v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn single_cell_chain() {
        let mesh = Mesh::unit(1, 3).unwrap();
        let mut vals = vec![0.0; mesh.n_cells()];
        vals[7] = 8.0;
        let f = SampledFunction::new(mesh, vals).unwrap();
        let g = unit_grid(&mesh);
        let s = build_sparse(&f, 0.0, &g, 4.0).unwrap();
        // every stopping cube contains the spike cell and they are nested
        for w in s.cubes.windows(2) {
            assert!(w[0].cube.contains(&w[1].cube));
        }
        assert!(s.cubes.iter().all(SparseCube::is_thick));
        let rep = domination_check(&f, &s, &g).unwrap();
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn domination_with_alpha() {
        let w = RationalBox::cube(2, Rational::from_integer(0), Rational::from_integer(2)).unwrap();
        let mesh = Mesh::new(&w, 3).unwrap();
        let f = SampledFunction::from_fn(mesh, |x| (5.0 * x[0]).sin().powi(2) + (x[1] > 1.3) as u8 as f64 * 4.0).unwrap();
        let g = GridFamily::new(&[true, false], -1, 3, w).unwrap();
        for alpha in [0.0, 0.5, 1.5] {
            let s = build_sparse(&f, alpha, &g, 8.0).unwrap();
            let rep = verify_sparse(&s).unwrap();
            assert!(rep.all_thick && rep.disjoint && rep.masks_inside_cubes, "{rep:?}");
            let d = domination_check(&f, &s, &g).unwrap();
            assert_eq!(d.violations, 0, "{d:?}");
        }
    }

    #[test]
    fn carleson_examples() {
        let mesh = Mesh::unit(1, 3).unwrap();
        let mu = SampledFunction::constant(mesh, 1.0).unwrap();
        let g = unit_grid(&mesh);
        let leaves: BTreeMap<_, _> = g.level_cubes(3).into_iter().map(|q| (q, q.volume())).collect();
        assert!((certify_carleson(&leaves, &mu).unwrap() - 1.0).abs() < 1e-12);
        let all: BTreeMap<_, _> = g.cubes().into_iter().map(|q| (q, q.volume())).collect();
        assert!((certify_carleson(&all, &mu).unwrap() - 4.0).abs() < 1e-12);
        let cs = CarlesonSequence::new(&all, &mu).unwrap();
        let q = DyadicCube::new1(2, 1, false);
        let (l, r) = carleson_embed_check(&BTreeMap::from([(q, 1.0)]), &cs, &mu, 2.0).unwrap();
        assert!(l <= r);
        let (l, r) = carleson_embed_check(&BTreeMap::new(), &cs, &mu, 2.0).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
    }

    #[test]
    fn json_roundtrip() {
        let mesh = Mesh::unit(1, 2).unwrap();
        let f = SampledFunction::from_fn(mesh, |x| x[0]).unwrap();
        let s = build_sparse(&f, 0.25, &unit_grid(&mesh), 4.0).unwrap();
        assert_eq!(SparseFamily::from_json(&s.to_json().unwrap()).unwrap(), s);
    }
}
