//! Cube scans: a grid family laid over a mesh, level by level.
//!
//! At each level the cubes meeting the window form a rectangular index block,
//! so the cube containing a given cell is found by integer arithmetic. Cube
//! integrals come from prefix sums (summed-area tables in 2-D).

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::func::{CellRange, Mesh};
use crate::grid::{DyadicCube, GridFamily};

#[derive(Clone, Debug)]
pub struct ScannedCube {
    pub cube: DyadicCube,
    pub cells: CellRange,
    /// `|Q|`
    pub volume: f64,
    /// false when the family window excludes the cube
    pub in_family: bool,
}

#[derive(Clone, Debug)]
pub struct LevelScan {
    pub level: i32,
    m_min: [i64; 2],
    extent: [usize; 2],
    sigma_s: [i64; 2],
    pub cubes: Vec<ScannedCube>,
}

#[derive(Clone, Debug)]
pub struct CubeScan {
    mesh: Mesh,
    pub grid: GridFamily,
    pub levels: Vec<LevelScan>,
}

impl CubeScan {
    pub fn new(mesh: &Mesh, grid: &GridFamily) -> Result<Self> {
        if grid.dim != mesh.dim() {
            return Err(LabError::MeshMismatch("grid and mesh differ in dimension".into()));
        }
        mesh.check_level(grid.max_level)?;
        let window = mesh.window();
        let full = GridFamily::new(&grid.shift, grid.min_level, grid.max_level, window.clone())?;
        let restricted = grid.window != window;
        let dim = mesh.dim();
        let mut levels = Vec::with_capacity((grid.max_level - grid.min_level + 1) as usize);
        for k in grid.min_level..=grid.max_level {
            let raw = full.level_cubes(k);
            let first = raw.first().ok_or(LabError::EmptyGrid)?;
            let last = raw.last().unwrap();
            let mut m_min = [0i64; 2];
            let mut extent = [1usize; 2];
            let mut sigma_s = [0i64; 2];
            let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
            for a in 0..dim {
                m_min[a] = first.index()[a];
                extent[a] = (last.index()[a] - first.index()[a] + 1) as usize;
                sigma_s[a] = sign * grid.shift[a] as i64;
            }
            let mut cubes = Vec::with_capacity(raw.len());
            for c in raw {
                let cells = mesh.cube_cells(&c)?.ok_or_else(|| {
                    LabError::Precondition(format!("enumerated cube {c} misses the mesh window"))
                })?;
                let in_family = !restricted || c.realize().intersects(&grid.window);
                cubes.push(ScannedCube { cube: c, cells, volume: c.volume(), in_family });
            }
            levels.push(LevelScan { level: k, m_min, extent, sigma_s, cubes });
        }
        Ok(Self { mesh: *mesh, grid: grid.clone(), levels })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn cubes(&self) -> impl Iterator<Item = &ScannedCube> {
        self.levels.iter().flat_map(|l| l.cubes.iter())
    }

    pub fn n_cubes(&self) -> usize {
        self.levels.iter().map(|l| l.cubes.len()).sum()
    }

    /// Position within `levels[li].cubes` of the cube containing cell `idx`.
    pub fn locate(&self, li: usize, idx: usize) -> usize {
        let lv = &self.levels[li];
        let i = self.mesh.unflatten(idx);
        let shift = self.mesh.refinement() as i32 - lv.level;
        let origin = self.mesh.origin_ticks();
        let mut pos = 0usize;
        for a in 0..self.mesh.dim() {
            let t = origin[a] + i[a] as i64;
            let u = if shift >= 63 { if t < 0 { -1 } else { 0 } } else { t >> shift };
            let m = (u - lv.sigma_s[a]).div_euclid(3);
            pos = pos * lv.extent[a] + (m - lv.m_min[a]) as usize;
        }
        pos
    }

    /// `∫_Q f` for every cube, level-major.
    pub fn integrals(&self, values: &[f64]) -> Vec<Vec<f64>> {
        let prefix = Prefix::new(&self.mesh, values);
        let dv = self.mesh.cell_volume();
        // 2-D inclusion-exclusion can round a vanishing integral slightly below zero
        let floor = if values.iter().all(|&v| v >= 0.0) { 0.0 } else { f64::NEG_INFINITY };
        self.levels
            .iter()
            .map(|lv| lv.cubes.par_iter().map(|c| (prefix.sum(&c.cells) * dv).max(floor)).collect())
            .collect()
    }

    /// Evaluates `score` on every cube.
    pub fn scores<F>(&self, score: F) -> Vec<Vec<f64>>
    where
        F: Fn(usize, usize, &ScannedCube) -> f64 + Sync,
    {
        self.levels
            .iter()
            .enumerate()
            .map(|(li, lv)| lv.cubes.par_iter().enumerate().map(|(ci, c)| score(li, ci, c)).collect())
            .collect()
    }

    /// Per cell, the max of `scores` over family cubes containing the cell.
    pub fn cellwise_max(&self, scores: &[Vec<f64>], init: f64) -> Vec<f64> {
        (0..self.mesh.n_cells())
            .into_par_iter()
            .map(|idx| {
                let mut best = init;
                for (li, lv) in self.levels.iter().enumerate() {
                    let ci = self.locate(li, idx);
                    if lv.cubes[ci].in_family && scores[li][ci] > best {
                        best = scores[li][ci];
                    }
                }
                best
            })
            .collect()
    }

    /// Per cell, the sum of `scores` over family cubes containing the cell.
    pub fn cellwise_sum(&self, scores: &[Vec<f64>]) -> Vec<f64> {
        (0..self.mesh.n_cells())
            .into_par_iter()
            .map(|idx| {
                let mut s = 0.0;
                for (li, lv) in self.levels.iter().enumerate() {
                    let ci = self.locate(li, idx);
                    if lv.cubes[ci].in_family {
                        s += scores[li][ci];
                    }
                }
                s
            })
            .collect()
    }
}

/// Prefix sums over cells; `sum` returns the plain cell sum over a range.
pub struct Prefix {
    dim: usize,
    n: usize,
    data: Vec<f64>,
}

impl Prefix {
    pub fn new(mesh: &Mesh, values: &[f64]) -> Self {
        let n = mesh.cells_per_axis();
        let dim = mesh.dim();
        if dim == 1 {
            let mut data = Vec::with_capacity(n + 1);
            let mut acc = 0.0;
            data.push(0.0);
            for &v in values {
                acc += v;
                data.push(acc);
            }
            Self { dim, n, data }
        } else {
            let w = n + 1;
            let mut data = vec![0.0; w * w];
            for i in 0..n {
                let mut row = 0.0;
                for j in 0..n {
                    row += values[i * n + j];
                    data[(i + 1) * w + j + 1] = data[i * w + j + 1] + row;
                }
            }
            Self { dim, n, data }
        }
    }

    pub fn sum(&self, r: &CellRange) -> f64 {
        if self.dim == 1 {
            self.data[r.hi[0]] - self.data[r.lo[0]]
        } else {
            let w = self.n + 1;
            let at = |i: usize, j: usize| self.data[i * w + j];
            at(r.hi[0], r.hi[1]) - at(r.lo[0], r.hi[1]) - at(r.hi[0], r.lo[1]) + at(r.lo[0], r.lo[1])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::SampledFunction;
    use crate::grid::{shifted_grids, Rational, RationalBox};

    #[test]
    fn locate_matches_cube_cells() {
        for dim in 1..=2 {
            let mesh = Mesh::unit(dim, 2).unwrap();
            for g in shifted_grids(dim, &mesh.window(), -2, 2).unwrap() {
                let scan = CubeScan::new(&mesh, &g).unwrap();
                for (li, lv) in scan.levels.iter().enumerate() {
                    let mut seen = vec![0usize; mesh.n_cells()];
                    for (ci, c) in lv.cubes.iter().enumerate() {
                        for idx in c.cells.flat_indices(&mesh) {
                            assert_eq!(scan.locate(li, idx), ci);
                            seen[idx] += 1;
                        }
                    }
                    // each level partitions the window
                    assert!(seen.iter().all(|&s| s == 1));
                }
            }
        }
    }

    #[test]
    fn integrals_match_direct() {
        let w = RationalBox::cube(2, Rational::new(-1, 3), Rational::from_integer(2)).unwrap();
        let mesh = Mesh::new(&w, 1).unwrap();
        let f = SampledFunction::from_fn(mesh, |x| (x[0] * 3.0).sin().abs() + x[1] * x[1]).unwrap();
        let g = GridFamily::new(&[true, false], -1, 1, w).unwrap();
        let scan = CubeScan::new(&mesh, &g).unwrap();
        let ints = scan.integrals(f.values());
        for (li, lv) in scan.levels.iter().enumerate() {
            for (ci, c) in lv.cubes.iter().enumerate() {
                let direct = f.cube_integral(&c.cube).unwrap();
                assert!((ints[li][ci] - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_levels_finer_than_mesh() {
        let mesh = Mesh::unit(1, 1).unwrap();
        let g = GridFamily::new(&[false], 0, 2, mesh.window()).unwrap();
        assert!(matches!(CubeScan::new(&mesh, &g), Err(LabError::Misaligned { .. })));
    }
}
