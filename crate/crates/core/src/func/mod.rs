//! Cell-constant nonnegative functions on a uniform mesh.
//!
//! The mesh spacing is `h = 1/(3·2^L)`; the window is a cube whose corners are
//! multiples of `h`. Values are constant on cells and the function is zero
//! outside the window. Cube averages always divide by the full `|Q|`.

mod exponents;

use std::io::Write;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use exponents::{conjugate, make_exponents, ExponentTuple};

use crate::error::{LabError, Result};
use crate::grid::{pow2, DyadicCube, Rational, RationalBox};
use crate::rational;

/// Largest refinement accepted; keeps tick arithmetic well inside `i64`.
pub const MAX_REFINEMENT: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mesh {
    dim: usize,
    refinement: u32,
    /// lower window corner in units of `h`
    origin: [i64; 2],
    /// cells per axis
    cells: usize,
}

/// Cells of one cube, clipped to the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellRange {
    pub lo: [usize; 2],
    pub hi: [usize; 2],
    /// the whole cube lies inside the window
    pub contained: bool,
}

impl CellRange {
    pub fn count(&self, dim: usize) -> usize {
        (0..dim).map(|a| self.hi[a] - self.lo[a]).product()
    }

    /// Flat indices of the covered cells, row-major.
    pub fn flat_indices(&self, mesh: &Mesh) -> impl Iterator<Item = usize> + '_ {
        let n = mesh.cells;
        let dim = mesh.dim;
        let (lo1, hi1) = if dim == 2 { (self.lo[1], self.hi[1]) } else { (0, 1) };
        (self.lo[0]..self.hi[0]).flat_map(move |i0| {
            (lo1..hi1).map(move |i1| if dim == 2 { i0 * n + i1 } else { i0 })
        })
    }
}

impl Mesh {
    pub fn new(window: &RationalBox, refinement: u32) -> Result<Self> {
        if window.dim != 1 && window.dim != 2 {
            return Err(LabError::UnsupportedDimension(window.dim));
        }
        if refinement > MAX_REFINEMENT {
            return Err(LabError::InvalidMesh(format!("refinement {refinement} exceeds {MAX_REFINEMENT}")));
        }
        let scale = pow2(refinement as i32) * 3;
        let side = window.upper[0] - window.lower[0];
        let mut origin = [0i64; 2];
        for a in 0..window.dim {
            if window.upper[a] - window.lower[a] != side {
                return Err(LabError::InvalidMesh("window must be a cube".into()));
            }
            let lo = window.lower[a] * scale;
            if !lo.is_integer() {
                return Err(LabError::InvalidMesh(format!(
                    "window corner {} is not a multiple of 1/(3·2^{refinement})",
                    rational::format(&window.lower[a])
                )));
            }
            origin[a] = lo.to_integer();
        }
        let n = side * scale;
        if !n.is_integer() || n.to_integer() < 1 {
            return Err(LabError::InvalidMesh(format!(
                "window side {} is not a positive multiple of 1/(3·2^{refinement})",
                rational::format(&side)
            )));
        }
        let cells = n.to_integer() as usize;
        if cells.checked_pow(window.dim as u32).is_none_or(|c| c > 1 << 31) {
            return Err(LabError::InvalidMesh("too many cells".into()));
        }
        Ok(Self { dim: window.dim, refinement, origin, cells })
    }

    /// Mesh of the unit cube `[0,1)^n` with `3·2^L` cells per axis.
    pub fn unit(dim: usize, refinement: u32) -> Result<Self> {
        Self::new(&RationalBox::unit(dim)?, refinement)
    }

    /// Mesh of `[lo, hi)^n`.
    pub fn interval(dim: usize, lo: Rational, hi: Rational, refinement: u32) -> Result<Self> {
        Self::new(&RationalBox::cube(dim, lo, hi - lo)?, refinement)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn refinement(&self) -> u32 {
        self.refinement
    }
    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }
    pub fn n_cells(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }
    pub fn origin_ticks(&self) -> [i64; 2] {
        self.origin
    }

    pub fn h(&self) -> Rational {
        pow2(-(self.refinement as i32)) / 3
    }

    pub fn h_f64(&self) -> f64 {
        (-(self.refinement as f64)).exp2() / 3.0
    }

    pub fn cell_volume(&self) -> f64 {
        self.h_f64().powi(self.dim as i32)
    }

    pub fn window(&self) -> RationalBox {
        let h = self.h();
        let lower: Vec<Rational> = (0..self.dim).map(|a| Rational::from_integer(self.origin[a]) * h).collect();
        let upper = lower.iter().map(|l| l + Rational::from_integer(self.cells as i64) * h).collect();
        RationalBox { dim: self.dim, lower, upper }
    }

    pub fn window_volume(&self) -> f64 {
        self.n_cells() as f64 * self.cell_volume()
    }

    /// Per-axis cell coordinates of a flat index.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        if self.dim == 2 {
            [idx / self.cells, idx % self.cells]
        } else {
            [idx, 0]
        }
    }

    pub fn flatten(&self, i: [usize; 2]) -> usize {
        if self.dim == 2 {
            i[0] * self.cells + i[1]
        } else {
            i[0]
        }
    }

    /// Lower corner of cell `i` along `axis`.
    pub fn cell_lower(&self, axis: usize, i: usize) -> f64 {
        (self.origin[axis] + i as i64) as f64 * self.h_f64()
    }

    pub fn cell_center(&self, idx: usize) -> [f64; 2] {
        let i = self.unflatten(idx);
        let h = self.h_f64();
        let mut c = [0.0; 2];
        for a in 0..self.dim {
            c[a] = self.cell_lower(a, i[a]) + 0.5 * h;
        }
        c
    }

    /// The same window with cells halved.
    pub fn refined(&self) -> Result<Self> {
        Self::new(&self.window(), self.refinement + 1)
    }

    pub fn check_level(&self, level: i32) -> Result<()> {
        if level > self.refinement as i32 {
            Err(LabError::Misaligned { level, refinement: self.refinement as i32 })
        } else {
            Ok(())
        }
    }

    /// Window cells covered by `cube`, or `None` if the cube misses the window.
    pub fn cube_cells(&self, cube: &DyadicCube) -> Result<Option<CellRange>> {
        if cube.dim() != self.dim {
            return Err(LabError::MeshMismatch("cube and mesh differ in dimension".into()));
        }
        self.check_level(cube.level())?;
        let fine = self.refinement as i32;
        let side = cube.side_at(fine);
        let mut range = CellRange { lo: [0, 0], hi: [1, 1], contained: true };
        for a in 0..self.dim {
            let lo = cube.lower_at(a, fine) - self.origin[a] as i128;
            let hi = lo + side;
            let n = self.cells as i128;
            if hi <= 0 || lo >= n {
                return Ok(None);
            }
            range.contained &= lo >= 0 && hi <= n;
            range.lo[a] = lo.max(0) as usize;
            range.hi[a] = hi.min(n) as usize;
        }
        Ok(Some(range))
    }

    pub fn ensure_same(&self, other: &Mesh) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(LabError::MeshMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// Per-cell overlap fractions of `[lo, hi)` along one axis.
    fn axis_overlap(&self, axis: usize, lo: &Rational, hi: &Rational) -> Vec<f64> {
        let h = self.h();
        (0..self.cells)
            .map(|i| {
                let a = Rational::from_integer(self.origin[axis] + i as i64) * h;
                let b = a + h;
                let l = if *lo > a { *lo } else { a };
                let u = if *hi < b { *hi } else { b };
                if u <= l {
                    0.0
                } else {
                    ((u - l) / h).to_f64().unwrap_or(0.0)
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    mesh: Mesh,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_cells() {
            return Err(LabError::InvalidFunction(format!(
                "expected {} values, got {}",
                mesh.n_cells(),
                values.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(LabError::InvalidFunction(format!("cell {i} has value {v}")));
        }
        Ok(Self { mesh, values })
    }

    pub fn constant(mesh: Mesh, c: f64) -> Result<Self> {
        Self::new(mesh, vec![c; mesh.n_cells()])
    }

    pub fn zeros(mesh: Mesh) -> Self {
        Self { mesh, values: vec![0.0; mesh.n_cells()] }
    }

    /// Samples `f` at cell centers.
    pub fn from_fn(mesh: Mesh, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..mesh.n_cells()).map(|i| f(&mesh.cell_center(i)[..mesh.dim])).collect();
        Self::new(mesh, values)
    }

    /// Cell averages of the indicator of `b`: exact overlap fractions.
    pub fn indicator(mesh: Mesh, b: &RationalBox) -> Result<Self> {
        if b.dim != mesh.dim {
            return Err(LabError::MeshMismatch("box and mesh differ in dimension".into()));
        }
        let fr: Vec<Vec<f64>> = (0..mesh.dim).map(|a| mesh.axis_overlap(a, &b.lower[a], &b.upper[a])).collect();
        let values = (0..mesh.n_cells())
            .map(|idx| {
                let i = mesh.unflatten(idx);
                (0..mesh.dim).map(|a| fr[a][i[a]]).product()
            })
            .collect();
        Self::new(mesh, values)
    }

    pub fn indicator_cube(mesh: Mesh, cube: &DyadicCube) -> Result<Self> {
        Self::indicator(mesh, &cube.realize())
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }
    pub fn dim(&self) -> usize {
        self.mesh.dim
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.mesh, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.mesh.ensure_same(&other.mesh)?;
        Self::new(self.mesh, self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| v * c)
    }

    /// `self · χ_Q` (cells of `Q` inside the window keep their value).
    pub fn restrict(&self, cube: &DyadicCube) -> Result<Self> {
        let mut values = vec![0.0; self.values.len()];
        if let Some(r) = self.mesh.cube_cells(cube)? {
            for i in r.flat_indices(&self.mesh) {
                values[i] = self.values[i];
            }
        }
        Ok(Self { mesh: self.mesh, values })
    }

    /// The same function on the mesh with halved cells.
    pub fn refined(&self) -> Result<Self> {
        let fine = self.mesh.refined()?;
        let values = (0..fine.n_cells())
            .map(|idx| {
                let i = fine.unflatten(idx);
                self.values[self.mesh.flatten([i[0] / 2, i[1] / 2])]
            })
            .collect();
        Self::new(fine, values)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.mesh.cell_volume()
    }

    /// `∫_box f`, prorating partial cells by overlap volume.
    pub fn integrate(&self, b: &RationalBox) -> Result<f64> {
        if b.dim != self.dim() {
            return Err(LabError::MeshMismatch("box and mesh differ in dimension".into()));
        }
        let fr: Vec<Vec<f64>> =
            (0..self.dim()).map(|a| self.mesh.axis_overlap(a, &b.lower[a], &b.upper[a])).collect();
        let mut s = 0.0;
        for (idx, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let i = self.mesh.unflatten(idx);
            s += v * (0..self.dim()).map(|a| fr[a][i[a]]).product::<f64>();
        }
        Ok(s * self.mesh.cell_volume())
    }

    /// `∫_Q f`, exact for cell-constant data.
    pub fn cube_integral(&self, cube: &DyadicCube) -> Result<f64> {
        Ok(match self.mesh.cube_cells(cube)? {
            Some(r) => r.flat_indices(&self.mesh).map(|i| self.values[i]).sum::<f64>() * self.mesh.cell_volume(),
            None => 0.0,
        })
    }

    /// `|Q|^{-1} ∫_Q f` with zero extension outside the window.
    pub fn average(&self, cube: &DyadicCube) -> Result<f64> {
        Ok(self.cube_integral(cube)? / cube.volume())
    }

    /// `w(Q) = ∫_Q w`
    pub fn weighted_measure(&self, cube: &DyadicCube) -> Result<f64> {
        self.cube_integral(cube)
    }

    /// `(∫ f^p w)^{1/p}`
    pub fn lp_norm(&self, p: f64, weight: &SampledFunction) -> Result<f64> {
        self.mesh.ensure_same(&weight.mesh)?;
        if !(p >= 1.0) {
            return Err(LabError::Precondition(format!("L^p norm needs p >= 1, got {p}")));
        }
        let s: f64 = self
            .values
            .iter()
            .zip(&weight.values)
            .filter(|(v, w)| **v > 0.0 && **w > 0.0)
            .map(|(v, w)| v.powf(p) * w)
            .sum();
        Ok((s * self.mesh.cell_volume()).powf(1.0 / p))
    }

    /// Unweighted `L^p` norm.
    pub fn lp_norm_lebesgue(&self, p: f64) -> f64 {
        let s: f64 = self.values.iter().filter(|v| **v > 0.0).map(|v| v.powf(p)).sum();
        (s * self.mesh.cell_volume()).powf(1.0 / p)
    }

    /// `sup_t t·u({g > t})^{1/q}`, attained as `t` increases to a value of `g`.
    pub fn weak_lq_norm(&self, q: f64, u: &SampledFunction) -> Result<f64> {
        self.mesh.ensure_same(&u.mesh)?;
        if !(q > 0.0) {
            return Err(LabError::Precondition(format!("weak norm needs q > 0, got {q}")));
        }
        let mut pairs: Vec<(f64, f64)> = self
            .values
            .iter()
            .zip(&u.values)
            .filter(|(g, w)| **g > 0.0 && **w > 0.0)
            .map(|(g, w)| (*g, *w))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let dv = self.mesh.cell_volume();
        let mut mass = 0.0;
        let mut best: f64 = 0.0;
        let mut i = 0;
        while i < pairs.len() {
            let level = pairs[i].0;
            while i < pairs.len() && pairs[i].0 == level {
                mass += pairs[i].1;
                i += 1;
            }
            best = best.max(level * (mass * dv).powf(1.0 / q));
        }
        Ok(best)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&FunctionRepr::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: FunctionRepr = serde_json::from_str(s)?;
        repr.try_into()
    }

    /// `index,x0[,x1],value` rows at cell centers.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let header = if self.dim() == 2 { "index,x0,x1,value" } else { "index,x0,value" };
        writeln!(w, "{header}")?;
        for (i, v) in self.values.iter().enumerate() {
            let c = self.mesh.cell_center(i);
            if self.dim() == 2 {
                writeln!(w, "{i},{},{},{v}", c[0], c[1])?;
            } else {
                writeln!(w, "{i},{},{v}", c[0])?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WindowRepr {
    #[serde(with = "rational::serde_str_vec")]
    lower: Vec<Rational>,
    #[serde(with = "rational::serde_str_vec")]
    upper: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct FunctionRepr {
    dim: usize,
    window: WindowRepr,
    cells_per_axis: usize,
    values: Vec<f64>,
}

impl From<&SampledFunction> for FunctionRepr {
    fn from(f: &SampledFunction) -> Self {
        let w = f.mesh.window();
        FunctionRepr {
            dim: f.dim(),
            window: WindowRepr { lower: w.lower, upper: w.upper },
            cells_per_axis: f.mesh.cells,
            values: f.values.clone(),
        }
    }
}

impl TryFrom<FunctionRepr> for SampledFunction {
    type Error = LabError;

    fn try_from(r: FunctionRepr) -> Result<Self> {
        let window = RationalBox::new(r.window.lower, r.window.upper)?;
        if window.dim != r.dim {
            return Err(LabError::Parse("window dimension differs from dim".into()));
        }
        if r.cells_per_axis == 0 {
            return Err(LabError::InvalidMesh("cells_per_axis must be positive".into()));
        }
        let side = window.upper[0] - window.lower[0];
        // h = side / N must equal 1/(3·2^L)
        let inv_h = Rational::from_integer(r.cells_per_axis as i64) / side;
        let thirds = inv_h / 3;
        let refinement = (0..=MAX_REFINEMENT)
            .find(|&l| thirds == pow2(l as i32))
            .ok_or_else(|| LabError::InvalidMesh("cell width is not of the form 1/(3·2^L)".into()))?;
        let mesh = Mesh::new(&window, refinement)?;
        SampledFunction::new(mesh, r.values)
    }
}

impl Serialize for SampledFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SampledFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FunctionRepr::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}
