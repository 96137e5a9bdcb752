//! Shifted dyadic grids.
//!
//! A cube of the grid `D^t` at level `k` with index `m` is the half-open box
//! `2^{-k}([0,1)^n + m + (-1)^k t)` with `t ∈ {0, 1/3}^n`. Along each axis its
//! lower corner is the integer `3m + (-1)^k s` in units of `1/(3·2^k)`, where
//! `s ∈ {0, 1}` encodes `t`. All geometry below is done in those integer
//! units, so boundary tests are exact.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub type Rational = Ratio<i64>;

/// `2^k` as an exact rational, for any sign of `k`.
pub fn pow2(k: i32) -> Rational {
    if k >= 0 {
        Rational::from_integer(1i64 << k)
    } else {
        Rational::new(1, 1i64 << (-k))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(LabError::UnsupportedDimension(dim))
    }
}

/// Axis-aligned half-open box `[lower, upper)` with rational corners.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalBox {
    pub dim: usize,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

impl RationalBox {
    pub fn new(lower: Vec<Rational>, upper: Vec<Rational>) -> Result<Self> {
        check_dim(lower.len())?;
        if lower.len() != upper.len() {
            return Err(LabError::Precondition("box corners differ in dimension".into()));
        }
        Ok(Self { dim: lower.len(), lower, upper })
    }

    /// The cube `[lo, lo + side)^dim`.
    pub fn cube(dim: usize, lo: Rational, side: Rational) -> Result<Self> {
        Self::new(vec![lo; dim], vec![lo + side; dim])
    }

    pub fn unit(dim: usize) -> Result<Self> {
        Self::cube(dim, Rational::zero(), Rational::one())
    }

    pub fn is_empty(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(l, u)| l >= u)
    }

    pub fn intersects(&self, other: &RationalBox) -> bool {
        !self.is_empty()
            && !other.is_empty()
            && (0..self.dim).all(|a| self.lower[a] < other.upper[a] && other.lower[a] < self.upper[a])
    }

    pub fn contains_box(&self, other: &RationalBox) -> bool {
        (0..self.dim).all(|a| self.lower[a] <= other.lower[a] && other.upper[a] <= self.upper[a])
    }

    pub fn intersection(&self, other: &RationalBox) -> RationalBox {
        let lower = (0..self.dim).map(|a| self.lower[a].max(other.lower[a])).collect();
        let upper = (0..self.dim).map(|a| self.upper[a].min(other.upper[a])).collect();
        RationalBox { dim: self.dim, lower, upper }
    }

    pub fn volume(&self) -> Rational {
        if self.is_empty() {
            return Rational::zero();
        }
        (0..self.dim).map(|a| self.upper[a] - self.lower[a]).product()
    }
}

/// A cube of a shifted dyadic grid.
///
/// Field order gives the deterministic ordering used for tie-breaks:
/// level first (coarse before fine), then index, then shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "CubeRepr", into = "CubeRepr")]
pub struct DyadicCube {
    level: i32,
    index: [i64; 2],
    shift: [bool; 2],
    dim: u8,
}

#[derive(Serialize, Deserialize)]
struct CubeRepr {
    dim: usize,
    level: i32,
    index: Vec<i64>,
    shift: Vec<u8>,
}

impl From<DyadicCube> for CubeRepr {
    fn from(c: DyadicCube) -> Self {
        let d = c.dim();
        CubeRepr {
            dim: d,
            level: c.level,
            index: c.index[..d].to_vec(),
            shift: c.shift[..d].iter().map(|&s| s as u8).collect(),
        }
    }
}

impl TryFrom<CubeRepr> for DyadicCube {
    type Error = LabError;

    fn try_from(r: CubeRepr) -> Result<Self> {
        if r.shift.iter().any(|&s| s > 1) {
            return Err(LabError::Parse("cube shift entries must be 0 or 1".into()));
        }
        let shift: Vec<bool> = r.shift.iter().map(|&s| s == 1).collect();
        if r.index.len() != r.dim {
            return Err(LabError::Parse("cube index length differs from dim".into()));
        }
        DyadicCube::new(r.level, &r.index, &shift)
    }
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        let t: Vec<&str> = self.shift[..d].iter().map(|&s| if s { "1/3" } else { "0" }).collect();
        write!(f, "D^({}) k={} m={:?}", t.join(","), self.level, &self.index[..d])
    }
}

impl DyadicCube {
    pub fn new(level: i32, index: &[i64], shift: &[bool]) -> Result<Self> {
        let dim = index.len();
        check_dim(dim)?;
        if shift.len() != dim {
            return Err(LabError::Precondition("shift and index differ in dimension".into()));
        }
        let mut idx = [0; 2];
        let mut sh = [false; 2];
        idx[..dim].copy_from_slice(index);
        sh[..dim].copy_from_slice(shift);
        Ok(Self { level, index: idx, shift: sh, dim: dim as u8 })
    }

    pub fn new1(level: i32, m: i64, shifted: bool) -> Self {
        Self { level, index: [m, 0], shift: [shifted, false], dim: 1 }
    }

    pub fn new2(level: i32, m: [i64; 2], shifted: [bool; 2]) -> Self {
        Self { level, index: m, shift: shifted, dim: 2 }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn index(&self) -> &[i64] {
        &self.index[..self.dim()]
    }

    pub fn shift(&self) -> &[bool] {
        &self.shift[..self.dim()]
    }

    fn sign(level: i32) -> i64 {
        if level.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// Lower corner along `axis` in units of `1/(3·2^level)`.
    pub(crate) fn lower_units(&self, axis: usize) -> i64 {
        3 * self.index[axis] + Self::sign(self.level) * self.shift[axis] as i64
    }

    /// Lower corner along `axis` in units of `1/(3·2^fine)`; requires `fine >= level`.
    pub(crate) fn lower_at(&self, axis: usize, fine: i32) -> i128 {
        debug_assert!(fine >= self.level);
        (self.lower_units(axis) as i128) << (fine - self.level)
    }

    /// Side length in units of `1/(3·2^fine)`.
    pub(crate) fn side_at(&self, fine: i32) -> i128 {
        3i128 << (fine - self.level)
    }

    pub fn side(&self) -> Rational {
        pow2(-self.level)
    }

    pub fn side_f64(&self) -> f64 {
        (-self.level as f64).exp2()
    }

    /// Lebesgue measure `2^{-k n}`.
    pub fn volume(&self) -> f64 {
        (-(self.level as f64) * self.dim() as f64).exp2()
    }

    /// The realized half-open box, exact.
    pub fn realize(&self) -> RationalBox {
        let scale = pow2(-self.level) / 3;
        let lower: Vec<Rational> =
            (0..self.dim()).map(|a| Rational::from_integer(self.lower_units(a)) * scale).collect();
        let upper = lower.iter().map(|l| l + self.side()).collect();
        RationalBox { dim: self.dim(), lower, upper }
    }

    /// The unique cube one level coarser in the same grid containing `self`.
    ///
    /// With lower corner `c = 3m + σs` (σ = (-1)^k) the parent index is
    /// `⌊(m + σs)/2⌋`; the alternating sign of the shift makes this fit exactly.
    pub fn parent(&self) -> DyadicCube {
        let sigma = Self::sign(self.level);
        let mut index = self.index;
        for (a, idx) in index.iter_mut().enumerate().take(self.dim()) {
            *idx = (self.index[a] + sigma * self.shift[a] as i64).div_euclid(2);
        }
        DyadicCube { level: self.level - 1, index, shift: self.shift, dim: self.dim }
    }

    /// `[self, parent, grandparent, ...]` down to `up_to_level` inclusive.
    pub fn ancestors(&self, up_to_level: i32) -> Result<Vec<DyadicCube>> {
        if up_to_level > self.level {
            return Err(LabError::Precondition(format!(
                "ancestor level {up_to_level} is finer than cube level {}",
                self.level
            )));
        }
        let mut chain = Vec::with_capacity((self.level - up_to_level + 1) as usize);
        let mut c = *self;
        chain.push(c);
        while c.level > up_to_level {
            c = c.parent();
            chain.push(c);
        }
        Ok(chain)
    }

    pub fn same_grid(&self, other: &DyadicCube) -> bool {
        self.dim == other.dim && self.shift == other.shift
    }

    /// Exact containment `self ⊇ other` (realized boxes).
    pub fn contains(&self, other: &DyadicCube) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let fine = self.level.max(other.level);
        (0..self.dim()).all(|a| {
            let (sl, ol) = (self.lower_at(a, fine), other.lower_at(a, fine));
            sl <= ol && ol + other.side_at(fine) <= sl + self.side_at(fine)
        })
    }

    pub fn intersects(&self, other: &DyadicCube) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let fine = self.level.max(other.level);
        (0..self.dim()).all(|a| {
            let (sl, ol) = (self.lower_at(a, fine), other.lower_at(a, fine));
            sl < ol + other.side_at(fine) && ol < sl + self.side_at(fine)
        })
    }

    /// Does the realized box contain the point `x`?
    pub fn contains_point(&self, x: &[Rational]) -> bool {
        let b = self.realize();
        (0..self.dim()).all(|a| b.lower[a] <= x[a] && x[a] < b.upper[a])
    }
}

/// Bounded, window-clipped view of one shifted dyadic grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridFamily {
    pub dim: usize,
    pub shift: Vec<bool>,
    pub min_level: i32,
    pub max_level: i32,
    pub window: RationalBox,
}

impl GridFamily {
    pub fn new(shift: &[bool], min_level: i32, max_level: i32, window: RationalBox) -> Result<Self> {
        check_dim(shift.len())?;
        if window.dim != shift.len() {
            return Err(LabError::Precondition("window and shift differ in dimension".into()));
        }
        if min_level > max_level {
            return Err(LabError::Precondition(format!(
                "min_level {min_level} exceeds max_level {max_level}"
            )));
        }
        Ok(Self { dim: shift.len(), shift: shift.to_vec(), min_level, max_level, window })
    }

    /// Range of indices `m` along one axis whose cubes at `level` meet `[lo, hi)`.
    fn axis_range(&self, axis: usize, level: i32) -> std::ops::RangeInclusive<i64> {
        let scale = pow2(level) * 3;
        let a = self.window.lower[axis] * scale;
        let b = self.window.upper[axis] * scale;
        let sigma_s = DyadicCube::sign(level) * self.shift[axis] as i64;
        // lower = 3m + σs must satisfy lower < b and lower + 3 > a
        let m_min = ((a - 3 - sigma_s) / 3).floor().to_integer() + 1;
        let m_max = ((b - sigma_s) / 3).ceil().to_integer() - 1;
        m_min..=m_max
    }

    /// Cubes of one level meeting the window, index-lexicographic.
    pub fn level_cubes(&self, level: i32) -> Vec<DyadicCube> {
        if self.window.is_empty() || level < self.min_level || level > self.max_level {
            return Vec::new();
        }
        let mut shift = [false; 2];
        shift[..self.dim].copy_from_slice(&self.shift);
        match self.dim {
            1 => self
                .axis_range(0, level)
                .map(|m| DyadicCube { level, index: [m, 0], shift, dim: 1 })
                .collect(),
            _ => {
                let r0 = self.axis_range(0, level);
                let r1 = self.axis_range(1, level);
                let mut out = Vec::new();
                for m0 in r0 {
                    for m1 in r1.clone() {
                        out.push(DyadicCube { level, index: [m0, m1], shift, dim: 2 });
                    }
                }
                out
            }
        }
    }

    /// Every cube with `min_level ≤ level ≤ max_level` meeting the window,
    /// level-major then index-lexicographic.
    pub fn enumerate(&self) -> impl Iterator<Item = DyadicCube> + '_ {
        (self.min_level..=self.max_level).flat_map(move |k| self.level_cubes(k))
    }

    pub fn cubes(&self) -> Vec<DyadicCube> {
        self.enumerate().collect()
    }

    pub fn with_levels(&self, min_level: i32, max_level: i32) -> Result<Self> {
        GridFamily::new(&self.shift, min_level, max_level, self.window.clone())
    }

    /// The `t` vector as rationals (0 or 1/3 per axis).
    pub fn t(&self) -> Vec<Rational> {
        self.shift.iter().map(|&s| if s { Rational::new(1, 3) } else { Rational::zero() }).collect()
    }
}

/// All `2^n` shift vectors, `t = 0` first.
pub fn all_shifts(dim: usize) -> Result<Vec<Vec<bool>>> {
    check_dim(dim)?;
    Ok(match dim {
        1 => vec![vec![false], vec![true]],
        _ => vec![
            vec![false, false],
            vec![false, true],
            vec![true, false],
            vec![true, true],
        ],
    })
}

/// One grid family per `t ∈ {0,1/3}^n`, sharing levels and window.
pub fn shifted_grids(
    dim: usize,
    window: &RationalBox,
    min_level: i32,
    max_level: i32,
) -> Result<Vec<GridFamily>> {
    all_shifts(dim)?
        .into_iter()
        .map(|s| GridFamily::new(&s, min_level, max_level, window.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn realize_examples() {
        let b = DyadicCube::new1(0, 0, false).realize();
        assert_eq!((b.lower[0], b.upper[0]), (r(0, 1), r(1, 1)));
        let b = DyadicCube::new1(1, 0, true).realize();
        assert_eq!((b.lower[0], b.upper[0]), (r(-1, 6), r(1, 3)));
        let b = DyadicCube::new1(-1, 1, false).realize();
        assert_eq!((b.lower[0], b.upper[0]), (r(2, 1), r(4, 1)));
    }

    #[test]
    fn parent_examples() {
        assert_eq!(DyadicCube::new1(1, 0, false).parent(), DyadicCube::new1(0, 0, false));
        assert_eq!(DyadicCube::new1(1, 3, false).parent(), DyadicCube::new1(0, 1, false));
        let c = DyadicCube::new1(1, 0, true);
        let p = c.parent();
        assert_eq!(p.level(), 0);
        let b = p.realize();
        assert_eq!((b.lower[0], b.upper[0]), (r(-2, 3), r(1, 3)));
        assert!(p.realize().contains_box(&c.realize()));
    }

    #[test]
    fn ancestors_chain() {
        let c = DyadicCube::new1(2, 0, false);
        let chain = c.ancestors(0).unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(chain.iter().map(|c| c.level()).collect::<Vec<_>>(), vec![2, 1, 0]);
        for w in chain.windows(2) {
            assert!(w[1].contains(&w[0]));
            assert!((w[1].volume() / w[0].volume() - 2.0).abs() < 1e-15);
        }
        assert!(c.ancestors(3).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let w = RationalBox::unit(1).unwrap();
        let g = GridFamily::new(&[false], 0, 2, w.clone()).unwrap();
        assert_eq!(g.cubes().len(), 7);

        let g = GridFamily::new(&[true], 0, 0, w).unwrap();
        let boxes: Vec<_> = g.cubes().iter().map(|c| c.realize()).collect();
        assert_eq!(boxes.len(), 2);
        assert_eq!((boxes[0].lower[0], boxes[0].upper[0]), (r(-2, 3), r(1, 3)));
        assert_eq!((boxes[1].lower[0], boxes[1].upper[0]), (r(1, 3), r(4, 3)));

        let empty = RationalBox::new(vec![r(1, 1)], vec![r(1, 1)]).unwrap();
        let g = GridFamily::new(&[false], 0, 3, empty).unwrap();
        assert_eq!(g.enumerate().count(), 0);
    }

    #[test]
    fn shifted_grid_counts() {
        let w1 = RationalBox::unit(1).unwrap();
        let w2 = RationalBox::unit(2).unwrap();
        assert_eq!(shifted_grids(1, &w1, 0, 1).unwrap().len(), 2);
        let g2 = shifted_grids(2, &w2, 0, 1).unwrap();
        assert_eq!(g2.len(), 4);
        assert!(g2[0].shift.iter().all(|s| !s));
        // t = 0 is the standard grid anchored at the origin
        let c = g2[0].level_cubes(0);
        assert_eq!(c, vec![DyadicCube::new2(0, [0, 0], [false, false])]);
        assert!(shifted_grids(3, &w1, 0, 1).is_err());
    }

    #[test]
    fn shift_alternates_direction() {
        // offsets of the cube containing 0 at consecutive levels point in opposite directions
        let lowers: Vec<Rational> = (0..6)
            .map(|k| {
                let c = DyadicCube::new1(k, 0, true);
                c.realize().lower[0] * pow2(k)
            })
            .collect();
        for (k, l) in lowers.iter().enumerate() {
            let expected = if k % 2 == 0 { r(1, 3) } else { r(-1, 3) };
            assert_eq!(*l, expected);
        }
    }

    #[test]
    fn cube_json_shape() {
        let c = DyadicCube::new2(3, [-1, 4], [true, false]);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"dim":2,"level":3,"index":[-1,4],"shift":[1,0]}"#);
        let back: DyadicCube = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<DyadicCube>(r#"{"dim":1,"level":0,"index":[0],"shift":[2]}"#).is_err());
    }
}
