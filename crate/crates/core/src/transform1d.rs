//! One-dimensional hierarchical transforms, evaluation and quadrature.
//!
//! Level `n ≥ 1` stores the wavelet points `x̃^j_{i,n}`, `j < 2^{n-1}`; level
//! 0 stores the anchors and, in corrected mode, level −1 stores the single
//! value `f(x_{i*})`. Blocks are laid out per level as `(j, i, l)`.
//!
//! In corrected mode the level-0 slot `(i*, 0)` duplicates the level −1 point
//! and is kept at zero in both the value and the surplus representation.

use std::sync::Arc;

use crate::mra1d::{Coord, NestedFamily};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Standard,
    /// Adds the single-point level −1.
    Corrected,
}

impl Mode {
    pub fn lowest_level(self) -> i32 {
        match self {
            Mode::Standard => 0,
            Mode::Corrected => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Content {
    Values,
    Surpluses,
}

/// Per-level dense storage of point values or hierarchical surpluses.
#[derive(Debug, Clone)]
pub struct Grid1D {
    family: Arc<NestedFamily>,
    n_max: u32,
    mode: Mode,
    content: Content,
    levels: Vec<Vec<f64>>,
}

pub type ValueGrid1D = Grid1D;
pub type Surplus1D = Grid1D;

impl Grid1D {
    pub fn zeros(family: Arc<NestedFamily>, n_max: u32, mode: Mode, content: Content) -> Self {
        let nb = family.basis_len();
        let levels = (mode.lowest_level()..=n_max as i32)
            .map(|n| {
                if n < 0 {
                    vec![0.0]
                } else {
                    vec![0.0; NestedFamily::cells_at(n) as usize * nb]
                }
            })
            .collect();
        Self {
            family,
            n_max,
            mode,
            content,
            levels,
        }
    }

    /// Samples `f(x, deriv)` at every nested point up to level `n_max`.
    pub fn collocate<F>(family: Arc<NestedFamily>, n_max: u32, mode: Mode, f: F) -> Self
    where
        F: Fn(Coord, usize) -> f64,
    {
        let mut g = Self::zeros(family.clone(), n_max, mode, Content::Values);
        let m1 = family.m() + 1;
        for n in mode.lowest_level()..=n_max as i32 {
            if n < 0 {
                g.levels[0][0] = f(family.point_coord(-1, 0, 0), 0);
                continue;
            }
            for j in 0..NestedFamily::cells_at(n) {
                for i in 0..=family.p() {
                    let at = family.point_coord(n, j, i);
                    for l in 0..m1 {
                        if g.is_dead(n, i, l) {
                            continue;
                        }
                        *g.get_mut(n, j, i, l) = f(at, l);
                    }
                }
            }
        }
        g
    }

    pub fn family(&self) -> &Arc<NestedFamily> {
        &self.family
    }
    pub fn n_max(&self) -> u32 {
        self.n_max
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn content(&self) -> Content {
        self.content
    }

    /// The corrected-mode level-0 slot shadowed by level −1.
    pub fn is_dead(&self, n: i32, i: usize, l: usize) -> bool {
        self.mode == Mode::Corrected && n == 0 && l == 0 && i == self.family.istar()
    }

    fn slot(&self, n: i32, j: u64, i: usize, l: usize) -> (usize, usize) {
        let lvl = (n - self.mode.lowest_level()) as usize;
        if n < 0 {
            return (lvl, 0);
        }
        let nb = self.family.basis_len();
        (lvl, j as usize * nb + i * (self.family.m() + 1) + l)
    }

    pub fn get(&self, n: i32, j: u64, i: usize, l: usize) -> f64 {
        let (a, b) = self.slot(n, j, i, l);
        self.levels[a][b]
    }

    pub fn get_mut(&mut self, n: i32, j: u64, i: usize, l: usize) -> &mut f64 {
        let (a, b) = self.slot(n, j, i, l);
        &mut self.levels[a][b]
    }

    /// Raw storage of level `n`.
    pub fn level(&self, n: i32) -> &[f64] {
        &self.levels[(n - self.mode.lowest_level()) as usize]
    }

    pub fn level_mut(&mut self, n: i32) -> &mut [f64] {
        let k = (n - self.mode.lowest_level()) as usize;
        &mut self.levels[k]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.levels
            .iter()
            .flatten()
            .zip(other.levels.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Value `f^{(l')}` at the level-`m` full-mesh point `x^j_{r,m}`, read
    /// from wherever that point is stored.
    fn mesh_value(&self, m: u32, j: u64, r: usize, l: usize) -> f64 {
        let (n, cell, i) = self.family.resolve(m, j, r);
        if self.is_dead(n, i, l) {
            self.get(-1, 0, 0, 0)
        } else {
            self.get(n, cell, i, l)
        }
    }

    /// `∂^l I_{n-1} f(x̃^j_{i,n})` from the values of levels below `n`.
    fn predict(&self, n: u32, j: u64, i: usize, l: usize) -> f64 {
        let fam = &self.family;
        let m1 = fam.m() + 1;
        let mut acc = 0.0;
        for ip in 0..=fam.p() {
            for lp in 0..m1 {
                let scale = 2f64.powi((n as i32 - 1) * (l as i32 - lp as i32));
                let t = fam.transform_table_f64()[(i * m1 + l) * fam.basis_len() + ip * m1 + lp];
                if t != 0.0 {
                    acc += scale * t * self.mesh_value(n - 1, j, ip, lp);
                }
            }
        }
        acc
    }

    fn expect(&self, c: Content) -> Result<()> {
        if self.content != c {
            return Err(Error::Input(format!("expected {c:?}, got {:?}", self.content)));
        }
        Ok(())
    }
}

/// `F⁻¹` (standard) or `F_c⁻¹` (corrected), depending on the grid's mode.
pub fn values_to_surplus(g: &ValueGrid1D) -> Result<Surplus1D> {
    g.expect(Content::Values)?;
    let fam = g.family.clone();
    let mut s = g.clone();
    s.content = Content::Surpluses;
    let m1 = fam.m() + 1;
    if g.mode == Mode::Corrected {
        let root = g.get(-1, 0, 0, 0);
        for i in 0..=fam.p() {
            *s.get_mut(0, 0, i, 0) = if i == fam.istar() {
                0.0
            } else {
                g.get(0, 0, i, 0) - root
            };
        }
    }
    for n in 1..=g.n_max {
        for j in 0..NestedFamily::cells_at(n as i32) {
            for i in 0..=fam.p() {
                for l in 0..m1 {
                    *s.get_mut(n as i32, j, i, l) = g.get(n as i32, j, i, l) - g.predict(n, j, i, l);
                }
            }
        }
    }
    Ok(s)
}

/// `F` (standard) or `F_c` (corrected): levels in ascending order, in place.
pub fn surplus_to_values(s: &Surplus1D) -> Result<ValueGrid1D> {
    s.expect(Content::Surpluses)?;
    let fam = s.family.clone();
    let mut g = s.clone();
    g.content = Content::Values;
    let m1 = fam.m() + 1;
    if s.mode == Mode::Corrected {
        let root = s.get(-1, 0, 0, 0);
        for i in 0..=fam.p() {
            *g.get_mut(0, 0, i, 0) = if i == fam.istar() {
                0.0
            } else {
                s.get(0, 0, i, 0) + root
            };
        }
    }
    for n in 1..=s.n_max {
        for j in 0..NestedFamily::cells_at(n as i32) {
            for i in 0..=fam.p() {
                for l in 0..m1 {
                    let pred = g.predict(n, j, i, l);
                    *g.get_mut(n as i32, j, i, l) += pred;
                }
            }
        }
    }
    Ok(g)
}

/// Corrected-mode `F_c⁻¹`; rejects standard grids.
pub fn values_to_surplus_corrected(g: &ValueGrid1D) -> Result<Surplus1D> {
    if g.mode != Mode::Corrected {
        return Err(Error::Input("grid is not in corrected mode".into()));
    }
    values_to_surplus(g)
}

/// Corrected-mode `F_c`; rejects standard grids.
pub fn surplus_to_values_corrected(s: &Surplus1D) -> Result<ValueGrid1D> {
    if s.mode != Mode::Corrected {
        return Err(Error::Input("grid is not in corrected mode".into()));
    }
    surplus_to_values(s)
}

/// `∂^deriv` of the hierarchical interpolant at a coordinate.
pub fn eval_interp_1d(s: &Surplus1D, at: Coord, deriv: usize) -> f64 {
    let fam = &s.family;
    let nb = fam.basis_len();
    let mut buf = vec![0.0; nb];
    let mut acc = 0.0;
    for n in s.mode.lowest_level()..=s.n_max as i32 {
        let Some(cell) = fam.level_values(n, at, deriv, &mut buf) else {
            continue;
        };
        if n < 0 {
            acc += buf[0] * s.get(-1, 0, 0, 0);
            continue;
        }
        let block = &s.level(n)[cell as usize * nb..(cell as usize + 1) * nb];
        acc += block.iter().zip(&buf).map(|(b, v)| b * v).sum::<f64>();
    }
    acc
}

/// `Σ ω b` over all stored surpluses.
pub fn integrate_1d(s: &Surplus1D) -> f64 {
    let fam = &s.family;
    let nb = fam.basis_len();
    let mut acc = 0.0;
    for n in s.mode.lowest_level()..=s.n_max as i32 {
        if n < 0 {
            acc += s.get(-1, 0, 0, 0);
            continue;
        }
        for (k, b) in s.level(n).iter().enumerate() {
            acc += fam.weight(n, k % nb) * b;
        }
    }
    acc
}
