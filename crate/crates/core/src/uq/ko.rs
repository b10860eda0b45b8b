use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adaptive::{adaptive_interpolate, AdaptiveTables, Criterion};
use crate::mra1d::{Coord, NestedFamily};
use crate::sparse_nd::{
    fast_values_to_surplus, integrate_nd, sample_element, ElementKey, ElementStore, Sampler,
};
use crate::transform1d::{Content, Mode};
use crate::{Error, Result};

/// Random initial conditions: 1D `(1, 0.1Y, 0)`, 2D `(1, 0.1Y₁, Y₂)`,
/// 3D `(Y₁, Y₂, Y₃)`, with `Y ~ U(-1,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KoCase {
    One,
    Two,
    Three,
}

impl KoCase {
    pub fn from_dim(d: usize) -> Result<Self> {
        match d {
            1 => Ok(KoCase::One),
            2 => Ok(KoCase::Two),
            3 => Ok(KoCase::Three),
            _ => Err(Error::Input(format!("K-O cases have 1, 2 or 3 random inputs, not {d}"))),
        }
    }

    pub fn dim(self) -> usize {
        match self {
            KoCase::One => 1,
            KoCase::Two => 2,
            KoCase::Three => 3,
        }
    }

    /// Initial state: `(y, ∂_{Y_1} y, …)` blocks of three, see [`ko_rhs`].
    pub fn initial_state(self, y: &[f64], hermite: bool) -> Vec<f64> {
        let base = match self {
            KoCase::One => vec![1.0, 0.1 * y[0], 0.0],
            KoCase::Two => vec![1.0, 0.1 * y[0], y[1]],
            KoCase::Three => vec![y[0], y[1], y[2]],
        };
        if !hermite {
            return base;
        }
        match self {
            KoCase::One => [base, vec![0.0, 0.1, 0.0]].concat(),
            KoCase::Two => [base, vec![0.0, 0.1, 0.0], vec![0.0, 0.0, 1.0], vec![0.0; 3]].concat(),
            KoCase::Three => base,
        }
    }
}

/// Right-hand side of the K-O system. State layout: `y` (3 values), then for
/// Hermite runs `∂_Y y` (1D), or `∂_{Y₁} y, ∂_{Y₂} y, ∂_{Y₁Y₂} y` (2D).
pub fn ko_rhs(s: &[f64]) -> Result<Vec<f64>> {
    let f = |y: &[f64]| [y[0] * y[2], -y[1] * y[2], -y[0] * y[0] + y[1] * y[1]];
    // First-order sensitivity along one direction.
    let lin = |y: &[f64], a: &[f64]| {
        [
            a[0] * y[2] + y[0] * a[2],
            -a[1] * y[2] - y[1] * a[2],
            -2.0 * y[0] * a[0] + 2.0 * y[1] * a[1],
        ]
    };
    match s.len() {
        3 => Ok(f(s).to_vec()),
        6 => Ok([f(s), lin(s, &s[3..6])].concat()),
        12 => {
            let (y, a, b, c) = (&s[0..3], &s[3..6], &s[6..9], &s[9..12]);
            let l = lin(y, c);
            let mixed = [
                l[0] + a[0] * b[2] + b[0] * a[2],
                l[1] - a[1] * b[2] - b[1] * a[2],
                -2.0 * (a[0] * b[0] + y[0] * c[0]) + 2.0 * (a[1] * b[1] + y[1] * c[1]),
            ];
            Ok([f(y), lin(y, a), lin(y, b), mixed].concat())
        }
        n => Err(Error::Input(format!("K-O state has 3, 6 or 12 entries, not {n}"))),
    }
}

/// One SSP-RK3 step.
pub fn rk3_step(s: &mut [f64], dt: f64) -> Result<()> {
    let k1 = ko_rhs(s)?;
    let u1: Vec<f64> = s.iter().zip(&k1).map(|(a, k)| a + dt * k).collect();
    let k2 = ko_rhs(&u1)?;
    let u2: Vec<f64> = s
        .iter()
        .zip(&u1)
        .zip(&k2)
        .map(|((a, b), k)| 0.75 * a + 0.25 * (b + dt * k))
        .collect();
    let k3 = ko_rhs(&u2)?;
    for ((a, b), k) in s.iter_mut().zip(&u2).zip(&k3) {
        *a = *a / 3.0 + 2.0 / 3.0 * (b + dt * k);
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct KoConfig {
    pub case: KoCase,
    pub dt: f64,
    pub t_end: f64,
    pub criterion: Criterion,
    pub n_max: i32,
    pub family: Arc<NestedFamily>,
    /// Time steps between refinement passes and output rows.
    pub stride: usize,
}

impl KoConfig {
    pub fn validate(&self) -> Result<()> {
        let m = self.family.m();
        if m > 1 || (m == 1 && self.case == KoCase::Three) {
            return Err(Error::Capability(
                "Hermite runs need M = 1 and at most two random inputs".into(),
            ));
        }
        if !(self.dt > 0.0) || self.t_end < 0.0 || self.stride == 0 {
            return Err(Error::Input("need dt > 0, t_end ≥ 0 and stride ≥ 1".into()));
        }
        Ok(())
    }

    fn hermite(&self) -> bool {
        self.family.m() == 1
    }
}

/// One row of the variance time series.
#[derive(Debug, Clone, PartialEq)]
pub struct KoRow {
    pub t: f64,
    pub variance: [f64; 3],
    pub mean: [f64; 3],
    pub dof: usize,
}

#[derive(Debug, Clone)]
pub struct KoResult {
    pub rows: Vec<KoRow>,
    pub tables: AdaptiveTables,
}

impl KoResult {
    /// CSV `t,var_y1,var_y2,var_y3,dof`.
    pub fn csv(&self) -> String {
        let mut s = String::from("t,var_y1,var_y2,var_y3,dof\n");
        for r in &self.rows {
            s += &format!(
                "{:.4},{:.10e},{:.10e},{:.10e},{}\n",
                r.t, r.variance[0], r.variance[1], r.variance[2], r.dof
            );
        }
        s
    }

    /// Distinct collocation points of the final grid, as `Y ∈ [-1,1]^d`.
    pub fn points(&self) -> Vec<Vec<f64>> {
        point_list(&self.tables)
            .into_iter()
            .map(|p| p.iter().map(|c| 2.0 * c.x - 1.0).collect())
            .collect()
    }
}

fn point_key(x: &[Coord]) -> Vec<u64> {
    x.iter().map(|c| c.x.to_bits()).collect()
}

fn element_points(fam: &NestedFamily, key: &ElementKey) -> Vec<Vec<Coord>> {
    let d = key.dim();
    let per: Vec<usize> = key
        .levels()
        .iter()
        .map(|&n| if n < 0 { 1 } else { fam.p() + 1 })
        .collect();
    let total: usize = per.iter().product();
    let mut ip = vec![0usize; d];
    (0..total)
        .map(|t| {
            ElementStore::unflatten(&per, t, &mut ip);
            (0..d).map(|m| fam.point_coord(key.level(m), key.cell(m), ip[m])).collect()
        })
        .collect()
}

fn point_list(t: &AdaptiveTables) -> Vec<Vec<Coord>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for k in t.keys() {
        for p in element_points(t.family(), k) {
            if seen.insert(point_key(&p)) {
                out.push(p);
            }
        }
    }
    out
}

/// Sampler reading ensemble states: three outputs with derivatives scaled
/// from `Y` to the collocation variable `x = (Y+1)/2`.
struct EnsembleSampler<'a> {
    d: usize,
    states: &'a HashMap<Vec<u64>, Vec<f64>>,
}

impl Sampler for EnsembleSampler<'_> {
    fn dim(&self) -> usize {
        self.d
    }
    fn outputs(&self) -> usize {
        3
    }
    fn sample(&self, x: &[Coord], order: usize, out: &mut [f64]) -> Result<()> {
        let s = self
            .states
            .get(&point_key(x))
            .ok_or_else(|| Error::Sampler(format!("no ensemble member at {x:?}")))?;
        let nd = (order + 1).pow(self.d as u32);
        for c in 0..3 {
            for dl in 0..nd {
                // dl enumerates derivative tuples; each set bit doubles the scale.
                let (block, scale) = match (self.d, dl) {
                    (_, 0) => (0, 1.0),
                    (1, 1) => (1, 2.0),
                    (2, 1) => (2, 2.0),
                    (2, 2) => (1, 2.0),
                    (2, 3) => (3, 4.0),
                    _ => return Err(Error::Capability("unsupported derivative order".into())),
                };
                out[c * nd + dl] = scale * s[3 * block + c];
            }
        }
        Ok(())
    }
}

/// Sampler for the initial state only.
struct InitialSampler {
    case: KoCase,
    hermite: bool,
}

impl Sampler for InitialSampler {
    fn dim(&self) -> usize {
        self.case.dim()
    }
    fn outputs(&self) -> usize {
        3
    }
    fn sample(&self, x: &[Coord], order: usize, out: &mut [f64]) -> Result<()> {
        let y: Vec<f64> = x.iter().map(|c| 2.0 * c.x - 1.0).collect();
        let mut map = HashMap::new();
        map.insert(point_key(x), self.case.initial_state(&y, self.hermite));
        EnsembleSampler {
            d: self.case.dim(),
            states: &map,
        }
        .sample(x, order, out)
    }
}

/// Mean and variance of the three components from the current surpluses and
/// squared values.
fn moments(t: &AdaptiveTables, states: &HashMap<Vec<u64>, Vec<f64>>) -> Result<([f64; 3], [f64; 3])> {
    let fam = t.family().clone();
    let d = t.dim();
    // Squared ensemble, derivatives by the product rule.
    let sq: HashMap<Vec<u64>, Vec<f64>> = states
        .iter()
        .map(|(k, s)| {
            let nb = s.len() / 3;
            let mut q = vec![0.0; s.len()];
            for c in 0..3 {
                let y = s[c];
                q[c] = y * y;
                if nb == 2 {
                    q[3 + c] = 2.0 * y * s[3 + c];
                } else if nb == 4 {
                    q[3 + c] = 2.0 * y * s[3 + c];
                    q[6 + c] = 2.0 * y * s[6 + c];
                    q[9 + c] = 2.0 * (s[3 + c] * s[6 + c] + y * s[9 + c]);
                }
            }
            (k.clone(), q)
        })
        .collect();
    let sampler = EnsembleSampler { d, states: &sq };
    let keys = t.keys();
    let blocks: Vec<Vec<Vec<f64>>> = keys
        .par_iter()
        .map(|k| sample_element(&sampler, &fam, Mode::Corrected, k))
        .collect::<Result<_>>()?;
    let mut mean = [0.0; 3];
    let mut var = [0.0; 3];
    for c in 0..3 {
        let mut v = ElementStore::with_keys(fam.clone(), d, Mode::Corrected, Content::Values, keys);
        for (i, b) in blocks.iter().enumerate() {
            v.block_mut(i).copy_from_slice(&b[c]);
        }
        let second = integrate_nd(&fast_values_to_surplus(&v)?);
        mean[c] = integrate_nd(t.surpluses(c));
        var[c] = second - mean[c] * mean[c];
    }
    Ok((mean, var))
}

/// Surplus stores of the current ensemble on the table's keys.
fn ensemble_surpluses(t: &AdaptiveTables, states: &HashMap<Vec<u64>, Vec<f64>>) -> Result<Vec<ElementStore>> {
    let fam = t.family().clone();
    let d = t.dim();
    let sampler = EnsembleSampler { d, states };
    let keys = t.keys();
    let blocks: Vec<Vec<Vec<f64>>> = keys
        .par_iter()
        .map(|k| sample_element(&sampler, &fam, Mode::Corrected, k))
        .collect::<Result<_>>()?;
    (0..3)
        .map(|c| {
            let mut v = ElementStore::with_keys(fam.clone(), d, Mode::Corrected, Content::Values, keys);
            for (i, b) in blocks.iter().enumerate() {
                v.block_mut(i).copy_from_slice(&b[c]);
            }
            fast_values_to_surplus(&v)
        })
        .collect()
}

/// Integrates `state` through `steps` RK3 steps.
fn replay(state: &mut [f64], dt: f64, steps: usize) -> Result<()> {
    for _ in 0..steps {
        rk3_step(state, dt)?;
    }
    Ok(())
}

/// Adaptive collocation run: every ensemble member is advanced with RK3;
/// every `stride` steps the surpluses are recomputed, the grid is refined
/// once (no coarsening) and new members are replayed from `t = 0`.
pub fn ko_run(cfg: &KoConfig) -> Result<KoResult> {
    cfg.validate()?;
    let d = cfg.case.dim();
    let hermite = cfg.hermite();
    let init = InitialSampler {
        case: cfg.case,
        hermite,
    };
    let mut tables = adaptive_interpolate(&init, cfg.family.clone(), cfg.n_max, cfg.criterion, false)?;
    let mut states: HashMap<Vec<u64>, Vec<f64>> = HashMap::new();
    let y_of = |p: &[Coord]| -> Vec<f64> { p.iter().map(|c| 2.0 * c.x - 1.0).collect() };
    for p in point_list(&tables) {
        states.insert(point_key(&p), cfg.case.initial_state(&y_of(&p), hermite));
    }
    let total = (cfg.t_end / cfg.dt).round() as usize;
    let mut rows = Vec::new();
    let (mean, variance) = moments(&tables, &states)?;
    rows.push(KoRow {
        t: 0.0,
        variance,
        mean,
        dof: tables.dof(),
    });
    let mut step = 0;
    while step < total {
        let n = cfg.stride.min(total - step);
        states
            .par_iter_mut()
            .try_for_each(|(_, s)| replay(s, cfg.dt, n))?;
        step += n;
        tables.update_surpluses(ensemble_surpluses(&tables, &states)?)?;
        let fam = cfg.family.clone();
        let mut provider = |keys: &[ElementKey]| -> Result<Vec<Vec<Vec<f64>>>> {
            let mut fresh: Vec<Vec<Coord>> = Vec::new();
            let mut seen = std::collections::HashSet::new();
            for k in keys {
                for p in element_points(&fam, k) {
                    let pk = point_key(&p);
                    if !states.contains_key(&pk) && seen.insert(pk) {
                        fresh.push(p);
                    }
                }
            }
            let computed: Vec<(Vec<u64>, Vec<f64>)> = fresh
                .par_iter()
                .map(|p| {
                    let mut s = cfg.case.initial_state(&y_of(p), hermite);
                    replay(&mut s, cfg.dt, step)?;
                    Ok((point_key(p), s))
                })
                .collect::<Result<_>>()?;
            states.extend(computed);
            let sampler = EnsembleSampler { d, states: &states };
            keys.par_iter()
                .map(|k| sample_element(&sampler, &fam, Mode::Corrected, k))
                .collect()
        };
        tables.refine_evolving(&mut provider)?;
        let (mean, variance) = moments(&tables, &states)?;
        rows.push(KoRow {
            t: step as f64 * cfg.dt,
            variance,
            mean,
            dof: tables.dof(),
        });
    }
    Ok(KoResult { rows, tables })
}

/// Monte-Carlo variance of each component at `t` with its standard error.
pub fn ko_monte_carlo(case: KoCase, dt: f64, t: f64, samples: usize, seed: u64) -> Result<([f64; 3], [f64; 3])> {
    if samples < 2 {
        return Err(Error::Input("need at least two samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ys: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..case.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let steps = (t / dt).round() as usize;
    let finals: Vec<Vec<f64>> = ys
        .par_iter()
        .map(|y| {
            let mut s = case.initial_state(y, false);
            replay(&mut s, dt, steps)?;
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mut var = [0.0; 3];
    let mut se = [0.0; 3];
    for c in 0..3 {
        let mean = finals.iter().map(|s| s[c]).sum::<f64>() / n;
        let m2 = finals.iter().map(|s| (s[c] - mean).powi(2)).sum::<f64>() / n;
        let m4 = finals.iter().map(|s| (s[c] - mean).powi(4)).sum::<f64>() / n;
        var[c] = m2 * n / (n - 1.0);
        se[c] = ((m4 - m2 * m2) / n).max(0.0).sqrt();
    }
    Ok((var, se))
}

/// `y₁² + y₂² + y₃²`, conserved by the exact flow.
pub fn ko_invariant(s: &[f64]) -> f64 {
    s[..3].iter().map(|v| v * v).sum()
}
