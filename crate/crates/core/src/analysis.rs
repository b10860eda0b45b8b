//! Sampled error norms, convergence tables and brute-force oracles.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::mra1d::{locate, BasisKind, Coord, NestedFamily};
use crate::sparse_nd::{
    collocate_scalar, enumerate_full_elements, enumerate_sparse_elements,
    fast_values_to_surplus, ElementKey, ElementStore, Evaluator, Sampler,
};
use crate::transform1d::{Content, Mode};
use crate::{Error, Result};

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;

/// Monte-Carlo error norms of an interpolant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// Broken H¹ semi-norm; `None` when gradients were not requested.
    pub h1: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

/// Uniform points in `[0,1)^d`, generated sequentially from `seed`.
pub fn sample_points(d: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
        .collect()
}

/// Monte-Carlo L¹, L², L∞ (and optionally H¹) errors of the interpolant held
/// in surplus store `s` against `f`.
///
/// With `h1`, the sampler is asked for first derivatives; `∂_m` of `f` is read
/// from the unit derivative tuple along `m`.
pub fn sampled_errors<S: Sampler + ?Sized>(
    f: &S,
    s: &ElementStore,
    samples: usize,
    seed: u64,
    h1: bool,
) -> Result<ErrorReport> {
    let d = s.dim();
    if f.dim() != d {
        return Err(Error::Input(format!(
            "sampler dimension {} differs from store dimension {d}",
            f.dim()
        )));
    }
    if samples == 0 {
        return Err(Error::Input("need at least one sample".into()));
    }
    let pts = sample_points(d, samples, seed);
    let ev = Evaluator::new(s);
    let order = usize::from(h1);
    let per: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|x| {
            let c: Vec<Coord> = x.iter().map(|&v| Coord::new(v)).collect();
            let mut buf = vec![0.0; (order + 1).pow(d as u32) * f.outputs()];
            f.sample(&c, order, &mut buf)?;
            let mut deriv = vec![0usize; d];
            let e = ev.eval(&c, &deriv) - buf[0];
            let mut g = 0.0;
            if h1 {
                for m in 0..d {
                    deriv[m] = 1;
                    let idx = 1usize << (d - 1 - m);
                    let dm = ev.eval(&c, &deriv) - buf[idx];
                    g += dm * dm;
                    deriv[m] = 0;
                }
            }
            Ok((e, g))
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let (mut l1, mut l2, mut linf, mut g) = (0.0, 0.0, 0.0f64, 0.0);
    for (e, gm) in &per {
        l1 += e.abs();
        l2 += e * e;
        linf = linf.max(e.abs());
        g += gm;
    }
    Ok(ErrorReport {
        l1: l1 / n,
        l2: (l2 / n).sqrt(),
        linf,
        h1: h1.then(|| (g / n).sqrt()),
        samples,
        seed,
    })
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: i32,
    pub h: f64,
    pub errors: ErrorReport,
    /// Orders relative to the previous row (`None` on the first row or when
    /// an error is at round-off).
    pub orders: [Option<f64>; 4],
}

fn order(prev: f64, cur: f64) -> Option<f64> {
    (prev > 1e-14 && cur > 1e-14).then(|| (prev / cur).log2())
}

/// Sparse interpolation of `f` for each `N`, with sampled errors and orders.
pub fn convergence_table<S: Sampler + ?Sized>(
    f: &S,
    family: Arc<NestedFamily>,
    mode: Mode,
    levels: &[i32],
    samples: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input("levels must be strictly ascending".into()));
    }
    let d = f.dim();
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &n in levels {
        let keys = enumerate_sparse_elements(d, n, mode);
        let v = collocate_scalar(f, family.clone(), mode, &keys)?;
        let s = fast_values_to_surplus(&v)?;
        let e = sampled_errors(f, &s, samples, seed, true)?;
        let orders = match rows.last() {
            None => [None; 4],
            Some(p) => {
                let q = &p.errors;
                [
                    order(q.l1, e.l1),
                    order(q.l2, e.l2),
                    order(q.linf, e.linf),
                    order(q.h1.unwrap_or(0.0), e.h1.unwrap_or(0.0)),
                ]
            }
        };
        rows.push(ConvergenceRow {
            n,
            h: 2f64.powi(-n),
            errors: e,
            orders,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `log₂ y` against `x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let ly: Vec<f64> = y.iter().map(|v| v.log2()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Convergence order fitted over a table column (0: L¹, 1: L², 2: L∞, 3: H¹).
pub fn fitted_order(rows: &[ConvergenceRow], column: usize) -> f64 {
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|r| match column {
            0 => r.errors.l1,
            1 => r.errors.l2,
            2 => r.errors.linf,
            _ => r.errors.h1.unwrap_or(f64::NAN),
        })
        .collect();
    -fitted_slope(&x, &y)
}

/// CSV with header `N,h,L1,L1_order,L2,L2_order,Linf,Linf_order,H1,H1_order`.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("N,h,L1,L1_order,L2,L2_order,Linf,Linf_order,H1,H1_order\n");
    let o = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
    for r in rows {
        let e = &r.errors;
        out += &format!(
            "{},{:e},{:.6e},{},{:.6e},{},{:.6e},{},{},{}\n",
            r.n,
            r.h,
            e.l1,
            o(r.orders[0]),
            e.l2,
            o(r.orders[1]),
            e.linf,
            o(r.orders[2]),
            e.h1.map(|v| format!("{v:.6e}")).unwrap_or_default(),
            o(r.orders[3]),
        );
    }
    out
}

const ORACLE_MAX_DOF: usize = 200_000;

/// Points and per-derivative weights of the level-`k` scaling interpolant
/// (`k = -1`: the constant through the root point) in one dimension.
fn interp_stencil(fam: &NestedFamily, mode: Mode, k: i32, at: Coord, deriv: usize) -> Vec<(Coord, Vec<f64>)> {
    let m1 = fam.m() + 1;
    if k < -1 || (k == -1 && mode == Mode::Standard) {
        return Vec::new();
    }
    if k == -1 {
        let mut w = vec![0.0; m1];
        w[0] = if deriv == 0 { 1.0 } else { 0.0 };
        return vec![(fam.point_coord(-1, 0, 0), w)];
    }
    let (cell, _) = locate(at.x, at.side, k as u32);
    let anchors = fam.anchors0();
    (0..=fam.p())
        .map(|r| {
            let a = &anchors[r];
            let x = (cell as f64 + a.to_f64()) / (1u64 << k) as f64;
            let w = (0..m1)
                .map(|l| fam.eval_basis(BasisKind::Scaling, r, l, deriv, k, cell, at))
                .collect();
            (Coord::sided(x, a.side), w)
        })
        .collect()
}

/// `∂^deriv` of the full-tensor scaling interpolant on level vector `k`.
fn tensor_interp<S: Sampler + ?Sized>(
    f: &S,
    fam: &NestedFamily,
    mode: Mode,
    k: &[i32],
    at: &[Coord],
    deriv: &[usize],
) -> Result<f64> {
    let d = k.len();
    let m1 = fam.m() + 1;
    let stencils: Vec<_> = (0..d)
        .map(|m| interp_stencil(fam, mode, k[m], at[m], deriv[m]))
        .collect();
    if stencils.iter().any(|s| s.is_empty()) {
        return Ok(0.0);
    }
    let shape: Vec<usize> = stencils.iter().map(|s| s.len()).collect();
    let total: usize = shape.iter().product();
    let nd = m1.pow(d as u32);
    let mut buf = vec![0.0; nd * f.outputs()];
    let mut idx = vec![0usize; d];
    let mut lt = vec![0usize; d];
    let mut x = vec![Coord::new(0.0); d];
    let mut acc = 0.0;
    for t in 0..total {
        ElementStore::unflatten(&shape, t, &mut idx);
        for m in 0..d {
            x[m] = stencils[m][idx[m]].0;
        }
        f.sample(&x, fam.m(), &mut buf)?;
        for (dl, v) in buf.iter().take(nd).enumerate() {
            ElementStore::unflatten(&vec![m1; d], dl, &mut lt);
            let w: f64 = (0..d).map(|m| stencils[m][idx[m]].1[lt[m]]).product();
            acc += w * v;
        }
    }
    Ok(acc)
}

/// Hierarchical surpluses of `f` on `keys`, each computed straight from its
/// definition: the mixed difference `Π_m (I_{n_m} − I_{n_m−1}) f` of
/// full-mesh scaling interpolants, differentiated and evaluated at the
/// element's points. No transform tables, wavelets or sweeps are involved.
pub fn dense_oracle_surplus<S: Sampler + ?Sized>(
    f: &S,
    family: Arc<NestedFamily>,
    mode: Mode,
    keys: &[ElementKey],
) -> Result<ElementStore> {
    let d = f.dim();
    let mut s = ElementStore::with_keys(family.clone(), d, mode, Content::Surpluses, keys);
    if s.dof() > ORACLE_MAX_DOF {
        return Err(Error::Input(format!(
            "oracle limited to {ORACLE_MAX_DOF} coefficients, got {}",
            s.dof()
        )));
    }
    let m1 = family.m() + 1;
    let blocks: Vec<Vec<f64>> = keys
        .par_iter()
        .map(|key| {
            let shape = s.block_shape(key);
            let len: usize = shape.iter().product();
            let mut slots = vec![0usize; d];
            let mut out = vec![0.0; len];
            for (t, o) in out.iter_mut().enumerate() {
                ElementStore::unflatten(&shape, t, &mut slots);
                let x = s.point_of(key, &slots);
                let deriv: Vec<usize> = (0..d)
                    .map(|m| match key.level(m) {
                        n if n < 0 => 0,
                        n => s.layout(n).q_of(slots[m]) % m1,
                    })
                    .collect();
                let mut k = vec![0i32; d];
                for mask in 0..1usize << d {
                    let mut sign = 1.0;
                    for m in 0..d {
                        let down = (mask >> m) & 1;
                        k[m] = key.level(m) - down as i32;
                        if down == 1 {
                            sign = -sign;
                        }
                    }
                    *o += sign * tensor_interp(f, &family, mode, &k, &x, &deriv)?;
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    for (i, b) in blocks.into_iter().enumerate() {
        s.block_mut(i).copy_from_slice(&b);
    }
    Ok(s)
}

/// Full-tensor interpolant (`lo ≤ n_m ≤ N`) of `f` through
/// [`dense_oracle_surplus`]; limited to small instances.
pub fn dense_oracle_interp<S: Sampler + ?Sized>(
    f: &S,
    family: Arc<NestedFamily>,
    mode: Mode,
    n: i32,
) -> Result<ElementStore> {
    let d = f.dim();
    if d > 3 || n > 4 {
        return Err(Error::Input(format!("oracle limited to d ≤ 3, N ≤ 4 (d={d}, N={n})")));
    }
    let keys = enumerate_full_elements(d, n, mode);
    dense_oracle_surplus(f, family, mode, &keys)
}

/// The sparse-space variant of [`dense_oracle_interp`].
pub fn dense_oracle_sparse<S: Sampler + ?Sized>(
    f: &S,
    family: Arc<NestedFamily>,
    mode: Mode,
    n: i32,
) -> Result<ElementStore> {
    let keys = enumerate_sparse_elements(f.dim(), n, mode);
    dense_oracle_surplus(f, family, mode, &keys)
}
