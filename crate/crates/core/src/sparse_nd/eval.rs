use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::key::ElementKey;
use super::store::ElementStore;
use crate::mra1d::Coord;
use crate::transform1d::Content;
use crate::{Error, Result};

/// Contracts a row-major block with one vector per dimension.
pub(crate) fn contract(block: &[f64], vecs: &[&[f64]], scratch: &mut Vec<f64>, tmp: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend_from_slice(block);
    for v in vecs.iter().rev() {
        let s = v.len();
        let n = scratch.len() / s;
        tmp.clear();
        tmp.extend((0..n).map(|o| {
            scratch[o * s..(o + 1) * s]
                .iter()
                .zip(v.iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
        }));
        std::mem::swap(scratch, tmp);
    }
    scratch[0]
}

/// Repeated evaluation of a surplus store's interpolant.
///
/// Per call, each dimension's basis values are computed once per level; each
/// stored level vector then contributes through one hash lookup.
pub struct Evaluator<'a> {
    store: &'a ElementStore,
    levels: Vec<Vec<i32>>,
    lo: i32,
    hi: Vec<i32>,
}

impl<'a> Evaluator<'a> {
    pub fn new(store: &'a ElementStore) -> Self {
        Self {
            store,
            levels: store.level_vectors().cloned().collect(),
            lo: store.mode().lowest_level(),
            hi: store.max_levels(),
        }
    }

    /// `∂^deriv` of the interpolant at a side-tagged point.
    pub fn eval(&self, x: &[Coord], deriv: &[usize]) -> f64 {
        let s = self.store;
        let fam = s.family();
        let d = s.dim();
        let nb = fam.basis_len();
        let mut buf = vec![0.0; nb];
        // per dimension, per level: (cell, slot values, all zero?)
        let mut tables: Vec<Vec<(i32, Vec<f64>, bool)>> = Vec::with_capacity(d);
        for m in 0..d {
            let mut row = Vec::with_capacity((self.hi[m] - self.lo + 1) as usize);
            for n in self.lo..=self.hi[m] {
                let lay = s.layout(n);
                let cell = fam.level_values(n, x[m], deriv[m], &mut buf).unwrap_or(0);
                let vals: Vec<f64> = (0..lay.len).map(|k| buf[lay.q_of(k)]).collect();
                let zero = vals.iter().all(|v| *v == 0.0);
                row.push((cell as i32, vals, zero));
            }
            tables.push(row);
        }
        let mut raw = vec![0i32; 2 * d];
        let mut scratch = Vec::new();
        let mut tmp = Vec::new();
        let mut acc = 0.0;
        'outer: for lv in &self.levels {
            let mut vecs: Vec<&[f64]> = Vec::with_capacity(d);
            for m in 0..d {
                let (cell, vals, zero) = &tables[m][(lv[m] - self.lo) as usize];
                if *zero {
                    continue 'outer;
                }
                raw[m] = lv[m];
                raw[d + m] = *cell;
                vecs.push(vals);
            }
            if let Some(idx) = s.index_of(&raw) {
                acc += contract(s.block(idx), &vecs, &mut scratch, &mut tmp);
            }
        }
        acc
    }
}

/// `∂^deriv` of the interpolant at `x` (interface points go to the right-hand
/// cell except at 1).
pub fn eval_interp_nd(s: &ElementStore, x: &[f64], deriv: &[usize]) -> f64 {
    let c: Vec<Coord> = x.iter().map(|&v| Coord::new(v)).collect();
    Evaluator::new(s).eval(&c, deriv)
}

/// Side-aware variant of [`eval_interp_nd`].
pub fn eval_interp_nd_sided(s: &ElementStore, x: &[Coord], deriv: &[usize]) -> f64 {
    Evaluator::new(s).eval(x, deriv)
}

/// `Σ b · Π_m ω_m` over every stored coefficient.
pub fn integrate_nd(s: &ElementStore) -> f64 {
    let fam = s.family();
    let d = s.dim();
    let mut scratch = Vec::new();
    let mut tmp = Vec::new();
    let mut cache: std::collections::HashMap<i32, Vec<f64>> = Default::default();
    let mut acc = 0.0;
    for (idx, key) in s.keys().iter().enumerate() {
        for m in 0..d {
            let n = key.level(m);
            cache.entry(n).or_insert_with(|| {
                let lay = s.layout(n);
                (0..lay.len).map(|k| fam.weight(n, lay.q_of(k))).collect()
            });
        }
        let vecs: Vec<&[f64]> = key.levels().iter().map(|n| cache[n].as_slice()).collect();
        acc += contract(s.block(idx), &vecs, &mut scratch, &mut tmp);
    }
    acc
}

/// Interpolant values (and derivatives) of `s` at every slot of `key`,
/// laid out like `key`'s block.
pub fn interpolant_on_element(s: &ElementStore, key: &ElementKey) -> Result<Vec<f64>> {
    if s.content() != Content::Surpluses {
        return Err(Error::Input("interpolation needs a surplus store".into()));
    }
    let fam = s.family();
    let m1 = fam.m() + 1;
    let shape = s.block_shape(key);
    let len: usize = shape.iter().product();
    let ev = Evaluator::new(s);
    let d = s.dim();
    let mut slots = vec![0usize; d];
    let mut deriv = vec![0usize; d];
    let mut out = vec![0.0; len];
    for (k, o) in out.iter_mut().enumerate() {
        ElementStore::unflatten(&shape, k, &mut slots);
        let x = s.point_of(key, &slots);
        for m in 0..d {
            deriv[m] = if key.level(m) < 0 {
                0
            } else {
                s.layout(key.level(m)).q_of(slots[m]) % m1
            };
        }
        *o = ev.eval(&x, &deriv);
    }
    Ok(out)
}

/// One distinct collocation point per line: coordinates, then `|n|₁`.
pub fn grid_dump(s: &ElementStore) -> String {
    let fam = s.family();
    let m1 = fam.m() + 1;
    let d = s.dim();
    let mut seen = BTreeSet::new();
    let mut out = String::new();
    let mut slots = vec![0usize; d];
    for key in s.keys() {
        let shape = s.block_shape(key);
        let len: usize = shape.iter().product();
        for k in 0..len {
            ElementStore::unflatten(&shape, k, &mut slots);
            let pts: Vec<usize> = (0..d)
                .map(|m| s.layout(key.level(m)).q_of(slots[m]) / m1)
                .collect();
            if !seen.insert((key.clone(), pts)) {
                continue;
            }
            let x = s.point_of(key, &slots);
            let coords: Vec<String> = x.iter().map(|c| format!("{}", c.x)).collect();
            let _ = writeln!(out, "{},{}", coords.join(","), key.level_sum());
        }
    }
    out
}
