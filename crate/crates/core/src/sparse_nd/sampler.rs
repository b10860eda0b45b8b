use std::sync::Arc;

use rayon::prelude::*;

use super::key::ElementKey;
use super::store::{ElementStore, LevelLayout};
use crate::mra1d::{Coord, NestedFamily};
use crate::transform1d::{Content, Mode};
use crate::{Error, Result};

/// Source of point values and mixed derivatives.
///
/// `sample` writes `outputs() * (order+1)^d` numbers: for each output
/// component, the mixed derivatives `∂^l` for `l ∈ [0, order]^d` in row-major
/// order (last dimension fastest). Coordinates carry side tags.
pub trait Sampler: Sync {
    fn dim(&self) -> usize;

    fn outputs(&self) -> usize {
        1
    }

    fn sample(&self, x: &[Coord], order: usize, out: &mut [f64]) -> Result<()>;
}

/// Wraps a closure with the [`Sampler::sample`] signature.
pub struct FnSampler<F> {
    dim: usize,
    outputs: usize,
    f: F,
}

impl<F> FnSampler<F>
where
    F: Fn(&[Coord], usize, &mut [f64]) -> Result<()> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, outputs: 1, f }
    }

    pub fn with_outputs(dim: usize, outputs: usize, f: F) -> Self {
        Self { dim, outputs, f }
    }
}

impl<F> Sampler for FnSampler<F>
where
    F: Fn(&[Coord], usize, &mut [f64]) -> Result<()> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn outputs(&self) -> usize {
        self.outputs
    }
    fn sample(&self, x: &[Coord], order: usize, out: &mut [f64]) -> Result<()> {
        (self.f)(x, order, out)
    }
}

/// Value-only sampler; asking it for derivatives is an error.
pub struct ValueSampler<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[Coord]) -> f64 + Sync> ValueSampler<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[Coord]) -> f64 + Sync> Sampler for ValueSampler<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn sample(&self, x: &[Coord], order: usize, out: &mut [f64]) -> Result<()> {
        if order > 0 {
            return Err(Error::Sampler("value-only sampler cannot supply derivatives".into()));
        }
        out[0] = (self.f)(x);
        Ok(())
    }
}

/// Samples every point of one element; returns one block per output.
pub fn sample_element<S: Sampler + ?Sized>(
    sampler: &S,
    family: &NestedFamily,
    mode: Mode,
    key: &ElementKey,
) -> Result<Vec<Vec<f64>>> {
    let d = key.dim();
    if sampler.dim() != d {
        return Err(Error::Input(format!(
            "sampler dimension {} differs from element dimension {d}",
            sampler.dim()
        )));
    }
    let m1 = family.m() + 1;
    let layouts: Vec<LevelLayout> = key
        .levels()
        .iter()
        .map(|&n| LevelLayout::new(family, mode, n))
        .collect();
    let shape: Vec<usize> = layouts.iter().map(|l| l.len).collect();
    let len: usize = shape.iter().product();
    let outputs = sampler.outputs();
    let nd = m1.pow(d as u32);
    let mut blocks = vec![vec![0.0; len]; outputs];
    let mut buf = vec![0.0; outputs * nd];

    // Iterate over point tuples (one anchor index per dimension).
    let pts_per_dim: Vec<usize> = key
        .levels()
        .iter()
        .map(|&n| if n < 0 { 1 } else { family.p() + 1 })
        .collect();
    let npts: usize = pts_per_dim.iter().product();
    let mut ip = vec![0usize; d];
    let mut coords = vec![Coord::new(0.0); d];
    let mut lt = vec![0usize; d];
    let deriv_shape = vec![m1; d];
    for t in 0..npts {
        ElementStore::unflatten(&pts_per_dim, t, &mut ip);
        for m in 0..d {
            coords[m] = family.point_coord(key.level(m), key.cell(m), ip[m]);
        }
        sampler.sample(&coords, family.m(), &mut buf)?;
        for dl in 0..nd {
            ElementStore::unflatten(&deriv_shape, dl, &mut lt);
            let mut flat = 0usize;
            let mut ok = true;
            for m in 0..d {
                let q = ip[m] * m1 + lt[m];
                let slot = if key.level(m) < 0 {
                    (lt[m] == 0).then_some(0)
                } else {
                    layouts[m].slot_of(q)
                };
                match slot {
                    Some(s) => flat = flat * shape[m] + s,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                for (c, block) in blocks.iter_mut().enumerate() {
                    let v = buf[c * nd + dl];
                    if !v.is_finite() {
                        return Err(Error::Sampler(format!("non-finite sample at {coords:?}")));
                    }
                    block[flat] = v;
                }
            }
        }
    }
    Ok(blocks)
}

/// Collocates a sampler on the given elements, one value store per output.
pub fn collocate<S: Sampler + ?Sized>(
    sampler: &S,
    family: Arc<NestedFamily>,
    mode: Mode,
    keys: &[ElementKey],
) -> Result<Vec<ElementStore>> {
    let d = sampler.dim();
    let blocks: Vec<Vec<Vec<f64>>> = keys
        .par_iter()
        .map(|k| sample_element(sampler, &family, mode, k))
        .collect::<Result<_>>()?;
    let mut stores: Vec<ElementStore> = (0..sampler.outputs())
        .map(|_| ElementStore::with_keys(family.clone(), d, mode, Content::Values, keys))
        .collect();
    for (k, per_out) in keys.iter().zip(blocks) {
        for (store, b) in stores.iter_mut().zip(per_out) {
            let idx = store.index_of(k.raw()).expect("key inserted above");
            store.block_mut(idx).copy_from_slice(&b);
        }
    }
    Ok(stores)
}

/// Single-output [`collocate`].
pub fn collocate_scalar<S: Sampler + ?Sized>(
    sampler: &S,
    family: Arc<NestedFamily>,
    mode: Mode,
    keys: &[ElementKey],
) -> Result<ElementStore> {
    let mut v = collocate(sampler, family, mode, keys)?;
    if v.len() != 1 {
        return Err(Error::Input(format!("expected one output, sampler has {}", v.len())));
    }
    Ok(v.remove(0))
}
