//! Adaptive multiresolution interpolation on hash-keyed element tables.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::mra1d::NestedFamily;
use crate::sparse_nd::{
    element_surplus, grid_dump, sample_element, ElementKey, ElementStore, Sampler,
};
use crate::transform1d::{Content, Mode};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl std::str::FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            _ => Err(Error::Input(format!("unknown criterion {s:?} (l1, l2, linf)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criterion {
    pub norm: Norm,
    pub epsilon: f64,
    pub eta: f64,
}

impl Criterion {
    /// Criterion with the default coarsening threshold `η = ε/10`.
    pub fn new(norm: Norm, epsilon: f64) -> Self {
        Self {
            norm,
            epsilon,
            eta: epsilon / 10.0,
        }
    }

    pub fn with_eta(norm: Norm, epsilon: f64, eta: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !(eta >= 0.0) || eta >= epsilon {
            return Err(Error::Input(format!("need 0 ≤ η < ε, got ε={epsilon}, η={eta}")));
        }
        Ok(Self { norm, epsilon, eta })
    }
}

/// Children of `e`: per dimension, `-1 → 0`, `0 → 1`, `n ≥ 1` splits the cell.
/// Dimensions already at `n_max` contribute none.
pub fn children(e: &ElementKey, n_max: i32) -> Vec<ElementKey> {
    let mut out = Vec::new();
    for m in 0..e.dim() {
        let n = e.level(m);
        if n >= n_max {
            continue;
        }
        if n <= 0 {
            out.push(e.with(m, n + 1, 0));
        } else {
            let j = e.cell(m);
            out.push(e.with(m, n + 1, 2 * j));
            out.push(e.with(m, n + 1, 2 * j + 1));
        }
    }
    out
}

/// Parents of `e` (one per dimension above `lowest`).
pub fn parents(e: &ElementKey, lowest: i32) -> Vec<ElementKey> {
    (0..e.dim())
        .filter(|&m| e.level(m) > lowest)
        .map(|m| {
            let n = e.level(m);
            let j = if n >= 2 { e.cell(m) / 2 } else { 0 };
            e.with(m, n - 1, j)
        })
        .collect()
}

/// Norm of every basis function in `key`'s block, in block order.
pub fn basis_norms(store: &ElementStore, key: &ElementKey, norm: Norm) -> Vec<f64> {
    let fam = store.family();
    let m1 = fam.m() + 1;
    let per_dim: Vec<Vec<f64>> = key
        .levels()
        .iter()
        .map(|&n| {
            let lay = store.layout(n);
            (0..lay.len)
                .map(|k| {
                    let q = lay.q_of(k);
                    let v = fam.psi_norm(q / m1, q % m1, n);
                    match norm {
                        Norm::L1 => v.l1,
                        Norm::L2 => v.l2,
                        Norm::Linf => v.linf,
                    }
                })
                .collect()
        })
        .collect();
    let shape: Vec<usize> = per_dim.iter().map(|v| v.len()).collect();
    let len: usize = shape.iter().product();
    let mut slots = vec![0usize; shape.len()];
    (0..len)
        .map(|k| {
            ElementStore::unflatten(&shape, k, &mut slots);
            per_dim.iter().zip(&slots).map(|(v, &s)| v[s]).product()
        })
        .collect()
}

/// Left-hand side of the refinement criterion for one element block.
pub fn element_indicator(norms: &[f64], block: &[f64], norm: Norm) -> f64 {
    match norm {
        Norm::L2 => block
            .iter()
            .zip(norms)
            .map(|(b, w)| (b * w) * (b * w))
            .sum::<f64>()
            .sqrt(),
        Norm::L1 | Norm::Linf => block.iter().zip(norms).map(|(b, w)| b.abs() * w).sum(),
    }
}

#[derive(Debug, Clone, Default)]
struct Entry {
    children: usize,
    indicator: f64,
    expanded: bool,
}

/// Hash table `H` of elements (one surplus store per output component) with
/// child counts, and leaf table `L`.
#[derive(Debug, Clone)]
pub struct AdaptiveTables {
    family: Arc<NestedFamily>,
    d: usize,
    n_max: i32,
    criterion: Criterion,
    stores: Vec<ElementStore>,
    entries: HashMap<ElementKey, Entry>,
    leaves: BTreeSet<ElementKey>,
    removed: HashMap<ElementKey, Vec<bool>>,
}

/// Outcome of one evolving refinement pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementReport {
    pub added: Vec<ElementKey>,
    pub dof: usize,
}

impl AdaptiveTables {
    /// Empty tables; [`adaptive_interpolate`] seeds the root element.
    pub fn new(
        family: Arc<NestedFamily>,
        d: usize,
        outputs: usize,
        n_max: i32,
        criterion: Criterion,
    ) -> Result<Self> {
        if d == 0 || outputs == 0 || n_max < 0 {
            return Err(Error::Input(format!(
                "need d ≥ 1, at least one output and N_max ≥ 0 (d={d}, N_max={n_max})"
            )));
        }
        let stores = (0..outputs)
            .map(|_| ElementStore::new(family.clone(), d, Mode::Corrected, Content::Surpluses))
            .collect();
        Ok(Self {
            family,
            d,
            n_max,
            criterion,
            stores,
            entries: HashMap::new(),
            leaves: BTreeSet::new(),
            removed: HashMap::new(),
        })
    }

    pub fn family(&self) -> &Arc<NestedFamily> {
        &self.family
    }
    pub fn dim(&self) -> usize {
        self.d
    }
    pub fn n_max(&self) -> i32 {
        self.n_max
    }
    pub fn criterion(&self) -> Criterion {
        self.criterion
    }
    pub fn set_criterion(&mut self, c: Criterion) {
        self.criterion = c;
    }
    /// Surplus store of output component `c`.
    pub fn surpluses(&self, c: usize) -> &ElementStore {
        &self.stores[c]
    }
    pub fn stores(&self) -> &[ElementStore] {
        &self.stores
    }
    pub fn keys(&self) -> &[ElementKey] {
        self.stores[0].keys()
    }
    pub fn len(&self) -> usize {
        self.stores[0].len()
    }
    pub fn is_empty(&self) -> bool {
        self.stores[0].is_empty()
    }
    pub fn contains(&self, key: &ElementKey) -> bool {
        self.entries.contains_key(key)
    }
    pub fn leaves(&self) -> &BTreeSet<ElementKey> {
        &self.leaves
    }
    pub fn child_count(&self, key: &ElementKey) -> Option<usize> {
        self.entries.get(key).map(|e| e.children)
    }
    pub fn indicator(&self, key: &ElementKey) -> Option<f64> {
        self.entries.get(key).map(|e| e.indicator)
    }

    /// Stored coefficients, excluding coarsened points.
    pub fn dof(&self) -> usize {
        let gone: usize = self.removed.values().map(|v| v.iter().filter(|r| **r).count()).sum();
        self.stores[0].dof() - gone
    }

    /// Whether slot `k` of `key` was coarsened away.
    pub fn is_removed(&self, key: &ElementKey, k: usize) -> bool {
        self.removed.get(key).is_some_and(|v| v[k])
    }

    fn compute_indicator(&self, idx: usize) -> f64 {
        let key = &self.stores[0].keys()[idx];
        let norms = basis_norms(&self.stores[0], key, self.criterion.norm);
        self.stores
            .iter()
            .map(|s| element_indicator(&norms, s.block(idx), self.criterion.norm))
            .fold(0.0, f64::max)
    }

    fn significant(&self, key: &ElementKey) -> bool {
        self.entries[key].indicator > self.criterion.epsilon
    }

    /// `keys` plus every missing ancestor, ordered so parents come first.
    fn with_missing_parents(&self, keys: &BTreeSet<ElementKey>) -> Vec<ElementKey> {
        let mut all: BTreeSet<ElementKey> = BTreeSet::new();
        let mut stack: Vec<ElementKey> = keys.iter().cloned().collect();
        while let Some(k) = stack.pop() {
            if self.entries.contains_key(&k) || !all.insert(k.clone()) {
                continue;
            }
            stack.extend(parents(&k, -1));
        }
        let mut out: Vec<ElementKey> = all.into_iter().collect();
        out.sort_by_key(|k| (k.level_sum(), k.clone()));
        out
    }

    /// Inserts new elements (parents before children) given their sampled
    /// value blocks, one per output component.
    fn insert_elements(&mut self, keys: &[ElementKey], values: Vec<Vec<Vec<f64>>>) -> Result<()> {
        for (key, vals) in keys.iter().zip(values) {
            if vals.len() != self.stores.len() {
                return Err(Error::Input(format!(
                    "expected {} output blocks for {key}, got {}",
                    self.stores.len(),
                    vals.len()
                )));
            }
            let mut blocks = Vec::with_capacity(vals.len());
            for (s, v) in self.stores.iter().zip(&vals) {
                blocks.push(element_surplus(s, key, v)?);
            }
            for (s, b) in self.stores.iter_mut().zip(blocks) {
                let idx = s.insert(key.clone());
                s.block_mut(idx).copy_from_slice(&b);
            }
            let idx = self.stores[0].index_of(key.raw()).expect("just inserted");
            let indicator = self.compute_indicator(idx);
            for p in parents(key, -1) {
                let e = self
                    .entries
                    .get_mut(&p)
                    .ok_or_else(|| Error::NotDownwardClosed(format!("{p} (parent of {key})")))?;
                e.children += 1;
                self.leaves.remove(&p);
            }
            self.entries.insert(
                key.clone(),
                Entry {
                    children: 0,
                    indicator,
                    expanded: false,
                },
            );
            self.leaves.insert(key.clone());
        }
        Ok(())
    }

    fn sample_all<S: Sampler + ?Sized>(&self, f: &S, keys: &[ElementKey]) -> Result<Vec<Vec<Vec<f64>>>> {
        keys.par_iter()
            .map(|k| sample_element(f, &self.family, Mode::Corrected, k))
            .collect()
    }

    /// Adds the absent children of `to_expand` (and their missing
    /// ancestors), with values from `provider`. Returns the new keys.
    fn expand<P>(&mut self, to_expand: &[ElementKey], provider: &mut P) -> Result<Vec<ElementKey>>
    where
        P: FnMut(&[ElementKey]) -> Result<Vec<Vec<Vec<f64>>>>,
    {
        let mut wanted = BTreeSet::new();
        for k in to_expand {
            for c in children(k, self.n_max) {
                if !self.entries.contains_key(&c) {
                    wanted.insert(c);
                }
            }
            if let Some(e) = self.entries.get_mut(k) {
                e.expanded = true;
            }
        }
        let new = self.with_missing_parents(&wanted);
        if new.is_empty() {
            return Ok(new);
        }
        let values = provider(&new)?;
        if values.len() != new.len() {
            return Err(Error::Input(format!(
                "provider returned {} blocks for {} elements",
                values.len(),
                new.len()
            )));
        }
        self.insert_elements(&new, values)?;
        Ok(new)
    }

    /// One refinement pass over every element of `H` (no fixpoint): children
    /// of significant elements are added, with values from `provider`.
    pub fn refine_evolving<P>(&mut self, provider: &mut P) -> Result<RefinementReport>
    where
        P: FnMut(&[ElementKey]) -> Result<Vec<Vec<Vec<f64>>>>,
    {
        let mut keys: Vec<ElementKey> = self.keys().to_vec();
        keys.sort();
        let sig: Vec<ElementKey> = keys.into_iter().filter(|k| self.significant(k)).collect();
        let added = self.expand(&sig, provider)?;
        Ok(RefinementReport {
            added,
            dof: self.dof(),
        })
    }

    /// Replaces all surpluses (same key order as [`Self::keys`]) and
    /// recomputes the indicators, e.g. after a time step.
    pub fn update_surpluses(&mut self, stores: Vec<ElementStore>) -> Result<()> {
        if stores.len() != self.stores.len() {
            return Err(Error::Input("component count changed".into()));
        }
        for (old, new) in self.stores.iter().zip(&stores) {
            if new.keys() != old.keys() || new.content() != Content::Surpluses {
                return Err(Error::Input("surplus stores must keep the table's keys".into()));
            }
        }
        self.stores = stores;
        for idx in 0..self.len() {
            let ind = self.compute_indicator(idx);
            let key = self.stores[0].keys()[idx].clone();
            self.entries.get_mut(&key).expect("key in table").indicator = ind;
        }
        Ok(())
    }

    /// Zeroes every point contribution with `|b|·‖ϕ‖ < η` (in all
    /// components); the root is kept. Returns the number of removed points.
    pub fn coarsen_points(&mut self) -> usize {
        let norm = self.criterion.norm;
        let eta = self.criterion.eta;
        let root = ElementKey::root(self.d, -1);
        let mut count = 0;
        for idx in 0..self.len() {
            let key = self.stores[0].keys()[idx].clone();
            if key == root {
                continue;
            }
            let norms = basis_norms(&self.stores[0], &key, norm);
            let flags = self
                .removed
                .entry(key.clone())
                .or_insert_with(|| vec![false; norms.len()]);
            for (k, w) in norms.iter().enumerate() {
                if flags[k] {
                    continue;
                }
                if self.stores.iter().all(|s| s.block(idx)[k].abs() * w < eta) {
                    flags[k] = true;
                    count += 1;
                    for s in self.stores.iter_mut() {
                        s.block_mut(idx)[k] = 0.0;
                    }
                }
            }
        }
        count
    }

    /// Lines `n-vector; j-vector; indicator; is-leaf`.
    pub fn table_dump(&self) -> String {
        let mut keys: Vec<&ElementKey> = self.keys().iter().collect();
        keys.sort();
        let mut out = String::new();
        for k in keys {
            let join = |v: &[i32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let _ = writeln!(
                out,
                "{}; {}; {:e}; {}",
                join(k.levels()),
                join(k.cells()),
                self.entries[k].indicator,
                self.leaves.contains(k)
            );
        }
        out
    }

    /// Collocation points of the table in the sparse-grid dump format.
    pub fn point_dump(&self) -> String {
        grid_dump(&self.stores[0])
    }
}

/// Adaptive interpolation of `f`: seed the root element, then repeatedly
/// refine significant leaves (in sorted order) until nothing can be added;
/// optionally coarsen insignificant points afterwards.
pub fn adaptive_interpolate<S: Sampler + ?Sized>(
    f: &S,
    family: Arc<NestedFamily>,
    n_max: i32,
    criterion: Criterion,
    coarsen: bool,
) -> Result<AdaptiveTables> {
    let d = f.dim();
    let mut t = AdaptiveTables::new(family, d, f.outputs(), n_max, criterion)?;
    let root = vec![ElementKey::root(d, -1)];
    let values = t.sample_all(f, &root)?;
    t.insert_elements(&root, values)?;
    loop {
        let todo: Vec<ElementKey> = t
            .leaves
            .iter()
            .filter(|k| !t.entries[*k].expanded && t.significant(k))
            .cloned()
            .collect();
        if todo.is_empty() {
            break;
        }
        let fam = t.family.clone();
        let mut provider = |keys: &[ElementKey]| {
            keys.par_iter()
                .map(|k| sample_element(f, &fam, Mode::Corrected, k))
                .collect::<Result<Vec<_>>>()
        };
        t.expand(&todo, &mut provider)?;
    }
    if coarsen {
        t.coarsen_points();
    }
    Ok(t)
}
