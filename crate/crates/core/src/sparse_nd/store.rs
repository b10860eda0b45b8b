use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::key::ElementKey;
use crate::mra1d::{Coord, NestedFamily};
use crate::transform1d::{Content, Mode};
use crate::{Error, Result};

/// Per-dimension block layout of one level.
///
/// Level −1 holds one slot; corrected level 0 drops the `(i*, 0)` slot
/// shadowed by level −1; every other level holds `(P+1)(M+1)` slots ordered
/// `(i, l)`.
#[derive(Debug, Clone, Copy)]
pub struct LevelLayout {
    pub level: i32,
    pub len: usize,
    dead: Option<usize>,
}

impl LevelLayout {
    pub fn new(family: &NestedFamily, mode: Mode, level: i32) -> Self {
        let nb = family.basis_len();
        match level {
            i32::MIN..=-1 => Self {
                level,
                len: 1,
                dead: None,
            },
            0 if mode == Mode::Corrected => Self {
                level,
                len: nb - 1,
                dead: Some(family.istar() * (family.m() + 1)),
            },
            _ => Self {
                level,
                len: nb,
                dead: None,
            },
        }
    }

    /// Family-local basis index `q = i(M+1)+l` of block slot `k`.
    /// Level −1 maps to `q = 0`.
    pub fn q_of(&self, k: usize) -> usize {
        match self.dead {
            Some(dq) if k >= dq => k + 1,
            _ => k,
        }
    }

    /// Block slot of basis `q`, if stored on this level.
    pub fn slot_of(&self, q: usize) -> Option<usize> {
        if self.level < 0 {
            return (q == 0).then_some(0);
        }
        match self.dead {
            Some(dq) if q == dq => None,
            Some(dq) if q > dq => Some(q - 1),
            _ => Some(q),
        }
    }
}

/// Element-keyed dense blocks of point values or hierarchical surpluses.
///
/// A block is row-major over dimensions (the last dimension varies fastest).
#[derive(Debug, Clone)]
pub struct ElementStore {
    family: Arc<NestedFamily>,
    dim: usize,
    mode: Mode,
    content: Content,
    keys: Vec<ElementKey>,
    index: HashMap<ElementKey, usize>,
    offsets: Vec<usize>,
    data: Vec<f64>,
    level_set: BTreeSet<Vec<i32>>,
}

pub type SurplusStore = ElementStore;
pub type ValueGridND = ElementStore;

impl ElementStore {
    pub fn new(family: Arc<NestedFamily>, dim: usize, mode: Mode, content: Content) -> Self {
        Self {
            family,
            dim,
            mode,
            content,
            keys: Vec::new(),
            index: HashMap::new(),
            offsets: vec![0],
            data: Vec::new(),
            level_set: BTreeSet::new(),
        }
    }

    /// Empty copy sharing family, dimension and mode.
    pub fn empty_like(&self, content: Content) -> Self {
        Self::new(self.family.clone(), self.dim, self.mode, content)
    }

    /// Store holding zero blocks for every key.
    pub fn with_keys(
        family: Arc<NestedFamily>,
        dim: usize,
        mode: Mode,
        content: Content,
        keys: &[ElementKey],
    ) -> Self {
        let mut s = Self::new(family, dim, mode, content);
        for k in keys {
            s.insert(k.clone());
        }
        s
    }

    pub fn family(&self) -> &Arc<NestedFamily> {
        &self.family
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn content(&self) -> Content {
        self.content
    }
    pub fn set_content(&mut self, c: Content) {
        self.content = c;
    }
    pub fn keys(&self) -> &[ElementKey] {
        &self.keys
    }
    pub fn len(&self) -> usize {
        self.keys.len()
    }
    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
    /// Total number of stored coefficients.
    pub fn dof(&self) -> usize {
        self.data.len()
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn layout(&self, level: i32) -> LevelLayout {
        LevelLayout::new(&self.family, self.mode, level)
    }

    pub fn block_shape(&self, key: &ElementKey) -> Vec<usize> {
        key.levels().iter().map(|&n| self.layout(n).len).collect()
    }

    pub fn block_len_of(&self, key: &ElementKey) -> usize {
        self.block_shape(key).iter().product()
    }

    /// Inserts a zero block (no-op if present) and returns its index.
    pub fn insert(&mut self, key: ElementKey) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        debug_assert_eq!(key.dim(), self.dim);
        let len = self.block_len_of(&key);
        let idx = self.keys.len();
        self.data.resize(self.data.len() + len, 0.0);
        self.offsets.push(self.data.len());
        self.index.insert(key.clone(), idx);
        if !self.level_set.contains(key.levels()) {
            self.level_set.insert(key.levels().to_vec());
        }
        self.keys.push(key);
        idx
    }

    pub fn index_of(&self, key: &[i32]) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn contains(&self, key: &ElementKey) -> bool {
        self.index.contains_key(key)
    }

    pub fn block(&self, idx: usize) -> &[f64] {
        &self.data[self.offsets[idx]..self.offsets[idx + 1]]
    }

    pub fn block_mut(&mut self, idx: usize) -> &mut [f64] {
        &mut self.data[self.offsets[idx]..self.offsets[idx + 1]]
    }

    pub fn get(&self, key: &ElementKey) -> Option<&[f64]> {
        self.index_of(key.raw()).map(|i| self.block(i))
    }

    pub fn offset(&self, idx: usize) -> usize {
        self.offsets[idx]
    }

    /// Collocation coordinates of block slot tuple `slots` in element `key`.
    pub fn point_of(&self, key: &ElementKey, slots: &[usize]) -> Vec<Coord> {
        let m1 = self.family.m() + 1;
        (0..self.dim)
            .map(|m| {
                let n = key.level(m);
                let q = self.layout(n).q_of(slots[m]);
                self.family.point_coord(n, key.cell(m), q / m1)
            })
            .collect()
    }

    /// Decomposes a flat block index into per-dimension slots.
    pub fn unflatten(shape: &[usize], mut k: usize, out: &mut [usize]) {
        for m in (0..shape.len()).rev() {
            out[m] = k % shape[m];
            k /= shape[m];
        }
    }

    /// Largest componentwise difference over identical key sets.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, k) in self.keys.iter().enumerate() {
            let o = other
                .get(k)
                .ok_or_else(|| Error::Input(format!("key {k} missing from the other store")))?;
            for (a, b) in self.block(i).iter().zip(o) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    }

    /// Distinct level vectors, sorted.
    pub fn level_vectors(&self) -> impl Iterator<Item = &Vec<i32>> {
        self.level_set.iter()
    }

    /// Largest level per dimension.
    pub fn max_levels(&self) -> Vec<i32> {
        let mut out = vec![self.mode.lowest_level(); self.dim];
        for n in &self.level_set {
            for (o, &v) in out.iter_mut().zip(n) {
                *o = (*o).max(v);
            }
        }
        out
    }
}
