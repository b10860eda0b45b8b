use std::borrow::Borrow;
use std::fmt;

/// A level or cell multi-index.
pub type MultiIndex = Vec<i32>;

pub fn l1(n: &[i32]) -> i32 {
    n.iter().sum()
}

pub fn linf(n: &[i32]) -> i32 {
    n.iter().copied().max().unwrap_or(0)
}

/// `(n, j)`: levels followed by cells, stored contiguously.
///
/// Ordering is lexicographic on levels, then cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementKey(Box<[i32]>);

impl ElementKey {
    pub fn new(levels: &[i32], cells: &[i32]) -> Self {
        assert_eq!(levels.len(), cells.len());
        let mut v = Vec::with_capacity(2 * levels.len());
        v.extend_from_slice(levels);
        v.extend_from_slice(cells);
        Self(v.into_boxed_slice())
    }

    /// The coarsest element: all levels at `lowest`.
    pub fn root(d: usize, lowest: i32) -> Self {
        Self::new(&vec![lowest; d], &vec![0; d])
    }

    pub fn from_raw(raw: Box<[i32]>) -> Self {
        assert!(raw.len() % 2 == 0);
        Self(raw)
    }

    pub fn raw(&self) -> &[i32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() / 2
    }

    pub fn levels(&self) -> &[i32] {
        &self.0[..self.dim()]
    }

    pub fn cells(&self) -> &[i32] {
        &self.0[self.dim()..]
    }

    pub fn level(&self, m: usize) -> i32 {
        self.0[m]
    }

    pub fn cell(&self, m: usize) -> u64 {
        self.0[self.dim() + m] as u64
    }

    pub fn level_sum(&self) -> i32 {
        l1(self.levels())
    }

    /// Copy with `(n_m, j_m)` replaced.
    pub fn with(&self, m: usize, n: i32, j: u64) -> Self {
        let d = self.dim();
        let mut raw = self.0.clone();
        raw[m] = n;
        raw[d + m] = j as i32;
        Self(raw)
    }
}

impl Borrow<[i32]> for ElementKey {
    fn borrow(&self) -> &[i32] {
        &self.0
    }
}

impl fmt::Display for ElementKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &[i32]| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "({});({})", join(self.levels()), join(self.cells()))
    }
}
