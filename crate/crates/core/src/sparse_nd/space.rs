use num::BigInt;

use super::key::ElementKey;
use crate::mra1d::NestedFamily;
use crate::transform1d::Mode;
use crate::{Error, Result};

/// Level vectors of the sparse space: `|n|₁ ≤ N, n ≥ 0` (standard) or
/// `|n|₁ ≤ N-d+1, -1 ≤ n ≤ N` (corrected).
pub fn sparse_level_vectors(d: usize, n: i32, mode: Mode) -> Vec<Vec<i32>> {
    let lo = mode.lowest_level();
    let budget = match mode {
        Mode::Standard => n,
        Mode::Corrected => n - d as i32 + 1,
    };
    let mut out = Vec::new();
    let mut cur = vec![lo; d];
    fn rec(m: usize, cur: &mut Vec<i32>, lo: i32, hi: i32, left: i32, out: &mut Vec<Vec<i32>>) {
        if m == cur.len() {
            out.push(cur.clone());
            return;
        }
        let rest = (cur.len() - m - 1) as i32 * lo;
        let mut v = lo;
        while v <= hi && v + rest <= left {
            cur[m] = v;
            rec(m + 1, cur, lo, hi, left - v, out);
            v += 1;
        }
        cur[m] = lo;
    }
    rec(0, &mut cur, lo, n, budget, &mut out);
    out
}

/// Level vectors of the full tensor space `lo ≤ n_m ≤ N`.
pub fn full_level_vectors(d: usize, n: i32, mode: Mode) -> Vec<Vec<i32>> {
    let lo = mode.lowest_level();
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..=n).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// All keys (every cell) of the given level vectors, sorted.
pub fn keys_for_levels(levels: &[Vec<i32>]) -> Vec<ElementKey> {
    let mut keys = Vec::new();
    for n in levels {
        let counts: Vec<u64> = n.iter().map(|&l| NestedFamily::cells_at(l)).collect();
        let total: u64 = counts.iter().product();
        let mut cells = vec![0i32; n.len()];
        for mut t in 0..total {
            for m in (0..n.len()).rev() {
                cells[m] = (t % counts[m]) as i32;
                t /= counts[m];
            }
            keys.push(ElementKey::new(n, &cells));
        }
    }
    keys.sort();
    keys
}

/// Every element of the sparse space, in lexicographic key order.
pub fn enumerate_sparse_elements(d: usize, n: i32, mode: Mode) -> Vec<ElementKey> {
    keys_for_levels(&sparse_level_vectors(d, n, mode))
}

/// Every element of the full tensor space `|n|∞ ≤ N`.
pub fn enumerate_full_elements(d: usize, n: i32, mode: Mode) -> Vec<ElementKey> {
    keys_for_levels(&full_level_vectors(d, n, mode))
}

/// Coefficients per element (`DoF`) for a level vector.
pub fn element_dof(levels: &[i32], k: usize, mode: Mode) -> u128 {
    levels
        .iter()
        .map(|&n| match n {
            -1 => 1u128,
            0 if mode == Mode::Corrected => k as u128,
            0 => (k + 1) as u128,
            _ => (k as u128 + 1) << (n - 1),
        })
        .product()
}

/// Brute-force DoF of the sparse space.
pub fn enumerated_dim(d: usize, n: i32, k: usize, mode: Mode) -> u128 {
    sparse_level_vectors(d, n, mode)
        .iter()
        .map(|l| element_dof(l, k, mode))
        .sum()
}

fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::from(0);
    }
    if k == 0 || k == n {
        return BigInt::from(1);
    }
    if n < 0 || k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for t in 0..k {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    acc
}

fn pow(b: i64, e: i64) -> BigInt {
    num::pow(BigInt::from(b), e as usize)
}

/// Closed-form dimension of the sparse space.
///
/// The corrected-mode closed form only holds for `N ≥ d - 1`; smaller `N`
/// is rejected (use [`enumerated_dim`] there).
pub fn sparse_dim(d: usize, n: i32, k: usize, mode: Mode) -> Result<u128> {
    if d == 0 || n < 0 {
        return Err(Error::Input(format!("need d ≥ 1 and N ≥ 0, got d={d}, N={n}")));
    }
    let (d, n, k) = (d as i64, n as i64, k as i64);
    let total = match mode {
        Mode::Standard => {
            // Scaled by 2^d so that 2^{N+m-d+1} stays integral.
            let mut s = pow(2, d);
            for m in 0..d {
                let mut inner = BigInt::from(0);
                for t in 0..(d - m) {
                    inner += binom(n, t) * pow(-2, d - m - 1 - t);
                }
                let e = n + m + 1;
                s += binom(d, m) * (pow(-1, d + m) * pow(2, d) + inner * pow(2, e));
            }
            let den = pow(2, d);
            if &s % &den != BigInt::from(0) {
                return Err(Error::Numerical("non-integral dimension".into()));
            }
            s / den * pow(k + 1, d)
        }
        Mode::Corrected => {
            if n < d - 1 {
                return Err(Error::Input(format!(
                    "corrected closed form needs N ≥ d-1 (d={d}, N={n})"
                )));
            }
            let mut s = BigInt::from(1);
            for q in 0..d {
                s += binom(d, q) * pow(k, d - q);
            }
            for q in 0..d {
                for m in 0..(d - q) {
                    let top = n - d + q + 1;
                    let mut brace = pow(-1, d - q - m);
                    for t in (0..(d - q - m)).filter(|&t| t <= top) {
                        brace += binom(top, t) * pow(-1, d - q - 1 - m - t) * pow(2, top - t);
                    }
                    s += binom(d, q) * binom(d - q, m) * pow(k, m) * pow(k + 1, d - q - m) * brace;
                }
            }
            s
        }
    };
    u128::try_from(total).map_err(|_| Error::Numerical("dimension overflows u128".into()))
}
