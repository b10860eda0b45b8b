//! Counting and brute-force enumeration of nested anchor sets.

use num::{One, Zero};

use super::point::{is_dyadic, rat, Rational, Side, SidedPoint};
use crate::{Error, Result};

/// Largest `P` accepted by [`enumerate_anchor_sets`].
pub const MAX_ENUMERATION_P: usize = 3;

/// Binomial coefficient with `C(N,n) = 0` for `n < 0` and `1` for `n ∈ {0, N}`.
fn binom(n_top: i64, n: i64) -> i128 {
    if n < 0 {
        return 0;
    }
    if n == 0 || n == n_top {
        return 1;
    }
    if n_top < 0 || n > n_top {
        return 0;
    }
    let mut acc: i128 = 1;
    for k in 0..n {
        acc = acc * (n_top - k) as i128 / (k + 1) as i128;
    }
    acc
}

/// Number of distinct nested point types with `P + 1` points per cell.
pub fn lemma1_count(p: usize) -> u64 {
    let p = p as i64;
    let count = binom(2 * p + 2, p + 1) - 2 * binom(2 * p, p - 1) + binom(2 * p - 2, p - 3);
    count as u64
}

/// Solves `2 x_k = h_k + x_{r_k}` exactly by Gaussian elimination.
fn solve_nesting(halves: &[u8], targets: &[usize]) -> Option<Vec<Rational>> {
    let n = halves.len();
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|k| {
            let mut row = vec![Rational::zero(); n + 1];
            row[k] += rat(2, 1);
            row[targets[k]] -= rat(1, 1);
            row[n] = rat(halves[k] as i64, 1);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for c in col..=n {
            a[col][c] = &a[col][c] * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let v = &a[col][c] * &f;
                    a[r][c] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Side tags follow the nesting chain down to its fixed point (`0⁺` or `1⁻`).
fn propagate_sides(loc: &[Rational], halves: &[u8], targets: &[usize]) -> Option<Vec<Side>> {
    let n = loc.len();
    let mut sides = Vec::with_capacity(n);
    for k in 0..n {
        if !is_dyadic(&loc[k]) {
            sides.push(Side::Interior);
            continue;
        }
        let mut cur = k;
        let mut side = None;
        for _ in 0..=n {
            if targets[cur] == cur {
                side = Some(if halves[cur] == 0 { Side::Right } else { Side::Left });
                break;
            }
            cur = targets[cur];
        }
        sides.push(side?);
    }
    Some(sides)
}

/// Enumerates every admissible level-0 anchor set with `P + 1` points.
///
/// Each anchor is pinned to one of the `2P + 2` sorted level-1 slots
/// (`x_r / 2` or `(1 + x_r) / 2`), the resulting linear system is solved
/// exactly. Candidates with two anchors collapsed onto `0` or onto `1` are
/// discarded; interior coincidences (such as `{1/3, 1/3, 2/3, 2/3}` at
/// `P = 3`) are kept as candidates and rejected later by family construction.
pub fn enumerate_anchor_sets(p: usize) -> Result<Vec<Vec<SidedPoint>>> {
    if p > MAX_ENUMERATION_P {
        return Err(Error::Capability(format!(
            "anchor enumeration supports P <= {MAX_ENUMERATION_P}, got {p}"
        )));
    }
    let slots = 2 * p + 2;
    let mut found: Vec<Vec<SidedPoint>> = Vec::new();
    for mask in 0u32..(1 << slots) {
        if mask.count_ones() as usize != p + 1 {
            continue;
        }
        let chosen: Vec<usize> = (0..slots).filter(|s| mask & (1 << s) != 0).collect();
        let halves: Vec<u8> = chosen.iter().map(|&s| u8::from(s > p)).collect();
        let targets: Vec<usize> = chosen
            .iter()
            .map(|&s| if s > p { s - p - 1 } else { s })
            .collect();
        let Some(loc) = solve_nesting(&halves, &targets) else {
            continue;
        };
        let Some(sides) = propagate_sides(&loc, &halves, &targets) else {
            continue;
        };
        let pts: Option<Vec<SidedPoint>> = loc
            .into_iter()
            .zip(sides)
            .map(|(l, s)| SidedPoint::new(l, s).ok())
            .collect();
        let Some(pts) = pts else { continue };
        let boundary_overlap = |w: &[SidedPoint]| {
            w[0] == w[1] && (w[0].location.is_zero() || w[0].location.is_one())
        };
        if pts.windows(2).any(|w| w[0] > w[1] || boundary_overlap(w)) {
            continue;
        }
        if !found.contains(&pts) {
            found.push(pts);
        }
    }
    found.sort();
    Ok(found)
}
