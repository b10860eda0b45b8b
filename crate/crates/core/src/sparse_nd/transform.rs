//! Dimension-by-dimension hierarchical transforms on downward-closed sets.

use super::key::ElementKey;
use super::store::{ElementStore, LevelLayout};
use crate::transform1d::{Content, Mode};
use crate::{Error, Result};

/// One coarse contribution to a block slot along the sweep dimension.
struct Term {
    owner: usize,
    owner_len: usize,
    owner_slot: usize,
    coeff: f64,
}

/// For every slot `k` of element `idx` along dimension `m`, the coarse terms
/// making up the prediction `∂^l I_{n-1}` (or the level −1 shift).
fn prediction_terms(store: &ElementStore, idx: usize, m: usize) -> Result<Vec<Vec<Term>>> {
    let key = &store.keys()[idx];
    let fam = store.family();
    let mode = store.mode();
    let n = key.level(m);
    let lay = store.layout(n);
    let m1 = fam.m() + 1;
    let nb = fam.basis_len();
    let find = |k: &ElementKey| {
        store
            .index_of(k.raw())
            .ok_or_else(|| Error::NotDownwardClosed(format!("{k} (needed by {key})")))
    };
    let mut terms: Vec<Vec<Term>> = (0..lay.len).map(|_| Vec::new()).collect();
    if n < 0 || (n == 0 && mode == Mode::Standard) {
        return Ok(terms);
    }
    if n == 0 {
        let root = find(&key.with(m, -1, 0))?;
        for (k, t) in terms.iter_mut().enumerate() {
            if lay.q_of(k) % m1 == 0 {
                t.push(Term {
                    owner: root,
                    owner_len: 1,
                    owner_slot: 0,
                    coeff: 1.0,
                });
            }
        }
        return Ok(terms);
    }
    let table = fam.transform_table_f64();
    let j = key.cell(m);
    for ip in 0..=fam.p() {
        let (on, oj, oi) = fam.resolve((n - 1) as u32, j, ip);
        for lp in 0..m1 {
            let q_owner = oi * m1 + lp;
            let olay = LevelLayout::new(fam, mode, on);
            let (owner_key, owner_len, owner_slot) = match olay.slot_of(q_owner) {
                Some(s) => (key.with(m, on, oj), olay.len, s),
                None => (key.with(m, -1, 0), 1, 0),
            };
            let owner = find(&owner_key)?;
            for (k, t) in terms.iter_mut().enumerate() {
                let q = lay.q_of(k);
                let l = (q % m1) as i32;
                let c = table[q * nb + ip * m1 + lp] * 2f64.powi((n - 1) * (l - lp as i32));
                if c != 0.0 {
                    t.push(Term {
                        owner,
                        owner_len,
                        owner_slot,
                        coeff: c,
                    });
                }
            }
        }
    }
    Ok(terms)
}

/// `(outer, len_m, inner)` strides of dimension `m` in `key`'s block.
fn strides(store: &ElementStore, key: &ElementKey, m: usize) -> (usize, usize, usize) {
    let shape = store.block_shape(key);
    let outer = shape[..m].iter().product();
    let inner = shape[m + 1..].iter().product();
    (outer, shape[m], inner)
}

/// Applies `out = in ∓ prediction(src)` along dimension `m` for element `idx`.
fn apply_dim(
    store: &ElementStore,
    src: &[f64],
    dst: &mut [f64],
    idx: usize,
    m: usize,
    sign: f64,
) -> Result<()> {
    let terms = prediction_terms(store, idx, m)?;
    if terms.iter().all(|t| t.is_empty()) {
        return Ok(());
    }
    let key = &store.keys()[idx];
    let (outer, len, inner) = strides(store, key, m);
    let base = store.offset(idx);
    for o in 0..outer {
        for (k, tk) in terms.iter().enumerate() {
            for r in 0..inner {
                let mut acc = 0.0;
                for t in tk {
                    let pos = store.offset(t.owner) + (o * t.owner_len + t.owner_slot) * inner + r;
                    acc += t.coeff * src[pos];
                }
                dst[base + (o * len + k) * inner + r] += sign * acc;
            }
        }
    }
    Ok(())
}

fn check(store: &ElementStore, want: Content) -> Result<()> {
    if store.content() != want {
        return Err(Error::Input(format!(
            "expected {want:?}, store holds {:?}",
            store.content()
        )));
    }
    Ok(())
}

/// Point values to hierarchical surpluses, sweeping dimensions in `order`.
pub fn fast_values_to_surplus_ordered(v: &ElementStore, order: &[usize]) -> Result<ElementStore> {
    check(v, Content::Values)?;
    let mut cur = v.data().to_vec();
    for &m in order {
        let mut next = cur.clone();
        for idx in 0..v.len() {
            apply_dim(v, &cur, &mut next, idx, m, -1.0)?;
        }
        cur = next;
    }
    let mut out = v.clone();
    out.data_mut().copy_from_slice(&cur);
    out.set_content(Content::Surpluses);
    Ok(out)
}

/// Hierarchical surpluses to point values, sweeping dimensions in `order`.
///
/// Each sweep runs in place with elements ordered by their level along the
/// sweep dimension, so coarse values are final before they are used.
pub fn fast_surplus_to_values_ordered(s: &ElementStore, order: &[usize]) -> Result<ElementStore> {
    check(s, Content::Surpluses)?;
    let mut out = s.clone();
    let mut data = s.data().to_vec();
    for &m in order {
        let mut idxs: Vec<usize> = (0..s.len()).collect();
        idxs.sort_by_key(|&i| s.keys()[i].level(m));
        for idx in idxs {
            let terms = prediction_terms(s, idx, m)?;
            if terms.iter().all(|t| t.is_empty()) {
                continue;
            }
            let key = &s.keys()[idx];
            let (outer, len, inner) = strides(s, key, m);
            let base = s.offset(idx);
            for o in 0..outer {
                for (k, tk) in terms.iter().enumerate() {
                    for r in 0..inner {
                        let mut acc = 0.0;
                        for t in tk {
                            acc += t.coeff
                                * data[s.offset(t.owner) + (o * t.owner_len + t.owner_slot) * inner + r];
                        }
                        data[base + (o * len + k) * inner + r] += acc;
                    }
                }
            }
        }
    }
    out.data_mut().copy_from_slice(&data);
    out.set_content(Content::Values);
    Ok(out)
}

/// Algorithm 2: values to surpluses, dimensions `0..d`.
pub fn fast_values_to_surplus(v: &ElementStore) -> Result<ElementStore> {
    let order: Vec<usize> = (0..v.dim()).collect();
    fast_values_to_surplus_ordered(v, &order)
}

/// Algorithm 1: surpluses to values, dimensions `0..d`.
pub fn fast_surplus_to_values(s: &ElementStore) -> Result<ElementStore> {
    let order: Vec<usize> = (0..s.dim()).collect();
    fast_surplus_to_values_ordered(s, &order)
}

/// Surplus block of a single new element whose ancestors already hold
/// surpluses in `s`: the element's values minus the interpolant of the
/// existing elements at its points.
///
/// Used by adaptive refinement; the existing interpolant restricted to the
/// element's points only involves its ancestors, since every other element
/// vanishes there.
pub fn element_surplus(s: &ElementStore, key: &ElementKey, values: &[f64]) -> Result<Vec<f64>> {
    check(s, Content::Surpluses)?;
    let mut out = values.to_vec();
    let pred = super::eval::interpolant_on_element(s, key)?;
    for (o, p) in out.iter_mut().zip(pred) {
        *o -= p;
    }
    Ok(out)
}
