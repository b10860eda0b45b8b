//! Nested point families and their interpolating / multiwavelet bases.

use std::fmt::Write as _;

use num::{One, Zero};

use super::point::{
    in_left_half, locate, rat, rat_text, rat_to_f64, Coord, Rational, Side, SidedPoint,
};
use super::poly::{horner, l1_norm_on, linf_norm_on, Polynomial1D};
use crate::{Error, Result};

/// Stable identifiers of the built-in catalogue.
pub const CATALOGUE: [&str; 11] = [
    "k0-t1", "k0-t2", "p0m1-t1", "p0m1-t2", "p1m0-t1", "p1m0-t2", "p1m0-t3", "p1m0-t4", "p2m0",
    "p3m0", "p1m1",
];

/// Which half of the unit cell a wavelet lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Left,
    Right,
}

impl Half {
    fn from_bit(h: u8) -> Self {
        if h == 0 {
            Half::Left
        } else {
            Half::Right
        }
    }

    fn bounds(self) -> (Rational, Rational) {
        match self {
            Half::Left => (rat(0, 1), rat(1, 2)),
            Half::Right => (rat(1, 2), rat(1, 1)),
        }
    }
}

/// A level-one wavelet: a polynomial on one half of `[0,1]`, zero elsewhere.
#[derive(Debug, Clone)]
pub struct Wavelet {
    pub half: Half,
    pub poly: Polynomial1D,
}

/// L¹, L² and L∞ norms of a basis function on `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Where a level-one point `(h + x_r)/2` lives in the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotOrigin {
    /// Coincides with level-0 anchor `i`.
    Anchor(usize),
    /// Is the new point `x̃_{k,1}`.
    New(usize),
}

/// Input to [`NestedFamily::build`].
#[derive(Debug, Clone)]
pub enum FamilySpec {
    Catalogue(String),
    Custom {
        name: String,
        anchors0: Vec<SidedPoint>,
        p: usize,
        m: usize,
        istar: usize,
    },
}

/// A fully tabulated `(P, M)` family: anchors, bases, transform tables,
/// quadrature weights and basis norms.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct NestedFamily {
    name: String,
    p: usize,
    m: usize,
    k: usize,
    istar: usize,
    anchors0: Vec<SidedPoint>,
    anchors1: Vec<SidedPoint>,
    child_map: Vec<(u8, usize)>,
    slots: Vec<SlotOrigin>,
    phi: Vec<Polynomial1D>,
    psi: Vec<Wavelet>,
    table: Vec<Rational>,
    quad_phi: Vec<Rational>,
    quad_psi: Vec<Rational>,
    norms_phi: Vec<Norms>,
    norms_psi: Vec<Norms>,
    // floating-point caches, indexed [q][deriv]
    phi_f: Vec<Vec<Vec<f64>>>,
    psi_f: Vec<Vec<Vec<f64>>>,
    table_f: Vec<f64>,
    quad_phi_f: Vec<f64>,
    quad_psi_f: Vec<f64>,
}

fn catalogue_entry(id: &str) -> Result<(Vec<SidedPoint>, usize, usize)> {
    use SidedPoint as S;
    let entry = match id {
        "k0-t1" => (vec![S::right(0, 1)], 0, 0),
        "k0-t2" => (vec![S::left(1, 1)], 0, 0),
        "p0m1-t1" => (vec![S::right(0, 1)], 0, 1),
        "p0m1-t2" => (vec![S::left(1, 1)], 0, 1),
        "p1m0-t1" => (vec![S::right(0, 1), S::left(1, 1)], 1, 0),
        "p1m0-t2" => (vec![S::interior(1, 3), S::interior(2, 3)], 1, 0),
        "p1m0-t3" => (vec![S::right(0, 1), S::right(1, 2)], 1, 0),
        "p1m0-t4" => (vec![S::left(1, 2), S::left(1, 1)], 1, 0),
        "p2m0" => (vec![S::right(0, 1), S::left(1, 2), S::left(1, 1)], 2, 0),
        "p3m0" => (
            vec![S::right(0, 1), S::interior(1, 3), S::interior(2, 3), S::left(1, 1)],
            3,
            0,
        ),
        "p1m1" => (vec![S::right(0, 1), S::left(1, 1)], 1, 1),
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    Ok(entry)
}

/// Solves `A X = I` exactly and returns the columns of `X`.
fn invert(mut a: Vec<Vec<Rational>>) -> Result<Vec<Vec<Rational>>> {
    let n = a.len();
    for (r, row) in a.iter_mut().enumerate() {
        row.extend((0..n).map(|c| if c == r { Rational::one() } else { Rational::zero() }));
    }
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Construction("interpolation system is singular".into()))?;
        a.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for c in 0..2 * n {
            a[col][c] = &a[col][c] * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let v = &a[col][c] * &f;
                    a[r][c] -= v;
                }
            }
        }
    }
    Ok((0..n)
        .map(|c| (0..n).map(|r| a[r][n + c].clone()).collect())
        .collect())
}

fn falling(k: usize, l: usize) -> i64 {
    (0..l).map(|t| (k - t) as i64).product()
}

fn pow2(e: i64) -> Rational {
    if e >= 0 {
        rat(1i64 << e, 1)
    } else {
        rat(1, 1i64 << (-e))
    }
}

fn norms_of(poly: &Polynomial1D, a: &Rational, b: &Rational) -> Norms {
    let c = poly.to_f64();
    let (af, bf) = (rat_to_f64(a), rat_to_f64(b));
    let sq = poly * poly;
    Norms {
        l1: l1_norm_on(&c, af, bf),
        l2: rat_to_f64(&sq.integrate(a, b)).sqrt(),
        linf: linf_norm_on(&c, af, bf),
    }
}

fn deriv_tables(poly: &Polynomial1D, k: usize) -> Vec<Vec<f64>> {
    (0..=k).map(|d| poly.nth_derivative(d).to_f64()).collect()
}

impl NestedFamily {
    /// Builds a family from a catalogue id.
    pub fn catalogue(id: &str) -> Result<Self> {
        Self::build(&FamilySpec::Catalogue(id.to_string()))
    }

    pub fn build(spec: &FamilySpec) -> Result<Self> {
        let (name, anchors0, p, m, istar) = match spec {
            FamilySpec::Catalogue(id) => {
                let (a, p, m) = catalogue_entry(id)?;
                (id.clone(), a, p, m, 0)
            }
            FamilySpec::Custom {
                name,
                anchors0,
                p,
                m,
                istar,
            } => (name.clone(), anchors0.clone(), *p, *m, *istar),
        };
        Self::from_anchors(name, anchors0, p, m, istar)
    }

    fn from_anchors(
        name: String,
        anchors0: Vec<SidedPoint>,
        p: usize,
        m: usize,
        istar: usize,
    ) -> Result<Self> {
        let np = p + 1;
        let nb = (p + 1) * (m + 1);
        let k = nb - 1;
        if anchors0.len() != np {
            return Err(Error::Construction(format!(
                "expected {np} anchors, got {}",
                anchors0.len()
            )));
        }
        if istar > p {
            return Err(Error::Construction(format!("i* = {istar} exceeds P = {p}")));
        }
        for w in anchors0.windows(2) {
            if w[0].location == w[1].location {
                return Err(Error::Construction(format!(
                    "duplicated anchor location {}",
                    rat_text(&w[0].location)
                )));
            }
            if w[0] > w[1] {
                return Err(Error::Construction("anchors must be sorted".into()));
            }
        }
        let half = rat(1, 2);
        let slot_point = |h: u8, r: usize| anchors0[r].affine(&rat(h as i64, 1), &half);

        let mut child_map = Vec::with_capacity(np);
        for (i, a) in anchors0.iter().enumerate() {
            let hit = (0..2u8)
                .flat_map(|h| (0..np).map(move |r| (h, r)))
                .find(|&(h, r)| slot_point(h, r) == *a);
            match hit {
                Some(hr) => child_map.push(hr),
                None => {
                    return Err(Error::Construction(format!(
                        "anchor {i} ({a}) violates the nesting relation"
                    )))
                }
            }
        }

        let mut level1: Vec<(SidedPoint, u8, usize)> = Vec::with_capacity(2 * np);
        for h in 0..2u8 {
            for r in 0..np {
                level1.push((slot_point(h, r), h, r));
            }
        }
        for (a, b) in level1.iter().zip(level1.iter().skip(1)) {
            if a.0 == b.0 {
                return Err(Error::Construction(format!("level-1 points coincide at {}", a.0)));
            }
        }
        let mut fresh: Vec<(SidedPoint, u8, usize)> = level1
            .iter()
            .filter(|(pt, _, _)| !anchors0.contains(pt))
            .cloned()
            .collect();
        fresh.sort_by(|a, b| a.0.cmp(&b.0));
        if fresh.len() != np {
            return Err(Error::Construction(format!(
                "level-1 refinement adds {} points, expected {np}",
                fresh.len()
            )));
        }
        let anchors1: Vec<SidedPoint> = fresh.iter().map(|f| f.0.clone()).collect();
        let mut slots = vec![SlotOrigin::New(0); 2 * np];
        for (pt, h, r) in &level1 {
            let s = *h as usize * np + r;
            slots[s] = match anchors0.iter().position(|a| a == pt) {
                Some(i) => SlotOrigin::Anchor(i),
                None => SlotOrigin::New(anchors1.iter().position(|a| a == pt).unwrap()),
            };
        }

        // Hermite/Lagrange interpolation system in the monomial basis.
        let mut a = Vec::with_capacity(nb);
        for pt in &anchors0 {
            for l in 0..=m {
                let row: Vec<Rational> = (0..nb)
                    .map(|kk| {
                        if kk < l {
                            Rational::zero()
                        } else {
                            rat(falling(kk, l), 1) * num::pow(pt.location.clone(), kk - l)
                        }
                    })
                    .collect();
                a.push(row);
            }
        }
        let cols = invert(a)?;
        let phi: Vec<Polynomial1D> = cols.into_iter().map(Polynomial1D::new).collect();

        let mut psi = Vec::with_capacity(nb);
        for (_, h, r) in &fresh {
            for l in 0..=m {
                let base = &phi[r * (m + 1) + l];
                let poly = base
                    .compose_affine(&rat(2, 1), &rat(-(*h as i64), 1))
                    .scale(&pow2(-(l as i64)));
                psi.push(Wavelet {
                    half: Half::from_bit(*h),
                    poly,
                });
            }
        }

        let mut table = Vec::with_capacity(nb * nb);
        for pt in &anchors1 {
            for l in 0..=m {
                for base in &phi {
                    table.push(base.eval_deriv(l, &pt.location));
                }
            }
        }

        let (zero, one) = (rat(0, 1), rat(1, 1));
        let quad_phi: Vec<Rational> = phi.iter().map(|f| f.integrate(&zero, &one)).collect();
        let quad_psi: Vec<Rational> = psi
            .iter()
            .map(|w| {
                let (lo, hi) = w.half.bounds();
                w.poly.integrate(&lo, &hi)
            })
            .collect();
        let norms_phi = phi.iter().map(|f| norms_of(f, &zero, &one)).collect();
        let norms_psi = psi
            .iter()
            .map(|w| {
                let (lo, hi) = w.half.bounds();
                norms_of(&w.poly, &lo, &hi)
            })
            .collect();

        let fam = NestedFamily {
            name,
            p,
            m,
            k,
            istar,
            phi_f: phi.iter().map(|f| deriv_tables(f, k)).collect(),
            psi_f: psi.iter().map(|w| deriv_tables(&w.poly, k)).collect(),
            table_f: table.iter().map(rat_to_f64).collect(),
            quad_phi_f: quad_phi.iter().map(rat_to_f64).collect(),
            quad_psi_f: quad_psi.iter().map(rat_to_f64).collect(),
            anchors0,
            anchors1,
            child_map,
            slots,
            phi,
            psi,
            table,
            quad_phi,
            quad_psi,
            norms_phi,
            norms_psi,
        };
        fam.check_duality()?;
        Ok(fam)
    }

    /// Exact interpolation and wavelet duality; fails construction otherwise.
    fn check_duality(&self) -> Result<()> {
        let nb = self.basis_len();
        for q in 0..nb {
            for (qq, (pt, l2)) in self.dual_nodes(&self.anchors0).into_iter().enumerate() {
                let v = self.phi[q].eval_deriv(l2, &pt.location);
                let want = if q == qq { Rational::one() } else { Rational::zero() };
                if v != want {
                    return Err(Error::Construction(format!(
                        "scaling basis {q} fails duality at node {qq}"
                    )));
                }
                if !self.wavelet_deriv_exact(q, l2, pt).is_zero() {
                    return Err(Error::Construction(format!(
                        "wavelet {q} does not vanish at anchor node {qq}"
                    )));
                }
            }
            for (qq, (pt, l2)) in self.dual_nodes(&self.anchors1).into_iter().enumerate() {
                let want = if q == qq { Rational::one() } else { Rational::zero() };
                if self.wavelet_deriv_exact(q, l2, pt) != want {
                    return Err(Error::Construction(format!(
                        "wavelet {q} fails duality at node {qq}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn dual_nodes<'a>(&self, pts: &'a [SidedPoint]) -> Vec<(&'a SidedPoint, usize)> {
        pts.iter()
            .flat_map(|p| (0..=self.m).map(move |l| (p, l)))
            .collect()
    }

    /// Exact derivative of a level-one wavelet at a sided point.
    pub fn wavelet_deriv_exact(&self, q: usize, deriv: usize, pt: &SidedPoint) -> Rational {
        let half = rat(1, 2);
        let on_left = pt.location < half || (pt.location == half && pt.side == Side::Left);
        let w = &self.psi[q];
        if on_left == (w.half == Half::Left) {
            w.poly.eval_deriv(deriv, &pt.location)
        } else {
            Rational::zero()
        }
    }

    /// Exact checks of the family invariants: duality of `φ` and `ψ` with
    /// their anchors, wavelets vanishing on the level-0 points, and nested
    /// meshes (the hierarchical points enumerate each full mesh) up to
    /// `levels`.
    pub fn verify(&self, levels: u32) -> Result<()> {
        let fail = |what: String| Err(Error::Construction(format!("{}: {what}", self.name)));
        let m1 = self.m + 1;
        let nb = self.basis_len();
        for q in 0..nb {
            for qq in 0..nb {
                let want = if q == qq { Rational::one() } else { Rational::zero() };
                let x = &self.anchors0[qq / m1].location;
                if self.phi[q].eval_deriv(qq % m1, x) != want {
                    return fail(format!("scaling duality fails at ({q},{qq})"));
                }
                if self.wavelet_deriv_exact(q, qq % m1, &self.anchors1[qq / m1]) != want {
                    return fail(format!("wavelet duality fails at ({q},{qq})"));
                }
            }
            for a in &self.anchors0 {
                for l in 0..m1 {
                    if !self.wavelet_deriv_exact(q, l, a).is_zero() {
                        return fail(format!("wavelet {q} does not vanish at {a}"));
                    }
                }
            }
        }
        let mut hier = std::collections::BTreeSet::new();
        for n in 0..=levels {
            for j in 0..Self::cells_at(n as i32) {
                for i in 0..=self.p {
                    if !hier.insert(self.point_location(n as i32, j, i)?) {
                        return fail(format!("point repeated at level {n}"));
                    }
                }
            }
            let full: std::collections::BTreeSet<SidedPoint> = (0..1u64 << n)
                .flat_map(|j| {
                    self.anchors0
                        .iter()
                        .map(move |a| a.affine(&rat(j as i64, 1), &pow2(-(n as i64))))
                })
                .collect();
            if full != hier {
                return fail(format!("level-{n} mesh is not the union of hierarchical points"));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn istar(&self) -> usize {
        self.istar
    }
    /// `(P+1)(M+1)`: number of bases per element per dimension.
    pub fn basis_len(&self) -> usize {
        self.k + 1
    }
    pub fn anchors0(&self) -> &[SidedPoint] {
        &self.anchors0
    }
    pub fn anchors1(&self) -> &[SidedPoint] {
        &self.anchors1
    }
    /// For anchor `i`, the `(half, r)` with `2 x_i = half + x_r`.
    pub fn child_map(&self) -> &[(u8, usize)] {
        &self.child_map
    }
    pub fn phi(&self, i: usize, l: usize) -> &Polynomial1D {
        &self.phi[i * (self.m + 1) + l]
    }
    pub fn psi(&self, i: usize, l: usize) -> &Wavelet {
        &self.psi[i * (self.m + 1) + l]
    }
    /// `∂ˡφ_{i',l'}(x̃_{i,1})`.
    pub fn transform_entry(&self, i: usize, l: usize, ip: usize, lp: usize) -> &Rational {
        let nb = self.basis_len();
        &self.table[(i * (self.m + 1) + l) * nb + ip * (self.m + 1) + lp]
    }
    /// Row-major `[q][q']` float copy of the transform table.
    pub fn transform_table_f64(&self) -> &[f64] {
        &self.table_f
    }
    pub fn quad_phi(&self, i: usize, l: usize) -> &Rational {
        &self.quad_phi[i * (self.m + 1) + l]
    }
    pub fn quad_psi(&self, i: usize, l: usize) -> &Rational {
        &self.quad_psi[i * (self.m + 1) + l]
    }
    pub fn norms_phi(&self, i: usize, l: usize) -> Norms {
        self.norms_phi[i * (self.m + 1) + l]
    }
    pub fn norms_psi(&self, i: usize, l: usize) -> Norms {
        self.norms_psi[i * (self.m + 1) + l]
    }

    /// Origin of level-one slot `(half, r)`.
    pub fn slot_origin(&self, half: u8, r: usize) -> SlotOrigin {
        self.slots[half as usize * (self.p + 1) + r]
    }

    /// Number of hierarchical cells at level `n` (`J_n + 1`).
    pub fn cells_at(level: i32) -> u64 {
        if level <= 0 {
            1
        } else {
            1u64 << (level - 1)
        }
    }

    /// Location of point `i` of cell `j` in the hierarchical level `n ≥ -1`.
    pub fn point_location(&self, n: i32, j: u64, i: usize) -> Result<SidedPoint> {
        if n < -1 || j >= Self::cells_at(n) || i > self.p || (n == -1 && i != 0) {
            return Err(Error::IndexOutOfRange(format!("(n={n}, j={j}, i={i})")));
        }
        Ok(match n {
            -1 => self.anchors0[self.istar].clone(),
            0 => self.anchors0[i].clone(),
            _ => self.anchors1[i].affine(&rat(j as i64, 1), &pow2(-(n as i64 - 1))),
        })
    }

    /// Floating-point coordinate of the same point.
    pub fn point_coord(&self, n: i32, j: u64, i: usize) -> Coord {
        let base = match n {
            -1 => &self.anchors0[self.istar],
            0 => &self.anchors0[i],
            _ => &self.anchors1[i],
        };
        let x = if n <= 0 {
            base.to_f64()
        } else {
            (j as f64 + base.to_f64()) / (1u64 << (n - 1)) as f64
        };
        Coord { x, side: base.side }
    }

    /// Level-`n` full-mesh point `x^j_{r,n}` expressed as
    /// `(hierarchical level, cell, local index)`.
    pub fn resolve(&self, n: u32, j: u64, r: usize) -> (i32, u64, usize) {
        let (mut n, mut j, mut r) = (n, j, r);
        loop {
            if n == 0 {
                return (0, 0, r);
            }
            let h = (j & 1) as u8;
            let parent = j >> 1;
            match self.slot_origin(h, r) {
                SlotOrigin::New(k) => return (n as i32, parent, k),
                SlotOrigin::Anchor(i) => {
                    n -= 1;
                    j = parent;
                    r = i;
                }
            }
        }
    }

    /// Derivative `deriv` of a single basis function at a coordinate.
    ///
    /// `kind` scaling uses `φ^j_{i,l,n}` on the level-`n` mesh; wavelet uses
    /// `ϕ^j_{i,l,n}` (`n ≥ 1`, level 0 falls back to the scaling basis and
    /// level −1 is the constant).
    pub fn eval_basis(
        &self,
        kind: BasisKind,
        i: usize,
        l: usize,
        deriv: usize,
        n: i32,
        j: u64,
        at: Coord,
    ) -> f64 {
        let q = i * (self.m + 1) + l;
        match kind {
            BasisKind::Scaling => {
                let n = n.max(0) as u32;
                let (cell, u) = locate(at.x, at.side, n);
                if cell != j || deriv > self.k {
                    return 0.0;
                }
                let scale = 2f64.powi((deriv as i32 - l as i32) * n as i32);
                scale * horner(&self.phi_f[q][deriv], u)
            }
            BasisKind::Wavelet => {
                let mut out = vec![0.0; self.basis_len()];
                match self.level_values(n, at, deriv, &mut out) {
                    Some(cell) if cell == j => {
                        if n == -1 {
                            out[0]
                        } else {
                            out[q]
                        }
                    }
                    _ => 0.0,
                }
            }
        }
    }

    /// Values of every hierarchical basis of level `n` on the cell containing
    /// `at`; returns that cell, or `None` when `deriv` exceeds `K`.
    ///
    /// `out` needs `K+1` entries (one for level −1).
    pub fn level_values(&self, n: i32, at: Coord, deriv: usize, out: &mut [f64]) -> Option<u64> {
        match n {
            -1 => {
                out[0] = if deriv == 0 { 1.0 } else { 0.0 };
                Some(0)
            }
            0 => {
                if deriv > self.k {
                    out.iter_mut().for_each(|v| *v = 0.0);
                    return Some(0);
                }
                let (_, u) = locate(at.x, at.side, 0);
                for (o, tab) in out.iter_mut().zip(&self.phi_f) {
                    *o = horner(&tab[deriv], u);
                }
                Some(0)
            }
            _ => {
                let lvl = (n - 1) as u32;
                let (cell, u) = locate(at.x, at.side, lvl);
                if deriv > self.k {
                    out.iter_mut().for_each(|v| *v = 0.0);
                    return Some(cell);
                }
                let left = in_left_half(u, at.side);
                let m1 = self.m + 1;
                for (q, o) in out.iter_mut().enumerate().take(self.basis_len()) {
                    let w = &self.psi[q];
                    if (w.half == Half::Left) == left {
                        let l = (q % m1) as i32;
                        let scale = 2f64.powi((deriv as i32 - l) * lvl as i32);
                        *o = scale * horner(&self.psi_f[q][deriv], u);
                    } else {
                        *o = 0.0;
                    }
                }
                Some(cell)
            }
        }
    }

    /// Norms of `ϕ^j_{i,l,n}` on `[0,1]`; level 0 gives the scaling-basis
    /// norms and level −1 the constant.
    pub fn psi_norm(&self, i: usize, l: usize, n: i32) -> Norms {
        match n {
            i32::MIN..=-1 => Norms {
                l1: 1.0,
                l2: 1.0,
                linf: 1.0,
            },
            0 => self.norms_phi(i, l),
            _ => {
                let base = self.norms_psi(i, l);
                let s = (n - 1) as f64;
                let amp = 2f64.powf(-(l as f64) * s);
                Norms {
                    l1: base.l1 * amp * 2f64.powf(-s),
                    l2: base.l2 * amp * 2f64.powf(-s / 2.0),
                    linf: base.linf * amp,
                }
            }
        }
    }

    /// `∫₀¹ ϕ^j_{q,n}` for local index `q = i(M+1)+l`.
    pub fn weight(&self, n: i32, q: usize) -> f64 {
        match n {
            i32::MIN..=-1 => 1.0,
            0 => self.quad_phi_f[q],
            _ => {
                let l = (q % (self.m + 1)) as i32;
                2f64.powi(-(l + 1) * (n - 1)) * self.quad_psi_f[q]
            }
        }
    }

    /// One record per line; rationals as `num/den`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "family {} P={} M={} K={} istar={}",
            self.name, self.p, self.m, self.k, self.istar
        );
        for (i, a) in self.anchors0.iter().enumerate() {
            let _ = writeln!(s, "anchor0 {i} {} {}", rat_text(&a.location), side_word(a.side));
        }
        for (i, a) in self.anchors1.iter().enumerate() {
            let _ = writeln!(s, "anchor1 {i} {} {}", rat_text(&a.location), side_word(a.side));
        }
        let m1 = self.m + 1;
        for (q, f) in self.phi.iter().enumerate() {
            let _ = writeln!(s, "phi {} {} {f}", q / m1, q % m1);
        }
        for (q, w) in self.psi.iter().enumerate() {
            let h = if w.half == Half::Left { "left" } else { "right" };
            let _ = writeln!(s, "psi {} {} {h} {}", q / m1, q % m1, w.poly);
        }
        let nb = self.basis_len();
        for q in 0..nb {
            for qq in 0..nb {
                let _ = writeln!(
                    s,
                    "table {} {} {} {} {}",
                    q / m1,
                    q % m1,
                    qq / m1,
                    qq % m1,
                    rat_text(&self.table[q * nb + qq])
                );
            }
        }
        for q in 0..nb {
            let _ = writeln!(s, "quad_phi {} {} {}", q / m1, q % m1, rat_text(&self.quad_phi[q]));
        }
        for q in 0..nb {
            let _ = writeln!(s, "quad_psi {} {} {}", q / m1, q % m1, rat_text(&self.quad_psi[q]));
        }
        s
    }
}

fn side_word(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
        Side::Interior => "interior",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Scaling,
    Wavelet,
}
