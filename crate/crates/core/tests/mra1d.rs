use std::collections::BTreeSet;

use mrcolloc::mra1d::{
    enumerate_anchor_sets, horner, lemma1_count, rat, BasisKind, Coord, FamilySpec, Half,
    NestedFamily, Rational, Side, SidedPoint, CATALOGUE,
};
use num::{One, Zero};
use proptest::prelude::*;

fn all_families() -> Vec<NestedFamily> {
    CATALOGUE
        .iter()
        .map(|id| NestedFamily::catalogue(id).unwrap())
        .collect()
}

/// Full level-`n` mesh built directly from the anchors.
fn full_mesh(f: &NestedFamily, n: u32) -> BTreeSet<SidedPoint> {
    (0..1u64 << n)
        .flat_map(|j| {
            f.anchors0()
                .iter()
                .map(move |a| a.affine(&rat(j as i64, 1), &rat(1, 1 << n)))
        })
        .collect()
}

fn hierarchical_points(f: &NestedFamily, n_max: i32) -> BTreeSet<SidedPoint> {
    let mut out = BTreeSet::new();
    for n in 0..=n_max {
        for j in 0..NestedFamily::cells_at(n) {
            for i in 0..=f.p() {
                assert!(out.insert(f.point_location(n, j, i).unwrap()), "point repeated");
            }
        }
    }
    out
}

#[test]
fn meshes_are_nested_through_level_six() {
    for f in all_families() {
        let mut prev = full_mesh(&f, 0);
        for n in 1..=6 {
            let cur = full_mesh(&f, n);
            assert!(prev.is_subset(&cur), "{} level {n}", f.name());
            assert_eq!(cur, hierarchical_points(&f, n as i32), "{} level {n}", f.name());
            prev = cur;
        }
    }
}

#[test]
fn duality_matrices_are_identity() {
    for f in all_families() {
        let m1 = f.m() + 1;
        let nb = f.basis_len();
        for q in 0..nb {
            for qq in 0..nb {
                let want = if q == qq { Rational::one() } else { Rational::zero() };
                let x = &f.anchors0()[qq / m1].location;
                assert_eq!(f.phi(q / m1, q % m1).eval_deriv(qq % m1, x), want);
                let y = &f.anchors1()[qq / m1];
                assert_eq!(f.wavelet_deriv_exact(q, qq % m1, y), want, "{}", f.name());
            }
        }
    }
}

/// Exact `∂^d ϕ^j_{q,n}` at a sided point, independent of the float caches.
fn wavelet_exact(f: &NestedFamily, q: usize, n: u32, j: u64, d: usize, p: &SidedPoint) -> Rational {
    let cells = Rational::from_integer((1i64 << (n - 1)).into());
    let u = &p.location * &cells - Rational::from_integer((j as i64).into());
    let inside = (u > Rational::zero() || (u.is_zero() && p.side != Side::Left))
        && (u < Rational::one() || (u.is_one() && p.side != Side::Right));
    if !inside {
        return Rational::zero();
    }
    let local = SidedPoint {
        location: u,
        side: p.side,
    };
    let l = (q % (f.m() + 1)) as i64;
    let factor = num::pow(cells, d) / num::pow(Rational::from_integer(2.into()), (l * (n as i64 - 1)) as usize);
    f.wavelet_deriv_exact(q, d, &local) * factor
}

#[test]
fn wavelets_vanish_on_coarse_points() {
    for f in all_families() {
        for n in 1..=4u32 {
            let coarse = full_mesh(&f, n - 1);
            for j in 0..1u64 << (n - 1) {
                for q in 0..f.basis_len() {
                    for p in &coarse {
                        for d in 0..=f.m() {
                            assert!(wavelet_exact(&f, q, n, j, d, p).is_zero(), "{} n={n}", f.name());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn lemma_matches_enumeration() {
    for p in 0..=3 {
        assert_eq!(enumerate_anchor_sets(p).unwrap().len() as u64, lemma1_count(p));
    }
}

#[test]
fn enumerated_sets_build_unless_degenerate() {
    for p in 0..=3 {
        for set in enumerate_anchor_sets(p).unwrap() {
            let degenerate = set.windows(2).any(|w| w[0].location == w[1].location);
            let spec = FamilySpec::Custom {
                name: "enum".into(),
                anchors0: set.clone(),
                p,
                m: 0,
                istar: 0,
            };
            assert_eq!(NestedFamily::build(&spec).is_ok(), !degenerate, "{set:?}");
        }
    }
}

#[test]
fn appendix_anchor_sets() {
    let f = NestedFamily::catalogue("p2m0").unwrap();
    assert_eq!(
        f.anchors0(),
        &[SidedPoint::right(0, 1), SidedPoint::left(1, 2), SidedPoint::left(1, 1)]
    );
    let g = NestedFamily::catalogue("p3m0").unwrap();
    assert_eq!(
        g.anchors1(),
        &[
            SidedPoint::interior(1, 6),
            SidedPoint::left(1, 2),
            SidedPoint::right(1, 2),
            SidedPoint::interior(5, 6)
        ]
    );
}

#[test]
fn norms_match_dense_sampling() {
    for f in all_families() {
        for q in 0..f.basis_len() {
            let w = f.psi(q / (f.m() + 1), q % (f.m() + 1));
            let c = w.poly.to_f64();
            let (a, b) = match w.half {
                Half::Left => (0.0, 0.5),
                Half::Right => (0.5, 1.0),
            };
            let n = 10_000;
            let h = (b - a) / n as f64;
            let vals: Vec<f64> = (0..n).map(|k| horner(&c, a + (k as f64 + 0.5) * h)).collect();
            let l1: f64 = vals.iter().map(|v| v.abs() * h).sum();
            let l2: f64 = vals.iter().map(|v| v * v * h).sum::<f64>().sqrt();
            let linf = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let norms = f.norms_psi(q / (f.m() + 1), q % (f.m() + 1));
            assert!((norms.l1 - l1).abs() < 1e-6, "{} q={q}", f.name());
            assert!((norms.l2 - l2).abs() < 1e-6);
            assert!(norms.linf >= linf - 1e-12 && norms.linf - linf < 1e-3);
        }
    }
}

#[test]
fn catalogue_quadrature_matches_closed_forms() {
    let f = NestedFamily::catalogue("p1m0-t1").unwrap();
    assert_eq!(*f.quad_phi(0, 0), rat(1, 2));
    assert_eq!(*f.quad_psi(0, 0), rat(1, 4));
    let h = NestedFamily::catalogue("p1m1").unwrap();
    // ∫ 2(x+1/2)(x-1)^2 = 1/2, ∫ x(x-1)^2 = 1/12
    assert_eq!(*h.quad_phi(0, 0), rat(1, 2));
    assert_eq!(*h.quad_phi(0, 1), rat(1, 12));
}

#[test]
fn dump_uses_rational_text() {
    let d = NestedFamily::catalogue("p3m0").unwrap().dump();
    assert!(d.starts_with("family p3m0 P=3 M=0 K=3 istar=0"));
    assert!(d.contains("anchor0 1 1/3 interior"));
    assert!(d.lines().filter(|l| l.starts_with("table ")).count() == 16);
}

#[test]
fn scaled_evaluation_matches_definition() {
    let f = NestedFamily::catalogue("p2m0").unwrap();
    // ϕ^1_{0,0,3}(x) = ϕ_{0,0}(4x - 1), left half of cell [1/4, 1/2]
    let x = 0.3;
    let v = f.eval_basis(BasisKind::Wavelet, 0, 0, 0, 3, 1, Coord::new(x));
    let u: f64 = 4.0 * x - 1.0;
    assert!((v - (8.0 * u - 16.0 * u * u)).abs() < 1e-14);
    let dv = f.eval_basis(BasisKind::Wavelet, 0, 0, 1, 3, 1, Coord::new(x));
    assert!((dv - 4.0 * (8.0 - 32.0 * u)).abs() < 1e-12);
    assert_eq!(f.eval_basis(BasisKind::Wavelet, 0, 0, 0, 3, 0, Coord::new(x)), 0.0);
    assert_eq!(f.eval_basis(BasisKind::Wavelet, 0, 0, 0, 3, 1, Coord::new(0.45)), 0.0);
}

proptest! {
    #[test]
    fn norm_scaling_law(fi in 0usize..11, q in 0usize..16, n in 1i32..12) {
        let f = NestedFamily::catalogue(CATALOGUE[fi]).unwrap();
        let q = q % f.basis_len();
        let (i, l) = (q / (f.m() + 1), q % (f.m() + 1));
        let a = f.psi_norm(i, l, n);
        let b = f.psi_norm(i, l, n + 1);
        let s = 2f64.powi(-(l as i32));
        prop_assert!((b.l1 - a.l1 * s * 0.5).abs() <= 1e-12 * a.l1);
        prop_assert!((b.l2 - a.l2 * s * 0.5f64.sqrt()).abs() <= 1e-12 * a.l2);
        prop_assert!((b.linf - a.linf * s).abs() <= 1e-12 * a.linf);
    }
}

#[test]
fn catalogue_passes_verification() {
    for f in all_families() {
        f.verify(6).unwrap();
    }
}
