use std::sync::Arc;

use mrcolloc::mra1d::{horner, locate, BasisKind, Coord, NestedFamily, Side, CATALOGUE};
use mrcolloc::transform1d::{
    eval_interp_1d, integrate_1d, surplus_to_values, values_to_surplus, Content, Grid1D, Mode,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fam(id: &str) -> Arc<NestedFamily> {
    Arc::new(NestedFamily::catalogue(id).unwrap())
}

fn random_grid(f: Arc<NestedFamily>, n: u32, mode: Mode, content: Content, seed: u64) -> Grid1D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Grid1D::zeros(f.clone(), n, mode, content);
    for lvl in mode.lowest_level()..=n as i32 {
        if lvl < 0 {
            *g.get_mut(-1, 0, 0, 0) = rng.gen_range(-1.0..1.0);
            continue;
        }
        for j in 0..NestedFamily::cells_at(lvl) {
            for i in 0..=f.p() {
                for l in 0..=f.m() {
                    if !g.is_dead(lvl, i, l) {
                        *g.get_mut(lvl, j, i, l) = rng.gen_range(-1.0..1.0);
                    }
                }
            }
        }
    }
    g
}

/// Random piecewise polynomial of degree ≤ K on the level-`n` mesh, with
/// side-aware cell selection.
struct PiecewisePoly {
    level: u32,
    cells: Vec<Vec<f64>>,
}

impl PiecewisePoly {
    fn new(k: usize, level: u32, rng: &mut ChaCha8Rng) -> Self {
        let cells = (0..1usize << level)
            .map(|_| (0..=k).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        Self { level, cells }
    }

    fn eval(&self, c: Coord, d: usize) -> f64 {
        let (cell, t) = locate(c.x, c.side, self.level);
        let mut coeffs = self.cells[cell as usize].clone();
        for _ in 0..d {
            coeffs = coeffs.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect();
        }
        horner(&coeffs, t) * 2f64.powi((d as u32 * self.level) as i32)
    }
}

#[test]
fn roundtrip_all_families_both_modes() {
    for id in CATALOGUE {
        for mode in [Mode::Standard, Mode::Corrected] {
            for n in [0, 3, 8] {
                let s = random_grid(fam(id), n, mode, Content::Surpluses, 7 + n as u64);
                let back = values_to_surplus(&surplus_to_values(&s).unwrap()).unwrap();
                assert!(back.max_abs_diff(&s) <= 1e-12, "{id} {mode:?} n={n}");
                let v = random_grid(fam(id), n, mode, Content::Values, 11 + n as u64);
                let back = surplus_to_values(&values_to_surplus(&v).unwrap()).unwrap();
                assert!(back.max_abs_diff(&v) <= 1e-12, "{id} {mode:?} n={n}");
            }
        }
    }
}

#[test]
fn zero_surpluses_give_zero_values() {
    let s = Grid1D::zeros(fam("p1m1"), 4, Mode::Standard, Content::Surpluses);
    let v = surplus_to_values(&s).unwrap();
    assert_eq!(v.max_abs_diff(&s), 0.0);
}

#[test]
fn single_scaling_surplus_expands_to_its_basis() {
    let f = fam("p1m0-t1");
    let mut s = Grid1D::zeros(f.clone(), 3, Mode::Standard, Content::Surpluses);
    *s.get_mut(0, 0, 0, 0) = 1.0;
    let v = surplus_to_values(&s).unwrap();
    for n in 1..=3 {
        for j in 0..NestedFamily::cells_at(n) {
            for i in 0..=1 {
                let x = f.point_coord(n, j, i).x;
                assert!((v.get(n, j, i, 0) - (1.0 - x)).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn quadratic_is_exact_on_level_zero_for_p2() {
    let g = Grid1D::collocate(fam("p2m0"), 3, Mode::Standard, |c, _| c.x * c.x);
    let s = values_to_surplus(&g).unwrap();
    for n in 1..=3 {
        assert!(s.level(n).iter().all(|b| b.abs() < 1e-14));
    }
}

#[test]
fn cubic_is_reproduced_by_p3() {
    let g = Grid1D::collocate(fam("p3m0"), 2, Mode::Standard, |c, _| c.x.powi(3));
    let s = values_to_surplus(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let x: f64 = rng.gen();
        assert!((eval_interp_1d(&s, Coord::new(x), 0) - x.powi(3)).abs() < 1e-13);
    }
}

/// Per-cell two-point Hermite cubic on a uniform mesh.
fn hermite_oracle(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, level: u32, x: f64) -> f64 {
    let h = 1.0 / (1u64 << level) as f64;
    let a = (x / h).floor().min((1u64 << level) as f64 - 1.0) * h;
    let t = (x - a) / h;
    let h00 = 2.0 * t.powi(3) - 3.0 * t * t + 1.0;
    let h10 = t.powi(3) - 2.0 * t * t + t;
    let h01 = -2.0 * t.powi(3) + 3.0 * t * t;
    let h11 = t.powi(3) - t * t;
    h00 * f(a) + h10 * h * df(a) + h01 * f(a + h) + h11 * h * df(a + h)
}

#[test]
fn hermite_matches_dense_oracle() {
    let g = Grid1D::collocate(fam("p1m1"), 6, Mode::Standard, |c, _| c.x.exp());
    let s = values_to_surplus(&g).unwrap();
    for x in [0.3, 0.01, 0.517, 0.999] {
        let want = hermite_oracle(f64::exp, f64::exp, 6, x);
        assert!((eval_interp_1d(&s, Coord::new(x), 0) - want).abs() < 1e-10, "x={x}");
    }
}

#[test]
fn exponential_integral() {
    let g = Grid1D::collocate(fam("p2m0"), 8, Mode::Standard, |c, _| c.x.exp());
    let s = values_to_surplus(&g).unwrap();
    assert!((integrate_1d(&s) - (std::f64::consts::E - 1.0)).abs() < 1e-8);
    let one = Grid1D::collocate(fam("p1m1"), 3, Mode::Corrected, |_, l| if l == 0 { 1.0 } else { 0.0 });
    assert!((integrate_1d(&values_to_surplus(&one).unwrap()) - 1.0).abs() < 1e-15);
}

#[test]
fn interpolates_stored_values_at_nested_points() {
    for id in CATALOGUE {
        let f = fam(id);
        let mode = Mode::Corrected;
        let g = Grid1D::collocate(f.clone(), 4, mode, |c, l| match l {
            0 => (3.0 * c.x).sin(),
            _ => 3.0 * (3.0 * c.x).cos(),
        });
        let s = values_to_surplus(&g).unwrap();
        for n in 0..=4 {
            for j in 0..NestedFamily::cells_at(n) {
                for i in 0..=f.p() {
                    for l in 0..=f.m() {
                        if g.is_dead(n, i, l) {
                            continue;
                        }
                        let at = f.point_coord(n, j, i);
                        let v = eval_interp_1d(&s, at, l);
                        assert!((v - g.get(n, j, i, l)).abs() < 1e-11, "{id} n={n} j={j} i={i} l={l}");
                    }
                }
            }
        }
    }
}

/// `I_N f` evaluated straight from the single-level scaling basis.
fn single_level(f: &NestedFamily, n: u32, sample: &dyn Fn(Coord, usize) -> f64, x: Coord, d: usize) -> f64 {
    let (cell, _) = locate(x.x, x.side, n);
    let mut acc = 0.0;
    for i in 0..=f.p() {
        let a = f.anchors0()[i].clone();
        let pt = Coord {
            x: (cell as f64 + a.to_f64()) / (1u64 << n) as f64,
            side: a.side,
        };
        for l in 0..=f.m() {
            acc += sample(pt, l) * f.eval_basis(BasisKind::Scaling, i, l, d, n as i32, cell, x);
        }
    }
    acc
}

#[test]
fn telescoping_equals_single_level_interpolant() {
    let sample = |c: Coord, l: usize| match l {
        0 => (1.0 + c.x).ln() + if c.x > 0.4 { 1.0 } else { 0.0 },
        _ => 1.0 / (1.0 + c.x),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for id in CATALOGUE {
        let f = fam(id);
        for mode in [Mode::Standard, Mode::Corrected] {
            let s = values_to_surplus(&Grid1D::collocate(f.clone(), 5, mode, sample)).unwrap();
            for _ in 0..100 {
                let x = Coord::new(rng.gen());
                let a = eval_interp_1d(&s, x, 0);
                let b = single_level(&f, 5, &sample, x, 0);
                assert!((a - b).abs() < 1e-11, "{id} {mode:?}");
            }
        }
    }
}

/// Gauss–Legendre with 8 nodes on each finest cell: exact up to degree 15.
fn gauss8() -> ([f64; 8], [f64; 8]) {
    let x = [
        -0.960_289_856_497_536_3, -0.796_666_477_413_626_7, -0.525_532_409_916_329_0, -0.183_434_642_495_649_8,
        0.183_434_642_495_649_8, 0.525_532_409_916_329_0, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3,
    ];
    let w = [
        0.101_228_536_290_376_3, 0.222_381_034_453_374_5, 0.313_706_645_877_887_3, 0.362_683_783_378_362_0,
        0.362_683_783_378_362_0, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3,
    ];
    (x, w)
}

#[test]
fn quadrature_is_exact_integral_of_interpolant() {
    let (gx, gw) = gauss8();
    for id in CATALOGUE {
        let g = Grid1D::collocate(fam(id), 5, Mode::Corrected, |c, l| match l {
            0 => (2.0 * c.x).cos() + c.x.abs().sqrt(),
            _ => -2.0 * (2.0 * c.x).sin() + 0.5 / c.x.max(1e-3).sqrt(),
        });
        let s = values_to_surplus(&g).unwrap();
        let cells = 1u64 << 5;
        let h = 1.0 / cells as f64;
        let mut exact = 0.0;
        for c in 0..cells {
            for (t, w) in gx.iter().zip(&gw) {
                let x = (c as f64 + 0.5 * (t + 1.0)) * h;
                exact += 0.5 * h * w * eval_interp_1d(&s, Coord::new(x), 0);
            }
        }
        assert!((integrate_1d(&s) - exact).abs() < 1e-12, "{id}");
    }
}

#[test]
fn side_tags_reach_the_sampler() {
    let f = fam("p1m0-t4");
    let g = Grid1D::collocate(f.clone(), 2, Mode::Standard, |c, _| {
        if Coord::above(&c, 0.5) {
            1.0
        } else {
            0.0
        }
    });
    // (1/2)⁻ is a level-0 anchor and must see the left value.
    assert_eq!(g.get(0, 0, 0, 0), 0.0);
    let s = values_to_surplus(&g).unwrap();
    assert_eq!(eval_interp_1d(&s, Coord::sided(0.5, Side::Left), 0), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn roundtrip_random(fi in 0usize..11, n in 0u32..=8, corrected: bool, seed: u64) {
        let mode = if corrected { Mode::Corrected } else { Mode::Standard };
        let s = random_grid(fam(CATALOGUE[fi]), n, mode, Content::Surpluses, seed);
        let back = values_to_surplus(&surplus_to_values(&s).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&s) <= 1e-13 * (1u64 << n) as f64);
    }

    #[test]
    fn space_exactness(fi in 0usize..11, n in 0u32..=5, seed: u64) {
        let f = fam(CATALOGUE[fi]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = PiecewisePoly::new(f.k(), n, &mut rng);
        let g = Grid1D::collocate(f.clone(), n, Mode::Corrected, |c, l| poly.eval(c, l));
        let s = values_to_surplus(&g).unwrap();
        for _ in 0..1000 {
            let x = Coord::new(rng.gen());
            for d in 0..=f.m() {
                let scale = 2f64.powi((d as u32 * n) as i32).max(1.0) * (1 + f.k()) as f64;
                let err = (eval_interp_1d(&s, x, d) - poly.eval(x, d)).abs();
                prop_assert!(err <= 1e-11 * scale, "err {err} d={d}");
            }
        }
    }
}
