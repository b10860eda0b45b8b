mod common;

use common::fam;
use mrcolloc::adaptive::{Criterion, Norm};
use mrcolloc::mra1d::Coord;
use mrcolloc::sparse_nd::{
    collocate_scalar, enumerate_sparse_elements, fast_values_to_surplus, integrate_nd, Sampler,
};
use mrcolloc::transform1d::Mode;
use mrcolloc::uq::*;
use mrcolloc::Error;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn test_function_values() {
    assert_eq!(test_function("f0", 2).unwrap().value(&[0.0, 0.0]), 1.0);
    assert_eq!(test_function("f2", 10).unwrap().value(&[0.51; 10]), 1.0);
    assert_eq!(test_function("f4", 2).unwrap().value(&[0.6, 0.1]), 0.0);
    let f1 = test_function("f1", 2).unwrap();
    assert!((f1.value(&[0.0, 0.0]) - 2.5).abs() < 1e-14);
    let f3 = test_function("f3", 3).unwrap();
    assert!((f3.value(&[0.51; 3]) - 1.0).abs() < 1e-15);
    assert_eq!(default_coefficients(3), vec![0.125, 0.0625, 0.03125]);
}

#[test]
fn registry_errors() {
    assert!(matches!(test_function("f9", 2), Err(Error::UnknownFunction(_))));
    assert!(matches!(test_function("f0", 3), Err(Error::Input(_))));
    assert!(matches!(test_function("f4", 1), Err(Error::Input(_))));
    let f = test_function("f2", 2).unwrap();
    let mut out = [0.0; 9];
    let x = [Coord::new(0.3), Coord::new(0.4)];
    assert!(matches!(f.sample(&x, 2, &mut out), Err(Error::Capability(_))));
}

/// Central differences of the value reproduce every mixed first derivative.
#[test]
fn derivatives_agree_with_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases = [("f0", 2), ("f1", 2), ("f2", 3), ("f3", 3), ("f4", 3)];
    let h = 2e-4;
    for (name, d) in cases {
        let f = test_function(name, d).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.02..0.98)).collect();
            let r2 = x[0] * x[0] + x[1] * x[1];
            let near_kink = (r2 - 0.3).abs() < 0.01
                || x.iter().any(|v| (v - 0.51).abs() < 0.01 || (v - 0.5).abs() < 0.01);
            if near_kink {
                continue;
            }
            let c: Vec<Coord> = x.iter().map(|&v| Coord::new(v)).collect();
            let mut out = vec![0.0; 1 << d];
            f.sample(&c, 1, &mut out).unwrap();
            for mask in 1..(1usize << d) {
                // Tensor central difference over the dimensions in `mask`.
                let dims: Vec<usize> = (0..d).filter(|m| mask >> (d - 1 - m) & 1 == 1).collect();
                let mut fd = 0.0;
                for signs in 0..(1usize << dims.len()) {
                    let mut y = x.clone();
                    let mut w = 1.0;
                    for (b, &m) in dims.iter().enumerate() {
                        if signs >> b & 1 == 1 {
                            y[m] += h;
                        } else {
                            y[m] -= h;
                            w = -w;
                        }
                    }
                    fd += w * f.value(&y);
                }
                fd /= (2.0 * h).powi(dims.len() as i32);
                let tol = 1e-3 * (1.0 + out[mask].abs());
                assert!((fd - out[mask]).abs() < tol, "{name} {x:?} mask {mask}: {fd} vs {}", out[mask]);
            }
        }
    }
}

#[test]
fn separable_integrals_match_quadrature() {
    for (name, d) in [("f2", 3), ("f3", 2), ("f4", 2)] {
        let f = test_function(name, d).unwrap();
        let keys = enumerate_sparse_elements(d, 12, Mode::Corrected);
        let v = collocate_scalar(&f, fam("p2m0"), Mode::Corrected, &keys).unwrap();
        let q = integrate_nd(&fast_values_to_surplus(&v).unwrap());
        let exact = f.exact_integral().unwrap();
        assert!((q - exact).abs() < 1e-6 * exact, "{name}: {q} vs {exact}");
    }
    assert!(test_function("f0", 2).unwrap().exact_integral().is_none());
}

#[test]
fn elliptic_config_validation() {
    assert!(EllipticConfig::new(2, 4.0).is_ok());
    assert!(EllipticConfig::new(2, 6.0).is_err());
    assert!(EllipticConfig::new(0, 1.0).is_err());
    let cfg = EllipticConfig::new(2, 4.0).unwrap();
    assert!(elliptic_solve_at(&[0.0], &cfg).is_err());
    let x = cfg.nodes();
    assert_eq!(x.len(), 31);
    assert!(x[0] == 0.0 && (x[30] - 1.0).abs() < 1e-15);
    assert!(x.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn differentiation_matrix_is_exact_on_polynomials() {
    let cfg = EllipticConfig::new(1, 0.0).unwrap();
    let x = cfg.nodes();
    let d = differentiation_matrix(&x);
    let p = DVector::from_iterator(x.len(), x.iter().map(|v| v.powi(5) - 2.0 * v));
    let dp = &d * p;
    for (xi, g) in x.iter().zip(dp.iter()) {
        assert!((g - (5.0 * xi.powi(4) - 2.0)).abs() < 1e-9);
    }
}

#[test]
fn elliptic_trivial_cases() {
    let flat = EllipticConfig::new(3, 0.0).unwrap();
    let u = elliptic_solve_at(&[0.7, -0.2, 1.0], &flat).unwrap();
    for (ui, xi) in u.iter().zip(flat.nodes()) {
        assert!((ui - xi).abs() < 1e-10);
    }
    let cfg = EllipticConfig::new(2, 4.0).unwrap();
    let u = elliptic_solve_at(&[0.0, 0.0], &cfg).unwrap();
    for (ui, xi) in u.iter().zip(cfg.nodes()) {
        assert!((ui - xi).abs() < 1e-10);
    }
    let u = elliptic_solve_at(&[1.0, -1.0], &cfg).unwrap();
    assert_eq!(u[0], 0.0);
    assert_eq!(u[30], 1.0);
}

#[test]
fn elliptic_flux_is_constant() {
    let spread = |cfg: &EllipticConfig, y: &[f64]| {
        let x = cfg.nodes();
        let u = DVector::from_vec(elliptic_solve_at(y, cfg).unwrap());
        let du = differentiation_matrix(&x) * u;
        let flux: Vec<f64> = (1..x.len() - 1).map(|k| cfg.diffusivity(y, x[k]) * du[k]).collect();
        let mean = flux.iter().sum::<f64>() / flux.len() as f64;
        flux.iter().map(|q| (q - mean).abs() / mean.abs()).fold(0.0, f64::max)
    };
    let cfg = EllipticConfig::new(2, 4.0).unwrap();
    for y in [[0.3, 0.9], [-0.8, -0.5], [0.5, 0.5]] {
        assert!(spread(&cfg, &y) <= 1e-6, "{y:?}");
    }
    // The extreme corner needs more nodes; the spread decays spectrally.
    let corner = [1.0, -1.0];
    let mut fine = cfg.clone();
    let mut last = f64::INFINITY;
    for n in [21, 31, 41, 61] {
        fine.n_cheb = n;
        let s = spread(&fine, &corner);
        assert!(s < last / 10.0, "{n}: {s}");
        last = s;
    }
    assert!(last <= 1e-6);
}

#[test]
fn elliptic_moments_sanity() {
    let flat = EllipticConfig::new(2, 0.0).unwrap();
    let m = elliptic_moments(&flat, fam("p2m0"), Mode::Corrected, 3).unwrap();
    assert!(m.variance.iter().all(|v| v.abs() <= 1e-12));
    assert!(m.mean.iter().zip(&m.x).all(|(a, b)| (a - b).abs() < 1e-10));
    let cfg = EllipticConfig::new(2, 4.0).unwrap();
    let m = elliptic_moments(&cfg, fam("p2m0"), Mode::Corrected, 3).unwrap();
    assert!(m.variance.iter().all(|v| *v >= -1e-12));
    // a(x) = a(1-x) forces u(1/2) = 1/2 for every sample.
    assert!(m.variance[15].abs() < 1e-12);
    assert!(m.variance[8] > 1e-6);
    let csv = m.csv();
    assert!(csv.starts_with("x,mean,variance\n"));
    assert_eq!(csv.lines().count(), 32);
    assert!(matches!(
        elliptic_moments(&cfg, fam("p1m1"), Mode::Corrected, 2),
        Err(Error::Capability(_))
    ));
}

#[test]
fn elliptic_errors_decrease_with_level() {
    let cfg = EllipticConfig::new(2, 4.0).unwrap();
    let reference = elliptic_moments(&cfg, fam("p3m0"), Mode::Corrected, 7).unwrap();
    let mut last = f64::INFINITY;
    for n in 1..=4 {
        let m = elliptic_moments(&cfg, fam("p3m0"), Mode::Corrected, n).unwrap();
        let e = m.mean.iter().zip(&reference.mean).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(e < last, "N={n}: {e}");
        last = e;
    }
    assert!(last < 1e-7);
}

#[test]
fn ko_rhs_examples() {
    assert_eq!(ko_rhs(&[1.0, 1.0, 0.0]).unwrap(), vec![0.0, 0.0, 0.0]);
    assert_eq!(ko_rhs(&[1.0, 0.0, 1.0]).unwrap(), vec![1.0, 0.0, -1.0]);
    let r = ko_rhs(&[1.0, 0.0, 1.0, 1.0, 0.0, 0.0]).unwrap();
    assert_eq!(r, vec![1.0, 0.0, -1.0, 1.0, 0.0, -2.0]);
    assert!(ko_rhs(&[1.0; 4]).is_err());
}

#[test]
fn ko_invariant_is_conserved() {
    let mut s = vec![0.9, -0.4, 0.7];
    let i0 = ko_invariant(&s);
    for _ in 0..3000 {
        rk3_step(&mut s, 0.01).unwrap();
    }
    assert!((ko_invariant(&s) - i0).abs() <= 30.0 * 1e-6);
}

fn advance(mut s: Vec<f64>, steps: usize) -> Vec<f64> {
    for _ in 0..steps {
        rk3_step(&mut s, 0.01).unwrap();
    }
    s
}

/// The Hermite sensitivity systems agree with differences of trajectories.
#[test]
fn ko_sensitivities_match_differences() {
    let h = 1e-5;
    let y = 0.37;
    let s = advance(KoCase::One.initial_state(&[y], true), 200);
    let p = advance(KoCase::One.initial_state(&[y + h], false), 200);
    let m = advance(KoCase::One.initial_state(&[y - h], false), 200);
    for c in 0..3 {
        assert!((s[3 + c] - (p[c] - m[c]) / (2.0 * h)).abs() < 1e-5);
    }
    let (a, b) = (0.3, -0.6);
    let s = advance(KoCase::Two.initial_state(&[a, b], true), 100);
    let at = |u: f64, v: f64| advance(KoCase::Two.initial_state(&[u, v], false), 100);
    let (pp, pm, mp, mm) = (at(a + h, b + h), at(a + h, b - h), at(a - h, b + h), at(a - h, b - h));
    let (p0, m0, q0, r0) = (at(a + h, b), at(a - h, b), at(a, b + h), at(a, b - h));
    for c in 0..3 {
        assert!((s[3 + c] - (p0[c] - m0[c]) / (2.0 * h)).abs() < 1e-5);
        assert!((s[6 + c] - (q0[c] - r0[c]) / (2.0 * h)).abs() < 1e-5);
        let mixed = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * h);
        assert!((s[9 + c] - mixed).abs() < 1e-3 * (1.0 + mixed.abs()), "{c}: {} vs {mixed}", s[9 + c]);
    }
}

fn ko_cfg(case: KoCase, id: &str, t_end: f64) -> KoConfig {
    KoConfig {
        case,
        dt: 0.01,
        t_end,
        criterion: Criterion::new(Norm::L2, 1e-4),
        n_max: 10,
        family: fam(id),
        stride: 1,
    }
}

#[test]
fn ko_initial_variance() {
    for id in ["p2m0", "p3m0", "p1m1"] {
        let r = ko_run(&ko_cfg(KoCase::One, id, 0.0)).unwrap();
        assert_eq!(r.rows.len(), 1);
        let v = r.rows[0].variance;
        assert!(v[0].abs() < 1e-14 && v[2].abs() < 1e-14);
        assert!((v[1] - 0.01 / 3.0).abs() < 1e-14, "{id}: {v:?}");
    }
}

#[test]
fn ko_short_run_agrees_across_families() {
    let a = ko_run(&ko_cfg(KoCase::One, "p2m0", 2.0)).unwrap();
    let b = ko_run(&ko_cfg(KoCase::One, "p1m1", 2.0)).unwrap();
    assert_eq!(a.rows.len(), 201);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        for c in 0..3 {
            assert!((x.variance[c] - y.variance[c]).abs() < 1e-4);
        }
    }
    let csv = a.csv();
    assert!(csv.starts_with("t,var_y1,var_y2,var_y3,dof\n"));
    assert_eq!(csv.lines().count(), 202);
    assert!(a.rows.windows(2).all(|w| w[1].dof >= w[0].dof));
}

#[test]
fn ko_monte_carlo_is_reproducible() {
    let a = ko_monte_carlo(KoCase::One, 0.01, 1.0, 2000, 42).unwrap();
    assert_eq!(a, ko_monte_carlo(KoCase::One, 0.01, 1.0, 2000, 42).unwrap());
    assert!(ko_monte_carlo(KoCase::One, 0.01, 1.0, 1, 42).is_err());
}

#[test]
fn ko_config_validation() {
    let mut c = ko_cfg(KoCase::Three, "p1m1", 1.0);
    assert!(matches!(ko_run(&c), Err(Error::Capability(_))));
    c.family = fam("p2m0");
    c.dt = 0.0;
    assert!(ko_run(&c).is_err());
    assert!(KoCase::from_dim(4).is_err());
}
