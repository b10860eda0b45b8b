mod common;

use common::fam;
use mrcolloc::analysis::{
    convergence_csv, convergence_table, dense_oracle_interp, fitted_order, fitted_slope,
    sample_points, sampled_errors,
};
use mrcolloc::mra1d::Coord;
use mrcolloc::sparse_nd::{collocate_scalar, enumerate_sparse_elements, fast_values_to_surplus, FnSampler};
use mrcolloc::transform1d::Mode;
use mrcolloc::uq::test_function;
use mrcolloc::Error;

/// `x₀² x₁ + 3x₁ - 1` with exact gradient.
fn poly() -> FnSampler<impl Fn(&[Coord], usize, &mut [f64]) -> mrcolloc::Result<()> + Sync> {
    FnSampler::new(2, |x: &[Coord], order: usize, out: &mut [f64]| {
        let (a, b) = (x[0].x, x[1].x);
        out[0] = a * a * b + 3.0 * b - 1.0;
        if order == 1 {
            out[1] = a * a + 3.0;
            out[2] = 2.0 * a * b;
            out[3] = 2.0 * a;
        }
        Ok(())
    })
}

#[test]
fn sample_points_are_reproducible_unit_cube_points() {
    let a = sample_points(3, 500, 42);
    assert_eq!(a, sample_points(3, 500, 42));
    assert_ne!(a, sample_points(3, 500, 43));
    assert!(a.iter().flatten().all(|v| (0.0..1.0).contains(v)));
}

#[test]
fn function_in_the_space_has_round_off_errors() {
    for id in ["p2m0", "p3m0", "p1m1"] {
        let rows = convergence_table(&poly(), fam(id), Mode::Corrected, &[3, 4], 5000, 42).unwrap();
        for r in &rows {
            let e = r.errors;
            assert!(e.l1 <= 1e-11 && e.l2 <= 1e-11 && e.linf <= 1e-11, "{id}: {e:?}");
            assert!(e.h1.unwrap() <= 1e-10, "{id}: {e:?}");
        }
        assert!(rows[1].orders.iter().all(Option::is_none));
    }
}

#[test]
fn linear_family_sees_the_quadratic_term() {
    let rows = convergence_table(&poly(), fam("p1m0-t1"), Mode::Corrected, &[4, 5, 6], 5000, 42).unwrap();
    assert!(rows[0].errors.l2 > 1e-5);
    assert!(rows.windows(2).all(|w| w[1].errors.l2 < w[0].errors.l2));
    let o = fitted_order(&rows, 1);
    assert!(o > 1.3 && o < 2.5, "{o}");
}

#[test]
fn csv_is_deterministic_with_header() {
    let f = test_function("f0", 2).unwrap();
    let run = || convergence_csv(&convergence_table(&f, fam("p2m0"), Mode::Corrected, &[2, 3, 4], 2000, 42).unwrap());
    let a = run();
    assert_eq!(a, run());
    let mut lines = a.lines();
    assert_eq!(lines.next().unwrap(), "N,h,L1,L1_order,L2,L2_order,Linf,Linf_order,H1,H1_order");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 10);
    assert_eq!(first[0], "2");
    assert_eq!(first[3], "");
    assert_eq!(a.lines().count(), 4);
}

#[test]
fn levels_must_ascend() {
    let f = test_function("f0", 2).unwrap();
    let r = convergence_table(&f, fam("p2m0"), Mode::Corrected, &[3, 3], 10, 42);
    assert!(matches!(r, Err(Error::Input(_))));
}

#[test]
fn slope_of_exact_power_law() {
    let x = [1.0, 2.0, 3.0, 4.0];
    let y: Vec<f64> = x.iter().map(|v| 5.0 * 2f64.powf(-2.5 * v)).collect();
    assert!((fitted_slope(&x, &y) + 2.5).abs() < 1e-12);
}

#[test]
fn errors_match_a_direct_loop() {
    let f = test_function("f0", 2).unwrap();
    let keys = enumerate_sparse_elements(2, 4, Mode::Corrected);
    let s = fast_values_to_surplus(&collocate_scalar(&f, fam("p2m0"), Mode::Corrected, &keys).unwrap()).unwrap();
    let e = sampled_errors(&f, &s, 300, 7, false).unwrap();
    let pts = sample_points(2, 300, 7);
    let diffs: Vec<f64> = pts
        .iter()
        .map(|p| (mrcolloc::sparse_nd::eval_interp_nd(&s, p, &[0, 0]) - f.value(p)).abs())
        .collect();
    let l1 = diffs.iter().sum::<f64>() / 300.0;
    let linf = diffs.iter().cloned().fold(0.0, f64::max);
    assert!((e.l1 - l1).abs() < 1e-15 && e.linf == linf);
    assert!(e.h1.is_none());
}

#[test]
fn oracle_size_guard() {
    let f = test_function("f0", 2).unwrap();
    assert!(dense_oracle_interp(&f, fam("p2m0"), Mode::Corrected, 5).is_err());
}

/// K=1 and K=3 rows of the f₀ table at N=6.
#[test]
fn f0_first_row_matches_the_published_table() {
    let f = test_function("f0", 2).unwrap();
    let cases = [
        ("p1m0-t1", [1.35e-1, 1.89e-1, 5.69e-1, 3.69]),
        ("p3m0", [5.19e-4, 9.02e-4, 4.37e-3, 5.97e-2]),
    ];
    for (id, want) in cases {
        let r = &convergence_table(&f, fam(id), Mode::Corrected, &[6], 100_000, 42).unwrap()[0];
        let got = [r.errors.l1, r.errors.l2, r.errors.linf, r.errors.h1.unwrap()];
        for (g, w) in got.iter().zip(want) {
            assert!((g / w - 1.0).abs() < 0.1, "{id}: {got:?}");
        }
    }
}
