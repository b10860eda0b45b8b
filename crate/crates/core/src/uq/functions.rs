use std::f64::consts::PI;

use statrs::function::erf::erf;

use crate::mra1d::Coord;
use crate::sparse_nd::{ElementStore, Sampler};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    F0,
    F1,
    F2,
    F3,
    F4,
}

/// Closed-form benchmark function on `[0,1]^d` with mixed first derivatives.
#[derive(Debug, Clone)]
pub struct TestFunction {
    kind: TestKind,
    d: usize,
    c: Vec<f64>,
}

/// Default coefficients `c_i = 2^{-(i+2)}`, `i = 1..d`.
pub fn default_coefficients(d: usize) -> Vec<f64> {
    (1..=d).map(|i| 0.5f64.powi(i as i32 + 2)).collect()
}

/// Looks up `f0`…`f4`; `f0` and `f1` are two-dimensional.
pub fn test_function(name: &str, d: usize) -> Result<TestFunction> {
    let kind = match name {
        "f0" => TestKind::F0,
        "f1" => TestKind::F1,
        "f2" => TestKind::F2,
        "f3" => TestKind::F3,
        "f4" => TestKind::F4,
        _ => return Err(Error::UnknownFunction(name.into())),
    };
    if d == 0 || (matches!(kind, TestKind::F0 | TestKind::F1) && d != 2) {
        return Err(Error::Input(format!("{name} is not defined for d={d}")));
    }
    if kind == TestKind::F4 && d < 2 {
        return Err(Error::Input("f4 needs d ≥ 2".into()));
    }
    Ok(TestFunction {
        kind,
        d,
        c: default_coefficients(d),
    })
}

impl TestFunction {
    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// Value at plain coordinates (interfaces read from the right).
    pub fn value(&self, x: &[f64]) -> f64 {
        let c: Vec<Coord> = x.iter().map(|&v| Coord::new(v)).collect();
        let mut out = [0.0];
        self.sample(&c, 0, &mut out).expect("order 0 is always available");
        out[0]
    }

    /// `∫_{[0,1]^d} f` where it is separable (`f2`, `f3`, `f4`).
    pub fn exact_integral(&self) -> Option<f64> {
        match self.kind {
            TestKind::F2 => Some(
                self.c
                    .iter()
                    .map(|&c| {
                        let s = PI.sqrt() / (2.0 * c);
                        s * (erf(c * 0.49) + erf(c * 0.51))
                    })
                    .product(),
            ),
            TestKind::F3 => Some(
                self.c
                    .iter()
                    .map(|&c| ((1.0 - (-c * 0.51).exp()) + (1.0 - (-c * 0.49).exp())) / c)
                    .product(),
            ),
            TestKind::F4 => Some(
                self.c
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| {
                        let top = if i < 2 { 0.5 } else { 1.0 };
                        ((c * top).exp() - 1.0) / c
                    })
                    .product(),
            ),
            _ => None,
        }
    }

    /// Per-dimension factors `[g, g']` of the separable functions.
    fn factor(&self, m: usize, x: Coord) -> [f64; 2] {
        let c = self.c[m];
        match self.kind {
            TestKind::F2 => {
                let u = x.x - 0.51;
                let g = (-c * c * u * u).exp();
                [g, -2.0 * c * c * u * g]
            }
            TestKind::F3 => {
                let u = x.x - 0.51;
                let g = (-c * u.abs()).exp();
                let s = if x.above(0.51) { 1.0 } else { -1.0 };
                [g, -c * s * g]
            }
            TestKind::F4 => {
                let g = (c * x.x).exp();
                [g, c * g]
            }
            _ => unreachable!("non-separable"),
        }
    }
}

impl Sampler for TestFunction {
    fn dim(&self) -> usize {
        self.d
    }

    fn sample(&self, x: &[Coord], order: usize, out: &mut [f64]) -> Result<()> {
        if order > 1 {
            return Err(Error::Capability(format!(
                "test functions supply mixed derivatives up to order 1, not {order}"
            )));
        }
        let d = self.d;
        let o1 = order + 1;
        let count = o1.pow(d as u32);
        match self.kind {
            TestKind::F0 => {
                let s = 2.0 * PI * (x[0].x + x[1].x);
                let g = s.sin().exp();
                let w = 2.0 * PI;
                out[0] = g;
                if order == 1 {
                    out[1] = w * s.cos() * g;
                    out[2] = out[1];
                    out[3] = w * w * g * (s.cos().powi(2) - s.sin());
                }
            }
            TestKind::F1 => {
                let (a, b) = (x[0].x, x[1].x);
                let u = 0.3 - a * a - b * b;
                let f = 1.0 / (u.abs() + 0.1);
                out[0] = f;
                if order == 1 {
                    let sgn = if u >= 0.0 { 1.0 } else { -1.0 };
                    out[1] = 2.0 * sgn * b * f * f;
                    out[2] = 2.0 * sgn * a * f * f;
                    out[3] = 8.0 * a * b * f * f * f;
                }
            }
            _ => {
                if self.kind == TestKind::F4 && (x[0].above(0.5) || x[1].above(0.5)) {
                    out[..count].iter_mut().for_each(|v| *v = 0.0);
                    return Ok(());
                }
                let factors: Vec<[f64; 2]> = (0..d).map(|m| self.factor(m, x[m])).collect();
                let mut l = vec![0usize; d];
                let shape = vec![o1; d];
                for (k, v) in out.iter_mut().enumerate().take(count) {
                    ElementStore::unflatten(&shape, k, &mut l);
                    *v = factors.iter().zip(&l).map(|(f, &lm)| f[lm]).product();
                }
            }
        }
        Ok(())
    }
}
