use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::mra1d::{Coord, NestedFamily};
use crate::sparse_nd::{
    collocate, enumerate_sparse_elements, fast_values_to_surplus, integrate_nd, Sampler,
};
use crate::transform1d::Mode;
use crate::{Error, Result};

/// Random diffusion problem `(a u')' = 0`, `u(0)=0`, `u(1)=1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticConfig {
    pub d: usize,
    pub sigma: f64,
    pub n_cheb: usize,
}

impl EllipticConfig {
    pub fn new(d: usize, sigma: f64) -> Result<Self> {
        let c = Self { d, sigma, n_cheb: 31 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || !(0.0..6.0).contains(&self.sigma) || self.n_cheb < 3 {
            return Err(Error::Input(format!(
                "need d ≥ 1, 0 ≤ σ < 6 and at least 3 nodes (d={}, σ={}, nodes={})",
                self.d, self.sigma, self.n_cheb
            )));
        }
        Ok(())
    }

    /// Chebyshev–Gauss–Lobatto nodes mapped to `[0,1]`, ascending.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.n_cheb - 1;
        (0..=n)
            .map(|k| 0.5 * (1.0 - (PI * k as f64 / n as f64).cos()))
            .collect()
    }

    /// `a(y, x)` for `y ∈ [-1,1]^d`.
    pub fn diffusivity(&self, y: &[f64], x: f64) -> f64 {
        1.0 + self.sigma
            * y.iter()
                .enumerate()
                .map(|(k, yk)| {
                    let k = (k + 1) as f64;
                    (2.0 * PI * k * x).cos() * yk / (k * k * PI * PI)
                })
                .sum::<f64>()
    }
}

/// Spectral differentiation matrix on distinct nodes (barycentric form).
pub fn differentiation_matrix(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let w: Vec<f64> = (0..n)
        .map(|j| {
            1.0 / (0..n)
                .filter(|&k| k != j)
                .map(|k| x[j] - x[k])
                .product::<f64>()
        })
        .collect();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = w[j] / w[i] / (x[i] - x[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        d[(i, i)] = diag;
    }
    d
}

/// Solution at the Chebyshev nodes for one realisation `y ∈ [-1,1]^d`.
pub fn elliptic_solve_at(y: &[f64], cfg: &EllipticConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if y.len() != cfg.d {
        return Err(Error::Input(format!("expected {} random inputs, got {}", cfg.d, y.len())));
    }
    let x = cfg.nodes();
    let n = x.len();
    let dm = differentiation_matrix(&x);
    let a = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        x.iter().map(|&xi| cfg.diffusivity(y, xi)),
    ));
    let l = &dm * a * &dm;
    // Dirichlet values u(0)=0, u(1)=1 are eliminated from the interior rows.
    let m = n - 2;
    let li = l.view((1, 1), (m, m)).into_owned();
    let rhs = -l.view((1, n - 1), (m, 1)).column(0).into_owned();
    let ui = li
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular collocation system".into()))?;
    let mut u = Vec::with_capacity(n);
    u.push(0.0);
    u.extend(ui.iter());
    u.push(1.0);
    Ok(u)
}

/// Nodewise `u` and `u²` as a `2 × n_cheb`-output sampler on `[0,1]^d`.
struct SolutionSampler<'a> {
    cfg: &'a EllipticConfig,
}

impl Sampler for SolutionSampler<'_> {
    fn dim(&self) -> usize {
        self.cfg.d
    }
    fn outputs(&self) -> usize {
        2 * self.cfg.n_cheb
    }
    fn sample(&self, x: &[Coord], order: usize, out: &mut [f64]) -> Result<()> {
        if order > 0 {
            return Err(Error::Capability(
                "the elliptic solver provides no derivatives in the random variables".into(),
            ));
        }
        let y: Vec<f64> = x.iter().map(|c| 2.0 * c.x - 1.0).collect();
        let u = elliptic_solve_at(&y, self.cfg)?;
        let n = u.len();
        for (k, v) in u.iter().enumerate() {
            out[k] = *v;
            out[n + k] = v * v;
        }
        Ok(())
    }
}

/// Mean and variance at every spatial node.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub dof: usize,
}

impl Moments {
    /// CSV `x,mean,variance`.
    pub fn csv(&self) -> String {
        let mut s = String::from("x,mean,variance\n");
        for ((x, m), v) in self.x.iter().zip(&self.mean).zip(&self.variance) {
            s += &format!("{x:.16e},{m:.16e},{v:.16e}\n");
        }
        s
    }
}

/// Sparse-grid moments (Lagrange families only) on the level-`n` space.
pub fn elliptic_moments(
    cfg: &EllipticConfig,
    family: Arc<NestedFamily>,
    mode: Mode,
    n: i32,
) -> Result<Moments> {
    cfg.validate()?;
    if family.m() > 0 {
        return Err(Error::Capability(
            "elliptic moments need a Lagrange family (no derivative data)".into(),
        ));
    }
    let keys = enumerate_sparse_elements(cfg.d, n, mode);
    let sampler = SolutionSampler { cfg };
    let stores = collocate(&sampler, family, mode, &keys)?;
    let dof = stores[0].dof();
    let integrals = stores
        .iter()
        .map(|v| fast_values_to_surplus(v).map(|s| integrate_nd(&s)))
        .collect::<Result<Vec<f64>>>()?;
    let k = cfg.n_cheb;
    let mean = integrals[..k].to_vec();
    let variance = (0..k).map(|i| integrals[k + i] - mean[i] * mean[i]).collect();
    Ok(Moments {
        x: cfg.nodes(),
        mean,
        variance,
        dof,
    })
}
