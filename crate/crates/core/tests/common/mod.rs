#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use mrcolloc::mra1d::{Coord, NestedFamily};
use mrcolloc::sparse_nd::{ElementStore, Sampler};
use mrcolloc::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fam(id: &str) -> Arc<NestedFamily> {
    Arc::new(NestedFamily::catalogue(id).unwrap())
}

/// Random sum of products of sines, with exact mixed derivatives.
pub struct TrigSum {
    d: usize,
    terms: Vec<(f64, Vec<(f64, f64)>)>,
}

impl TrigSum {
    pub fn new(d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..3)
            .map(|_| {
                let a = rng.gen_range(-1.0..1.0);
                let f = (0..d)
                    .map(|_| (rng.gen_range(0.5..6.0), rng.gen_range(0.0..6.3)))
                    .collect();
                (a, f)
            })
            .collect();
        Self { d, terms }
    }
}

impl Sampler for TrigSum {
    fn dim(&self) -> usize {
        self.d
    }
    fn sample(&self, x: &[Coord], order: usize, out: &mut [f64]) -> Result<()> {
        let o1 = order + 1;
        let mut l = vec![0usize; self.d];
        for (k, v) in out.iter_mut().enumerate().take(o1.pow(self.d as u32)) {
            ElementStore::unflatten(&vec![o1; self.d], k, &mut l);
            *v = self
                .terms
                .iter()
                .map(|(a, f)| {
                    a * f
                        .iter()
                        .zip(x)
                        .zip(&l)
                        .map(|((&(w, p), c), &lm)| {
                            w.powi(lm as i32) * (w * c.x + p + lm as f64 * FRAC_PI_2).sin()
                        })
                        .product::<f64>()
                })
                .sum();
        }
        Ok(())
    }
}
