//! Direct Monte Carlo over Hermitian matrix entries with the free Gaussian
//! measure as importance distribution.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_exact::log_z_free_product;
use crate::model::{Coupling, KineticSpectrum};
use crate::numerics::rng::counter_rng;
use crate::numerics::{log_sum_exp, pairwise_sum};
use crate::binom2;

/// A Hermitian matrix stored by its independent real coordinates. Pairs are
/// ordered `(0,1), (0,2), …, (1,2), …`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianSample {
    pub diag: Vec<f64>,
    pub offdiag_re: Vec<f64>,
    pub offdiag_im: Vec<f64>,
}

impl HermitianSample {
    pub fn new(diag: Vec<f64>, offdiag_re: Vec<f64>, offdiag_im: Vec<f64>) -> Result<Self> {
        let b = binom2(diag.len());
        if offdiag_re.len() != b || offdiag_im.len() != b {
            return Err(Error::Domain(format!(
                "off-diagonal parts must have N(N-1)/2 = {b} entries"
            )));
        }
        if diag.iter().chain(&offdiag_re).chain(&offdiag_im).any(|x| !x.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self {
            diag,
            offdiag_re,
            offdiag_im,
        })
    }

    /// Draw from `exp(−Tr E X²)`: `X_kk ~ N(0, 1/(2e_k))`, real and imaginary
    /// parts of `X_kl` (k<l) each `~ N(0, 1/(2(e_k + e_l)))`.
    pub fn draw<R: Rng>(s: &KineticSpectrum, rng: &mut R) -> Self {
        let e = s.eigenvalues();
        let n = e.len();
        let b = binom2(n);
        let mut diag = Vec::with_capacity(n);
        let mut re = Vec::with_capacity(b);
        let mut im = Vec::with_capacity(b);
        for &ek in e {
            let z: f64 = rng.sample(StandardNormal);
            diag.push(z / (2.0 * ek).sqrt());
        }
        for k in 0..n {
            for l in k + 1..n {
                let sd = 1.0 / (2.0 * (e[k] + e[l])).sqrt();
                let zr: f64 = rng.sample(StandardNormal);
                let zi: f64 = rng.sample(StandardNormal);
                re.push(zr * sd);
                im.push(zi * sd);
            }
        }
        Self {
            diag,
            offdiag_re: re,
            offdiag_im: im,
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Dense complex entries `(re, im)` in row-major order.
    pub fn to_dense(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let mut re = vec![0.0; n * n];
        let mut im = vec![0.0; n * n];
        let mut p = 0;
        for k in 0..n {
            re[k * n + k] = self.diag[k];
            for l in k + 1..n {
                re[k * n + l] = self.offdiag_re[p];
                re[l * n + k] = self.offdiag_re[p];
                im[k * n + l] = self.offdiag_im[p];
                im[l * n + k] = -self.offdiag_im[p];
                p += 1;
            }
        }
        (re, im)
    }

    /// `Tr X⁴ = Σ_{ij} |(X²)_ij|²`.
    pub fn trace_x4(&self) -> f64 {
        let n = self.n();
        let (re, im) = self.to_dense();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (mut sr, mut si) = (0.0, 0.0);
                for k in 0..n {
                    let (ar, ai) = (re[i * n + k], im[i * n + k]);
                    let (br, bi) = (re[k * n + j], im[k * n + j]);
                    sr += ar * br - ai * bi;
                    si += ar * bi + ai * br;
                }
                acc += sr * sr + si * si;
            }
        }
        acc
    }

    /// `Tr E X² = Σ_k e_k X_kk² + Σ_{k<l} (e_k + e_l)|X_kl|²`.
    pub fn trace_ex2(&self, s: &KineticSpectrum) -> f64 {
        let e = s.eigenvalues();
        let mut acc: f64 = self.diag.iter().zip(e).map(|(x, ek)| ek * x * x).sum();
        let mut p = 0;
        for k in 0..e.len() {
            for l in k + 1..e.len() {
                let (r, i) = (self.offdiag_re[p], self.offdiag_im[p]);
                acc += (e[k] + e[l]) * (r * r + i * i);
                p += 1;
            }
        }
        acc
    }
}

/// Monte Carlo estimate of `ln Z` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// `ln Z[0] = ln Z_free + ln E[exp(−g Tr X⁴)]` under the free measure.
///
/// Sample `i` uses the counter stream `(seed, i)`; the weights are reduced in
/// index order with a fixed pairwise tree, so the estimate is independent of
/// the thread count. The standard error is the delta-method error of the log
/// of the sample mean.
pub fn log_z_matrix_mc(
    s: &KineticSpectrum,
    g: Coupling,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {n_samples}")));
    }
    let log_free = log_z_free_product(s).ln();
    let gv = g.value();
    let log_w: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            if gv == 0.0 {
                return 0.0;
            }
            let mut rng = counter_rng(seed, i);
            -gv * HermitianSample::draw(s, &mut rng).trace_x4()
        })
        .collect();

    let n = n_samples as f64;
    let log_mean = log_sum_exp(&log_w) - n.ln();
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y: Vec<f64> = log_w.iter().map(|w| (w - max).exp()).collect();
    let y_mean = pairwise_sum(&y) / n;
    let dev: Vec<f64> = y.iter().map(|v| (v - y_mean) * (v - y_mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    Ok(McEstimate {
        mean: log_free + log_mean,
        std_error: (var / n).sqrt() / y_mean,
        n_samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(e: &[f64]) -> KineticSpectrum {
        KineticSpectrum::new(e.to_vec()).unwrap()
    }

    #[test]
    fn free_estimate_is_exact() {
        let s = spectrum(&[0.5, 1.7, 2.2]);
        let est = log_z_matrix_mc(&s, Coupling::FREE, 1000, 3).unwrap();
        assert_eq!(est.mean, log_z_free_product(&s).ln());
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn same_seed_same_bits() {
        let s = spectrum(&[1.0, 2.0]);
        let g = Coupling::new(0.1).unwrap();
        let a = log_z_matrix_mc(&s, g, 5000, 9).unwrap();
        let b = log_z_matrix_mc(&s, g, 5000, 9).unwrap();
        assert_eq!(a, b);
        let c = log_z_matrix_mc(&s, g, 5000, 10).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn trace_x4_of_known_matrix() {
        // X = [[1, i], [−i, 2]]; X² = [[2, 3i], [−3i, 5]]; Tr X⁴ = 4 + 9 + 9 + 25.
        let x = HermitianSample::new(vec![1.0, 2.0], vec![0.0], vec![1.0]).unwrap();
        assert!((x.trace_x4() - 47.0).abs() < 1e-12);
    }

    #[test]
    fn sampler_reproduces_the_quadratic_form_mean() {
        // ⟨Tr E X²⟩ = N²/2 under exp(−Tr E X²).
        let s = spectrum(&[0.3, 1.0, 4.0]);
        let m = 40_000;
        let vals: Vec<f64> = (0..m)
            .map(|i| HermitianSample::draw(&s, &mut counter_rng(5, i)).trace_ex2(&s))
            .collect();
        let mean = vals.iter().sum::<f64>() / m as f64;
        assert!((mean - 4.5).abs() < 0.05, "{mean}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = spectrum(&[1.0]);
        assert!(log_z_matrix_mc(&s, Coupling::FREE, 1, 0).is_err());
        assert!(HermitianSample::new(vec![1.0, 2.0], vec![], vec![]).is_err());
    }
}
