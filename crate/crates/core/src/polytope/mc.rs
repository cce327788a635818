//! Monte Carlo fiber volumes.
//!
//! For N ≤ 6 the fiber is sampled by rejection from the box
//! `0 ≤ w_kl ≤ min(u_k, u_l)` over the chart coordinates.
//!
//! From N = 7 on the box acceptance rate collapses, and the volume is
//! obtained from the density of the row sums instead. With independent
//! `w_kl ~ Exp(s_k + s_l)` the row sums `U = A·w` have density
//!
//! ```text
//! p_U(u) = ½ V_N(u) e^{−s·u} Π_{k<l} (s_k + s_l),
//! ```
//!
//! so `V_N(u) = 2 p_U(u) e^{s·u} / Π(s_k + s_l)` for any `s`. Choosing `s` at
//! the saddle point `Σ_{l≠k} 1/(s_k + s_l) = u_k` puts `u` at the mean of
//! `U`. The density is then the Fourier integral of the characteristic
//! function `φ(t) = Π 1/(1 − i(t_k + t_l)/(s_k + s_l))`, which is evaluated
//! by importance sampling from a multivariate Student-t fitted to the
//! covariance of `U`.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;

use super::{fiber_dimension, pairs, Chart, DiagonalMarginal, PolytopeVolume, VolumeMethod};
use crate::error::{Error, Result};
use crate::numerics::rng::counter_rng;
use crate::numerics::{ln_gamma, pairwise_sum, SignedLogReal};

/// Smallest N estimated through the row-sum density.
pub const FOURIER_MIN_N: usize = 7;

const CHUNK: u64 = 4096;
const STUDENT_DOF: f64 = 8.0;
const SCALE_INFLATION: f64 = 1.2;

/// Monte Carlo fiber volume with the standard error of its logarithm.
/// Deterministic given `(seed, n_samples)`: samples are drawn in fixed chunks
/// of 4096, chunk `j` from the counter stream `(seed, j)`.
pub fn mc_volume(u: &DiagonalMarginal, n_samples: u64, seed: u64) -> Result<PolytopeVolume> {
    let n = u.n();
    if n < 4 {
        return Err(Error::UnsupportedSize { n, allowed: "N ≥ 4" });
    }
    if n_samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {n_samples}")));
    }
    u.require_feasible()?;
    let (value, std_error) = if n < FOURIER_MIN_N {
        rejection(u, n_samples, seed)?
    } else {
        fourier(u, n_samples, seed)?
    };
    Ok(PolytopeVolume {
        value,
        method: VolumeMethod::Mc,
        std_error,
        dimension: fiber_dimension(n),
    })
}

fn chunks(n_samples: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let n_chunks = n_samples.div_ceil(CHUNK) as usize;
    (0..n_chunks).into_par_iter().map(move |j| {
        let j = j as u64;
        (j, CHUNK.min(n_samples - j * CHUNK))
    })
}

fn rejection(u: &DiagonalMarginal, n_samples: u64, seed: u64) -> Result<(SignedLogReal, f64)> {
    let chart = Chart::new(u.n())?;
    let bounds = chart.coordinate_bounds(u.u());
    if bounds.iter().any(|&b| b <= 0.0) {
        // a zero row sum pins every entry in its row: lower-dimensional fiber
        return Ok((SignedLogReal::ZERO, 0.0));
    }
    let hits: u64 = chunks(n_samples)
        .map(|(j, len)| {
            let mut rng = counter_rng(seed, j);
            let mut c = vec![0.0; bounds.len()];
            let mut dep = Vec::with_capacity(u.n());
            let mut hits = 0u64;
            for _ in 0..len {
                for (ci, b) in c.iter_mut().zip(&bounds) {
                    *ci = b * rng.random::<f64>();
                }
                chart.dependent_entries(u.u(), &c, &mut dep);
                if dep.iter().all(|&x| x >= 0.0) {
                    hits += 1;
                }
            }
            hits
        })
        .collect::<Vec<u64>>()
        .iter()
        .sum();
    if hits == 0 {
        return Ok((SignedLogReal::ZERO, f64::INFINITY));
    }
    let p = hits as f64 / n_samples as f64;
    let log_box: f64 = bounds.iter().map(|b| b.ln()).sum();
    let se = ((1.0 - p) / (n_samples as f64 * p)).sqrt();
    Ok((SignedLogReal::from_ln(log_box + p.ln()), se))
}

/// Rates `s` with `Σ_{l≠k} 1/(s_k + s_l) = u_k`, by damped Newton on the
/// convex function `F(s) = s·u − Σ_{k<l} ln(s_k + s_l)`.
pub(crate) fn saddle_rates(u: &[f64]) -> Result<Vec<f64>> {
    let n = u.len();
    let mean = u.iter().sum::<f64>() / n as f64;
    let mut s = vec![(n as f64 - 1.0) / (2.0 * mean); n];
    let f = |s: &[f64]| -> f64 {
        let mut acc: f64 = s.iter().zip(u).map(|(a, b)| a * b).sum();
        for k in 0..n {
            for l in k + 1..n {
                let x = s[k] + s[l];
                if x <= 0.0 {
                    return f64::INFINITY;
                }
                acc -= x.ln();
            }
        }
        acc
    };
    for _ in 0..200 {
        let mut grad = DVector::from_column_slice(u);
        let mut hess = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            for l in k + 1..n {
                let r = 1.0 / (s[k] + s[l]);
                grad[k] -= r;
                grad[l] -= r;
                let r2 = r * r;
                hess[(k, k)] += r2;
                hess[(l, l)] += r2;
                hess[(k, l)] = r2;
                hess[(l, k)] = r2;
            }
        }
        let rel = grad.iter().zip(u).map(|(g, x)| g.abs() / x.max(mean * 1e-3)).fold(0.0, f64::max);
        if rel < 1e-13 {
            return Ok(s);
        }
        let chol = Cholesky::new(hess)
            .ok_or_else(|| Error::Numerical("saddle Hessian is not positive definite".into()))?;
        let step = chol.solve(&(-&grad));
        let slope = grad.dot(&step);
        let f0 = f(&s);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = s.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            let ft = f(&trial);
            if ft <= f0 + 1e-4 * t * slope || (ft.is_finite() && (f0 - ft).abs() <= 1e-15 * f0.abs()) {
                s = trial;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::Numerical("saddle-point line search stalled".into()));
            }
        }
    }
    Err(Error::Numerical(
        "saddle-point iteration did not converge (marginal too close to the feasibility boundary?)".into(),
    ))
}

fn fourier(u: &DiagonalMarginal, n_samples: u64, seed: u64) -> Result<(SignedLogReal, f64)> {
    if 2.0 * u.u().iter().copied().fold(0.0, f64::max) >= u.s() {
        return Err(Error::Numerical(
            "row-sum density estimator needs 2·max(u) < S strictly".into(),
        ));
    }
    let n = u.n();
    let uu = u.u();
    let s = saddle_rates(uu)?;
    let pr = pairs(n);
    let rate: Vec<f64> = pr.iter().map(|&(k, l)| s[k] + s[l]).collect();

    // Cov(U) at the saddle; proposal scale (inflation²)·Cov(U)⁻¹
    let mut cov = DMatrix::<f64>::zeros(n, n);
    for (&(k, l), r) in pr.iter().zip(&rate) {
        let v = 1.0 / (r * r);
        cov[(k, k)] += v;
        cov[(l, l)] += v;
        cov[(k, l)] += v;
        cov[(l, k)] += v;
    }
    let scale = cov
        .try_inverse()
        .ok_or_else(|| Error::Numerical("row-sum covariance is singular".into()))?
        * SCALE_INFLATION.powi(2);
    let l = Cholesky::new(scale)
        .ok_or_else(|| Error::Numerical("proposal scale is not positive definite".into()))?
        .l();
    let log_det_scale: f64 = 2.0 * (0..n).map(|i| l[(i, i)].ln()).sum::<f64>();
    let nf = n as f64;
    let nu = STUDENT_DOF;
    let log_norm = ln_gamma(0.5 * (nu + nf))? - ln_gamma(0.5 * nu)? - 0.5 * nf * (nu * PI).ln()
        - 0.5 * log_det_scale;
    let chi = ChiSquared::new(nu).map_err(|e| Error::Numerical(e.to_string()))?;

    let values: Vec<f64> = chunks(n_samples)
        .flat_map_iter(|(j, len)| {
            let mut rng = counter_rng(seed, j);
            let mut z = vec![0.0; n];
            let mut t = vec![0.0; n];
            let mut out = Vec::with_capacity(len as usize);
            for _ in 0..len {
                for zi in z.iter_mut() {
                    *zi = rng.sample(StandardNormal);
                }
                let w: f64 = chi.sample(&mut rng) / nu;
                let inv_sqrt_w = 1.0 / w.sqrt();
                for (i, ti) in t.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (k, zk) in z.iter().enumerate().take(i + 1) {
                        acc += l[(i, k)] * zk;
                    }
                    *ti = acc * inv_sqrt_w;
                }
                let q = z.iter().map(|x| x * x).sum::<f64>() / w;
                let log_g = log_norm - 0.5 * (nu + nf) * (q / nu).ln_1p();
                let mut log_abs = 0.0;
                let mut phase = 0.0;
                for (&(k, m), r) in pr.iter().zip(&rate) {
                    let tau = (t[k] + t[m]) / r;
                    log_abs -= 0.5 * (tau * tau).ln_1p();
                    phase += tau.atan();
                }
                let tu: f64 = t.iter().zip(uu).map(|(a, b)| a * b).sum();
                out.push((log_abs - log_g).exp() * (phase - tu).cos());
            }
            out
        })
        .collect();

    let m = pairwise_sum(&values) / n_samples as f64;
    if !(m > 0.0) {
        return Err(Error::Numerical(format!(
            "row-sum density estimate is not positive ({m:e}); increase the sample count"
        )));
    }
    let dev: Vec<f64> = values.iter().map(|x| (x - m) * (x - m)).collect();
    let sd = (pairwise_sum(&dev) / (n_samples as f64 - 1.0)).sqrt();
    let su: f64 = s.iter().zip(uu).map(|(a, b)| a * b).sum();
    let log_rates: f64 = rate.iter().map(|r| r.ln()).sum();
    let log_v = 2f64.ln() + m.ln() - nf * (2.0 * PI).ln() + su - log_rates;
    Ok((SignedLogReal::from_ln(log_v), sd / (m * (n_samples as f64).sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::exact_volume_small_n;

    fn marginal(u: &[f64]) -> DiagonalMarginal {
        DiagonalMarginal::new(u.to_vec()).unwrap()
    }

    #[test]
    fn saddle_solves_the_mean_equations() {
        let u = [0.8, 1.0, 1.3, 0.9, 1.1, 1.2, 0.7];
        let s = saddle_rates(&u).unwrap();
        for k in 0..u.len() {
            let m: f64 = (0..u.len()).filter(|&l| l != k).map(|l| 1.0 / (s[k] + s[l])).sum();
            assert!((m - u[k]).abs() < 1e-12);
        }
        let sym = saddle_rates(&[2.0; 5]).unwrap();
        assert!(sym.iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn rejection_matches_exact_n4() {
        let u = marginal(&[1.0; 4]);
        let exact = exact_volume_small_n(&u).unwrap().log_volume();
        let est = mc_volume(&u, 200_000, 1).unwrap();
        assert!((est.log_volume() - exact).abs() < 4.0 * est.std_error);
    }

    #[test]
    fn density_route_matches_exact_n5() {
        let u = marginal(&[0.9, 1.0, 1.1, 1.05, 0.95]);
        let exact = exact_volume_small_n(&u).unwrap().log_volume();
        let (v, se) = fourier(&u, 400_000, 2).unwrap();
        assert!((v.ln() - exact).abs() < 4.0 * se, "{} vs {exact} ± {se}", v.ln());
    }

    #[test]
    fn deterministic_given_seed() {
        let u = marginal(&[1.0; 8]);
        let a = mc_volume(&u, 20_000, 4).unwrap();
        let b = mc_volume(&u, 20_000, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_infeasible_and_small_n() {
        assert!(matches!(
            mc_volume(&marginal(&[3.0, 1.0, 1.0, 0.5]), 100, 0),
            Err(Error::Infeasible { .. })
        ));
        assert!(mc_volume(&marginal(&[1.0; 3]), 100, 0).is_err());
    }
}
