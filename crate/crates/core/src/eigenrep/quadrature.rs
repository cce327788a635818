//! Tensor quadrature of the eigenvalue integral
//!
//! ```text
//! Z[0] = (1/N!) (−π)^{N(N−1)/2} / Δ(e) ∫ dλ Δ(λ)²/Δ(λ²) e^{−gΣλ⁴} det_{k,l}(e^{−e_k λ_l²})
//! ```
//!
//! Each axis is compactified by `λ = s·tan t` and sampled on a uniform
//! midpoint grid in `t ∈ (−π/2, π/2)`. The grid is shifted by a quarter step
//! so that no two nodes satisfy `λ_k + λ_l = 0`; the integrand is smooth there
//! anyway because the determinant has two equal columns on that hyperplane.
//! The integrand is symmetric in λ, so only strictly increasing index tuples
//! are visited and the `1/N!` cancels against the orbit size.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::vandermonde::{vandermonde, vandermonde_ratio};
use crate::error::{Error, Result};
use crate::model::{Coupling, KineticSpectrum};
use crate::numerics::{pairwise_sum, SignedLogReal};
use crate::binom2;

pub const MAX_QUADRATURE_N: usize = 4;

const GRID_OFFSET: f64 = 0.25;

/// `ln Z[0]` from the eigenvalue integral with `nodes_per_dim` nodes per axis.
pub fn log_z_eigen_quadrature(
    s: &KineticSpectrum,
    g: Coupling,
    nodes_per_dim: usize,
) -> Result<SignedLogReal> {
    let n = s.n();
    if n > MAX_QUADRATURE_N {
        return Err(Error::UnsupportedSize { n, allowed: "N ≤ 4" });
    }
    if nodes_per_dim < n.max(2) {
        return Err(Error::Domain(format!(
            "need at least max(N, 2) nodes per axis, got {nodes_per_dim}"
        )));
    }
    s.require_distinct()?;
    let e = s.eigenvalues();
    let scale = 1.0 / s.xi().sqrt();
    let h = PI / nodes_per_dim as f64;

    let mut lambda = Vec::with_capacity(nodes_per_dim);
    let mut weight = Vec::with_capacity(nodes_per_dim);
    for i in 0..nodes_per_dim {
        let t = -0.5 * PI + (i as f64 + 0.5 + GRID_OFFSET) * h;
        let l = scale * t.tan();
        let c = t.cos();
        lambda.push(l);
        weight.push(scale * h / (c * c) * (-g.value() * l.powi(4)).exp());
    }
    // gauss[k][i] = exp(−e_k λ_i²)
    let gauss: Vec<Vec<f64>> = e
        .iter()
        .map(|ek| lambda.iter().map(|l| (-ek * l * l).exp()).collect())
        .collect();
    let grid = Grid {
        lambda: &lambda,
        weight: &weight,
        gauss: &gauss,
        n,
    };

    let partials: Vec<f64> = (0..nodes_per_dim)
        .into_par_iter()
        .map(|first| grid.sum_with_first(first))
        .collect();
    let total = pairwise_sum(&partials);

    let b = binom2(n);
    let delta_e = vandermonde(e);
    let sign = if b % 2 == 0 { 1 } else { -1 } * delta_e.sign() * sign_of(total);
    if sign <= 0 {
        return Err(Error::Numerical(format!(
            "eigenvalue quadrature produced a non-positive partition function (integral {total:e})"
        )));
    }
    Ok(SignedLogReal::from_ln(
        b as f64 * PI.ln() - delta_e.log_mag() + total.abs().ln(),
    ))
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

struct Grid<'a> {
    lambda: &'a [f64],
    weight: &'a [f64],
    gauss: &'a [Vec<f64>],
    n: usize,
}

impl Grid<'_> {
    /// Sum over increasing tuples `first = i_1 < i_2 < … < i_N`, in a fixed
    /// lexicographic order.
    fn sum_with_first(&self, first: usize) -> f64 {
        let m = self.lambda.len();
        let n = self.n;
        let mut idx = [0usize; MAX_QUADRATURE_N];
        idx[0] = first;
        if n == 1 {
            return self.point(&idx[..1]);
        }
        for (j, slot) in idx.iter_mut().enumerate().take(n).skip(1) {
            *slot = first + j;
        }
        if idx[n - 1] >= m {
            return 0.0;
        }
        let mut acc = Vec::new();
        loop {
            acc.push(self.point(&idx[..n]));
            // advance positions 1..n
            let mut pos = n - 1;
            loop {
                if idx[pos] < m - (n - pos) {
                    idx[pos] += 1;
                    for q in pos + 1..n {
                        idx[q] = idx[q - 1] + 1;
                    }
                    break;
                }
                if pos == 1 {
                    return pairwise_sum(&acc);
                }
                pos -= 1;
            }
        }
    }

    fn point(&self, idx: &[usize]) -> f64 {
        let n = idx.len();
        let mut ratio = 1.0;
        let mut wprod = 1.0;
        for (a, &ia) in idx.iter().enumerate() {
            let la = self.lambda[ia];
            wprod *= self.weight[ia];
            for &ib in &idx[a + 1..] {
                let lb = self.lambda[ib];
                ratio *= (lb - la) / (lb + la);
            }
        }
        if wprod == 0.0 {
            return 0.0;
        }
        let mut mat = [[0.0f64; MAX_QUADRATURE_N]; MAX_QUADRATURE_N];
        for (k, row) in mat.iter_mut().enumerate().take(n) {
            for (l, &il) in idx.iter().enumerate() {
                row[l] = self.gauss[k][il];
            }
        }
        ratio * small_det(&mut mat, n) * wprod
    }
}

/// Determinant of the leading `n×n` block by Gaussian elimination with
/// partial pivoting.
fn small_det(a: &mut [[f64; MAX_QUADRATURE_N]; MAX_QUADRATURE_N], n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let mut p = c;
        for r in c + 1..n {
            if a[r][c].abs() > a[p][c].abs() {
                p = r;
            }
        }
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c];
        det *= piv;
        for r in c + 1..n {
            let f = a[r][c] / piv;
            if f != 0.0 {
                for k in c + 1..n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    det
}

/// The eigenvalue integrand `Δ(λ)²/Δ(λ²) · e^{−gΣλ⁴} · det(e^{−e_k λ_l²})`
/// at a single point, in log domain.
pub fn eigen_integrand(s: &KineticSpectrum, g: Coupling, lambda: &[f64]) -> Result<SignedLogReal> {
    let n = s.n();
    if lambda.len() != n {
        return Err(Error::Domain(format!(
            "expected {n} eigenvalues, got {}",
            lambda.len()
        )));
    }
    if n > MAX_QUADRATURE_N {
        return Err(Error::UnsupportedSize { n, allowed: "N ≤ 4" });
    }
    let ratio = vandermonde_ratio(lambda)?;
    let mut mat = [[0.0f64; MAX_QUADRATURE_N]; MAX_QUADRATURE_N];
    for (k, ek) in s.eigenvalues().iter().enumerate() {
        for (l, lam) in lambda.iter().enumerate() {
            mat[k][l] = (-ek * lam * lam).exp();
        }
    }
    let det = SignedLogReal::from_f64(small_det(&mut mat, n));
    let quartic: f64 = lambda.iter().map(|l| -g.value() * l.powi(4)).sum();
    Ok(ratio * det * SignedLogReal::from_ln(quartic))
}
