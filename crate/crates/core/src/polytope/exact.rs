//! Exact fiber volumes by vertex enumeration and recursive cone
//! decomposition over facets.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use super::{fiber_dimension, Chart, DiagonalMarginal, PolytopeVolume, VolumeMethod};
use crate::error::{Error, Result};
use crate::numerics::SignedLogReal;

/// N = 3: the fiber is the single point
/// `w_01 = (u₀+u₁−u₂)/2, w_02 = (u₀+u₂−u₁)/2, w_12 = (u₁+u₂−u₀)/2`, counted
/// with measure 1 when it is nonnegative.
pub fn exact_volume_n3(u: &DiagonalMarginal) -> Result<PolytopeVolume> {
    if u.n() != 3 {
        return Err(Error::UnsupportedSize { n: u.n(), allowed: "N = 3" });
    }
    let v = u.u();
    let tol = 1e-12 * u.s();
    let w = [
        0.5 * (v[0] + v[1] - v[2]),
        0.5 * (v[0] + v[2] - v[1]),
        0.5 * (v[1] + v[2] - v[0]),
    ];
    let feasible = w.iter().all(|&x| x >= -tol);
    Ok(PolytopeVolume {
        value: if feasible {
            SignedLogReal::ONE
        } else {
            SignedLogReal::ZERO
        },
        method: VolumeMethod::Exact,
        std_error: 0.0,
        dimension: 0,
    })
}

/// Exact fiber volume for N ∈ {4, 5} in the [`Chart`] convention. An
/// infeasible marginal has volume zero.
pub fn exact_volume_small_n(u: &DiagonalMarginal) -> Result<PolytopeVolume> {
    let n = u.n();
    if !(4..=5).contains(&n) {
        return Err(Error::UnsupportedSize { n, allowed: "N ∈ {4, 5}" });
    }
    let chart = Chart::new(n)?;
    Ok(exact_volume_in_chart(&chart, u))
}

pub(crate) fn exact_volume_in_chart(chart: &Chart, u: &DiagonalMarginal) -> PolytopeVolume {
    let d = chart.dimension();
    let value = if u.is_feasible() {
        let (g, h) = chart.inequalities(u.u());
        SignedLogReal::from_f64(polytope_volume(&g, &h, d))
    } else {
        SignedLogReal::ZERO
    };
    PolytopeVolume {
        value,
        method: VolumeMethod::Exact,
        std_error: 0.0,
        dimension: fiber_dimension(u.n()),
    }
}

/// Volume of `{x ∈ Rᵈ : G·x ≤ h}`, assumed bounded.
pub(crate) fn polytope_volume(g: &[Vec<f64>], h: &[f64], d: usize) -> f64 {
    let scale = h.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let tol = 1e-10 * scale;
    let verts = vertices(g, h, d, tol);
    if verts.len() < d + 1 {
        return 0.0;
    }
    let faces = Faces { g, h, tol };
    faces.volume(&verts, d)
}

fn vertices(g: &[Vec<f64>], h: &[f64], d: usize, tol: f64) -> Vec<DVector<f64>> {
    let m = g.len();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for subset in combinations(m, d) {
        let a = DMatrix::from_fn(d, d, |r, c| g[subset[r]][c]);
        let b = DVector::from_fn(d, |r, _| h[subset[r]]);
        let lu = a.lu();
        if lu.determinant().abs() < 1e-12 {
            continue;
        }
        let Some(x) = lu.solve(&b) else { continue };
        let feasible = g
            .iter()
            .zip(h)
            .all(|(row, hi)| dot(row, x.as_slice()) <= hi + tol);
        if feasible && !out.iter().any(|v| (v - &x).amax() <= tol) {
            out.push(x);
        }
    }
    out
}

struct Faces<'a> {
    g: &'a [Vec<f64>],
    h: &'a [f64],
    tol: f64,
}

impl Faces<'_> {
    /// `k`-dimensional volume of the convex hull of `verts`, whose facets are
    /// cut out by the inequality system. Zero when the affine hull has lower
    /// dimension.
    fn volume(&self, verts: &[DVector<f64>], k: usize) -> f64 {
        if k == 0 {
            return if verts.is_empty() { 0.0 } else { 1.0 };
        }
        let n = verts.len() as f64;
        let x0 = verts.iter().fold(DVector::zeros(verts[0].len()), |acc, v| acc + v) / n;
        let basis = orthonormal_basis(verts, &x0, self.tol);
        if basis.len() < k {
            return 0.0;
        }
        if k == 1 {
            let t: Vec<f64> = verts.iter().map(|v| (v - &x0).dot(&basis[0])).collect();
            let lo = t.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            return hi - lo;
        }
        let mut seen = BTreeSet::new();
        let mut acc = 0.0;
        for (row, &hi) in self.g.iter().zip(self.h) {
            let a = DVector::from_column_slice(row);
            let proj = basis.iter().fold(DVector::zeros(a.len()), |p, q| p + q * a.dot(q));
            let norm = proj.norm();
            if norm <= 1e-12 * a.norm() {
                continue;
            }
            let tight: Vec<usize> = (0..verts.len())
                .filter(|&i| (a.dot(&verts[i]) - hi).abs() <= self.tol)
                .collect();
            if tight.len() < k || !seen.insert(tight.clone()) {
                continue;
            }
            let face: Vec<DVector<f64>> = tight.iter().map(|&i| verts[i].clone()).collect();
            let height = (hi - a.dot(&x0)) / norm;
            acc += height * self.volume(&face, k - 1);
        }
        acc / k as f64
    }
}

fn orthonormal_basis(verts: &[DVector<f64>], x0: &DVector<f64>, tol: f64) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in verts {
        let mut r = v - x0;
        for q in &basis {
            let c = r.dot(q);
            r -= q * c;
        }
        let nr = r.norm();
        if nr > 1e3 * tol {
            basis.push(r / nr);
        }
    }
    basis
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}
