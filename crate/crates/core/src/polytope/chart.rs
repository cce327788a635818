use nalgebra::DMatrix;

use super::{fiber_dimension, pairs};
use crate::binom2;
use crate::error::{Error, Result};

/// Coordinate chart on the fibers of the row-sum map.
///
/// The dependent entries are the triangle `{01, 02, 12}` plus the star
/// `{0k : k ≥ 3}`; every other pair is a chart coordinate. For N = 4 this
/// leaves `(1,3), (2,3)` (zero-based) as coordinates. The combined map
/// `w ↦ (A·w, chart coordinates of w)` has determinant ±2, which is checked
/// on construction.
#[derive(Clone, Debug)]
pub struct Chart {
    n: usize,
    pairs: Vec<(usize, usize)>,
    coords: Vec<usize>,
    dependent: Vec<usize>,
    // w = from_u·u + from_c·c
    from_u: DMatrix<f64>,
    from_c: DMatrix<f64>,
    det: f64,
}

impl Chart {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::UnsupportedSize { n, allowed: "N ≥ 3" });
        }
        let pairs = pairs(n);
        let b = binom2(n);
        let (coords, dependent): (Vec<usize>, Vec<usize>) =
            (0..b).partition(|&p| matches!(pairs[p], (k, l) if k >= 1 && (k, l) != (1, 2)));
        debug_assert_eq!(coords.len(), fiber_dimension(n));

        let mut m = DMatrix::<f64>::zeros(b, b);
        for (p, &(k, l)) in pairs.iter().enumerate() {
            m[(k, p)] = 1.0;
            m[(l, p)] = 1.0;
        }
        for (r, &p) in coords.iter().enumerate() {
            m[(n + r, p)] = 1.0;
        }
        let det = m.clone().lu().determinant();
        if ((det.abs() - 2.0) / 2.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!(
                "chart determinant is {det}, expected ±2"
            )));
        }
        let inv = m
            .try_inverse()
            .ok_or_else(|| Error::Numerical("chart matrix is singular".into()))?;
        // Entries are exact multiples of ½.
        let inv = inv.map(|x| (2.0 * x).round() / 2.0);
        let from_u = inv.columns(0, n).into_owned();
        let from_c = inv.columns(n, b - n).into_owned();
        Ok(Self {
            n,
            pairs,
            coords,
            dependent,
            from_u,
            from_c,
            det,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn determinant(&self) -> f64 {
        self.det
    }

    /// Chart coordinates as zero-based pairs `(k, l)`.
    pub fn coordinate_pairs(&self) -> Vec<(usize, usize)> {
        self.coords.iter().map(|&p| self.pairs[p]).collect()
    }

    /// All off-diagonal entries for marginal `u` and chart point `c`.
    pub fn reconstruct(&self, u: &[f64], c: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.pairs.len()];
        for (p, wp) in w.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, uj) in u.iter().enumerate() {
                acc += self.from_u[(p, j)] * uj;
            }
            for (j, cj) in c.iter().enumerate() {
                acc += self.from_c[(p, j)] * cj;
            }
            *wp = acc;
        }
        w
    }

    /// The fiber as `{c : G·c ≤ h}`: one row per dependent entry
    /// (`w_dep ≥ 0`) followed by `−c_i ≤ 0`.
    pub fn inequalities(&self, u: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let d = self.dimension();
        let mut g = Vec::with_capacity(self.dependent.len() + d);
        let mut h = Vec::with_capacity(self.dependent.len() + d);
        for &p in &self.dependent {
            g.push((0..d).map(|j| -self.from_c[(p, j)]).collect());
            h.push((0..self.n).map(|j| self.from_u[(p, j)] * u[j]).sum());
        }
        for i in 0..d {
            let mut row = vec![0.0; d];
            row[i] = -1.0;
            g.push(row);
            h.push(0.0);
        }
        (g, h)
    }

    /// Dependent entries only, for a fast feasibility test of a chart point.
    pub fn dependent_entries(&self, u: &[f64], c: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for &p in &self.dependent {
            let mut acc = 0.0;
            for (j, uj) in u.iter().enumerate() {
                acc += self.from_u[(p, j)] * uj;
            }
            for (j, cj) in c.iter().enumerate() {
                acc += self.from_c[(p, j)] * cj;
            }
            out.push(acc);
        }
    }

    /// Upper bound of each chart coordinate: `w_kl ≤ min(u_k, u_l)`.
    pub fn coordinate_bounds(&self, u: &[f64]) -> Vec<f64> {
        self.coords
            .iter()
            .map(|&p| {
                let (k, l) = self.pairs[p];
                u[k].min(u[l])
            })
            .collect()
    }
}
