use crate::model::KineticSpectrum;

/// `⟨Tr X⁴⟩` under `exp(−Tr E X²)`, by enumerating the three Wick pairings
/// of `Σ_{ijkl} X_ij X_jk X_kl X_li` with `⟨X_ab X_cd⟩ = δ_ad δ_bc/(e_a + e_b)`.
pub fn wick_first_order(s: &KineticSpectrum) -> f64 {
    let e = s.eigenvalues();
    let n = e.len();
    let cov = |a: usize, b: usize, c: usize, d: usize| {
        if a == d && b == c {
            1.0 / (e[a] + e[b])
        } else {
            0.0
        }
    };
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    acc += cov(i, j, j, k) * cov(k, l, l, i)
                        + cov(i, j, k, l) * cov(j, k, l, i)
                        + cov(i, j, l, i) * cov(j, k, k, l);
                }
            }
        }
    }
    acc
}
