use minilp::{ComparisonOp, OptimizationDirection, Problem};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use moyal_qmm::eigenrep::{vandermonde, vandermonde_ratio};
use moyal_qmm::factorized::{
    log_z_weak_coupling, log_z_weak_coupling_epsilon, quartic_gaussian_log_integral,
};
use moyal_qmm::free_exact::{log_z_free_epsilon_expansion, log_z_free_product};
use moyal_qmm::numerics::{log_log_slope, SignedLogReal};
use moyal_qmm::polytope::{pairs, DiagonalMarginal};
use moyal_qmm::{Coupling, KineticSpectrum};

fn close(a: SignedLogReal, b: SignedLogReal, tol: f64) -> bool {
    a.sign() == b.sign() && (a.log_mag() - b.log_mag()).abs() <= tol * a.log_mag().abs().max(1.0)
}

fn nonzero() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..-1e-6f64, 1e-6..1e6f64]
}

proptest! {
    #[test]
    fn signed_log_add_mul_commute_and_associate(a in nonzero(), b in nonzero(), c in nonzero()) {
        let (x, y, z) = (SignedLogReal::from_f64(a), SignedLogReal::from_f64(b), SignedLogReal::from_f64(c));
        prop_assert!(close(x * y, y * x, 1e-12));
        prop_assert!(close((x * y) * z, x * (y * z), 1e-12));
        prop_assert_eq!(x + y, y + x);
        // associativity of + is only meaningful away from cancellation
        if a.signum() == b.signum() && b.signum() == c.signum() {
            prop_assert!(close((x + y) + z, x + (y + z), 1e-12));
        }
    }

    #[test]
    fn spectrum_epsilon_round_trip(e in prop::collection::vec(0.1..10.0f64, 1..8), c in 0.01..100.0f64) {
        let s = KineticSpectrum::new(e).unwrap();
        let (xi, eps) = s.epsilons();
        let back = KineticSpectrum::from_epsilons(xi, &eps).unwrap();
        for (a, b) in s.eigenvalues().iter().zip(back.eigenvalues()) {
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
        let (xi_c, eps_c) = s.scaled(c).unwrap().epsilons();
        prop_assert!((xi_c - c * xi).abs() <= 1e-12 * xi_c);
        for (a, b) in eps.iter().zip(&eps_c) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn free_product_is_permutation_invariant(mut e in prop::collection::vec(0.1..10.0f64, 2..9)) {
        let a = log_z_free_product(&KineticSpectrum::new(e.clone()).unwrap());
        e.reverse();
        e.rotate_left(1);
        let b = log_z_free_product(&KineticSpectrum::new(e).unwrap());
        prop_assert!(close(a, b, 1e-14));
    }

    #[test]
    fn vandermonde_square_identity(lambda in prop::collection::vec(-3.0..3.0f64, 2..7)) {
        let sq: Vec<f64> = lambda.iter().map(|x| x * x).collect();
        prop_assume!(!vandermonde(&sq).is_zero());
        let lhs = vandermonde_ratio(&lambda).unwrap() * vandermonde(&sq);
        prop_assert!(close(lhs, vandermonde(&lambda).powi(2), 1e-10));
    }

    #[test]
    fn weak_coupling_is_linear_in_g(
        e in prop::collection::vec(0.3..5.0f64, 2..7),
        g in 0.0..2.0f64,
    ) {
        let s = KineticSpectrum::new(e).unwrap();
        let slope: f64 = -s.eigenvalues().iter().map(|x| 3.0 / (4.0 * x * x)).sum::<f64>();
        let (xi, eps) = s.epsilons();
        prop_assume!(eps.iter().all(|x| x.abs() < 1.0));
        let c = Coupling::new(g).unwrap();
        let a = log_z_weak_coupling(&s, c).unwrap().ln() - log_z_weak_coupling(&s, Coupling::FREE).unwrap().ln();
        prop_assert!((a - slope * g).abs() <= 1e-10 * (1.0 + a.abs()));
        let b = log_z_weak_coupling_epsilon(xi, &eps, c).unwrap().ln()
            - log_z_weak_coupling_epsilon(xi, &eps, Coupling::FREE).unwrap().ln();
        prop_assert!((b - slope * g).abs() <= 1e-10 * (1.0 + b.abs()));
    }

    #[test]
    fn weak_coupling_forms_differ_by_dropped_prefactor(n in 2usize..20, xi in 0.2..5.0f64, g in 0.0..1.0f64) {
        let zero = vec![0.0; n];
        let nf = n as f64;
        let c = Coupling::new(g).unwrap();
        let eps_form = log_z_weak_coupling_epsilon(xi, &zero, c).unwrap().ln();
        let raw_form = log_z_weak_coupling(&KineticSpectrum::new(vec![xi; n]).unwrap(), c).unwrap().ln();
        prop_assert!((eps_form - raw_form + 0.5 * ((nf - 1.0) / nf).ln()).abs() <= 1e-12 * eps_form.abs().max(1.0));
        let free = log_z_free_product(&KineticSpectrum::new(vec![xi; n]).unwrap()).ln();
        let at_zero = log_z_weak_coupling_epsilon(xi, &zero, Coupling::FREE).unwrap().ln();
        prop_assert!((at_zero - free).abs() <= 1e-12 * free.abs().max(1.0));
        let expansion = log_z_free_epsilon_expansion(xi, &zero, 6).unwrap().ln();
        prop_assert!((expansion - free).abs() <= 1e-12 * free.abs().max(1.0));
    }
}

fn lp_feasible(u: &[f64]) -> bool {
    let n = u.len();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = pairs(n).iter().map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for (j, &uj) in u.iter().enumerate() {
        let row: Vec<_> = pairs(n)
            .iter()
            .zip(&vars)
            .filter(|((k, l), _)| *k == j || *l == j)
            .map(|(_, &v)| (v, 1.0))
            .collect();
        p.add_constraint(row.as_slice(), ComparisonOp::Eq, uj);
    }
    match p.solve() {
        Ok(_) => true,
        Err(minilp::Error::Infeasible) => false,
        Err(e) => panic!("LP failed: {e}"),
    }
}

#[test]
fn feasibility_matches_linear_program() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut seen = [0usize; 2];
    for n in [3usize, 4, 5] {
        let mut k = 0;
        while k < 1000 {
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let m = DiagonalMarginal::new(u.clone()).unwrap();
            let max = u.iter().copied().fold(0.0, f64::max);
            if (2.0 * max - m.s()).abs() < 1e-6 {
                continue;
            }
            let lp = lp_feasible(&u);
            assert_eq!(m.is_feasible(), lp, "u = {u:?}");
            seen[usize::from(lp)] += 1;
            k += 1;
        }
    }
    assert!(seen[0] > 100 && seen[1] > 100, "{seen:?}");
}

#[test]
fn quartic_integral_error_is_quadratic_in_g() {
    for e in [0.5, 1.0, 3.0] {
        let gs = [1e-3, 3e-4, 1e-4];
        let errs: Vec<f64> = gs
            .iter()
            .map(|&g| {
                let r = quartic_gaussian_log_integral(e, g * e * e).unwrap();
                (r.exact - r.approximation).abs()
            })
            .collect();
        let slope = log_log_slope(&gs, &errs);
        assert!(slope >= 1.95, "e = {e}: slope {slope}");
    }
}
