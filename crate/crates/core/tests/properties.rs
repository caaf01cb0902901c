use num_complex::Complex64;
use proptest::prelude::*;

use pseudoboson::coherent::{coherent_vector, required_n_max, SERIES_TAIL_TOL};
use pseudoboson::dynamics::{evolve_matrix, evolve_spectral, hamiltonian};
use pseudoboson::fock::{build_bi_basis_escalating, metric, DEFAULT_TAIL_TOL};
use pseudoboson::ladder::{
    alternate_family, build_ladder_pair, number_operators, standard_family, FamilyCoefficients,
};
use pseudoboson::linalg::{braket, cplx};
use pseudoboson::poly::{biortho_expected, biortho_integral, default_quad_order, p_poly, q_poly};
use pseudoboson::position::{ground_profile, position_overlap, weight_identity_residual, Which};
use pseudoboson::quadrature::{gauss_hermite, gauss_laguerre, polar_rule};

fn light() -> ProptestConfig {
    ProptestConfig::with_cases(12)
}

/// `b = u1 (a + r a†)`, `b̃ = v2 (t a + a†)` with `v2` fixed by the constraint.
/// Coefficient magnitudes stay below 2, the range of the named families; the
/// absolute algebra tolerance is round-off limited for larger ones.
fn family() -> impl Strategy<Value = FamilyCoefficients> {
    (0.8f64..1.25, -0.6f64..0.6, -0.6f64..0.6).prop_map(|(u1, r, t)| {
        let u2 = r * u1;
        let v2 = 1.0 / (u1 - u2 * t);
        FamilyCoefficients::new(u1, u2, t * v2, v2).unwrap()
    })
}

proptest! {
    #[test]
    fn accepted_families_satisfy_constraint(c in family()) {
        prop_assert!((c.commutator_constraint() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn ladder_algebra_on_leading_block(c in family(), dim in 4usize..=64) {
        let pair = build_ladder_pair(c, dim).unwrap();
        prop_assert!(pair.commutator_residual < 1e-12);
        let num = number_operators(&pair);
        let (lower, raise) = num.algebra_residuals(&pair);
        prop_assert!(lower < 1e-12 && raise < 1e-12, "{} {}", lower, raise);
        prop_assert_eq!(num.parity_leak(), 0.0);
    }

    #[test]
    fn named_families_algebra(s in -0.6f64..0.6, dim in 4usize..=64) {
        for c in [standard_family(s).unwrap(), alternate_family(s).unwrap()] {
            let pair = build_ladder_pair(c, dim).unwrap();
            let (lower, raise) = number_operators(&pair).algebra_residuals(&pair);
            prop_assert!(lower < 1e-12 && raise < 1e-12);
        }
        let pair = build_ladder_pair(standard_family(1.5 * s).unwrap(), dim).unwrap();
        let (lower, raise) = number_operators(&pair).algebra_residuals(&pair);
        prop_assert!(lower < 1e-12 && raise < 1e-12);
    }

    #[test]
    fn hermitian_limit_is_exact(dim in 4usize..=96) {
        for c in [standard_family(0.0).unwrap(), alternate_family(0.0).unwrap()] {
            let pair = build_ladder_pair(c, dim).unwrap();
            prop_assert_eq!(&pair.btilde, &pair.b.adjoint());
        }
    }

    #[test]
    fn polynomial_parity_and_leading(n in 0usize..=20, s in -0.95f64..0.95, x in -3.0f64..3.0) {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for p in [p_poly(n, s).unwrap(), q_poly(n, s).unwrap()] {
            prop_assert_eq!(p.eval(-x), sign * p.eval(x));
        }
        let lp = (2.0 / (1.0 - s)).powi(n as i32);
        let lq = (2.0 / (1.0 - s + s * s)).powi(n as i32);
        prop_assert!((p_poly(n, s).unwrap().leading() / lp - 1.0).abs() < 1e-13);
        prop_assert!((q_poly(n, s).unwrap().leading() / lq - 1.0).abs() < 1e-13);
    }

    #[test]
    fn polynomial_biorthogonality(n in 0usize..=12, m in 0usize..=12, s in -0.9f64..0.9) {
        let got = biortho_integral(n, m, s, default_quad_order(n, m)).unwrap();
        let scale = 2f64.powi(n as i32) * (1..=n).map(|k| k as f64).product::<f64>();
        prop_assert!((got - biortho_expected(n, m, s)).abs() / scale < 1e-10);
    }

    #[test]
    fn ground_states_binormalized(s in -0.9f64..0.9, x in -4.0f64..4.0) {
        prop_assert!(weight_identity_residual(s, &[x]).unwrap() < 1e-12);
        let psi = ground_profile(s, Which::Psi).unwrap();
        let phi = ground_profile(s, Which::Phi).unwrap();
        prop_assert!((position_overlap(&psi, &phi, 48).unwrap() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn quadrature_is_deterministic(order in 1usize..=80) {
        let a = gauss_hermite(order).unwrap();
        let b = gauss_hermite(order).unwrap();
        prop_assert_eq!(&a.nodes, &b.nodes);
        prop_assert_eq!(&a.weights, &b.weights);
        let l = gauss_laguerre(order).unwrap();
        let total: f64 = l.weights.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn polar_rule_monomials(n in 0usize..=7, m in 0usize..=7) {
        let rule = polar_rule(8, 16).unwrap();
        let got = rule.integrate(|a| a.powu(n as u32) * a.conj().powu(m as u32));
        let want = if n == m { (1..=n).map(|k| k as f64).product::<f64>() } else { 0.0 };
        prop_assert!((got - want).norm() < 1e-12 * want.max(1.0));
    }

    #[test]
    fn spectral_rule_is_a_rotation(re in -2.0f64..2.0, im in -2.0f64..2.0, t in 0.0f64..20.0, w in 0.1f64..3.0) {
        let a = cplx(re, im);
        let (phase, at) = evolve_spectral(a, t, w);
        prop_assert!((phase.norm() - 1.0).abs() < 1e-15);
        prop_assert!((at.norm() - a.norm()).abs() < 1e-14);
        let (_, back) = evolve_spectral(at, -t, w);
        prop_assert!((back - a).norm() < 1e-13);
    }
}

proptest! {
    #![proptest_config(light())]

    #[test]
    fn fock_bi_basis(s in -0.9f64..0.9, n_max in 2usize..=12) {
        let (_, basis) =
            build_bi_basis_escalating(standard_family(s).unwrap(), 64, n_max, DEFAULT_TAIL_TOL).unwrap();
        prop_assert!(basis.biortho_residual().0 < 1e-10);
        prop_assert_eq!(basis.parity_leak(), 0.0);
        prop_assert!(metric(&basis).action_residual() < 1e-9);
        let overlap = braket(&basis.psis[0].coeffs, &basis.phis[0].coeffs);
        prop_assert!((overlap - 1.0).norm() < 1e-10);
    }

    #[test]
    fn coherent_pair_binormalized(s in -0.9f64..0.9, r in 0.0f64..2.0, theta in 0.0f64..6.3) {
        let alpha = Complex64::from_polar(r, theta);
        let n_max = required_n_max(alpha, SERIES_TAIL_TOL);
        let (_, basis) =
            build_bi_basis_escalating(standard_family(s).unwrap(), 64, n_max, DEFAULT_TAIL_TOL).unwrap();
        let cp = coherent_vector(alpha, &basis).unwrap();
        prop_assert!((cp.binormalization() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn evolution_paths_agree_on_fock_states(s in -0.5f64..0.5, t in 0.0f64..7.0, n in 0usize..=8) {
        let (pair, basis) =
            build_bi_basis_escalating(standard_family(s).unwrap(), 64, 12, DEFAULT_TAIL_TOL).unwrap();
        let h = hamiltonian(&pair, 1.0).unwrap();
        let phase = Complex64::from_polar(1.0, -(n as f64 + 0.5) * t);
        let psi = evolve_matrix(&h, t, &basis.psis[n], false).unwrap();
        let phi = evolve_matrix(&h, t, &basis.phis[n], true).unwrap();
        let rp = (&psi.coeffs - &basis.psis[n].coeffs * phase).norm() / basis.psis[n].norm();
        let rf = (&phi.coeffs - &basis.phis[n].coeffs * phase).norm() / basis.phis[n].norm();
        prop_assert!(rp < 1e-7 && rf < 1e-7, "{} {}", rp, rf);
    }
}
