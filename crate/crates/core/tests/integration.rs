use pseudoboson::coherent::{coherent_vector, required_n_max, SERIES_TAIL_TOL};
use pseudoboson::fock::{build_bi_basis_escalating, DEFAULT_TAIL_TOL};
use pseudoboson::ladder::standard_family;
use pseudoboson::linalg::cplx;
use pseudoboson::poly::{biortho_expected, biortho_integral, default_quad_order};
use pseudoboson::position::{
    coherent_profile, position_overlap, Expansion, FockWavefunction, Which,
};

/// Fock Gram, normalized polynomial Gram and position-space overlaps all
/// give the same δ pattern.
#[test]
fn three_grams_agree() {
    let s = 0.5;
    let n_max = 8;
    let (_, basis) =
        build_bi_basis_escalating(standard_family(s).unwrap(), 128, n_max, DEFAULT_TAIL_TOL).unwrap();
    for n in 0..=n_max {
        let psi = FockWavefunction::new(n, s, Which::Psi).unwrap();
        for m in 0..=n_max {
            let fock = basis.gram[(n, m)];
            let norm = biortho_expected(n, n, s).sqrt() * biortho_expected(m, m, s).sqrt();
            let poly = biortho_integral(n, m, s, default_quad_order(n, m)).unwrap() / norm;
            let phi = FockWavefunction::new(m, s, Which::Phi).unwrap();
            let pos = position_overlap(&psi, &phi, 60).unwrap();
            assert!((fock - poly).norm() < 1e-12, "{n} {m}");
            assert!((fock - pos).norm() < 1e-10, "{n} {m}");
        }
    }
}

/// The coefficient-space coherent ket, expanded in oscillator functions,
/// matches the closed-form Gaussian profile.
#[test]
fn coherent_ket_in_position_space() {
    let s = -0.5;
    let alpha = cplx(0.6, -0.8);
    let n_max = required_n_max(alpha, SERIES_TAIL_TOL) + 8;
    let (_, basis) =
        build_bi_basis_escalating(standard_family(s).unwrap(), 128, n_max, DEFAULT_TAIL_TOL).unwrap();
    let cp = coherent_vector(alpha, &basis).unwrap();
    let ket = Expansion(cp.ket.coeffs.clone());
    let dual = Expansion(cp.dual.coeffs.clone());
    let profile = coherent_profile(alpha, s, Which::Psi).unwrap();
    for i in 0..21 {
        let x = -3.0 + 0.3 * i as f64;
        let got = pseudoboson::position::oscillator_expansion(&cp.ket.coeffs, x);
        assert!((got - profile.eval(x)).norm() < 1e-8, "x = {x}");
    }
    let overlap = position_overlap(&ket, &dual, 120).unwrap();
    assert!((overlap - cp.binormalization()).norm() < 1e-9);
}
