//! The pseudo-Hermitian oscillator `H = ω(b̃ b + 1/2)` and coherent-state
//! time evolution.

use num_complex::Complex64;

use crate::coherent::coherent_vector;
use crate::dd::dd;
use crate::error::{Error, Result};
use crate::fock::{apply_ladder_dd, dot_dd, BiBasis, DdVec, MetricOperator, StateVector};
use crate::ladder::{FamilyCoefficients, LadderPair};
use crate::linalg::{cplx, expm, is_finite, norm1, CMatrix};

/// Largest `‖H t‖₁` handed to a single matrix exponential; longer times are
/// split into equal steps.
pub const STEP_NORM_BUDGET: f64 = 16.0;

#[derive(Debug, Clone)]
pub struct OscillatorHamiltonian {
    pub h: CMatrix,
    pub omega: f64,
    pub coeffs: FamilyCoefficients,
}

pub fn hamiltonian(pair: &LadderPair, omega: f64) -> Result<OscillatorHamiltonian> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::ParameterDomain {
            name: "omega",
            value: omega,
            domain: "(0, inf)",
        });
    }
    let dim = pair.dim();
    let n = &pair.btilde * &pair.b;
    let h = (n + CMatrix::identity(dim, dim) * cplx(0.5, 0.0)) * cplx(omega, 0.0);
    Ok(OscillatorHamiltonian {
        h,
        omega,
        coeffs: pair.coeffs,
    })
}

impl OscillatorHamiltonian {
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.omega * (n as f64 + 0.5)
    }

    /// Relative residuals `max_n ‖Hψ_n - E_n ψ_n‖/‖ψ_n‖` and the `H†`, `φ_n` analogue.
    pub fn energy_residuals(&self, basis: &BiBasis) -> (f64, f64) {
        let hd = self.h.adjoint();
        let mut worst = (0.0f64, 0.0f64);
        for n in 0..=basis.n_max {
            let e = cplx(self.energy(n), 0.0);
            let p = &basis.psis[n].coeffs;
            let f = &basis.phis[n].coeffs;
            worst.0 = worst.0.max((&self.h * p - p * e).norm() / p.norm());
            worst.1 = worst.1.max((&hd * f - f * e).norm() / f.norm());
        }
        worst
    }

    /// `‖P H P - H‖_max` with `P = diag((-1)ⁿ)`.
    pub fn parity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                worst = worst.max((self.h[(i, j)] * sign - self.h[(i, j)]).norm());
            }
        }
        worst
    }

    /// `‖Im H‖_max`; with `H` real, `PT H PT = P H* P = P H P`.
    pub fn imaginary_part(&self) -> f64 {
        self.h.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
    }

    /// The `count` eigenvalues of `H` with smallest real part.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<Complex64> {
        let real = self.h.map(|z| z.re);
        let mut ev: Vec<Complex64> = real.complex_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        ev.truncate(count);
        ev
    }

    /// `max |⟨φ_m|ω(η⁻¹B†ηB + 1/2)|ψ_n⟩ - ⟨φ_m|H|ψ_n⟩|`: the metric-conjugated
    /// realization of `b#` against `B̃`, for `n, m < n_max`.
    pub fn metric_crosscheck(&self, metric: &MetricOperator, basis: &BiBasis) -> f64 {
        let c = self.coeffs;
        let top = basis.n_max.max(1);
        let w = dd(self.omega);
        let half = dd(0.5);
        let mut worst = 0.0f64;
        for n in 0..top {
            let psi = &basis.psis_dd[n];
            let b_psi = apply_ladder_dd(c.u1, c.u2, psi);
            let sharp = metric.apply_inv_dd(&apply_ladder_dd(c.u2, c.u1, &metric.apply_dd(&b_psi)));
            let direct = apply_ladder_dd(c.v1, c.v2, &b_psi);
            let via_eta: DdVec = sharp.iter().zip(psi).map(|(x, p)| w * (*x + half * *p)).collect();
            let via_tilde: DdVec = direct.iter().zip(psi).map(|(x, p)| w * (*x + half * *p)).collect();
            for phi in &basis.phis_dd[..top] {
                let d = dot_dd(phi, &via_eta) - dot_dd(phi, &via_tilde);
                worst = worst.max(f64::from(d).abs());
            }
        }
        worst
    }
}

/// `exp(-iHt) v`, or `exp(-iH†t) v` when `dagger`.
pub fn evolve_matrix(
    ham: &OscillatorHamiltonian,
    t: f64,
    v: &StateVector,
    dagger: bool,
) -> Result<StateVector> {
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time"));
    }
    if t == 0.0 {
        return Ok(v.clone());
    }
    let h = if dagger { ham.h.adjoint() } else { ham.h.clone() };
    let steps = (norm1(&h) * t.abs() / STEP_NORM_BUDGET).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let prop = expm(&(h * cplx(0.0, -dt)));
    if !is_finite(&prop) {
        return Err(Error::NonFinite("propagator"));
    }
    let mut out = v.coeffs.clone();
    for _ in 0..steps {
        out = &prop * out;
    }
    if !out.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("evolved state"));
    }
    Ok(StateVector::new(out))
}

/// `(e^{-iωt/2}, α e^{-iωt})`
pub fn evolve_spectral(alpha: Complex64, t: f64, omega: f64) -> (Complex64, Complex64) {
    let wt = omega * t;
    (Complex64::from_polar(1.0, -0.5 * wt), alpha * Complex64::from_polar(1.0, -wt))
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StabilityReport {
    pub t: f64,
    pub alpha_t: (f64, f64),
    /// `‖e^{-iHt}|α⟩ - e^{-iωt/2}|α(t)⟩‖`
    pub psi: f64,
    /// `‖e^{-iH†t}|α⟩' - e^{-iωt/2}|α(t)⟩'‖`
    pub phi: f64,
    /// `|⟨e^{-iHt}α | e^{-iH†t}α'⟩ - 1|`
    pub binorm: f64,
}

pub fn temporal_stability_residual(
    ham: &OscillatorHamiltonian,
    basis: &BiBasis,
    alpha: Complex64,
    t: f64,
) -> Result<StabilityReport> {
    let start = coherent_vector(alpha, basis)?;
    let (phase, alpha_t) = evolve_spectral(alpha, t, ham.omega);
    let target = coherent_vector(alpha_t, basis)?;
    let ket_t = evolve_matrix(ham, t, &start.ket, false)?;
    let dual_t = evolve_matrix(ham, t, &start.dual, true)?;
    let psi = (&ket_t.coeffs - &target.ket.coeffs * phase).norm();
    let phi = (&dual_t.coeffs - &target.dual.coeffs * phase).norm();
    let binorm = (ket_t.coeffs.dotc(&dual_t.coeffs) - 1.0).norm();
    Ok(StabilityReport {
        t,
        alpha_t: (alpha_t.re, alpha_t.im),
        psi,
        phi,
        binorm,
    })
}

/// Time grid `ωt ∈ {0, π/4, π/2, π, 2π}` expressed in `t`.
pub fn default_times(omega: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    [0.0, PI / 4.0, PI / 2.0, PI, 2.0 * PI]
        .iter()
        .map(|wt| wt / omega)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_bi_basis, metric, DEFAULT_TAIL_TOL};
    use crate::ladder::{build_ladder_pair, standard_family};
    use std::f64::consts::PI;

    fn setup(s: f64, dim: usize, n_max: usize) -> (LadderPair, BiBasis) {
        let pair = build_ladder_pair(standard_family(s).unwrap(), dim).unwrap();
        let basis = build_bi_basis(&pair, n_max, DEFAULT_TAIL_TOL).unwrap();
        (pair, basis)
    }

    #[test]
    fn hermitian_limit_is_diagonal() {
        let (p, _) = setup(0.0, 16, 4);
        let h = hamiltonian(&p, 2.0).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                let want = if i == j { 2.0 * (i as f64 + 0.5) } else { 0.0 };
                assert!((h.h[(i, j)] - want).norm() < 1e-14);
            }
        }
        assert!(hamiltonian(&p, 0.0).is_err());
        assert!(hamiltonian(&p, -1.0).is_err());
    }

    #[test]
    fn pt_and_spectrum() {
        let (p, b) = setup(0.5, 256, 20);
        let h = hamiltonian(&p, 1.0).unwrap();
        assert!(h.parity_residual() < 1e-12);
        assert!(h.imaginary_part() < 1e-12);
        let (r1, r2) = h.energy_residuals(&b);
        assert!(r1 < 1e-9 && r2 < 1e-9, "{r1} {r2}");
        let (p64, _) = setup(0.5, 64, 4);
        let ev = hamiltonian(&p64, 1.0).unwrap().lowest_eigenvalues(8);
        for (n, e) in ev.iter().enumerate() {
            assert!((e.re - (n as f64 + 0.5)).abs() < 1e-6 && e.im.abs() < 1e-6, "{n}: {e}");
        }
    }

    #[test]
    fn evolution_basics() {
        let (p, b) = setup(0.5, 128, 16);
        let h = hamiltonian(&p, 1.0).unwrap();
        let v = &b.psis[0];
        assert_eq!(evolve_matrix(&h, 0.0, v, false).unwrap().coeffs, v.coeffs);
        let full = evolve_matrix(&h, 2.0 * PI, v, false).unwrap();
        assert!((&full.coeffs + &v.coeffs).norm() < 1e-8);
        let t = 0.7;
        for n in [1, 3, 6] {
            let psi = &b.psis[n];
            let got = evolve_matrix(&h, t, psi, false).unwrap();
            let phase = Complex64::from_polar(1.0, -(n as f64 + 0.5) * t);
            assert!((&got.coeffs - &psi.coeffs * phase).norm() < 1e-8);
        }
    }

    #[test]
    fn spectral_rule() {
        let a = cplx(1.0, 0.5);
        assert_eq!(evolve_spectral(a, 0.0, 1.0), (cplx(1.0, 0.0), a));
        let (ph, at) = evolve_spectral(a, 2.0 * PI, 1.0);
        assert!((ph + 1.0).norm() < 1e-15 && (at - a).norm() < 1e-14);
        for t in [0.3, 1.1, 5.0] {
            assert!((evolve_spectral(a, t, 1.7).1.norm() - a.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn temporal_stability() {
        let (p, b) = setup(0.5, 128, 30);
        let h = hamiltonian(&p, 1.0).unwrap();
        for t in default_times(1.0) {
            let r = temporal_stability_residual(&h, &b, cplx(1.0, 0.0), t).unwrap();
            assert!(r.psi < 1e-7 && r.phi < 1e-7 && r.binorm < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn eta_realization_agrees() {
        let (p, b) = setup(0.5, 128, 16);
        let h = hamiltonian(&p, 1.0).unwrap();
        let m = metric(&b);
        assert!(h.metric_crosscheck(&m, &b) < 1e-9);
    }
}
