//! Pseudo-boson coherent states in coefficient space.
//!
//! `|α⟩ = e^{-|α|²/2} Σ αⁿ ψ_n/√n!` is an eigenvector of `b`, and the dual
//! `|α⟩' = e^{-|α|²/2} Σ αⁿ φ_n/√n!` of `b' = b̃†`.

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::dd::dd;
use crate::error::{Error, Result};
use crate::fock::{build_bi_basis_escalating, BiBasis, DdVec, StateVector};
use crate::ladder::{FamilyCoefficients, LadderPair};
use crate::linalg::{cplx, expm, is_finite, CVector};
use crate::quadrature::polar_rule;

pub const SERIES_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CoherentPair {
    pub alpha: Complex64,
    pub ket: StateVector,
    pub dual: StateVector,
    pub coeffs: FamilyCoefficients,
    /// Number of series terms minus one.
    pub n_terms: usize,
    ket_dd: (DdVec, DdVec),
    dual_dd: (DdVec, DdVec),
}

/// `e^{-|α|²} Σ_{n > n_max} |α|^{2n}/n!`, summed directly.
pub fn poisson_tail(abs2: f64, n_max: usize) -> f64 {
    let mut term = (-abs2).exp();
    for n in 1..=n_max {
        term *= abs2 / n as f64;
    }
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        term *= abs2 / n as f64;
        tail += term;
        if term <= tail * 1e-17 || term == 0.0 {
            return tail;
        }
        n += 1;
    }
}

/// `e^{-|α|²/2} αⁿ/√n!` for `n = 0..=n_max`.
pub fn series_coefficients(alpha: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = cplx((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    out.push(c);
    for n in 1..=n_max {
        c = c * alpha / (n as f64).sqrt();
        out.push(c);
    }
    out
}

fn combine(coeffs: &[Complex64], family: &[DdVec]) -> (DdVec, DdVec) {
    let dim = family[0].len();
    let mut re = vec![dd(0.0); dim];
    let mut im = vec![dd(0.0); dim];
    for (c, v) in coeffs.iter().zip(family) {
        let (cr, ci) = (dd(c.re), dd(c.im));
        for k in 0..dim {
            re[k] += cr * v[k];
            im[k] += ci * v[k];
        }
    }
    (re, im)
}

fn to_state(v: &(DdVec, DdVec)) -> StateVector {
    StateVector::new(CVector::from_iterator(
        v.0.len(),
        v.0.iter().zip(&v.1).map(|(r, i)| cplx(f64::from(*r), f64::from(*i))),
    ))
}

/// Coherent pair from the first `n_terms + 1` series terms, with no tail check.
pub fn coherent_series(alpha: Complex64, basis: &BiBasis, n_terms: usize) -> Result<CoherentPair> {
    if n_terms > basis.n_max {
        return Err(Error::InvalidArgument(format!(
            "{n_terms} series terms requested but the basis stops at {}",
            basis.n_max
        )));
    }
    let c = series_coefficients(alpha, n_terms);
    let ket_dd = combine(&c, &basis.psis_dd);
    let dual_dd = combine(&c, &basis.phis_dd);
    Ok(CoherentPair {
        alpha,
        ket: to_state(&ket_dd),
        dual: to_state(&dual_dd),
        coeffs: basis.coeffs,
        n_terms,
        ket_dd,
        dual_dd,
    })
}

/// Coherent pair over the whole basis; fails when the Poisson tail beyond
/// `n_max` is not below [`SERIES_TAIL_TOL`].
pub fn coherent_vector(alpha: Complex64, basis: &BiBasis) -> Result<CoherentPair> {
    let abs2 = alpha.norm_sqr();
    if !abs2.is_finite() {
        return Err(Error::NonFinite("coherent amplitude"));
    }
    let tail = poisson_tail(abs2, basis.n_max);
    if !(tail < SERIES_TAIL_TOL) {
        return Err(Error::NmaxInsufficient {
            n_max: basis.n_max,
            abs2,
            tail,
        });
    }
    coherent_series(alpha, basis, basis.n_max)
}

/// Smallest `n_max` whose Poisson tail at `|α|²` is below `tol`.
pub fn required_n_max(alpha: Complex64, tol: f64) -> usize {
    let abs2 = alpha.norm_sqr();
    (0..)
        .find(|&n| poisson_tail(abs2, n) < tol)
        .expect("Poisson tail decays")
}

/// Largest series cut-off tried by [`converged_coherent`].
pub const MAX_SERIES_TERMS: usize = 96;

/// Builds a bi-basis and coherent pair whose series cut-off brings both
/// eigen residuals below `tol`.
///
/// The truncation error of the series is `|c_N| ‖ψ_N‖`, and `‖ψ_N‖` grows
/// with `N` when `s ≠ 0`, so the Poisson tail alone underestimates the
/// cut-off. Starting from the tail estimate (and at least `n_min`), `n_max`
/// grows in steps of 4 up to [`MAX_SERIES_TERMS`]. Growth stops early once a
/// step fails to halve the residual or the larger basis cannot be built; the
/// best attempt is returned even if it misses `tol`.
pub fn converged_coherent(
    coeffs: FamilyCoefficients,
    dim: usize,
    alpha: Complex64,
    n_min: usize,
    tail_tol: f64,
    tol: f64,
) -> Result<(LadderPair, BiBasis, CoherentPair)> {
    let attempt = |dim: usize, n_max: usize| -> Result<(LadderPair, BiBasis, CoherentPair, f64)> {
        let (pair, basis) = build_bi_basis_escalating(coeffs, dim, n_max, tail_tol)?;
        let cp = coherent_vector(alpha, &basis)?;
        let (rk, rd) = eigen_residual(&pair, &cp);
        Ok((pair, basis, cp, rk.max(rd)))
    };
    let mut n_max = n_min.max(required_n_max(alpha, SERIES_TAIL_TOL));
    let mut best = attempt(dim, n_max)?;
    while best.3 > tol && n_max + 4 <= MAX_SERIES_TERMS {
        n_max += 4;
        match attempt(best.0.dim(), n_max) {
            Ok(next) if next.3 <= 0.5 * best.3 => best = next,
            _ => break,
        }
    }
    Ok((best.0, best.1, best.2))
}

fn dot_complex_dd(a: &(DdVec, DdVec), b: &(DdVec, DdVec)) -> Complex64 {
    let mut re = dd(0.0);
    let mut im = dd(0.0);
    for k in 0..a.0.len() {
        re += a.0[k] * b.0[k] + a.1[k] * b.1[k];
        im += a.0[k] * b.1[k] - a.1[k] * b.0[k];
    }
    cplx(f64::from(re), f64::from(im))
}

impl CoherentPair {
    /// `⟨α|α⟩'`, accumulated in double-double.
    pub fn binormalization(&self) -> Complex64 {
        dot_complex_dd(&self.ket_dd, &self.dual_dd)
    }

    /// `⟨α|α⟩`, which is not 1 once `s ≠ 0`.
    pub fn ket_norm_sqr(&self) -> f64 {
        dot_complex_dd(&self.ket_dd, &self.ket_dd).re
    }

    pub fn ket_dd(&self) -> (&[TwoFloat], &[TwoFloat]) {
        (&self.ket_dd.0, &self.ket_dd.1)
    }
}

/// `‖B ket - α ket‖/‖ket‖` and `‖B' dual - α dual‖/‖dual‖`.
pub fn eigen_residual(pair: &LadderPair, cp: &CoherentPair) -> (f64, f64) {
    let ket = &cp.ket.coeffs;
    let dual = &cp.dual.coeffs;
    let rk = (&pair.b * ket - ket * cp.alpha).norm() / ket.norm();
    let rd = (pair.bprime() * dual - dual * cp.alpha).norm() / dual.norm();
    (rk, rd)
}

/// `exp(α B̃ - α* B) |vacuum⟩` with `b#` realized as `B̃`.
pub fn displaced_vacuum(
    alpha: Complex64,
    pair: &LadderPair,
    vacuum: &StateVector,
) -> Result<StateVector> {
    let gen = pair.btilde.map(|z| z * alpha) - pair.b.map(|z| z * alpha.conj());
    let d = expm(&gen);
    if !is_finite(&d) {
        return Err(Error::NonFinite("displacement operator"));
    }
    let out = d * &vacuum.coeffs;
    if !out.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("displaced vacuum"));
    }
    Ok(StateVector::new(out))
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct OvercompletenessReport {
    /// `⟨ψ_m| (1/π)∫|α⟩'⟨α| d²α |φ_k⟩ - δ_mk`
    pub primary: f64,
    /// `⟨φ_m| (1/π)∫|α⟩⟨α|' d²α |ψ_k⟩ - δ_mk`
    pub mirrored: f64,
}

impl OvercompletenessReport {
    pub fn max(&self) -> f64 {
        self.primary.max(self.mirrored)
    }
}

/// Polar-quadrature realization of the two coherent-state resolutions of
/// the identity, as bi-basis matrix elements.
///
/// Each matrix element is expanded through the truncated series, so the
/// integrand is `e^{-|α|²}` times a polynomial in `α, α*` and the rule with
/// `K_r ≥ n_max+1`, `K_θ ≥ 2n_max+1` integrates it exactly.
pub fn biovercompleteness_residual(
    basis: &BiBasis,
    k_r: usize,
    k_theta: usize,
) -> Result<OvercompletenessReport> {
    let n = basis.n_max + 1;
    if k_r < n {
        return Err(Error::QuadratureOrder {
            order: k_r,
            reason: format!("radial order must be at least n_max + 1 = {n}"),
        });
    }
    if k_theta < 2 * basis.n_max + 1 {
        return Err(Error::QuadratureOrder {
            order: k_theta,
            reason: format!("angular order must be at least 2 n_max + 1 = {}", 2 * n - 1),
        });
    }
    let rule = polar_rule(k_r, k_theta)?;
    let g = &basis.gram;
    let mut primary = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    let mut mirrored = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    let norm: Vec<f64> = (0..n)
        .map(|k| (1..=k).map(|j| j as f64).product::<f64>().sqrt().recip())
        .collect();
    for (alpha, w) in rule.nodes.iter().zip(&rule.weights) {
        // αⁿ/√n!; the Gaussian factor e^{-|α|²} lives in the weight
        let mut pw = Vec::with_capacity(n);
        let mut p = cplx(1.0, 0.0);
        for k in 0..n {
            pw.push(p * norm[k]);
            p *= alpha;
        }
        // ⟨ψ_m|α⟩' and ⟨α|φ_k⟩
        let left: Vec<Complex64> = (0..n)
            .map(|m| (0..n).map(|j| pw[j] * g[(m, j)]).sum())
            .collect();
        let right: Vec<Complex64> = (0..n)
            .map(|k| (0..n).map(|j| pw[j].conj() * g[(j, k)]).sum())
            .collect();
        // ⟨φ_m|α⟩ and ⟨α|'ψ_k⟩
        let left_m: Vec<Complex64> = (0..n)
            .map(|m| (0..n).map(|j| pw[j] * g[(j, m)].conj()).sum())
            .collect();
        let right_m: Vec<Complex64> = (0..n)
            .map(|k| (0..n).map(|j| pw[j].conj() * g[(k, j)].conj()).sum())
            .collect();
        for m in 0..n {
            for k in 0..n {
                primary[(m, k)] += left[m] * right[k] * *w;
                mirrored[(m, k)] += left_m[m] * right_m[k] * *w;
            }
        }
    }
    Ok(OvercompletenessReport {
        primary: crate::linalg::leading_identity_residual(&primary, n),
        mirrored: crate::linalg::leading_identity_residual(&mirrored, n),
    })
}
