//! Vacua, bi-orthonormal Fock families and the metric operator.
//!
//! All states are coefficient vectors in the canonical Fock basis. The two
//! families are `ψ_n = b̃ⁿ|0⟩/√n!` and `φ_n = (b†)ⁿ|0⟩'/√n!`, paired so that
//! `⟨ψ_n|φ_m⟩ = δ_nm`.
//!
//! The family coefficients are real, so the families are built and all
//! bi-basis matrix elements are evaluated in double-double arithmetic:
//! `‖ψ_n‖·‖φ_n‖` reaches `1e11` for some families, and plain `f64` inner
//! products lose everything below that times machine epsilon.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use twofloat::TwoFloat;

use crate::dd::{dd, div, recip};
use crate::error::{Error, Result};
use crate::ladder::{build_ladder_pair, FamilyCoefficients, LadderPair};
use crate::linalg::{braket, cplx, CMatrix, CVector};

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
pub const MAX_DIM: usize = 1024;
/// Target for `max |⟨ψ_n|φ_m⟩ - δ_nm|`; escalation aims below this.
pub const BIORTHO_TOL: f64 = 1e-10;
/// Above this the basis is rejected outright.
pub const DEGRADATION_TOL: f64 = 1e-8;
pub const PAIRING_TOL: f64 = 1e-13;
/// Target for `‖η ψ_n - φ_n‖`.
pub const METRIC_TOL: f64 = 1e-9;

/// Real double-double coefficient vector.
pub type DdVec = Vec<TwoFloat>;


#[derive(Debug, Clone)]
pub struct StateVector {
    pub coeffs: CVector,
    /// `|c_{dim-2}|² + |c_{dim-1}|²`
    pub tail_mass: f64,
}

impl StateVector {
    pub fn new(coeffs: CVector) -> Self {
        let d = coeffs.len();
        let tail_mass = coeffs.iter().skip(d.saturating_sub(2)).map(|z| z.norm_sqr()).sum();
        Self { coeffs, tail_mass }
    }

    pub fn from_dd(v: &[TwoFloat]) -> Self {
        Self::new(CVector::from_iterator(
            v.len(),
            v.iter().map(|x| cplx(f64::from(*x), 0.0)),
        ))
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut c = CVector::zeros(dim);
        c[k] = cplx(1.0, 0.0);
        Self::new(c)
    }
}

/// `(lower·a + raise·a†) v` on the truncated space without forming the matrix.
pub fn apply_ladder(lower: f64, raise: f64, v: &CVector) -> CVector {
    let d = v.len();
    let mut out = CVector::zeros(d);
    for k in 0..d {
        let mut acc = cplx(0.0, 0.0);
        if k + 1 < d {
            acc += v[k + 1] * (lower * ((k + 1) as f64).sqrt());
        }
        if k > 0 {
            acc += v[k - 1] * (raise * (k as f64).sqrt());
        }
        out[k] = acc;
    }
    out
}

/// Double-double version of [`apply_ladder`].
pub fn apply_ladder_dd(lower: f64, raise: f64, v: &[TwoFloat]) -> DdVec {
    let d = v.len();
    let (lower, raise) = (dd(lower), dd(raise));
    let roots: Vec<TwoFloat> = (0..=d).map(|k| dd(k as f64).sqrt()).collect();
    (0..d)
        .map(|k| {
            let mut acc = dd(0.0);
            if k + 1 < d {
                acc += v[k + 1] * lower * roots[k + 1];
            }
            if k > 0 {
                acc += v[k - 1] * raise * roots[k];
            }
            acc
        })
        .collect()
}

pub fn dot_dd(a: &[TwoFloat], b: &[TwoFloat]) -> TwoFloat {
    a.iter().zip(b).fold(dd(0.0), |acc, (x, y)| acc + *x * *y)
}

fn norm_dd(a: &[TwoFloat]) -> f64 {
    f64::from(dot_dd(a, a)).sqrt()
}

fn axpy_dd(out: &mut [TwoFloat], alpha: TwoFloat, x: &[TwoFloat]) {
    for (o, xi) in out.iter_mut().zip(x) {
        *o += alpha * *xi;
    }
}

fn sub_norm_dd(a: &[TwoFloat], b: &[TwoFloat]) -> f64 {
    let s = a
        .iter()
        .zip(b)
        .fold(dd(0.0), |acc, (x, y)| acc + (*x - *y) * (*x - *y));
    f64::from(s).sqrt()
}

/// Even-parity solution of `(lower·a + raise·a†)|v⟩ = 0` with leading amplitude `c0`.
fn gaussian_recursion(lower: f64, raise: f64, c0: f64, dim: usize) -> DdVec {
    let ratio = div(dd(raise), dd(lower));
    let mut c = vec![dd(0.0); dim];
    c[0] = dd(c0);
    for n in (1..dim - 1).step_by(2) {
        c[n + 1] = -ratio * div(dd(n as f64), dd((n + 1) as f64)).sqrt() * c[n - 1];
    }
    c
}

/// Fock amplitude `c_0` of a vacuum whose position-space form is
/// `N exp(-γ x²/2)`, with `N = ((γ + γ')/(2π))^{1/4}` shared by both vacua.
fn vacuum_c0(gamma: f64, coeffs: &FamilyCoefficients) -> f64 {
    let shared = ((coeffs.gamma_psi() + coeffs.gamma_phi()) / (2.0 * PI)).powf(0.25);
    shared * PI.powf(0.25) * (2.0 / (1.0 + gamma)).sqrt()
}

fn check_tail(v: &[TwoFloat], tail_tol: f64) -> Result<()> {
    let dim = v.len();
    let tail: f64 = v[dim - 2..].iter().map(|x| f64::from(*x).powi(2)).sum();
    if !(tail < tail_tol) {
        return Err(Error::TruncationInsufficient {
            dim,
            tail,
            tol: tail_tol,
        });
    }
    Ok(())
}

fn vacuum_dd(pair: &LadderPair, tail_tol: f64) -> Result<DdVec> {
    let c = &pair.coeffs;
    let v = gaussian_recursion(c.u1, c.u2, vacuum_c0(c.gamma_psi(), c), pair.dim());
    check_tail(&v, tail_tol)?;
    Ok(v)
}

fn prime_vacuum_dd(pair: &LadderPair, tail_tol: f64) -> Result<DdVec> {
    let c = &pair.coeffs;
    let v = gaussian_recursion(c.v2, c.v1, vacuum_c0(c.gamma_phi(), c), pair.dim());
    check_tail(&v, tail_tol)?;
    Ok(v)
}

/// The b-vacuum `|0⟩`, `b|0⟩ = 0`, with real positive `c_0`.
pub fn vacuum(pair: &LadderPair, tail_tol: f64) -> Result<StateVector> {
    Ok(StateVector::from_dd(&vacuum_dd(pair, tail_tol)?))
}

/// The b'-vacuum `|0⟩'`, annihilated by `b' = b̃† = v2 a + v1 a†`.
pub fn prime_vacuum(pair: &LadderPair, tail_tol: f64) -> Result<StateVector> {
    Ok(StateVector::from_dd(&prime_vacuum_dd(pair, tail_tol)?))
}

/// Rescales `phi0` so that `⟨psi0|phi0⟩ = 1`; `psi0` is returned untouched.
pub fn bi_normalize(psi0: StateVector, phi0: StateVector) -> Result<(StateVector, StateVector)> {
    let overlap = braket(&psi0.coeffs, &phi0.coeffs);
    if !(overlap.norm() >= PAIRING_TOL) {
        return Err(Error::DegeneratePairing {
            overlap: overlap.norm(),
        });
    }
    let phi = StateVector::new(phi0.coeffs.map(|z| z / overlap));
    Ok((psi0, phi))
}

#[derive(Debug, Clone)]
pub struct BiBasis {
    pub psis: Vec<StateVector>,
    pub phis: Vec<StateVector>,
    pub psis_dd: Vec<DdVec>,
    pub phis_dd: Vec<DdVec>,
    pub n_max: usize,
    pub coeffs: FamilyCoefficients,
    /// `gram[(n, m)] = ⟨ψ_n|φ_m⟩`
    pub gram: CMatrix,
}

pub fn build_bi_basis(pair: &LadderPair, n_max: usize, tail_tol: f64) -> Result<BiBasis> {
    let dim = pair.dim();
    if n_max + 2 > dim / 2 {
        return Err(Error::Dimension {
            dim,
            reason: format!("n_max = {n_max} exceeds dim/2 - 2 headroom"),
        });
    }
    let psi0 = vacuum_dd(pair, tail_tol)?;
    let mut phi0 = prime_vacuum_dd(pair, tail_tol)?;
    let overlap = dot_dd(&psi0, &phi0);
    if !(f64::from(overlap).abs() >= PAIRING_TOL) {
        return Err(Error::DegeneratePairing {
            overlap: f64::from(overlap).abs(),
        });
    }
    let inv = recip(overlap);
    phi0.iter_mut().for_each(|x| *x *= inv);

    let c = pair.coeffs;
    let mut psis_dd = vec![psi0];
    let mut phis_dd = vec![phi0];
    for n in 1..=n_max {
        let k = recip(dd(n as f64).sqrt());
        let scale = |v: DdVec| v.into_iter().map(|x| x * k).collect::<DdVec>();
        let psi = scale(apply_ladder_dd(c.v1, c.v2, &psis_dd[n - 1]));
        // b† = u2 a + u1 a†
        let phi = scale(apply_ladder_dd(c.u2, c.u1, &phis_dd[n - 1]));
        psis_dd.push(psi);
        phis_dd.push(phi);
    }
    let gram = CMatrix::from_fn(n_max + 1, n_max + 1, |n, m| {
        cplx(f64::from(dot_dd(&psis_dd[n], &phis_dd[m])), 0.0)
    });
    let basis = BiBasis {
        psis: psis_dd.iter().map(|v| StateVector::from_dd(v)).collect(),
        phis: phis_dd.iter().map(|v| StateVector::from_dd(v)).collect(),
        psis_dd,
        phis_dd,
        n_max,
        coeffs: c,
        gram,
    };
    let (residual, n, m) = basis.biortho_residual();
    if !(residual <= DEGRADATION_TOL) {
        return Err(Error::NumericalDegradation { residual, n, m });
    }
    Ok(basis)
}

/// Builds the pair and basis, doubling `dim` (up to [`MAX_DIM`]) while the
/// vacuum tail test fails, bi-orthonormality misses [`BIORTHO_TOL`], or
/// `‖η ψ_n - φ_n‖` misses [`METRIC_TOL`].
pub fn build_bi_basis_escalating(
    coeffs: FamilyCoefficients,
    dim: usize,
    n_max: usize,
    tail_tol: f64,
) -> Result<(LadderPair, BiBasis)> {
    let mut dim = dim;
    loop {
        let pair = build_ladder_pair(coeffs, dim)?;
        let can_grow = dim * 2 <= MAX_DIM;
        match build_bi_basis(&pair, n_max, tail_tol) {
            Ok(basis) if !can_grow || basis.is_converged() => return Ok((pair, basis)),
            Ok(_) => {}
            Err(
                Error::TruncationInsufficient { .. }
                | Error::NumericalDegradation { .. }
                | Error::Dimension { .. },
            ) if can_grow => {}
            Err(e) => return Err(e),
        }
        dim *= 2;
    }
}

impl BiBasis {
    pub fn dim(&self) -> usize {
        self.psis[0].dim()
    }

    /// Worst `|⟨ψ_n|φ_m⟩ - δ_nm|` and where it occurs.
    pub fn biortho_residual(&self) -> (f64, usize, usize) {
        let mut worst = (0.0f64, 0, 0);
        for n in 0..=self.n_max {
            for m in 0..=self.n_max {
                let target = if n == m { 1.0 } else { 0.0 };
                let r = (self.gram[(n, m)] - target).norm();
                if r > worst.0 || r.is_nan() {
                    worst = (r, n, m);
                }
            }
        }
        worst
    }

    /// `max_n ‖Σ_k φ_k ⟨φ_k|ψ_n⟩ - φ_n‖`, i.e. the metric action without
    /// building the metric.
    pub fn metric_action_residual(&self) -> f64 {
        self.psis_dd
            .iter()
            .zip(&self.phis_dd)
            .map(|(p, f)| sub_norm_dd(&project_dd(&self.phis_dd, p), f))
            .fold(0.0, f64::max)
    }

    pub fn is_converged(&self) -> bool {
        self.biortho_residual().0 <= BIORTHO_TOL && self.metric_action_residual() <= METRIC_TOL
    }

    /// Largest amplitude of `ψ_n` or `φ_n` on a level of the wrong parity.
    pub fn parity_leak(&self) -> f64 {
        let mut worst = 0.0f64;
        for (n, (p, f)) in self.psis.iter().zip(&self.phis).enumerate() {
            for k in (0..self.dim()).filter(|k| (k + n) % 2 == 1) {
                worst = worst.max(p.coeffs[k].norm()).max(f.coeffs[k].norm());
            }
        }
        worst
    }

    pub fn max_tail_mass(&self) -> f64 {
        self.psis
            .iter()
            .chain(&self.phis)
            .map(|v| v.tail_mass)
            .fold(0.0, f64::max)
    }

    /// Relative residuals `max_n ‖Nψ_n - nψ_n‖/‖ψ_n‖` and `‖N'φ_n - nφ_n‖/‖φ_n‖`.
    ///
    /// Relative, because `‖ψ_n‖` grows quickly with `n` once `s ≠ 0`.
    pub fn number_residuals(&self) -> (f64, f64) {
        let c = self.coeffs;
        let mut worst = (0.0f64, 0.0f64);
        for n in 0..=self.n_max {
            let nf = dd(n as f64);
            let psi = &self.psis_dd[n];
            let n_psi = apply_ladder_dd(c.v1, c.v2, &apply_ladder_dd(c.u1, c.u2, psi));
            let want: DdVec = psi.iter().map(|x| *x * nf).collect();
            worst.0 = worst.0.max(sub_norm_dd(&n_psi, &want) / norm_dd(psi));
            let phi = &self.phis_dd[n];
            // N' = b† b̃†, b̃† = v2 a + v1 a†, b† = u2 a + u1 a†
            let n_phi = apply_ladder_dd(c.u2, c.u1, &apply_ladder_dd(c.v2, c.v1, phi));
            let want: DdVec = phi.iter().map(|x| *x * nf).collect();
            worst.1 = worst.1.max(sub_norm_dd(&n_phi, &want) / norm_dd(phi));
        }
        worst
    }
}

/// Residuals of the truncated resolutions of the identity.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct IdentityResolution {
    /// `⟨φ_m| Σ ψ_n φ_n† |ψ_k⟩ - δ_mk`
    pub bi_basis: f64,
    /// `⟨ψ_m| Σ φ_n ψ_n† |φ_k⟩ - δ_mk`
    pub mirrored: f64,
    /// `Σ ψ_n φ_n† - I` on the leading `(n_max+1)` canonical block; not small for `s ≠ 0`.
    pub canonical: f64,
}

pub fn resolution_of_identity(basis: &BiBasis) -> IdentityResolution {
    let n = basis.n_max + 1;
    let g = &basis.gram;
    let mut bi = 0.0f64;
    let mut mirror = 0.0f64;
    for m in 0..n {
        for k in 0..n {
            let target = if m == k { 1.0 } else { 0.0 };
            // ⟨φ_m|ψ_j⟩⟨φ_j|ψ_k⟩ and ⟨ψ_m|φ_j⟩⟨ψ_j|φ_k⟩
            let a: num_complex::Complex64 =
                (0..n).map(|j| g[(j, m)].conj() * g[(k, j)].conj()).sum();
            let b: num_complex::Complex64 = (0..n).map(|j| g[(m, j)] * g[(j, k)]).sum();
            bi = bi.max((a - target).norm());
            mirror = mirror.max((b - target).norm());
        }
    }
    let dim = basis.dim();
    let mut sum = CMatrix::zeros(dim, dim);
    for (p, f) in basis.psis.iter().zip(&basis.phis) {
        sum += &p.coeffs * f.coeffs.adjoint();
    }
    IdentityResolution {
        bi_basis: bi,
        mirrored: mirror,
        canonical: crate::linalg::leading_identity_residual(&sum, n),
    }
}

/// `η = Σ φ_n φ_n†` and `η⁻¹ = Σ ψ_n ψ_n†`, kept both dense and factored.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    pub eta: CMatrix,
    pub eta_inv: CMatrix,
    phis: Vec<CVector>,
    psis: Vec<CVector>,
    phis_dd: Vec<DdVec>,
    psis_dd: Vec<DdVec>,
}

pub fn metric(basis: &BiBasis) -> MetricOperator {
    let dim = basis.dim();
    let phis: Vec<CVector> = basis.phis.iter().map(|v| v.coeffs.clone()).collect();
    let psis: Vec<CVector> = basis.psis.iter().map(|v| v.coeffs.clone()).collect();
    let mut eta = CMatrix::zeros(dim, dim);
    let mut eta_inv = CMatrix::zeros(dim, dim);
    for f in &phis {
        eta += f * f.adjoint();
    }
    for p in &psis {
        eta_inv += p * p.adjoint();
    }
    MetricOperator {
        eta,
        eta_inv,
        phis,
        psis,
        phis_dd: basis.phis_dd.clone(),
        psis_dd: basis.psis_dd.clone(),
    }
}

fn project(family: &[CVector], v: &CVector) -> CVector {
    let mut out = CVector::zeros(v.len());
    for f in family {
        out += f * braket(f, v);
    }
    out
}

fn project_dd(family: &[DdVec], v: &[TwoFloat]) -> DdVec {
    let mut out = vec![dd(0.0); v.len()];
    for f in family {
        axpy_dd(&mut out, dot_dd(f, v), f);
    }
    out
}

impl MetricOperator {
    /// `η v` through `Σ φ_k ⟨φ_k|v⟩`, which avoids the cancellation that the
    /// dense product suffers when `‖ψ_n‖` is large.
    pub fn apply(&self, v: &CVector) -> CVector {
        project(&self.phis, v)
    }

    pub fn apply_inv(&self, v: &CVector) -> CVector {
        project(&self.psis, v)
    }

    pub fn apply_dd(&self, v: &[TwoFloat]) -> DdVec {
        project_dd(&self.phis_dd, v)
    }

    pub fn apply_inv_dd(&self, v: &[TwoFloat]) -> DdVec {
        project_dd(&self.psis_dd, v)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let a = crate::linalg::max_abs(&(&self.eta - self.eta.adjoint()));
        let b = crate::linalg::max_abs(&(&self.eta_inv - self.eta_inv.adjoint()));
        a.max(b)
    }

    /// Smallest eigenvalue of the symmetric form `⟨ψ_m|η|ψ_n⟩`, i.e. η on
    /// the trusted subspace; it is ≈ 1 when the basis is bi-orthonormal.
    pub fn trusted_min_eigenvalue(&self) -> f64 {
        let n = self.psis_dd.len();
        let eta_psi: Vec<DdVec> = self.psis_dd.iter().map(|p| self.apply_dd(p)).collect();
        let form = DMatrix::from_fn(n, n, |m, k| {
            0.5 * f64::from(dot_dd(&self.psis_dd[m], &eta_psi[k]) + dot_dd(&self.psis_dd[k], &eta_psi[m]))
        });
        SymmetricEigen::new(form)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_n ‖η ψ_n - φ_n‖`
    pub fn action_residual(&self) -> f64 {
        self.psis_dd
            .iter()
            .zip(&self.phis_dd)
            .map(|(p, f)| sub_norm_dd(&self.apply_dd(p), f))
            .fold(0.0, f64::max)
    }

    /// `max_n ‖η⁻¹ φ_n - ψ_n‖`
    pub fn inverse_action_residual(&self) -> f64 {
        self.phis_dd
            .iter()
            .zip(&self.psis_dd)
            .map(|(f, p)| sub_norm_dd(&self.apply_inv_dd(f), p))
            .fold(0.0, f64::max)
    }

    /// `⟨φ_m|η⁻¹ η|ψ_n⟩ - δ_mn`, the inverse relation on span{ψ_n}.
    pub fn inverse_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (n, p) in self.psis_dd.iter().enumerate() {
            let w = self.apply_inv_dd(&self.apply_dd(p));
            for (m, f) in self.phis_dd.iter().enumerate() {
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((f64::from(dot_dd(f, &w)) - target).abs());
            }
        }
        worst
    }
}

/// Pseudo-adjointness and projector-form residuals, all as bi-basis
/// matrix elements.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PseudoAdjointReport {
    /// `⟨φ_m|η⁻¹ B† η|ψ_n⟩ - ⟨φ_m|B̃|ψ_n⟩`
    pub btilde: f64,
    /// `⟨ψ_m|η B η⁻¹|φ_n⟩ - ⟨ψ_m|B̃†|φ_n⟩`
    pub bprime: f64,
    /// `N# = η⁻¹ N† η` against `N`, sandwiched by `⟨φ_m|·|ψ_n⟩`
    pub number: f64,
    /// `η N'† η⁻¹` against `N'`, sandwiched by `⟨ψ_m|·|φ_n⟩`
    pub number_prime: f64,
    /// `⟨φ_m|B|ψ_n⟩ - √n δ_{m,n-1}`
    pub projector_b: f64,
    /// `⟨ψ_m|B̃†|φ_n⟩ - √n δ_{m,n-1}`
    pub projector_bprime: f64,
}

impl PseudoAdjointReport {
    pub fn max(&self) -> f64 {
        [
            self.btilde,
            self.bprime,
            self.number,
            self.number_prime,
            self.projector_b,
            self.projector_bprime,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `max_{m,n} |⟨l_m|a_n⟩ - ⟨r_m|b_n⟩|`
fn max_form_diff(left: &[DdVec], op_a: &[DdVec], right: &[DdVec], op_b: &[DdVec]) -> f64 {
    let mut worst = 0.0f64;
    for m in 0..left.len() {
        for n in 0..op_a.len() {
            let d = dot_dd(&left[m], &op_a[n]) - dot_dd(&right[m], &op_b[n]);
            worst = worst.max(f64::from(d).abs());
        }
    }
    worst
}

/// Pseudo-adjointness residuals for `n, m ≤ n_max - 1` plus the projector
/// forms of `b` and `b'` for `n, m ≤ n_max`.
pub fn pseudo_adjoint_residuals(
    pair: &LadderPair,
    metric: &MetricOperator,
    basis: &BiBasis,
) -> PseudoAdjointReport {
    let c = pair.coeffs;
    let top = basis.n_max.max(1);
    let b = |v: &DdVec| apply_ladder_dd(c.u1, c.u2, v);
    let bd = |v: &DdVec| apply_ladder_dd(c.u2, c.u1, v);
    let bt = |v: &DdVec| apply_ladder_dd(c.v1, c.v2, v);
    let btd = |v: &DdVec| apply_ladder_dd(c.v2, c.v1, v);
    let num = |v: &DdVec| bt(&b(v));
    let num_d = |v: &DdVec| bd(&btd(v));
    let map = |vs: &[DdVec], f: &dyn Fn(&DdVec) -> DdVec| -> Vec<DdVec> { vs.iter().map(f).collect() };

    let psis = &basis.psis_dd[..top];
    let phis = &basis.phis_dd[..top];
    let eta_psi: Vec<DdVec> = psis.iter().map(|p| metric.apply_dd(p)).collect();
    let inv_phi: Vec<DdVec> = phis.iter().map(|f| metric.apply_inv_dd(f)).collect();

    let btilde = max_form_diff(&inv_phi, &map(&eta_psi, &bd), phis, &map(psis, &bt));
    let bprime = max_form_diff(&eta_psi, &map(&inv_phi, &b), psis, &map(phis, &btd));
    let number = max_form_diff(&inv_phi, &map(&eta_psi, &num_d), phis, &map(psis, &num));
    // N' = b† b̃† and N'† = b̃ b = N
    let number_prime = max_form_diff(&eta_psi, &map(&inv_phi, &num), psis, &map(phis, &num_d));

    let n = basis.n_max + 1;
    let mut projector_b = 0.0f64;
    let mut projector_bprime = 0.0f64;
    for k in 0..n {
        let b_psi = b(&basis.psis_dd[k]);
        let bp_phi = btd(&basis.phis_dd[k]);
        for m in 0..n {
            let target = if m + 1 == k { (k as f64).sqrt() } else { 0.0 };
            let x = f64::from(dot_dd(&basis.phis_dd[m], &b_psi));
            let y = f64::from(dot_dd(&basis.psis_dd[m], &bp_phi));
            projector_b = projector_b.max((x - target).abs());
            projector_bprime = projector_bprime.max((y - target).abs());
        }
    }

    PseudoAdjointReport {
        btilde,
        bprime,
        number,
        number_prime,
        projector_b,
        projector_bprime,
    }
}
