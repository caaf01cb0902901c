//! Closed-form position-space wave functions of the standard family.
//!
//! Convention: `a = (x + d/dx)/√2`, so `b(s) = ((1+s)x + (1-s)d/dx)/√2` and
//! `b'(s) = ((1+s+s²)x + (1-s+s²)d/dx)/√2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::BiBasis;
use crate::linalg::{cplx, CVector};
use crate::poly::{check_s, family_poly, mu, recurrence_coefficients, Family, PolyCoeffs};
use crate::quadrature::gauss_hermite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Which {
    Psi,
    Phi,
}

impl Which {
    fn family(self) -> Family {
        match self {
            Which::Psi => Family::P,
            Which::Phi => Family::Q,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Which::Psi => "psi",
            Which::Phi => "phi",
        }
    }
}

/// `N(s) = (π(1-s)(1-s+s²))^{-1/4}`
pub fn normalization_constant(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok((PI * (1.0 - s) * (1.0 - s + s * s)).powf(-0.25))
}

/// Gaussian exponent `γ` of the ground state, `∝ exp(-γx²/2)`.
pub fn ground_gamma(s: f64, which: Which) -> f64 {
    match which {
        Which::Psi => (1.0 + s) / (1.0 - s),
        Which::Phi => (1.0 + s + s * s) / (1.0 - s + s * s),
    }
}

/// `prefactor · exp(-γ x²/2 + linear · x)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProfile {
    pub gamma: f64,
    pub linear: Complex64,
    pub prefactor: Complex64,
}

impl GaussianProfile {
    pub fn new(gamma: f64, linear: Complex64, prefactor: Complex64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::ParameterDomain {
                name: "gamma",
                value: gamma,
                domain: "(0, inf)",
            });
        }
        Ok(Self {
            gamma,
            linear,
            prefactor,
        })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.prefactor * (self.linear * x - 0.5 * self.gamma * x * x).exp()
    }
}

pub fn ground_profile(s: f64, which: Which) -> Result<GaussianProfile> {
    let n = normalization_constant(s)?;
    GaussianProfile::new(ground_gamma(s, which), cplx(0.0, 0.0), cplx(n, 0.0))
}

/// `ψ_0(x,s)` or `φ_0(x,s)`.
pub fn ground_wavefunction(s: f64, which: Which, x: f64) -> Result<f64> {
    Ok(ground_profile(s, which)?.eval(x).re)
}

/// `ψ_n = P_n ψ_0/√(2ⁿn!)`, `φ_n = Q_n φ_0/√(2ⁿn!)`.
#[derive(Debug, Clone)]
pub struct FockWavefunction {
    pub n: usize,
    pub s: f64,
    pub which: Which,
    poly: PolyCoeffs,
    ground: GaussianProfile,
    scale: f64,
}

impl FockWavefunction {
    pub fn new(n: usize, s: f64, which: Which) -> Result<Self> {
        let poly = family_poly(which.family(), n, s)?;
        let ground = ground_profile(s, which)?;
        let scale = (1..=n).map(|k| 2.0 * k as f64).product::<f64>().sqrt().recip();
        Ok(Self {
            n,
            s,
            which,
            poly,
            ground,
            scale,
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        self.scale * self.poly.eval(x) * self.ground.eval(x).re
    }
}

pub fn fock_wavefunction(n: usize, s: f64, which: Which, x: f64) -> Result<f64> {
    Ok(FockWavefunction::new(n, s, which)?.value(x))
}

/// Coherent-state profile with `N(s,α)` fixed by agreement with the Fock
/// expansion `e^{-|α|²/2} Σ αⁿ ψ_n/√n!`.
///
/// With `t = α/√2` the generating function `Σ tⁿ P_n/n! = exp(A x t + C t²/2)`
/// of the recurrence `P_n = A x P_{n-1} + (n-1) C P_{n-2}` gives
/// `N(s,α) = N(s) e^{-|α|²/2} e^{C α²/4}`, which is complex when `α² ∉ ℝ`.
pub fn coherent_profile(alpha: Complex64, s: f64, which: Which) -> Result<GaussianProfile> {
    let n = normalization_constant(s)?;
    let (a, c) = recurrence_coefficients(which.family(), s);
    let (a, c) = (f64::from(a), f64::from(c));
    let linear = alpha * (a / 2f64.sqrt());
    let prefactor = n * (alpha * alpha * (c / 4.0) - 0.5 * alpha.norm_sqr()).exp();
    GaussianProfile::new(ground_gamma(s, which), linear, prefactor)
}

pub fn coherent_wavefunction(alpha: Complex64, s: f64, which: Which, x: f64) -> Result<Complex64> {
    Ok(coherent_profile(alpha, s, which)?.eval(x))
}

/// `|N'(s,α)* N(s,α) I(s,α) - 1|` where `I` is the closed-form Gaussian
/// integral `√(π(1-s)(1-s+s²)) exp[L²/(2(1-s)(1-s+s²))]`,
/// `L = (2-2s+s²)α₁ + iα₂s²`. `I` is `∫ φ_α^* ψ_α dx` with the
/// normalization constants stripped.
pub fn binormalization_product_residual(alpha: Complex64, s: f64) -> Result<f64> {
    check_s(s)?;
    let psi = coherent_profile(alpha, s, Which::Psi)?;
    let phi = coherent_profile(alpha, s, Which::Phi)?;
    let d = (1.0 - s) * (1.0 - s + s * s);
    let l = cplx((2.0 - 2.0 * s + s * s) * alpha.re, alpha.im * s * s);
    let integral = (PI * d).sqrt() * (l * l / (2.0 * d)).exp();
    Ok((phi.prefactor.conj() * psi.prefactor * integral - 1.0).norm())
}

/// Oscillator eigenfunctions `h_0..h_{k_max-1}` at `x`.
pub fn hermite_functions(k_max: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(k_max);
    if k_max == 0 {
        return h;
    }
    h.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if k_max > 1 {
        h.push(2f64.sqrt() * x * h[0]);
    }
    for k in 1..k_max.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// `Σ_k c_k h_k(x)` for a canonical Fock coefficient vector.
pub fn oscillator_expansion(coeffs: &CVector, x: f64) -> Complex64 {
    hermite_functions(coeffs.len(), x)
        .iter()
        .zip(coeffs.iter())
        .map(|(h, c)| c * *h)
        .sum()
}

/// A wave function with a known Gaussian envelope `exp(-γx²/2 + b x)`,
/// used to place quadrature nodes.
pub trait Wavefunction {
    fn eval(&self, x: f64) -> Complex64;
    fn envelope(&self) -> (f64, Complex64);
}

impl Wavefunction for GaussianProfile {
    fn eval(&self, x: f64) -> Complex64 {
        GaussianProfile::eval(self, x)
    }

    fn envelope(&self) -> (f64, Complex64) {
        (self.gamma, self.linear)
    }
}

impl Wavefunction for FockWavefunction {
    fn eval(&self, x: f64) -> Complex64 {
        cplx(self.value(x), 0.0)
    }

    fn envelope(&self) -> (f64, Complex64) {
        (self.ground.gamma, cplx(0.0, 0.0))
    }
}

/// Position representation of a canonical Fock coefficient vector.
#[derive(Debug, Clone)]
pub struct Expansion(pub CVector);

impl Wavefunction for Expansion {
    fn eval(&self, x: f64) -> Complex64 {
        oscillator_expansion(&self.0, x)
    }

    fn envelope(&self) -> (f64, Complex64) {
        (1.0, cplx(0.0, 0.0))
    }
}

/// `∫ f*(x) g(x) dx` by Gauss–Hermite, with nodes rescaled and shifted to the
/// combined envelope `exp(-a x² + b x)`.
pub fn position_overlap(
    f: &dyn Wavefunction,
    g: &dyn Wavefunction,
    quad_order: usize,
) -> Result<Complex64> {
    let (gf, bf) = f.envelope();
    let (gg, bg) = g.envelope();
    let a = 0.5 * (gf + gg);
    if !(a > 0.0) {
        return Err(Error::Integration(format!(
            "combined Gaussian exponent {a} is not positive"
        )));
    }
    let b = bf.conj() + bg;
    let center = b.re / (2.0 * a);
    let width = a.sqrt().recip();
    let rule = gauss_hermite(quad_order)?;
    let mut total = cplx(0.0, 0.0);
    let mut peak = 0.0f64;
    let mut edge = 0.0f64;
    for (i, (t, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let x = center + t * width;
        let v = f.eval(x).conj() * g.eval(x) * (t * t).exp();
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Integration(format!("non-finite integrand at x = {x}")));
        }
        let contrib = (v * *w).norm();
        peak = peak.max(contrib);
        if i == 0 || i + 1 == rule.nodes.len() {
            edge = edge.max(contrib);
        }
        total += v * *w;
    }
    if quad_order > 2 && edge > 1e-6 * peak {
        return Err(Error::Integration(format!(
            "integrand not decaying at the outer nodes ({edge:e} vs peak {peak:e})"
        )));
    }
    Ok(total * width)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionGrid {
    pub points: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Evaluates `f` at `count` equally spaced points of `[x_min, x_max]`.
pub fn sample(f: &dyn Wavefunction, x_min: f64, x_max: f64, count: usize) -> Result<PositionGrid> {
    if count < 2 || !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "grid [{x_min}, {x_max}] with {count} points"
        )));
    }
    let step = (x_max - x_min) / (count - 1) as f64;
    let points: Vec<f64> = (0..count).map(|i| x_min + step * i as f64).collect();
    let values = points.iter().map(|&x| f.eval(x)).collect();
    Ok(PositionGrid { points, values })
}

/// Central-difference residual of `b ψ_0 = 0` (`Psi`) or `b' φ_0 = 0` (`Phi`),
/// maximised over `xs`.
pub fn annihilation_fd_residual(s: f64, which: Which, xs: &[f64], h: f64) -> Result<f64> {
    let prof = ground_profile(s, which)?;
    let (cx, cd) = match which {
        Which::Psi => (1.0 + s, 1.0 - s),
        Which::Phi => (1.0 + s + s * s, 1.0 - s + s * s),
    };
    let f = |x: f64| prof.eval(x).re;
    Ok(xs
        .iter()
        .map(|&x| {
            let d = (f(x + h) - f(x - h)) / (2.0 * h);
            ((cx * x * f(x) + cd * d) / 2f64.sqrt()).abs()
        })
        .fold(0.0, f64::max))
}

/// `|ψ_0 φ_0 - N(s)² e^{-μ(s)x²}|` maximised over `xs`.
pub fn weight_identity_residual(s: f64, xs: &[f64]) -> Result<f64> {
    let n = normalization_constant(s)?;
    let m = mu(s);
    let psi = ground_profile(s, Which::Psi)?;
    let phi = ground_profile(s, Which::Phi)?;
    Ok(xs
        .iter()
        .map(|&x| (psi.eval(x).re * phi.eval(x).re - n * n * (-m * x * x).exp()).abs())
        .fold(0.0, f64::max))
}

/// `max |ψ_n(-x) - (-1)ⁿ ψ_n(x)|` over `xs`, `n ≤ n_max`, both families.
pub fn parity_residual(s: f64, n_max: usize, xs: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for which in [Which::Psi, Which::Phi] {
        for n in 0..=n_max {
            let f = FockWavefunction::new(n, s, which)?;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for &x in xs {
                worst = worst.max((f.value(-x) - sign * f.value(x)).abs());
            }
        }
    }
    Ok(worst)
}

/// Largest gap between the closed-form `ψ_n(x,s)` (or `φ_n`) and the
/// oscillator expansion of the coefficient-space state, over `xs` and
/// `n ≤ n_max`.
pub fn cross_picture_residual(
    basis: &BiBasis,
    s: f64,
    which: Which,
    n_max: usize,
    xs: &[f64],
) -> Result<f64> {
    if n_max > basis.n_max {
        return Err(Error::InvalidArgument(format!(
            "n_max {n_max} exceeds basis n_max {}",
            basis.n_max
        )));
    }
    let family = match which {
        Which::Psi => &basis.psis,
        Which::Phi => &basis.phis,
    };
    let tables: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_functions(basis.dim(), x)).collect();
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        let closed = FockWavefunction::new(n, s, which)?;
        for (&x, h) in xs.iter().zip(&tables) {
            let expanded: Complex64 = h
                .iter()
                .zip(family[n].coeffs.iter())
                .map(|(hk, c)| c * *hk)
                .sum();
            worst = worst.max((expanded - closed.value(x)).norm());
        }
    }
    Ok(worst)
}
