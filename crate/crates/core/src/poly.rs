//! Bi-orthogonal polynomial families `P_n(x, s)`, `Q_n(x, s)` and the
//! Hermite polynomials they reduce to at `s = 0`.
//!
//! Both families obey a recurrence of the shape
//!
//! ```text
//! X_0 = 1,  X_1 = A x,  X_n = A x X_{n-1} + (n - 1) C X_{n-2}
//! ```
//!
//! with
//!
//! | family | A              | C                        |
//! |--------|----------------|--------------------------|
//! | P      | 2/(1-s)        | 2(s - s² - 1)/(1 - s)    |
//! | Q      | 2/(1-s+s²)     | 2(s - 1)/(1 - s + s²)    |
//! | H      | 2              | -2                       |
//!
//! Coefficients are generated in coefficient space using double-double
//! arithmetic. At `s = 0` every step is exact integer arithmetic, so
//! `P_n(·, 0)`, `Q_n(·, 0)` and `H_n` agree bit for bit.

use std::f64::consts::PI;

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::dd::{dd, div, recip};
use crate::error::{Error, Result};
use crate::quadrature::gauss_hermite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Family {
    P,
    Q,
    H,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::P => "P",
            Family::Q => "Q",
            Family::H => "H",
        }
    }
}

/// Coefficients of a polynomial in `x`; index `k` holds the coefficient of `x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    pub family: Family,
    pub s: f64,
    coeffs: Vec<TwoFloat>,
}


pub(crate) fn check_s(s: f64) -> Result<()> {
    if s.is_finite() && s.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain {
            name: "s",
            value: s,
            domain: "(-1, 1)",
        })
    }
}

/// `(A, C)` of the three-term recurrence for `family` at `s`.
pub fn recurrence_coefficients(family: Family, s: f64) -> (TwoFloat, TwoFloat) {
    let s_dd = dd(s);
    match family {
        Family::P => {
            let denom = dd(1.0) - s_dd;
            (div(dd(2.0), denom), div(dd(2.0) * (s_dd - s_dd * s_dd - dd(1.0)), denom))
        }
        Family::Q => {
            let denom = dd(1.0) - s_dd + s_dd * s_dd;
            (div(dd(2.0), denom), div(dd(2.0) * (s_dd - dd(1.0)), denom))
        }
        Family::H => (dd(2.0), dd(-2.0)),
    }
}

fn generate(family: Family, n: usize, s: f64) -> PolyCoeffs {
    let (a, c) = recurrence_coefficients(family, s);
    let mut prev: Vec<TwoFloat> = Vec::new();
    let mut cur = vec![dd(1.0)];
    for k in 1..=n {
        let mut next = vec![dd(0.0); k + 1];
        for (j, &cj) in cur.iter().enumerate() {
            next[j + 1] += a * cj;
        }
        let factor = dd((k - 1) as f64) * c;
        for (j, &pj) in prev.iter().enumerate() {
            next[j] += factor * pj;
        }
        prev = cur;
        cur = next;
    }
    PolyCoeffs {
        family,
        s,
        coeffs: cur,
    }
}

pub fn p_poly(n: usize, s: f64) -> Result<PolyCoeffs> {
    check_s(s)?;
    Ok(generate(Family::P, n, s))
}

pub fn q_poly(n: usize, s: f64) -> Result<PolyCoeffs> {
    check_s(s)?;
    Ok(generate(Family::Q, n, s))
}

/// Physicists' Hermite polynomial `H_n`.
pub fn hermite_poly(n: usize) -> PolyCoeffs {
    generate(Family::H, n, 0.0)
}

pub fn family_poly(family: Family, n: usize, s: f64) -> Result<PolyCoeffs> {
    match family {
        Family::P => p_poly(n, s),
        Family::Q => q_poly(n, s),
        Family::H => Ok(hermite_poly(n)),
    }
}

impl PolyCoeffs {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients rounded to `f64`.
    pub fn coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.hi()).collect()
    }

    pub fn coeffs_dd(&self) -> &[TwoFloat] {
        &self.coeffs
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().unwrap().hi()
    }

    pub fn eval_dd(&self, x: TwoFloat) -> TwoFloat {
        self.coeffs
            .iter()
            .rev()
            .fold(dd(0.0), |acc, &c| acc * x + c)
    }

    /// Horner evaluation carried out in double-double and rounded once.
    pub fn eval(&self, x: f64) -> f64 {
        f64::from(self.eval_dd(dd(x)))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.hi())
    }

    /// Derivative in coefficient space.
    pub fn derivative(&self) -> PolyCoeffs {
        let coeffs = if self.coeffs.len() == 1 {
            vec![dd(0.0)]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| dd(k as f64) * c)
                .collect()
        };
        PolyCoeffs {
            family: self.family,
            s: self.s,
            coeffs,
        }
    }
}

/// Exponent of the bi-orthogonality weight `e^{-μ(s) x²}`, `μ(s) = 1/((1-s)(1-s+s²))`.
pub fn mu(s: f64) -> f64 {
    1.0 / ((1.0 - s) * (1.0 - s + s * s))
}

fn mu_dd(s: f64) -> TwoFloat {
    let s = dd(s);
    recip((dd(1.0) - s) * (dd(1.0) - s + s * s))
}

fn factorial_pow2(n: usize) -> f64 {
    (1..=n).map(|k| 2.0 * k as f64).product()
}

/// Closed-form value of `∫ P_n Q_m e^{-μ x²} dx`: `√(π/μ) 2ⁿ n! δ_nm`.
pub fn biortho_expected(n: usize, m: usize, s: f64) -> f64 {
    if n != m {
        return 0.0;
    }
    (PI / mu(s)).sqrt() * factorial_pow2(n)
}

/// Default Gauss–Hermite order for a `(n, m)` pairing.
pub fn default_quad_order(n: usize, m: usize) -> usize {
    (n + m + 8).max(40)
}

/// `∫ P_n(x,s) Q_m(x,s) e^{-μ(s) x²} dx` by Gauss–Hermite after `t = √μ x`.
pub fn biortho_integral(n: usize, m: usize, s: f64, quad_order: usize) -> Result<f64> {
    check_s(s)?;
    if quad_order < n + m + 2 {
        return Err(Error::QuadratureOrder {
            order: quad_order,
            reason: format!("need at least n + m + 2 = {} nodes", n + m + 2),
        });
    }
    let rule = gauss_hermite(quad_order)?;
    let p = p_poly(n, s)?;
    let q = q_poly(m, s)?;
    let inv_root_mu = recip(mu_dd(s).sqrt());
    let total = rule.integrate_dd(|t| {
        let x = t * inv_root_mu;
        p.eval_dd(x) * q.eval_dd(x)
    });
    Ok(f64::from(total * inv_root_mu))
}

/// Max over sample points in `[-2, 2]` of `|P_n' - (2n/(1-s)) P_{n-1}|` and the
/// Q analogue with `2n/(1-s+s²)`.
pub fn derivative_relation_residual(n: usize, s: f64) -> Result<(f64, f64)> {
    check_s(s)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "derivative relation needs n >= 1".into(),
        ));
    }
    let samples: Vec<TwoFloat> = (0..=40).map(|i| dd(-2.0 + 0.1 * i as f64)).collect();
    let residual = |family: Family| -> Result<f64> {
        let hi = family_poly(family, n, s)?.derivative();
        let lo = family_poly(family, n - 1, s)?;
        let (a, _) = recurrence_coefficients(family, s);
        let factor = dd(n as f64) * a;
        Ok(samples
            .iter()
            .map(|&x| f64::from(hi.eval_dd(x) - factor * lo.eval_dd(x)).abs())
            .fold(0.0, f64::max))
    };
    Ok((residual(Family::P)?, residual(Family::Q)?))
}
