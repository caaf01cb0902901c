//! Truncated matrix representations of deformed boson ladder operators.
//!
//! A ladder pair is `b = u1 a + u2 a†`, `b̃ = v1 a + v2 a†` with real
//! coefficients and `u1 v2 - u2 v1 = 1`, which makes `[b, b̃] = 1`.
//! Truncation to `dim` levels spoils the commutator only in the bottom-right
//! entry, so identities are checked on leading blocks.

use crate::error::{Error, Result};
use crate::linalg::{commutator, cplx, leading_identity_residual, leading_max_abs, CMatrix};
use crate::poly::check_s;

pub const MIN_DIM: usize = 4;
pub const DEFAULT_DIM: usize = 64;
pub const CONSTRAINT_TOL: f64 = 1e-14;
pub const COMMUTATOR_TOL: f64 = 1e-12;

/// Number of retained canonical Fock levels `0..dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruncationDim(usize);

impl TruncationDim {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < MIN_DIM {
            return Err(Error::Dimension {
                dim,
                reason: format!("need at least {MIN_DIM} levels"),
            });
        }
        Ok(Self(dim))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// Real coefficients of `b = u1 a + u2 a†` and `b̃ = v1 a + v2 a†`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FamilyCoefficients {
    pub u1: f64,
    pub u2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl FamilyCoefficients {
    pub fn new(u1: f64, u2: f64, v1: f64, v2: f64) -> Result<Self> {
        if ![u1, u2, v1, v2].iter().all(|c| c.is_finite()) {
            return Err(Error::Construction("coefficients must be finite".into()));
        }
        let c = Self { u1, u2, v1, v2 };
        let constraint = c.commutator_constraint();
        if (constraint - 1.0).abs() > CONSTRAINT_TOL {
            return Err(Error::Construction(format!(
                "commutator constraint u1*v2 - u2*v1 = {constraint} != 1"
            )));
        }
        if u1 == 0.0 || (u2 / u1).abs() >= 1.0 {
            return Err(Error::Construction(format!(
                "b-vacuum not normalizable: |u2/u1| = {} >= 1",
                (u2 / u1).abs()
            )));
        }
        if v2 == 0.0 || (v1 / v2).abs() >= 1.0 {
            return Err(Error::Construction(format!(
                "b'-vacuum not normalizable: |v1/v2| = {} >= 1",
                (v1 / v2).abs()
            )));
        }
        Ok(c)
    }

    pub fn commutator_constraint(&self) -> f64 {
        self.u1 * self.v2 - self.u2 * self.v1
    }

    /// Gaussian exponent `γ` of the b-vacuum, `ψ_0 ∝ exp(-γ x²/2)`.
    pub fn gamma_psi(&self) -> f64 {
        (self.u1 + self.u2) / (self.u1 - self.u2)
    }

    /// Gaussian exponent of the b'-vacuum (`b' = b̃† = v2 a + v1 a†`).
    pub fn gamma_phi(&self) -> f64 {
        (self.v2 + self.v1) / (self.v2 - self.v1)
    }
}

/// `b(s) = a + s a†`, `b̃(s) = s a + (1 + s²) a†`.
pub fn standard_family(s: f64) -> Result<FamilyCoefficients> {
    check_s(s)?;
    FamilyCoefficients::new(1.0, s, s, 1.0 + s * s)
}

/// `b₂(s) = a + s a†`, `b̃₂(s) = -s a + (1 - s²) a†`.
///
/// The b'-vacuum exists only while `|s| / (1 - s²) < 1`, i.e.
/// `|s| < (√5 - 1)/2`; outside that range construction fails.
pub fn alternate_family(s: f64) -> Result<FamilyCoefficients> {
    check_s(s)?;
    FamilyCoefficients::new(1.0, s, -s, 1.0 - s * s)
}

/// Truncated canonical annihilation matrix, `√n` at `(n-1, n)`.
pub fn build_annihilation(dim: usize) -> Result<CMatrix> {
    let dim = TruncationDim::new(dim)?.get();
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = cplx((n as f64).sqrt(), 0.0);
    }
    Ok(a)
}

#[derive(Debug, Clone)]
pub struct LadderPair {
    pub b: CMatrix,
    pub btilde: CMatrix,
    pub coeffs: FamilyCoefficients,
    pub dim: TruncationDim,
    /// Max-norm of `[b, b̃] - 1` on the leading `(dim-1)` block.
    pub commutator_residual: f64,
}

pub fn build_ladder_pair(coeffs: FamilyCoefficients, dim: usize) -> Result<LadderPair> {
    let coeffs = FamilyCoefficients::new(coeffs.u1, coeffs.u2, coeffs.v1, coeffs.v2)?;
    let dim = TruncationDim::new(dim)?;
    let a = build_annihilation(dim.get())?;
    let ad = a.adjoint();
    let b = a.scale(coeffs.u1) + ad.scale(coeffs.u2);
    let btilde = a.scale(coeffs.v1) + ad.scale(coeffs.v2);
    let comm = commutator(&b, &btilde);
    let commutator_residual = leading_identity_residual(&comm, dim.get() - 1);
    if commutator_residual > COMMUTATOR_TOL {
        return Err(Error::Construction(format!(
            "leading block of [b, b~] deviates from identity by {commutator_residual:e}"
        )));
    }
    Ok(LadderPair {
        b,
        btilde,
        coeffs,
        dim,
        commutator_residual,
    })
}

impl LadderPair {
    pub fn dim(&self) -> usize {
        self.dim.get()
    }

    /// `b' = b̃†`, the annihilator of the dual family.
    pub fn bprime(&self) -> CMatrix {
        self.btilde.adjoint()
    }
}

#[derive(Debug, Clone)]
pub struct NumberPair {
    /// `N = b̃ b`
    pub n: CMatrix,
    /// `N' = b† b̃†`
    pub n_prime: CMatrix,
}

pub fn number_operators(pair: &LadderPair) -> NumberPair {
    let n = &pair.btilde * &pair.b;
    let n_prime = pair.b.adjoint() * pair.btilde.adjoint();
    NumberPair { n, n_prime }
}

impl NumberPair {
    /// Leading `(dim-2)` block residuals of `[b, N] - b` and `[b̃, N] + b̃`.
    pub fn algebra_residuals(&self, pair: &LadderPair) -> (f64, f64) {
        let k = pair.dim() - 2;
        let lower = commutator(&pair.b, &self.n) - &pair.b;
        let raise = commutator(&pair.btilde, &self.n) + &pair.btilde;
        (leading_max_abs(&lower, k), leading_max_abs(&raise, k))
    }

    /// Largest entry of `N` or `N'` connecting levels of opposite parity.
    pub fn parity_leak(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in [&self.n, &self.n_prime] {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if (i + j) % 2 == 1 {
                        worst = worst.max(m[(i, j)].norm());
                    }
                }
            }
        }
        worst
    }

    /// Eigenvalues of the real matrix `N`, sorted by real part.
    pub fn spectrum(&self) -> Vec<num_complex::Complex64> {
        let real = self.n.map(|z| z.re);
        let mut ev: Vec<_> = real.complex_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        ev
    }
}
