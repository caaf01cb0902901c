//! Gauss–Hermite, Gauss–Laguerre and polar complex-plane quadrature rules.
//!
//! Nodes start from the eigenvalues of the symmetric Jacobi matrix of the
//! orthonormal family (Golub–Welsch) and are then refined by Newton steps in
//! double-double arithmetic. Weights are Christoffel numbers
//! `w_i = 1 / sum_k p_k(x_i)^2` of the orthonormal family, also evaluated in
//! double-double. Every rule keeps both the rounded `f64` values and the
//! low-order parts so that callers needing more than double precision can
//! integrate with [`QuadratureRule::integrate_dd`].

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::dd::{dd, div, recip};
use crate::error::{Error, Result};

/// Largest order accepted by either one-dimensional rule.
pub const MAX_ORDER: usize = 200;

/// Laguerre weights fall below the smallest normal `f64` past this order.
pub const MAX_LAGUERRE_ORDER: usize = 170;

const NEWTON_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Hermite,
    Laguerre,
}

/// Nodes and weights of a one-dimensional Gaussian rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    nodes_lo: Vec<f64>,
    weights_lo: Vec<f64>,
}

impl QuadratureRule {
    pub fn node_dd(&self, i: usize) -> TwoFloat {
        TwoFloat::new_add(self.nodes[i], self.nodes_lo[i])
    }

    pub fn weight_dd(&self, i: usize) -> TwoFloat {
        TwoFloat::new_add(self.weights[i], self.weights_lo[i])
    }

    /// `sum_i w_i f(x_i)`, i.e. the integral of `f` against the rule's weight.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }

    /// Double-double version of [`integrate`](Self::integrate).
    pub fn integrate_dd<F: Fn(TwoFloat) -> TwoFloat>(&self, f: F) -> TwoFloat {
        (0..self.order).fold(TwoFloat::from(0.0), |acc, i| {
            acc + self.weight_dd(i) * f(self.node_dd(i))
        })
    }
}

type Cache = Mutex<HashMap<(RuleKind, usize), Arc<QuadratureRule>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(kind: RuleKind, order: usize) -> Result<Arc<QuadratureRule>> {
    if let Some(rule) = cache().lock().unwrap().get(&(kind, order)) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(match kind {
        RuleKind::Hermite => build_hermite(order)?,
        RuleKind::Laguerre => build_laguerre(order)?,
    });
    let mut guard = cache().lock().unwrap();
    Ok(Arc::clone(guard.entry((kind, order)).or_insert(rule)))
}

/// Gauss–Hermite rule for `∫ f(x) e^{-x²} dx` over the real line.
pub fn gauss_hermite(order: usize) -> Result<Arc<QuadratureRule>> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::QuadratureOrder {
            order,
            reason: format!("Gauss-Hermite order must lie in 1..={MAX_ORDER}"),
        });
    }
    cached(RuleKind::Hermite, order)
}

/// Gauss–Laguerre rule for `∫ f(u) e^{-u} du` over `[0, ∞)`.
pub fn gauss_laguerre(order: usize) -> Result<Arc<QuadratureRule>> {
    if order == 0 || order > MAX_LAGUERRE_ORDER {
        return Err(Error::QuadratureOrder {
            order,
            reason: format!(
                "Gauss-Laguerre order must lie in 1..={MAX_LAGUERRE_ORDER} (weights underflow beyond)"
            ),
        });
    }
    cached(RuleKind::Laguerre, order)
}


fn dd_ratio_sqrt(num: f64, den: f64) -> TwoFloat {
    div(dd(num), dd(den)).sqrt()
}

fn jacobi_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = diag[i];
    }
    for (i, &b) in off.iter().enumerate() {
        j[(i, i + 1)] = b;
        j[(i + 1, i)] = b;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(j).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

struct HermiteRecurrence {
    // p_{k+1} = a_k x p_k - b_k p_{k-1}
    a: Vec<TwoFloat>,
    b: Vec<TwoFloat>,
    p0: TwoFloat,
}

impl HermiteRecurrence {
    fn new(order: usize) -> Self {
        let a = (0..order).map(|k| dd_ratio_sqrt(2.0, (k + 1) as f64)).collect();
        let b = (0..order)
            .map(|k| dd_ratio_sqrt(k as f64, (k + 1) as f64))
            .collect();
        // pi^{-1/4}
        let p0 = recip(twofloat::consts::PI.sqrt().sqrt());
        Self { a, b, p0 }
    }

    /// Returns (p_{n-1}(x), p_n(x), sum_{k<n} p_k(x)^2).
    fn eval(&self, n: usize, x: TwoFloat) -> (TwoFloat, TwoFloat, TwoFloat) {
        let mut prev = dd(0.0);
        let mut cur = self.p0;
        let mut sumsq = dd(0.0);
        for k in 0..n {
            sumsq += cur * cur;
            let next = self.a[k] * x * cur - self.b[k] * prev;
            prev = cur;
            cur = next;
        }
        (prev, cur, sumsq)
    }
}

fn build_hermite(order: usize) -> Result<QuadratureRule> {
    let off: Vec<f64> = (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let guesses = jacobi_eigenvalues(&vec![0.0; order], &off);
    let rec = HermiteRecurrence::new(order);
    let deriv_scale = dd(2.0 * order as f64).sqrt();

    let mut nodes = vec![dd(0.0); order];
    let mut weights = vec![dd(0.0); order];
    // Refine the non-negative half and mirror it.
    for i in order / 2..order {
        let mut x = dd(guesses[i]);
        if order % 2 == 1 && i == order / 2 {
            x = dd(0.0);
        } else {
            for _ in 0..NEWTON_STEPS {
                let (pm1, pn, _) = rec.eval(order, x);
                let deriv = deriv_scale * pm1;
                x -= div(pn, deriv);
            }
        }
        let (_, _, sumsq) = rec.eval(order, x);
        nodes[i] = x;
        weights[i] = recip(sumsq);
        let mirror = order - 1 - i;
        nodes[mirror] = -x;
        weights[mirror] = weights[i];
    }
    finish(RuleKind::Hermite, order, &nodes, &weights)
}

fn build_laguerre(order: usize) -> Result<QuadratureRule> {
    let diag: Vec<f64> = (0..order).map(|k| (2 * k + 1) as f64).collect();
    let off: Vec<f64> = (1..order).map(|k| k as f64).collect();
    let guesses = jacobi_eigenvalues(&diag, &off);

    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for &g in &guesses {
        let mut u = dd(g);
        for _ in 0..NEWTON_STEPS {
            let (lm1, ln, _, _) = laguerre_eval(order, u);
            // u L_n' = n (L_n - L_{n-1})
            let deriv = div(dd(order as f64) * (ln - lm1), u);
            u -= div(ln, deriv);
        }
        let (_, _, sumsq, shift) = laguerre_eval(order, u);
        // sum_k L_k^2 was accumulated in units of 2^(2*shift)
        let unscale = dd(2f64.powi(-shift));
        let w = recip(sumsq) * unscale * unscale;
        nodes.push(u);
        weights.push(w);
    }
    finish(RuleKind::Laguerre, order, &nodes, &weights)
}

/// Orthonormal Laguerre recurrence with power-of-two rescaling. Returns
/// (L_{n-1}, L_n, sum_{k<n} L_k^2, shift) where the first three are scaled by
/// 2^{-shift} (the sum by 2^{-2 shift}).
fn laguerre_eval(n: usize, u: TwoFloat) -> (TwoFloat, TwoFloat, TwoFloat, i32) {
    const BIG: f64 = 1e150;
    const STEP: i32 = 498; // 2^498 ~ 1e150
    let mut prev = dd(0.0);
    let mut cur = dd(1.0);
    let mut sumsq = dd(0.0);
    let mut shift = 0i32;
    for k in 0..n {
        sumsq += cur * cur;
        let kf = k as f64;
        let next = div((dd(2.0 * kf + 1.0) - u) * cur - dd(kf) * prev, dd(kf + 1.0));
        prev = cur;
        cur = next;
        if cur.hi().abs() > BIG {
            let f = dd(2f64.powi(-STEP));
            cur *= f;
            prev *= f;
            sumsq *= f * f;
            shift += STEP;
        }
    }
    (prev, cur, sumsq, shift)
}

fn finish(
    kind: RuleKind,
    order: usize,
    nodes: &[TwoFloat],
    weights: &[TwoFloat],
) -> Result<QuadratureRule> {
    let split = |v: &[TwoFloat]| -> (Vec<f64>, Vec<f64>) {
        v.iter().map(|t| (t.hi(), t.lo())).unzip()
    };
    let (nodes_hi, nodes_lo) = split(nodes);
    let (weights_hi, weights_lo) = split(weights);
    let ok = nodes_hi.iter().all(|x| x.is_finite())
        && weights_hi.iter().all(|w| w.is_finite() && *w > 0.0)
        && nodes_hi.windows(2).all(|p| p[0] < p[1]);
    if !ok {
        return Err(Error::QuadratureOrder {
            order,
            reason: "rule construction lost positivity or ordering".into(),
        });
    }
    Ok(QuadratureRule {
        kind,
        order,
        nodes: nodes_hi,
        weights: weights_hi,
        nodes_lo,
        weights_lo,
    })
}

/// Product rule for `(1/π) ∫ f(α) e^{-|α|²} d²α` over the complex plane.
///
/// Radial nodes come from Gauss–Laguerre in `u = |α|²`, angular nodes are
/// uniform on `[0, 2π)`. The Gaussian factor is absorbed into the weights, so
/// `integrate(|α| α^n conj(α)^m)` returns `n! δ_{nm}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarRule {
    pub radial_order: usize,
    pub angular_order: usize,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl PolarRule {
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&a, &w)| f(a) * w)
            .sum()
    }
}

pub fn polar_rule(radial_order: usize, angular_order: usize) -> Result<PolarRule> {
    if angular_order == 0 {
        return Err(Error::QuadratureOrder {
            order: angular_order,
            reason: "angular order must be at least 1".into(),
        });
    }
    let radial = gauss_laguerre(radial_order)?;
    let mut nodes = Vec::with_capacity(radial_order * angular_order);
    let mut weights = Vec::with_capacity(radial_order * angular_order);
    for (&u, &w) in radial.nodes.iter().zip(&radial.weights) {
        let r = u.sqrt();
        for k in 0..angular_order {
            let theta = 2.0 * PI * k as f64 / angular_order as f64;
            nodes.push(Complex64::from_polar(r, theta));
            weights.push(w / angular_order as f64);
        }
    }
    Ok(PolarRule {
        radial_order,
        angular_order,
        nodes,
        weights,
    })
}
