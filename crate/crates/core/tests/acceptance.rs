//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pseudoboson::coherent::{
    biovercompleteness_residual, coherent_series, converged_coherent, displaced_vacuum,
    eigen_residual,
};
use pseudoboson::dynamics::{hamiltonian, temporal_stability_residual};
use pseudoboson::fock::{
    build_bi_basis_escalating, metric, pseudo_adjoint_residuals, BiBasis, DEFAULT_TAIL_TOL,
};
use pseudoboson::ladder::{
    alternate_family, build_ladder_pair, number_operators, standard_family, FamilyCoefficients,
    LadderPair, DEFAULT_DIM,
};
use pseudoboson::linalg::{braket, cplx};
use pseudoboson::poly::{biortho_integral, default_quad_order, p_poly, q_poly};
use pseudoboson::position::{cross_picture_residual, parity_residual, Which};
use pseudoboson::quadrature::polar_rule;

const S_ALL: [f64; 5] = [0.0, 0.5, -0.5, 0.9, -0.9];
const S_MID: [f64; 3] = [0.0, 0.5, -0.5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `H_n` coefficients, ascending powers, from `H_n = 2x H_{n-1} - 2(n-1) H_{n-2}`.
fn hermite_integer(n_max: usize) -> Vec<Vec<i64>> {
    let mut h: Vec<Vec<i64>> = vec![vec![1], vec![0, 2]];
    for n in 2..=n_max {
        let mut next = vec![0i64; n + 1];
        for (k, c) in h[n - 1].iter().enumerate() {
            next[k + 1] += 2 * c;
        }
        for (k, c) in h[n - 2].iter().enumerate() {
            next[k] -= 2 * (n as i64 - 1) * c;
        }
        h.push(next);
    }
    h.truncate(n_max + 1);
    h
}

fn hermite_recovery() -> Outcome {
    let start = Instant::now();
    let oracle = hermite_integer(20);
    let mut mismatches = 0;
    for (n, h) in oracle.iter().enumerate() {
        for p in [p_poly(n, 0.0).unwrap(), q_poly(n, 0.0).unwrap()] {
            let c = p.coeffs();
            let exact = c.len() == h.len() && c.iter().zip(h).all(|(a, b)| *a == *b as f64);
            if !exact {
                mismatches += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && secs < 1.0,
        format!("{mismatches} mismatching polynomials for n <= 20, {secs:.3} s"),
    )
}

fn low_order_polynomials() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let x: f64 = rng.random_range(-3.0..3.0);
        let s: f64 = rng.random_range(-0.9..0.9);
        let d = 1.0 - s + s * s;
        let want = [
            2.0 / (1.0 - s) * x,
            4.0 / ((1.0 - s) * (1.0 - s)) * x * x + 2.0 * (s - s * s - 1.0) / (1.0 - s),
            2.0 / d * x,
            4.0 / (d * d) * x * x + 2.0 * (s - 1.0) / d,
        ];
        let got = [
            p_poly(1, s).unwrap().eval(x),
            p_poly(2, s).unwrap().eval(x),
            q_poly(1, s).unwrap().eval(x),
            q_poly(2, s).unwrap().eval(x),
        ];
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs() / w.abs().max(1.0));
        }
    }
    outcome(worst < 1e-12, format!("max relative deviation {worst:.2e} over 10 (x, s) pairs"))
}

fn polynomial_biortho() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &s in &S_ALL {
        let norm = (PI * (1.0 - s) * (1.0 - s + s * s)).sqrt();
        for n in 0..=12 {
            let scale = 2f64.powi(n as i32) * factorial(n);
            for m in 0..=12 {
                let want = if n == m { norm * scale } else { 0.0 };
                let got = biortho_integral(n, m, s, default_quad_order(n, m)).unwrap();
                worst = worst.max((got - want).abs() / scale);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-10 && secs < 5.0,
        format!("max scaled residual {worst:.2e}, {secs:.2} s"),
    )
}

struct Setup {
    s: f64,
    pair: LadderPair,
    basis: BiBasis,
}

fn bases(family: fn(f64) -> pseudoboson::Result<FamilyCoefficients>, ss: &[f64], n_max: usize) -> Vec<Setup> {
    ss.iter()
        .map(|&s| {
            let (pair, basis) =
                build_bi_basis_escalating(family(s).unwrap(), DEFAULT_DIM, n_max, DEFAULT_TAIL_TOL)
                    .unwrap();
            Setup { s, pair, basis }
        })
        .collect()
}

fn dims(setups: &[Setup]) -> String {
    setups
        .iter()
        .map(|b| format!("s={}:{}", b.s, b.basis.dim()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Bi-orthonormality, plus the vacuum recursion `c_2/c_0 = -(u2/u1)/√2`
/// checked against the canonical coefficients.
fn fock_biortho(setups: &[Setup]) -> Outcome {
    let mut worst = 0.0f64;
    let mut vacuum = 0.0f64;
    for b in setups {
        worst = worst.max(b.basis.biortho_residual().0);
        let c = b.basis.psis[0].coeffs.clone();
        let ratio = (c[2] / c[0]).re;
        let want = -(b.pair.coeffs.u2 / b.pair.coeffs.u1) / 2f64.sqrt();
        vacuum = vacuum.max((ratio - want).abs());
    }
    outcome(
        worst < 1e-10 && vacuum < 1e-14,
        format!(
            "max |<psi_n|phi_m> - delta| = {worst:.2e}, vacuum ratio {vacuum:.1e}, dims {}",
            dims(setups)
        ),
    )
}

fn metric_relations(setups: &[Setup]) -> Outcome {
    let mut action = 0.0f64;
    let mut adjoint = 0.0f64;
    for b in setups {
        let eta = metric(&b.basis);
        action = action.max(eta.action_residual());
        let pa = pseudo_adjoint_residuals(&b.pair, &eta, &b.basis);
        adjoint = adjoint.max(pa.btilde).max(pa.bprime);
    }
    outcome(
        action < 1e-9 && adjoint < 1e-8,
        format!("max |eta psi_n - phi_n| = {action:.2e}, pseudo-adjoint {adjoint:.2e}"),
    )
}

fn algebra(family: fn(f64) -> pseudoboson::Result<FamilyCoefficients>, ss: &[f64]) -> Outcome {
    let mut worst = [0.0f64; 3];
    for &s in ss {
        let pair = build_ladder_pair(family(s).unwrap(), DEFAULT_DIM).unwrap();
        let (lower, raise) = number_operators(&pair).algebra_residuals(&pair);
        worst[0] = worst[0].max(pair.commutator_residual);
        worst[1] = worst[1].max(lower);
        worst[2] = worst[2].max(raise);
    }
    outcome(
        worst.iter().all(|r| *r < 1e-12),
        format!(
            "dim {DEFAULT_DIM}: [b,b~]-1 {:.2e}, [b,N]-b {:.2e}, [b~,N]+b~ {:.2e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn alphas() -> [Complex64; 4] {
    [cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(1.0, 1.0), cplx(2.0, 0.0)]
}

/// Eigen and displacement residuals; at `s = 0` the ket is also compared with
/// Glauber's coefficients `e^{-|α|²/2} αⁿ/√n!`.
fn coherent_states() -> Outcome {
    let mut eigen = 0.0f64;
    let mut disp = 0.0f64;
    let mut glauber = 0.0f64;
    for &s in &S_MID {
        for alpha in alphas() {
            let (pair, basis, cp) =
                converged_coherent(standard_family(s).unwrap(), DEFAULT_DIM, alpha, 0, DEFAULT_TAIL_TOL, 1e-8)
                    .unwrap();
            let (rk, rd) = eigen_residual(&pair, &cp);
            eigen = eigen.max(rk).max(rd);
            let d = displaced_vacuum(alpha, &pair, &basis.psis[0]).unwrap();
            disp = disp.max((&d.coeffs - &cp.ket.coeffs).norm());
            if s == 0.0 {
                let mut c = cplx((-0.5 * alpha.norm_sqr()).exp(), 0.0);
                for n in 0..=basis.n_max {
                    if n > 0 {
                        c = c * alpha / (n as f64).sqrt();
                    }
                    glauber = glauber.max((cp.ket.coeffs[n] - c).norm());
                }
            }
        }
    }
    outcome(
        eigen < 1e-8 && disp < 1e-7 && glauber < 1e-15,
        format!("eigen {eigen:.2e}, |D(a)|0> - series| {disp:.2e}, Glauber {glauber:.1e}"),
    )
}

/// Library value from the Gram series, and an explicit realization that
/// builds `|α⟩`, `|α⟩'` at every node.
fn biovercompleteness() -> Outcome {
    let start = Instant::now();
    let n_max = 12;
    let (k_r, k_theta) = (16, 32);
    let rule = polar_rule(k_r, k_theta).unwrap();
    let mut library = 0.0f64;
    let mut explicit = 0.0f64;
    for b in bases(standard_family, &S_ALL, n_max) {
        library = library.max(biovercompleteness_residual(&b.basis, k_r, k_theta).unwrap().max());
        let n = n_max + 1;
        let mut acc = vec![cplx(0.0, 0.0); n * n];
        for (alpha, w) in rule.nodes.iter().zip(&rule.weights) {
            let cp = coherent_series(*alpha, &b.basis, n_max).unwrap();
            let weight = w * alpha.norm_sqr().exp();
            let left: Vec<Complex64> = (0..n).map(|m| braket(&b.basis.psis[m].coeffs, &cp.dual.coeffs)).collect();
            let right: Vec<Complex64> = (0..n).map(|k| braket(&cp.ket.coeffs, &b.basis.phis[k].coeffs)).collect();
            for m in 0..n {
                for k in 0..n {
                    acc[m * n + k] += left[m] * right[k] * weight;
                }
            }
        }
        let mut r = 0.0f64;
        for m in 0..n {
            for k in 0..n {
                let want = if m == k { 1.0 } else { 0.0 };
                r = r.max((acc[m * n + k] - want).norm());
            }
        }
        explicit = explicit.max(r);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        library < 1e-10 && explicit < 1e-10 && secs < 10.0,
        format!("Gram series {library:.2e}, explicit states {explicit:.2e}, {secs:.2} s"),
    )
}

fn temporal_stability() -> Outcome {
    let times = [PI / 4.0, PI / 2.0, PI, 2.0 * PI];
    let mut psi = 0.0f64;
    let mut phi = 0.0f64;
    let mut binorm = 0.0f64;
    for &s in &S_MID {
        for alpha in [cplx(1.0, 0.0), cplx(1.0, 1.0)] {
            let (pair, basis, _) =
                converged_coherent(standard_family(s).unwrap(), DEFAULT_DIM, alpha, 0, DEFAULT_TAIL_TOL, 1e-8)
                    .unwrap();
            for omega in [1.0, 2.0] {
                let h = hamiltonian(&pair, omega).unwrap();
                for wt in times {
                    let r = temporal_stability_residual(&h, &basis, alpha, wt / omega).unwrap();
                    psi = psi.max(r.psi);
                    phi = phi.max(r.phi);
                    binorm = binorm.max(r.binorm);
                }
            }
        }
    }
    outcome(
        psi < 1e-7 && phi < 1e-7,
        format!("psi {psi:.2e}, phi {phi:.2e}, bi-normalization drift {binorm:.2e}"),
    )
}

fn pt_symmetry(setups: &[Setup]) -> Outcome {
    let mut pt = 0.0f64;
    let mut imag = 0.0f64;
    let mut parity = 0.0f64;
    let xs: Vec<f64> = (1..=25).map(|i| 0.15 * i as f64).collect();
    for b in setups {
        let h = hamiltonian(&b.pair, 1.0).unwrap();
        pt = pt.max(h.parity_residual());
        imag = imag.max(h.imaginary_part());
        parity = parity.max(parity_residual(b.s, 10, &xs).unwrap());
    }
    outcome(
        pt < 1e-12 && imag == 0.0 && parity < 1e-12,
        format!("|PHP - H| {pt:.1e}, |Im H| {imag:.1e}, psi_n(-x) parity {parity:.1e}"),
    )
}

fn cross_picture() -> Outcome {
    let xs: Vec<f64> = (0..50).map(|i| -4.0 + 8.0 * i as f64 / 49.0).collect();
    let mut worst = 0.0f64;
    let mut dims = Vec::new();
    for s in [0.5, -0.5] {
        let (_, basis) =
            build_bi_basis_escalating(standard_family(s).unwrap(), 128, 10, DEFAULT_TAIL_TOL).unwrap();
        dims.push(basis.dim());
        for which in [Which::Psi, Which::Phi] {
            worst = worst.max(cross_picture_residual(&basis, s, which, 10, &xs).unwrap());
        }
    }
    outcome(worst < 1e-8, format!("max deviation {worst:.2e} at 50 points, dims {dims:?}"))
}

fn alternate_family_checks() -> Outcome {
    let setups = bases(alternate_family, &S_MID, 20);
    let c4 = fock_biortho(&setups);
    let c5 = metric_relations(&setups);
    let c6 = algebra(alternate_family, &S_MID);
    let rejected = [0.9, -0.9].iter().all(|&s| alternate_family(s).is_err());
    outcome(
        c4.pass && c5.pass && c6.pass && rejected,
        format!(
            "[4] {} | [5] {} | [6] {} | s = +-0.9 rejected: {rejected}",
            c4.detail, c5.detail, c6.detail
        ),
    )
}

fn main() {
    let start = Instant::now();
    let standard = bases(standard_family, &S_ALL, 20);
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "Hermite recovery", hermite_recovery()),
        (2, "low-order polynomials", low_order_polynomials()),
        (3, "polynomial bi-orthogonality", polynomial_biortho()),
        (4, "Fock bi-orthonormality", fock_biortho(&standard)),
        (5, "metric relations", metric_relations(&standard)),
        (6, "commutator and number algebra", algebra(standard_family, &S_ALL)),
        (7, "coherent eigenvalue and displacement", coherent_states()),
        (8, "bi-overcompleteness", biovercompleteness()),
        (9, "temporal stability", temporal_stability()),
        (10, "PT symmetry", pt_symmetry(&standard)),
        (11, "cross-picture consistency", cross_picture()),
        (12, "alternate family", alternate_family_checks()),
    ];
    let mut failed = 0;
    for (id, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} [{id:2}] {name}: {}", o.detail);
    }
    println!(
        "acceptance: {}/{} passed in {:.1} s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
