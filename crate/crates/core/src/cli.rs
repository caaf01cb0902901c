//! Command-line front end: `verify`, `tabulate`, `sample` and `evolve`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::coherent::{
    biovercompleteness_residual, coherent_series, converged_coherent, displaced_vacuum,
    eigen_residual, poisson_tail, CoherentPair,
};
use crate::dynamics::{default_times, hamiltonian, temporal_stability_residual};
use crate::error::{Error, Result};
use crate::fock::{
    build_bi_basis_escalating, metric, pseudo_adjoint_residuals, resolution_of_identity, BiBasis,
    BIORTHO_TOL, MAX_DIM, METRIC_TOL,
};
use crate::ladder::{
    alternate_family, build_ladder_pair, number_operators, standard_family, FamilyCoefficients,
    LadderPair, TruncationDim, COMMUTATOR_TOL,
};
use crate::linalg::cplx;
use crate::poly::{
    biortho_expected, biortho_integral, check_s, derivative_relation_residual, hermite_poly,
    p_poly, q_poly, Family,
};
use crate::position::{
    annihilation_fd_residual, binormalization_product_residual, coherent_profile,
    cross_picture_residual, parity_residual, position_overlap, sample, weight_identity_residual,
    FockWavefunction, Wavefunction, Which,
};
use crate::quadrature::MAX_ORDER;

const ALGEBRA_TOL: f64 = 1e-12;
const PSEUDO_ADJOINT_TOL: f64 = 1e-8;
const EIGEN_TOL: f64 = 1e-9;
const POLY_TOL: f64 = 1e-10;
const COHERENT_EIGEN_TOL: f64 = 1e-8;
const DISPLACEMENT_TOL: f64 = 1e-7;
const STABILITY_TOL: f64 = 1e-7;
const CROSS_PICTURE_TOL: f64 = 1e-8;
/// Largest `n` used by the position-space and overcompleteness checks.
const POSITION_N_MAX: usize = 10;
const OVERCOMPLETE_N_MAX: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "pseudoboson", version, about = "Pseudo-boson ladder operators on truncated Fock spaces")]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long, global = true, default_value_t = 0.5, allow_negative_numbers = true)]
    pub s: f64,
    /// standard | alternate | custom:u1,u2,v1,v2
    #[arg(long, global = true, default_value = "standard", allow_hyphen_values = true)]
    pub family: String,
    #[arg(long, global = true, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, global = true, default_value_t = 16)]
    pub nmax: usize,
    #[arg(long, global = true, default_value_t = 48)]
    pub quad_order: usize,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tail_tol: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub omega: f64,
    /// Coherent-state label as "re,im".
    #[arg(long, global = true, default_value = "1,0", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Algebra,
    Fock,
    Poly,
    Coherent,
    Dynamics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    Poly,
    Gram,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Fock,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichArg {
    Psi,
    Phi,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run residual checks and report pass/fail per check.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Write polynomial coefficients, the Gram matrix or a coherent-state residual sweep.
    Tabulate {
        #[arg(long, value_enum, default_value = "poly")]
        what: Table,
        /// Same as `--what coherent`.
        #[arg(long)]
        coherent: bool,
    },
    /// Sample a closed-form wave function on a grid.
    Sample {
        #[arg(long, value_enum, default_value = "fock")]
        target: Target,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, value_enum, default_value = "psi")]
        which: WhichArg,
        /// "xmin,xmax,count"
        #[arg(long, default_value = "-5,5,101", allow_hyphen_values = true)]
        grid: String,
    },
    /// Evolve the coherent pair under `H` and compare with `α e^{-iωt}`.
    Evolve {
        /// Comma-separated times; defaults to ωt ∈ {0, π/4, π/2, π, 2π}.
        #[arg(long, allow_hyphen_values = true)]
        times: Option<String>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("check `{check}`: {source}")]
    Check {
        check: String,
        #[source]
        source: Error,
    },
    #[error(transparent)]
    Lib(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FamilySpec {
    Standard,
    Alternate,
    Custom { u1: f64, u2: f64, v1: f64, v2: f64 },
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("{what}: cannot parse `{t}`")))
        })
        .collect()
}

pub fn parse_family(text: &str) -> Result<FamilySpec> {
    match text {
        "standard" => Ok(FamilySpec::Standard),
        "alternate" => Ok(FamilySpec::Alternate),
        _ => {
            let body = text.strip_prefix("custom:").ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "family `{text}`: expected standard, alternate or custom:u1,u2,v1,v2"
                ))
            })?;
            match parse_list(body, "family")?.as_slice() {
                &[u1, u2, v1, v2] => Ok(FamilySpec::Custom { u1, u2, v1, v2 }),
                _ => Err(Error::InvalidArgument(
                    "custom family needs four coefficients".into(),
                )),
            }
        }
    }
}

pub fn parse_alpha(text: &str) -> Result<Complex64> {
    let v = parse_list(text, "alpha")?;
    let z = match *v.as_slice() {
        [re] => cplx(re, 0.0),
        [re, im] => cplx(re, im),
        _ => return Err(Error::InvalidArgument("alpha must be \"re,im\"".into())),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("alpha"));
    }
    Ok(z)
}

/// Validated run configuration; echoed into every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub s: f64,
    pub family: FamilySpec,
    pub coefficients: FamilyCoefficients,
    pub dim: usize,
    pub n_max: usize,
    pub quad_order: usize,
    pub tail_tol: f64,
    pub omega: f64,
    pub alpha: [f64; 2],
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(args: &ConfigArgs, default_format: Format) -> Result<Self> {
        check_s(args.s)?;
        let family = parse_family(&args.family)?;
        let coefficients = match family {
            FamilySpec::Standard => standard_family(args.s)?,
            FamilySpec::Alternate => alternate_family(args.s)?,
            FamilySpec::Custom { u1, u2, v1, v2 } => FamilyCoefficients::new(u1, u2, v1, v2)?,
        };
        TruncationDim::new(args.dim)?;
        if args.dim > MAX_DIM {
            return Err(Error::Dimension {
                dim: args.dim,
                reason: format!("exceeds the maximum {MAX_DIM}"),
            });
        }
        if args.quad_order == 0 || args.quad_order > MAX_ORDER {
            return Err(Error::QuadratureOrder {
                order: args.quad_order,
                reason: format!("must lie in 1..={MAX_ORDER}"),
            });
        }
        if !(args.tail_tol > 0.0 && args.tail_tol < 1.0) {
            return Err(Error::ParameterDomain {
                name: "tail_tol",
                value: args.tail_tol,
                domain: "(0, 1)",
            });
        }
        if !(args.omega > 0.0 && args.omega.is_finite()) {
            return Err(Error::ParameterDomain {
                name: "omega",
                value: args.omega,
                domain: "(0, inf)",
            });
        }
        let alpha = parse_alpha(&args.alpha)?;
        Ok(Self {
            s: args.s,
            family,
            coefficients,
            dim: args.dim,
            n_max: args.nmax,
            quad_order: args.quad_order,
            tail_tol: args.tail_tol,
            omega: args.omega,
            alpha: [alpha.re, alpha.im],
            format: args.format.unwrap_or(default_format),
            out: args.out.clone(),
        })
    }

    pub fn alpha(&self) -> Complex64 {
        cplx(self.alpha[0], self.alpha[1])
    }

    fn is_standard(&self) -> bool {
        self.family == FamilySpec::Standard
    }

    fn basis(&self, n_max: usize) -> Result<(LadderPair, BiBasis)> {
        build_bi_basis_escalating(self.coefficients, self.dim, n_max, self.tail_tol)
    }

    /// Basis with at least `n_max` levels and enough series terms for the
    /// configured `α`.
    fn coherent(&self) -> Result<(LadderPair, BiBasis, CoherentPair)> {
        converged_coherent(
            self.coefficients,
            self.dim,
            self.alpha(),
            self.n_max,
            self.tail_tol,
            COHERENT_EIGEN_TOL,
        )
    }
}

#[derive(Debug, Clone)]
enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Text(t) => json!(t),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// Header plus rows, rendered as CSV (config echoed in `#` comment lines) or
/// as a JSON object.
struct Output {
    key: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    extra: Vec<(&'static str, Value)>,
}

impl Output {
    fn new(key: &'static str, header: &[&'static str]) -> Self {
        Self {
            key,
            header: header.to_vec(),
            rows: Vec::new(),
            extra: Vec::new(),
        }
    }

    fn render(&self, config: &RunConfig) -> String {
        let config_json = serde_json::to_value(config).expect("config serializes");
        match config.format {
            Format::Csv => {
                let mut out = format!("# config: {config_json}\n");
                for (k, v) in &self.extra {
                    out += &format!("# {k}: {v}\n");
                }
                out += &self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::csv).collect();
                    out += &line.join(",");
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .header
                            .iter()
                            .zip(row)
                            .map(|(h, c)| (h.to_string(), c.json()))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut top = Map::new();
                top.insert("config".into(), config_json);
                for (k, v) in &self.extra {
                    top.insert(k.to_string(), v.clone());
                }
                top.insert(self.key.into(), Value::Array(rows));
                let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("json");
                text.push('\n');
                text
            }
        }
    }
}

fn emit(config: &RunConfig, output: &Output) -> Result<()> {
    let text = output.render(config);
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Default)]
struct Checks(Vec<CheckResult>);

impl Checks {
    fn record(&mut self, name: &str, residual: f64, tol: f64) {
        self.0.push(CheckResult {
            check: name.to_string(),
            residual,
            tol,
            pass: residual.is_finite() && residual <= tol,
        });
    }

    fn run(&mut self, name: &str, tol: f64, f: impl FnOnce() -> Result<f64>) -> std::result::Result<(), CliError> {
        let r = named(name, f())?;
        self.record(name, r, tol);
        Ok(())
    }
}

fn named<T>(check: &str, r: Result<T>) -> std::result::Result<T, CliError> {
    r.map_err(|source| CliError::Check {
        check: check.to_string(),
        source,
    })
}

fn algebra_checks(cfg: &RunConfig, checks: &mut Checks) -> std::result::Result<(), CliError> {
    let pair = named("algebra.build", build_ladder_pair(cfg.coefficients, cfg.dim))?;
    let c = cfg.coefficients;
    checks.record("algebra.constraint", (c.commutator_constraint() - 1.0).abs(), 1e-14);
    checks.record("algebra.commutator", pair.commutator_residual, COMMUTATOR_TOL);
    let num = number_operators(&pair);
    let (lower, raise) = num.algebra_residuals(&pair);
    checks.record("algebra.number.lowering", lower, ALGEBRA_TOL);
    checks.record("algebra.number.raising", raise, ALGEBRA_TOL);
    checks.record("algebra.number.parity_leak", num.parity_leak(), ALGEBRA_TOL);
    Ok(())
}

fn fock_checks(cfg: &RunConfig, checks: &mut Checks) -> std::result::Result<(), CliError> {
    let (pair, basis) = named("fock.build", cfg.basis(cfg.n_max))?;
    let vacuum_tail = basis.psis[0].tail_mass.max(basis.phis[0].tail_mass);
    checks.record("fock.vacuum_tail", vacuum_tail, cfg.tail_tol);
    checks.record("fock.biorthonormality", basis.biortho_residual().0, BIORTHO_TOL);
    checks.record("fock.parity_leak", basis.parity_leak(), ALGEBRA_TOL);
    let res = resolution_of_identity(&basis);
    checks.record("fock.resolution.bi_basis", res.bi_basis, BIORTHO_TOL);
    checks.record("fock.resolution.mirrored", res.mirrored, BIORTHO_TOL);
    let eta = metric(&basis);
    checks.record("fock.metric.action", eta.action_residual(), METRIC_TOL);
    checks.record("fock.metric.inverse_action", eta.inverse_action_residual(), METRIC_TOL);
    checks.record("fock.metric.inverse", eta.inverse_residual(), METRIC_TOL);
    checks.record("fock.metric.hermiticity", eta.hermiticity_residual(), ALGEBRA_TOL);
    checks.record(
        "fock.metric.positivity",
        (1.0 - eta.trusted_min_eigenvalue()).abs(),
        METRIC_TOL,
    );
    let pa = pseudo_adjoint_residuals(&pair, &eta, &basis);
    checks.record("fock.pseudo_adjoint.btilde", pa.btilde, PSEUDO_ADJOINT_TOL);
    checks.record("fock.pseudo_adjoint.bprime", pa.bprime, PSEUDO_ADJOINT_TOL);
    checks.record("fock.pseudo_adjoint.number", pa.number, PSEUDO_ADJOINT_TOL);
    checks.record("fock.pseudo_adjoint.number_prime", pa.number_prime, PSEUDO_ADJOINT_TOL);
    checks.record("fock.projector.b", pa.projector_b, PSEUDO_ADJOINT_TOL);
    checks.record("fock.projector.bprime", pa.projector_bprime, PSEUDO_ADJOINT_TOL);
    let basis = named("fock.spectral_build", spectral_basis(cfg, pair, basis))?.1;
    let (np, nf) = basis.number_residuals();
    checks.record("fock.number_eigen.psi", np, EIGEN_TOL);
    checks.record("fock.number_eigen.phi", nf, EIGEN_TOL);
    Ok(())
}

/// Doubles the truncation while the number-operator eigen residuals keep
/// improving by at least a factor of ten and miss [`EIGEN_TOL`].
fn spectral_basis(cfg: &RunConfig, pair: LadderPair, basis: BiBasis) -> Result<(LadderPair, BiBasis)> {
    let worst = |b: &BiBasis| {
        let (p, f) = b.number_residuals();
        p.max(f)
    };
    let mut current = (pair, basis);
    let mut r = worst(&current.1);
    while r > EIGEN_TOL && current.1.dim() * 2 <= MAX_DIM / 2 {
        let next = build_bi_basis_escalating(
            cfg.coefficients,
            current.1.dim() * 2,
            current.1.n_max,
            cfg.tail_tol,
        )?;
        let rn = worst(&next.1);
        if rn > 0.1 * r {
            break;
        }
        current = next;
        r = rn;
    }
    Ok(current)
}

fn poly_checks(cfg: &RunConfig, checks: &mut Checks) -> std::result::Result<(), CliError> {
    let s = cfg.s;
    let n_max = cfg.n_max;
    checks.run("poly.biorthogonality", POLY_TOL, || {
        let mut worst = 0.0f64;
        for n in 0..=n_max {
            let scale = biortho_expected(n, n, 0.0) / std::f64::consts::PI.sqrt();
            for m in 0..=n_max {
                let v = biortho_integral(n, m, s, cfg.quad_order)?;
                worst = worst.max((v - biortho_expected(n, m, s)).abs() / scale);
            }
        }
        Ok(worst)
    })?;
    checks.run("poly.hermite_limit", 0.0, || {
        let mut worst = 0.0f64;
        for n in 0..=n_max {
            let h = hermite_poly(n).coeffs();
            for p in [p_poly(n, 0.0)?, q_poly(n, 0.0)?] {
                for (a, b) in p.coeffs().iter().zip(&h) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        Ok(worst)
    })?;
    checks.run("poly.derivative_relation", POLY_TOL, || {
        let mut worst = 0.0f64;
        for n in 1..=n_max.max(1) {
            let (rp, rq) = derivative_relation_residual(n, s)?;
            let scale = biortho_expected(n, n, 0.0).sqrt();
            worst = worst.max(rp.max(rq) / scale);
        }
        Ok(worst)
    })?;
    if !cfg.is_standard() {
        return Ok(());
    }
    let xs: Vec<f64> = (0..50).map(|i| -4.0 + 8.0 * i as f64 / 49.0).collect();
    let positive: Vec<f64> = xs.iter().copied().filter(|x| *x > 0.0).collect();
    let n_pos = n_max.min(POSITION_N_MAX);
    checks.run("poly.position.parity", ALGEBRA_TOL, || parity_residual(s, n_pos, &positive))?;
    checks.run("poly.position.weight_identity", ALGEBRA_TOL, || {
        weight_identity_residual(s, &xs)
    })?;
    for which in [Which::Psi, Which::Phi] {
        let name = format!("poly.position.fd_annihilation.{}", which.label());
        checks.run(&name, 1e-6, || annihilation_fd_residual(s, which, &xs, 1e-5))?;
    }
    let (_, basis) = named("poly.position.build", cfg.basis(n_pos))?;
    for which in [Which::Psi, Which::Phi] {
        let name = format!("poly.position.cross_picture.{}", which.label());
        checks.run(&name, CROSS_PICTURE_TOL, || {
            cross_picture_residual(&basis, s, which, n_pos, &xs)
        })?;
    }
    Ok(())
}

fn coherent_checks(cfg: &RunConfig, checks: &mut Checks) -> std::result::Result<(), CliError> {
    let alpha = cfg.alpha();
    let (pair, basis, cp) = named("coherent.build", cfg.coherent())?;
    let (rk, rd) = eigen_residual(&pair, &cp);
    checks.record("coherent.eigen.ket", rk, COHERENT_EIGEN_TOL);
    checks.record("coherent.eigen.dual", rd, COHERENT_EIGEN_TOL);
    checks.record("coherent.binormalization", (cp.binormalization() - 1.0).norm(), POLY_TOL);
    checks.run("coherent.displacement", DISPLACEMENT_TOL, || {
        let d = displaced_vacuum(alpha, &pair, &basis.psis[0])?;
        Ok((&d.coeffs - &cp.ket.coeffs).norm())
    })?;
    let n_oc = cfg.n_max.min(OVERCOMPLETE_N_MAX);
    let (_, small) = named("coherent.overcompleteness.build", cfg.basis(n_oc))?;
    let oc = named(
        "coherent.overcompleteness",
        biovercompleteness_residual(&small, n_oc + 4, 2 * n_oc + 8),
    )?;
    checks.record("coherent.overcompleteness.primary", oc.primary, POLY_TOL);
    checks.record("coherent.overcompleteness.mirrored", oc.mirrored, POLY_TOL);
    if cfg.is_standard() {
        checks.run("coherent.position.closed_form", ALGEBRA_TOL, || {
            binormalization_product_residual(alpha, cfg.s)
        })?;
        checks.run("coherent.position.overlap", CROSS_PICTURE_TOL, || {
            let psi = coherent_profile(alpha, cfg.s, Which::Psi)?;
            let phi = coherent_profile(alpha, cfg.s, Which::Phi)?;
            Ok((position_overlap(&psi, &phi, cfg.quad_order)? - 1.0).norm())
        })?;
    }
    Ok(())
}

fn dynamics_checks(cfg: &RunConfig, checks: &mut Checks) -> std::result::Result<(), CliError> {
    let alpha = cfg.alpha();
    let (pair, basis, _) = named("dynamics.build", cfg.coherent())?;
    let h = named("dynamics.hamiltonian", hamiltonian(&pair, cfg.omega))?;
    checks.record("dynamics.pt.parity", h.parity_residual(), ALGEBRA_TOL);
    checks.record("dynamics.pt.real", h.imaginary_part(), ALGEBRA_TOL);
    let eta = metric(&basis);
    checks.record(
        "dynamics.metric_realization",
        h.metric_crosscheck(&eta, &basis) / cfg.omega,
        EIGEN_TOL,
    );
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for t in default_times(cfg.omega) {
        let r = named("dynamics.stability", temporal_stability_residual(&h, &basis, alpha, t))?;
        worst = (worst.0.max(r.psi), worst.1.max(r.phi), worst.2.max(r.binorm));
    }
    checks.record("dynamics.stability.psi", worst.0, STABILITY_TOL);
    checks.record("dynamics.stability.phi", worst.1, STABILITY_TOL);
    checks.record("dynamics.stability.binorm", worst.2, STABILITY_TOL);
    let (pair, basis) = named("dynamics.spectral_build", spectral_basis(cfg, pair, basis))?;
    let h = named("dynamics.hamiltonian", hamiltonian(&pair, cfg.omega))?;
    let (ep, ef) = h.energy_residuals(&basis);
    checks.record("dynamics.energy.psi", ep, EIGEN_TOL);
    checks.record("dynamics.energy.phi", ef, EIGEN_TOL);
    Ok(())
}

/// Runs the selected suites; the results are sorted by check name.
pub fn verify(cfg: &RunConfig, suite: Suite) -> std::result::Result<Vec<CheckResult>, CliError> {
    let mut checks = Checks::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Algebra {
        algebra_checks(cfg, &mut checks)?;
    }
    if all || suite == Suite::Fock {
        fock_checks(cfg, &mut checks)?;
    }
    if all || suite == Suite::Poly {
        poly_checks(cfg, &mut checks)?;
    }
    if all || suite == Suite::Coherent {
        coherent_checks(cfg, &mut checks)?;
    }
    if all || suite == Suite::Dynamics {
        dynamics_checks(cfg, &mut checks)?;
    }
    let mut out = checks.0;
    out.sort_by(|a, b| a.check.cmp(&b.check));
    Ok(out)
}

fn cmd_verify(cfg: &RunConfig, suite: Suite) -> std::result::Result<bool, CliError> {
    let results = verify(cfg, suite)?;
    let pass = results.iter().all(|r| r.pass);
    let mut out = Output::new("checks", &["check", "residual", "tol", "pass"]);
    out.extra.push(("suite", serde_json::to_value(suite).expect("suite")));
    out.extra.push(("pass", json!(pass)));
    for r in results {
        out.rows.push(vec![
            Cell::Text(r.check),
            Cell::Num(r.residual),
            Cell::Num(r.tol),
            Cell::Bool(r.pass),
        ]);
    }
    emit(cfg, &out)?;
    Ok(pass)
}

fn cmd_tabulate(cfg: &RunConfig, what: Table) -> Result<()> {
    let out = match what {
        Table::Poly => {
            let mut out = Output::new("rows", &["family", "n", "k", "coeff"]);
            for (family, label) in [(Family::P, "P"), (Family::Q, "Q")] {
                for n in 0..=cfg.n_max {
                    let p = match family {
                        Family::P => p_poly(n, cfg.s)?,
                        _ => q_poly(n, cfg.s)?,
                    };
                    for (k, c) in p.coeffs().into_iter().enumerate() {
                        out.rows.push(vec![
                            Cell::Text(label.into()),
                            Cell::Int(n),
                            Cell::Int(k),
                            Cell::Num(c),
                        ]);
                    }
                }
            }
            out
        }
        Table::Gram => {
            let (_, basis) = cfg.basis(cfg.n_max)?;
            let mut out = Output::new("rows", &["n", "m", "value", "expected"]);
            out.extra.push(("dim", json!(basis.dim())));
            for n in 0..=cfg.n_max {
                for m in 0..=cfg.n_max {
                    out.rows.push(vec![
                        Cell::Int(n),
                        Cell::Int(m),
                        Cell::Num(basis.gram[(n, m)].re),
                        Cell::Num(if n == m { 1.0 } else { 0.0 }),
                    ]);
                }
            }
            out
        }
        Table::Coherent => coherent_sweep(cfg)?,
    };
    emit(cfg, &out)
}

/// Residuals along the ray through `α` for `|α| ∈ {0.5, 1, 1.5, 2}` and a
/// range of series cut-offs up to the configured `n_max`.
fn coherent_sweep(cfg: &RunConfig) -> Result<Output> {
    let alpha = cfg.alpha();
    let dir = if alpha.norm() > 0.0 { alpha / alpha.norm() } else { cplx(1.0, 0.0) };
    let (pair, basis) = cfg.basis(cfg.n_max)?;
    let mut out = Output::new(
        "rows",
        &["s", "abs_alpha", "n_max", "tail", "eigen_psi", "eigen_phi", "binorm_error"],
    );
    out.extra.push(("dim", json!(basis.dim())));
    for r in [0.5, 1.0, 1.5, 2.0] {
        let a = dir * r;
        for n in (4..=cfg.n_max).step_by(4) {
            let cp = coherent_series(a, &basis, n)?;
            let (ek, ed) = eigen_residual(&pair, &cp);
            out.rows.push(vec![
                Cell::Num(cfg.s),
                Cell::Num(r),
                Cell::Int(n),
                Cell::Num(poisson_tail(r * r, n)),
                Cell::Num(ek),
                Cell::Num(ed),
                Cell::Num((cp.binormalization() - 1.0).norm()),
            ]);
        }
    }
    Ok(out)
}

fn cmd_sample(cfg: &RunConfig, target: Target, n: usize, which: WhichArg, grid: &str) -> Result<()> {
    if !cfg.is_standard() {
        return Err(Error::InvalidArgument(
            "closed-form wave functions exist for the standard family only".into(),
        ));
    }
    let g = parse_list(grid, "grid")?;
    let &[x_min, x_max, count] = g.as_slice() else {
        return Err(Error::InvalidArgument("grid must be \"xmin,xmax,count\"".into()));
    };
    if count.fract() != 0.0 || count < 2.0 {
        return Err(Error::InvalidArgument(format!("grid count {count} is not an integer >= 2")));
    }
    let which = match which {
        WhichArg::Psi => Which::Psi,
        WhichArg::Phi => Which::Phi,
    };
    let f: Box<dyn Wavefunction> = match target {
        Target::Fock => Box::new(FockWavefunction::new(n, cfg.s, which)?),
        Target::Coherent => Box::new(coherent_profile(cfg.alpha(), cfg.s, which)?),
    };
    let grid = sample(f.as_ref(), x_min, x_max, count as usize)?;
    let mut out = Output::new("points", &["x", "re", "im"]);
    for (x, v) in grid.points.iter().zip(&grid.values) {
        out.rows.push(vec![Cell::Num(*x), Cell::Num(v.re), Cell::Num(v.im)]);
    }
    emit(cfg, &out)
}

fn cmd_evolve(cfg: &RunConfig, times: Option<&str>) -> Result<()> {
    let times = match times {
        Some(t) => parse_list(t, "times")?,
        None => default_times(cfg.omega),
    };
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("times"));
    }
    let alpha = cfg.alpha();
    let (pair, basis, _) = cfg.coherent()?;
    let h = hamiltonian(&pair, cfg.omega)?;
    let mut out = Output::new(
        "rows",
        &["t", "re_alpha_t", "im_alpha_t", "residual_psi", "residual_phi", "binorm_error"],
    );
    out.extra.push(("dim", json!(basis.dim())));
    for t in times {
        let r = temporal_stability_residual(&h, &basis, alpha, t)?;
        out.rows.push(vec![
            Cell::Num(t),
            Cell::Num(r.alpha_t.0),
            Cell::Num(r.alpha_t.1),
            Cell::Num(r.psi),
            Cell::Num(r.phi),
            Cell::Num(r.binorm),
        ]);
    }
    emit(cfg, &out)
}

/// Dispatches a parsed command line. `Ok(true)` iff every executed check passed.
pub fn run(cli: &Cli) -> std::result::Result<bool, CliError> {
    let default_format = match cli.command {
        Command::Verify { .. } => Format::Json,
        _ => Format::Csv,
    };
    let cfg = RunConfig::from_args(&cli.config, default_format)?;
    match &cli.command {
        Command::Verify { suite } => cmd_verify(&cfg, *suite),
        Command::Tabulate { what, coherent } => {
            let what = if *coherent { Table::Coherent } else { *what };
            cmd_tabulate(&cfg, what)?;
            Ok(true)
        }
        Command::Sample {
            target,
            n,
            which,
            grid,
        } => {
            cmd_sample(&cfg, *target, *n, *which, grid)?;
            Ok(true)
        }
        Command::Evolve { times } => {
            cmd_evolve(&cfg, times.as_deref())?;
            Ok(true)
        }
    }
}

/// Exit status: 0 when every check passed, 1 when a check failed, 2 on error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_family_and_alpha() {
        assert_eq!(parse_family("standard").unwrap(), FamilySpec::Standard);
        assert_eq!(
            parse_family("custom:1,0.5,0.5,1.25").unwrap(),
            FamilySpec::Custom {
                u1: 1.0,
                u2: 0.5,
                v1: 0.5,
                v2: 1.25
            }
        );
        assert!(parse_family("custom:1,2").is_err());
        assert!(parse_family("weird").is_err());
        assert_eq!(parse_alpha("-1,0.5").unwrap(), cplx(-1.0, 0.5));
        assert_eq!(parse_alpha("2").unwrap(), cplx(2.0, 0.0));
        assert!(parse_alpha("1,2,3").is_err());
        assert!(parse_alpha("nan,0").is_err());
    }

    #[test]
    fn config_validation() {
        let parse = |args: &[&str]| {
            let cli = Cli::try_parse_from(args.iter().copied()).unwrap();
            RunConfig::from_args(&cli.config, Format::Csv)
        };
        assert!(parse(&["pb", "verify", "--s", "1.0"]).is_err());
        assert!(parse(&["pb", "verify", "--s", "-0.5"]).is_ok());
        assert!(parse(&["pb", "verify", "--dim", "2"]).is_err());
        assert!(parse(&["pb", "verify", "--omega", "0"]).is_err());
        assert!(parse(&["pb", "verify", "--family", "alternate", "--s", "0.9"]).is_err());
        assert!(parse(&["pb", "verify", "--family", "custom:1,0.5,0.5,1"]).is_err());
        let cfg = parse(&["pb", "sample", "--alpha", "-1,2"]).unwrap();
        assert_eq!(cfg.alpha(), cplx(-1.0, 2.0));
        assert_eq!(cfg.n_max, 16);
        assert_eq!(cfg.quad_order, 48);
    }

    #[test]
    fn csv_rendering_is_fixed_width() {
        let mut out = Output::new("rows", &["a", "b"]);
        out.rows.push(vec![Cell::Num(0.1), Cell::Int(3)]);
        let cli = Cli::try_parse_from(["pb", "evolve"]).unwrap();
        let cfg = RunConfig::from_args(&cli.config, Format::Csv).unwrap();
        let text = out.render(&cfg);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# config: {"));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "1.0000000000000001e-1,3");
    }
}
