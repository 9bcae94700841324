//! Oracle-versus-closed-form measurements and the aggregated report.
//!
//! The `*_rows` functions only measure; tolerances are applied in
//! [`validate`], which sorts checks into hard ones (the implementation's
//! own numerics must agree with the oracles) and soft ones (the published
//! formulas are compared with the oracles and any disagreement is reported
//! as a finding).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KpgmError, Result};
use crate::model::{asymptote_radius, effective_potential_from, map_dimensionless, MoleculeSpec, QuantumNumbers};
use crate::oracles::{
    derivative, erf_series_oracle, fd_eigensolve, jacobi_sum_oracle, quad_semi_infinite, DerivativeOrder,
    FdSpectrum, GridSpec,
};
use crate::specfun::{erf_complex, jacobi, ln_gamma};
use crate::spectrum::{
    compute_n_max, energy, energy_expanded, energy_simplified, nu_condition_residual, nu_energy_root,
    thermo_coefficients, ThermoCoeffs,
};
use crate::thermo::{
    antiderivative_mismatch, antiderivative_offset, default_lambda, direct_levels, ensemble_moments, entropy, free_energy,
    free_energy_printed, heat_capacity, ln_partition_closed, mean_energy, partition_closed, sweep_lambda,
    thermo_point, ThermoPath,
};
use crate::wavefunction::{count_nodes, NormMode, RadialState};

/// Tolerances used by [`validate`].
pub mod tol {
    pub const SPECTRUM: f64 = 1e-3;
    pub const SPECTRUM_NULL: f64 = 1e-6;
    pub const FD_CHANGE: f64 = 1e-4;
    pub const NORM: f64 = 1e-6;
    pub const ORTHOGONALITY: f64 = 1e-6;
    pub const ANTIDERIVATIVE: f64 = 1e-6;
    pub const IMAGINARY: f64 = 1e-8;
    pub const U: f64 = 1e-5;
    pub const C: f64 = 1e-4;
    pub const S: f64 = 1e-5;
    pub const F: f64 = 1e-6;
    pub const IDENTITY: f64 = 1e-9;
    /// Ridders derivatives of `ln Z` reach about `1e-10` relative.
    pub const DERIVATIVE: f64 = 1e-7;
    pub const JACOBI: f64 = 1e-10;
    pub const FADDEEVA: f64 = 1e-10;
    pub const LN_GAMMA: f64 = 1e-13;
    pub const N_MAX: f64 = 1e-8;
    pub const EQ25: f64 = 1e-13;
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).norm() / b.norm()
    }
}

/// Dirichlet box for the finite-difference reference: from `1e-3/alpha` out
/// to where `V_eff` is within `1e-8` of its asymptote, and at least
/// `60/alpha` so that weakly bound tails fit.
pub fn fd_grid(spec: &MoleculeSpec<f64>, ell: u32, count: usize) -> Result<GridSpec<f64>> {
    let dl = map_dimensionless(spec, ell)?;
    let r_max = asymptote_radius(&dl, 1e-8).max(60.0 / spec.alpha);
    GridSpec::new(1e-3 / spec.alpha, r_max, count)
}

/// Lowest `states` eigenvalues of the effective potential.
pub fn fd_reference(spec: &MoleculeSpec<f64>, ell: u32, states: usize, count: usize) -> Result<FdSpectrum<f64>> {
    let dl = map_dimensionless(spec, ell)?;
    let grid = fd_grid(spec, ell, count)?;
    fd_eigensolve(|r| effective_potential_from(&dl, r), grid, spec.mu, spec.hbar, states, tol::FD_CHANGE)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: u32,
    pub ell: u32,
    pub fd: f64,
    pub fd_order: f64,
    pub eq13: f64,
    pub eq23: f64,
    /// Root of the NU condition; `None` when the level is unbound.
    pub nu_root: Option<f64>,
    /// NU residual at the published energy.
    pub nu_residual_at_eq13: Option<f64>,
    /// Asymptote `D` of the effective potential.
    pub asymptote: f64,
}

impl SpectrumRow {
    pub fn eq13_error(&self) -> f64 {
        rel(self.eq13, self.fd)
    }

    pub fn nu_error(&self) -> Option<f64> {
        self.nu_root.map(|e| rel(e, self.fd))
    }
}

pub fn spectrum_rows(spec: &MoleculeSpec<f64>, ells: &[u32], ns: &[u32], fd_count: usize) -> Result<Vec<SpectrumRow>> {
    let count_states = ns.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut rows = Vec::new();
    for &ell in ells {
        let fd = fd_reference(spec, ell, count_states, fd_count)?;
        let dl = map_dimensionless(spec, ell)?;
        let coeffs = thermo_coefficients(spec, ell)?;
        for &n in ns {
            let e13 = energy(QuantumNumbers::new(n, ell), spec)?;
            rows.push(SpectrumRow {
                n,
                ell,
                fd: fd.energies[n as usize],
                fd_order: fd.order[n as usize],
                eq13: e13,
                eq23: energy_simplified(n, &coeffs)?,
                nu_root: nu_energy_root(n, &dl)?,
                nu_residual_at_eq13: nu_condition_residual(e13, n, &dl).ok(),
                asymptote: spec.d,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub n: u32,
    pub ell: u32,
    /// `int_0^inf psi^2 dr` of the quadrature-normalized state, in `r`.
    pub norm_integral: f64,
    pub nodes: usize,
    /// Published constant over quadrature constant.
    pub closed_ratio: Option<f64>,
    /// Its logarithm, available when the ratio itself overflows.
    pub ln_closed_ratio: Option<f64>,
}

fn density_integral(f: impl Fn(f64) -> f64, alpha: f64) -> Result<f64> {
    quad_semi_infinite(f, 0.0, 1.0 / alpha, 1e-11)
}

pub fn norm_rows(spec: &MoleculeSpec<f64>, ell: u32, ns: &[u32]) -> Result<Vec<NormRow>> {
    let grid: Vec<f64> = (1..=6000).map(|i| i as f64 * 40.0 / (6000.0 * spec.alpha)).collect();
    ns.iter()
        .map(|&n| {
            let st = RadialState::new(QuantumNumbers::new(n, ell), spec, NormMode::Quadrature)?;
            let norm = density_integral(|r| st.value(r).map_or(f64::NAN, |p| p * p), spec.alpha)?;
            let values: Vec<f64> = grid.iter().map(|&r| st.value(r)).collect::<Result<_>>()?;
            Ok(NormRow {
                n,
                ell,
                norm_integral: norm,
                nodes: count_nodes(&values, 0.0),
                closed_ratio: st.closed_to_quadrature_ratio(),
                ln_closed_ratio: st.ln_closed_to_quadrature_ratio(),
            })
        })
        .collect()
}

/// `int psi_n psi_m dr` for every pair `n < m`.
pub fn overlap_rows(spec: &MoleculeSpec<f64>, ell: u32, ns: &[u32]) -> Result<Vec<(u32, u32, f64)>> {
    let states: Vec<RadialState<f64>> = ns
        .iter()
        .map(|&n| RadialState::new(QuantumNumbers::new(n, ell), spec, NormMode::Quadrature))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let (a, b) = (&states[i], &states[j]);
            let v = density_integral(
                |r| match (a.value(r), b.value(r)) {
                    (Ok(x), Ok(y)) => x * y,
                    _ => f64::NAN,
                },
                spec.alpha,
            )?;
            out.push((a.n, b.n, v));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntiderivativeRow {
    pub beta: f64,
    pub lam: f64,
    /// Relative mismatch of `dZ/dlam`; `None` if the closed form failed.
    pub residual: Option<f64>,
    pub im_over_re: Option<f64>,
}

/// `closed` feeds the closed form, `reference` the integrand it should
/// antidifferentiate; they differ only in the negative control.
pub fn antiderivative_rows(
    closed: &ThermoCoeffs<f64>,
    reference: &ThermoCoeffs<f64>,
    betas: &[f64],
    lams: &[f64],
) -> Vec<AntiderivativeRow> {
    let mut rows = Vec::with_capacity(betas.len() * lams.len());
    for &beta in betas {
        for &lam in lams {
            let residual = antiderivative_mismatch(beta, closed, reference, lam).ok().filter(|r| r.is_finite());
            let shifted = closed.shifted(antiderivative_offset(reference, lam));
            let im_over_re = partition_closed(beta, &shifted, lam).ok().map(|z| (z.im / z.re).abs());
            rows.push(AntiderivativeRow {
                beta,
                lam,
                residual,
                im_over_re,
            });
        }
    }
    rows
}

/// Published closed forms next to numerical derivatives of `ln Z_closed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormRow {
    pub beta: f64,
    pub u_closed: Option<[f64; 2]>,
    pub u_numeric: [f64; 2],
    pub c_closed: Option<[f64; 2]>,
    pub c_numeric: [f64; 2],
    pub s_closed: Option<[f64; 2]>,
    pub s_numeric: [f64; 2],
    /// Published form with `ln exp(x)` collapsed.
    pub f_printed: Option<[f64; 2]>,
    /// `-ln Z / beta`.
    pub f_definition: [f64; 2],
    pub f_numeric: [f64; 2],
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn finite_pair(z: Result<Complex64>) -> Option<[f64; 2]> {
    z.ok().filter(|z| z.re.is_finite() && z.im.is_finite()).map(pair)
}

impl ClosedFormRow {
    pub fn u_error(&self) -> Option<f64> {
        self.u_closed.map(|c| crel(unpair(c), unpair(self.u_numeric)))
    }
    pub fn c_error(&self) -> Option<f64> {
        self.c_closed.map(|c| crel(unpair(c), unpair(self.c_numeric)))
    }
    pub fn s_error(&self) -> Option<f64> {
        self.s_closed.map(|c| crel(unpair(c), unpair(self.s_numeric)))
    }
    pub fn f_printed_error(&self) -> Option<f64> {
        self.f_printed.map(|c| crel(unpair(c), unpair(self.f_numeric)))
    }
    pub fn f_definition_error(&self) -> f64 {
        crel(unpair(self.f_definition), unpair(self.f_numeric))
    }
}

pub fn closed_form_rows(coeffs: &ThermoCoeffs<f64>, betas: &[f64], lam: f64, k: f64) -> Result<Vec<ClosedFormRow>> {
    betas
        .iter()
        .map(|&beta| {
            let ln_z = |b: f64| ln_partition_closed(b, coeffs, lam).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            let h0 = 0.25 * beta;
            let d1 = |part: fn(Complex64) -> f64| {
                derivative(|b| part(ln_z(b)), beta, DerivativeOrder::First, h0).value
            };
            let d2 = |part: fn(Complex64) -> f64| {
                derivative(|b| part(ln_z(b)), beta, DerivativeOrder::Second, h0).value
            };
            let dlnz = Complex64::new(d1(|z| z.re), d1(|z| z.im));
            let d2lnz = Complex64::new(d2(|z| z.re), d2(|z| z.im));
            let lz = ln_partition_closed(beta, coeffs, lam)?;
            let u_num = -dlnz;
            Ok(ClosedFormRow {
                beta,
                u_closed: finite_pair(mean_energy(beta, coeffs, lam)),
                u_numeric: pair(u_num),
                c_closed: finite_pair(heat_capacity(beta, coeffs, lam, k)),
                c_numeric: pair(d2lnz * (k * beta * beta)),
                s_closed: finite_pair(entropy(beta, coeffs, lam, k)),
                s_numeric: pair((lz + u_num * beta) * k),
                f_printed: finite_pair(free_energy_printed(beta, coeffs, lam)),
                f_definition: pair(free_energy(beta, coeffs, lam)?),
                f_numeric: pair(-lz / beta),
            })
        })
        .collect()
}

/// Direct-path thermodynamic identities at one `beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub beta: f64,
    /// `|S/k - (ln Z + beta U)|`, relative to `max(|S/k|, 1)`.
    pub entropy: f64,
    /// `|C/k - beta^2 Var E|` with the variance summed in two passes.
    pub heat_capacity: f64,
    /// `|F - (U - T S)|`.
    pub free_energy: f64,
    /// `|U - sum p_n E_n|` from independently normalized populations.
    pub mean_energy: f64,
    /// Largest of `|U + d ln Z/d beta|` and `|C/k - beta^2 d^2 ln Z/d beta^2|`
    /// with numerical derivatives.
    pub derivatives: f64,
}

impl IdentityRow {
    /// Worst of the exact identities (excludes [`derivatives`](Self::derivatives)).
    pub fn worst(&self) -> f64 {
        self.entropy.max(self.heat_capacity).max(self.free_energy).max(self.mean_energy)
    }
}

pub fn identity_rows(coeffs: &ThermoCoeffs<f64>, betas: &[f64], k: f64) -> Result<Vec<IdentityRow>> {
    let levels = direct_levels(coeffs, coeffs.n_max)?;
    let e_min = levels.iter().copied().fold(f64::INFINITY, f64::min);
    betas
        .iter()
        .map(|&beta| {
            let p = thermo_point(ThermoPath::Direct, beta, coeffs, coeffs.n_max, k)?;
            let m = ensemble_moments(beta, &levels)?;
            let weights: Vec<f64> = levels.iter().map(|&e| (-beta * (e - e_min)).exp()).collect();
            let total: f64 = weights.iter().sum();
            let mean: f64 = weights.iter().zip(&levels).map(|(w, e)| w * e).sum::<f64>() / total;
            let var: f64 = weights.iter().zip(&levels).map(|(w, e)| w * (e - mean) * (e - mean)).sum::<f64>() / total;
            // the exact linear part -beta E_min is removed before differentiating
            let ln_z = |b: f64| ensemble_moments(b, &levels).map_or(f64::NAN, |m| m.ln_z + b * e_min);
            let h0 = 0.25 * beta;
            let d1 = derivative(ln_z, beta, DerivativeOrder::First, h0).value - e_min;
            let d2 = derivative(ln_z, beta, DerivativeOrder::Second, h0).value;
            let scale = |x: f64| x.abs().max(1.0);
            let t = 1.0 / (k * beta);
            Ok(IdentityRow {
                beta,
                entropy: (p.s / k - (m.ln_z + beta * p.u)).abs() / scale(p.s / k),
                heat_capacity: (p.c / k - beta * beta * var).abs() / scale(p.c / k),
                free_energy: (p.f - (p.u - t * p.s)).abs() / scale(p.f),
                mean_energy: (p.u - mean).abs() / scale(p.u),
                derivatives: ((p.u + d1).abs() / scale(p.u)).max((p.c / k - beta * beta * d2).abs() / scale(p.c / k)),
            })
        })
        .collect()
}

/// Worst-case deviations of the production special functions from their
/// oracles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialFunctionReport {
    /// Recurrence vs explicit sum, `n <= 12`.
    pub jacobi_vs_sum: f64,
    /// `P_n^(a,b)(-x) = (-1)^n P_n^(b,a)(x)`.
    pub jacobi_symmetry: f64,
    /// `P_n^(a,b)(1) = Gamma(n+a+1) / (n! Gamma(a+1))`.
    pub jacobi_at_one: f64,
    /// `erf` through the Faddeeva path vs the series, `|z| <= 3`.
    pub faddeeva_vs_series: f64,
    /// `ln Gamma(x+1) - ln Gamma(x) - ln x`.
    pub ln_gamma_recursion: f64,
}

/// Low-discrepancy points in the disc `|z| <= radius` (golden-angle spiral).
pub fn spiral_points(count: usize, radius: f64) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let r = radius * ((i as f64 + 0.5) / count as f64).sqrt();
            Complex64::from_polar(r, golden * i as f64)
        })
        .collect()
}

pub fn special_function_report() -> Result<SpecialFunctionReport> {
    let params = [-0.5, 0.0, 0.7, 2.3];
    let xs: Vec<f64> = (0..41).map(|i| -1.0 + i as f64 / 20.0).collect();
    let (mut vs_sum, mut sym, mut at_one) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..=12u32 {
        for &a in &params {
            for &b in &params {
                for &x in &xs {
                    let p = jacobi(n, a, b, x)?;
                    let o = jacobi_sum_oracle(n, a, b, x)?;
                    // absolute near the polynomial's zeros, relative elsewhere
                    vs_sum = vs_sum.max((p - o).abs() / o.abs().max(1.0));
                    let mirrored = jacobi(n, b, a, -x)?;
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sym = sym.max((p - sign * mirrored).abs() / p.abs().max(1.0));
                }
                let want = (ln_gamma(n as f64 + a + 1.0)? - ln_gamma(n as f64 + 1.0)? - ln_gamma(a + 1.0)?).exp();
                at_one = at_one.max(rel(jacobi(n, a, b, 1.0)?, want));
            }
        }
    }
    let mut fad = 0.0f64;
    for z in spiral_points(200, 3.0) {
        let p = erf_complex(z)?;
        let o = erf_series_oracle(z)?;
        fad = fad.max(crel(p, o));
    }
    let mut lg = 0.0f64;
    let mut x: f64 = 1e-3;
    while x < 1e4 {
        let lhs = ln_gamma(x + 1.0)?;
        let rhs = ln_gamma(x)? + x.ln();
        lg = lg.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        x *= 1.37;
    }
    Ok(SpecialFunctionReport {
        jacobi_vs_sum: vs_sum,
        jacobi_symmetry: sym,
        jacobi_at_one: at_one,
        faddeeva_vs_series: fad,
        ln_gamma_recursion: lg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    /// Failing makes the report fail.
    Hard,
    /// Reported only.
    Soft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub severity: Severity,
    pub passed: bool,
    /// Worst measured deviation (NaN when not measurable).
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub spec: String,
    pub checks: Vec<Check>,
    pub findings: Vec<String>,
}

impl ValidationReport {
    /// True when every hard check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.severity == Severity::Hard).all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, severity: Severity, measured: f64, tolerance: f64, detail: impl Into<String>) {
        let passed = measured <= tolerance;
        self.checks.push(Check {
            name: name.into(),
            severity,
            passed,
            measured,
            tolerance,
            detail: detail.into(),
        });
    }

    fn fail(&mut self, name: impl Into<String>, severity: Severity, tolerance: f64, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            severity,
            passed: false,
            measured: f64::NAN,
            tolerance,
            detail: detail.into(),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub ells: Vec<u32>,
    /// Levels compared against the finite-difference reference.
    pub levels: Vec<u32>,
    /// States used for wavefunction checks.
    pub wave_states: Vec<u32>,
    /// Points of the coarsest finite-difference grid.
    pub fd_count: usize,
    /// Flip the sign of `Q2` fed to the closed forms (negative control).
    pub corrupt_q2: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            ells: vec![0, 1],
            levels: vec![0, 1, 2],
            wave_states: vec![0, 1, 2, 3],
            fd_count: 2000,
            corrupt_q2: false,
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

/// Runs every oracle comparison for `spec`.
pub fn validate(spec: &MoleculeSpec<f64>, opts: &ValidationOptions) -> Result<ValidationReport> {
    spec.validate()?;
    let mut rep = ValidationReport {
        spec: spec.name.clone(),
        checks: Vec::new(),
        findings: Vec::new(),
    };
    let null = spec.de == 0.0 && spec.d == 0.0;

    // spectrum
    match spectrum_rows(spec, &opts.ells, &opts.levels, opts.fd_count) {
        Ok(rows) => {
            for r in &rows {
                let tag = format!("n={} ell={}", r.n, r.ell);
                let tol13 = if null { tol::SPECTRUM_NULL } else { tol::SPECTRUM };
                rep.push(
                    format!("published energy vs finite differences ({tag})"),
                    Severity::Soft,
                    r.eq13_error(),
                    tol13,
                    format!("published {:.12e}, finite differences {:.12e}", r.eq13, r.fd),
                );
                match r.nu_root {
                    Some(e) => rep.push(
                        format!("NU root vs finite differences ({tag})"),
                        Severity::Hard,
                        rel(e, r.fd),
                        tol::SPECTRUM,
                        format!("NU root {e:.12e}, finite differences {:.12e}", r.fd),
                    ),
                    None => {
                        // unbound: the box level must sit in the continuum
                        let below = (r.asymptote - r.fd).max(0.0) / r.asymptote.abs().max(1.0);
                        rep.push(
                            format!("unbound level lies in the continuum ({tag})"),
                            Severity::Hard,
                            below,
                            tol::SPECTRUM,
                            format!("finite differences {:.12e}, asymptote {:.12e}", r.fd, r.asymptote),
                        );
                    }
                }
                rep.push(
                    format!("published energy vs Q-parameterization ({tag})"),
                    Severity::Soft,
                    rel(r.eq23, r.eq13),
                    tol::SPECTRUM,
                    format!("{:.12e} vs {:.12e}", r.eq13, r.eq23),
                );
                if r.eq13_error() > tol13 {
                    rep.findings.push(format!(
                        "{tag}: published energy {:.10e} differs from the finite-difference level {:.10e}; NU residual there is {}; NU root {}",
                        r.eq13,
                        r.fd,
                        r.nu_residual_at_eq13.map_or("undefined (above asymptote)".into(), |v| format!("{v:.6e}")),
                        r.nu_root.map_or("none (unbound)".into(), |v| format!("{v:.10e}")),
                    ));
                }
            }
        }
        Err(e) => rep.fail("finite-difference spectrum", Severity::Hard, tol::FD_CHANGE, e.to_string()),
    }

    // wavefunctions
    for &ell in &opts.ells {
        match norm_rows(spec, ell, &opts.wave_states) {
            Ok(rows) => {
                rep.push(
                    format!("quadrature normalization (ell={ell})"),
                    Severity::Hard,
                    worst(rows.iter().map(|r| (r.norm_integral - 1.0).abs())),
                    tol::NORM,
                    "int psi^2 dr over n in the wave-state list",
                );
                let bad: Vec<String> =
                    rows.iter().filter(|r| r.nodes != r.n as usize).map(|r| format!("n={} has {}", r.n, r.nodes)).collect();
                rep.push(
                    format!("node count (ell={ell})"),
                    Severity::Hard,
                    bad.len() as f64,
                    0.0,
                    if bad.is_empty() { "all match".to_string() } else { bad.join(", ") },
                );
                for r in &rows {
                    let ratio = r.closed_ratio.unwrap_or(f64::NAN);
                    rep.push(
                        format!("published normalization / quadrature (n={} ell={ell})", r.n),
                        Severity::Soft,
                        (ratio - 1.0).abs(),
                        tol::NORM,
                        match r.ln_closed_ratio {
                            Some(l) => format!("ratio {ratio:.12e}, ln ratio {l:.12e}"),
                            None => "published constant undefined".to_string(),
                        },
                    );
                }
            }
            Err(e) => rep.fail(format!("wavefunctions (ell={ell})"), Severity::Hard, tol::NORM, e.to_string()),
        }
        match overlap_rows(spec, ell, &opts.wave_states) {
            Ok(pairs) => {
                let w = worst(pairs.iter().map(|p| p.2.abs()));
                rep.push(
                    format!("orthogonality (ell={ell})"),
                    Severity::Soft,
                    w,
                    tol::ORTHOGONALITY,
                    "states carry different gamma, so they are not eigenfunctions of one operator",
                );
                if w > tol::ORTHOGONALITY {
                    rep.findings.push(format!(
                        "ell={ell}: largest overlap between distinct states is {w:.6e}"
                    ));
                }
            }
            Err(e) => rep.fail(format!("orthogonality (ell={ell})"), Severity::Soft, tol::ORTHOGONALITY, e.to_string()),
        }
    }

    // thermodynamics
    let ell = opts.ells.first().copied().unwrap_or(0);
    let coeffs = thermo_coefficients(spec, ell)?;
    match compute_n_max(&coeffs) {
        Ok(cap) => rep.push(
            "n_max analytic vs numeric",
            Severity::Hard,
            cap.numeric.map_or(0.0, |v| (v - cap.n_max).abs()),
            tol::N_MAX,
            format!("n_max = {:.12e}, interior = {}", cap.n_max, cap.interior),
        ),
        Err(e) => rep.fail("n_max analytic vs numeric", Severity::Hard, tol::N_MAX, e.to_string()),
    }
    let eq25 = worst((0..=10).map(|n| {
        let a = energy_simplified(n, &coeffs).unwrap_or(f64::NAN);
        let b = energy_expanded(n as f64, &coeffs).unwrap_or(f64::NAN);
        rel(b, a)
    }));
    rep.push("compact vs expanded energy", Severity::Hard, eq25, tol::EQ25, "n = 0..10");

    let mut closed = coeffs;
    if opts.corrupt_q2 {
        closed.q2 = -closed.q2;
    }
    let lam0 = default_lambda(&coeffs, ThermoPath::Closed);
    let betas10 = linspace(0.1, 2.0, 10);
    let lams10 = linspace(0.25 * lam0, 1.5 * lam0, 10);
    let anti = antiderivative_rows(&closed, &coeffs, &betas10, &lams10);
    let anti_worst = worst(anti.iter().map(|r| r.residual.unwrap_or(f64::NAN)));
    rep.push(
        "closed-form partition function is the antiderivative",
        Severity::Hard,
        anti_worst,
        tol::ANTIDERIVATIVE,
        "10 x 10 (beta, lam) grid",
    );
    let im_worst = worst(anti.iter().map(|r| r.im_over_re.unwrap_or(f64::NAN)));
    rep.push(
        "closed-form partition function is real",
        Severity::Soft,
        im_worst,
        tol::IMAGINARY,
        "|Im Z / Re Z| on the same grid",
    );
    if im_worst > tol::IMAGINARY {
        rep.findings.push(format!(
            "closed-form Z carries a lam-independent imaginary part; worst |Im/Re| = {im_worst:.6e}"
        ));
    }

    let betas20 = linspace(0.1, 2.0, 20);
    match closed_form_rows(&closed, &betas20, lam0, spec.k_boltz) {
        Ok(rows) => {
            let report = |rep: &mut ValidationReport, name: &str, errs: Vec<Option<f64>>, tolerance: f64| {
                let finite: Vec<f64> = errs.iter().flatten().copied().collect();
                let skipped = errs.len() - finite.len();
                let w = if finite.is_empty() { 0.0 } else { worst(finite) };
                rep.push(
                    format!("published {name} vs numerical derivative"),
                    Severity::Soft,
                    w,
                    tolerance,
                    format!("20 beta points, {skipped} not finite"),
                );
                if w > tolerance {
                    rep.findings.push(format!("published {name} deviates from the numerical derivative by up to {w:.6e} (relative)"));
                }
            };
            report(&mut rep, "U", rows.iter().map(|r| r.u_error()).collect(), tol::U);
            report(&mut rep, "C", rows.iter().map(|r| r.c_error()).collect(), tol::C);
            report(&mut rep, "S", rows.iter().map(|r| r.s_error()).collect(), tol::S);
            report(&mut rep, "F", rows.iter().map(|r| r.f_printed_error()).collect(), tol::F);
            rep.push(
                "F = -ln Z / beta on the closed path",
                Severity::Hard,
                worst(rows.iter().map(|r| r.f_definition_error())),
                tol::F,
                "definition vs independent evaluation",
            );
        }
        Err(e) => rep.fail("closed-form thermodynamics", Severity::Soft, tol::U, e.to_string()),
    }

    match identity_rows(&coeffs, &betas20, spec.k_boltz) {
        Ok(rows) => {
            rep.push(
                "direct-sum thermodynamic identities",
                Severity::Hard,
                worst(rows.iter().map(IdentityRow::worst)),
                tol::IDENTITY,
                "S = k(ln Z + beta U), C = k beta^2 Var E, F = U - TS, U = sum p E",
            );
            rep.push(
                "direct-sum U and C vs numerical derivatives of ln Z",
                Severity::Hard,
                worst(rows.iter().map(|r| r.derivatives)),
                tol::DERIVATIVE,
                "U = -d ln Z/d beta, C = k beta^2 d^2 ln Z/d beta^2",
            );
        }
        Err(e) => rep.fail("direct-sum thermodynamic identities", Severity::Hard, tol::IDENTITY, e.to_string()),
    }

    // qualitative claims
    let levels = direct_levels(&coeffs, coeffs.n_max)?;
    if levels.iter().all(|&e| e < 0.0) {
        let zs: Vec<f64> = betas20.iter().map(|&b| ensemble_moments(b, &levels).map_or(f64::NAN, |m| m.ln_z)).collect();
        let violations = zs.windows(2).filter(|w| !(w[1] > w[0])).count();
        rep.push(
            "direct Z increases with beta",
            Severity::Hard,
            violations as f64,
            0.0,
            "all levels negative",
        );
    } else {
        rep.findings.push("some levels are non-negative; Z(beta) monotonicity not asserted".into());
    }
    if let Ok(pts) = sweep_lambda(spec, ell, 0.5, &linspace(0.25 * lam0, 1.5 * lam0, 12), ThermoPath::Closed) {
        let decreasing = pts.windows(2).all(|w| w[1].z_re < w[0].z_re);
        rep.findings.push(format!(
            "diagnostic: closed-form Re Z is {} in lam at beta = 0.5",
            if decreasing { "decreasing" } else { "not decreasing" }
        ));
    }
    {
        let s: Vec<f64> = betas20
            .iter()
            .filter_map(|&b| thermo_point(ThermoPath::Direct, b, &coeffs, coeffs.n_max, spec.k_boltz).ok())
            .map(|p| p.s)
            .collect();
        let dec = s.windows(2).all(|w| w[1] <= w[0]);
        rep.findings.push(format!(
            "diagnostic: direct-path entropy is {} in beta",
            if dec { "non-increasing" } else { "not monotone" }
        ));
    }

    // special functions
    match special_function_report() {
        Ok(sf) => {
            rep.push("Jacobi recurrence vs explicit sum", Severity::Hard, sf.jacobi_vs_sum, tol::JACOBI, "n <= 12");
            rep.push("Jacobi reflection symmetry", Severity::Hard, sf.jacobi_symmetry, 1e-12, "");
            rep.push("Jacobi value at x = 1", Severity::Hard, sf.jacobi_at_one, 1e-12, "");
            rep.push("erf via Faddeeva vs series", Severity::Hard, sf.faddeeva_vs_series, tol::FADDEEVA, "200 points, |z| <= 3");
            rep.push("ln Gamma recursion", Severity::Hard, sf.ln_gamma_recursion, tol::LN_GAMMA, "x in [1e-3, 1e4]");
        }
        Err(e) => rep.fail("special functions", Severity::Hard, 0.0, e.to_string()),
    }
    Ok(rep)
}

/// Maps a failed measurement to a report-level error.
pub fn require(report: &ValidationReport) -> Result<()> {
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.severity == Severity::Hard && !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Err(KpgmError::domain("validate", format!("hard checks failed: {}", failed.join("; "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic() -> MoleculeSpec<f64> {
        MoleculeSpec::natural("generic", 1.0, 1.5, 0.5, 1.2, 0.4)
    }

    #[test]
    fn hard_checks_pass_for_reference_specs() {
        for spec in [generic(), MoleculeSpec::null_coupling(1.0)] {
            let rep = validate(&spec, &ValidationOptions::default()).unwrap();
            let failed: Vec<_> = rep.checks.iter().filter(|c| c.severity == Severity::Hard && !c.passed).collect();
            assert!(failed.is_empty(), "{}: {failed:?}", spec.name);
            assert!(require(&rep).is_ok());
        }
    }

    #[test]
    fn corrupted_q2_trips_antiderivative_check() {
        let opts = ValidationOptions { corrupt_q2: true, ..ValidationOptions::default() };
        let rep = validate(&generic(), &opts).unwrap();
        assert!(!rep.passed());
        let anti = rep
            .checks
            .iter()
            .find(|c| c.name == "closed-form partition function is the antiderivative")
            .unwrap();
        assert!(!anti.passed);
        assert!(require(&rep).is_err());
    }

    #[test]
    fn spectrum_findings_name_each_discrepant_level() {
        let rep = validate(&generic(), &ValidationOptions::default()).unwrap();
        for ell in [0, 1] {
            for n in 0..3 {
                let tag = format!("n={n} ell={ell}:");
                assert!(rep.findings.iter().any(|f| f.starts_with(&tag)), "missing finding {tag}");
            }
        }
    }

    #[test]
    fn spiral_stays_inside_radius() {
        let pts = spiral_points(200, 3.0);
        assert_eq!(pts.len(), 200);
        assert!(pts.iter().all(|z| z.norm() <= 3.0 + 1e-12));
    }
}
