//! Vibrational partition function and the thermodynamic functions built on
//! it.
//!
//! Three routes to `Z(beta)`:
//!
//! * [`ThermoPath::Direct`]: Boltzmann sum over levels `0..=floor(n_max)`;
//! * [`ThermoPath::Integral`]: the same sum replaced by `int_0^n_max dn`;
//! * [`ThermoPath::Closed`]: the published erf/erfc antiderivative, with
//!   upper limit `lam` in the variable `rho`. Its square-root arguments are
//!   imaginary for `beta Q2 > 0`, so it is complex-valued.
//!
//! The published closed forms for `U`, `C`, `S` and `F` are evaluated as
//! printed ([`mean_energy`], [`heat_capacity`], [`entropy`],
//! [`free_energy_printed`]); the direct and integral paths use exact
//! ensemble moments instead.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KpgmError, Result};
use crate::model::MoleculeSpec;
use crate::oracles::{derivative, quad_adaptive, DerivativeOrder};
use crate::specfun::{erfc_complex, exp_scaled_erfc};
use crate::spectrum::{compute_n_max, energy_at, energy_simplified, thermo_coefficients, ThermoCoeffs};
use crate::{lit, Real};

/// Relative tolerance of the integral path.
pub const INTEGRAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThermoPath {
    #[default]
    Direct,
    Integral,
    Closed,
}

impl ThermoPath {
    pub fn as_str(self) -> &'static str {
        match self {
            ThermoPath::Direct => "direct",
            ThermoPath::Integral => "integral",
            ThermoPath::Closed => "closed",
        }
    }
}

impl fmt::Display for ThermoPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ThermoPath {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "direct" => Ok(ThermoPath::Direct),
            "integral" => Ok(ThermoPath::Integral),
            "closed" => Ok(ThermoPath::Closed),
            other => Err(format!("unknown path `{other}` (expected direct, integral or closed)")),
        }
    }
}

/// One row of a thermodynamic sweep.
///
/// On the closed path `z_im` carries the imaginary part of the complex
/// closed form and `u`, `c`, `s`, `f` are real parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint<T> {
    pub beta: T,
    /// Level cap (`n_max` or the override) the point was computed with.
    pub lam: T,
    pub path: ThermoPath,
    pub z_re: T,
    pub z_im: T,
    pub u: T,
    pub c: T,
    pub s: T,
    pub f: T,
}

fn check_beta<T: Real>(op: &'static str, beta: T) -> Result<()> {
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(KpgmError::domain(op, format!("beta must be > 0, got {beta}")));
    }
    Ok(())
}

/// Level energies `E_0 .. E_floor(cap)` from the simplified spectrum.
pub fn direct_levels<T: Real>(coeffs: &ThermoCoeffs<T>, cap: T) -> Result<Vec<T>> {
    if !(cap >= T::zero()) {
        return Err(KpgmError::domain("partition_direct", format!("level cap {cap} < 0")));
    }
    let top = cap.floor().to_u32().ok_or_else(|| KpgmError::domain("partition_direct", "level cap too large"))?;
    (0..=top).map(|n| energy_simplified(n, coeffs)).collect()
}

/// Exact thermodynamics of a finite spectrum at `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleMoments<T> {
    pub ln_z: T,
    pub mean: T,
    pub variance: T,
}

pub fn ensemble_moments<T: Real>(beta: T, levels: &[T]) -> Result<EnsembleMoments<T>> {
    check_beta("partition_direct", beta)?;
    let Some(&e_min) = levels.iter().min_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)) else {
        return Err(KpgmError::domain("partition_direct", "no levels below the cap"));
    };
    let mut w_sum = T::zero();
    let mut m1 = T::zero();
    let mut m2 = T::zero();
    for &e in levels {
        let x = e - e_min;
        let w = (-beta * x).exp();
        w_sum = w_sum + w;
        m1 = m1 + w * x;
        m2 = m2 + w * x * x;
    }
    let mean_shift = m1 / w_sum;
    Ok(EnsembleMoments {
        ln_z: w_sum.ln() - beta * e_min,
        mean: e_min + mean_shift,
        variance: (m2 / w_sum - mean_shift * mean_shift).max(T::zero()),
    })
}

/// `sum_{n=0}^{floor(n_max)} exp(-beta E_n)`.
pub fn partition_direct<T: Real>(beta: T, spec: &MoleculeSpec<T>, ell: u32) -> Result<T> {
    let coeffs = thermo_coefficients(spec, ell)?;
    let cap = compute_n_max(&coeffs)?;
    let levels = direct_levels(&coeffs, cap.n_max)?;
    Ok(ensemble_moments(beta, &levels)?.ln_z.exp())
}

fn moments_point<T: Real>(beta: T, lam: T, path: ThermoPath, m: EnsembleMoments<T>, k: T) -> ThermoPoint<T> {
    ThermoPoint {
        beta,
        lam,
        path,
        z_re: m.ln_z.exp(),
        z_im: T::zero(),
        u: m.mean,
        c: k * beta * beta * m.variance,
        s: k * (m.ln_z + beta * m.mean),
        f: -m.ln_z / beta,
    }
}

/// `int_0^upper exp(-beta E(n)) dn` together with the first two energy
/// moments.
pub fn integral_moments<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, upper: T) -> Result<EnsembleMoments<T>> {
    check_beta("partition_integral", beta)?;
    if !(upper > T::zero()) {
        return Err(KpgmError::domain("partition_integral", format!("upper limit {upper} must be > 0")));
    }
    let e0 = energy_at(T::zero(), coeffs)?;
    let e_top = energy_at(upper, coeffs)?;
    let e_ref = e0.min(e_top);
    let shifted = |n: T| energy_at(n, coeffs).map(|e| e - e_ref).unwrap_or(T::nan());
    let tol = lit::<T>(INTEGRAL_TOL);
    let w = |n: T| (-beta * shifted(n)).exp();
    let z = quad_adaptive(w, T::zero(), upper, tol)?;
    let m1 = quad_adaptive(|n: T| w(n) * shifted(n), T::zero(), upper, tol)? / z;
    let m2 = quad_adaptive(|n: T| w(n) * shifted(n) * shifted(n), T::zero(), upper, tol)? / z;
    Ok(EnsembleMoments {
        ln_z: z.ln() - beta * e_ref,
        mean: e_ref + m1,
        variance: (m2 - m1 * m1).max(T::zero()),
    })
}

/// `int_0^n_max exp(-beta E(n)) dn`; zero when `n_max = 0`.
pub fn partition_integral<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>) -> Result<T> {
    check_beta("partition_integral", beta)?;
    if coeffs.n_max == T::zero() {
        return Ok(T::zero());
    }
    Ok(integral_moments(beta, coeffs, coeffs.n_max)?.ln_z.exp())
}

type C<T> = Complex<T>;

/// Shared pieces of the closed forms at `(beta, lam)`.
#[derive(Debug, Clone, Copy)]
struct ClosedArgs<T> {
    /// `sqrt(-beta Q2)` (principal branch).
    a: C<T>,
    /// `sqrt(-beta Q2 Q3^2)`.
    c: C<T>,
    /// `lam a - c / lam`.
    u: C<T>,
    /// `lam a + c / lam`.
    v: C<T>,
    /// `beta Q2 (lam^4 + Q3^2) / lam^2`.
    big: T,
}

fn closed_args<T: Real>(op: &'static str, beta: T, coeffs: &ThermoCoeffs<T>, lam: T) -> Result<ClosedArgs<T>> {
    check_beta(op, beta)?;
    if !(lam > T::zero()) {
        return Err(KpgmError::domain(op, format!("lam must be > 0, got {lam}")));
    }
    let q2 = coeffs.q2;
    let q3 = coeffs.q3;
    let a = C::new(-beta * q2, T::zero()).sqrt();
    let c = C::new(-beta * q2 * q3 * q3, T::zero()).sqrt();
    let u = a * lam - c / lam;
    let v = a * lam + c / lam;
    let big = beta * q2 * (lam.powi(4) + q3 * q3) / (lam * lam);
    Ok(ClosedArgs { a, c, u, v, big })
}

/// `beta (2 Q2 Q3 - Q1) - 2 a c`, the exponent of `zeta_1 / sqrt(pi)`.
fn zeta1_exponent<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, x: &ClosedArgs<T>) -> C<T> {
    let two = lit::<T>(2.0);
    C::new(-beta * coeffs.q1 + two * beta * coeffs.q2 * coeffs.q3, T::zero()) - x.a * x.c * two
}

/// The published antiderivative
/// `zeta_1 / (4 sqrt(-beta Q2)) [1 + erf(u) - exp(4 a c) erfc(v)]`.
///
/// Evaluated as `-sqrt(pi) / (4a) [e^E erfc(u) + e^(E + 4ac) erfc(v) - 2 e^E]`
/// with each exponential fused into its erfc.
pub fn partition_closed<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, lam: T) -> Result<C<T>> {
    let x = closed_args("partition_closed", beta, coeffs, lam)?;
    let e1 = zeta1_exponent(beta, coeffs, &x);
    let four_ac = x.a * x.c * lit::<T>(4.0);
    let t1 = exp_scaled_erfc(e1, x.u)?;
    let t2 = exp_scaled_erfc(e1 + four_ac, x.v)?;
    let t3 = e1.exp() * lit::<T>(2.0);
    let z = -(t1 + t2 - t3) * T::PI().sqrt() / (x.a * lit::<T>(4.0));
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(KpgmError::overflow("partition_closed", format!("beta = {beta}, lam = {lam}")));
    }
    Ok(z)
}

/// Principal logarithm of [`partition_closed`].
pub fn ln_partition_closed<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, lam: T) -> Result<C<T>> {
    Ok(partition_closed(beta, coeffs, lam)?.ln())
}

/// `d Z_closed / d lam` implied by the integral it should antidifferentiate:
/// `exp(beta (2 Q2 Q3 - Q1)) exp(beta (Q2 lam^2 + Q2 Q3^2 / lam^2))`.
pub fn closed_integrand<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, lam: T) -> T {
    let (q1, q2, q3) = (coeffs.q1, coeffs.q2, coeffs.q3);
    (beta * (lit::<T>(2.0) * q2 * q3 - q1) + beta * (q2 * lam * lam + q2 * q3 * q3 / (lam * lam))).exp()
}

/// Relative mismatch between a numerical `d Z_closed / d lam` and
/// [`closed_integrand`]. The step is scaled to the integrand's logarithmic
/// slope, which grows like `1 / lam^3` near the origin.
pub fn antiderivative_residual<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, lam: T) -> Result<T> {
    antiderivative_mismatch(beta, coeffs, coeffs, lam)
}

/// [`antiderivative_residual`] with the closed form built from `closed` and
/// the integrand from `reference`.
///
/// `Q1` enters both sides only through `exp(-beta Q1)`, so the relative
/// mismatch does not depend on it; both sides are evaluated with the levels
/// shifted by [`antiderivative_offset`] to keep them representable.
pub fn antiderivative_mismatch<T: Real>(
    beta: T,
    closed: &ThermoCoeffs<T>,
    reference: &ThermoCoeffs<T>,
    lam: T,
) -> Result<T> {
    let offset = antiderivative_offset(reference, lam);
    let (closed, reference) = (closed.shifted(offset), reference.shifted(offset));
    let want = closed_integrand(beta, &reference, lam);
    let two = lit::<T>(2.0);
    let q2 = reference.q2;
    let log_slope = (beta * (two * q2 * lam - two * q2 * reference.q3 * reference.q3 / lam.powi(3))).abs();
    let h0 = (lit::<T>(0.1) * lam).min(lit::<T>(0.5) / log_slope.max(T::min_positive_value()));
    let failure = std::cell::RefCell::new(None);
    let eval = |x: T, part: fn(C<T>) -> T| match partition_closed(beta, &closed, x) {
        Ok(z) => part(z),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            T::nan()
        }
    };
    let re = derivative(|x| eval(x, |z| z.re), lam, DerivativeOrder::First, h0).value;
    let im = derivative(|x| eval(x, |z| z.im), lam, DerivativeOrder::First, h0).value;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(C::new(re - want, im).norm() / want.abs())
}

/// Level shift that makes [`closed_integrand`] equal to 1 at `lam`.
pub fn antiderivative_offset<T: Real>(coeffs: &ThermoCoeffs<T>, lam: T) -> T {
    let inner = lam + coeffs.q3 / lam;
    coeffs.q2 * inner * inner - coeffs.q1
}

/// The `zeta_2 .. zeta_11` helpers of the published closed forms.
#[derive(Debug, Clone, Copy)]
struct Zetas<T> {
    a: C<T>,
    c: C<T>,
    z2: C<T>,
    z3: C<T>,
    z4: C<T>,
    z8: C<T>,
    z9: C<T>,
    z10: C<T>,
    z11: C<T>,
}

fn zetas<T: Real>(op: &'static str, beta: T, coeffs: &ThermoCoeffs<T>, lam: T) -> Result<Zetas<T>> {
    let x = closed_args(op, beta, coeffs, lam)?;
    let (a, c) = (x.a, x.c);
    let sp = T::PI().sqrt();
    let l2 = lam * lam;
    let q2 = coeffs.q2;
    let q3 = coeffs.q3;
    let r = |v: f64| C::new(lit::<T>(v), T::zero());
    let e_big = C::new(x.big.exp(), T::zero());
    let e2ac = (a * c * lit::<T>(2.0)).exp();
    let e4ac = (a * c * lit::<T>(4.0)).exp();
    let erfc_u = erfc_complex(x.u)?;
    let erfc_v = erfc_complex(x.v)?;
    let z2 = erfc_u + e4ac * erfc_v - r(2.0);
    let z3 = erfc_u - e4ac * erfc_v - r(2.0);
    let big_2ac = (C::new(x.big, T::zero()) + a * c * lit::<T>(2.0)).exp();
    let z4 = a * big_2ac * (lit::<T>(4.0) * lam);
    let z5 = e_big * (a * (lit::<T>(4.0) * l2) + c) - e2ac * a * c * erfc_v * (lit::<T>(8.0) * sp * lam);
    let z6 = (c - a * (lit::<T>(4.0) * l2)) * big_2ac + a * c * (lit::<T>(16.0) * sp * lam);
    let z7 = z5 * erfc_u + z6 * e2ac * erfc_v - e_big * (a * (lit::<T>(4.0) * l2) + c) * lit::<T>(2.0);
    let z8 = e2ac * (z7 * (q3 * q3) - z2 * c * e_big * lam.powi(4)) * (lit::<T>(4.0) * sp * beta * beta * q2 * q2);
    let z9 = c * big_2ac * (a * big_2ac * (lit::<T>(4.0) * lam) - z2 * sp) * (lit::<T>(2.0) * beta * l2 * q2);
    let z10 = a * c * erfc_u * (lit::<T>(4.0) * sp) + a * big_2ac * (lit::<T>(4.0) * lam) - a * c * (lit::<T>(8.0) * sp);
    let z11 = e4ac * a * c * erfc_v * (lit::<T>(4.0) * sp);
    Ok(Zetas {
        a,
        c,
        z2,
        z3,
        z4,
        z8,
        z9,
        z10,
        z11,
    })
}

fn finite<T: Real>(op: &'static str, z: C<T>) -> Result<C<T>> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(KpgmError::overflow(op, format!("non-finite result {z}")))
    }
}

/// Published mean-energy closed form, evaluated as printed.
pub fn mean_energy<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, lam: T) -> Result<C<T>> {
    let z = zetas("mean_energy", beta, coeffs, lam)?;
    let sp = T::PI().sqrt();
    let two = lit::<T>(2.0);
    let numer = z.c * (z.z2 * sp * (two * beta * coeffs.q1 + T::one()) + z.z4) + z.z2 * z.c
        - z.z3 * z.a * (lit::<T>(4.0) * sp * beta * coeffs.q2 * coeffs.q3 * coeffs.q3);
    let denom = z.z2 * z.c * (two * sp * beta);
    finite("mean_energy", numer / denom)
}

/// Published heat-capacity closed form, evaluated as printed.
pub fn heat_capacity<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, lam: T, k: T) -> Result<C<T>> {
    let z = zetas("heat_capacity", beta, coeffs, lam)?;
    let pi = T::PI();
    let ac = z.a * z.c;
    let z22 = z.z2 * z.z2;
    let numer = (-(z22 * ac * (pi * lam)) + z.z8 - z.z9) * (k * beta * beta);
    let denom = z22 * ac * (lit::<T>(2.0) * pi * beta * beta * lam);
    finite("heat_capacity", numer / denom)
}

/// Published entropy closed form, evaluated as printed.
///
/// The logarithm's undefined `zeta_265` is read as `zeta_2`; the principal
/// branch is used.
pub fn entropy<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, lam: T, k: T) -> Result<C<T>> {
    let z = zetas("entropy", beta, coeffs, lam)?;
    let x = closed_args("entropy", beta, coeffs, lam)?;
    let sp = T::PI().sqrt();
    let two = lit::<T>(2.0);
    let log_arg = -(z.z2 * zeta1_exponent(beta, coeffs, &x).exp() * sp) / (z.a * lit::<T>(4.0));
    let second = (z.z10 - z.z11
        + z.z2 * sp * (two * beta * coeffs.q1 - lit::<T>(4.0) * beta * coeffs.q2 * coeffs.q3 + T::one()))
        / (z.z3 * (two * sp));
    finite("entropy", (log_arg.ln() + second) * k)
}

/// `-ln(Z_closed) / beta` (principal branch).
pub fn free_energy<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, lam: T) -> Result<C<T>> {
    let z = partition_closed(beta, coeffs, lam)?;
    if !(z.re > T::zero()) && z.im == T::zero() {
        return Err(KpgmError::domain("free_energy", format!("Z = {z} has no real logarithm")));
    }
    Ok(-z.ln() / beta)
}

/// Published free-energy closed form with its `ln exp(x)` collapsed to `x`.
pub fn free_energy_printed<T: Real>(beta: T, coeffs: &ThermoCoeffs<T>, lam: T) -> Result<C<T>> {
    let z = zetas("free_energy", beta, coeffs, lam)?;
    let x = closed_args("free_energy", beta, coeffs, lam)?;
    let sp = T::PI().sqrt();
    let out = z.z2 * zeta1_exponent(beta, coeffs, &x) * sp / (z.a * (lit::<T>(4.0) * beta));
    finite("free_energy", out)
}

/// One point on `path` with level cap / upper limit `lam`.
pub fn thermo_point<T: Real>(
    path: ThermoPath,
    beta: T,
    coeffs: &ThermoCoeffs<T>,
    lam: T,
    k: T,
) -> Result<ThermoPoint<T>> {
    match path {
        ThermoPath::Direct => {
            let levels = direct_levels(coeffs, lam)?;
            Ok(moments_point(beta, lam, path, ensemble_moments(beta, &levels)?, k))
        }
        ThermoPath::Integral => Ok(moments_point(beta, lam, path, integral_moments(beta, coeffs, lam)?, k)),
        ThermoPath::Closed => {
            let z = partition_closed(beta, coeffs, lam)?;
            Ok(ThermoPoint {
                beta,
                lam,
                path,
                z_re: z.re,
                z_im: z.im,
                u: mean_energy(beta, coeffs, lam)?.re,
                c: heat_capacity(beta, coeffs, lam, k)?.re,
                s: entropy(beta, coeffs, lam, k)?.re,
                f: free_energy(beta, coeffs, lam)?.re,
            })
        }
    }
}

/// Default level cap: `n_max`, or 2 for the closed path when `n_max` is 0
/// (the closed form needs a positive upper limit).
pub fn default_lambda<T: Real>(coeffs: &ThermoCoeffs<T>, path: ThermoPath) -> T {
    if path == ThermoPath::Closed && coeffs.n_max == T::zero() {
        lit(2.0)
    } else {
        coeffs.n_max
    }
}

/// Thermodynamics on a `beta` grid. `lam_override` replaces `n_max` as the
/// level cap / upper limit. Rows come back in input order.
pub fn sweep_thermo<T: Real>(
    spec: &MoleculeSpec<T>,
    ell: u32,
    betas: &[T],
    path: ThermoPath,
    lam_override: Option<T>,
) -> Result<Vec<ThermoPoint<T>>> {
    if betas.iter().any(|&b| !(b > T::zero())) {
        return Err(KpgmError::domain("sweep_thermo", "beta values must be > 0"));
    }
    if betas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(KpgmError::domain("sweep_thermo", "beta values must be increasing"));
    }
    let coeffs = thermo_coefficients(spec, ell)?;
    compute_n_max(&coeffs)?;
    let lam = lam_override.unwrap_or_else(|| default_lambda(&coeffs, path));
    betas.par_iter().map(|&b| thermo_point(path, b, &coeffs, lam, spec.k_boltz)).collect()
}

/// Thermodynamics on a `lam` grid at fixed `beta`.
pub fn sweep_lambda<T: Real>(
    spec: &MoleculeSpec<T>,
    ell: u32,
    beta: T,
    lams: &[T],
    path: ThermoPath,
) -> Result<Vec<ThermoPoint<T>>> {
    let coeffs = thermo_coefficients(spec, ell)?;
    lams.par_iter().map(|&l| thermo_point(path, beta, &coeffs, l, spec.k_boltz)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{gauss_legendre_composite, simpson_adaptive};

    fn derived() -> MoleculeSpec<f64> {
        MoleculeSpec::natural("derived", 1.0, 1.5, 0.5, 1.2, 0.4)
    }

    fn coeffs() -> ThermoCoeffs<f64> {
        thermo_coefficients(&derived(), 0).unwrap()
    }

    #[test]
    fn single_level_sum() {
        let z = partition_direct(1.0, &MoleculeSpec::<f64>::null_coupling(1.0), 0).unwrap();
        assert!((z - 0.125f64.exp()).abs() < 1e-15);
        let p = thermo_point(ThermoPath::Direct, 3.0, &thermo_coefficients(&MoleculeSpec::<f64>::null_coupling(1.0), 0).unwrap(), 0.0, 1.0).unwrap();
        assert!((p.f - -0.125).abs() < 1e-15);
        assert!((p.u - -0.125).abs() < 1e-15);
        assert!(p.c.abs() < 1e-15);
    }

    #[test]
    fn high_temperature_counts_levels() {
        let z = partition_direct(1e-12, &derived(), 0).unwrap();
        assert!((z - 3.0).abs() < 1e-9);
    }

    #[test]
    fn direct_identities() {
        let c = coeffs();
        for &b in &[0.1, 0.5, 1.0, 2.0] {
            let p = thermo_point(ThermoPath::Direct, b, &c, c.n_max, 1.0).unwrap();
            let ln_z = p.z_re.ln();
            assert!((p.s - (ln_z + b * p.u)).abs() < 1e-12);
            assert!((p.f - (p.u - p.s / b)).abs() < 1e-12);
            let levels = direct_levels(&c, c.n_max).unwrap();
            let u_num = -derivative(|x: f64| ensemble_moments(x, &levels).unwrap().ln_z, b, DerivativeOrder::First, 0.05).value;
            assert!((u_num - p.u).abs() < 1e-9);
        }
    }

    #[test]
    fn integral_path_two_rules_agree() {
        let c = coeffs();
        for &b in &[0.1, 0.5, 1.0] {
            let z = partition_integral(b, &c).unwrap();
            let f = |n: f64| (-b * energy_at(n, &c).unwrap()).exp();
            let gl = gauss_legendre_composite(f, 0.0, c.n_max, 8, 10);
            let simpson = simpson_adaptive(f, 0.0, c.n_max, 1e-12).unwrap();
            assert!((gl - simpson).abs() < 1e-8 * gl);
            assert!((z - gl).abs() < 1e-8 * gl);
        }
        let mut flat = c;
        flat.n_max = 0.0;
        assert_eq!(partition_integral(0.5, &flat).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_antiderivative() {
        let c = coeffs();
        for &b in &[0.1, 0.7, 1.5] {
            for &l in &[0.8, 1.6, 2.4, 3.5] {
                let err = antiderivative_residual(b, &c, l).unwrap();
                assert!(err < 1e-6, "beta={b} lam={l}: {err}");
            }
        }
    }

    #[test]
    fn closed_form_imaginary_offset() {
        // Im Z = -zeta_1 (1 - exp(-4 p q)) / (4 p) with p = sqrt(beta Q2), q = p |Q3|
        let c = coeffs();
        let b = 0.5;
        let p = (b * c.q2).sqrt();
        let q = p * c.q3.abs();
        let zeta1 = std::f64::consts::PI.sqrt() * (-b * c.q1 + 2.0 * b * c.q2 * c.q3 + 2.0 * p * q).exp();
        let want = -zeta1 * (1.0 - (-4.0 * p * q).exp()) / (4.0 * p);
        let z = partition_closed(b, &c, 2.0).unwrap();
        assert!((z.im - want).abs() < 1e-10 * want.abs(), "{} vs {want}", z.im);
        let z2 = partition_closed(b, &c, 1.3).unwrap();
        assert!((z2.im - z.im).abs() < 1e-10 * want.abs());
    }

    #[test]
    fn null_coupling_closed_form_vanishes_at_origin() {
        let c = thermo_coefficients(&MoleculeSpec::<f64>::null_coupling(1.0), 0).unwrap();
        let z0 = partition_closed(0.5, &c, 1e-6).unwrap();
        let z1 = partition_closed(0.5, &c, 1.0).unwrap();
        assert!(z0.norm() < 1e-4 * z1.norm());
        assert!(z1.im.abs() < 1e-15);
    }

    #[test]
    fn published_forms_frozen() {
        // literal evaluation of the printed formulas (40-digit reference)
        let c = coeffs();
        let lam = c.n_max;
        let u = mean_energy(0.1, &c, lam).unwrap();
        assert!((u - Complex::new(-8.3538, 5.0252)).norm() < 1e-3, "{u}");
        let cap = heat_capacity(0.1, &c, lam, 1.0).unwrap();
        assert!((cap - Complex::new(-0.004598, -0.28489)).norm() < 1e-4, "{cap}");
    }

    #[test]
    fn free_energy_definition() {
        let c = coeffs();
        let f = free_energy(0.5, &c, c.n_max).unwrap();
        let z = partition_closed(0.5, &c, c.n_max).unwrap();
        assert!((f + z.ln() / 0.5).norm() < 1e-14);
        assert!(free_energy_printed(0.5, &c, c.n_max).unwrap().re.is_finite());
    }

    #[test]
    fn sweeps() {
        let s = derived();
        assert!(sweep_thermo(&s, 0, &[], ThermoPath::Direct, None).unwrap().is_empty());
        let betas: Vec<f64> = (0..50).map(|i| 0.1 + 1.9 * i as f64 / 49.0).collect();
        for path in [ThermoPath::Direct, ThermoPath::Integral, ThermoPath::Closed] {
            let rows = sweep_thermo(&s, 0, &betas, path, None).unwrap();
            assert_eq!(rows.len(), 50);
            assert!(rows.iter().zip(&betas).all(|(r, b)| r.beta == *b && r.path == path));
        }
        let direct = sweep_thermo(&s, 0, &betas, ThermoPath::Direct, None).unwrap();
        assert!(direct.windows(2).all(|w| w[1].z_re > w[0].z_re));
        assert!(sweep_thermo(&s, 0, &[1.0, 0.5], ThermoPath::Direct, None).is_err());
        let lams = sweep_lambda(&s, 0, 0.5, &[1.0, 2.0, 3.0], ThermoPath::Closed).unwrap();
        assert_eq!(lams.iter().map(|p| p.lam).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn path_names_round_trip() {
        for p in [ThermoPath::Direct, ThermoPath::Integral, ThermoPath::Closed] {
            assert_eq!(p.as_str().parse::<ThermoPath>().unwrap(), p);
        }
        assert!("sum".parse::<ThermoPath>().is_err());
    }
}
