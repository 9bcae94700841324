//! Molecule parameters, the KPGM potential, its exponential approximation
//! and the dimensionless coefficient sets used by the spectrum.
//!
//! Throughout the crate the radial coordinate is mapped to
//! `s = exp(-alpha * r)`, so `s` runs from 1 at the origin down to 0 at
//! infinity.

use serde::{Deserialize, Serialize};

use crate::error::{KpgmError, Result};
use crate::{lit, Real};

/// `1 - exp(-alpha r)` below this magnitude is treated as a singular Morse
/// denominator.
pub const DENOMINATOR_GUARD: f64 = 1e-14;

/// Physical constants of one diatomic system, in natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeSpec<T> {
    pub name: String,
    /// Reduced mass.
    pub mu: T,
    pub hbar: T,
    /// Kratzer dissociation energy.
    pub de: T,
    /// Equilibrium bond length.
    pub re: T,
    /// Strength of the generalized Morse term.
    pub d: T,
    /// Morse shape parameter.
    pub b: T,
    /// Screening parameter (inverse length).
    pub alpha: T,
    pub k_boltz: T,
}

impl<T: Real> MoleculeSpec<T> {
    /// A spec with `mu = hbar = k = 1`.
    pub fn natural(name: impl Into<String>, de: T, re: T, d: T, b: T, alpha: T) -> Self {
        MoleculeSpec {
            name: name.into(),
            mu: T::one(),
            hbar: T::one(),
            de,
            re,
            d,
            b,
            alpha,
            k_boltz: T::one(),
        }
    }

    /// Both couplings switched off; only the screening length survives.
    pub fn null_coupling(alpha: T) -> Self {
        Self::natural("null-coupling", T::zero(), T::one(), T::zero(), T::zero(), alpha)
    }

    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, T); 5] = [
            ("mu", self.mu),
            ("hbar", self.hbar),
            ("re", self.re),
            ("alpha", self.alpha),
            ("k_boltz", self.k_boltz),
        ];
        for (name, value) in positive {
            if !(value > T::zero()) || !value.is_finite() {
                return Err(KpgmError::invalid(name, format!("{name} must be > 0, got {value}")));
            }
        }
        for (name, value) in [("De", self.de), ("D", self.d)] {
            if !(value >= T::zero()) || !value.is_finite() {
                return Err(KpgmError::invalid(name, format!("{name} must be >= 0, got {value}")));
            }
        }
        if !self.b.is_finite() {
            return Err(KpgmError::invalid("b", "b must be finite"));
        }
        Ok(())
    }

    /// `hbar^2 alpha^2 / (2 mu)`: the energy unit of the dimensionless map.
    pub fn energy_scale(&self) -> T {
        self.hbar * self.hbar * self.alpha * self.alpha / (lit::<T>(2.0) * self.mu)
    }
}

/// Vibrational and rotational quantum numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub ell: u32,
}

impl QuantumNumbers {
    pub const fn new(n: u32, ell: u32) -> Self {
        QuantumNumbers { n, ell }
    }
}

/// Dimensionless couplings of the transformed radial equation.
///
/// With `k = 2 mu / (alpha^2 hbar^2)`:
/// `a = 8 mu De re / (alpha hbar^2)`, `b = k 4 De re^2`, `c = k D`,
/// `f = 2 k D b`, `g = k D b^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessSet<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub f: T,
    pub g: T,
    /// `ell (ell + 1)`.
    pub lambda_cent: T,
    pub eta: T,
    /// Always `eta + 1/2`.
    pub delta: T,
    pub alpha: T,
    pub mu: T,
    pub hbar: T,
}

impl<T: Real> DimensionlessSet<T> {
    /// `xi^2 = -2 mu E / (alpha^2 hbar^2)`.
    pub fn xi2_of(&self, energy: T) -> T {
        -lit::<T>(2.0) * self.mu * energy / (self.alpha * self.alpha * self.hbar * self.hbar)
    }

    /// `gamma = sqrt(c + xi^2)`; real only for `E <= D`.
    pub fn gamma_of(&self, energy: T) -> Result<T> {
        let radicand = self.c + self.xi2_of(energy);
        if radicand < T::zero() {
            return Err(KpgmError::domain(
                "gamma_of",
                format!("c + xi^2 = {radicand} < 0: energy {energy} lies above the asymptote"),
            ));
        }
        Ok(radicand.sqrt())
    }

    /// Coefficient of `s^2` in the effective-potential numerator.
    pub fn quadratic_sum(&self) -> T {
        self.a + self.b + self.c + self.f + self.g + lit::<T>(4.0) * self.lambda_cent
    }

    /// Coefficient of `-s` in the effective-potential numerator.
    pub fn linear_sum(&self) -> T {
        self.a + lit::<T>(2.0) * self.c + self.f
    }

    /// `hbar^2 alpha^2 / (2 mu)`.
    pub fn energy_scale(&self) -> T {
        self.hbar * self.hbar * self.alpha * self.alpha / (lit::<T>(2.0) * self.mu)
    }
}

/// Parametric Nikiforov–Uvarov constants `c1..c13` and `Omega1..Omega3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NUCoefficients<T> {
    pub omega1: T,
    pub omega2: T,
    pub omega3: T,
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub c4: T,
    pub c5: T,
    pub c6: T,
    pub c7: T,
    pub c8: T,
    pub c9: T,
    pub c10: T,
    pub c11: T,
    pub c12: T,
    pub c13: T,
    /// `xi^2` of the energy the set was built for.
    pub xi2: T,
}

fn check_radius<T: Real>(op: &'static str, r: T) -> Result<()> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(KpgmError::domain(op, format!("r must be > 0, got {r}")));
    }
    Ok(())
}

/// `1 - exp(-alpha r)` without cancellation.
fn one_minus_s<T: Real>(alpha: T, r: T) -> T {
    -(-alpha * r).exp_m1()
}

/// The KPGM potential
/// `-2 De (re/r - re^2/(2 r^2)) + D (1 - b s/(1 - s))^2` with `s = exp(-alpha r)`.
pub fn potential<T: Real>(r: T, spec: &MoleculeSpec<T>) -> Result<T> {
    spec.validate()?;
    check_radius("potential", r)?;
    let denom = one_minus_s(spec.alpha, r);
    if denom.abs() < lit(DENOMINATOR_GUARD) {
        return Err(KpgmError::domain(
            "potential",
            format!("Morse denominator 1 - exp(-alpha r) = {denom} underflows"),
        ));
    }
    let s = (-spec.alpha * r).exp();
    let ratio = spec.re / r;
    let kratzer = -lit::<T>(2.0) * spec.de * (ratio - ratio * ratio / lit(2.0));
    let bracket = T::one() - spec.b * s / denom;
    Ok(kratzer + spec.d * bracket * bracket)
}

/// Exponential stand-ins for `1/r` and `1/r^2`:
/// `(2 alpha s / (1 - s), 4 alpha^2 s^2 / (1 - s)^2)`.
pub fn greene_aldrich_inverse_r<T: Real>(r: T, alpha: T) -> Result<(T, T)> {
    check_radius("greene_aldrich_inverse_r", r)?;
    if !(alpha > T::zero()) {
        return Err(KpgmError::domain(
            "greene_aldrich_inverse_r",
            format!("alpha must be > 0, got {alpha}"),
        ));
    }
    let denom = one_minus_s(alpha, r);
    let s = (-alpha * r).exp();
    let s2 = (-lit::<T>(2.0) * alpha * r).exp();
    let inv_r = lit::<T>(2.0) * alpha * s / denom;
    let inv_r2 = lit::<T>(4.0) * alpha * alpha * s2 / (denom * denom);
    Ok((inv_r, inv_r2))
}

/// Maps a molecule and rotational number onto the dimensionless couplings.
pub fn map_dimensionless<T: Real>(spec: &MoleculeSpec<T>, ell: u32) -> Result<DimensionlessSet<T>> {
    spec.validate()?;
    let hb2 = spec.hbar * spec.hbar;
    let al2 = spec.alpha * spec.alpha;
    let two_mu = lit::<T>(2.0) * spec.mu;
    let a = lit::<T>(8.0) * spec.mu * spec.de * spec.re / (spec.alpha * hb2);
    let b = lit::<T>(8.0) * spec.mu * spec.de * spec.re * spec.re / (al2 * hb2);
    let c = two_mu * spec.d / (al2 * hb2);
    let f = lit::<T>(4.0) * spec.mu * spec.d * spec.b / (al2 * hb2);
    let g = two_mu * spec.d * spec.b * spec.b / (al2 * hb2);
    let ell_t = T::from_u32(ell).expect("ell fits in scalar");
    let lambda_cent = ell_t * (ell_t + T::one());
    let radicand = lit::<T>(0.25) + b + g + lit::<T>(4.0) * lambda_cent;
    let eta = radicand.sqrt();
    Ok(DimensionlessSet {
        a,
        b,
        c,
        f,
        g,
        lambda_cent,
        eta,
        delta: lit::<T>(0.5) + eta,
        alpha: spec.alpha,
        mu: spec.mu,
        hbar: spec.hbar,
    })
}

/// Builds the parametric NU constants for the transformed equation at
/// energy `energy`.
///
/// The `Omega` coefficients are read off the transformed equation and
/// `c4..c13` follow from the general parametric relations
/// (`c6 = c5^2 + Omega1`, `c8 = c4^2 + Omega3`, ...). The bound-state
/// requirement is `c8 = xi^2 + c >= 0`, i.e. `E` at or below the
/// asymptote `D`.
pub fn nu_coefficients<T: Real>(dimless: &DimensionlessSet<T>, energy: T) -> Result<NUCoefficients<T>> {
    let xi2 = dimless.xi2_of(energy);
    let omega1 = xi2 + dimless.quadratic_sum();
    let omega2 = lit::<T>(2.0) * xi2 + dimless.linear_sum();
    let omega3 = xi2 + dimless.c;

    let one = T::one();
    let (c1, c2, c3) = (one, one, one);
    let c4 = lit::<T>(0.5) * (one - c1);
    let c5 = lit::<T>(0.5) * (c2 - lit::<T>(2.0) * c3);
    let c6 = c5 * c5 + omega1;
    let c7 = lit::<T>(2.0) * c4 * c5 - omega2;
    let c8 = c4 * c4 + omega3;
    let c9 = c3 * c7 + c3 * c3 * c8 + c6;
    if c8 < T::zero() {
        return Err(KpgmError::domain(
            "nu_coefficients",
            format!("c8 = {c8} < 0: energy {energy} is not a bound energy"),
        ));
    }
    if c9 < T::zero() {
        return Err(KpgmError::domain("nu_coefficients", format!("c9 = {c9} < 0")));
    }
    let (r8, r9) = (c8.sqrt(), c9.sqrt());
    Ok(NUCoefficients {
        omega1,
        omega2,
        omega3,
        c1,
        c2,
        c3,
        c4,
        c5,
        c6,
        c7,
        c8,
        c9,
        c10: c1 + lit::<T>(2.0) * c4 + lit::<T>(2.0) * r8,
        c11: c2 - lit::<T>(2.0) * c5 + lit::<T>(2.0) * (r9 + c3 * r8),
        c12: c4 + r8,
        c13: c5 - (r9 + c3 * r8),
        xi2,
    })
}

/// The r-space potential whose radial equation maps exactly onto the
/// transformed hypergeometric-type equation:
/// `(hbar^2 alpha^2 / 2 mu) [P s^2 - Q s + c] / (1 - s)^2`.
pub fn effective_potential_approx<T: Real>(r: T, spec: &MoleculeSpec<T>, ell: u32) -> Result<T> {
    check_radius("effective_potential_approx", r)?;
    let dimless = map_dimensionless(spec, ell)?;
    Ok(effective_potential_from(&dimless, r))
}

/// [`effective_potential_approx`] for an already mapped coefficient set.
pub fn effective_potential_from<T: Real>(dimless: &DimensionlessSet<T>, r: T) -> T {
    let s = (-dimless.alpha * r).exp();
    let denom = one_minus_s(dimless.alpha, r);
    let numer = dimless.quadratic_sum() * s * s - dimless.linear_sum() * s + dimless.c;
    dimless.energy_scale() * numer / (denom * denom)
}

/// Largest radius needed for the effective potential to sit within `tol`
/// of its asymptote.
pub fn asymptote_radius<T: Real>(dimless: &DimensionlessSet<T>, tol: T) -> T {
    // V_eff - V_inf ~ scale * [(P - c) s^2 - (Q - 2c) s] / (1 - s)^2 -> leading term in s.
    let lead = dimless.energy_scale()
        * ((dimless.linear_sum() - lit::<T>(2.0) * dimless.c).abs()
            + (dimless.quadratic_sum() - dimless.c).abs());
    if lead <= tol {
        return T::zero();
    }
    (lead / tol).ln() / dimless.alpha
}
