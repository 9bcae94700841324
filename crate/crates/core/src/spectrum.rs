//! Bound-state energies.
//!
//! Three routes to the spectrum live here:
//!
//! * [`energy`]: the closed form in terms of `eta` and the couplings, as
//!   published;
//! * [`energy_simplified`]: the `Q1, Q2, Q3, Delta` parameterization that the
//!   thermodynamics consumes;
//! * [`nu_condition_residual`] / [`nu_energy_root`]: the parametric
//!   Nikiforov–Uvarov quantization condition solved numerically.
//!
//! The three are not algebraically equivalent; [`energy_table`] lists them
//! side by side.

use serde::{Deserialize, Serialize};

use crate::error::{KpgmError, Result};
use crate::model::{map_dimensionless, nu_coefficients, DimensionlessSet, MoleculeSpec, QuantumNumbers};
use crate::oracles::{bisect, derivative, DerivativeOrder};
use crate::{lit, Real};

/// Agreement required between the analytic and numeric stationary points.
pub const N_MAX_AGREEMENT: f64 = 1e-8;

/// Coefficients of `E(n) = Q1 - Q2 [(n + Delta) + Q3 / (n + Delta)]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoCoeffs<T> {
    pub q1: T,
    pub q2: T,
    pub q3: T,
    pub delta: T,
    /// Stationary point of `E(n)`, clamped at 0.
    pub n_max: T,
    /// False when the stationary point is not in `n > 0`.
    pub interior: bool,
}

impl<T: Real> ThermoCoeffs<T> {
    /// Same spectrum with every level moved by `offset`.
    pub fn shifted(&self, offset: T) -> Self {
        ThermoCoeffs {
            q1: self.q1 + offset,
            ..*self
        }
    }
}

/// Level cap from [`compute_n_max`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelCap<T> {
    pub n_max: T,
    /// Root of the numerically differentiated `dE/dn`, when interior.
    pub numeric: Option<T>,
    pub interior: bool,
}

impl<T: Real> LevelCap<T> {
    /// Number of integer levels `0..=floor(n_max)`.
    pub fn level_count(&self) -> usize {
        self.n_max.floor().to_usize().unwrap_or(0) + 1
    }
}

fn uint<T: Real>(n: u32) -> T {
    T::from_u32(n).expect("u32 fits in scalar")
}

/// The published closed-form energy
/// `-(alpha^2 hbar^2 / 2 mu) [(n^2 + n + 1/2 + (2n+1) eta - A - 8 mu D b/(alpha hbar)^2)
///  / (2n + 1 + 2 eta)]^2 - 2 mu D b^2 / (alpha hbar)^2`.
pub fn energy<T: Real>(nq: QuantumNumbers, spec: &MoleculeSpec<T>) -> Result<T> {
    let (bracket, tail) = energy_parts(nq, spec)?;
    Ok(bracket + tail)
}

/// The two additive pieces of [`energy`]: the squared-bracket term and the
/// constant tail.
pub fn energy_parts<T: Real>(nq: QuantumNumbers, spec: &MoleculeSpec<T>) -> Result<(T, T)> {
    let dl = map_dimensionless(spec, nq.ell)?;
    if !dl.eta.is_finite() {
        return Err(KpgmError::domain("energy", "eta radicand is negative"));
    }
    let n = uint::<T>(nq.n);
    let two = lit::<T>(2.0);
    let hb2 = spec.hbar * spec.hbar;
    let al2 = spec.alpha * spec.alpha;
    let morse_linear = lit::<T>(8.0) * spec.mu * spec.d * spec.b / (al2 * hb2);
    let numer = n * n + n + lit(0.5) + (two * n + T::one()) * dl.eta - dl.a - morse_linear;
    let denom = two * n + T::one() + two * dl.eta;
    let ratio = numer / denom;
    let tail = -two * spec.mu * spec.d * spec.b * spec.b / (al2 * hb2);
    Ok((-dl.energy_scale() * ratio * ratio, tail))
}

/// `Q1, Q2, Q3, Delta` transcribed term by term, with the level cap.
pub fn thermo_coefficients<T: Real>(spec: &MoleculeSpec<T>, ell: u32) -> Result<ThermoCoeffs<T>> {
    spec.validate()?;
    let hb2 = spec.hbar * spec.hbar;
    let al2 = spec.alpha * spec.alpha;
    let mu = spec.mu;
    let l = uint::<T>(ell);
    let lc = l * (l + T::one());
    let q1 = -lit::<T>(2.0) * mu * spec.d * spec.b * spec.b / (al2 * hb2);
    let q2 = al2 * hb2 / (lit::<T>(8.0) * mu);
    let q3 = -mu * spec.de * spec.re * spec.re / (lit::<T>(2.0) * al2 * hb2)
        - mu * spec.d * spec.b * spec.b / (lit::<T>(8.0) * al2 * hb2)
        - lc / lit(4.0)
        - lit::<T>(4.0) * mu * spec.de / (al2 * hb2);
    let radicand = T::one()
        + lit::<T>(2.0) * mu * spec.de * spec.re * spec.re / (al2 * hb2)
        + mu * spec.d * spec.b * spec.b / (lit::<T>(2.0) * al2 * hb2)
        + lc;
    let delta = lit::<T>(0.5) + lit::<T>(0.5) * radicand.sqrt();
    let (n_max, interior) = analytic_n_max(q3, delta);
    Ok(ThermoCoeffs {
        q1,
        q2,
        q3,
        delta,
        n_max,
        interior,
    })
}

fn analytic_n_max<T: Real>(q3: T, delta: T) -> (T, bool) {
    let candidate = q3.abs().sqrt() - delta;
    if q3 < T::zero() && candidate > T::zero() {
        (candidate, true)
    } else {
        (T::zero(), false)
    }
}

/// `E(n)` at a real `n`; the integral forms of the partition function need
/// non-integer arguments.
pub fn energy_at<T: Real>(n: T, coeffs: &ThermoCoeffs<T>) -> Result<T> {
    let rho = n + coeffs.delta;
    if !(rho > T::zero()) {
        return Err(KpgmError::domain("energy_at", format!("n + Delta = {rho} must be > 0")));
    }
    let inner = rho + coeffs.q3 / rho;
    Ok(coeffs.q1 - coeffs.q2 * inner * inner)
}

/// `Q1 - Q2 [(n + Delta) + Q3 / (n + Delta)]^2`.
pub fn energy_simplified<T: Real>(n: u32, coeffs: &ThermoCoeffs<T>) -> Result<T> {
    energy_at(uint::<T>(n), coeffs)
}

/// The same energy in expanded form,
/// `-(Q2 rho^2 + Q2 Q3^2 / rho^2) - (2 Q2 Q3 - Q1)` with `rho = n + Delta`.
pub fn energy_expanded<T: Real>(n: T, coeffs: &ThermoCoeffs<T>) -> Result<T> {
    let rho = n + coeffs.delta;
    if !(rho > T::zero()) {
        return Err(KpgmError::domain("energy_expanded", format!("n + Delta = {rho} must be > 0")));
    }
    let (q1, q2, q3) = (coeffs.q1, coeffs.q2, coeffs.q3);
    Ok(-(q2 * rho * rho + q2 * q3 * q3 / (rho * rho)) - (lit::<T>(2.0) * q2 * q3 - q1))
}

/// Analytic `dE/dn = -2 Q2 (rho + Q3/rho)(1 - Q3/rho^2)`.
pub fn energy_slope<T: Real>(n: T, coeffs: &ThermoCoeffs<T>) -> T {
    let rho = n + coeffs.delta;
    -lit::<T>(2.0) * coeffs.q2 * (rho + coeffs.q3 / rho) * (T::one() - coeffs.q3 / (rho * rho))
}

/// Stationary point of `E(n)`, cross-checked against a bisection root of the
/// numerically differentiated energy.
///
/// Fails with a domain error if the two disagree by more than
/// [`N_MAX_AGREEMENT`].
pub fn compute_n_max<T: Real>(coeffs: &ThermoCoeffs<T>) -> Result<LevelCap<T>> {
    if !(coeffs.q2 > T::zero()) {
        return Err(KpgmError::domain("compute_n_max", format!("Q2 must be > 0, got {}", coeffs.q2)));
    }
    let (n_max, interior) = analytic_n_max(coeffs.q3, coeffs.delta);
    if !interior {
        return Ok(LevelCap {
            n_max,
            numeric: None,
            interior,
        });
    }
    let slope = |n: T| {
        let h = lit::<T>(0.05) * (n + coeffs.delta);
        derivative(|m: T| energy_at(m, coeffs).unwrap_or(T::nan()), n, DerivativeOrder::First, h).value
    };
    let hi = lit::<T>(2.0) * (n_max + coeffs.delta);
    let root = bisect(slope, T::zero(), hi, T::epsilon() * hi)?;
    if (root - n_max).abs() > lit::<T>(N_MAX_AGREEMENT) * n_max.max(T::one()) {
        return Err(KpgmError::domain(
            "compute_n_max",
            format!("analytic n_max {n_max} and numeric root {root} disagree"),
        ));
    }
    Ok(LevelCap {
        n_max,
        numeric: Some(root),
        interior,
    })
}

/// Standard parametric-NU quantization residual
/// `c2 n - (2n+1) c5 + (2n+1)(sqrt c9 + c3 sqrt c8) + n(n-1) c3 + c7
///  + 2 c3 c8 + 2 sqrt(c8 c9)`.
///
/// The published condition has operators missing between `c7` and
/// `2 c3 c8`; reading the gap as a product does not reduce to any known
/// spectrum, so only the additive standard form is implemented.
///
/// Energies above the asymptote (`c8 < 0`) are rejected.
pub fn nu_condition_residual<T: Real>(energy: T, n: u32, dimless: &DimensionlessSet<T>) -> Result<T> {
    let c = nu_coefficients(dimless, energy)?;
    let n = uint::<T>(n);
    let two = lit::<T>(2.0);
    let odd = two * n + T::one();
    let (r8, r9) = (c.c8.sqrt(), c.c9.sqrt());
    Ok(c.c2 * n - odd * c.c5 + odd * (r9 + c.c3 * r8) + n * (n - T::one()) * c.c3 + c.c7
        + two * c.c3 * c.c8
        + two * r8 * r9)
}

/// `gamma` solving the quantization condition for level `n`; `None` when
/// the required `gamma` is negative (no bound state).
pub fn nu_gamma<T: Real>(n: u32, dimless: &DimensionlessSet<T>) -> Option<T> {
    let n = uint::<T>(n);
    let two = lit::<T>(2.0);
    let odd = two * n + T::one();
    let k = n * n + n + lit(0.5) + odd * dimless.eta - dimless.a - dimless.f;
    let gamma = -k / (odd + two * dimless.eta);
    (gamma >= T::zero()).then_some(gamma)
}

/// Energy at which [`nu_condition_residual`] vanishes, found by bisection.
/// `None` when level `n` is unbound.
pub fn nu_energy_root<T: Real>(n: u32, dimless: &DimensionlessSet<T>) -> Result<Option<T>> {
    let Some(gamma) = nu_gamma(n, dimless) else {
        return Ok(None);
    };
    let scale = dimless.energy_scale();
    let top = scale * dimless.c;
    let g_far = lit::<T>(2.0) * gamma + T::one();
    let bottom = scale * (dimless.c - g_far * g_far);
    let f = |e: T| nu_condition_residual(e, n, dimless).unwrap_or(T::nan());
    let width = top - bottom;
    bisect(f, bottom, top, lit::<T>(4.0) * T::epsilon() * width.max(top.abs())).map(Some)
}

/// The energy implied by [`nu_gamma`]: `(hbar alpha)^2 / 2 mu (c - gamma^2)`.
pub fn nu_energy_closed<T: Real>(n: u32, dimless: &DimensionlessSet<T>) -> Option<T> {
    nu_gamma(n, dimless).map(|g| dimless.energy_scale() * (dimless.c - g * g))
}

/// One line of the side-by-side energy comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow<T> {
    pub n: u32,
    pub ell: u32,
    pub e_eq13: T,
    pub e_eq23: T,
    /// Residual of the NU condition at `e_eq13`; `None` above the asymptote.
    pub nu_residual: Option<T>,
}

pub fn energy_table<T: Real>(spec: &MoleculeSpec<T>, states: &[QuantumNumbers]) -> Result<Vec<EnergyRow<T>>> {
    states
        .iter()
        .map(|&nq| {
            let e13 = energy(nq, spec)?;
            let coeffs = thermo_coefficients(spec, nq.ell)?;
            let e23 = energy_simplified(nq.n, &coeffs)?;
            let dl = map_dimensionless(spec, nq.ell)?;
            let residual = match nu_condition_residual(e13, nq.n, &dl) {
                Ok(r) => Some(r),
                Err(KpgmError::Domain { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(EnergyRow {
                n: nq.n,
                ell: nq.ell,
                e_eq13: e13,
                e_eq23: e23,
                nu_residual: residual,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn derived() -> MoleculeSpec<f64> {
        MoleculeSpec::natural("derived", 1.0, 1.5, 0.5, 1.2, 0.4)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn null_coupling_collapse() {
        let spec = MoleculeSpec::null_coupling(1.0);
        let e: Vec<f64> = (0..3).map(|n| energy(QuantumNumbers::new(n, 0), &spec).unwrap()).collect();
        assert_eq!(e, vec![-0.125, -0.5, -1.125]);
    }

    #[test]
    fn published_energy_frozen() {
        let s = derived();
        let cases = [
            ((0, 0), -9.353135104336276),
            ((1, 0), -9.07577960441231),
            ((2, 0), -9.00030458435571),
            ((0, 1), -9.327390004021429),
        ];
        for ((n, l), want) in cases {
            let got = energy(QuantumNumbers::new(n, l), &s).unwrap();
            assert!(close(got, want, 1e-14), "n={n} l={l}: {got}");
        }
    }

    #[test]
    fn thermo_coefficients_frozen() {
        let c = thermo_coefficients(&derived(), 0).unwrap();
        assert!(close(c.q1, -9.0, 1e-15));
        assert!(close(c.q2, 0.02, 1e-15));
        assert!(close(c.q3, -32.59375, 1e-15));
        assert!(close(c.delta, 3.30066956280101, 1e-13));
        assert!(close(c.n_max, 2.408424060533608, 1e-13));
        assert!(c.interior);

        let q = thermo_coefficients(&MoleculeSpec::natural("x", 0.7, 1.0, 0.2, 0.3, 2.0), 0).unwrap();
        assert_eq!(q.q2, 0.5);
        let null = thermo_coefficients(&MoleculeSpec::null_coupling(1.0), 0).unwrap();
        assert_eq!((null.q1, null.q3, null.delta), (0.0, 0.0, 1.0));
        assert_eq!(energy_simplified(0, &null).unwrap(), -0.125);
    }

    #[test]
    fn n_max_cases() {
        let mk = |q3: f64, delta: f64| ThermoCoeffs {
            q1: 0.0,
            q2: 0.1,
            q3,
            delta,
            n_max: 0.0,
            interior: false,
        };
        let cap = compute_n_max(&mk(-4.0, 1.0)).unwrap();
        assert!(cap.interior);
        assert!((cap.n_max - 1.0).abs() < 1e-15);
        assert!((cap.numeric.unwrap() - 1.0).abs() < 1e-8);
        let flat = compute_n_max(&mk(0.0, 1.0)).unwrap();
        assert!(!flat.interior);
        assert_eq!(flat.n_max, 0.0);
        assert_eq!(flat.level_count(), 1);

        let derived_cap = compute_n_max(&thermo_coefficients(&derived(), 0).unwrap()).unwrap();
        assert!((derived_cap.numeric.unwrap() - derived_cap.n_max).abs() < N_MAX_AGREEMENT);
        assert_eq!(derived_cap.level_count(), 3);
    }

    #[test]
    fn energy_rises_to_the_cap_then_falls() {
        // E(n) peaks at n_max: dE/dn > 0 below, < 0 above.
        let c = thermo_coefficients(&derived(), 0).unwrap();
        let grid: Vec<f64> = (0..=40).map(|i| c.n_max * i as f64 / 40.0).collect();
        for w in grid.windows(2) {
            assert!(energy_at(w[1], &c).unwrap() > energy_at(w[0], &c).unwrap());
        }
        assert!(energy_slope(c.n_max * 0.99, &c) > 0.0);
        assert!(energy_slope(c.n_max * 1.01, &c) < 0.0);
    }

    #[test]
    fn residual_at_published_null_energy() {
        // The published energy is the negative-gamma branch: the residual
        // equals 2 (n + 1)^2 there, not zero.
        let spec = MoleculeSpec::null_coupling(1.0);
        let dl = map_dimensionless(&spec, 0).unwrap();
        for n in 0..3u32 {
            let e = energy(QuantumNumbers::new(n, 0), &spec).unwrap();
            let r = nu_condition_residual(e, n, &dl).unwrap();
            let want = 2.0 * ((n + 1) as f64).powi(2);
            assert!((r - want).abs() < 1e-12, "n={n}: {r}");
        }
        // and no level is bound without coupling
        assert_eq!(nu_energy_root(0, &dl).unwrap(), None);
    }

    #[test]
    fn residual_monotone_in_energy() {
        let spec = MoleculeSpec::null_coupling(1.0);
        let dl = map_dimensionless(&spec, 0).unwrap();
        let es: Vec<f64> = (0..50).map(|i| -5.0 + 0.1 * i as f64).collect();
        let rs: Vec<f64> = es.iter().map(|&e| nu_condition_residual(e, 1, &dl).unwrap()).collect();
        assert!(rs.windows(2).all(|w| w[1] < w[0]));
        assert!(nu_condition_residual(0.1, 0, &dl).is_err());
    }

    #[test]
    fn nu_root_matches_closed_gamma() {
        let s = derived();
        for (ell, n, want) in [(0, 0, 0.331626460275), (0, 1, 0.48875632609)] {
            let dl = map_dimensionless(&s, ell).unwrap();
            let root = nu_energy_root(n, &dl).unwrap().unwrap();
            let closed = nu_energy_closed(n, &dl).unwrap();
            assert!((root - closed).abs() < 1e-12);
            assert!((root - want).abs() < 1e-10, "{root}");
        }
        let dl = map_dimensionless(&s, 0).unwrap();
        assert_eq!(nu_energy_root(2, &dl).unwrap(), None);
    }

    #[test]
    fn table_reports_every_state() {
        let states: Vec<_> = (0..3).map(|n| QuantumNumbers::new(n, 0)).collect();
        let rows = energy_table(&derived(), &states).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.nu_residual.is_some()));
    }

    proptest! {
        #[test]
        fn compact_and_expanded_forms_agree(
            q1 in -20.0f64..0.0, q2 in 1e-3f64..2.0, q3 in -60.0f64..0.0,
            delta in 0.5f64..6.0, n in 0.0f64..10.0,
        ) {
            let c = ThermoCoeffs { q1, q2, q3, delta, n_max: 0.0, interior: false };
            let a = energy_at(n, &c).unwrap();
            let b = energy_expanded(n, &c).unwrap();
            prop_assert!((a - b).abs() <= 1e-13 * a.abs(), "{} vs {}", a, b);
        }

        #[test]
        fn bracket_invariant_under_joint_scaling(c in 0.1f64..10.0, n in 0u32..4, ell in 0u32..3) {
            let s = derived();
            let mut t = s.clone();
            t.mu *= c;
            t.hbar *= c.sqrt();
            let (b0, _) = energy_parts(QuantumNumbers::new(n, ell), &s).unwrap();
            let (b1, _) = energy_parts(QuantumNumbers::new(n, ell), &t).unwrap();
            prop_assert!((b0 - b1).abs() <= 1e-12 * b0.abs());
        }
    }
}
