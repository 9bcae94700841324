//! Radial wavefunctions `N s^gamma (1 - s)^delta P_n^(2 gamma, 2 delta - 1)(1 - 2 s)`
//! with `s = exp(-alpha r)`.
//!
//! `gamma` is evaluated at each state's own energy from
//! [`spectrum::energy`](crate::spectrum::energy). By default the amplitude is
//! normalized by quadrature; the published closed-form constant is kept
//! alongside for comparison and can be forced with [`NormMode::Closed`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KpgmError, Result};
use crate::model::{map_dimensionless, MoleculeSpec, QuantumNumbers};
use crate::oracles::quad_adaptive;
use crate::specfun::{jacobi, ln_gamma};
use crate::spectrum::energy;
use crate::{lit, Real};

/// Relative tolerance of the norm integrals.
pub const NORM_TOL: f64 = 1e-10;

/// Largest exponent accepted before exponentiating a log-space constant.
const MAX_LOG: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    /// Normalize by quadrature of the unnormalized shape.
    #[default]
    Quadrature,
    /// Use the published closed-form constant.
    Closed,
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSample<T> {
    pub n: u32,
    pub ell: u32,
    pub r: T,
    pub psi: T,
    pub rho: T,
}

/// Closed-form normalization
/// `sqrt(2 alpha n! G(2g+2d+n) G(2g+2d+2n) / (2^(2g+2d) G(2g+n) G(2d+n+1)))`,
/// assembled in log space.
pub fn normalization_constant<T: Real>(n: u32, gamma: T, delta: T, alpha: T) -> Result<T> {
    Ok(ln_normalization_constant(n, gamma, delta, alpha)?.exp())
}

/// Logarithm of [`normalization_constant`].
pub fn ln_normalization_constant<T: Real>(n: u32, gamma: T, delta: T, alpha: T) -> Result<T> {
    let half = ln_constant_unchecked(n, gamma, delta, alpha)?;
    if half.abs() > lit(MAX_LOG) || !half.is_finite() {
        return Err(KpgmError::overflow("normalization_constant", format!("log value {half}")));
    }
    Ok(half)
}

fn ln_constant_unchecked<T: Real>(n: u32, gamma: T, delta: T, alpha: T) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(KpgmError::domain("normalization_constant", format!("alpha must be > 0, got {alpha}")));
    }
    let nf = T::from_u32(n).expect("u32 fits in scalar");
    let two = lit::<T>(2.0);
    let gd = two * gamma + two * delta;
    let args = [
        ("n + 1", nf + T::one()),
        ("2gamma + 2delta + n", gd + nf),
        ("2gamma + 2delta + 2n", gd + two * nf),
        ("2gamma + n", two * gamma + nf),
        ("2delta + n + 1", two * delta + nf + T::one()),
    ];
    for (what, x) in args {
        if !(x > T::zero()) {
            return Err(KpgmError::domain("normalization_constant", format!("Gamma argument {what} = {x} <= 0")));
        }
    }
    let lg = |x: T| ln_gamma(x);
    let log2 = (two * alpha).ln() + lg(args[0].1)? + lg(args[1].1)? + lg(args[2].1)?
        - gd * T::LN_2()
        - lg(args[3].1)?
        - lg(args[4].1)?;
    Ok(lit::<T>(0.5) * log2)
}

fn exp_checked<T: Real>(op: &'static str, x: T) -> Result<T> {
    if x.abs() > lit(MAX_LOG) || !x.is_finite() {
        return Err(KpgmError::overflow(op, format!("log value {x}")));
    }
    Ok(x.exp())
}

/// A bound state ready for evaluation.
///
/// The stored shape is `s^gamma (1 - s)^delta P(1 - 2s)` divided by
/// `exp(log_scale)`, the peak of the envelope, so that it stays
/// representable for large exponents. Constants and norms refer to the
/// unscaled shape unless stated otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialState<T> {
    pub n: u32,
    pub ell: u32,
    /// Energy the state was built at (published closed form).
    pub energy: T,
    pub gamma: T,
    pub delta: T,
    pub alpha: T,
    /// Log of the envelope maximum divided out of [`shape`](Self::shape).
    pub log_scale: T,
    /// `ln sqrt(int_0^inf shape^2 dr)` of the unscaled shape.
    pub ln_numeric_norm: T,
    /// Log of the published constant; `None` if its Gamma arguments are
    /// out of domain.
    pub ln_closed_constant: Option<T>,
    pub mode: NormMode,
    /// Constant applied to the scaled shape.
    pub constant: T,
}

impl<T: Real> RadialState<T> {
    pub fn new(nq: QuantumNumbers, spec: &MoleculeSpec<T>, mode: NormMode) -> Result<Self> {
        let e = energy(nq, spec)?;
        let dl = map_dimensionless(spec, nq.ell)?;
        let gamma = dl.gamma_of(e)?;
        Self::from_parameters(nq, e, gamma, dl.delta, spec.alpha, mode)
    }

    /// Builds a state from explicit exponents.
    pub fn from_parameters(nq: QuantumNumbers, energy: T, gamma: T, delta: T, alpha: T, mode: NormMode) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(KpgmError::domain("wavefunction", format!("gamma must be > 0, got {gamma}")));
        }
        if !(delta > lit(0.5)) {
            return Err(KpgmError::domain("wavefunction", format!("delta must be > 1/2, got {delta}")));
        }
        let s_peak = gamma / (gamma + delta);
        let log_scale = gamma * s_peak.ln() + delta * (-s_peak).ln_1p();
        let mut state = RadialState {
            n: nq.n,
            ell: nq.ell,
            energy,
            gamma,
            delta,
            alpha,
            log_scale,
            ln_numeric_norm: T::zero(),
            ln_closed_constant: ln_constant_unchecked(nq.n, gamma, delta, alpha).ok(),
            mode,
            constant: T::one(),
        };
        let scaled_norm = state.scaled_norm()?;
        state.ln_numeric_norm = scaled_norm.ln() + log_scale;
        state.constant = match mode {
            NormMode::Quadrature => T::one() / scaled_norm,
            NormMode::Closed => {
                let ln_c = state.ln_closed_constant.ok_or_else(|| {
                    KpgmError::domain("normalization_constant", "closed form undefined for this state")
                })?;
                exp_checked("normalization_constant", ln_c + log_scale)?
            }
        };
        Ok(state)
    }

    /// Shape at `r`, scaled by `exp(-log_scale)`.
    pub fn shape(&self, r: T) -> Result<T> {
        if !(r > T::zero()) {
            return Err(KpgmError::domain("wavefunction_value", format!("r must be > 0, got {r}")));
        }
        let ar = self.alpha * r;
        let one_minus_s = -(-ar).exp_m1();
        let s = (-ar).exp();
        let two = lit::<T>(2.0);
        let envelope = (-self.gamma * ar + self.delta * one_minus_s.ln() - self.log_scale).exp();
        if envelope == T::zero() {
            return Ok(T::zero());
        }
        let p = jacobi(self.n, two * self.gamma, two * self.delta - T::one(), T::one() - two * s)?;
        Ok(envelope * p)
    }

    pub fn value(&self, r: T) -> Result<T> {
        Ok(self.constant * self.shape(r)?)
    }

    /// `sqrt(int_0^inf shape^2 dr)` of the unscaled shape; may overflow or
    /// underflow where [`ln_numeric_norm`](Self::ln_numeric_norm) does not.
    pub fn numeric_norm(&self) -> T {
        self.ln_numeric_norm.exp()
    }

    /// Published constant, if representable.
    pub fn closed_constant(&self) -> Option<T> {
        self.ln_closed_constant.and_then(|l| exp_checked("normalization_constant", l).ok())
    }

    /// `sqrt(int_0^inf shape^2 dr)` of the scaled shape, integrated in `s`
    /// where `dr = ds / (alpha s)`. The `s` weight is sharply peaked for
    /// large exponents, so the interval is split around its mode.
    fn scaled_norm(&self) -> Result<T> {
        let two = lit::<T>(2.0);
        let (a, b) = (two * self.gamma, two * self.delta - T::one());
        let n = self.n;
        let (g, d, shift) = (self.gamma, self.delta, two * self.log_scale);
        let integrand = |s: T| {
            if s <= T::zero() || s >= T::one() {
                return T::zero();
            }
            let p = jacobi(n, a, b, T::one() - two * s).unwrap_or(T::nan());
            let w = ((two * g - T::one()) * s.ln() + two * d * (-s).ln_1p() - shift).exp();
            w * p * p
        };
        let mode = ((two * g - T::one()) / (two * g - T::one() + two * d)).max(T::zero());
        let width = (mode.max(lit(1e-300)) * (T::one() - mode) / (two * g + two * d)).sqrt();
        let reach = lit::<T>(10.0 + 4.0 * f64::from(n)) * width;
        let mut cuts = vec![T::zero(), mode - reach, mode, mode + reach, T::one()];
        cuts.retain(|&c| c >= T::zero() && c <= T::one());
        cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        cuts.dedup();
        let mut integral = T::zero();
        for w in cuts.windows(2) {
            integral = integral + quad_adaptive(integrand, w[0], w[1], lit(NORM_TOL))?;
        }
        let integral = integral / self.alpha;
        if !(integral > T::zero()) {
            return Err(KpgmError::domain("numeric_norm", format!("norm integral {integral} is not positive")));
        }
        Ok(integral.sqrt())
    }

    /// Published constant divided by the quadrature constant.
    pub fn closed_to_quadrature_ratio(&self) -> Option<T> {
        self.ln_closed_to_quadrature_ratio().and_then(|l| exp_checked("closed_to_quadrature_ratio", l).ok())
    }

    pub fn ln_closed_to_quadrature_ratio(&self) -> Option<T> {
        self.ln_closed_constant.map(|c| c + self.ln_numeric_norm)
    }
}

/// Normalized radial wavefunction at `r` for state `nq`.
pub fn wavefunction_value<T: Real>(r: T, nq: QuantumNumbers, spec: &MoleculeSpec<T>) -> Result<T> {
    RadialState::new(nq, spec, NormMode::Quadrature)?.value(r)
}

/// `|psi(r)|^2`.
pub fn probability_density<T: Real>(r: T, nq: QuantumNumbers, spec: &MoleculeSpec<T>) -> Result<T> {
    let p = wavefunction_value(r, nq, spec)?;
    Ok(p * p)
}

/// `sqrt(int_0^inf shape^2 dr)` of the unnormalized shape of `nq`.
pub fn numeric_norm<T: Real>(nq: QuantumNumbers, spec: &MoleculeSpec<T>) -> Result<T> {
    let st = RadialState::new(nq, spec, NormMode::Quadrature)?;
    exp_checked("numeric_norm", st.ln_numeric_norm)
}

/// Evaluates every state on `grid`; rows are state-major, then by `r`.
pub fn sample_states<T: Real>(
    grid: &[T],
    states: &[QuantumNumbers],
    spec: &MoleculeSpec<T>,
    mode: NormMode,
) -> Result<Vec<RadialSample<T>>> {
    if grid.iter().any(|&r| !(r > T::zero())) {
        return Err(KpgmError::domain("sample_states", "grid radii must be > 0"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(KpgmError::domain("sample_states", "grid must be strictly increasing"));
    }
    let blocks: Vec<Vec<RadialSample<T>>> = states
        .par_iter()
        .map(|&nq| {
            let state = RadialState::new(nq, spec, mode)?;
            grid.iter()
                .map(|&r| {
                    let psi = state.value(r)?;
                    Ok(RadialSample {
                        n: nq.n,
                        ell: nq.ell,
                        r,
                        psi,
                        rho: psi * psi,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

/// 600 radii over `[0.01, 15] / alpha`: 100 log-spaced up to `1 / alpha`,
/// then 500 evenly spaced.
pub fn default_grid<T: Real>(alpha: T) -> Vec<T> {
    let (lo, mid, hi) = (0.01f64, 1.0f64, 15.0f64);
    let mut out = Vec::with_capacity(600);
    for i in 0..100 {
        let t = i as f64 / 100.0;
        out.push(lit::<T>(lo * (mid / lo).powf(t)) / alpha);
    }
    for i in 0..500 {
        let t = i as f64 / 499.0;
        out.push(lit::<T>(mid + (hi - mid) * t) / alpha);
    }
    out
}

/// Number of sign changes of `psi` on `grid`, ignoring exact zeros and
/// values below `floor` in magnitude.
pub fn count_nodes<T: Real>(values: &[T], floor: T) -> usize {
    let mut last = T::zero();
    let mut nodes = 0;
    for &v in values {
        if v.abs() <= floor {
            continue;
        }
        if last != T::zero() && v.signum() != last.signum() {
            nodes += 1;
        }
        last = v;
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::quad_semi_infinite;

    fn derived() -> MoleculeSpec<f64> {
        MoleculeSpec::natural("derived", 1.0, 1.5, 0.5, 1.2, 0.4)
    }

    #[test]
    fn constant_small_case() {
        let v: f64 = normalization_constant(0, 0.5, 0.5, 0.5).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!(normalization_constant(0, -2.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn constant_log_vs_direct() {
        let (n, g, d, a) = (3u32, 1.2f64, 2.4f64, 0.3f64);
        let gam = |x: f64| ln_gamma(x).unwrap().exp();
        let direct = (2.0 * a * 6.0 * gam(2.0 * g + 2.0 * d + 3.0) * gam(2.0 * g + 2.0 * d + 6.0)
            / (2f64.powf(2.0 * g + 2.0 * d) * gam(2.0 * g + 3.0) * gam(2.0 * d + 4.0)))
        .sqrt();
        let logged = normalization_constant(n, g, d, a).unwrap();
        assert!((direct - logged).abs() <= 1e-12 * direct);
    }

    #[test]
    fn constant_overflow_is_reported() {
        let r = normalization_constant(10, 400.0, 400.0, 1.0);
        assert!(matches!(r, Err(KpgmError::Overflow { .. })), "{r:?}");
    }

    #[test]
    fn boundary_behaviour() {
        let s = derived();
        let nq = QuantumNumbers::new(0, 0);
        assert!(wavefunction_value(60.0 / s.alpha, nq, &s).unwrap().abs() < 1e-8);
        assert!(wavefunction_value(1e-6 / s.alpha, nq, &s).unwrap().abs() < 1e-6);
        assert!(wavefunction_value(0.0, nq, &s).is_err());
    }

    #[test]
    fn quadrature_path_is_normalized_in_r() {
        for spec in [derived(), MoleculeSpec::null_coupling(1.0)] {
            for n in 0..4 {
                let st = RadialState::new(QuantumNumbers::new(n, 0), &spec, NormMode::Quadrature).unwrap();
                let total = quad_semi_infinite(
                    |r: f64| st.value(r).map(|p| p * p).unwrap_or(f64::NAN),
                    0.0,
                    1.0 / spec.alpha,
                    1e-11,
                )
                .unwrap();
                assert!((total - 1.0).abs() < 1e-8, "{} n={n}: {total}", spec.name);
            }
        }
    }

    #[test]
    fn norm_scales_linearly() {
        let s = derived();
        let st = RadialState::new(QuantumNumbers::new(1, 0), &s, NormMode::Quadrature).unwrap();
        let scaled = quad_semi_infinite(
            |r: f64| (7.0 * st.shape(r).unwrap()).powi(2),
            0.0,
            1.0 / s.alpha,
            1e-11,
        )
        .unwrap()
        .sqrt();
        let expected = 7.0 * (st.ln_numeric_norm - st.log_scale).exp();
        assert!((scaled - expected).abs() < 1e-9 * scaled);
    }

    #[test]
    fn nodes_match_quantum_number() {
        let null = MoleculeSpec::null_coupling(1.0);
        let grid: Vec<f64> = (1..=4000).map(|i| i as f64 * 0.01).collect();
        for spec in [null, derived()] {
            for n in 0..=4 {
                let st = RadialState::new(QuantumNumbers::new(n, 0), &spec, NormMode::Quadrature).unwrap();
                let vals: Vec<f64> = grid.iter().map(|&r| st.value(r).unwrap()).collect();
                assert_eq!(count_nodes(&vals, 1e-300), n as usize, "{} n={n}", spec.name);
            }
        }
    }

    #[test]
    fn tail_decays_with_gamma() {
        let s = derived();
        let st = RadialState::new(QuantumNumbers::new(0, 0), &s, NormMode::Quadrature).unwrap();
        let (x1, x2) = (13.5 / s.alpha, 15.0 / s.alpha);
        let slope = (st.value(x2).unwrap().abs().ln() - st.value(x1).unwrap().abs().ln()) / (s.alpha * (x2 - x1));
        assert!((slope + st.gamma).abs() < 0.02 * st.gamma, "{slope} vs {}", st.gamma);
    }

    #[test]
    fn sampling_shape_and_order() {
        let s = derived();
        let grid = default_grid(s.alpha);
        assert_eq!(grid.len(), 600);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        assert!(sample_states(&grid, &[], &s, NormMode::Quadrature).unwrap().is_empty());
        let states: Vec<_> = (0..4).map(|n| QuantumNumbers::new(n, 0)).collect();
        let grid500: Vec<f64> = (1..=500).map(|i| i as f64 * 0.05).collect();
        let rows = sample_states(&grid500, &states, &s, NormMode::Quadrature).unwrap();
        assert_eq!(rows.len(), 2000);
        assert_eq!((rows[0].n, rows[499].n, rows[500].n), (0, 0, 1));
        assert!(rows.iter().all(|r| r.rho >= 0.0 && r.rho == r.psi * r.psi));
        assert!(sample_states(&[1.0, 0.5], &states, &s, NormMode::Quadrature).is_err());
    }

    #[test]
    fn closed_mode_uses_published_constant() {
        let s = derived();
        let nq = QuantumNumbers::new(1, 0);
        let q = RadialState::new(nq, &s, NormMode::Quadrature).unwrap();
        let c = RadialState::new(nq, &s, NormMode::Closed).unwrap();
        assert!((c.constant - q.closed_constant().unwrap() * q.log_scale.exp()).abs() <= 1e-14 * c.constant);
        let ratio = q.closed_to_quadrature_ratio().unwrap();
        assert!((c.value(3.0).unwrap() / q.value(3.0).unwrap() - ratio).abs() < 1e-12 * ratio);
    }

    #[test]
    fn sharply_peaked_state_is_normalized() {
        let alpha: f64 = 0.45;
        for n in [0u32, 3] {
            let st = RadialState::from_parameters(QuantumNumbers::new(n, 0), -1.0, 1470.0, 60.0, alpha, NormMode::Quadrature)
                .unwrap();
            assert!(st.ln_numeric_norm.is_finite());
            let total = quad_semi_infinite(|r: f64| st.value(r).map(|p| p * p).unwrap_or(f64::NAN), 0.0, 1e-3, 1e-11)
                .unwrap();
            assert!((total - 1.0).abs() < 1e-8, "n={n}: {total}");
        }
    }
}
