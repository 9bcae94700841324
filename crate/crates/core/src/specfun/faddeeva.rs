//! Faddeeva function `w(z) = exp(-z^2) erfc(-i z)` and the complex error
//! functions built on it.
//!
//! `w` follows the Poppe–Wijers region split: a Taylor expansion of
//! `exp(-z^2)(1 + erf(iz))` inside a small ellipse around the origin, the
//! Laplace continued fraction far out, and a continued fraction accelerated
//! by a truncated Taylor sum in between. The lower half plane is reached
//! through `w(z) = 2 exp(-z^2) - w(-z)`.

use num_complex::Complex;

use crate::error::{KpgmError, Result};
use crate::{lit, Real};

/// Largest `|z|` accepted by [`faddeeva`].
pub const FADDEEVA_MAX_MODULUS: f64 = 1e8;

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
// Below this modulus erf is summed from its Maclaurin series directly.
const ERF_SERIES_RADIUS: f64 = 0.5;

fn nint<T: Real>(x: T) -> usize {
    x.round().to_usize().unwrap_or(0)
}

/// `w(z)` for `Im z >= 0` (and the reflected point when `Im z < 0`).
pub fn faddeeva<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(KpgmError::domain("faddeeva", format!("non-finite argument {z}")));
    }
    if z.norm() > lit(FADDEEVA_MAX_MODULUS) {
        return Err(KpgmError::domain(
            "faddeeva",
            format!("|z| = {} exceeds {FADDEEVA_MAX_MODULUS:e}", z.norm()),
        ));
    }
    let factor = lit::<T>(TWO_OVER_SQRT_PI);
    let (xi, yi) = (z.re, z.im);
    let (xabs, yabs) = (xi.abs(), yi.abs());
    let x = xabs / lit(6.3);
    let y = yabs / lit(4.4);
    let mut qrho = x * x + y * y;
    let mut xquad = xabs * xabs - yabs * yabs;
    let yquad = lit::<T>(2.0) * xabs * yabs;

    let taylor = qrho < lit(0.085264);
    let (mut u, mut v);
    let (mut u2, mut v2) = (T::zero(), T::zero());
    if taylor {
        qrho = (T::one() - lit::<T>(0.85) * y) * qrho.sqrt();
        let n = nint(lit::<T>(6.0) + lit::<T>(72.0) * qrho);
        let mut j = 2 * n + 1;
        let mut xsum = T::one() / lit::<T>(j as f64);
        let mut ysum = T::zero();
        for i in (1..=n).rev() {
            j -= 2;
            let fi = lit::<T>(i as f64);
            let xaux = (xsum * xquad - ysum * yquad) / fi;
            ysum = (xsum * yquad + ysum * xquad) / fi;
            xsum = xaux + T::one() / lit::<T>(j as f64);
        }
        let u1 = -factor * (xsum * yabs + ysum * xabs) + T::one();
        let v1 = factor * (xsum * xabs - ysum * yabs);
        let daux = (-xquad).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > T::one() {
            h = T::zero();
            kapn = 0usize;
            qrho = qrho.sqrt();
            nu = (lit::<T>(3.0) + lit::<T>(1442.0) / (lit::<T>(26.0) * qrho + lit(77.0)))
                .floor()
                .to_usize()
                .unwrap_or(3);
        } else {
            qrho = (T::one() - y) * (T::one() - qrho).sqrt();
            h = lit::<T>(1.88) * qrho;
            kapn = nint(lit::<T>(7.0) + lit::<T>(34.0) * qrho);
            nu = nint(lit::<T>(16.0) + lit::<T>(26.0) * qrho);
        }
        let h2 = lit::<T>(2.0) * h;
        let accelerate = h > T::zero();
        let mut qlambda = if accelerate {
            h2.powi(kapn as i32)
        } else {
            T::zero()
        };
        let (mut rx, mut ry, mut sx, mut sy) = (T::zero(), T::zero(), T::zero(), T::zero());
        for n in (0..=nu).rev() {
            let np1 = lit::<T>((n + 1) as f64);
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = lit::<T>(0.5) / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if accelerate && n <= kapn {
                let tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda = qlambda / h2;
            }
        }
        if accelerate {
            u = factor * sx;
            v = factor * sy;
        } else {
            u = factor * rx;
            v = factor * ry;
        }
        if yabs == T::zero() {
            u = (-xabs * xabs).exp();
        }
    }

    if yi < T::zero() {
        if taylor {
            u2 = u2 + u2;
            v2 = v2 + v2;
        } else {
            xquad = -xquad;
            let w1 = lit::<T>(2.0) * xquad.exp();
            if !w1.is_finite() {
                return Err(KpgmError::overflow(
                    "faddeeva",
                    format!("2 exp(-z^2) overflows for z = {z}"),
                ));
            }
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if xi > T::zero() {
            v = -v;
        }
    } else if xi < T::zero() {
        v = -v;
    }
    let w = Complex::new(u, v);
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(KpgmError::overflow("faddeeva", format!("w({z}) is not finite")));
    }
    Ok(w)
}

fn erf_maclaurin<T: Real>(z: Complex<T>) -> Complex<T> {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let eps = T::epsilon() * lit(0.25);
    for k in 1..60 {
        let kf = lit::<T>(k as f64);
        term = -term * z2 / kf;
        let contrib = term / lit::<T>(2.0 * k as f64 + 1.0);
        sum = sum + contrib;
        if contrib.norm() <= eps * sum.norm() {
            break;
        }
    }
    sum * lit::<T>(TWO_OVER_SQRT_PI)
}

/// `erf(z) = 1 - exp(-z^2) w(iz)`, with odd symmetry used for `Re z < 0`
/// and the Maclaurin series near the origin.
pub fn erf_complex<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if z.re < T::zero() {
        return erf_complex(-z).map(|w| -w);
    }
    if z.norm() < lit(ERF_SERIES_RADIUS) {
        return Ok(erf_maclaurin(z));
    }
    Ok(Complex::new(T::one(), T::zero()) - exp_scaled_erfc(Complex::new(T::zero(), T::zero()), z)?)
}

/// `erfc(z)`, evaluated through `w` so that large `Re z` keeps its
/// relative accuracy.
pub fn erfc_complex<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if z.norm() < lit(ERF_SERIES_RADIUS) {
        return Ok(Complex::new(T::one(), T::zero()) - erf_maclaurin(z));
    }
    exp_scaled_erfc(Complex::new(T::zero(), T::zero()), z)
}

/// `exp(c) * erfc(z)` with the Gaussian factor of `erfc` folded into the
/// exponent, so that a huge `exp(c)` and a tiny `erfc(z)` never meet as
/// separate floating-point numbers.
pub fn exp_scaled_erfc<T: Real>(c: Complex<T>, z: Complex<T>) -> Result<Complex<T>> {
    let iz = Complex::new(-z.im, z.re);
    let value = if z.re >= T::zero() {
        // i z lies in the closed upper half plane, where w is bounded.
        (c - z * z).exp() * faddeeva(iz)?
    } else {
        // erfc(z) = 2 - erfc(-z)
        let two = lit::<T>(2.0);
        c.exp() * two - (c - z * z).exp() * faddeeva(-iz)?
    };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(KpgmError::overflow(
            "exp_scaled_erfc",
            format!("exp({c}) erfc({z}) is not representable"),
        ));
    }
    Ok(value)
}
