//! Extended-precision series oracles (double-double accumulation).

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{KpgmError, Result};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };
    /// 2 / sqrt(pi)
    pub const TWO_OVER_SQRT_PI: Self = Self {
        hi: std::f64::consts::FRAC_2_SQRT_PI,
        lo: 1.533545961316588e-17,
    };

    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl std::ops::Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * Self::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Self::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::new(q3)
    }
}

#[derive(Debug, Clone, Copy)]
struct DdComplex {
    re: DoubleDouble,
    im: DoubleDouble,
}

impl DdComplex {
    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn scale(self, s: DoubleDouble) -> Self {
        Self {
            re: self.re * s,
            im: self.im * s,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    fn magnitude(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
}

/// Generalized binomial coefficient `C(x, m)` for real `x`.
fn binomial(x: DoubleDouble, m: u32) -> DoubleDouble {
    let mut acc = DoubleDouble::ONE;
    for j in 0..m {
        let num = x - DoubleDouble::new(j as f64);
        acc = acc * num / DoubleDouble::new((j + 1) as f64);
    }
    acc
}

/// `P_n^{(a,b)}(x)` from the explicit finite sum
/// `sum_k C(n+a, n-k) C(n+b, k) ((x-1)/2)^k ((x+1)/2)^(n-k)`.
pub fn jacobi_sum_oracle(n: u32, a: f64, b: f64, x: f64) -> Result<f64> {
    if n > 15 {
        return Err(KpgmError::domain("jacobi_sum_oracle", format!("n must be <= 15, got {n}")));
    }
    let half = DoubleDouble::new(0.5);
    let xm = (DoubleDouble::new(x) - DoubleDouble::ONE) * half;
    let xp = (DoubleDouble::new(x) + DoubleDouble::ONE) * half;
    let na = DoubleDouble::new(n as f64) + DoubleDouble::new(a);
    let nb = DoubleDouble::new(n as f64) + DoubleDouble::new(b);
    let pow = |base: DoubleDouble, e: u32| (0..e).fold(DoubleDouble::ONE, |acc, _| acc * base);
    let mut sum = DoubleDouble::ZERO;
    for k in 0..=n {
        let term = binomial(na, n - k) * binomial(nb, k) * pow(xm, k) * pow(xp, n - k);
        sum = sum + term;
    }
    Ok(sum.to_f64())
}

/// Maclaurin series of erf in double-double arithmetic, `|z| <= 4`.
pub fn erf_series_oracle(z: Complex64) -> Result<Complex64> {
    if !(z.norm() <= 4.0) {
        return Err(KpgmError::domain("erf_series_oracle", format!("|z| must be <= 4, got {}", z.norm())));
    }
    let zc = DdComplex {
        re: DoubleDouble::new(z.re),
        im: DoubleDouble::new(z.im),
    };
    let z2 = zc.mul(zc);
    let neg_z2 = DdComplex {
        re: -z2.re,
        im: -z2.im,
    };
    // power = (-z^2)^k z / k!
    let mut power = zc;
    let mut sum = zc;
    let mut largest = zc.magnitude();
    for k in 1..400u32 {
        power = power.mul(neg_z2).scale(DoubleDouble::new(k as f64).recip());
        let term = power.scale(DoubleDouble::new((2 * k + 1) as f64).recip());
        sum = sum.add(term);
        let mag = term.magnitude();
        largest = largest.max(mag);
        // terms decay factorially once k > |z|^2; stop far below double-double resolution
        if k as f64 > z2.re.to_f64().hypot(z2.im.to_f64()) && mag <= 1e-34 * largest.max(sum.magnitude()) {
            break;
        }
    }
    let out = sum.scale(DoubleDouble::TWO_OVER_SQRT_PI);
    Ok(Complex64::new(out.re.to_f64(), out.im.to_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::quad_adaptive;

    #[test]
    fn double_double_resolves_beyond_f64() {
        let third = DoubleDouble::ONE / DoubleDouble::new(3.0);
        let back = third * DoubleDouble::new(3.0) - DoubleDouble::ONE;
        assert!(back.to_f64().abs() < 1e-30);
        let tiny = DoubleDouble::new(1.0) + DoubleDouble::new(1e-20);
        assert_eq!(tiny.lo, 1e-20);
    }

    #[test]
    fn jacobi_oracle_small_cases() {
        assert_eq!(jacobi_sum_oracle(0, 0.4, 2.0, 0.3).unwrap(), 1.0);
        assert!((jacobi_sum_oracle(1, 1.0, 1.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let v = jacobi_sum_oracle(4, 0.3, 1.7, -0.2).unwrap();
        assert!((v - (-0.3636625000000000227)).abs() < 1e-15);
        assert!(jacobi_sum_oracle(16, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn erf_oracle_values() {
        assert_eq!(erf_series_oracle(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        let one = erf_series_oracle(Complex64::new(1.0, 0.0)).unwrap();
        assert!((one.re - 0.8427007929497148693).abs() < 1e-16);
        let by_quad = quad_adaptive(
            |t: f64| std::f64::consts::FRAC_2_SQRT_PI * (-t * t).exp(),
            0.0,
            1.0,
            1e-13,
        )
        .unwrap();
        assert!((one.re - by_quad).abs() < 1e-13);
        let i = erf_series_oracle(Complex64::new(0.0, 1.0)).unwrap();
        assert!(i.re.abs() < 1e-300);
        assert!((i.im - 1.6504257587975428760).abs() < 1e-15);
        let far = erf_series_oracle(Complex64::new(2.8, -2.2)).unwrap();
        assert!(far.norm().is_finite());
        assert!(erf_series_oracle(Complex64::new(3.0, 3.0)).is_err());
    }
}
