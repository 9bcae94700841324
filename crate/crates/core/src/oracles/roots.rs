use crate::error::{KpgmError, Result};
use crate::{lit, Real};

/// Bisection on a sign-changing bracket. Stops when the bracket is within
/// `xtol` or cannot shrink further.
pub fn bisect<T: Real, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T, xtol: T) -> Result<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if !(flo.signum() != fhi.signum()) || !flo.is_finite() || !fhi.is_finite() {
        return Err(KpgmError::domain("bisect", format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..400 {
        let mid = lit::<T>(0.5) * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(lit::<T>(0.5) * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn rejects_missing_bracket() {
        assert!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }
}
