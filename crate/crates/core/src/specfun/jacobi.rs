use crate::error::{KpgmError, Result};
use crate::{lit, Real};

/// Jacobi polynomial `P_n^{(a,b)}(x)` by the three-term recurrence.
///
/// `x` may lie outside `[-1, 1]`.
pub fn jacobi<T: Real>(n: u32, a: T, b: T, x: T) -> Result<T> {
    if !(a > -T::one()) || !(b > -T::one()) {
        return Err(KpgmError::domain("jacobi", format!("need a, b > -1, got a={a}, b={b}")));
    }
    let one = T::one();
    let two = lit::<T>(2.0);
    let p0 = one;
    if n == 0 {
        return Ok(p0);
    }
    let p1 = (a + one) + (a + b + two) * (x - one) / two;
    if n == 1 {
        return Ok(p1);
    }
    let ab = a + b;
    let (mut prev, mut cur) = (p0, p1);
    for k in 2..=n {
        let k = T::from_u32(k).expect("degree fits");
        let s = two * k + ab;
        let norm = two * k * (k + ab) * (s - two);
        let lin = (s - one) * (s * (s - two) * x + a * a - b * b);
        let back = two * (k + a - one) * (k + b - one) * s;
        let next = (lin * cur - back * prev) / norm;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}
