use crate::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative<T> {
    pub value: T,
    /// Richardson-tableau error estimate.
    pub error: T,
    /// Number of step sizes used before the tableau stopped improving.
    pub levels: usize,
}

const SHRINK: f64 = 1.4;
const TABLE: usize = 12;
const MIN_LEVELS: usize = 3;

/// Central-difference derivative with Ridders' Richardson tableau.
///
/// Starts from step `h0` and shrinks by 1.4 per level; the estimate with the
/// smallest tableau error is returned once at least three levels are in.
pub fn derivative<T: Real, F: Fn(T) -> T>(f: F, x: T, order: DerivativeOrder, h0: T) -> Derivative<T> {
    let central = |h: T| match order {
        DerivativeOrder::First => (f(x + h) - f(x - h)) / (h + h),
        DerivativeOrder::Second => (f(x + h) - (f(x) + f(x)) + f(x - h)) / (h * h),
    };
    let con = lit::<T>(SHRINK);
    let con2 = con * con;
    let mut h = h0.abs();
    let mut a = [[T::zero(); TABLE]; TABLE];
    a[0][0] = central(h);
    let mut best = Derivative {
        value: a[0][0],
        error: T::infinity(),
        levels: 1,
    };
    for i in 1..TABLE {
        h = h / con;
        a[0][i] = central(h);
        let mut fac = con2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - T::one());
            fac = con2 * fac;
            let err = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if err <= best.error {
                best = Derivative {
                    value: a[j][i],
                    error: err,
                    levels: i + 1,
                };
            }
        }
        if i + 1 >= MIN_LEVELS && (a[i][i] - a[i - 1][i - 1]).abs() >= lit::<T>(2.0) * best.error {
            break;
        }
    }
    best
}
