use crate::error::{KpgmError, Result};
use crate::{lit, to_f64, Real};

// Gauss–Kronrod 7/15 nodes on [-1, 1] (non-negative half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    abs_value: T,
}

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Segment<T> {
    let half = lit::<T>(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut res_k = fc * lit(WGK[7]);
    let mut res_g = fc * lit(WG[3]);
    let mut res_abs = fc.abs() * lit(WGK[7]);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half_len * lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + lit::<T>(WGK[j]) * (f1 + f2);
        res_abs = res_abs + lit::<T>(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + lit::<T>(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = lit::<T>(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + lit::<T>(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut error = ((res_k - res_g) * half_len).abs();
    if res_asc > T::zero() && error > T::zero() {
        let ratio = (lit::<T>(200.0) * error / res_asc).powf(lit(1.5));
        error = res_asc * ratio.min(T::one());
    }
    let floor = lit::<T>(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (lit::<T>(50.0) * T::epsilon()) {
        error = error.max(floor);
    }
    Segment {
        a,
        b,
        value,
        error,
        abs_value: res_abs,
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature.
///
/// Converged when the error estimate is within `tol * |result|`, or within
/// `tol` scaled by `min(1, integral of |f|)` for results near zero.
pub fn quad_adaptive_detailed<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    tol: T,
) -> Result<QuadResult<T>> {
    if !(a < b) {
        return Err(KpgmError::domain("quad_adaptive", format!("need a < b, got [{a}, {b}]")));
    }
    if !(tol > T::zero()) {
        return Err(KpgmError::domain("quad_adaptive", format!("tol must be > 0, got {tol}")));
    }
    let mut segments = vec![gk15(&f, a, b)];
    let mut evaluations = 15;
    loop {
        let value = segments.iter().fold(T::zero(), |s, g| s + g.value);
        let error = segments.iter().fold(T::zero(), |s, g| s + g.error);
        let abs_value = segments.iter().fold(T::zero(), |s, g| s + g.abs_value);
        if !value.is_finite() || !error.is_finite() {
            return Err(KpgmError::Quadrature {
                estimate: to_f64(value),
                error: to_f64(error),
                tol: to_f64(tol),
            });
        }
        let target = (tol * value.abs()).max(tol * abs_value.min(T::one()));
        if error <= target {
            return Ok(QuadResult {
                value,
                error,
                evaluations,
            });
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(KpgmError::Quadrature {
                estimate: to_f64(value),
                error: to_f64(error),
                tol: to_f64(tol),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, -T::one()), |(bi, be), (i, s)| if s.error > be { (i, s.error) } else { (bi, be) });
        let seg = segments.swap_remove(worst);
        let mid = lit::<T>(0.5) * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            return Err(KpgmError::Quadrature {
                estimate: to_f64(value),
                error: to_f64(error),
                tol: to_f64(tol),
            });
        }
        segments.push(gk15(&f, seg.a, mid));
        segments.push(gk15(&f, mid, seg.b));
        evaluations += 30;
    }
}

pub fn quad_adaptive<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<T> {
    quad_adaptive_detailed(f, a, b, tol).map(|r| r.value)
}

/// `int_a^inf f(x) dx` through `x = a + scale * t / (1 - t)`.
pub fn quad_semi_infinite<T: Real, F: Fn(T) -> T>(f: F, a: T, scale: T, tol: T) -> Result<T> {
    if !(scale > T::zero()) {
        return Err(KpgmError::domain("quad_semi_infinite", "scale must be > 0"));
    }
    let mapped = |t: T| {
        let one_minus = T::one() - t;
        let x = a + scale * t / one_minus;
        let v = f(x);
        if v == T::zero() {
            T::zero()
        } else {
            v * scale / (one_minus * one_minus)
        }
    };
    quad_adaptive(mapped, T::zero(), T::one(), tol)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre_rule<T: Real>(order: usize) -> Vec<(T, T)> {
    let n = order.max(1);
    let nf = lit::<T>(n as f64);
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (T::PI() * (lit::<T>(i as f64) + lit(0.75)) / (nf + lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (T::one(), x);
            for k in 2..=n {
                let kf = lit::<T>(k as f64);
                let p2 = ((lit::<T>(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { T::one() } else { p0 };
            dp = nf * (x * pn - pn1) / (x * x - T::one());
            let dx = pn / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * lit(4.0) {
                break;
            }
        }
        let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule
}

/// Composite Gauss–Legendre rule with `panels` equal panels.
pub fn gauss_legendre_composite<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    panels: usize,
    order: usize,
) -> T {
    let rule = gauss_legendre_rule::<T>(order);
    let panels = panels.max(1);
    let width = (b - a) / lit(panels as f64);
    let half = lit::<T>(0.5) * width;
    (0..panels).fold(T::zero(), |acc, p| {
        let center = a + width * (lit::<T>(p as f64) + lit(0.5));
        acc + rule.iter().fold(T::zero(), |s, &(x, w)| s + w * f(center + half * x)) * half
    })
}

/// Adaptive Simpson with Richardson correction.
pub fn simpson_adaptive<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<T> {
    #[allow(clippy::too_many_arguments)]
    fn recurse<T: Real, F: Fn(T) -> T>(
        f: &F,
        a: T,
        b: T,
        fa: T,
        fm: T,
        fb: T,
        whole: T,
        tol: T,
        depth: u32,
    ) -> Option<T> {
        let half = lit::<T>(0.5);
        let m = half * (a + b);
        let lm = half * (a + m);
        let rm = half * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let six = lit::<T>(6.0);
        let left = (m - a) / six * (fa + lit::<T>(4.0) * flm + fm);
        let right = (b - m) / six * (fm + lit::<T>(4.0) * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= lit::<T>(15.0) * tol {
            return Some(left + right + delta / lit(15.0));
        }
        if depth == 0 {
            return None;
        }
        let l = recurse(f, a, m, fa, flm, fm, left, half * tol, depth - 1)?;
        let r = recurse(f, m, b, fm, frm, fb, right, half * tol, depth - 1)?;
        Some(l + r)
    }
    if !(a < b) {
        return Err(KpgmError::domain("simpson_adaptive", "need a < b"));
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(lit::<T>(0.5) * (a + b));
    let whole = (b - a) / lit(6.0) * (fa + lit::<T>(4.0) * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 40).ok_or(KpgmError::Quadrature {
        estimate: to_f64(whole),
        error: f64::NAN,
        tol: to_f64(tol),
    })
}
