//! Real error functions after W. J. Cody's rational Chebyshev
//! approximations.

use crate::{lit, Real};

const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_156,
    377.485_237_685_302_021,
    3_209.377_589_138_469_47,
    0.185_777_706_184_603_153,
];
const B: [f64; 4] = [
    23.601_290_952_344_120_9,
    244.024_637_934_444_173,
    1_282.616_526_077_372_28,
    2_844.236_833_439_170_62,
];
const C: [f64; 9] = [
    0.564_188_496_988_670_089,
    8.883_149_794_388_375_94,
    66.119_190_637_141_629_5,
    298.635_138_197_400_131,
    881.952_221_241_769_09,
    1_712.047_612_634_070_58,
    2_051.078_377_826_071_47,
    1_230.339_354_797_997_25,
    2.153_115_354_744_038_46e-8,
];
const D: [f64; 8] = [
    15.744_926_110_709_834_7,
    117.693_950_891_312_499,
    537.181_101_862_009_858,
    1_621.389_574_566_690_19,
    3_290.799_235_733_459_63,
    4_362.619_090_143_247_16,
    3_439.367_674_143_721_64,
    1_230.339_354_803_749_42,
];
const P: [f64; 6] = [
    0.305_326_634_961_232_344,
    0.360_344_899_949_804_439,
    0.125_781_726_111_229_246,
    0.016_083_785_148_742_276_6,
    6.587_491_615_298_378_03e-4,
    0.016_315_387_137_302_097_8,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822_42,
    1.872_952_849_923_460_47,
    0.527_905_102_951_428_412,
    0.060_518_341_312_441_319_1,
    0.002_335_204_976_268_691_85,
];

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_95;
const SMALL: f64 = 0.468_75;
const BIG: f64 = 26.543;

fn small_ratio<T: Real>(z: T) -> T {
    let num = (((lit::<T>(A[4]) * z + lit(A[0])) * z + lit(A[1])) * z + lit(A[2])) * z + lit(A[3]);
    let den = (((z + lit(B[0])) * z + lit(B[1])) * z + lit(B[2])) * z + lit(B[3]);
    num / den
}

fn mid_ratio<T: Real>(y: T) -> T {
    let mut num = lit::<T>(C[8]) * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + lit(C[i])) * y;
        den = (den + lit(D[i])) * y;
    }
    (num + lit(C[7])) / (den + lit(D[7]))
}

fn large_ratio<T: Real>(z: T) -> T {
    let mut num = lit::<T>(P[5]) * z;
    let mut den = z;
    for i in 0..4 {
        num = (num + lit(P[i])) * z;
        den = (den + lit(Q[i])) * z;
    }
    z * (num + lit(P[4])) / (den + lit(Q[4]))
}

/// `exp(-y^2)` with the square split to limit rounding in the exponent.
fn exp_neg_square<T: Real>(y: T) -> T {
    let sixteen = lit::<T>(16.0);
    let yt = (y * sixteen).trunc() / sixteen;
    (-yt * yt).exp() * (-(y - yt) * (y + yt)).exp()
}

/// `erfc(|x|)` for `|x| > SMALL`.
fn erfc_tail<T: Real>(y: T) -> T {
    if y >= lit(BIG) {
        T::zero()
    } else if y <= lit(4.0) {
        mid_ratio(y) * exp_neg_square(y)
    } else {
        let z = T::one() / (y * y);
        (lit::<T>(FRAC_1_SQRT_PI) - large_ratio(z)) / y * exp_neg_square(y)
    }
}

pub fn erf_real<T: Real>(x: T) -> T {
    let y = x.abs();
    if y <= lit(SMALL) {
        return x * small_ratio(y * y);
    }
    let tail = erfc_tail(y);
    if x < T::zero() {
        tail - T::one()
    } else {
        T::one() - tail
    }
}

pub fn erfc_real<T: Real>(x: T) -> T {
    let y = x.abs();
    if y <= lit(SMALL) {
        return T::one() - x * small_ratio(y * y);
    }
    let tail = erfc_tail(y);
    if x < T::zero() {
        lit::<T>(2.0) - tail
    } else {
        tail
    }
}
