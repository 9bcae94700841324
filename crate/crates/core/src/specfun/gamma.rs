use crate::error::{KpgmError, Result};
use crate::{lit, Real};

// Lanczos approximation, r = 10.900511 with 11 terms (Pugh 2004).
const LANCZOS_R: f64 = 10.900511;
const LANCZOS_D: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];
// ln(2 sqrt(e / pi))
const LN_TWO_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_222_345_518_445_781_647_2;

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(KpgmError::domain("ln_gamma", format!("x must be > 0, got {x}")));
    }
    if x < lit(0.5) {
        // Gamma(x) = Gamma(x + 1) / x keeps the argument in the Lanczos range.
        return Ok(lanczos_ln(x + T::one()) - x.ln());
    }
    Ok(lanczos_ln(x))
}

fn lanczos_ln<T: Real>(x: T) -> T {
    let sum = LANCZOS_D
        .iter()
        .enumerate()
        .skip(1)
        .fold(lit::<T>(LANCZOS_D[0]), |acc, (i, &d)| {
            acc + lit::<T>(d) / (x + lit::<T>(i as f64) - T::one())
        });
    let half = lit::<T>(0.5);
    sum.ln() + lit(LN_TWO_SQRT_E_OVER_PI) + (x - half) * ((x - half + lit(LANCZOS_R)).ln() - T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_points() {
        assert!(ln_gamma(1.0f64).unwrap().abs() < 1e-15);
        assert!(ln_gamma(2.0f64).unwrap().abs() < 1e-15);
        assert!((ln_gamma(5.0f64).unwrap() - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn reference_values() {
        let cases: [(f64, f64); _] = [
            (3.7, 1.428_072_326_665_388_129_2),
            (0.001, 6.907_178_885_383_853_661_7),
            (1234.5, 7_550.550_901_077_894_895_7),
            (1.5, -0.120_782_237_635_245_222_35),
        ];
        for (x, want) in cases {
            let got = ln_gamma(x).unwrap();
            assert!((got - want).abs() <= 1e-13 * want.abs(), "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn product_recursion_down_to_unit_interval() {
        // Gamma(3.7) = 2.7 * 1.7 * Gamma(1.7)
        let direct = ln_gamma(3.7f64).unwrap();
        let reduced = ln_gamma(1.7f64).unwrap() + (2.7f64 * 1.7).ln();
        assert!((direct - reduced).abs() < 1e-13, "{}", direct - reduced);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ln_gamma(0.0f64).is_err());
        assert!(ln_gamma(-2.5f64).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }
}
