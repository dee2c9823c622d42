//! Error-function helpers.

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Scaled complementary error function e^{x²} erfc(x) for x ≥ 0.
///
/// The direct product overflows once x² exceeds ~709, long before the result
/// leaves the representable range, so large arguments use the asymptotic
/// expansion erfcx(x) ~ (x√π)⁻¹ Σ (-1)ⁿ (2n-1)!!/(2x²)ⁿ instead.
pub fn erfcx(x: f64) -> f64 {
    assert!(x >= 0.0, "erfcx implemented for x >= 0 only");
    if x < 8.0 {
        return (x * x).exp() * libm::erfc(x);
    }
    let inv2x2 = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..=16 {
        term *= -((2 * n - 1) as f64) * inv2x2;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / (x * core::f64::consts::PI.sqrt())
}
