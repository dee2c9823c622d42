//! Probability law of the total angular momentum j: exact discrete form from
//! the degeneracy table, and the large-N Gaussian continuum form
//! P(j) = 6j²/(NS(S+1)) √(3/(2πNS(S+1))) exp(−3j²/(2S(S+1)N)).

use num_bigint::BigUint;
use num_traits::Zero;

use crate::degeneracy::DegeneracyTable;
use crate::half::HalfInteger;
use crate::quadrature;
use crate::special::erf;
use crate::{Error, Result};

/// Law of j: exact (discrete, from a table) or Gaussian (continuum).
#[derive(Debug, Clone)]
pub enum JDistribution {
    Exact(DegeneracyTable),
    Gaussian { n: u32, s: HalfInteger },
}

/// num/den as f64 with ~1 ulp accuracy, via a 160-bit scaled integer divide.
pub(crate) fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shifted = (num << 160u32) / den;
    let mut x = 0.0f64;
    // Fold the limbs from the top; 128 bits are plenty for a f64.
    let bits = shifted.bits();
    let drop = bits.saturating_sub(128);
    let top = &shifted >> drop;
    for d in top.to_u64_digits().iter().rev() {
        x = x * 1.8446744073709552e19 + *d as f64;
    }
    x * (2.0f64).powi(drop as i32 - 160)
}

/// Exact pmf (2j+1) ν(j) / (2S+1)^N.
pub fn exact_pmf(table: &DegeneracyTable, j: HalfInteger) -> Result<f64> {
    let nu = table.nu(j)?;
    let num = BigUint::from(j.multiplicity() as u64) * nu;
    Ok(big_ratio_to_f64(&num, &table.state_count()))
}

fn nss1(n: u32, s: HalfInteger) -> f64 {
    n as f64 * s.casimir()
}

/// The printed Gaussian density, zero for j < 0.
pub fn gaussian_pdf(n: u32, s: HalfInteger, j: f64) -> f64 {
    if j < 0.0 {
        return 0.0;
    }
    let q = nss1(n, s);
    6.0 * j * j / q * (3.0 / (2.0 * std::f64::consts::PI * q)).sqrt()
        * (-3.0 * j * j / (2.0 * q)).exp()
}

/// Closed-form CDF of the Gaussian law: erf(aj) − (2/√π) a j e^{−a²j²} with
/// a² = 3/(2NS(S+1)).
pub fn gaussian_cdf(n: u32, s: HalfInteger, j: f64) -> f64 {
    if j <= 0.0 {
        return 0.0;
    }
    let a = (1.5 / nss1(n, s)).sqrt();
    erf(a * j) - 2.0 / std::f64::consts::PI.sqrt() * a * j * (-a * a * j * j).exp()
}

/// Closed-form mean ⟨j⟩ = 2√(2/3π)·√(NS(S+1)) and variance
/// (Δj)² = (1 − 8/(3π))·NS(S+1) of the Gaussian law.
pub fn moments(n: u32, s: HalfInteger) -> (f64, f64) {
    let q = nss1(n, s);
    let mean = 2.0 * (2.0 / (3.0 * std::f64::consts::PI)).sqrt() * q.sqrt();
    let var = (1.0 - 8.0 / (3.0 * std::f64::consts::PI)) * q;
    (mean, var)
}

const REL_TARGET: f64 = 1e-9;
const ABS_FLOOR: f64 = 1e-12;

/// ⟨f(j)⟩ under the law.
///
/// Exact kind: weighted sum over the table. Gaussian kind: adaptive
/// quadrature on [0, mean + 12σ], then the domain is extended twice to probe
/// the tail; an expectation whose tail keeps growing is reported as
/// divergent rather than silently truncated.
pub fn expectation<F: Fn(f64) -> f64>(dist: &JDistribution, f: F) -> Result<f64> {
    match dist {
        JDistribution::Exact(table) => {
            let mut acc = quadrature::Neumaier::new();
            for (j, _) in table.entries() {
                let p = exact_pmf(table, *j)?;
                if p != 0.0 {
                    acc.add(p * f(j.value()));
                }
            }
            Ok(acc.sum())
        }
        JDistribution::Gaussian { n, s } => {
            let (mean, var) = moments(*n, *s);
            let jmax = mean + 12.0 * var.sqrt();
            let g = |j: f64| gaussian_pdf(*n, *s, j) * f(j);
            let base = quadrature::adaptive(g, 0.0, jmax, REL_TARGET, ABS_FLOOR)?;
            let mut value = base.value;
            let mut hi = jmax;
            for _ in 0..2 {
                let next = hi * 1.5;
                let tail = quadrature::adaptive(&g, hi, next, REL_TARGET, ABS_FLOOR)?;
                let rel = tail.value.abs() / value.abs().max(ABS_FLOOR);
                if rel > REL_TARGET * 10.0 {
                    return Err(Error::DivergentExpectation { rel_change: rel });
                }
                value += tail.value;
                hi = next;
            }
            Ok(value)
        }
    }
}

/// Kolmogorov distance between the exact law and the Gaussian law, with the
/// lattice continuity correction: the cumulative mass through j is compared
/// against the continuum CDF at j + 1/2 (the cell boundary).
pub fn kolmogorov_distance(table: &DegeneracyTable) -> Result<f64> {
    let n = table.n();
    let s = table.s();
    let mut cum = 0.0;
    let mut worst: f64 = 0.0;
    for (j, _) in table.entries() {
        cum += exact_pmf(table, *j)?;
        let fg = gaussian_cdf(n, s, j.value() + 0.5);
        worst = worst.max((fg - cum).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive;

    fn h(t: i64) -> HalfInteger {
        HalfInteger::from_twice(t)
    }

    #[test]
    fn exact_pmf_examples() {
        // N=1: all mass at j=S
        let t = DegeneracyTable::build(1, h(3)).unwrap();
        assert!((exact_pmf(&t, h(3)).unwrap() - 1.0).abs() < 1e-15);

        // N=2, S=1/2: P(0)=1/4, P(1)=3/4
        let t = DegeneracyTable::build(2, h(1)).unwrap();
        assert!((exact_pmf(&t, h(0)).unwrap() - 0.25).abs() < 1e-15);
        assert!((exact_pmf(&t, h(2)).unwrap() - 0.75).abs() < 1e-15);

        // N=3, S=1: P(2) = 10/27
        let t = DegeneracyTable::build(3, h(2)).unwrap();
        assert!((exact_pmf(&t, h(4)).unwrap() - 10.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn exact_pmf_sums_to_one() {
        for (n, two_s) in [(12u32, 1i64), (8, 2), (5, 3), (60, 1), (40, 4)] {
            let t = DegeneracyTable::build(n, h(two_s)).unwrap();
            // integer identity behind the normalization
            assert_eq!(t.weighted_sum(), t.state_count());
            let mut sum = 0.0;
            for (j, _) in t.entries() {
                sum += exact_pmf(&t, *j).unwrap();
            }
            assert!((sum - 1.0).abs() < 1e-12, "N={n} 2S={two_s}: {sum}");
        }
    }

    #[test]
    fn gaussian_normalizes() {
        for (n, two_s) in [(50u32, 1i64), (100, 2), (20, 5)] {
            let s = h(two_s);
            let (mean, var) = moments(n, s);
            let hi = mean + 14.0 * var.sqrt();
            let q = adaptive(|j| gaussian_pdf(n, s, j), 0.0, hi, 1e-10, 1e-13).unwrap();
            assert!((q.value - 1.0).abs() < 1e-9, "normalization {}", q.value);
        }
    }

    #[test]
    fn gaussian_zero_at_origin() {
        assert_eq!(gaussian_pdf(100, h(1), 0.0), 0.0);
    }

    #[test]
    fn gaussian_mode_n100_half() {
        // mode at sqrt(2 NS(S+1)/3) = sqrt(50)
        let n = 100;
        let s = h(1);
        let want = 50f64.sqrt();
        let mut best = (0.0, 0.0);
        let mut j = 0.0;
        while j < 20.0 {
            let p = gaussian_pdf(n, s, j);
            if p > best.1 {
                best = (j, p);
            }
            j += 1e-3;
        }
        assert!((best.0 - want).abs() < 2e-3, "mode at {}", best.0);
    }

    #[test]
    fn moments_match_quadrature() {
        for (n, two_s) in [(100u32, 1i64), (40, 2), (16, 3)] {
            let s = h(two_s);
            let (mean, var) = moments(n, s);
            let dist = JDistribution::Gaussian { n, s };
            let m1 = expectation(&dist, |j| j).unwrap();
            let m2 = expectation(&dist, |j| j * j).unwrap();
            assert!((m1 - mean).abs() / mean < 1e-8, "mean {m1} vs {mean}");
            let v = m2 - m1 * m1;
            assert!((v - var).abs() / var < 1e-8, "var {v} vs {var}");
            // <j^2> = NS(S+1) by construction
            assert!((m2 - n as f64 * s.casimir()).abs() / m2 < 1e-9);
        }
    }

    #[test]
    fn mean_n100_half_reference() {
        let (mean, _) = moments(100, h(1));
        assert!((mean - 7.97884560802865).abs() < 1e-10);
    }

    #[test]
    fn variance_ratio_reference() {
        let (_, var) = moments(7, h(4));
        let ratio = var / (7.0 * h(4).casimir());
        assert!((ratio - 0.151173636843225).abs() < 1e-12);
    }

    #[test]
    fn normalization_via_expectation() {
        let dist = JDistribution::Gaussian { n: 64, s: h(2) };
        let one = expectation(&dist, |_| 1.0).unwrap();
        assert!((one - 1.0).abs() < 1e-9);
    }

    #[test]
    fn divergence_threshold() {
        // <exp(c j^2)> with c = J beta / N diverges iff J beta >= 3/(2 S(S+1)).
        let n = 60u32;
        let s = h(2); // S = 1
        let crit = 1.5 / s.casimir();
        let dist = JDistribution::Gaussian { n, s };

        let sub = 0.5 * crit / n as f64;
        let ok = expectation(&dist, |j| (sub * j * j).exp());
        assert!(ok.is_ok());

        let sup = 1.5 * crit / n as f64;
        let bad = expectation(&dist, |j| (sup * j * j).exp());
        assert!(matches!(
            bad,
            Err(Error::DivergentExpectation { .. }) | Err(Error::QuadratureNonConvergence { .. })
        ));
    }

    #[test]
    fn exact_expectation_single_spin() {
        let t = DegeneracyTable::build(1, h(2)).unwrap();
        let dist = JDistribution::Exact(t);
        let m = expectation(&dist, |j| j).unwrap();
        assert!((m - 1.0).abs() < 1e-14); // single spin-1: j = 1 surely
    }

    #[test]
    fn kolmogorov_converges() {
        for two_s in [1i64, 2, 3] {
            let mut prev = f64::INFINITY;
            for n in [8u32, 32, 128] {
                let t = DegeneracyTable::build(n, h(two_s)).unwrap();
                let d = kolmogorov_distance(&t).unwrap();
                assert!(d < prev, "2S={two_s}: KS not decreasing at N={n}");
                prev = d;
            }
            assert!(prev < 0.05, "2S={two_s}: KS at N=128 is {prev}");
        }
    }

    #[test]
    fn big_ratio_precision() {
        let num = BigUint::from(1u32) << 200;
        let den = (BigUint::from(1u32) << 200) * BigUint::from(3u32);
        let x = big_ratio_to_f64(&num, &den);
        assert!((x - 1.0 / 3.0).abs() < 1e-16);
    }
}
