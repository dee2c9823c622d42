//! Heisenberg-XY coupled qubit: time evolution of the reduced density matrix
//! by quadrature over the Gaussian law of j, asymptotic coherence, and the
//! decoherence time.
//!
//! All integrals are taken in the rescaled variable u = j/√N, in which the
//! large-N law is N-independent: weight ∝ u² exp(−(a₀² + gβ(1−θ))u²) with
//! a₀² = 3/(2S(S+1)).

use num_complex::Complex64;

use crate::half::HalfInteger;
use crate::quadrature;
use crate::series::{check_grid, CoherenceSeries};
use crate::special::erfcx;
use crate::{Error, Result};

/// XY-model parameters. β ≥ 0 is the inverse temperature; θ is the m² ≈ θj²
/// surrogate and defaults to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct XYParams {
    pub mu: f64,
    pub alpha: f64,
    pub g: f64,
    pub beta: f64,
    pub n: u32,
    pub s: HalfInteger,
    pub theta: f64,
}

impl XYParams {
    pub fn new(mu: f64, alpha: f64, g: f64, beta: f64, n: u32, s: HalfInteger) -> Self {
        XYParams {
            mu,
            alpha,
            g,
            beta,
            n,
            s,
            theta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.s.as_spin_magnitude()?;
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("need alpha > 0, got {}", self.alpha),
            });
        }
        if !(self.g > 0.0) {
            return Err(Error::InvalidParameter {
                name: "g",
                reason: format!("need g > 0, got {}", self.g),
            });
        }
        if !(self.beta >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: format!("need beta >= 0, got {}", self.beta),
            });
        }
        if !(self.theta >= 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("need 0 <= theta < 1, got {}", self.theta),
            });
        }
        if self.n < 1 {
            return Err(Error::InvalidParameter {
                name: "N",
                reason: "need N >= 1".into(),
            });
        }
        Ok(())
    }

    /// a₀² = 3/(2S(S+1)), the Gaussian parameter in u = j/√N.
    fn a0_sq(&self) -> f64 {
        1.5 / self.s.casimir()
    }

    /// Total Gaussian exponent d = a₀² + gβ(1−θ).
    fn d(&self) -> f64 {
        self.a0_sq() + self.g * self.beta * (1.0 - self.theta)
    }

    /// The printed normalization 𝒵 = [1 + 2S(S+1)gβ(1−θ)/3]^{−3/2}.
    pub fn z_norm(&self) -> f64 {
        (1.0 + 2.0 * self.s.casimir() * self.g * self.beta * (1.0 - self.theta) / 3.0)
            .powf(-1.5)
    }

    /// Prefactor C/𝒵 with C the u-density constant 4a₀³/√π.
    fn weight_prefactor(&self) -> f64 {
        let a0 = self.a0_sq().sqrt();
        4.0 * a0.powi(3) / std::f64::consts::PI.sqrt() / self.z_norm()
    }

    /// Upper integration limit: mean + 12σ of the u²-Gaussian weight.
    fn u_max(&self) -> f64 {
        let d = self.d();
        let mean = 2.0 / (std::f64::consts::PI * d).sqrt();
        let var = (1.5 - 4.0 / std::f64::consts::PI) / d;
        mean + 12.0 * var.sqrt()
    }

    fn omega(&self, u: f64) -> f64 {
        (self.mu * self.mu + (1.0 - self.theta) * self.alpha * self.alpha * u * u).sqrt()
    }
}

/// Initial qubit state: ρ11 plus the coherence ρ12 (ρ22 = 1 − ρ11, ρ21 = ρ12*).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity {
    pub rho11: f64,
    pub rho12: Complex64,
}

impl QubitDensity {
    pub fn rho22(&self) -> f64 {
        1.0 - self.rho11
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho11) {
            return Err(Error::DensityMatrix(format!(
                "rho11 = {} outside [0, 1]",
                self.rho11
            )));
        }
        if self.rho12.norm_sqr() > self.rho11 * self.rho22() + 1e-12 {
            return Err(Error::DensityMatrix(
                "not positive semidefinite: |rho12|^2 > rho11 rho22".into(),
            ));
        }
        Ok(())
    }
}

const REL: f64 = 1e-9;
const ABS: f64 = 1e-12;

/// Integrates weight(u) · f(u) over [0, u_max], switching from adaptive
/// refinement to fixed quarter-period panels once the integrand oscillates.
fn integrate<F: Fn(f64) -> f64>(p: &XYParams, max_freq: f64, f: F) -> Result<f64> {
    let d = p.d();
    let pre = p.weight_prefactor();
    let hi = p.u_max();
    let g = move |u: f64| pre * u * u * (-d * u * u).exp() * f(u);
    let n_osc = quadrature::oscillatory_panel_count(hi, max_freq);
    if n_osc <= 64 {
        Ok(quadrature::adaptive(g, 0.0, hi, REL, ABS)?.value)
    } else {
        Ok(quadrature::panels(g, 0.0, hi, n_osc))
    }
}

/// Evolves the reduced density matrix on a time grid (physical time; the
/// CLI layer reports it in units of 1/α).
pub fn coherence_evolution(
    p: &XYParams,
    rho0: &QubitDensity,
    t_grid: &[f64],
) -> Result<CoherenceSeries> {
    p.validate()?;
    rho0.validate()?;
    check_grid(t_grid)?;
    let th = 1.0 - p.theta;
    let mut ratio12 = Vec::with_capacity(t_grid.len());
    let mut pop11 = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let freq = 2.0 * t.abs() * p.alpha * th.sqrt();
        let re = integrate(p, freq, |u| {
            let om = p.omega(u);
            let (s, c) = (t * om).sin_cos();
            if om == 0.0 {
                return 1.0;
            }
            c * c - (p.mu * p.mu / (om * om)) * s * s
        })?;
        let im = if p.mu == 0.0 {
            0.0
        } else {
            integrate(p, freq, |u| {
                let om = p.omega(u);
                if om == 0.0 {
                    return 0.0;
                }
                (p.mu / om) * (2.0 * t * om).sin()
            })?
        };
        // ρ22(0) channel: the sin² bracket with the α²(1−θ)u² numerator; the
        // ρ11(0) channel is its complement, so populations stay normalized.
        let flip = integrate(p, freq, |u| {
            let om = p.omega(u);
            if om == 0.0 {
                return 0.0;
            }
            let s = (t * om).sin();
            (th * p.alpha * p.alpha * u * u / (om * om)) * s * s
        })?;
        ratio12.push(Complex64::new(re, im));
        pop11.push(rho0.rho11 * (1.0 - flip) + rho0.rho22() * flip);
    }
    Ok(CoherenceSeries {
        times: t_grid.to_vec(),
        ratio12,
        pop11,
    })
}

/// Asymptotic coherence ψ by the primary path: quadrature of the
/// time-averaged integrand (cos² → 1/2, sin² → 1/2, sin → 0).
pub fn asymptotic_coherence(p: &XYParams) -> Result<f64> {
    p.validate()?;
    let th = 1.0 - p.theta;
    integrate(p, 0.0, |u| {
        let c2u2 = th * p.alpha * p.alpha * u * u;
        c2u2 / (2.0 * (p.mu * p.mu + c2u2))
    })
}

/// ψ(X) = 1/2 − X + √π X^{3/2} e^X erfc(√X), the closed form with the sign
/// of the erfc term fixed so that ψ stays within (0, 1/2].
fn psi_of_x(x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    if x > 30.0 {
        // Tail series ψ = Σ_{n≥2} (−1)ⁿ (2n−1)!! X^{1−n} / 2ⁿ, truncated at
        // the smallest term.
        let mut sum = 0.0;
        let mut term = 3.0 / (4.0 * x); // n = 2
        let mut n = 2u32;
        loop {
            sum += term;
            let next = -term * ((2 * n + 1) as f64) / (2.0 * x);
            if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
                break;
            }
            term = next;
            n += 1;
            if n > 40 {
                break;
            }
        }
        return sum;
    }
    0.5 - x + std::f64::consts::PI.sqrt() * x.powf(1.5) * erfcx(x.sqrt())
}

/// Closed-form ψ (secondary path), evaluated through the scaled
/// complementary error function.
pub fn asymptotic_coherence_closed(p: &XYParams) -> Result<f64> {
    p.validate()?;
    let x = (p.mu / p.alpha).powi(2)
        * (p.beta * p.g + 1.5 / ((1.0 - p.theta) * p.s.casimir()));
    Ok(psi_of_x(x))
}

/// S → ∞ limit of ψ at fixed μ/α and βg.
pub fn large_s_asymptote(mu_over_alpha: f64, beta_g: f64) -> Result<f64> {
    if !(beta_g > 0.0) {
        return Err(Error::InvalidParameter {
            name: "beta_g",
            reason: format!("need beta*g > 0, got {beta_g}"),
        });
    }
    Ok(psi_of_x(mu_over_alpha * mu_over_alpha * beta_g))
}

/// ρ11(∞) = ρ11(0)(1 − ψ) + ρ22(0) ψ.
pub fn asymptotic_population(p: &XYParams, rho0: &QubitDensity) -> Result<f64> {
    rho0.validate()?;
    let psi = asymptotic_coherence(p)?;
    Ok(rho0.rho11 * (1.0 - psi) + rho0.rho22() * psi)
}

/// Decoherence time τ_D = (1/α)√(βg + 3/(2S(S+1))) and its large-S floor
/// τ_D^min = √(βg)/α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceTime {
    pub tau_d: f64,
    pub tau_d_min: f64,
    /// β = 0 with S → ∞ sends the floor to zero; flagged rather than hidden.
    pub degenerate: bool,
}

pub fn decoherence_time(p: &XYParams) -> Result<DecoherenceTime> {
    p.validate()?;
    let tau_d = (p.beta * p.g + 1.5 / p.s.casimir()).sqrt() / p.alpha;
    let tau_d_min = (p.beta * p.g).sqrt() / p.alpha;
    Ok(DecoherenceTime {
        tau_d,
        tau_d_min,
        degenerate: tau_d_min == 0.0,
    })
}

/// Least-squares fit of ln|ratio12| against t² over t ∈ [0, 0.2 τ_D];
/// returns the fitted Gaussian time constant τ with slope = −1/τ².
pub fn short_time_fit(series: &CoherenceSeries, p: &XYParams) -> Result<f64> {
    let tau = decoherence_time(p)?.tau_d;
    let cut = 0.2 * tau;
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.ratio12)
        .filter(|(t, _)| **t <= cut)
        .map(|(t, z)| (t * t, z.norm().ln()))
        .collect();
    if pts.len() < 20 {
        return Err(Error::Grid(format!(
            "short-time fit needs >= 20 points within [0, {cut:.4}], found {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if !(slope < 0.0) {
        return Err(Error::RootFind(format!(
            "short-time slope {slope} is not negative; no Gaussian decay to fit"
        )));
    }
    Ok((-1.0 / slope).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(mu: f64, s_twice: i64, beta: f64) -> XYParams {
        XYParams::new(mu, 1.0, 1.0, beta, 1000, HalfInteger::from_twice(s_twice))
    }

    fn pure_up() -> QubitDensity {
        QubitDensity {
            rho11: 1.0,
            rho12: Complex64::new(0.0, 0.0),
        }
    }

    fn mixed() -> QubitDensity {
        QubitDensity {
            rho11: 0.7,
            rho12: Complex64::new(0.3, 0.1),
        }
    }

    #[test]
    fn t0_identity() {
        for (mu, s, beta) in [(0.0, 1i64, 1.0), (1.0, 2, 0.1), (2.0, 5, 0.5), (0.3, 20, 2.0)] {
            let p = base(mu, s, beta);
            let series =
                coherence_evolution(&p, &mixed(), &[0.0, 0.1]).unwrap();
            assert!(
                (series.ratio12[0] - Complex64::new(1.0, 0.0)).norm() < 1e-9,
                "mu={mu} 2S={s}"
            );
            assert!((series.pop11[0] - 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn field_free_ratio_matches_analytic() {
        // μ = 0: ratio12(t) = (1 + c(t))/2 with
        // c(t) = (1 − 2t²α²/d) e^{−t²α²/d}, an exact Gaussian moment.
        let p = base(0.0, 2, 0.7);
        let d = p.a0_sq() + p.g * p.beta;
        let ts = crate::series::linear_grid(0.0, 8.0, 33).unwrap();
        let series = coherence_evolution(&p, &pure_up(), &ts).unwrap();
        for (k, &t) in ts.iter().enumerate() {
            let x = t * t * p.alpha * p.alpha / d;
            let c = (1.0 - 2.0 * x) * (-x).exp();
            let want = 0.5 * (1.0 + c);
            assert!(
                (series.ratio12[k].re - want).abs() < 1e-8,
                "t={t}: {} vs {want}",
                series.ratio12[k].re
            );
            assert!(series.ratio12[k].im.abs() < 1e-10, "ratio must be real at mu=0");
        }
    }

    #[test]
    fn field_free_populations() {
        let p = base(0.0, 2, 0.7);
        let d = p.a0_sq() + p.g * p.beta;
        let ts = crate::series::linear_grid(0.0, 5.0, 21).unwrap();
        let rho0 = QubitDensity {
            rho11: 0.9,
            rho12: Complex64::new(0.1, 0.0),
        };
        let series = coherence_evolution(&p, &rho0, &ts).unwrap();
        for (k, &t) in ts.iter().enumerate() {
            let x = t * t * p.alpha * p.alpha / d;
            let c = (1.0 - 2.0 * x) * (-x).exp();
            let want = 0.9 * (1.0 + c) / 2.0 + 0.1 * (1.0 - c) / 2.0;
            assert!((series.pop11[k] - want).abs() < 1e-8, "t={t}");
            assert!(series.pop11[k] >= -1e-6 && series.pop11[k] <= 1.0 + 1e-6);
        }
    }

    #[test]
    fn coupling_off_keeps_coherence() {
        let mut p = base(0.7, 2, 1.0);
        p.alpha = 1e-8;
        let ts = crate::series::linear_grid(0.0, 5.0, 11).unwrap();
        let series = coherence_evolution(&p, &mixed(), &ts).unwrap();
        for z in &series.ratio12 {
            assert!((z.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn psi_two_routes_agree() {
        for s_twice in [1i64, 2, 4, 10, 20] {
            for mu in [0.0, 0.5, 1.0, 2.0] {
                for bg in [0.1, 1.0] {
                    let p = base(mu, s_twice, bg);
                    let quad = asymptotic_coherence(&p).unwrap();
                    let closed = asymptotic_coherence_closed(&p).unwrap();
                    let rel = (quad - closed).abs() / closed.abs();
                    assert!(
                        rel < 1e-8,
                        "2S={s_twice} mu={mu} bg={bg}: quad {quad} vs closed {closed}"
                    );
                }
            }
        }
    }

    #[test]
    fn psi_field_free_is_half() {
        let p = base(0.0, 3, 0.4);
        assert_eq!(asymptotic_coherence_closed(&p).unwrap(), 0.5);
        assert!((asymptotic_coherence(&p).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn psi_reference_value() {
        // μ/α = 1, βg = 0.1, S → ∞ ⇒ X = 0.1
        let v = large_s_asymptote(1.0, 0.1).unwrap();
        assert!((v - 0.440556507920419639).abs() < 1e-12);
    }

    #[test]
    fn psi_monotone_in_s_and_bounded() {
        for mu in [0.3, 1.0, 2.0] {
            let mut prev = -1.0;
            for s_twice in [1i64, 2, 3, 4, 10, 20] {
                let p = base(mu, s_twice, 0.1);
                let psi = asymptotic_coherence(&p).unwrap();
                assert!(psi > 0.0 && psi <= 0.5 + 1e-12);
                assert!(psi >= prev - 1e-12, "psi not nondecreasing in S");
                prev = psi;
            }
        }
    }

    #[test]
    fn psi_large_field_limit() {
        // μ/α → ∞ pushes ψ → 0⁺, approaching 3/(4X).
        let mut last = f64::INFINITY;
        for mu in [5.0, 10.0, 30.0, 100.0] {
            let p = base(mu, 2, 1.0);
            let psi = asymptotic_coherence_closed(&p).unwrap();
            assert!(psi > 0.0 && psi < last);
            last = psi;
        }
        let p = base(100.0, 2, 1.0);
        let x = (100.0f64).powi(2) * (1.0 + 1.5 / p.s.casimir());
        let psi = asymptotic_coherence_closed(&p).unwrap();
        assert!((psi - 0.75 / x).abs() / (0.75 / x) < 1e-3);
    }

    #[test]
    fn psi_closed_smooth_at_series_switch() {
        let lo = psi_of_x(30.0 - 1e-9);
        let hi = psi_of_x(30.0 + 1e-9);
        assert!((lo - hi).abs() / hi < 1e-10, "{lo} vs {hi}");
    }

    #[test]
    fn s_to_infinity_converges_to_asymptote() {
        let want = large_s_asymptote(1.0, 0.1).unwrap();
        let p = base(1.0, 100, 0.1); // S = 50
        let got = asymptotic_coherence(&p).unwrap();
        assert!((got - want).abs() < 1e-3, "{got} vs {want}");
    }

    #[test]
    fn population_asymptotics() {
        let p = base(0.0, 2, 0.5);
        assert!((asymptotic_population(&p, &pure_up()).unwrap() - 0.5).abs() < 1e-9);

        let half = QubitDensity {
            rho11: 0.5,
            rho12: Complex64::new(0.2, 0.0),
        };
        for mu in [0.0, 1.0, 3.0] {
            let p = base(mu, 2, 0.5);
            assert!((asymptotic_population(&p, &half).unwrap() - 0.5).abs() < 1e-10);
        }

        // μ/α → ∞ freezes the populations
        let p = base(50.0, 2, 0.5);
        let v = asymptotic_population(&p, &pure_up()).unwrap();
        assert!((v - 1.0).abs() < 1e-3);
    }

    #[test]
    fn tau_d_values() {
        let p = base(0.0, 1, 1.0);
        let tau = decoherence_time(&p).unwrap();
        assert!((tau.tau_d - 3.0f64.sqrt()).abs() < 1e-14);
        assert!((tau.tau_d_min - 1.0).abs() < 1e-14);
        assert!(!tau.degenerate);

        // large S approaches the floor
        let p = base(0.0, 200, 1.0);
        let tau = decoherence_time(&p).unwrap();
        assert!((tau.tau_d - tau.tau_d_min) / tau.tau_d_min < 1e-2);

        // β = 0 flags the degenerate floor
        let p = base(0.0, 1, 0.0);
        assert!(decoherence_time(&p).unwrap().degenerate);
    }

    #[test]
    fn short_time_fit_constant_measured() {
        // The quadrature series decays with the Gaussian constant
        // (3/2)α²/(βg + 3/(2S(S+1))), i.e. the fit lands at √(2/3) τ_D.
        let p = base(0.0, 1, 1.0);
        let tau = decoherence_time(&p).unwrap().tau_d;
        let ts = crate::series::linear_grid(0.0, 0.2 * tau, 25).unwrap();
        let series = coherence_evolution(&p, &pure_up(), &ts).unwrap();
        let fitted = short_time_fit(&series, &p).unwrap();
        let expected = (2.0f64 / 3.0).sqrt() * tau;
        assert!(
            (fitted - expected).abs() / expected < 2e-2,
            "fitted {fitted}, expected {expected}"
        );
    }

    #[test]
    fn short_time_fit_scales_with_alpha_and_s() {
        let mk = |alpha: f64, s_twice: i64| {
            let mut p = base(0.0, s_twice, 1.0);
            p.alpha = alpha;
            let tau = decoherence_time(&p).unwrap().tau_d;
            let ts = crate::series::linear_grid(0.0, 0.2 * tau, 25).unwrap();
            let series = coherence_evolution(&p, &pure_up(), &ts).unwrap();
            short_time_fit(&series, &p).unwrap()
        };
        let t1 = mk(1.0, 1);
        let t2 = mk(2.0, 1);
        assert!((t1 / t2 - 2.0).abs() < 1e-2, "doubling alpha must halve tau");
        let t_bigs = mk(1.0, 20);
        assert!(t_bigs < t1, "larger S decoheres faster");
    }

    #[test]
    fn short_time_fit_needs_points() {
        let p = base(0.0, 1, 1.0);
        let ts = crate::series::linear_grid(0.0, 1.0, 5).unwrap();
        let series = coherence_evolution(&p, &pure_up(), &ts).unwrap();
        assert!(short_time_fit(&series, &p).is_err());
    }

    #[test]
    fn rejects_bad_density_matrix() {
        let p = base(0.0, 1, 1.0);
        let bad = QubitDensity {
            rho11: 0.1,
            rho12: Complex64::new(0.9, 0.0),
        };
        assert!(coherence_evolution(&p, &bad, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn long_time_settles_at_psi() {
        let p = base(1.0, 2, 0.1);
        let psi = asymptotic_coherence(&p).unwrap();
        let tau = decoherence_time(&p).unwrap().tau_d;
        let ts = crate::series::linear_grid(50.0 * tau, 100.0 * tau, 21).unwrap();
        let series = coherence_evolution(&p, &pure_up(), &ts).unwrap();
        let mean: f64 =
            series.ratio12.iter().map(|z| z.re).sum::<f64>() / series.ratio12.len() as f64;
        assert!((mean - psi).abs() < 1e-3, "mean {mean} vs psi {psi}");
    }
}
