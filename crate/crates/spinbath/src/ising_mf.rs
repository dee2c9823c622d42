//! Transverse-field Ising bath in mean field: partition function,
//! order-parameter self-consistency, critical temperature, closed-form g(t)
//! for S ∈ {1, 3/2, 2} with their N→∞ Gaussian limits, and the validity
//! (breakdown) inequalities.

use num_complex::Complex64;

use crate::half::HalfInteger;
use crate::series::{check_grid, CoherenceSeries};
use crate::spin_algebra::site_trace_oracle;
use crate::{Error, Result};

/// Parameters of the transverse-Ising bath and its coupling to the qubit
/// (k_B = 1; `temperature` is the user-facing scale, β derived internally).
#[derive(Debug, Clone, PartialEq)]
pub struct IsingParams {
    pub n: u32,
    pub s: HalfInteger,
    /// Intra-bath coupling J > 0.
    pub j: f64,
    /// Qubit–bath coupling J0.
    pub j0: f64,
    /// Transverse field w ≥ 0.
    pub w: f64,
    /// Temperature T > 0.
    pub temperature: f64,
    /// Central field; contributes a global phase only.
    pub mu: f64,
}

impl IsingParams {
    pub fn validate(&self) -> Result<()> {
        self.s.as_spin_magnitude()?;
        if self.n < 1 {
            return Err(Error::InvalidParameter {
                name: "N",
                reason: "need N >= 1".into(),
            });
        }
        if !(self.j > 0.0) {
            return Err(Error::InvalidParameter {
                name: "J",
                reason: format!("need J > 0, got {}", self.j),
            });
        }
        if !(self.temperature > 0.0) {
            return Err(Error::InvalidParameter {
                name: "T",
                reason: format!("need T > 0, got {}", self.temperature),
            });
        }
        if !(self.w >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "w",
                reason: format!("need w >= 0, got {}", self.w),
            });
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }
}

/// Solved mean-field state of the bath.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSolution {
    /// Order parameter m ≥ 0.
    pub m: f64,
    /// Effective field Θ = √(w² + 4J²m²); equals w in the disordered phase.
    pub theta: f64,
    /// Critical temperature 2JS(S+1)/3.
    pub tc: f64,
    /// Ordered-phase condition (the supplementary w-inequality; its w → 0
    /// limit is T < T_c).
    pub ordered: bool,
    /// Gaussian-decay condition for the closed forms; `None` when S has no
    /// printed inequality (closed forms exist for S ∈ {1, 3/2, 2} only).
    pub decay_valid: Option<bool>,
}

/// coth(v) − 1/v, kept accurate through the small-v cancellation.
fn coth_minus_inv(v: f64) -> f64 {
    if v.abs() < 0.125 {
        let v2 = v * v;
        return v
            * (1.0 / 3.0
                + v2 * (-1.0 / 45.0
                    + v2 * (2.0 / 945.0 + v2 * (-1.0 / 4725.0 + v2 * (2.0 / 93555.0)))));
    }
    1.0 / v.tanh() - 1.0 / v
}

/// Right-hand side of the self-consistency equation as a function of
/// x = βΘ: (2S+1) coth((2S+1)x/2) − coth(x/2). The 1/v poles of the two
/// coth terms cancel algebraically, so they are removed before subtracting;
/// the form saturates at 2S instead of overflowing.
pub fn self_consistency_rhs(s: HalfInteger, x: f64) -> f64 {
    let k = (s.twice() + 1) as f64; // 2S+1
    k * coth_minus_inv(k * x / 2.0) - coth_minus_inv(x / 2.0)
}

/// The same right-hand side in the printed sinh-ratio form
/// [S sinh(β(S+1)Θ) − (S+1) sinh(βSΘ)] / [sinh(βΘ/2) sinh(β(2S+1)Θ/2)];
/// overflows for large x, kept for cross-checking the coth form.
pub fn self_consistency_rhs_sinh(s: HalfInteger, x: f64) -> f64 {
    let sv = s.value();
    let num = sv * ((sv + 1.0) * x).sinh() - (sv + 1.0) * (sv * x).sinh();
    let den = (x / 2.0).sinh() * ((2.0 * sv + 1.0) * x / 2.0).sinh();
    num / den
}

/// ln sinh(y) for y > 0 without overflow.
fn ln_sinh(y: f64) -> f64 {
    y + (-(-2.0 * y).exp()).ln_1p() - std::f64::consts::LN_2
}

/// ln of the single-site factor sinh((2S+1)x/2)/sinh(x/2); → ln(2S+1) at x=0.
fn ln_chi(s: HalfInteger, x: f64) -> f64 {
    let k = (s.twice() + 1) as f64;
    if x.abs() < 1e-8 {
        return k.ln() + (k * k - 1.0) * x * x / 24.0;
    }
    let x = x.abs();
    ln_sinh(k * x / 2.0) - ln_sinh(x / 2.0)
}

/// ln Z_N at order parameter m: −βm²JN + N ln[sinh((2S+1)βΘ/2)/sinh(βΘ/2)].
pub fn partition_function(p: &IsingParams, m: f64) -> Result<f64> {
    p.validate()?;
    if m < 0.0 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "order parameter must be >= 0".into(),
        });
    }
    let beta = p.beta();
    let theta = (p.w * p.w + 4.0 * p.j * p.j * m * m).sqrt();
    Ok(-beta * m * m * p.j * p.n as f64 + p.n as f64 * ln_chi(p.s, beta * theta))
}

/// T_c = 2JS(S+1)/3 (k_B = 1).
pub fn critical_temperature(p: &IsingParams) -> f64 {
    2.0 * p.j * p.s.casimir() / 3.0
}

const SCAN_POINTS: usize = 256;
const BISECT_TOL: f64 = 1e-12;

/// Solves Θ/J = rhs(βΘ) for Θ ≥ w and returns the mean-field state.
///
/// The scan covers [w + ε, 2JS] on 256 log-spaced points; each sign change is
/// refined by bisection and the largest root (the stable ferromagnetic
/// branch) wins. No root ⇒ the disordered state m = 0, Θ = w.
pub fn solve_order_parameter(p: &IsingParams) -> Result<MeanFieldSolution> {
    p.validate()?;
    let beta = p.beta();
    let tc = critical_temperature(p);
    let f = |theta: f64| theta / p.j - self_consistency_rhs(p.s, beta * theta);

    let hi = 2.0 * p.j * p.s.value();
    let lo = (p.w + 1e-12 * hi).min(hi * 0.999_999);
    let mut best_root: Option<f64> = None;
    let ratio = hi / lo;
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for k in 1..=SCAN_POINTS {
        let x = lo * ratio.powf(k as f64 / SCAN_POINTS as f64);
        let fx = f(x);
        if prev_f == 0.0 {
            best_root = Some(prev_x);
        } else if prev_f * fx < 0.0 {
            let (mut a, mut b) = (prev_x, x);
            let mut fa = prev_f;
            let mut iters = 0;
            while b - a > BISECT_TOL * b.max(1.0) {
                iters += 1;
                if iters > 200 {
                    return Err(Error::RootFind(format!(
                        "bisection stalled on bracket [{a}, {b}] (f = {fa}, {})",
                        f(b)
                    )));
                }
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            best_root = Some(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = fx;
    }

    let (m, theta) = match best_root {
        Some(theta) if theta > p.w => {
            let m = (theta * theta - p.w * p.w).max(0.0).sqrt() / (2.0 * p.j);
            (m, theta)
        }
        _ => (0.0, p.w),
    };
    let ordered = if p.w == 0.0 {
        p.temperature < tc
    } else {
        p.w / p.j < self_consistency_rhs(p.s, beta * p.w)
    };
    let mut sol = MeanFieldSolution {
        m,
        theta,
        tc,
        ordered,
        decay_valid: None,
    };
    sol.decay_valid = gaussian_validity(p, &sol).ok();
    Ok(sol)
}

/// The S-specific Gaussian-decay inequality on Θ²/J².
///
/// S = 1:    Θ²/J² < (1 + 2ch) / (3 + 2ch)
/// S = 3/2:  Θ²/J² < (3 + 4ch + 3ch₂) / (11 + 12ch + 3ch₂)
/// S = 2:    Θ²/J² < (5 + 10ch + 6ch₂ + 4ch₃) / (31 + 42ch + 18ch₂ + 4ch₃)
/// with chₖ = cosh(kβΘ). The inequality is strict; equality counts as
/// invalid.
pub fn gaussian_validity(p: &IsingParams, sol: &MeanFieldSolution) -> Result<bool> {
    let x = p.beta() * sol.theta;
    let lhs = sol.theta * sol.theta / (p.j * p.j);
    let rhs = validity_rhs(p.s, x)?;
    Ok(lhs < rhs)
}

fn validity_rhs(s: HalfInteger, x: f64) -> Result<f64> {
    // Scaled by e^{-k_max x} so large βΘ tends to the finite limit 1.
    let e = |k: f64, kmax: f64| ((k - kmax) * x.abs()).exp() + ((-k - kmax) * x.abs()).exp();
    match s.twice() {
        2 => {
            let num = e(0.0, 1.0) / 2.0 + e(1.0, 1.0);
            let den = 3.0 * e(0.0, 1.0) / 2.0 + e(1.0, 1.0);
            Ok(num / den)
        }
        3 => {
            let num = 3.0 * e(0.0, 2.0) / 2.0 + 2.0 * e(1.0, 2.0) + 1.5 * e(2.0, 2.0);
            let den = 5.5 * e(0.0, 2.0) + 6.0 * e(1.0, 2.0) + 1.5 * e(2.0, 2.0);
            Ok(num / den)
        }
        4 => {
            let num =
                2.5 * e(0.0, 3.0) + 5.0 * e(1.0, 3.0) + 3.0 * e(2.0, 3.0) + 2.0 * e(3.0, 3.0);
            let den =
                15.5 * e(0.0, 3.0) + 21.0 * e(1.0, 3.0) + 9.0 * e(2.0, 3.0) + 2.0 * e(3.0, 3.0);
            Ok(num / den)
        }
        other => Err(Error::UnsupportedSpin {
            two_s: other,
            supported: "S in {1, 3/2, 2}",
        }),
    }
}

/// Per-site factor of the closed-form g(t); the complete decoherence factor
/// is factor^N times the central-field phase e^{−iμt}.
fn closed_factor(p: &IsingParams, sol: &MeanFieldSolution, t: f64) -> Result<Complex64> {
    let beta = p.beta();
    let theta = sol.theta;
    let x = beta * theta;
    let phi = if sol.m == 0.0 || theta == 0.0 {
        0.0
    } else {
        p.j * p.j0 * sol.m * t / (theta * (p.n as f64).sqrt())
    };
    if phi == 0.0 {
        // A = 1 and every closed-form numerator telescopes to its
        // denominator; return the exact value instead of N-fold ulp noise.
        return Ok(Complex64::new(1.0, 0.0));
    }
    let a = Complex64::new(phi.cos(), 0.0)
        + Complex64::new(0.0, theta / p.j) * phi.sin();
    let c = (x / 2.0).cosh();
    let ch = x.cosh();
    match p.s.twice() {
        2 => {
            let num = Complex64::new(4.0 * c * c, 0.0) * a * a - 1.0;
            Ok(num / (1.0 + 2.0 * ch))
        }
        3 => {
            let num = Complex64::new(c, 0.0) * a * (Complex64::new(4.0 * c * c, 0.0) * a * a - 2.0);
            Ok(num / ((1.5 * x).cosh() + (0.5 * x).cosh()))
        }
        4 => {
            let ch2 = (2.0 * x).cosh();
            let a2 = a * a;
            let num = Complex64::new(1.0, 0.0) + Complex64::new(16.0 * c.powi(4), 0.0) * a2 * a2
                - Complex64::new(12.0 * c * c, 0.0) * a2;
            Ok(num / (1.0 + 2.0 * ch + 2.0 * ch2))
        }
        other => Err(Error::UnsupportedSpin {
            two_s: other,
            supported: "S in {1, 3/2, 2}",
        }),
    }
}

fn power_n(factor: Complex64, n: u32, mu: f64, t: f64) -> Result<Complex64> {
    if factor.norm() < 1e-300 {
        return Err(Error::FactorZeroCrossing { t });
    }
    // For integer N, exp(N Log f) = f^N on any log branch.
    let ln = factor.ln() * n as f64;
    Ok((ln + Complex64::new(0.0, -mu * t)).exp())
}

/// Closed-form finite-N g(t) for S ∈ {1, 3/2, 2} on a time grid
/// (log-domain power; μ enters as a global phase only).
pub fn g_meanfield(
    p: &IsingParams,
    sol: &MeanFieldSolution,
    t_grid: &[f64],
) -> Result<CoherenceSeries> {
    p.validate()?;
    check_grid(t_grid)?;
    let mut ratio = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let f = closed_factor(p, sol, t)?;
        ratio.push(power_n(f, p.n, p.mu, t)?);
    }
    Ok(CoherenceSeries {
        times: t_grid.to_vec(),
        ratio12: ratio,
        pop11: Vec::new(),
    })
}

/// g(t) from the dense per-site trace oracle raised to the N-th power; works
/// for any 2S ≤ 8 and is the slower ground-truth path.
pub fn g_meanfield_oracle(
    p: &IsingParams,
    sol: &MeanFieldSolution,
    t_grid: &[f64],
) -> Result<CoherenceSeries> {
    p.validate()?;
    check_grid(t_grid)?;
    let mut ratio = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let f = site_trace_oracle(p, sol.m, t)?;
        ratio.push(power_n(f, p.n, p.mu, t)?);
    }
    Ok(CoherenceSeries {
        times: t_grid.to_vec(),
        ratio12: ratio,
        pop11: Vec::new(),
    })
}

/// N→∞ limit of |g(t)|² for S ∈ {1, 3/2, 2}.
///
/// When the validity inequality fails the exponent is positive and the
/// returned value exceeds 1 for t > 0 — the mean-field breakdown, returned
/// as-is.
pub fn g_meanfield_limit(p: &IsingParams, sol: &MeanFieldSolution, t: f64) -> Result<f64> {
    p.validate()?;
    let x = p.beta() * sol.theta;
    let ch = x.cosh();
    let c2 = (x / 2.0).cosh().powi(2);
    let m2 = sol.m * sol.m;
    let j0t2 = p.j0 * p.j0 * t * t;
    if sol.m == 0.0 {
        return Ok(1.0);
    }
    let jj = p.j * p.j / (sol.theta * sol.theta);
    let exponent = match p.s.twice() {
        2 => {
            let d = 1.0 + 2.0 * ch;
            -(8.0 * m2 * j0t2 * c2 / (d * d)) * (d * jj - 2.0 * ch - 3.0)
        }
        3 => {
            let ch2 = (2.0 * x).cosh();
            -(m2 * j0t2 / (2.0 * ch * ch))
                * ((3.0 + 4.0 * ch + 3.0 * ch2) * jj - (11.0 + 12.0 * ch + 3.0 * ch2))
        }
        4 => {
            let ch2 = (2.0 * x).cosh();
            let ch3 = (3.0 * x).cosh();
            let e = 1.0 + 2.0 * ch + 2.0 * ch2;
            -(8.0 * m2 * j0t2 * c2 / (e * e))
                * ((5.0 + 10.0 * ch + 6.0 * ch2 + 4.0 * ch3) * jj
                    - (31.0 + 42.0 * ch + 18.0 * ch2 + 4.0 * ch3))
        }
        other => {
            return Err(Error::UnsupportedSpin {
                two_s: other,
                supported: "S in {1, 3/2, 2}",
            })
        }
    };
    Ok(exponent.exp())
}
