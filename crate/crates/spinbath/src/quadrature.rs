//! One-dimensional quadrature: adaptive Gauss–Kronrod refinement and fixed
//! composite panels for oscillatory integrands.

use std::collections::BinaryHeap;

use crate::{Error, Result};

// 15-point Kronrod nodes (positive half) with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Gauss–Kronrod 15(7) on [a, b]: (K15 value, |K15 - G7| error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let fsum = f(c - x) + f(c + x);
        kron += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    (kron * h, (kron - gauss).abs() * h.abs())
}

#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

struct Segment {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

const MAX_INTERVALS: usize = 4096;

/// Adaptive bisection with the 15(7) pair, refining the worst interval first.
///
/// Succeeds once the summed error estimate drops below
/// `max(abs_floor, rel_tol * |value|)`; otherwise reports the achieved
/// estimate in the error.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<Quad> {
    let (val, err) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { err, a, b, val });
    let mut total_val = val;
    let mut heap_err = err;
    // Error held by intervals too narrow to split further; it can never be
    // reduced, only reported.
    let mut frozen_err = 0.0;
    let mut segments = 1usize;
    loop {
        let total_err = heap_err + frozen_err;
        let target = abs_floor.max(rel_tol * total_val.abs());
        if total_err <= target {
            return Ok(Quad {
                value: total_val,
                abs_error: total_err,
                intervals: segments,
            });
        }
        let exhausted = segments >= MAX_INTERVALS || heap.is_empty();
        if exhausted {
            return Err(Error::QuadratureNonConvergence {
                estimate: total_val,
                error: total_err,
                target,
            });
        }
        let worst = heap.pop().expect("checked non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap_err -= worst.err;
            frozen_err += worst.err;
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total_val += v1 + v2 - worst.val;
        heap_err += e1 + e2 - worst.err;
        segments += 1;
        heap.push(Segment {
            err: e1,
            a: worst.a,
            b: mid,
            val: v1,
        });
        heap.push(Segment {
            err: e2,
            a: mid,
            b: worst.b,
            val: v2,
        });
    }
}

/// Fixed composite 15-point panels, for integrands whose oscillation rate is
/// known in advance. Panel width must be chosen ≤ a quarter period by the
/// caller through `n_panels`.
pub fn panels<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n_panels: usize) -> f64 {
    let n = n_panels.max(1);
    let h = (b - a) / n as f64;
    let mut acc = Neumaier::new();
    for k in 0..n {
        let lo = a + k as f64 * h;
        let (v, _) = gk15(&f, lo, lo + h);
        acc.add(v);
    }
    acc.sum()
}

/// Number of quarter-period panels covering [0, width] for a phase that
/// advances at most `max_freq` radians per unit length.
pub fn oscillatory_panel_count(width: f64, max_freq: f64) -> usize {
    let quarter = if max_freq > 0.0 {
        std::f64::consts::PI / (2.0 * max_freq)
    } else {
        f64::INFINITY
    };
    ((width / quarter).ceil() as usize).clamp(8, 2_000_000)
}

/// Neumaier compensated summation; deterministic left-to-right reduction.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = adaptive(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12, 1e-14).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12); // 4 - 4 + 2
    }

    #[test]
    fn gaussian_normalization() {
        let q = adaptive(|x| (-x * x).exp(), 0.0, 12.0, 1e-12, 1e-15).unwrap();
        assert!((q.value - core::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_panels_match_adaptive() {
        let f = |x: f64| (40.0 * x).cos() * (-x * x).exp();
        let a = adaptive(f, 0.0, 10.0, 1e-11, 1e-14).unwrap().value;
        let n = oscillatory_panel_count(10.0, 40.0);
        let p = panels(f, 0.0, 10.0, n);
        assert!((a - p).abs() < 1e-11, "adaptive {a} panels {p}");
    }

    #[test]
    fn singular_endpoint_converges() {
        // x^{-0.9} truncated at 1e-300: dyadic refinement reaches the target.
        let q = adaptive(|x: f64| x.powf(-0.9), 1e-300, 1.0, 1e-11, 0.0).unwrap();
        assert!((q.value - 10.0).abs() < 1e-9, "value {}", q.value);
    }

    #[test]
    fn nonconvergence_reported() {
        // Far more oscillations than the interval budget can resolve: the
        // failure carries the achieved estimate instead of a wrong value.
        let r = adaptive(|x: f64| (1e6 * x).sin(), 0.0, 1000.0, 1e-12, 0.0);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn neumaier_compensates() {
        let mut s = Neumaier::new();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.sum(), 10.0);
    }
}
