//! Dense spin-(2S+1) matrix algebra and small-system brute-force oracles.
//!
//! Everything here is deliberately direct: explicit ladder construction,
//! explicit matrix exponentials, explicit enumeration of product states. The
//! closed-form modules are validated against these.

use ndarray::Array2;
use num_complex::Complex64;

use crate::half::HalfInteger;
use crate::ising_mf::IsingParams;
use crate::matrix::{self, CMat};
use crate::quadrature::Neumaier;
use crate::series::CoherenceSeries;
use crate::{Error, Result};

/// Dense spin matrices in the S_z eigenbasis, eigenvalues S…−S descending.
#[derive(Debug, Clone)]
pub struct SpinMatrices {
    pub dimension: usize,
    pub sx: CMat,
    pub sy: CMat,
    pub sz: CMat,
}

/// Builds sx, sy, sz for magnitude S via the ladder operators.
pub fn build_spin_matrices(s: HalfInteger) -> Result<SpinMatrices> {
    let s = s.as_spin_magnitude()?;
    let two_s = s.twice();
    let dim = (two_s + 1) as usize;
    let sval = s.value();
    // m at row i is S - i (descending).
    let mut sz: CMat = Array2::zeros((dim, dim));
    for i in 0..dim {
        sz[[i, i]] = Complex64::new(sval - i as f64, 0.0);
    }
    let mut sp: CMat = Array2::zeros((dim, dim));
    for i in 1..dim {
        let m = sval - i as f64;
        let c = (sval * (sval + 1.0) - m * (m + 1.0)).sqrt();
        sp[[i - 1, i]] = Complex64::new(c, 0.0);
    }
    let sm = sp.t().mapv(|z| z.conj());
    let half = Complex64::new(0.5, 0.0);
    let half_i = Complex64::new(0.0, -0.5);
    let sx = (&sp + &sm) * half;
    let sy = (&sp - &sm) * half_i;
    Ok(SpinMatrices {
        dimension: dim,
        sx,
        sy,
        sz,
    })
}

/// exp(A) of a dense complex matrix (scaling-and-squaring oracle).
pub fn matrix_exponential(a: &Array2<Complex64>) -> Array2<Complex64> {
    matrix::expm(a)
}

/// Closed form of e^{-κG} for the spin-1 operator G = α·S_z + γ·S_x.
///
/// G³ = (α²+γ²) G, so
/// e^{-κG} = I + (cosh(κρ)-1)/ρ² · G² - sinh(κρ)/ρ · G with ρ = √(α²+γ²).
/// The branch of ρ is irrelevant: both coefficients are even in ρ.
/// At α²+γ² = 0 the operator is nilpotent (G³ = 0) and the quadratic
/// truncation I - κG + κ²G²/2 is exact.
pub fn spin1_exponential(kappa: Complex64, alpha: Complex64, gamma: Complex64) -> CMat {
    let spin1 = build_spin_matrices(HalfInteger::ONE).expect("S=1 is valid");
    let g = &spin1.sz * alpha + &spin1.sx * gamma;
    let g2 = matrix::matmul(&g, &g);
    let eye = Array2::from_diag_elem(3, Complex64::new(1.0, 0.0));
    let rho2 = alpha * alpha + gamma * gamma;
    if rho2.norm() < 1e-30 {
        return eye - &g * kappa + &g2 * (kappa * kappa * 0.5);
    }
    let rho = rho2.sqrt();
    let c = ((kappa * rho).cosh() - 1.0) / rho2;
    let s = (kappa * rho).sinh() / rho;
    eye + &g2 * c - &g * s
}

/// One factor of the mean-field per-site trace of the transverse-Ising g(t),
/// evaluated by dense matrix exponentials of the three exponents (two unitary,
/// one thermal), divided by the single-site partition factor.
pub fn site_trace_oracle(p: &IsingParams, m: f64, t: f64) -> Result<Complex64> {
    if p.s.twice() > 8 {
        return Err(Error::UnsupportedSpin {
            two_s: p.s.twice(),
            supported: "2S <= 8 for the dense oracle",
        });
    }
    let sm = build_spin_matrices(p.s)?;
    let beta = 1.0 / p.temperature;
    let eps = p.j0 / (2.0 * (p.n as f64).sqrt());
    let i = Complex64::i();
    let up = &sm.sz * Complex64::new(eps + 2.0 * p.j * m, 0.0) + &sm.sx * Complex64::new(p.w, 0.0);
    let th = &sm.sx * Complex64::new(p.w, 0.0) + &sm.sz * Complex64::new(2.0 * p.j * m, 0.0);
    let dn = &sm.sz * Complex64::new(eps - 2.0 * p.j * m, 0.0) - &sm.sx * Complex64::new(p.w, 0.0);
    let u1 = matrix::expm(&(&up * (i * t)));
    let b = matrix::expm(&(&th * Complex64::new(beta, 0.0)));
    let u2 = matrix::expm(&(&dn * (i * t)));
    let num = matrix::trace(&matrix::matmul(&matrix::matmul(&u1, &b), &u2));
    let den = matrix::trace(&b);
    Ok(num / den)
}

const ENUMERATION_MAX: u128 = 1_000_000;

/// Exact w = 0 Ising decoherence by enumerating every product configuration:
/// g(t) = Σ exp(i J0 M t/√N + βJ M²/N) / Σ exp(βJ M²/N), M = Σ mᵢ.
///
/// The enumeration is capped at 10⁶ states.
pub fn brute_force_ising_g(
    n: u32,
    s: HalfInteger,
    j: f64,
    j0: f64,
    beta: f64,
    t_grid: &[f64],
) -> Result<CoherenceSeries> {
    let s = s.as_spin_magnitude()?;
    let d = (s.twice() + 1) as u128;
    let states = d.checked_pow(n).ok_or(Error::EnumerationBound {
        states: u128::MAX,
        max: ENUMERATION_MAX,
    })?;
    if states > ENUMERATION_MAX {
        return Err(Error::EnumerationBound {
            states,
            max: ENUMERATION_MAX,
        });
    }
    crate::series::check_grid(t_grid)?;

    // Histogram over twice the total magnetization; the odometer walks every
    // product configuration once (digit v at a site means m = -S + v).
    let two_ns = (s.twice() as i64) * n as i64;
    let mut counts = vec![0u64; (two_ns + 1) as usize];
    let base = d as u64;
    let mut digits = vec![0u64; n as usize];
    let mut two_m = -two_ns;
    'walk: loop {
        counts[((two_m + two_ns) / 2) as usize] += 1;
        let mut pos = 0usize;
        loop {
            if pos == n as usize {
                break 'walk;
            }
            if digits[pos] + 1 < base {
                digits[pos] += 1;
                two_m += 2;
                break;
            }
            two_m -= 2 * digits[pos] as i64;
            digits[pos] = 0;
            pos += 1;
        }
    }

    let nf = n as f64;
    let sqrt_n = nf.sqrt();
    let ms: Vec<f64> = (0..counts.len())
        .map(|k| (2 * k as i64 - two_ns) as f64 / 2.0)
        .collect();
    let weights: Vec<f64> = counts
        .iter()
        .zip(&ms)
        .map(|(&c, &m)| c as f64 * (beta * j * m * m / nf).exp())
        .collect();
    let mut den = Neumaier::new();
    for &w in &weights {
        den.add(w);
    }
    let den = den.sum();
    let mut ratio = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut re = Neumaier::new();
        let mut im = Neumaier::new();
        for (&w, &m) in weights.iter().zip(&ms) {
            if w == 0.0 {
                continue;
            }
            let phase = j0 * m * t / sqrt_n;
            re.add(w * phase.cos());
            im.add(w * phase.sin());
        }
        ratio.push(Complex64::new(re.sum() / den, im.sum() / den));
    }
    Ok(CoherenceSeries {
        times: t_grid.to_vec(),
        ratio12: ratio,
        pop11: Vec::new(),
    })
}

/// Multiplicities ν(j) extracted from the raising operator on the full
/// product space: ν(j) equals the kernel dimension of J₊ restricted to the
/// J_z = j sector, i.e. the number of highest-weight vectors there.
///
/// This is the operator-level ground truth the combinatorial table is tested
/// against; cost is set by dense rank computations per sector.
pub fn brute_force_multiplicities(n: u32, s: HalfInteger) -> Result<Vec<(HalfInteger, u64)>> {
    let s = s.as_spin_magnitude()?;
    let d = (s.twice() + 1) as u128;
    let states = d.checked_pow(n).ok_or(Error::EnumerationBound {
        states: u128::MAX,
        max: ENUMERATION_MAX,
    })?;
    if states > ENUMERATION_MAX {
        return Err(Error::EnumerationBound {
            states,
            max: ENUMERATION_MAX,
        });
    }
    let dim = d as usize;
    let two_s = s.twice();
    let two_ns = two_s * n as i64;
    let nstates = states as usize;

    // Group product states by total 2m. State digits are per-site levels
    // k = 0..2S with m = S - k (descending), encoded base (2S+1).
    let mut sector_of: Vec<Vec<usize>> = vec![Vec::new(); two_ns as usize + 1];
    let mut index_in_sector: Vec<u32> = vec![0; nstates];
    for code in 0..nstates {
        let mut c = code;
        let mut two_m = 0i64;
        for _ in 0..n {
            let k = (c % dim) as i64;
            two_m += two_s - 2 * k;
            c /= dim;
        }
        let sec = ((two_m + two_ns) / 2) as usize;
        index_in_sector[code] = sector_of[sec].len() as u32;
        sector_of[sec].push(code);
    }

    let sval = s.value();
    let mut out = Vec::new();
    let mut two_j = two_ns % 2;
    while two_j <= two_ns {
        let sec = ((two_j + two_ns) / 2) as usize;
        let from = &sector_of[sec];
        let nu = if sec + 1 >= sector_of.len() {
            // top sector: J+ annihilates everything
            from.len() as u64
        } else {
            let to = &sector_of[sec + 1];
            // Dense J+ block from sector (rows: target states, cols: source).
            let mut b = vec![0.0f64; to.len() * from.len()];
            for (col, &code) in from.iter().enumerate() {
                let mut c = code;
                let mut place = 1usize;
                for _ in 0..n {
                    let k = (c % dim) as i64;
                    if k > 0 {
                        let m = sval - k as f64;
                        let amp = (sval * (sval + 1.0) - m * (m + 1.0)).sqrt();
                        let raised = code - place; // level k -> k-1
                        let row = index_in_sector[raised] as usize;
                        b[row * from.len() + col] += amp;
                    }
                    c /= dim;
                    place *= dim;
                }
            }
            // Nonzero singular values of J+ are ≥ √2, so a fixed threshold
            // makes the float rank exact.
            let rank = dense_rank(&mut b, to.len(), from.len(), 1e-6);
            (from.len() - rank) as u64
        };
        out.push((HalfInteger::from_twice(two_j), nu));
        two_j += 2;
    }
    Ok(out)
}

/// Row-echelon rank with partial pivoting.
fn dense_rank(a: &mut [f64], rows: usize, cols: usize, tol: f64) -> usize {
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..cols {
        let mut piv = row;
        let mut best = 0.0f64;
        for r in row..rows {
            let v = a[r * cols + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < tol {
            continue;
        }
        if piv != row {
            for j in col..cols {
                a.swap(row * cols + j, piv * cols + j);
            }
        }
        let p = a[row * cols + col];
        for r in row + 1..rows {
            let f = a[r * cols + col] / p;
            if f == 0.0 {
                continue;
            }
            for j in col..cols {
                a[r * cols + j] -= f * a[row * cols + j];
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{matmul, max_abs_diff};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn commutator(a: &CMat, b: &CMat) -> CMat {
        &matmul(a, b) - &matmul(b, a)
    }

    #[test]
    fn sz_half_is_diag() {
        let m = build_spin_matrices(HalfInteger::HALF).unwrap();
        assert!((m.sz[[0, 0]].re - 0.5).abs() < 1e-15);
        assert!((m.sz[[1, 1]].re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn spin1_matches_printed_matrices() {
        let m = build_spin_matrices(HalfInteger::ONE).unwrap();
        let r = 1.0 / 2f64.sqrt();
        for (i, j, want) in [
            (0usize, 1usize, r),
            (1, 0, r),
            (1, 2, r),
            (2, 1, r),
            (0, 0, 0.0),
            (0, 2, 0.0),
        ] {
            assert!((m.sx[[i, j]].re - want).abs() < 1e-15, "sx[{i},{j}]");
        }
        for (i, want) in [(0usize, 1.0), (1, 0.0), (2, -1.0)] {
            assert!((m.sz[[i, i]].re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn sz_squared_trace_spin_3_2() {
        let m = build_spin_matrices(HalfInteger::from_twice(3)).unwrap();
        let tr = matrix::trace(&matmul(&m.sz, &m.sz));
        assert!((tr.re - 5.0).abs() < 1e-13); // 9/4+1/4+1/4+9/4
        assert!(tr.im.abs() < 1e-15);
    }

    #[test]
    fn su2_algebra_all_supported_s() {
        let i = Complex64::i();
        for two_s in 1..=8 {
            let s = HalfInteger::from_twice(two_s);
            let m = build_spin_matrices(s).unwrap();
            assert!(max_abs_diff(&commutator(&m.sx, &m.sy), &(&m.sz * i)) < 1e-12);
            assert!(max_abs_diff(&commutator(&m.sy, &m.sz), &(&m.sx * i)) < 1e-12);
            assert!(max_abs_diff(&commutator(&m.sz, &m.sx), &(&m.sy * i)) < 1e-12);
            let total =
                &matmul(&m.sx, &m.sx) + &matmul(&m.sy, &m.sy) + &matmul(&m.sz, &m.sz);
            let want =
                Array2::from_diag_elem(m.dimension, Complex64::new(s.casimir(), 0.0));
            assert!(max_abs_diff(&total, &want) < 1e-12, "2S={two_s}");
        }
    }

    #[test]
    fn hermiticity() {
        for two_s in 1..=8 {
            let m = build_spin_matrices(HalfInteger::from_twice(two_s)).unwrap();
            for a in [&m.sx, &m.sy, &m.sz] {
                let adag = a.t().mapv(|z| z.conj());
                assert!(max_abs_diff(a, &adag) < 1e-15);
            }
        }
    }

    #[test]
    fn spin1_exponential_trivial_cases() {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let e = spin1_exponential(zero, one, one);
        assert!(max_abs_diff(&e, &matrix::identity(3)) < 1e-15);

        // alpha=1, gamma=0, kappa=1 -> diag(e^-1, 1, e^1)
        let e = spin1_exponential(one, one, zero);
        for (i, want) in [(0usize, (-1.0f64).exp()), (1, 1.0), (2, 1.0f64.exp())] {
            assert!((e[[i, i]].re - want).abs() < 1e-13);
        }
    }

    #[test]
    fn spin1_exponential_vs_dense_oracle() {
        let spin1 = build_spin_matrices(HalfInteger::ONE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let r = |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let (kappa, alpha, gamma) = (r(&mut rng), r(&mut rng), r(&mut rng));
            let closed = spin1_exponential(kappa, alpha, gamma);
            let g = &spin1.sz * alpha + &spin1.sx * gamma;
            let dense = matrix::expm(&(&g * (-kappa)));
            worst = worst.max(max_abs_diff(&closed, &dense));
        }
        assert!(worst < 1e-10, "worst elementwise error {worst}");
    }

    #[test]
    fn spin1_exponential_degenerate_branch() {
        // alpha^2 + gamma^2 = 0 with alpha = i gamma: nilpotent case.
        let gamma = Complex64::new(0.8, 0.0);
        let alpha = Complex64::i() * gamma;
        let kappa = Complex64::new(0.7, -0.3);
        let closed = spin1_exponential(kappa, alpha, gamma);
        let spin1 = build_spin_matrices(HalfInteger::ONE).unwrap();
        let g = &spin1.sz * alpha + &spin1.sx * gamma;
        let dense = matrix::expm(&(&g * (-kappa)));
        assert!(max_abs_diff(&closed, &dense) < 1e-12);
    }

    #[test]
    fn site_trace_at_t0_and_j0_off() {
        let p = IsingParams {
            n: 10_000,
            s: HalfInteger::ONE,
            j: 2.0,
            j0: 1.0,
            w: 1.0,
            temperature: 2.52,
            mu: 0.0,
        };
        let f0 = site_trace_oracle(&p, 0.28, 0.0).unwrap();
        assert!((f0 - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let mut poff = p.clone();
        poff.j0 = 0.0;
        for t in [0.5, 2.0, 7.0] {
            let f = site_trace_oracle(&poff, 0.28, t).unwrap();
            assert!((f - Complex64::new(1.0, 0.0)).norm() < 1e-11, "t={t}");
        }
    }

    #[test]
    fn brute_force_two_halves_zero_beta() {
        let ts = crate::series::linear_grid(0.0, 6.0, 40).unwrap();
        let g = brute_force_ising_g(2, HalfInteger::HALF, 1.0, 1.3, 0.0, &ts).unwrap();
        for (k, &t) in ts.iter().enumerate() {
            let want = (1.3 * t / (2.0 * 2f64.sqrt())).cos().powi(2);
            assert!((g.ratio12[k].re - want).abs() < 1e-13);
            assert!(g.ratio12[k].im.abs() < 1e-13);
        }
    }

    #[test]
    fn brute_force_t0_is_one() {
        let ts = [0.0, 1.0];
        let g = brute_force_ising_g(3, HalfInteger::ONE, 0.7, 1.0, 0.9, &ts).unwrap();
        assert!((g.ratio12[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn brute_force_sign_flip_conjugates() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let j = rng.gen_range(0.1..2.0);
            let j0 = rng.gen_range(0.1..2.0);
            let beta = rng.gen_range(0.0..1.5);
            let ts = crate::series::linear_grid(0.0, 5.0, 11).unwrap();
            let a = brute_force_ising_g(3, HalfInteger::ONE, j, j0, beta, &ts).unwrap();
            let b = brute_force_ising_g(3, HalfInteger::ONE, j, -j0, beta, &ts).unwrap();
            for k in 0..ts.len() {
                assert!((a.ratio12[k] - b.ratio12[k].conj()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn enumeration_bound_enforced() {
        let ts = [0.0, 1.0];
        let r = brute_force_ising_g(30, HalfInteger::ONE, 1.0, 1.0, 0.1, &ts);
        assert!(matches!(r, Err(Error::EnumerationBound { .. })));
    }

    #[test]
    fn brute_force_multiplicities_small() {
        // N=3, S=1 -> {0:1, 1:3, 2:2, 3:1}
        let nu = brute_force_multiplicities(3, HalfInteger::ONE).unwrap();
        let expect = [(0i64, 1u64), (2, 3), (4, 2), (6, 1)];
        assert_eq!(nu.len(), expect.len());
        for ((j, count), (two_j, want)) in nu.iter().zip(expect) {
            assert_eq!(j.twice(), two_j);
            assert_eq!(*count, want, "j={j}");
        }
    }
}
