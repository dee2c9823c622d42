//! Exact multiplicities ν(j, N; S) of the total angular momentum and the
//! level counts dim F_m, with arbitrary-precision integers throughout.
//!
//! dim F_m is the coefficient of x^{m+NS} in (1 + x + … + x^{2S})^N, computed
//! by iterated exact polynomial convolution; ν(j) = dim F_j − dim F_{j+1}.

use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::half::HalfInteger;
use crate::{Error, Result};

/// Exact multiplicity table for N spins of magnitude S.
///
/// Entries run over every admissible j (from 0 or 1/2 up to NS, steps of 1),
/// including any with ν = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegeneracyTable {
    n: u32,
    s: HalfInteger,
    /// dim F_m for 2m = -2NS ..= 2NS in steps of 2, ascending.
    dims: Vec<BigUint>,
    /// (j, ν) ascending in j.
    entries: Vec<(HalfInteger, BigUint)>,
}

/// Number of product basis states with total z-projection m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCount {
    pub m: HalfInteger,
    pub count: BigUint,
}

/// Coefficient list of (1 + x + … + x^{2S})^N; index i holds dim F_m with
/// 2m = 2i − 2NS.
fn dim_coefficients(n: u32, two_s: i64) -> Vec<BigUint> {
    let mut poly = vec![BigUint::one()];
    let window = two_s as usize + 1;
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); poly.len() + window - 1];
        for (i, a) in poly.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for k in 0..window {
                next[i + k] += a;
            }
        }
        poly = next;
    }
    poly
}

/// dim F_m for N spins of magnitude S.
pub fn dim_fm(n: u32, s: HalfInteger, m: HalfInteger) -> Result<BigUint> {
    let s = s.as_spin_magnitude()?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: "need N >= 1".into(),
        });
    }
    let two_ns = s.twice() * n as i64;
    if m.twice().abs() > two_ns {
        return Err(Error::QuantumNumber(format!(
            "|m| = {} exceeds NS = {}",
            m.abs(),
            HalfInteger::from_twice(two_ns)
        )));
    }
    if (m.twice() - two_ns) % 2 != 0 {
        return Err(Error::QuantumNumber(format!(
            "m = {m} has the wrong parity for N = {n}, S = {s}"
        )));
    }
    let dims = dim_coefficients(n, s.twice());
    Ok(dims[((m.twice() + two_ns) / 2) as usize].clone())
}

/// The paper-style constrained multinomial sum for dim F_m, kept as a
/// cross-check for N ≤ 6. Enumerates occupation vectors (L_{-S}, …, L_S) with
/// Σ L = N and Σ (S-ρ) L = m and adds N!/Π L! for each.
pub fn dim_fm_multinomial(n: u32, s: HalfInteger, m: HalfInteger) -> Result<BigUint> {
    let s = s.as_spin_magnitude()?;
    if n > 6 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: "multinomial cross-check is limited to N <= 6".into(),
        });
    }
    let levels = s.twice() as usize + 1;
    let mut total = BigUint::zero();
    let mut occ = vec![0u32; levels];
    fn rec(
        occ: &mut Vec<u32>,
        level: usize,
        remaining: u32,
        n: u32,
        s: HalfInteger,
        m: HalfInteger,
        total: &mut BigUint,
    ) {
        if level + 1 == occ.len() {
            occ[level] = remaining;
            let two_m: i64 = occ
                .iter()
                .enumerate()
                .map(|(k, &l)| (s.twice() - 2 * k as i64) * l as i64)
                .sum();
            if two_m == m.twice() {
                let mut term = factorial(n);
                for &l in occ.iter() {
                    term /= factorial(l);
                }
                *total += term;
            }
            return;
        }
        for l in 0..=remaining {
            occ[level] = l;
            rec(occ, level + 1, remaining - l, n, s, m, total);
        }
    }
    rec(&mut occ, 0, n, n, s, m, &mut total);
    Ok(total)
}

fn factorial(n: u32) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

/// Natural log of a positive big integer from its top 64 bits.
pub(crate) fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 63 {
        let mut v = 0u64;
        for (k, d) in x.to_u64_digits().iter().enumerate() {
            v |= d << (64 * k);
        }
        return (v as f64).ln();
    }
    let drop = bits - 63;
    let top = x >> drop;
    let mut v = 0u64;
    for (k, d) in top.to_u64_digits().iter().enumerate() {
        v |= d << (64 * k);
    }
    (v as f64).ln() + drop as f64 * std::f64::consts::LN_2
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// S = 1/2 closed form: ν(j, N; 1/2) = C(N, N/2−j) − C(N, N/2−j−1).
pub fn spin_half_closed_form(n: u32, j: HalfInteger) -> Result<BigUint> {
    let two_j = j.twice();
    if two_j < 0 || two_j > n as i64 || (two_j - n as i64) % 2 != 0 {
        return Err(Error::QuantumNumber(format!(
            "j = {j} is not admissible for N = {n} spin-1/2 particles"
        )));
    }
    let k = ((n as i64 - two_j) / 2) as u64;
    let first = binomial(n as u64, k);
    let second = if k == 0 {
        BigUint::zero()
    } else {
        binomial(n as u64, k - 1)
    };
    Ok(first - second)
}

impl DegeneracyTable {
    /// Builds the full table by convolution and differencing.
    pub fn build(n: u32, s: HalfInteger) -> Result<Self> {
        let s = s.as_spin_magnitude()?;
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "N",
                reason: "need N >= 1".into(),
            });
        }
        let two_ns = s.twice() * n as i64;
        let dims = dim_coefficients(n, s.twice());
        let mut entries = Vec::new();
        let mut two_j = two_ns % 2;
        while two_j <= two_ns {
            let idx = ((two_j + two_ns) / 2) as usize;
            let above = if idx + 1 < dims.len() {
                dims[idx + 1].clone()
            } else {
                BigUint::zero()
            };
            entries.push((HalfInteger::from_twice(two_j), &dims[idx] - &above));
            two_j += 2;
        }
        Ok(DegeneracyTable { n, s, dims, entries })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn s(&self) -> HalfInteger {
        self.s
    }

    pub fn max_j(&self) -> HalfInteger {
        HalfInteger::from_twice(self.s.twice() * self.n as i64)
    }

    /// ν(j), or an error when j is inadmissible for this (N, S).
    pub fn nu(&self, j: HalfInteger) -> Result<&BigUint> {
        let two_ns = self.s.twice() * self.n as i64;
        if j.twice() < 0 || j.twice() > two_ns || (j.twice() - two_ns) % 2 != 0 {
            return Err(Error::QuantumNumber(format!(
                "j = {j} not in table for N = {}, S = {}",
                self.n, self.s
            )));
        }
        let pos = ((j.twice() - (two_ns % 2)) / 2) as usize;
        Ok(&self.entries[pos].1)
    }

    pub fn entries(&self) -> &[(HalfInteger, BigUint)] {
        &self.entries
    }

    /// dim F_m by lookup from the stored coefficient list.
    pub fn level_count(&self, m: HalfInteger) -> Result<LevelCount> {
        let two_ns = self.s.twice() * self.n as i64;
        if m.twice().abs() > two_ns || (m.twice() - two_ns) % 2 != 0 {
            return Err(Error::QuantumNumber(format!(
                "m = {m} not admissible for N = {}, S = {}",
                self.n, self.s
            )));
        }
        Ok(LevelCount {
            m,
            count: self.dims[((m.twice() + two_ns) / 2) as usize].clone(),
        })
    }

    /// Σ_j (2j+1) ν(j), which must equal (2S+1)^N exactly.
    pub fn weighted_sum(&self) -> BigUint {
        self.entries
            .iter()
            .map(|(j, nu)| BigUint::from(j.multiplicity() as u64) * nu)
            .sum()
    }

    /// (2S+1)^N.
    pub fn state_count(&self) -> BigUint {
        BigUint::from((self.s.twice() + 1) as u64).pow(self.n)
    }

    /// Serializes as the cache CSV: header `two_j,nu`, decimal big integers,
    /// rows ascending in j, LF line endings.
    pub fn to_cache_csv(&self) -> String {
        let mut out = String::from("two_j,nu\n");
        for (j, nu) in &self.entries {
            out.push_str(&format!("{},{}\n", j.twice(), nu));
        }
        out
    }

    /// Parses a cache CSV produced by [`to_cache_csv`](Self::to_cache_csv)
    /// for the given (N, S) and validates it against the exact sum rule.
    pub fn from_cache_csv(n: u32, s: HalfInteger, text: &str) -> Result<Self> {
        let s = s.as_spin_magnitude()?;
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "N",
                reason: "need N >= 1".into(),
            });
        }
        let mut lines = text.lines();
        match lines.next() {
            Some("two_j,nu") => {}
            other => {
                return Err(Error::Parse(format!(
                    "bad cache header: {:?}, expected `two_j,nu`",
                    other
                )))
            }
        }
        let two_ns = s.twice() * n as i64;
        let mut entries = Vec::new();
        let mut expect_two_j = two_ns % 2;
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad cache row `{line}`")))?;
            let two_j: i64 = a
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad two_j `{a}`")))?;
            if two_j != expect_two_j {
                return Err(Error::Parse(format!(
                    "cache rows out of order: got two_j = {two_j}, expected {expect_two_j}"
                )));
            }
            let nu: BigUint = b
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad nu `{b}`")))?;
            entries.push((HalfInteger::from_twice(two_j), nu));
            expect_two_j += 2;
        }
        if expect_two_j != two_ns + 2 {
            return Err(Error::Parse(format!(
                "cache incomplete: expected rows up to two_j = {two_ns}"
            )));
        }
        // Rebuild dims from cumulative sums: dim F_m = Σ_{j >= |m|} ν(j).
        let mut dims = vec![BigUint::zero(); two_ns as usize + 1];
        let mut running = BigUint::zero();
        for (j, nu) in entries.iter().rev() {
            running += nu;
            let idx = ((j.twice() + two_ns) / 2) as usize;
            dims[idx] = running.clone();
        }
        // Fill negative m by symmetry and intermediate gaps.
        let mut table = DegeneracyTable {
            n,
            s,
            dims: vec![BigUint::zero(); two_ns as usize + 1],
            entries,
        };
        for i in 0..table.dims.len() {
            let two_m = 2 * i as i64 - two_ns;
            let idx_abs = ((two_m.abs() + two_ns) / 2) as usize;
            table.dims[i] = dims[idx_abs].clone();
        }
        if table.weighted_sum() != table.state_count() {
            return Err(Error::Parse(
                "cache fails the sum rule Σ(2j+1)ν = (2S+1)^N; refusing to load".into(),
            ));
        }
        Ok(table)
    }

    /// Writes the cache file atomically (write to temp, then rename).
    pub fn write_cache(&self, dir: &std::path::Path) -> Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir)?;
        let name = format!("deg_n{}_twos{}.csv", self.n, self.s.twice());
        let fin = dir.join(name);
        let tmp = dir.join(format!(".tmp-{}", std::process::id()));
        {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(self.to_cache_csv().as_bytes())?;
        }
        std::fs::rename(&tmp, &fin)?;
        Ok(fin)
    }

    /// Loads from the cache when present, otherwise builds and stores.
    pub fn load_or_build(n: u32, s: HalfInteger, dir: &std::path::Path) -> Result<Self> {
        let name = format!("deg_n{}_twos{}.csv", n, s.twice());
        let path = dir.join(name);
        if path.is_file() {
            let f = std::fs::File::open(&path)?;
            let mut text = String::new();
            for line in std::io::BufReader::new(f).lines() {
                text.push_str(&line?);
                text.push('\n');
            }
            if let Ok(t) = Self::from_cache_csv(n, s, &text) {
                return Ok(t);
            }
            // fall through: stale or corrupt cache gets rebuilt
        }
        let t = Self::build(n, s)?;
        let _ = t.write_cache(dir);
        Ok(t)
    }
}

/// True iff every entry of the N+1 table equals the windowed sum
/// ν(j, N+1; S) = Σ_{j' = |j−S|}^{j+S} ν(j', N; S).
pub fn degeneracy_recursion_check(
    table_n: &DegeneracyTable,
    table_n1: &DegeneracyTable,
) -> Result<bool> {
    if table_n.s() != table_n1.s() {
        return Err(Error::InvalidParameter {
            name: "S",
            reason: format!("tables mix S = {} and S = {}", table_n.s(), table_n1.s()),
        });
    }
    if table_n1.n() != table_n.n() + 1 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: "second table must have size N+1".into(),
        });
    }
    let two_s = table_n.s().twice();
    for (j, nu) in table_n1.entries() {
        let lo = (j.twice() - two_s).abs();
        let hi = j.twice() + two_s;
        let mut sum = BigUint::zero();
        let mut two_jp = lo;
        while two_jp <= hi {
            if let Ok(v) = table_n.nu(HalfInteger::from_twice(two_jp)) {
                sum += v;
            }
            two_jp += 2;
        }
        if &sum != nu {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff ν(J, N1+N2; S) = Σ_{j1,j2} ν(j1,N1) ν(j2,N2) over pairs allowed
/// by the triangle rule |j1−j2| ≤ J ≤ j1+j2 (the squared Clebsch–Gordan sum
/// collapses to this indicator).
pub fn composition_check(
    table_1: &DegeneracyTable,
    table_2: &DegeneracyTable,
    j_total: HalfInteger,
) -> Result<bool> {
    if table_1.s() != table_2.s() {
        return Err(Error::InvalidParameter {
            name: "S",
            reason: format!("tables mix S = {} and S = {}", table_1.s(), table_2.s()),
        });
    }
    let combined = DegeneracyTable::build(table_1.n() + table_2.n(), table_1.s())?;
    let want = combined.nu(j_total)?;
    let mut sum = BigUint::zero();
    for (j1, nu1) in table_1.entries() {
        if nu1.is_zero() {
            continue;
        }
        for (j2, nu2) in table_2.entries() {
            if nu2.is_zero() {
                continue;
            }
            let lo = (j1.twice() - j2.twice()).abs();
            let hi = j1.twice() + j2.twice();
            if j_total.twice() >= lo && j_total.twice() <= hi {
                sum += nu1 * nu2;
            }
        }
    }
    Ok(&sum == want)
}
