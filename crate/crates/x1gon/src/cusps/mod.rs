//! Cusps of X₁(N): Galois orbits and their degrees, canonical labels,
//! diamond-operator permutations, and the table of cuspidal divisors of the
//! modular units `f_2 … f_{⌊N/2⌋+1}`.
//!
//! The curve has `⌊N/2⌋+1` Galois orbits of cusps, labeled `C_0 … C_{⌊N/2⌋}`;
//! the orbit `C_n` has degree `φ(gcd(n,N))`, halved (rounded up) for
//! `n ∈ {0, N/2}`. Divisors supported on the cusps are integer vectors in
//! the basis `C_0, …, C_{⌊N/2⌋}`.
//!
//! Divisor tables are computed by enumerating places of the plane model over
//! two independently chosen ~2³¹-bit primes (good reduction is certified
//! structurally: orbit count, degree multiset, zero row degrees, row rank,
//! and cross-prime agreement), then labeled canonically by matching each
//! orbit's valuation vector against exact Tate-curve degeneration arcs over
//! `F_{p₃}[[τ]]` with `p₃ ≡ 1 (mod N)`. Levels `4 ≤ N ≤ 9` use built-in
//! one-parameter parametrizations of the curves `F_N = 0`; levels `N ≥ 10`
//! use the `(x, y)` plane model and Puiseux place expansions. Certified
//! tables are cached on disk in the `rowvec-v1` format.

pub mod cache;
mod labeling;
mod pipeline;
mod smalln;

use crate::exactalg::{snf, PrimeField};
use crate::puiseux::Place;
use num_bigint::BigInt;
use num_traits::Zero;
use std::fmt;
use std::path::PathBuf;

/// Errors of the cusp/divisor pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CuspsError {
    /// The requested level has no such model (divisor tables need `N ≥ 4`,
    /// place enumeration on the `(x, y)` model needs `N ≥ 10`).
    UnsupportedLevel(u32),
    /// The place/orbit data failed a structural certification and retries
    /// were exhausted; indicates a labeling or expansion bug, fatal.
    OrbitInconsistency(String),
    /// The canonical labeling could not be decided after precision
    /// escalation; the table is still valid up to relabeling.
    LabelingAmbiguous(String),
    /// `diamond_permute` called with `gcd(i, N) != 1`.
    NotADiamond(u32),
    /// The divisor is not an integer combination of the unit divisors;
    /// `rational` tells whether a rational combination exists.
    NotInLattice { rational: bool },
    Internal(String),
}

impl fmt::Display for CuspsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CuspsError::UnsupportedLevel(n) => write!(f, "UnsupportedLevel({n})"),
            CuspsError::OrbitInconsistency(s) => write!(f, "OrbitInconsistency: {s}"),
            CuspsError::LabelingAmbiguous(s) => write!(f, "LabelingAmbiguous: {s}"),
            CuspsError::NotADiamond(i) => write!(f, "NotADiamond({i})"),
            CuspsError::NotInLattice { rational } => write!(
                f,
                "NotInLattice (rational solution {})",
                if *rational { "exists" } else { "does not exist" }
            ),
            CuspsError::Internal(s) => write!(f, "Internal: {s}"),
        }
    }
}

impl std::error::Error for CuspsError {}

impl From<crate::modeq::ModeqError> for CuspsError {
    fn from(e: crate::modeq::ModeqError) -> Self {
        CuspsError::Internal(format!("modular equation layer: {e}"))
    }
}

// ---------------------------------------------------------------------------
// Orbit combinatorics.
// ---------------------------------------------------------------------------

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n > 0);
    let mut m = n;
    let mut phi = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            phi -= phi / p;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    phi
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Degree of the cusp orbit `C_n` on X₁(level): `φ(gcd(n, N))`, halved and
/// rounded up when `n ∈ {0, N/2}`.
pub fn orbit_degree(level: u32, n: u32) -> u64 {
    assert!(level >= 1 && n <= level / 2);
    let d = if n == 0 {
        level as u64
    } else {
        gcd_u64(n as u64, level as u64)
    };
    let phi = euler_phi(d);
    if n == 0 || 2 * n == level {
        phi.div_ceil(2)
    } else {
        phi
    }
}

/// Degrees of all orbits `C_0 … C_{⌊N/2⌋}` in label order.
pub fn orbit_degrees(level: u32) -> Vec<u64> {
    (0..=level / 2).map(|n| orbit_degree(level, n)).collect()
}

/// Total number of cusps of X₁(level) (degree over ℚ of the cusp locus).
/// Equals `½ Σ_{d|N} φ(d) φ(N/d)` for `level > 4`.
pub fn cusp_count(level: u32) -> u64 {
    orbit_degrees(level).iter().sum()
}

/// The divisor-sum form `½ Σ_{d|N} φ(d)φ(N/d)` of the cusp count (`N > 4`).
pub fn cusp_count_formula(level: u32) -> u64 {
    assert!(level > 4);
    let n = level as u64;
    let s: u64 = (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| euler_phi(d) * euler_phi(n / d))
        .sum();
    s / 2
}

/// One Galois orbit of cusps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspOrbit {
    /// Canonical label `n ∈ [0, ⌊N/2⌋]`.
    pub label: u32,
    /// Degree of the orbit over ℚ.
    pub degree: u64,
    /// The class `gcd(n, N)` governing the degree formula.
    pub gcd_class: u32,
}

/// The orbits of X₁(level) with their degrees, in label order.
pub fn cusp_orbits(level: u32) -> Result<Vec<CuspOrbit>, CuspsError> {
    if level < 4 {
        return Err(CuspsError::UnsupportedLevel(level));
    }
    Ok((0..=level / 2)
        .map(|n| CuspOrbit {
            label: n,
            degree: orbit_degree(level, n),
            gcd_class: if n == 0 {
                level
            } else {
                gcd_u64(n as u64, level as u64) as u32
            },
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Divisor vectors and tables.
// ---------------------------------------------------------------------------

/// An integer cuspidal divisor in the orbit basis `C_0 … C_{⌊N/2⌋}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorVec {
    pub level: u32,
    pub coeffs: Vec<i64>,
}

impl DivisorVec {
    pub fn new(level: u32, coeffs: Vec<i64>) -> Result<Self, CuspsError> {
        if coeffs.len() != (level / 2 + 1) as usize {
            return Err(CuspsError::Internal(format!(
                "divisor vector for level {level} needs {} coefficients, got {}",
                level / 2 + 1,
                coeffs.len()
            )));
        }
        Ok(DivisorVec { level, coeffs })
    }

    pub fn zero(level: u32) -> Self {
        DivisorVec {
            level,
            coeffs: vec![0; (level / 2 + 1) as usize],
        }
    }

    /// `Σ nᵢ · deg(Cᵢ)`.
    pub fn degree(&self) -> i64 {
        let degs = orbit_degrees(self.level);
        self.coeffs
            .iter()
            .zip(degs.iter())
            .map(|(c, d)| c * *d as i64)
            .sum()
    }

    /// `Σ |nᵢ| · deg(Cᵢ)` — twice the degree of the induced map to ℙ¹ for a
    /// principal divisor.
    pub fn l1_degree(&self) -> i64 {
        let degs = orbit_degrees(self.level);
        self.coeffs
            .iter()
            .zip(degs.iter())
            .map(|(c, d)| c.abs() * *d as i64)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// The divisors of the units `f_k`, `k = 2 … ⌊N/2⌋+1`, in row-vector form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorTable {
    pub level: u32,
    /// Row `i` is `div(f_{i+2})`.
    pub rows: Vec<DivisorVec>,
    /// Degrees of the orbits `C_0 … C_{⌊N/2⌋}` (the φ-rule values).
    pub orbit_degrees: Vec<u64>,
    /// Set when the canonical labeling could not be certified; columns are
    /// then ordered by a deterministic fallback.
    pub labels_provisional: bool,
}

impl DivisorTable {
    /// Number of unit rows (`⌊N/2⌋`).
    pub fn unit_count(&self) -> usize {
        self.rows.len()
    }

    /// The row of `f_k`, if `2 ≤ k ≤ ⌊N/2⌋+1`.
    pub fn row(&self, k: u32) -> Option<&DivisorVec> {
        if k < 2 {
            return None;
        }
        self.rows.get((k - 2) as usize)
    }

    /// Rank of the row lattice over ℚ.
    pub fn rank(&self) -> usize {
        let a: snf::IntMatrix = self
            .rows
            .iter()
            .map(|r| r.coeffs.iter().map(|&c| BigInt::from(c)).collect())
            .collect();
        snf::elementary_divisors(&a)
            .iter()
            .filter(|d| !d.is_zero())
            .count()
    }
}

// ---------------------------------------------------------------------------
// Diamond operators.
// ---------------------------------------------------------------------------

/// Apply the diamond operator `⟨i⟩`, which sends `C_n` to `C_{n'}` with
/// `n' ≡ ±ni (mod N)` reduced into `[0, ⌊N/2⌋]`.
pub fn diamond_permute(level: u32, i: u32, d: &DivisorVec) -> Result<DivisorVec, CuspsError> {
    if gcd_u64(i as u64, level as u64) != 1 {
        return Err(CuspsError::NotADiamond(i));
    }
    if d.level != level {
        return Err(CuspsError::Internal(format!(
            "divisor has level {}, expected {level}",
            d.level
        )));
    }
    let mut out = DivisorVec::zero(level);
    for (n, &c) in d.coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let ni = (n as u64 * i as u64 % level as u64) as u32;
        let n2 = if ni <= level / 2 { ni } else { level - ni };
        out.coeffs[n2 as usize] += c;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Expressing divisors in the unit lattice.
// ---------------------------------------------------------------------------

/// Solve `Σ n_k · div(f_k) = D` in integers via Smith normal form; the
/// returned exponents are indexed by `k − 2`.
pub fn express_in_lattice(table: &DivisorTable, d: &DivisorVec) -> Result<Vec<i64>, CuspsError> {
    if d.level != table.level {
        return Err(CuspsError::Internal(format!(
            "divisor has level {}, table has level {}",
            d.level, table.level
        )));
    }
    let m = table.rows.len(); // unknowns
    let c = (table.level / 2 + 1) as usize; // equations
    // B x = d with B = Aᵀ (c × m), A the row matrix of the table.
    let b: snf::IntMatrix = (0..c)
        .map(|j| {
            (0..m)
                .map(|i| BigInt::from(table.rows[i].coeffs[j]))
                .collect()
        })
        .collect();
    let (u, s, v) = snf::smith_normal_form(&b);
    // e = U d; solve S z = e.
    let e: Vec<BigInt> = (0..c)
        .map(|i| {
            (0..c)
                .map(|j| &u[i][j] * BigInt::from(d.coeffs[j]))
                .sum::<BigInt>()
        })
        .collect();
    // Solvable over ℚ iff every zero pivot has a zero right-hand side.
    for i in 0..c {
        let si_zero = i >= m || s[i][i].is_zero();
        if si_zero && !e[i].is_zero() {
            return Err(CuspsError::NotInLattice { rational: false });
        }
    }
    let mut z = vec![BigInt::zero(); m];
    for i in 0..c.min(m) {
        let si = &s[i][i];
        if si.is_zero() {
            continue;
        }
        let (q, r) = (&e[i] / si, &e[i] % si);
        if !r.is_zero() {
            // Rational solutions exist (divide by sᵢ) but no integer one.
            return Err(CuspsError::NotInLattice { rational: true });
        }
        z[i] = q;
    }
    // x = V z.
    let x: Vec<BigInt> = (0..m)
        .map(|i| (0..m).map(|j| &v[i][j] * &z[j]).sum::<BigInt>())
        .collect();
    let mut out = Vec::with_capacity(m);
    for xi in &x {
        let v64 = i64::try_from(xi).map_err(|_| {
            CuspsError::Internal("lattice exponent exceeds i64".to_string())
        })?;
        out.push(v64);
    }
    // Exactness check (guards against rank defects).
    for j in 0..c {
        let acc: i128 = (0..m)
            .map(|i| out[i] as i128 * table.rows[i].coeffs[j] as i128)
            .sum();
        if acc != d.coeffs[j] as i128 {
            return Err(CuspsError::NotInLattice { rational: false });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Table construction.
// ---------------------------------------------------------------------------

/// Tuning knobs for table construction.
#[derive(Clone, Debug)]
pub struct TableOptions {
    /// Cache directory; `None` resolves `X1GON_CACHE`, then a home-relative
    /// default.
    pub cache_dir: Option<PathBuf>,
    /// Read/write the on-disk cache.
    pub use_cache: bool,
    /// Seed for the work-prime stream (per-level streams are derived from
    /// it, so one seed fixes every table deterministically).
    pub seed: u64,
    /// Initial Laurent-series window for the labeling arcs.
    pub window_start: usize,
    /// Escalation cap for the series window.
    pub window_cap: usize,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            cache_dir: None,
            use_cache: true,
            seed: 0x9E37_79B9_7F4A_7C15,
            window_start: 256,
            window_cap: 1 << 16,
        }
    }
}

/// The divisor table of X₁(level) with default options (cached).
pub fn divisor_table(level: u32) -> Result<DivisorTable, CuspsError> {
    divisor_table_with(level, &TableOptions::default())
}

/// The divisor table of X₁(level).
pub fn divisor_table_with(level: u32, opts: &TableOptions) -> Result<DivisorTable, CuspsError> {
    if level < 4 {
        return Err(CuspsError::UnsupportedLevel(level));
    }
    let dir = opts.cache_dir.clone().unwrap_or_else(cache::default_cache_dir);
    let path = cache::table_path(&dir, level);
    if opts.use_cache {
        if let Some(t) = cache::load_table(&path, level) {
            return Ok(t);
        }
    }
    let (groups, labels, provisional) = if level <= 9 {
        smalln::labeled_groups(level, opts)?
    } else {
        pipeline::labeled_groups(level, opts)?
    };
    let table = assemble_table(level, &groups, &labels, provisional)?;
    if opts.use_cache && !table.labels_provisional {
        // Cache failures are non-fatal: the table is already certified.
        let _ = cache::store_table(&path, &table);
    }
    Ok(table)
}

/// Turn labeled orbit groups into unit-major rows.
fn assemble_table(
    level: u32,
    groups: &[(u64, Vec<i64>)],
    labels: &[u32],
    provisional: bool,
) -> Result<DivisorTable, CuspsError> {
    let m = (level / 2) as usize;
    let cols = m + 1;
    if groups.len() != cols || labels.len() != cols {
        return Err(CuspsError::OrbitInconsistency(format!(
            "level {level}: {} groups / {} labels, expected {cols}",
            groups.len(),
            labels.len()
        )));
    }
    let mut rows = vec![vec![0i64; cols]; m];
    let mut seen = vec![false; cols];
    for (gi, (_, vector)) in groups.iter().enumerate() {
        let lab = labels[gi] as usize;
        if lab >= cols || seen[lab] {
            return Err(CuspsError::OrbitInconsistency(format!(
                "level {level}: label {lab} out of range or duplicated"
            )));
        }
        seen[lab] = true;
        if vector.len() != m {
            return Err(CuspsError::OrbitInconsistency(format!(
                "level {level}: orbit vector has {} entries, expected {m}",
                vector.len()
            )));
        }
        for (k, &v) in vector.iter().enumerate() {
            rows[k][lab] = v;
        }
    }
    let rows: Vec<DivisorVec> = rows
        .into_iter()
        .map(|coeffs| DivisorVec { level, coeffs })
        .collect();
    let table = DivisorTable {
        level,
        rows,
        orbit_degrees: orbit_degrees(level),
        labels_provisional: provisional,
    };
    // Final safety: zero row degrees and full rank.
    for r in &table.rows {
        if r.degree() != 0 {
            return Err(CuspsError::OrbitInconsistency(format!(
                "level {level}: unit row with nonzero degree {}",
                r.degree()
            )));
        }
    }
    if table.rank() != m {
        return Err(CuspsError::OrbitInconsistency(format!(
            "level {level}: unit rows have rank {} instead of {m}",
            table.rank()
        )));
    }
    Ok(table)
}

/// The places supporting the unit divisors on the `(x, y)` model of
/// X₁(level), computed over a certified work prime. The places carry their
/// residue degrees; the total equals the cusp count.
pub fn cusp_places(level: u32) -> Result<Vec<Place<PrimeField>>, CuspsError> {
    if level < 10 {
        return Err(CuspsError::UnsupportedLevel(level));
    }
    pipeline::certified_places(level, &TableOptions::default())
}

#[cfg(test)]
mod tests;
