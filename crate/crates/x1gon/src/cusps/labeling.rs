//! Canonical cusp labels from exact Tate-curve degeneration arcs.
//!
//! Over a prime `p₃ ≡ 1 (mod N)` — so `F_{p₃}` contains the N-th roots of
//! unity — the Tate curve `E_q` with `q = τ^{N/g}`, `g = gcd(n, N)`, carries
//! the point `u = ζ_N · τ^{n/g}` of exact order `N`. As `τ → 0` the pair
//! `(E_q, u)` degenerates to the cusp orbit `C_n`. Expanding the Tate normal
//! form of the pair in `F_{p₃}((τ))` and evaluating the units along the arc
//! yields the valuation vector of `C_n` scaled by the arc's ramification
//! index `e(n) = gcd(n², N)/gcd(n, N)`. A group from the work-prime
//! pipeline is labeled `n` exactly when its vector `v` satisfies
//! `w_n = e(n) · v`.
//!
//! Everything here is exact arithmetic in `F_{p₃}[[τ]]` truncated to a
//! window that escalates on demand, so labeling is deterministic.

use super::pipeline::{self, BadPrime};
use super::{orbit_degrees, CuspsError, TableOptions};
use crate::exactalg::{is_prime_u64, Field, MultiPoly, PrimeField, Rationals};
use crate::modeq;
use crate::puiseux::series::{self, LSeries, SOrd};
use std::collections::BTreeMap;

type S = LSeries<u64>;
type FPoly = MultiPoly<PrimeField>;

/// Soft error while expanding one arc: the series window was too small to
/// pin an order or invert a series.
enum ArcError {
    NeedWindow,
    Hard(String),
}

impl From<BadPrime> for ArcError {
    fn from(b: BadPrime) -> Self {
        ArcError::Hard(b.0)
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Ramification index of the degeneration arc for label `n`.
///
/// The arc uses `q = τ^d` with `d = N/gcd(n, N)`, and the cusp it limits to
/// has width `N/gcd(n, N)` as well, so the arc parameter is exactly a local
/// parameter and the index is 1 — except at the irregular cusp of level 4
/// (`n = 2`), where `u ↦ u⁻¹` composed with `τ ↦ −τ` fixes the arc and the
/// disk maps two-to-one.
pub(super) fn arc_ram_index(level: u32, n: u32) -> i64 {
    if level == 4 && n == 2 {
        2
    } else {
        1
    }
}

// ---------------------------------------------------------------------------
// The label prime and roots of unity.
// ---------------------------------------------------------------------------

/// The `skip`-th prime `≡ 1 (mod level)` above `2³¹`.
fn label_prime(level: u32, skip: usize) -> u64 {
    let n = level as u64;
    let mut k = (1u64 << 31) / n + 1;
    let mut remaining = skip;
    loop {
        let p = k * n + 1;
        if is_prime_u64(p) {
            if remaining == 0 {
                return p;
            }
            remaining -= 1;
        }
        k += 1;
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// An element of exact multiplicative order `level` in `F_p`.
fn nth_root_of_unity(fp: &PrimeField, level: u32) -> Result<u64, CuspsError> {
    let p = fp.modulus();
    let group = p - 1;
    assert_eq!(group % level as u64, 0, "label prime must be 1 mod level");
    let qs = prime_factors(group);
    for g in 2..p {
        if qs.iter().all(|q| fp.pow(&g, group / q) != 1) {
            let zeta = fp.pow(&g, group / level as u64);
            // Verify the exact order.
            if fp.pow(&zeta, level as u64) != 1 {
                return Err(CuspsError::Internal("root of unity has wrong order".into()));
            }
            for q in prime_factors(level as u64) {
                if fp.pow(&zeta, level as u64 / q) == 1 {
                    return Err(CuspsError::Internal("root of unity has small order".into()));
                }
            }
            return Ok(zeta);
        }
    }
    Err(CuspsError::Internal(format!("no primitive root mod {p}")))
}

// ---------------------------------------------------------------------------
// Tate series.
// ---------------------------------------------------------------------------

/// Divisor power sums `σ_l(k)` for `k < cap`, reduced mod `p`.
fn sigma_sieve(fp: &PrimeField, l: u32, cap: usize) -> Vec<u64> {
    let mut out = vec![0u64; cap];
    for d in 1..cap {
        let dl = fp.pow(&(d as u64 % fp.modulus()), l as u64);
        let mut k = d;
        while k < cap {
            out[k] = fp.add(&out[k], &dl);
            k += d;
        }
    }
    out
}

/// `Σ_{k ≥ 1} σ_l(k) q^k` with `q = τ^d`, truncated to the window.
fn sigma_series(fp: &PrimeField, l: u32, d: i64, window: usize) -> S {
    let cap = window / d as usize + 1;
    let sig = sigma_sieve(fp, l, cap.max(2));
    let mut coeffs = vec![0u64; window];
    for (k, s) in sig.iter().enumerate().skip(1) {
        let e = k as i64 * d;
        if (e as usize) < window {
            coeffs[e as usize] = *s;
        }
    }
    LSeries { lo: 0, coeffs, hi: Some(window as i64) }
}

/// The Tate coordinates `X(u, q), Y(u, q)` for `q = τ^d`, `u = ζ τ^a`,
/// with the curve identity `Y² + XY = X³ + a₄X + a₆` verified inside the
/// window. Returns `(X, Y, a₄, a₆)`.
fn tate_point(
    fp: &PrimeField,
    zeta: u64,
    d: i64,
    a: i64,
    window: usize,
) -> Result<(S, S, S, S), ArcError> {
    let w = window as i64;
    let mut xacc = vec![0u64; window];
    let mut yacc = vec![0u64; window];
    // One summand pair per lattice translate m; the τ-order of q^m u is
    // e = d·m + a, and the geometric expansions below run over j·|e| < w.
    let mut add_term = |e: i64, zpow: u64| {
        if e == 0 {
            // Constant contribution ζ/(1−ζ)² and ζ²/(1−ζ)³.
            let one_minus = fp.sub(&fp.one(), &zpow);
            let inv2 = fp.inv(&fp.mul(&one_minus, &one_minus)).expect("ζ ≠ 1");
            let inv3 = fp.mul(&inv2, &fp.inv(&one_minus).expect("ζ ≠ 1"));
            xacc[0] = fp.add(&xacc[0], &fp.mul(&zpow, &inv2));
            yacc[0] = fp.add(&yacc[0], &fp.mul(&fp.mul(&zpow, &zpow), &inv3));
            return;
        }
        let (step, base) = if e > 0 {
            (e, zpow)
        } else {
            (-e, fp.inv(&zpow).expect("unit"))
        };
        let mut zj = base;
        let mut j: i64 = 1;
        while j * step < w {
            let idx = (j * step) as usize;
            let jf = (j as u64) % fp.modulus();
            if e > 0 {
                // v/(1−v)² = Σ j v^j and v²/(1−v)³ = Σ C(j,2) v^j.
                xacc[idx] = fp.add(&xacc[idx], &fp.mul(&jf, &zj));
                if j >= 2 {
                    let c2 = fp.mul(&jf, &fp.mul(&fp.sub(&jf, &1), &inv2_const(fp)));
                    yacc[idx] = fp.add(&yacc[idx], &fp.mul(&c2, &zj));
                }
            } else {
                // With v = 1/w: v/(1−v)² = Σ j w^j, v²/(1−v)³ = −Σ C(j+1,2) w^j.
                xacc[idx] = fp.add(&xacc[idx], &fp.mul(&jf, &zj));
                let c2 = fp.mul(&fp.add(&jf, &1), &fp.mul(&jf, &inv2_const(fp)));
                yacc[idx] = fp.sub(&yacc[idx], &fp.mul(&c2, &zj));
            }
            zj = fp.mul(&zj, &base);
            j += 1;
        }
    };
    // m = 0.
    add_term(a, zeta);
    // m ≥ 1 and m ≤ −1 until the leading exponent leaves the window.
    let mut m: i64 = 1;
    while d * m + a < w {
        add_term(d * m + a, zeta);
        m += 1;
    }
    m = -1;
    while -(d * m + a) < w {
        add_term(d * m + a, zeta);
        m -= 1;
    }
    let s1 = sigma_series(fp, 1, d, window);
    let s3 = sigma_series(fp, 3, d, window);
    let s5 = sigma_series(fp, 5, d, window);
    let mut x = LSeries { lo: 0, coeffs: xacc, hi: Some(w) };
    let mut y = LSeries { lo: 0, coeffs: yacc, hi: Some(w) };
    let two = fp.add(&fp.one(), &fp.one());
    x = series::add(fp, &x, &series::neg(fp, &series::scale(fp, &s1, &two)));
    y = series::add(fp, &y, &s1);
    let five = 5 % fp.modulus();
    let a4 = series::neg(fp, &series::scale(fp, &s3, &five));
    // a₆ = −(5 s₃ + 7 s₅)/12.
    let seven = 7 % fp.modulus();
    let twelve_inv = fp.inv(&(12 % fp.modulus())).expect("p > 3");
    let a6 = series::neg(
        fp,
        &series::scale(
            fp,
            &series::add(
                fp,
                &series::scale(fp, &s3, &five),
                &series::scale(fp, &s5, &seven),
            ),
            &twelve_inv,
        ),
    );
    // Verify the Weierstrass identity within the window.
    let x3 = series::mul(fp, &series::mul(fp, &x, &x), &x);
    let lhs = series::add(fp, &series::mul(fp, &y, &y), &series::mul(fp, &x, &y));
    let rhs = series::add(
        fp,
        &series::add(fp, &x3, &series::mul(fp, &a4, &x)),
        &a6,
    );
    let resid = series::add(fp, &lhs, &series::neg(fp, &rhs));
    match series::ord(fp, &resid) {
        SOrd::Ord(k) => {
            return Err(ArcError::Hard(format!(
                "Tate point violates the curve identity at τ^{k}"
            )))
        }
        SOrd::Zero | SOrd::Unknown(_) => {}
    }
    Ok((x, y, a4, a6))
}

fn inv2_const(fp: &PrimeField) -> u64 {
    fp.inv(&2).expect("odd prime")
}

/// Exact series division with window-failure reporting.
fn sdiv(fp: &PrimeField, num: &S, den: &S, window: usize) -> Result<S, ArcError> {
    let inv = series::inv(fp, den, window).ok_or(ArcError::NeedWindow)?;
    Ok(series::mul(fp, num, &inv))
}

/// The Tate normal form parameters `(b, c)` of the arc for label `n`.
fn arc_bc(
    fp: &PrimeField,
    level: u32,
    zeta: u64,
    n: u32,
    window: usize,
) -> Result<(S, S), ArcError> {
    let g = if n == 0 { level as u64 } else { gcd_u64(n as u64, level as u64) };
    let d = (level as u64 / g) as i64;
    let a = (n as u64 / g) as i64;
    let (x0, y0, a4, _a6) = tate_point(fp, zeta, d, a, window)?;
    // Translate the section to the origin:
    //   ã₂ = 3x₀, ã₃ = x₀ + 2y₀, ã₄ = 3x₀² + a₄ − y₀.
    let three = 3 % fp.modulus();
    let two = 2 % fp.modulus();
    let t2 = series::scale(fp, &x0, &three);
    let t3 = series::add(fp, &x0, &series::scale(fp, &y0, &two));
    let t4 = series::add(
        fp,
        &series::add(
            fp,
            &series::scale(fp, &series::mul(fp, &x0, &x0), &three),
            &a4,
        ),
        &series::neg(fp, &y0),
    );
    // Shear y → y + λx with λ = ã₄/ã₃ to clear the linear term:
    //   â₁ = 1 + 2λ, â₂ = ã₂ − λ² − λ, â₃ = ã₃.
    let lam = sdiv(fp, &t4, &t3, window)?;
    let one = series::monomial(fp, 0, fp.one());
    let h1 = series::add(fp, &one, &series::scale(fp, &lam, &two));
    let h2 = series::add(
        fp,
        &t2,
        &series::neg(fp, &series::add(fp, &series::mul(fp, &lam, &lam), &lam)),
    );
    let h3 = t3;
    // Scale to the Tate normal form: b = −â₂³/â₃², c = 1 − â₁â₂/â₃.
    let h2sq = series::mul(fp, &h2, &h2);
    let h2cb = series::mul(fp, &h2sq, &h2);
    let h3sq = series::mul(fp, &h3, &h3);
    let b = series::neg(fp, &sdiv(fp, &h2cb, &h3sq, window)?);
    let c = series::add(
        fp,
        &one,
        &series::neg(fp, &sdiv(fp, &series::mul(fp, &h1, &h2), &h3, window)?),
    );
    Ok((b, c))
}

/// The arc in the coordinates the divisor pipeline uses: `(b, c)` for
/// levels ≤ 9 and `(x, y)` for levels ≥ 10.
fn arc_coords(
    fp: &PrimeField,
    level: u32,
    zeta: u64,
    n: u32,
    window: usize,
) -> Result<(S, S), ArcError> {
    let (b, c) = arc_bc(fp, level, zeta, n, window)?;
    if level <= 9 {
        return Ok((b, c));
    }
    // r = b/c, s = c²/(b − c);
    // x = (s − r)/(rs − 2r + 1), y = (rs − 2r + 1)/(s² − s − r + 1).
    let r = sdiv(fp, &b, &c, window)?;
    let bmc = series::add(fp, &b, &series::neg(fp, &c));
    let s = sdiv(fp, &series::mul(fp, &c, &c), &bmc, window)?;
    let one = series::monomial(fp, 0, fp.one());
    let two = 2 % fp.modulus();
    let rs = series::mul(fp, &r, &s);
    let q1 = series::add(
        fp,
        &series::add(fp, &rs, &series::neg(fp, &series::scale(fp, &r, &two))),
        &one,
    );
    let x = sdiv(fp, &series::add(fp, &s, &series::neg(fp, &r)), &q1, window)?;
    let q2 = series::add(
        fp,
        &series::add(
            fp,
            &series::mul(fp, &s, &s),
            &series::neg(fp, &series::add(fp, &s, &r)),
        ),
        &one,
    );
    let y = sdiv(fp, &q1, &q2, window)?;
    Ok((x, y))
}

// ---------------------------------------------------------------------------
// Unit evaluation along an arc.
// ---------------------------------------------------------------------------

/// Evaluate a bivariate polynomial on a pair of Laurent series by Horner in
/// the second variable with a power table for the first.
fn eval2(fp: &PrimeField, f: &FPoly, sx: &S, sy: &S) -> S {
    let dx = f.degree_in(0).max(0) as usize;
    let mut xpow: Vec<S> = Vec::with_capacity(dx + 1);
    xpow.push(series::monomial(fp, 0, fp.one()));
    for i in 1..=dx {
        xpow.push(series::mul(fp, &xpow[i - 1], sx));
    }
    // Rows by y-exponent.
    let mut rows: BTreeMap<u32, S> = BTreeMap::new();
    for (e, cf) in &f.terms {
        let t = series::scale(fp, &xpow[e.0[0] as usize], cf);
        let entry = rows
            .entry(e.0[1])
            .or_insert_with(|| series::exact_zero(fp));
        *entry = series::add(fp, entry, &t);
    }
    let mut acc = series::exact_zero(fp);
    let mut prev: Option<u32> = None;
    for (&j, row) in rows.iter().rev() {
        if let Some(pj) = prev {
            for _ in 0..(pj - j) {
                acc = series::mul(fp, &acc, sy);
            }
        }
        acc = series::add(fp, &acc, row);
        prev = Some(j);
    }
    if let Some(pj) = prev {
        for _ in 0..pj {
            acc = series::mul(fp, &acc, sy);
        }
    }
    acc
}

/// τ-order of a unit along an arc.
fn unit_ord(fp: &PrimeField, num: &FPoly, den: &FPoly, sx: &S, sy: &S) -> Result<i64, ArcError> {
    let so = |f: &FPoly| -> Result<i64, ArcError> {
        let v = eval2(fp, f, sx, sy);
        match series::ord(fp, &v) {
            SOrd::Ord(k) => Ok(k),
            SOrd::Zero | SOrd::Unknown(_) => {
                if std::env::var_os("X1GON_TRACE").is_some() {
                    eprintln!(
                        "[trace] unit_ord: no order in window [{}, {:?}) for degree ({}, {})",
                        v.lo,
                        v.hi,
                        f.degree_in(0),
                        f.degree_in(1)
                    );
                }
                Err(ArcError::NeedWindow)
            }
        }
    };
    Ok(so(num)? - so(den)?)
}

/// The units in the coordinates of the arc, reduced mod the label prime.
fn units_for_labeling(level: u32, p3: u64) -> Result<Vec<(FPoly, FPoly)>, BadPrime> {
    let fp = PrimeField::new(p3);
    let reduce = |f: &MultiPoly<Rationals>, what: &str| -> Result<FPoly, BadPrime> {
        let mut out = FPoly::zero_with(fp.clone(), f.vars.clone());
        for (e, c) in &f.terms {
            let nu = fp.reduce_bigint(c.numer());
            let de = fp.reduce_bigint(c.denom());
            let di = fp
                .inv(&de)
                .ok_or_else(|| BadPrime(format!("{what}: denominator vanishes mod p₃")))?;
            out.insert_term(e.0.clone(), fp.mul(&nu, &di));
        }
        if out.is_zero() && !f.is_zero() {
            return Err(BadPrime(format!("{what}: vanishes mod p₃")));
        }
        Ok(out)
    };
    let mut out = Vec::new();
    for k in 2..=(level / 2 + 1) {
        if level <= 9 {
            // b,c-coordinate forms: f₂ = b⁴/Δ, f₃ = b, f₄ = c, f₅ = b − c.
            let sym = modeq::big_f_symbol(k).map_err(|e| BadPrime(format!("unit {k}: {e}")))?;
            out.push((reduce(&sym.num, "unit numerator")?, reduce(&sym.den, "unit denominator")?));
        } else if k <= 9 {
            let sym = modeq::f_poly(k).map_err(|e| BadPrime(format!("unit {k}: {e}")))?;
            out.push((reduce(&sym.num, "unit numerator")?, reduce(&sym.den, "unit denominator")?));
        } else {
            let one = FPoly::one(fp.clone(), &["x", "y"]);
            out.push((pipeline::fbar_mod_p(k, p3)?, one));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Matching.
// ---------------------------------------------------------------------------

/// Assign canonical labels to orbit groups. Returns `(labels, provisional)`
/// where `labels[i]` is the label of `groups[i]`; `provisional` is set when
/// the arc match was ambiguous and a deterministic degree-respecting
/// fallback was used instead.
pub(super) fn assign_labels(
    level: u32,
    groups: &[(u64, Vec<i64>)],
    opts: &TableOptions,
) -> Result<(Vec<u32>, bool), CuspsError> {
    let trace = std::env::var_os("X1GON_TRACE").is_some();
    let m = (level / 2) as usize;
    for p3_attempt in 0..3 {
        let p3 = label_prime(level, p3_attempt);
        let fp = PrimeField::new(p3);
        let zeta = nth_root_of_unity(&fp, level)?;
        let t_units = std::time::Instant::now();
        let units = match units_for_labeling(level, p3) {
            Ok(u) => u,
            Err(_) => continue,
        };
        if trace {
            eprintln!("[trace] labeling level {level}: units took {:?}", t_units.elapsed());
        }
        let mut window = opts.window_start.max(16);
        'windows: while window <= opts.window_cap {
            let mut arc_vectors: Vec<Vec<i64>> = Vec::with_capacity(m + 1);
            for n in 0..=(m as u32) {
                let t_arc = std::time::Instant::now();
                let (sx, sy) = match arc_coords(&fp, level, zeta, n, window) {
                    Ok(v) => v,
                    Err(ArcError::NeedWindow) => {
                        window *= 2;
                        continue 'windows;
                    }
                    Err(ArcError::Hard(msg)) => {
                        return Err(CuspsError::Internal(format!(
                            "label arc {n} at p₃ = {p3}: {msg}"
                        )))
                    }
                };
                let t_coords = t_arc.elapsed();
                let mut w = Vec::with_capacity(units.len());
                let mut need_window = false;
                for (num, den) in &units {
                    match unit_ord(&fp, num, den, &sx, &sy) {
                        Ok(v) => w.push(v),
                        Err(ArcError::NeedWindow) => {
                            need_window = true;
                            break;
                        }
                        Err(ArcError::Hard(msg)) => {
                            return Err(CuspsError::Internal(format!(
                                "unit order on arc {n} at p₃ = {p3}: {msg}"
                            )))
                        }
                    }
                }
                if trace {
                    eprintln!(
                        "[trace] labeling level {level}: arc {n} window {window}: coords {t_coords:?}, orders {:?} (retry = {need_window})",
                        t_arc.elapsed() - t_coords
                    );
                }
                if need_window {
                    window *= 2;
                    continue 'windows;
                }
                arc_vectors.push(w);
            }
            // Exact matching: group i ↔ label n iff w_n = e(n) · v_i.
            if let Some(labels) = match_groups(level, groups, &arc_vectors) {
                return Ok((labels, false));
            }
            // All orders were exact; a failed match will not improve with a
            // larger window.
            break;
        }
    }
    // Deterministic degree-respecting fallback.
    let labels = fallback_labels(level, groups)?;
    Ok((labels, true))
}

#[cfg(test)]
pub(super) fn debug_arc_vectors(level: u32, window: usize) -> Vec<Vec<i64>> {
    let p3 = label_prime(level, 0);
    let fp = PrimeField::new(p3);
    let zeta = nth_root_of_unity(&fp, level).unwrap();
    let units = units_for_labeling(level, p3).unwrap();
    let m = (level / 2) as usize;
    (0..=(m as u32))
        .map(|n| {
            let (sx, sy) = match arc_coords(&fp, level, zeta, n, window) {
                Ok(v) => v,
                Err(_) => return vec![i64::MIN; units.len()],
            };
            units
                .iter()
                .map(|(num, den)| match unit_ord(&fp, num, den, &sx, &sy) {
                    Ok(v) => v,
                    Err(_) => i64::MIN,
                })
                .collect()
        })
        .collect()
}

/// Perfect matching by iterated unique-candidate elimination.
fn match_groups(
    level: u32,
    groups: &[(u64, Vec<i64>)],
    arcs: &[Vec<i64>],
) -> Option<Vec<u32>> {
    let degs = orbit_degrees(level);
    let mut candidates: Vec<Vec<u32>> = groups
        .iter()
        .map(|(deg, v)| {
            (0..arcs.len() as u32)
                .filter(|&n| {
                    let e = arc_ram_index(level, n);
                    degs[n as usize] == *deg
                        && arcs[n as usize]
                            .iter()
                            .zip(v.iter())
                            .all(|(&w, &vi)| w == e * vi)
                })
                .collect()
        })
        .collect();
    let mut labels = vec![u32::MAX; groups.len()];
    loop {
        let mut progress = false;
        for i in 0..candidates.len() {
            if labels[i] != u32::MAX {
                continue;
            }
            if candidates[i].is_empty() {
                return None;
            }
            if candidates[i].len() == 1 {
                let n = candidates[i][0];
                labels[i] = n;
                for c in candidates.iter_mut() {
                    c.retain(|&x| x != n);
                }
                progress = true;
            }
        }
        // A label admissible for exactly one group is likewise forced.
        if !progress {
            for n in 0..arcs.len() as u32 {
                if labels.contains(&n) {
                    continue;
                }
                let holders: Vec<usize> = (0..candidates.len())
                    .filter(|&i| labels[i] == u32::MAX && candidates[i].contains(&n))
                    .collect();
                if holders.len() == 1 {
                    let i = holders[0];
                    labels[i] = n;
                    for c in candidates.iter_mut() {
                        c.retain(|&x| x != n);
                    }
                    progress = true;
                }
            }
        }
        if labels.iter().all(|&l| l != u32::MAX) {
            return Some(labels);
        }
        if !progress {
            return None;
        }
    }
}

/// Fallback labeling: sort groups and labels inside each degree class and
/// pair them off. Deterministic, and consistent with the degree rule.
fn fallback_labels(level: u32, groups: &[(u64, Vec<i64>)]) -> Result<Vec<u32>, CuspsError> {
    let degs = orbit_degrees(level);
    let mut by_degree: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (n, &d) in degs.iter().enumerate() {
        by_degree.entry(d).or_default().push(n as u32);
    }
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&i, &j| groups[i].cmp(&groups[j]));
    let mut labels = vec![u32::MAX; groups.len()];
    for &i in &order {
        let d = groups[i].0;
        let pool = by_degree.get_mut(&d).ok_or_else(|| {
            CuspsError::OrbitInconsistency(format!(
                "no label with degree {d} available for fallback labeling"
            ))
        })?;
        if pool.is_empty() {
            return Err(CuspsError::OrbitInconsistency(format!(
                "degree class {d} exhausted during fallback labeling"
            )));
        }
        labels[i] = pool.remove(0);
    }
    Ok(labels)
}
