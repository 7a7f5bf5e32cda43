//! Work-prime divisor pipeline for levels `N ≥ 10` on the `(x, y)` plane
//! model.
//!
//! For a ~2³¹ work prime `p` the pipeline reduces the units mod `p`, builds
//! the plane curve `f̄_N mod p`, enumerates every place supporting a unit
//! divisor, and reads off the valuation vector of each place. Galois orbits
//! are recovered by grouping places with equal vectors (summing residue
//! degrees). A prime is accepted only if the result certifies structurally:
//! right orbit count, orbit degrees matching the φ-rule multiset, every unit
//! row of degree zero, and full row rank. Two independent primes must agree
//! before a table is emitted.
//!
//! The curve and the units `f̄_k` with `k ≥ 14` are reconstructed directly
//! mod `p` by univariate slicing: the substitution
//! `W = Bd^db · Cd^dc · F_k(B, C)` is evaluated on lines `x = x₀` with a
//! double Horner scheme (never materializing the huge bivariate `W`), the
//! fixed exceptional factors of the coordinate change are stripped from each
//! slice, and the small defining polynomial is interpolated from the cleaned
//! slices. Units with `k ≤ 13` reduce the exact characteristic-zero forms.

use super::labeling;
use super::{cusp_count, orbit_degrees, CuspsError, TableOptions};
use crate::exactalg::{
    factor, next_prime_u64, snf, upoly, Field, MultiPoly, PrimeField, Rationals, UPoly,
};
use crate::modeq::{self, fnpoly};
use crate::puiseux::{valuation, Center, Curve, Place};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Mutex, OnceLock};

type FPoly = MultiPoly<PrimeField>;
type QPoly = MultiPoly<Rationals>;

/// Soft per-prime failure: the caller advances to the next work prime.
#[derive(Debug)]
pub(super) struct BadPrime(pub String);

/// One certified reduction: the orbit groups (degree, valuation vector)
/// sorted by vector, and the supporting places.
pub(super) struct Leg {
    pub p: u64,
    pub groups: Vec<(u64, Vec<i64>)>,
    pub places: Vec<Place<PrimeField>>,
}

const MAX_PRIME_ATTEMPTS: usize = 10;

// ---------------------------------------------------------------------------
// Reductions mod p.
// ---------------------------------------------------------------------------

/// Reduce a rational-coefficient polynomial mod `p`, preserving the exact
/// coefficient ratios. `None` when a coefficient denominator vanishes mod
/// `p`.
fn reduce_qpoly(fp: &PrimeField, f: &QPoly) -> Option<FPoly> {
    let mut out = FPoly::zero_with(fp.clone(), f.vars.clone());
    for (e, c) in &f.terms {
        let n = fp.reduce_bigint(c.numer());
        let d = fp.reduce_bigint(c.denom());
        let di = fp.inv(&d)?;
        out.insert_term(e.0.clone(), fp.mul(&n, &di));
    }
    Some(out)
}

/// Reduce with a degree-preservation check in both variables (guards
/// against `p` dividing a leading coefficient).
fn reduce_checked(fp: &PrimeField, f: &QPoly, what: &str) -> Result<FPoly, BadPrime> {
    let g = reduce_qpoly(fp, f)
        .ok_or_else(|| BadPrime(format!("{what}: coefficient denominator vanishes mod p")))?;
    for v in 0..2 {
        if g.degree_in(v) != f.degree_in(v) {
            return Err(BadPrime(format!("{what}: degree drop in variable {v} mod p")));
        }
    }
    Ok(g)
}

/// The fixed exceptional factors of the `(b, c) → (x, y)` coordinate change,
/// reduced mod `p`.
fn atoms_mod_p(fp: &PrimeField) -> Result<Vec<FPoly>, BadPrime> {
    modeq::base_strip_atoms()
        .iter()
        .map(|a| reduce_checked(fp, a, "strip atom"))
        .collect()
}

// ---------------------------------------------------------------------------
// Univariate slicing of the modular-equation substitution.
// ---------------------------------------------------------------------------

/// Partial evaluation `f(x₀, y)` as a univariate polynomial in `y`.
fn slice_at_x(fp: &PrimeField, f: &FPoly, x0: u64) -> UPoly<PrimeField> {
    let dy = f.degree_in(1).max(0) as usize;
    let mut coeffs = vec![fp.zero(); dy + 1];
    for (e, c) in &f.terms {
        let t = fp.mul(c, &fp.pow(&x0, e.0[0] as u64));
        let slot = &mut coeffs[e.0[1] as usize];
        *slot = fp.add(slot, &t);
    }
    upoly::normalize(fp, coeffs)
}

/// Coefficient grid of (a scalar multiple of) `F_k mod p`:
/// `grid[i][j]` is the coefficient of `b^i c^j`.
fn f_grid_mod_p(k: u32, p: u64) -> Result<Vec<Vec<u64>>, BadPrime> {
    let fp = PrimeField::new(p);
    let poly = if k <= 21 {
        let exact = modeq::modular_equation_f(k)
            .map_err(|e| BadPrime(format!("modular equation {k}: {e}")))?;
        reduce_checked(&fp, &exact, "modular equation")?
    } else {
        fnpoly::modular_equation_f_mod_p(k, p)
            .map_err(|e| BadPrime(format!("modular equation {k} mod p: {e}")))?
    };
    if poly.is_zero() {
        return Err(BadPrime(format!("modular equation {k} vanishes mod p")));
    }
    let db = poly.degree_in(0) as usize;
    let dc = poly.degree_in(1) as usize;
    let mut grid = vec![vec![0u64; dc + 1]; db + 1];
    for (e, c) in &poly.terms {
        grid[e.0[0] as usize][e.0[1] as usize] = *c;
    }
    Ok(grid)
}

/// Evaluate the substitution numerator
/// `W(x₀, y) = Σ_{i,j} a_{ij} Bn^i Bd^{db−i} Cn^j Cd^{dc−j} |_{x=x₀}`
/// by a double Horner scheme on univariate slices.
fn slice_w(
    fp: &PrimeField,
    grid: &[Vec<u64>],
    bn: &UPoly<PrimeField>,
    bd: &UPoly<PrimeField>,
    cn: &UPoly<PrimeField>,
    cd: &UPoly<PrimeField>,
) -> UPoly<PrimeField> {
    let db = grid.len() - 1;
    let dc = grid[0].len() - 1;
    let mut bd_pows: Vec<UPoly<PrimeField>> = Vec::with_capacity(db + 1);
    bd_pows.push(upoly::one(fp));
    for i in 1..=db {
        bd_pows.push(upoly::mul(fp, &bd_pows[i - 1], bd));
    }
    let mut cd_pows: Vec<UPoly<PrimeField>> = Vec::with_capacity(dc + 1);
    cd_pows.push(upoly::one(fp));
    for j in 1..=dc {
        cd_pows.push(upoly::mul(fp, &cd_pows[j - 1], cd));
    }
    // row_j(y) = Σ_i a_{ij} Bn^i Bd^{db−i}, Horner in the b-direction.
    let row = |j: usize| -> UPoly<PrimeField> {
        let mut h = upoly::constant(fp, grid[db][j]);
        for i in (0..db).rev() {
            h = upoly::mul(fp, &h, bn);
            let t = upoly::mul_scalar(fp, &bd_pows[db - i], &grid[i][j]);
            h = upoly::add(fp, &h, &t);
        }
        h
    };
    // W = Σ_j row_j Cn^j Cd^{dc−j}, Horner in the c-direction.
    let mut w = row(dc);
    for j in (0..dc).rev() {
        w = upoly::mul(fp, &w, cn);
        let t = upoly::mul(fp, &row(j), &cd_pows[dc - j]);
        w = upoly::add(fp, &w, &t);
    }
    w
}

struct WSample {
    x0: u64,
    raw: UPoly<PrimeField>,
    counts: Vec<u32>,
}

/// Reconstruct the stripped plane polynomial `f̄_k mod p` (`k ≥ 10`) by
/// interpolating cleaned slices of the substitution numerator. The result
/// is `f̄_k` up to a nonzero scalar.
fn fbar_slices(k: u32, p: u64) -> Result<FPoly, BadPrime> {
    let fp = PrimeField::new(p);
    let grid = f_grid_mod_p(k, p)?;
    let db = grid.len() - 1;
    let dc = grid[0].len() - 1;
    let subs = modeq::bc_to_xy_subs();
    let bn2 = reduce_checked(&fp, &subs[0].num, "B numerator")?;
    let bd2 = reduce_checked(&fp, &subs[0].den, "B denominator")?;
    let cn2 = reduce_checked(&fp, &subs[1].num, "C numerator")?;
    let cd2 = reduce_checked(&fp, &subs[1].den, "C denominator")?;
    let atoms = atoms_mod_p(&fp)?;
    // Atoms acting in the y-direction of a slice; `x` and `x − 1` become the
    // scalars x₀ and x₀ − 1, which stay in the interpolation target as the
    // bivariate factors x^{m} (x−1)^{m'} and are stripped at the end.
    let y_atoms: Vec<&FPoly> = atoms.iter().filter(|a| a.degree_in(1) > 0).collect();
    let y_degs: Vec<i64> = y_atoms.iter().map(|a| a.degree_in(1)).collect();

    let cap = 5 * db + 3 * dc + 4;
    let mut rng = ChaCha20Rng::seed_from_u64(
        0x5ca1_ab1e_0000_0000 ^ p ^ ((k as u64) << 40),
    );
    let mut used: BTreeSet<u64> = BTreeSet::new();
    let mut samples: Vec<WSample> = Vec::new();
    let mut draw_sample = |samples: &mut Vec<WSample>, used: &mut BTreeSet<u64>| -> Result<(), BadPrime> {
        for _ in 0..10_000 {
            let x0 = 2 + rng.gen_range(0..p - 3);
            if !used.insert(x0) {
                continue;
            }
            let bn = slice_at_x(&fp, &bn2, x0);
            let bd = slice_at_x(&fp, &bd2, x0);
            let cn = slice_at_x(&fp, &cn2, x0);
            let cd = slice_at_x(&fp, &cd2, x0);
            if [&bn, &bd, &cn, &cd].iter().any(|s| s.is_empty()) {
                continue;
            }
            let raw = slice_w(&fp, &grid, &bn, &bd, &cn, &cd);
            if raw.is_empty() {
                continue;
            }
            // Count the full multiplicity of each exceptional factor in this
            // slice; degenerate (degree-dropping) atom slices are skipped.
            let mut w = raw.clone();
            let mut counts = vec![0u32; y_atoms.len()];
            let mut ok = true;
            for (ai, a2) in y_atoms.iter().enumerate() {
                let a = slice_at_x(&fp, a2, x0);
                if upoly::deg(&fp, &a) != y_degs[ai] as isize {
                    ok = false;
                    break;
                }
                while let Some(q) = upoly::exact_div(&fp, &w, &a) {
                    w = q;
                    counts[ai] += 1;
                }
            }
            if !ok {
                continue;
            }
            // Keep the raw slice; the final multiplicities are the minimum
            // over samples, applied uniformly in a second pass.
            samples.push(WSample { x0, raw, counts });
            return Ok(());
        }
        Err(BadPrime("slice sampling stalled".to_string()))
    };

    let mut t = 32usize.min(cap);
    loop {
        while samples.len() < t {
            draw_sample(&mut samples, &mut used)?;
        }
        // Global multiplicities: minimum count per factor over all samples.
        let mut mins = vec![u32::MAX; y_atoms.len()];
        for s in &samples {
            for (ai, &c) in s.counts.iter().enumerate() {
                mins[ai] = mins[ai].min(c);
            }
        }
        // Second pass: strip exactly the global multiplicities.
        let mut cleaned: Vec<(u64, UPoly<PrimeField>)> = Vec::with_capacity(samples.len());
        let mut consistent = true;
        for s in &samples {
            let mut w = s.raw.clone();
            for (ai, a2) in y_atoms.iter().enumerate() {
                let a = slice_at_x(&fp, a2, s.x0);
                for _ in 0..mins[ai] {
                    match upoly::exact_div(&fp, &w, &a) {
                        Some(q) => w = q,
                        None => {
                            consistent = false;
                            break;
                        }
                    }
                }
                if !consistent {
                    break;
                }
            }
            if !consistent {
                break;
            }
            cleaned.push((s.x0, w));
        }
        if consistent {
            let dyw = cleaned
                .iter()
                .map(|(_, w)| upoly::deg(&fp, w))
                .max()
                .unwrap_or(-1);
            if dyw < 0 {
                return Err(BadPrime("slices cleaned to zero".to_string()));
            }
            let (fit, hold) = cleaned.split_at(cleaned.len() - 2);
            let xs: Vec<u64> = fit.iter().map(|(x0, _)| *x0).collect();
            let mut coeff_polys: Vec<UPoly<PrimeField>> = Vec::with_capacity(dyw as usize + 1);
            let mut valid = true;
            for cidx in 0..=(dyw as usize) {
                let ys: Vec<u64> = fit
                    .iter()
                    .map(|(_, w)| w.get(cidx).copied().unwrap_or(0))
                    .collect();
                let u = upoly::interpolate(&fp, &xs, &ys);
                for (xv, wv) in hold {
                    let want = wv.get(cidx).copied().unwrap_or(0);
                    if upoly::eval(&fp, &u, xv) != want {
                        valid = false;
                        break;
                    }
                }
                if !valid {
                    break;
                }
                coeff_polys.push(u);
            }
            if valid {
                let mut g = FPoly::zero(fp.clone(), &["x", "y"]);
                for (cidx, u) in coeff_polys.iter().enumerate() {
                    for (i, c) in u.iter().enumerate() {
                        if !fp.is_zero(c) {
                            g.insert_term(vec![i as u32, cidx as u32], *c);
                        }
                    }
                }
                // Strip the scalar-direction factors x^m (x−1)^m'.
                for a in &atoms {
                    if a.degree_in(1) != 0 {
                        continue;
                    }
                    while let Ok(q) = g.exact_div(a) {
                        g = q;
                    }
                }
                if g.is_zero() || g.degree_in(1) < 1 {
                    return Err(BadPrime(format!(
                        "level {k}: interpolated plane polynomial degenerate"
                    )));
                }
                return Ok(g);
            }
        }
        if t >= cap {
            return Err(BadPrime(format!(
                "level {k}: slice interpolation did not stabilize within {cap} samples"
            )));
        }
        t = (t * 2).min(cap);
    }
}

/// Memoized `f̄_k mod p` across the units and curve of one prime, and across
/// the independent table/place entry points.
pub(super) fn fbar_mod_p(k: u32, p: u64) -> Result<FPoly, BadPrime> {
    static MEMO: OnceLock<Mutex<BTreeMap<(u32, u64), FPoly>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(hit) = memo.lock().unwrap().get(&(k, p)) {
        return Ok(hit.clone());
    }
    let fp = PrimeField::new(p);
    let g = if k <= 13 {
        let sym = modeq::f_poly(k).map_err(|e| BadPrime(format!("unit {k}: {e}")))?;
        reduce_checked(&fp, &sym.num, "plane polynomial")?
    } else {
        fbar_slices(k, p)?
    };
    memo.lock().unwrap().insert((k, p), g.clone());
    Ok(g)
}

#[cfg(test)]
pub(super) fn reduce_unit_for_test(k: u32, p: u64) -> FPoly {
    let fp = PrimeField::new(p);
    let sym = modeq::f_poly(k).unwrap();
    reduce_checked(&fp, &sym.num, "plane polynomial").unwrap()
}

#[cfg(test)]
pub(super) fn fbar_slices_for_test(k: u32, p: u64) -> FPoly {
    fbar_slices(k, p).unwrap()
}

#[cfg(test)]
pub(super) fn equal_up_to_scalar(a: &FPoly, b: &FPoly) -> bool {
    if a.is_zero() || b.is_zero() {
        return a.is_zero() == b.is_zero();
    }
    let fp = &a.field;
    let (ea, ca) = a.leading().expect("nonzero");
    let ca = ca.clone();
    let Some(cb) = b.terms.get(ea).cloned() else {
        return false;
    };
    // Cross-scale so both leading terms agree, then compare all terms.
    a.terms.len() == b.terms.len()
        && a.terms.iter().all(|(e, c)| {
            b.terms
                .get(e)
                .is_some_and(|d| fp.mul(c, &cb) == fp.mul(d, &ca))
        })
}

// ---------------------------------------------------------------------------
// Units, curve, and centers.
// ---------------------------------------------------------------------------

/// The units `f_2 … f_{⌊N/2⌋+1}` as numerator/denominator pairs mod `p`.
fn units_mod_p(level: u32, p: u64) -> Result<Vec<(FPoly, FPoly)>, BadPrime> {
    let fp = PrimeField::new(p);
    let one = FPoly::one(fp.clone(), &["x", "y"]);
    let mut out = Vec::new();
    for k in 2..=(level / 2 + 1) {
        if k <= 9 {
            let sym = modeq::f_poly(k).map_err(|e| BadPrime(format!("unit {k}: {e}")))?;
            let num = reduce_checked(&fp, &sym.num, "unit numerator")?;
            let den = reduce_checked(&fp, &sym.den, "unit denominator")?;
            out.push((num, den));
        } else {
            out.push((fbar_mod_p(k, p)?, one.clone()));
        }
    }
    Ok(out)
}

/// `Res_y(f, g)` as a univariate polynomial in `x`, by evaluation at
/// degree-preserving sample points and interpolation.
fn resultant_y(fp: &PrimeField, f: &FPoly, g: &FPoly) -> Result<UPoly<PrimeField>, BadPrime> {
    let dyf = f.degree_in(1);
    let dyg = g.degree_in(1);
    if dyg <= 0 {
        // g is a polynomial in x alone; its roots are the candidate centers.
        let mut coeffs = vec![fp.zero(); g.degree_in(0).max(0) as usize + 1];
        for (e, c) in &g.terms {
            coeffs[e.0[0] as usize] = *c;
        }
        return Ok(upoly::normalize(fp, coeffs));
    }
    let d = (dyf * g.degree_in(0) + dyg * f.degree_in(0)) as usize;
    let mut xs = Vec::with_capacity(d + 1);
    let mut ys = Vec::with_capacity(d + 1);
    let mut x0: u64 = 0;
    while xs.len() <= d {
        if x0 >= fp.modulus() {
            return Err(BadPrime("resultant sampling exhausted the field".to_string()));
        }
        let fs = slice_at_x(fp, f, x0);
        let gs = slice_at_x(fp, g, x0);
        let keep = upoly::deg(fp, &fs) == dyf as isize && upoly::deg(fp, &gs) == dyg as isize;
        if keep {
            xs.push(x0);
            ys.push(upoly::resultant(fp, &fs, &gs));
        }
        x0 += 1;
    }
    Ok(upoly::interpolate(fp, &xs, &ys))
}

/// All centers of the projective x-line that can support a unit divisor:
/// intersections of the curve with unit numerators and denominators, the
/// vanishing locus of the leading y-coefficient (places with `y → ∞`), and
/// the point at infinity.
fn centers(
    fp: &PrimeField,
    curve: &FPoly,
    units: &[(FPoly, FPoly)],
) -> Result<Vec<Center<PrimeField>>, BadPrime> {
    let mut parts: Vec<&FPoly> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (num, den) in units {
        for p2 in [num, den] {
            if p2.total_degree() < 1 {
                continue;
            }
            if seen.insert(p2.render()) {
                parts.push(p2);
            }
        }
    }
    let mut polys: Vec<UPoly<PrimeField>> = Vec::new();
    for p2 in parts {
        let r = resultant_y(fp, curve, p2)?;
        if r.is_empty() {
            return Err(BadPrime(
                "unit shares a component with the curve mod p".to_string(),
            ));
        }
        polys.push(r);
    }
    // Leading y-coefficient of the curve, as a polynomial in x.
    let dyf = curve.degree_in(1);
    let mut lc = vec![fp.zero(); curve.degree_in(0).max(0) as usize + 1];
    for (e, c) in &curve.terms {
        if e.0[1] as i64 == dyf {
            lc[e.0[0] as usize] = *c;
        }
    }
    polys.push(upoly::normalize(fp, lc));

    let mut centers: Vec<Center<PrimeField>> = vec![Center::Infinity];
    let mut seen_factors: BTreeSet<Vec<u64>> = BTreeSet::new();
    for r in &polys {
        if upoly::deg(fp, r) < 1 {
            continue;
        }
        for (irr, _) in factor(fp, r).factors {
            if !seen_factors.insert(irr.clone()) {
                continue;
            }
            if irr.len() == 2 {
                centers.push(Center::Rational(fp.neg(&irr[0])));
            } else {
                centers.push(Center::Algebraic(irr));
            }
        }
    }
    Ok(centers)
}

// ---------------------------------------------------------------------------
// One leg: places, valuations, grouping, certification.
// ---------------------------------------------------------------------------

pub(super) fn phi_multiset(level: u32) -> BTreeMap<u64, usize> {
    let mut m = BTreeMap::new();
    for d in orbit_degrees(level) {
        *m.entry(d).or_insert(0) += 1;
    }
    m
}

pub(super) fn leg(level: u32, p: u64) -> Result<Leg, BadPrime> {
    let trace = std::env::var_os("X1GON_TRACE").is_some();
    let mut mark = std::time::Instant::now();
    let mut phase = |what: &str| {
        if trace {
            eprintln!("[trace] level {level} p {p}: {what} took {:?}", mark.elapsed());
        }
        mark = std::time::Instant::now();
    };
    let fp = PrimeField::new(p);
    let m = (level / 2) as usize;
    let units = units_mod_p(level, p)?;
    phase("units");
    let curve_poly = fbar_mod_p(level, p)?;
    phase("curve polynomial");
    let curve = Curve::new(&curve_poly)
        .map_err(|e| BadPrime(format!("curve mod p rejected: {e}")))?;
    let ctrs = centers(&fp, &curve_poly, &units)?;
    phase("centers");
    let mut places: Vec<Place<PrimeField>> = Vec::new();
    for c in &ctrs {
        let mut ps = curve
            .places_above(c)
            .map_err(|e| BadPrime(format!("place expansion failed: {e}")))?;
        places.append(&mut ps);
    }
    phase("places");
    // Valuation matrix, one task per place so each place's series cache is
    // shared across all units.
    let rows: Result<Vec<(Place<PrimeField>, Vec<i64>)>, BadPrime> = places
        .into_par_iter()
        .map(|pl| {
            let mut v = Vec::with_capacity(units.len());
            for (num, den) in &units {
                let val = valuation(&pl, num, den)
                    .map_err(|e| BadPrime(format!("valuation failed: {e}")))?;
                v.push(val);
            }
            Ok((pl, v))
        })
        .collect();
    let rows = rows?;
    phase("valuations");

    let mut groups: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    let mut cusp_places: Vec<Place<PrimeField>> = Vec::new();
    for (pl, v) in rows {
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        *groups.entry(v).or_insert(0) += pl.degree() as u64;
        cusp_places.push(pl);
    }

    // Structural certification.
    if groups.len() != m + 1 {
        return Err(BadPrime(format!(
            "found {} orbit groups, expected {}",
            groups.len(),
            m + 1
        )));
    }
    let mut seen = BTreeMap::new();
    for &d in groups.values() {
        *seen.entry(d).or_insert(0usize) += 1;
    }
    if seen != phi_multiset(level) {
        return Err(BadPrime(format!(
            "orbit degree multiset {seen:?} does not match the totient rule"
        )));
    }
    let total: u64 = groups.values().sum();
    if total != cusp_count(level) {
        return Err(BadPrime(format!(
            "{total} cusps found, expected {}",
            cusp_count(level)
        )));
    }
    for k in 0..units.len() {
        let deg: i64 = groups.iter().map(|(v, d)| v[k] * *d as i64).sum();
        if deg != 0 {
            return Err(BadPrime(format!(
                "unit f_{} has divisor degree {deg}",
                k + 2
            )));
        }
    }
    let mat: snf::IntMatrix = groups
        .keys()
        .map(|v| v.iter().map(|&c| BigInt::from(c)).collect())
        .collect();
    let rank = snf::elementary_divisors(&mat)
        .iter()
        .filter(|d| !d.is_zero())
        .count();
    if rank != m {
        return Err(BadPrime(format!("unit divisors have rank {rank}, expected {m}")));
    }

    Ok(Leg {
        p,
        groups: groups.into_iter().map(|(v, d)| (d, v)).collect(),
        places: cusp_places,
    })
}

// ---------------------------------------------------------------------------
// Prime stream and the two-leg protocol.
// ---------------------------------------------------------------------------

fn certified_leg_pair(level: u32, opts: &TableOptions) -> Result<Leg, CuspsError> {
    let mut rng = ChaCha20Rng::seed_from_u64(
        opts.seed ^ (level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let mut used: BTreeSet<u64> = BTreeSet::new();
    let mut certified: Vec<Leg> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for _ in 0..MAX_PRIME_ATTEMPTS {
        let p = loop {
            let cand = next_prime_u64((1 << 30) + rng.gen_range(0..(1u64 << 30)));
            if used.insert(cand) {
                break cand;
            }
        };
        match leg(level, p) {
            Ok(l) => {
                if certified
                    .iter()
                    .any(|c| sorted_groups(&c.groups) == sorted_groups(&l.groups))
                {
                    return Ok(l);
                }
                certified.push(l);
            }
            Err(BadPrime(msg)) => failures.push(format!("p={p}: {msg}")),
        }
    }
    let certified_at: Vec<String> = certified.iter().map(|l| format!("p={}", l.p)).collect();
    Err(CuspsError::OrbitInconsistency(format!(
        "level {level}: no two work primes agreed after {MAX_PRIME_ATTEMPTS} attempts \
         (certified legs: [{}], failures: {})",
        certified_at.join(", "),
        failures.join("; ")
    )))
}

fn sorted_groups(groups: &[(u64, Vec<i64>)]) -> Vec<(u64, Vec<i64>)> {
    let mut g: Vec<(u64, Vec<i64>)> = groups.to_vec();
    g.sort();
    g
}

/// The orbit groups of a level with canonical labels: returns
/// `(groups, labels, labels_provisional)` where `labels[i]` is the cusp
/// label assigned to `groups[i]`.
pub(super) fn labeled_groups(
    level: u32,
    opts: &TableOptions,
) -> Result<(Vec<(u64, Vec<i64>)>, Vec<u32>, bool), CuspsError> {
    let leg = certified_leg_pair(level, opts)?;
    let (labels, provisional) = labeling::assign_labels(level, &leg.groups, opts)?;
    Ok((leg.groups, labels, provisional))
}

/// The places supporting the unit divisors over one certified work prime.
pub(super) fn certified_places(
    level: u32,
    opts: &TableOptions,
) -> Result<Vec<Place<PrimeField>>, CuspsError> {
    Ok(certified_leg_pair(level, opts)?.places)
}
