//! Divisor tables for levels 4–9, where the curve has genus zero and a
//! rational parametrization. The units become rational functions of a
//! single parameter `t` over `ℚ`, so places are simply the monic
//! irreducible factors of their numerators and denominators together with
//! the place at infinity. The resulting orbit groups run through exactly
//! the same certification checks and canonical-label assignment as the
//! finite-field pipeline used for larger levels.

use super::pipeline::phi_multiset;
use super::{cusp_count, labeling, CuspsError, TableOptions};
use crate::exactalg::{factor, snf, upoly, MultiPoly, Rationals, UPoly};
use crate::modeq;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

type QU = UPoly<Rationals>;

fn qint(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Polynomial in `t` from ascending integer coefficients.
fn tpoly(q: &Rationals, coeffs: &[i64]) -> QU {
    upoly::normalize(q, coeffs.iter().map(|&c| qint(c)).collect())
}

fn upow(q: &Rationals, p: &QU, e: usize) -> QU {
    let mut acc = upoly::one(q);
    for _ in 0..e {
        acc = upoly::mul(q, &acc, p);
    }
    acc
}

/// Rational parametrization `(b, c) = (bn/bd, cn/cd)` of the level curve.
fn parametrization(q: &Rationals, level: u32) -> Result<(QU, QU, QU, QU), CuspsError> {
    let one = upoly::one(q);
    let p = match level {
        4 => (tpoly(q, &[0, 1]), one.clone(), vec![], one),
        5 => (tpoly(q, &[0, 1]), one.clone(), tpoly(q, &[0, 1]), one),
        6 => (tpoly(q, &[0, 1, 1]), one.clone(), tpoly(q, &[0, 1]), one),
        7 => (
            tpoly(q, &[0, 0, -1, 1]),
            one.clone(),
            tpoly(q, &[0, -1, 1]),
            one,
        ),
        8 => (
            tpoly(q, &[1, -3, 2]),
            one,
            tpoly(q, &[1, -3, 2]),
            tpoly(q, &[0, 1]),
        ),
        9 => (
            tpoly(q, &[0, 0, -1, 2, -2, 1]),
            one.clone(),
            tpoly(q, &[0, 0, -1, 1]),
            one,
        ),
        _ => return Err(CuspsError::UnsupportedLevel(level)),
    };
    Ok(p)
}

/// Clear denominators in `P(bn/bd, cn/cd)`: returns `(W, db, dc)` with
/// `P(b, c) = W / (bd^db · cd^dc)`.
fn compose(
    q: &Rationals,
    poly: &MultiPoly<Rationals>,
    bn: &QU,
    bd: &QU,
    cn: &QU,
    cd: &QU,
) -> (QU, usize, usize) {
    let db = poly.degree_in(0).max(0) as usize;
    let dc = poly.degree_in(1).max(0) as usize;
    let table = |base: &QU, hi: usize| -> Vec<QU> {
        let mut t = Vec::with_capacity(hi + 1);
        t.push(upoly::one(q));
        for i in 1..=hi {
            let prev = t[i - 1].clone();
            t.push(upoly::mul(q, &prev, base));
        }
        t
    };
    let bns = table(bn, db);
    let bds = table(bd, db);
    let cns = table(cn, dc);
    let cds = table(cd, dc);
    let mut w: QU = vec![];
    for (e, a) in &poly.terms {
        let (i, j) = (e.0[0] as usize, e.0[1] as usize);
        let mut term = upoly::mul(q, &bns[i], &bds[db - i]);
        term = upoly::mul(q, &term, &cns[j]);
        term = upoly::mul(q, &term, &cds[dc - j]);
        w = upoly::add(q, &w, &upoly::mul_scalar(q, &term, a));
    }
    (w, db, dc)
}

/// A unit `f_k` as a fraction of polynomials in `t` (not reduced).
fn unit_in_t(
    q: &Rationals,
    k: u32,
    bn: &QU,
    bd: &QU,
    cn: &QU,
    cd: &QU,
) -> Result<(QU, QU), CuspsError> {
    let sym = modeq::big_f_symbol(k)?;
    let (wn, dbn, dcn) = compose(q, &sym.num, bn, bd, cn, cd);
    let (wd, dbd, dcd) = compose(q, &sym.den, bn, bd, cn, cd);
    let num = upoly::mul(
        q,
        &wn,
        &upoly::mul(q, &upow(q, bd, dbd), &upow(q, cd, dcd)),
    );
    let den = upoly::mul(
        q,
        &wd,
        &upoly::mul(q, &upow(q, bd, dbn), &upow(q, cd, dcn)),
    );
    if upoly::is_zero(q, &num) || upoly::is_zero(q, &den) {
        return Err(CuspsError::Internal(format!(
            "unit f_{k} degenerates on the level-curve parametrization"
        )));
    }
    Ok((num, den))
}

/// Orbit groups with canonical labels for a genus-zero level.
pub(super) fn labeled_groups(
    level: u32,
    opts: &TableOptions,
) -> Result<(Vec<(u64, Vec<i64>)>, Vec<u32>, bool), CuspsError> {
    if !(4..=9).contains(&level) {
        return Err(CuspsError::UnsupportedLevel(level));
    }
    let q = Rationals;
    let m = (level / 2) as usize;
    let (bn, bd, cn, cd) = parametrization(&q, level)?;
    // Valuation vector per finite place (keyed by the monic irreducible
    // factor) and at infinity.
    let mut finite: BTreeMap<QU, Vec<i64>> = BTreeMap::new();
    let mut at_infinity = vec![0i64; m];
    for (ku, k) in (2..=(m as u32 + 1)).enumerate() {
        let (num, den) = unit_in_t(&q, k, &bn, &bd, &cn, &cd)?;
        at_infinity[ku] = (upoly::deg(&q, &den) - upoly::deg(&q, &num)) as i64;
        for (poly, sign) in [(&num, 1i64), (&den, -1i64)] {
            for (f, mult) in factor(&q, poly).factors {
                if upoly::deg(&q, &f) < 1 {
                    continue;
                }
                let v = finite.entry(f).or_insert_with(|| vec![0; m]);
                v[ku] += sign * mult as i64;
            }
        }
    }
    // Group places with equal vectors, accumulating their degrees.
    let mut grouped: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for (f, v) in &finite {
        if v.iter().any(|&c| c != 0) {
            *grouped.entry(v.clone()).or_insert(0) += upoly::deg(&q, f) as u64;
        }
    }
    if at_infinity.iter().any(|&c| c != 0) {
        *grouped.entry(at_infinity).or_insert(0) += 1;
    }
    certify(level, m, &grouped)?;
    let groups: Vec<(u64, Vec<i64>)> = grouped.into_iter().map(|(v, d)| (d, v)).collect();
    let (labels, provisional) = labeling::assign_labels(level, &groups, opts)?;
    Ok((groups, labels, provisional))
}

/// The same consistency checks the finite-field pipeline applies to a leg.
fn certify(level: u32, m: usize, grouped: &BTreeMap<Vec<i64>, u64>) -> Result<(), CuspsError> {
    let fail = |msg: String| Err(CuspsError::OrbitInconsistency(msg));
    if grouped.len() != m + 1 {
        return fail(format!(
            "level {level}: found {} orbit groups, expected {}",
            grouped.len(),
            m + 1
        ));
    }
    let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
    for &d in grouped.values() {
        *seen.entry(d).or_insert(0) += 1;
    }
    if seen != phi_multiset(level) {
        return fail(format!(
            "level {level}: orbit degree multiset {seen:?} does not match the totient rule"
        ));
    }
    let total: u64 = grouped.values().sum();
    if total != cusp_count(level) {
        return fail(format!(
            "level {level}: orbit degrees sum to {total}, expected {}",
            cusp_count(level)
        ));
    }
    for ku in 0..m {
        let deg: i64 = grouped.iter().map(|(v, &d)| d as i64 * v[ku]).sum();
        if deg != 0 {
            return fail(format!(
                "level {level}: unit f_{} has divisor degree {deg}",
                ku + 2
            ));
        }
    }
    let mat: snf::IntMatrix = grouped
        .keys()
        .map(|v| v.iter().map(|&c| BigInt::from(c)).collect())
        .collect();
    let rank = snf::elementary_divisors(&mat)
        .iter()
        .filter(|d| !d.is_zero())
        .count();
    if rank != m {
        return fail(format!(
            "level {level}: unit divisors have rank {rank}, expected {m}"
        ));
    }
    Ok(())
}
