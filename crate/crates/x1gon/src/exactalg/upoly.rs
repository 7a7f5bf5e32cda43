//! Univariate polynomial arithmetic over a generic [`Field`].
//!
//! A polynomial is a `Vec<F::Elem>` of coefficients in little-endian order
//! (index `i` holds the coefficient of `x^i`), normalized so that the last
//! entry is nonzero; the zero polynomial is the empty vector. All functions
//! take the field description by reference.

use super::field::Field;
use num_bigint::BigUint;
use num_traits::Zero;

pub type UPoly<F> = Vec<<F as Field>::Elem>;

/// Strip trailing zero coefficients.
pub fn normalize<F: Field>(f: &F, mut v: UPoly<F>) -> UPoly<F> {
    while let Some(last) = v.last() {
        if f.is_zero(last) {
            v.pop();
        } else {
            break;
        }
    }
    v
}

pub fn is_zero<F: Field>(_f: &F, v: &UPoly<F>) -> bool {
    v.is_empty()
}

/// Degree with the convention `deg 0 = -1`.
pub fn deg<F: Field>(_f: &F, v: &UPoly<F>) -> isize {
    v.len() as isize - 1
}

/// Leading coefficient; `None` for the zero polynomial.
pub fn lc<F: Field>(_f: &F, v: &UPoly<F>) -> Option<F::Elem> {
    v.last().cloned()
}

pub fn constant<F: Field>(f: &F, c: F::Elem) -> UPoly<F> {
    if f.is_zero(&c) {
        vec![]
    } else {
        vec![c]
    }
}

pub fn one<F: Field>(f: &F) -> UPoly<F> {
    vec![f.one()]
}

/// `c * x^k`.
pub fn monomial<F: Field>(f: &F, c: F::Elem, k: usize) -> UPoly<F> {
    if f.is_zero(&c) {
        return vec![];
    }
    let mut v = vec![f.zero(); k + 1];
    v[k] = c;
    v
}

pub fn add<F: Field>(f: &F, a: &UPoly<F>, b: &UPoly<F>) -> UPoly<F> {
    let n = a.len().max(b.len());
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| f.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| f.zero());
        v.push(f.add(&x, &y));
    }
    normalize(f, v)
}

pub fn neg<F: Field>(f: &F, a: &UPoly<F>) -> UPoly<F> {
    a.iter().map(|c| f.neg(c)).collect()
}

pub fn sub<F: Field>(f: &F, a: &UPoly<F>, b: &UPoly<F>) -> UPoly<F> {
    add(f, a, &neg(f, b))
}

pub fn mul<F: Field>(f: &F, a: &UPoly<F>, b: &UPoly<F>) -> UPoly<F> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut v = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            v[i + j] = f.add(&v[i + j], &f.mul(x, y));
        }
    }
    normalize(f, v)
}

pub fn mul_scalar<F: Field>(f: &F, a: &UPoly<F>, c: &F::Elem) -> UPoly<F> {
    if f.is_zero(c) {
        return vec![];
    }
    normalize(f, a.iter().map(|x| f.mul(x, c)).collect())
}

/// Multiply by `x^k`.
pub fn shift<F: Field>(f: &F, a: &UPoly<F>, k: usize) -> UPoly<F> {
    if a.is_empty() {
        return vec![];
    }
    let mut v = vec![f.zero(); k];
    v.extend(a.iter().cloned());
    let _ = f;
    v
}

/// Euclidean division: returns `(q, r)` with `a = q*b + r`, `deg r < deg b`.
/// Panics if `b` is zero.
pub fn divrem<F: Field>(f: &F, a: &UPoly<F>, b: &UPoly<F>) -> (UPoly<F>, UPoly<F>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let bl = f.inv(b.last().unwrap()).expect("leading coefficient not invertible");
    let mut r = a.clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let qd = r.len() - b.len();
    let mut q = vec![f.zero(); qd + 1];
    for k in (0..=qd).rev() {
        let top = r.get(k + b.len() - 1).cloned().unwrap_or_else(|| f.zero());
        if f.is_zero(&top) {
            continue;
        }
        let c = f.mul(&top, &bl);
        q[k] = c.clone();
        for (j, bj) in b.iter().enumerate() {
            let idx = k + j;
            let cur = r[idx].clone();
            r[idx] = f.sub(&cur, &f.mul(&c, bj));
        }
    }
    (normalize(f, q), normalize(f, r))
}

pub fn rem<F: Field>(f: &F, a: &UPoly<F>, b: &UPoly<F>) -> UPoly<F> {
    divrem(f, a, b).1
}

/// Exact quotient; `None` if `b` does not divide `a`.
pub fn exact_div<F: Field>(f: &F, a: &UPoly<F>, b: &UPoly<F>) -> Option<UPoly<F>> {
    let (q, r) = divrem(f, a, b);
    if r.is_empty() {
        Some(q)
    } else {
        None
    }
}

/// Scale to leading coefficient 1. `None` for zero.
pub fn monic<F: Field>(f: &F, a: &UPoly<F>) -> Option<UPoly<F>> {
    let l = lc(f, a)?;
    let li = f.inv(&l)?;
    Some(mul_scalar(f, a, &li))
}

/// Monic greatest common divisor.
pub fn gcd<F: Field>(f: &F, a: &UPoly<F>, b: &UPoly<F>) -> UPoly<F> {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x).unwrap_or_default()
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g`, `g` monic (or zero).
pub fn egcd<F: Field>(f: &F, a: &UPoly<F>, b: &UPoly<F>) -> (UPoly<F>, UPoly<F>, UPoly<F>) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (one(f), vec![]);
    let (mut t0, mut t1) = (vec![], one(f));
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let ns = sub(f, &s0, &mul(f, &q, &s1));
        let nt = sub(f, &t0, &mul(f, &q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = ns;
        t0 = t1;
        t1 = nt;
    }
    if let Some(l) = lc(f, &r0) {
        let li = f.inv(&l).unwrap();
        (
            mul_scalar(f, &r0, &li),
            mul_scalar(f, &s0, &li),
            mul_scalar(f, &t0, &li),
        )
    } else {
        (vec![], vec![], vec![])
    }
}

pub fn eval<F: Field>(f: &F, a: &UPoly<F>, x: &F::Elem) -> F::Elem {
    let mut acc = f.zero();
    for c in a.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

pub fn derivative<F: Field>(f: &F, a: &UPoly<F>) -> UPoly<F> {
    if a.len() <= 1 {
        return vec![];
    }
    let v = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.mul(c, &f.from_i64(i as i64)))
        .collect();
    normalize(f, v)
}

/// `base^e mod m` with a big-integer exponent.
pub fn pow_mod<F: Field>(f: &F, base: &UPoly<F>, e: &BigUint, m: &UPoly<F>) -> UPoly<F> {
    let mut acc = one(f);
    let mut b = rem(f, base, m);
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            acc = rem(f, &mul(f, &acc, &b), m);
        }
        if i + 1 < bits {
            b = rem(f, &mul(f, &b, &b), m);
        }
    }
    acc
}

/// Newton interpolation through distinct nodes `xs` with values `ys`.
pub fn interpolate<F: Field>(f: &F, xs: &[F::Elem], ys: &[F::Elem]) -> UPoly<F> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n == 0 {
        return vec![];
    }
    // Divided differences.
    let mut dd: Vec<F::Elem> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = f.sub(&dd[i], &dd[i - 1]);
            let den = f.sub(&xs[i], &xs[i - j]);
            let di = f.inv(&den).expect("interpolation nodes must be distinct");
            dd[i] = f.mul(&num, &di);
        }
    }
    // Horner assembly of the Newton form.
    let mut p: UPoly<F> = vec![];
    for i in (0..n).rev() {
        // p = p*(x − xs[i]) + dd[i]
        let lin = normalize(f, vec![f.neg(&xs[i]), f.one()]);
        p = add(f, &mul(f, &p, &lin), &constant(f, dd[i].clone()));
    }
    p
}

/// Resultant of `a` and `b` (equal to the determinant of their Sylvester
/// matrix), computed by the Euclidean remainder chain.
pub fn resultant<F: Field>(f: &F, a: &UPoly<F>, b: &UPoly<F>) -> F::Elem {
    if a.is_empty() || b.is_empty() {
        return f.zero();
    }
    let mut x = a.clone();
    let mut y = b.clone();
    let mut acc = f.one();
    loop {
        let m = deg(f, &x) as u64;
        let n = deg(f, &y) as u64;
        if n == 0 {
            let l = lc(f, &y).unwrap();
            return f.mul(&acc, &f.pow(&l, m));
        }
        if m < n {
            if (m * n) % 2 == 1 {
                acc = f.neg(&acc);
            }
            std::mem::swap(&mut x, &mut y);
            continue;
        }
        let r = rem(f, &x, &y);
        if r.is_empty() {
            return f.zero();
        }
        let d = deg(f, &r) as u64;
        if (m * n) % 2 == 1 {
            acc = f.neg(&acc);
        }
        let l = lc(f, &y).unwrap();
        acc = f.mul(&acc, &f.pow(&l, m - d));
        x = y;
        y = r;
    }
}

/// Squarefree decomposition: returns pairs `(g_i, m_i)` with
/// `a = lc * prod g_i^{m_i}`, the `g_i` monic, squarefree and pairwise
/// coprime, and distinct multiplicities `m_i` in increasing order merged by
/// the caller if needed. Handles characteristic 0 and characteristic p
/// (finite fields, where p-th roots are taken via `|F|/p` powering).
pub fn squarefree_decomposition<F: Field>(f: &F, a: &UPoly<F>) -> Vec<(UPoly<F>, usize)> {
    let a = match monic(f, a) {
        Some(m) => m,
        None => return vec![],
    };
    if deg(f, &a) == 0 {
        return vec![];
    }
    let p = f.characteristic();
    if p == 0 {
        return yun(f, &a).into_iter().map(|(g, m)| (g, m)).collect();
    }
    // Characteristic p. Factors with multiplicity not divisible by p are
    // peeled off degree by degree; what remains of `g` at the end is a p-th
    // power handled by recursion on its p-th root.
    let mut out: Vec<(UPoly<F>, usize)> = vec![];
    let da = derivative(f, &a);
    let (mut w, mut g) = if da.is_empty() {
        (one(f), a.clone())
    } else {
        let g = gcd(f, &a, &da);
        let w = exact_div(f, &a, &g).unwrap();
        (w, g)
    };
    let mut i = 1usize;
    while deg(f, &w) > 0 {
        let y = gcd(f, &w, &g);
        let z = exact_div(f, &w, &y).unwrap();
        if deg(f, &z) > 0 {
            out.push((z, i));
        }
        g = exact_div(f, &g, &y).unwrap();
        w = y;
        i += 1;
    }
    if deg(f, &g) > 0 {
        let root = pth_root_poly(f, &g);
        for (h, m) in squarefree_decomposition(f, &root) {
            out.push((h, m * p as usize));
        }
    }
    merge_multiplicities(f, out)
}

fn merge_multiplicities<F: Field>(f: &F, parts: Vec<(UPoly<F>, usize)>) -> Vec<(UPoly<F>, usize)> {
    use std::collections::BTreeMap;
    let mut by_mult: BTreeMap<usize, UPoly<F>> = BTreeMap::new();
    for (g, m) in parts {
        by_mult
            .entry(m)
            .and_modify(|acc| *acc = mul(f, acc, &g))
            .or_insert(g);
    }
    by_mult
        .into_iter()
        .filter(|(_, g)| deg(f, g) > 0)
        .map(|(m, g)| (g, m))
        .collect()
}

/// Yun's algorithm (characteristic 0), input monic nonconstant.
fn yun<F: Field>(f: &F, a: &UPoly<F>) -> Vec<(UPoly<F>, usize)> {
    let da = derivative(f, a);
    let g = gcd(f, a, &da);
    let mut c = exact_div(f, a, &g).unwrap();
    let mut d = sub(f, &exact_div(f, &da, &g).unwrap(), &derivative(f, &c));
    let mut out = vec![];
    let mut i = 1usize;
    while deg(f, &c) > 0 {
        let p = gcd(f, &c, &d);
        if deg(f, &p) > 0 {
            out.push((p.clone(), i));
        }
        c = exact_div(f, &c, &p).unwrap();
        d = sub(f, &exact_div(f, &d, &p).unwrap(), &derivative(f, &c));
        i += 1;
    }
    out
}

/// For a polynomial in `x^p` over a finite field, return its p-th root.
fn pth_root_poly<F: Field>(f: &F, a: &UPoly<F>) -> UPoly<F> {
    let p = f.characteristic() as usize;
    assert!(p > 0);
    let q = f.order().expect("p-th roots need a finite field");
    let exp = &q / BigUint::from(p);
    let mut v = vec![];
    let mut i = 0;
    while i < a.len() {
        v.push(pow_big(f, &a[i], &exp));
        i += p;
    }
    // Coefficients at indices not divisible by p must vanish.
    for (i, cfr) in a.iter().enumerate() {
        if i % p != 0 {
            assert!(f.is_zero(cfr), "polynomial is not a p-th power");
        }
    }
    normalize(f, v)
}

/// Composition `p(q(x))` by Horner.
pub fn compose<F: Field>(f: &F, p: &UPoly<F>, q: &UPoly<F>) -> UPoly<F> {
    let mut acc: UPoly<F> = vec![];
    for c in p.iter().rev() {
        acc = add(f, &mul(f, &acc, q), &constant(f, c.clone()));
    }
    acc
}

/// `a^n` for a big-integer exponent.
pub fn pow_big<F: Field>(f: &F, a: &F::Elem, n: &BigUint) -> F::Elem {
    if n.is_zero() {
        return f.one();
    }
    let mut acc = f.one();
    let mut base = a.clone();
    let bits = n.bits();
    for i in 0..bits {
        if n.bit(i) {
            acc = f.mul(&acc, &base);
        }
        if i + 1 < bits {
            base = f.mul(&base, &base);
        }
    }
    acc
}

/// Pretty form like `x^3 + 2*x - 1` for debug output.
pub fn format_poly<F: Field>(f: &F, a: &UPoly<F>, var: &str) -> String {
    if a.is_empty() {
        return "0".into();
    }
    let mut parts = vec![];
    for (i, c) in a.iter().enumerate().rev() {
        if f.is_zero(c) {
            continue;
        }
        let cs = f.format(c);
        let term = match i {
            0 => cs,
            1 if f.is_one(c) => var.to_string(),
            1 => format!("{cs}*{var}"),
            _ if f.is_one(c) => format!("{var}^{i}"),
            _ => format!("{cs}*{var}^{i}"),
        };
        parts.push(term);
    }
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::field::{PrimeField, Rationals};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_poly<F: Field>(f: &F, rng: &mut ChaCha8Rng, maxdeg: usize) -> UPoly<F> {
        let d = rng.gen_range(0..=maxdeg);
        let v: Vec<_> = (0..=d).map(|_| f.random(rng)).collect();
        normalize(f, v)
    }

    /// Determinant of the Sylvester matrix by Gaussian elimination: an
    /// independent definition of the resultant used as a cross-check.
    fn sylvester_resultant<F: Field>(f: &F, a: &UPoly<F>, b: &UPoly<F>) -> F::Elem {
        if a.is_empty() || b.is_empty() {
            return f.zero();
        }
        let m = a.len() - 1;
        let n = b.len() - 1;
        if m == 0 && n == 0 {
            return f.one();
        }
        let size = m + n;
        let mut mat = vec![vec![f.zero(); size]; size];
        for i in 0..n {
            for (j, c) in a.iter().rev().enumerate() {
                mat[i][i + j] = c.clone();
            }
        }
        for i in 0..m {
            for (j, c) in b.iter().rev().enumerate() {
                mat[n + i][i + j] = c.clone();
            }
        }
        // Gaussian elimination over the field.
        let mut det = f.one();
        for col in 0..size {
            let pivot = (col..size).find(|&r| !f.is_zero(&mat[r][col]));
            let pr = match pivot {
                Some(p) => p,
                None => return f.zero(),
            };
            if pr != col {
                mat.swap(pr, col);
                det = f.neg(&det);
            }
            let pv = mat[col][col].clone();
            det = f.mul(&det, &pv);
            let pvi = f.inv(&pv).unwrap();
            for r in col + 1..size {
                let factor = f.mul(&mat[r][col], &pvi);
                if f.is_zero(&factor) {
                    continue;
                }
                for c in col..size {
                    let sub = f.mul(&factor, &mat[col][c]);
                    let cur = mat[r][c].clone();
                    mat[r][c] = f.sub(&cur, &sub);
                }
            }
        }
        det
    }

    #[test]
    fn divrem_property_random() {
        let f = PrimeField::new(101);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let a = rand_poly(&f, &mut rng, 8);
            let mut b = rand_poly(&f, &mut rng, 5);
            if b.is_empty() {
                b = one(&f);
            }
            let (q, r) = divrem(&f, &a, &b);
            assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
            assert!(deg(&f, &r) < deg(&f, &b));
        }
    }

    #[test]
    fn gcd_divides_and_egcd_identity() {
        let f = PrimeField::new(101);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let a = rand_poly(&f, &mut rng, 6);
            let b = rand_poly(&f, &mut rng, 6);
            let g = gcd(&f, &a, &b);
            if !a.is_empty() && !g.is_empty() {
                assert!(exact_div(&f, &a, &g).is_some());
            }
            if !b.is_empty() && !g.is_empty() {
                assert!(exact_div(&f, &b, &g).is_some());
            }
            let (g2, s, t) = egcd(&f, &a, &b);
            assert_eq!(g2, g);
            let lhs = add(&f, &mul(&f, &s, &a), &mul(&f, &t, &b));
            assert_eq!(lhs, g);
        }
    }

    #[test]
    fn interpolate_round_trip() {
        let f = PrimeField::new(101);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = rand_poly(&f, &mut rng, 6);
            let xs: Vec<u64> = (0..10u64).collect();
            let ys: Vec<u64> = xs.iter().map(|x| eval(&f, &p, x)).collect();
            let q = interpolate(&f, &xs, &ys);
            assert_eq!(q, p);
        }
    }

    #[test]
    fn interpolate_over_rationals() {
        let q = Rationals;
        let p = vec![q.from_i64(-1), q.from_i64(0), q.from_i64(3)]; // 3x^2 − 1
        let xs: Vec<_> = (0..3).map(|i| q.from_i64(i)).collect();
        let ys: Vec<_> = xs.iter().map(|x| eval(&q, &p, x)).collect();
        assert_eq!(interpolate(&q, &xs, &ys), p);
    }

    #[test]
    fn resultant_matches_sylvester_determinant() {
        let f = PrimeField::new(101);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..400 {
            let a = rand_poly(&f, &mut rng, 5);
            let b = rand_poly(&f, &mut rng, 5);
            assert_eq!(
                resultant(&f, &a, &b),
                sylvester_resultant(&f, &a, &b),
                "a={a:?} b={b:?}"
            );
        }
        let q = Rationals;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let a = rand_poly(&q, &mut rng, 4);
            let b = rand_poly(&q, &mut rng, 4);
            assert_eq!(resultant(&q, &a, &b), sylvester_resultant(&q, &a, &b));
        }
    }

    #[test]
    fn resultant_multiplicative_in_second_argument() {
        let f = PrimeField::new(10007);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let a = rand_poly(&f, &mut rng, 4);
            let b = rand_poly(&f, &mut rng, 3);
            let c = rand_poly(&f, &mut rng, 3);
            if a.is_empty() || b.is_empty() || c.is_empty() {
                continue;
            }
            let lhs = resultant(&f, &a, &mul(&f, &b, &c));
            let rhs = f.mul(&resultant(&f, &a, &b), &resultant(&f, &a, &c));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn resultant_detects_common_root() {
        let f = PrimeField::new(101);
        // (x−3)(x−5) and (x−3)(x−7) share x−3.
        let a = mul(&f, &vec![f.from_i64(-3), 1], &vec![f.from_i64(-5), 1]);
        let b = mul(&f, &vec![f.from_i64(-3), 1], &vec![f.from_i64(-7), 1]);
        assert_eq!(resultant(&f, &a, &b), 0);
        let c = mul(&f, &vec![f.from_i64(-4), 1], &vec![f.from_i64(-7), 1]);
        assert_ne!(resultant(&f, &a, &c), 0);
    }

    #[test]
    fn pow_mod_agrees_with_naive() {
        let f = PrimeField::new(101);
        let m = vec![f.from_i64(1), f.from_i64(0), f.from_i64(1)]; // x^2+1
        let base = vec![f.from_i64(2), f.from_i64(3)]; // 3x+2
        let e = BigUint::from(10u32);
        let mut naive = one(&f);
        for _ in 0..10 {
            naive = rem(&f, &mul(&f, &naive, &base), &m);
        }
        assert_eq!(pow_mod(&f, &base, &e, &m), naive);
    }

    #[test]
    fn squarefree_decomposition_char0() {
        let q = Rationals;
        // (x−1)^2 (x+2)^3 x
        let x = vec![q.zero(), q.one()];
        let a1 = vec![q.from_i64(-1), q.one()];
        let a2 = vec![q.from_i64(2), q.one()];
        let mut p = x.clone();
        for _ in 0..2 {
            p = mul(&q, &p, &a1);
        }
        for _ in 0..3 {
            p = mul(&q, &p, &a2);
        }
        let dec = squarefree_decomposition(&q, &p);
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0], (x, 1));
        assert_eq!(dec[1], (a1, 2));
        assert_eq!(dec[2], (a2, 3));
    }

    #[test]
    fn squarefree_decomposition_char_p_with_pth_powers() {
        let f = PrimeField::new(3);
        // (x+1)^3 (x+2) over F_3: derivative of the cube part vanishes.
        let a1 = vec![f.from_i64(1), 1];
        let a2 = vec![f.from_i64(2), 1];
        let mut p = a2.clone();
        for _ in 0..3 {
            p = mul(&f, &p, &a1);
        }
        let dec = squarefree_decomposition(&f, &p);
        assert_eq!(dec, vec![(a2, 1), (a1.clone(), 3)]);

        // x^9 − x^... a pure 9th power: (x+1)^9 over F_3.
        let mut p9 = one(&f);
        for _ in 0..9 {
            p9 = mul(&f, &p9, &a1);
        }
        let dec9 = squarefree_decomposition(&f, &p9);
        assert_eq!(dec9, vec![(a1, 9)]);
    }

    #[test]
    fn squarefree_reassembles_random() {
        let f = PrimeField::new(5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..60 {
            let mut p = one(&f);
            // Product of random monic linear/quadratic factors with powers.
            for _ in 0..rng.gen_range(1..4) {
                let fac = normalize(
                    &f,
                    vec![f.random(&mut rng), f.random(&mut rng), f.from_i64(1)],
                );
                let e = rng.gen_range(1..6);
                for _ in 0..e {
                    p = mul(&f, &p, &fac);
                }
            }
            let dec = squarefree_decomposition(&f, &p);
            let mut re = one(&f);
            for (g, m) in &dec {
                for _ in 0..*m {
                    re = mul(&f, &re, g);
                }
                // Each part must be squarefree: gcd(g, g') = 1.
                let dg = derivative(&f, g);
                if !dg.is_empty() {
                    assert_eq!(deg(&f, &gcd(&f, g, &dg)), 0);
                }
            }
            assert_eq!(re, monic(&f, &p).unwrap());
        }
    }
}
