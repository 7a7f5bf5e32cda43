//! Univariate factorization over the fields used in this crate:
//!
//! * finite fields and finite towers — Cantor–Zassenhaus (distinct-degree
//!   then equal-degree splitting, with the trace construction in
//!   characteristic 2);
//! * the rationals — squarefree decomposition, factorization modulo a good
//!   prime, quadratic Hensel lifting to a Mignotte-style bound, and subset
//!   recombination;
//! * towers over the rationals — norm descent to the base field followed by
//!   gcd lifting (requires a shift making the norm squarefree).
//!
//! All randomized splitting is seeded deterministically from the input, so
//! factorizations are reproducible run to run.

use super::field::{next_prime_u64, Field, PrimeField, Rationals};
use super::tower::{TElem, Tower};
use super::upoly::{self, UPoly};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A complete factorization: `unit * prod(factor_i ^ mult_i)`, factors
/// monic, irreducible, sorted canonically.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization<F: Field> {
    pub unit: F::Elem,
    pub factors: Vec<(UPoly<F>, usize)>,
}

/// Fields over which this crate can factor univariate polynomials.
pub trait FactorField: Field {
    /// Factor a monic squarefree polynomial into monic irreducibles.
    fn factor_monic_squarefree(&self, f: &UPoly<Self>) -> Vec<UPoly<Self>>;
}

/// Factor an arbitrary nonzero polynomial. The zero polynomial is the
/// caller's error; public wrappers surface it as `ZeroPolynomial`.
pub fn factor<F: FactorField>(field: &F, f: &UPoly<F>) -> Factorization<F> {
    assert!(!f.is_empty(), "cannot factor the zero polynomial");
    let unit = upoly::lc(field, f).unwrap();
    let mut factors: Vec<(UPoly<F>, usize)> = vec![];
    for (part, mult) in upoly::squarefree_decomposition(field, f) {
        for irr in field.factor_monic_squarefree(&part) {
            factors.push((irr, mult));
        }
    }
    sort_factors(field, &mut factors);
    Factorization { unit, factors }
}

fn sort_factors<F: Field>(field: &F, factors: &mut [(UPoly<F>, usize)]) {
    factors.sort_by(|a, b| {
        let da = a.0.len();
        let db = b.0.len();
        da.cmp(&db)
            .then_with(|| upoly::format_poly(field, &a.0, "x").cmp(&upoly::format_poly(field, &b.0, "x")))
    });
}

/// Distinct roots of `f` in the field itself (degree-one factors).
pub fn roots<F: FactorField>(field: &F, f: &UPoly<F>) -> Vec<F::Elem> {
    let mut out = vec![];
    for (g, _) in factor(field, f).factors {
        if g.len() == 2 {
            out.push(field.neg(&g[0]));
        }
    }
    out
}

// --------------------------------------------------------------------------
// Cantor–Zassenhaus over any finite field (prime fields and finite towers).
// --------------------------------------------------------------------------

fn fnv_seed(parts: &[String]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for p in parts {
        for b in p.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Factor a monic squarefree polynomial over a finite field.
pub fn cz_factor<F: Field>(field: &F, f: &UPoly<F>) -> Vec<UPoly<F>> {
    let q = field.order().expect("Cantor-Zassenhaus needs a finite field");
    let n = upoly::deg(field, f);
    if n <= 1 {
        return if n == 1 { vec![f.clone()] } else { vec![] };
    }
    let seed = fnv_seed(&[q.to_string(), upoly::format_poly(field, f, "x")]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Distinct-degree: peel the product of all irreducible factors of each
    // degree d using gcd(x^(q^d) − x, f).
    let mut out: Vec<UPoly<F>> = vec![];
    let mut rest = f.clone();
    let x = upoly::monomial(field, field.one(), 1);
    let mut h = upoly::rem(field, &x, &rest);
    let mut d = 0usize;
    while upoly::deg(field, &rest) > 0 {
        d += 1;
        if (upoly::deg(field, &rest) as usize) < 2 * d {
            // What remains is irreducible.
            out.push(rest.clone());
            break;
        }
        h = upoly::pow_mod(field, &h, &q, &rest);
        let diff = upoly::sub(field, &h, &upoly::rem(field, &x, &rest));
        let g = upoly::gcd(field, &diff, &rest);
        if upoly::deg(field, &g) > 0 {
            equal_degree_split(field, &g, d, &q, &mut rng, &mut out);
            rest = upoly::exact_div(field, &rest, &g).unwrap();
            h = upoly::rem(field, &h, &rest);
        }
    }
    out
}

/// Split a product of distinct irreducibles, all of degree `d`.
fn equal_degree_split<F: Field>(
    field: &F,
    g: &UPoly<F>,
    d: usize,
    q: &BigUint,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<UPoly<F>>,
) {
    let deg_g = upoly::deg(field, g) as usize;
    if deg_g == d {
        out.push(g.clone());
        return;
    }
    let two = BigUint::from(2u32);
    let char_two = field.characteristic() == 2;
    loop {
        // Random polynomial of degree < deg g.
        let mut r: UPoly<F> = (0..deg_g).map(|_| field.random(rng)).collect();
        r = upoly::normalize(field, r);
        if upoly::deg(field, &r) < 1 {
            continue;
        }
        let s = if char_two {
            // Trace map T(r) = r + r^2 + r^4 + … with q^d = 2^m summands.
            let m = (q.pow(d as u32)).bits() - 1; // q^d = 2^m exactly
            let mut acc = upoly::rem(field, &r, g);
            let mut term = acc.clone();
            for _ in 1..m {
                term = upoly::rem(field, &upoly::mul(field, &term, &term), g);
                acc = upoly::add(field, &acc, &term);
            }
            upoly::rem(field, &acc, g)
        } else {
            let e = (q.pow(d as u32) - BigUint::one()) / &two;
            let p = upoly::pow_mod(field, &r, &e, g);
            upoly::sub(field, &p, &upoly::one(field))
        };
        let h = upoly::gcd(field, &s, g);
        let dh = upoly::deg(field, &h);
        if dh > 0 && dh < upoly::deg(field, g) {
            let other = upoly::exact_div(field, g, &h).unwrap();
            equal_degree_split(field, &h, d, q, rng, out);
            equal_degree_split(field, &other, d, q, rng, out);
            return;
        }
    }
}

impl FactorField for PrimeField {
    fn factor_monic_squarefree(&self, f: &UPoly<Self>) -> Vec<UPoly<Self>> {
        cz_factor(self, f)
    }
}

// --------------------------------------------------------------------------
// Rationals: Zassenhaus with quadratic Hensel lifting.
// --------------------------------------------------------------------------

/// Clear denominators and content: returns (scalar, primitive integer poly
/// with positive leading coefficient) with `f = scalar * primitive`.
pub fn rational_to_primitive_int(f: &UPoly<Rationals>) -> (BigRational, Vec<BigInt>) {
    assert!(!f.is_empty());
    let mut den = BigInt::one();
    for c in f {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = f.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    if content.is_zero() {
        content = BigInt::one();
    }
    if ints.last().unwrap().is_negative() {
        content = -content;
    }
    let prim: Vec<BigInt> = ints.iter().map(|c| c / &content).collect();
    (BigRational::new(content, den), prim)
}


/// Factor a monic squarefree polynomial over the rationals into monic
/// irreducibles, by reduction to a primitive integer polynomial.
fn zassenhaus_monic_squarefree(f: &UPoly<Rationals>) -> Vec<UPoly<Rationals>> {
    let q = Rationals;
    let n = upoly::deg(&q, f);
    if n <= 1 {
        return if n == 1 { vec![f.clone()] } else { vec![] };
    }
    let (_, prim) = rational_to_primitive_int(f);
    // Monicize: with leading coefficient l, the roots of f scale by l to
    // roots of the monic integer polynomial l^(n−1) f(x/l).
    let l = prim.last().unwrap().clone();
    let nn = prim.len() - 1;
    let monic_int: Vec<BigInt> = prim
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == nn {
                BigInt::one()
            } else {
                c * l.pow((nn - 1 - i) as u32)
            }
        })
        .collect();
    let factors_int = zassenhaus_monic_int(&monic_int);
    // Undo the scaling: g(x) -> g(l x), then make monic over Q.
    factors_int
        .into_iter()
        .map(|g| {
            let d = g.len() - 1;
            let scaled: UPoly<Rationals> = g
                .iter()
                .enumerate()
                .map(|(i, c)| BigRational::from_integer(c * l.pow(i as u32)))
                .collect();
            let lcq = scaled[d].clone();
            scaled.iter().map(|c| c / &lcq).collect()
        })
        .collect()
}

/// Factor a monic squarefree integer polynomial into monic integer
/// irreducibles.
fn zassenhaus_monic_int(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    // Choose a prime keeping f squarefree mod p.
    let mut p = 3u64;
    let (fp_field, fp_poly) = loop {
        p = next_prime_u64(p + 1);
        let fld = PrimeField::new(p);
        let fp: UPoly<PrimeField> = f.iter().map(|c| fld.reduce_bigint(c)).collect();
        if upoly::deg(&fld, &fp) != n as isize {
            continue; // cannot happen for monic f, but keep the guard
        }
        let dfp = upoly::derivative(&fld, &fp);
        if dfp.is_empty() {
            continue;
        }
        if upoly::deg(&fld, &upoly::gcd(&fld, &fp, &dfp)) == 0 {
            break (fld, fp);
        }
    };
    let modular = cz_factor(&fp_field, &fp_poly);
    if modular.len() == 1 {
        return vec![f.to_vec()];
    }
    // Coefficient bound for monic divisors of f (Mignotte-style, generous).
    let height = f.iter().map(|c| c.abs()).max().unwrap();
    let bound: BigInt = (BigInt::one() << (n + 2)) * (BigInt::from(n as u64 + 1)) * height;
    let two_bound = &bound * 2;
    // Lift to p^(2^k) ≥ 2·bound+1.
    let mut modulus = BigInt::from(p);
    let mut lifted: Vec<Vec<BigInt>> = modular
        .iter()
        .map(|g| g.iter().map(|c| BigInt::from(*c)).collect())
        .collect();
    while modulus <= two_bound {
        lifted = hensel_tree_lift(f, &lifted, &modulus);
        modulus = &modulus * &modulus;
    }
    // Subset recombination.
    let mut remaining: Vec<Vec<BigInt>> = lifted;
    let mut rest = f.to_vec();
    let mut out: Vec<Vec<BigInt>> = vec![];
    let mut size = 1usize;
    'outer: while 2 * size <= remaining.len() {
        let idx: Vec<usize> = (0..remaining.len()).collect();
        for combo in combinations(&idx, size) {
            let mut prod = vec![BigInt::one()];
            for &i in &combo {
                prod = int_poly_mul_mod(&prod, &remaining[i], &modulus);
            }
            symmetric_reduce(&mut prod, &modulus);
            // Quick reject: the candidate's constant term must divide the
            // constant term of what is left (both exact over Z).
            if !prod.is_empty() && !prod[0].is_zero() && !rest[0].is_zero() {
                if !(&rest[0] % &prod[0]).is_zero() {
                    continue;
                }
            }
            if int_poly_divides(&prod, &rest) {
                rest = int_poly_exact_div(&rest, &prod);
                out.push(prod);
                let keep: Vec<Vec<BigInt>> = remaining
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !combo.contains(i))
                    .map(|(_, g)| g.clone())
                    .collect();
                remaining = keep;
                continue 'outer;
            }
        }
        size += 1;
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut combo: Vec<usize> = (0..k).collect();
    if k == 0 || k > items.len() {
        return out;
    }
    loop {
        out.push(combo.iter().map(|&i| items[i]).collect());
        // Advance.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if combo[i] != i + items.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

// ---- integer-polynomial helpers (modular and exact) ----------------------

fn symmetric_reduce(p: &mut [BigInt], m: &BigInt) {
    let half = m / 2;
    for c in p.iter_mut() {
        let mut r = &*c % m;
        if r.is_negative() {
            r += m;
        }
        if r > half {
            r -= m;
        }
        *c = r;
    }
}

fn int_poly_trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

fn int_poly_mul_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    for c in v.iter_mut() {
        *c = &*c % m;
    }
    int_poly_trim(v)
}

fn int_poly_add_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut v = vec![BigInt::zero(); n];
    for i in 0..n {
        let mut s = BigInt::zero();
        if i < a.len() {
            s += &a[i];
        }
        if i < b.len() {
            s += &b[i];
        }
        v[i] = s % m;
    }
    int_poly_trim(v)
}

fn int_poly_sub_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let neg: Vec<BigInt> = b.iter().map(|c| -c).collect();
    int_poly_add_mod(a, &neg, m)
}

/// Division with remainder by a monic polynomial, coefficients mod m.
fn int_poly_divrem_monic_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    assert!(b.last().map(|c| c.is_one()).unwrap_or(false), "divisor must be monic");
    let mut r: Vec<BigInt> = a.to_vec();
    if r.len() < b.len() {
        return (vec![], int_poly_trim(r));
    }
    let qd = r.len() - b.len();
    let mut q = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let top = r[k + b.len() - 1].clone() % m;
        if top.is_zero() {
            continue;
        }
        q[k] = top.clone();
        for (j, bj) in b.iter().enumerate() {
            let t = &top * bj;
            r[k + j] = (&r[k + j] - t) % m;
        }
    }
    (int_poly_trim(q), int_poly_trim(r))
}

fn int_poly_divides(d: &[BigInt], f: &[BigInt]) -> bool {
    if d.is_empty() {
        return false;
    }
    if !d.last().unwrap().is_one() {
        return false;
    }
    if f.len() < d.len() {
        return false;
    }
    // Exact division over Z by a monic divisor.
    let mut r: Vec<BigInt> = f.to_vec();
    let qd = r.len() - d.len();
    for k in (0..=qd).rev() {
        let top = r[k + d.len() - 1].clone();
        if top.is_zero() {
            continue;
        }
        for (j, dj) in d.iter().enumerate() {
            let t = &top * dj;
            r[k + j] = &r[k + j] - t;
        }
    }
    r.iter().all(|c| c.is_zero())
}

fn int_poly_exact_div(f: &[BigInt], d: &[BigInt]) -> Vec<BigInt> {
    let mut r: Vec<BigInt> = f.to_vec();
    let qd = r.len() - d.len();
    let mut q = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let top = r[k + d.len() - 1].clone();
        q[k] = top.clone();
        if top.is_zero() {
            continue;
        }
        for (j, dj) in d.iter().enumerate() {
            let t = &top * dj;
            r[k + j] = &r[k + j] - t;
        }
    }
    assert!(r.iter().all(|c| c.is_zero()), "inexact division");
    int_poly_trim(q)
}

/// One tree level of multifactor Hensel lifting: given `f ≡ prod(parts)
/// mod m` with pairwise-coprime monic parts, return parts with
/// `f ≡ prod(parts') mod m^2` and `parts' ≡ parts mod m`.
fn hensel_tree_lift(f: &[BigInt], parts: &[Vec<BigInt>], m: &BigInt) -> Vec<Vec<BigInt>> {
    if parts.len() == 1 {
        // The single factor is f itself reduced mod m^2.
        let m2 = m * m;
        let mut g = f.to_vec();
        symmetric_reduce(&mut g, &m2);
        return vec![g];
    }
    let mid = parts.len() / 2;
    let (left, right) = parts.split_at(mid);
    let m2 = m * m;
    let mut gprod = vec![BigInt::one()];
    for g in left {
        gprod = int_poly_mul_mod(&gprod, g, &m2);
    }
    let mut hprod = vec![BigInt::one()];
    for h in right {
        hprod = int_poly_mul_mod(&hprod, h, &m2);
    }
    let (g2, h2) = hensel_pair_lift(f, &gprod, &hprod, m);
    let mut out = hensel_tree_lift(&g2, left, m);
    out.extend(hensel_tree_lift(&h2, right, m));
    out
}

/// Quadratic Hensel step for a coprime pair of monic factors.
fn hensel_pair_lift(f: &[BigInt], g: &[BigInt], h: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    // Bezout coefficients mod the base prime of m; recompute via the prime
    // field each time (m is a prime power of a u64 prime in our usage, but
    // recomputing the inverse chain mod m by Newton would be overkill here:
    // we instead lift Bezout alongside, starting from mod p obtained by
    // factoring m). To stay simple and correct we compute Bezout mod m by
    // the extended Euclid over the integers-with-division-by-monic trick:
    // both g and h are monic, and they are coprime mod the base prime, so
    // Euclid over Z/m works with pseudo-inverses of the leading units that
    // show up. We avoid that subtlety by computing Bezout coefficients over
    // Z/m via Hensel-lifting them from Z/p as part of this routine's
    // contract: callers pass m = p^(2^k), and we recompute from scratch mod
    // p each call, then lift the Bezout pair to m before using it.
    let p = smallest_prime_factor(m);
    let fldp = PrimeField::new(p);
    let gp: UPoly<PrimeField> = g.iter().map(|c| fldp.reduce_bigint(c)).collect();
    let hp: UPoly<PrimeField> = h.iter().map(|c| fldp.reduce_bigint(c)).collect();
    let (one_p, sp, tp) = upoly::egcd(&fldp, &gp, &hp);
    assert_eq!(upoly::deg(&fldp, &one_p), 0, "Hensel factors not coprime mod p");
    let mut s: Vec<BigInt> = sp.iter().map(|c| BigInt::from(*c)).collect();
    let mut t: Vec<BigInt> = tp.iter().map(|c| BigInt::from(*c)).collect();
    // Lift Bezout s,t from mod p up to mod m (and then once more inside the
    // main loop below to m^2 as needed): iterate e := s g + t h − 1 → 0.
    let mut cur = BigInt::from(p);
    let target = m * m;
    let (mut g, mut h) = (g.to_vec(), h.to_vec());
    // First lift the factor pair itself p → m^2 in doubling steps, keeping
    // Bezout in sync at each modulus.
    while cur < target {
        let next = (&cur * &cur).min(target.clone());
        // Factor update modulo `next`.
        let prod = int_poly_mul_mod(&g, &h, &next);
        let e = int_poly_sub_mod(f, &prod, &next);
        let se = int_poly_mul_mod(&s, &e, &next);
        let (q, r) = int_poly_divrem_monic_mod(&se, &h, &next);
        let te_qg = int_poly_add_mod(
            &int_poly_mul_mod(&t, &e, &next),
            &int_poly_mul_mod(&q, &g, &next),
            &next,
        );
        let g_new = int_poly_add_mod(&g, &te_qg, &next);
        let h_new = int_poly_add_mod(&h, &r, &next);
        // Bezout update modulo `next`.
        let sg = int_poly_mul_mod(&s, &g_new, &next);
        let th = int_poly_mul_mod(&t, &h_new, &next);
        let mut b = int_poly_add_mod(&sg, &th, &next);
        if b.is_empty() {
            b = vec![BigInt::zero()];
        }
        b[0] -= 1;
        let b = int_poly_trim(b);
        let sb = int_poly_mul_mod(&s, &b, &next);
        let (c, d) = int_poly_divrem_monic_mod(&sb, &h_new, &next);
        let s_new = int_poly_sub_mod(&s, &d, &next);
        let tb = int_poly_mul_mod(&t, &b, &next);
        let cg = int_poly_mul_mod(&c, &g_new, &next);
        let t_new = int_poly_sub_mod(&t, &int_poly_add_mod(&tb, &cg, &next), &next);
        g = g_new;
        h = h_new;
        s = s_new;
        t = t_new;
        cur = next;
    }
    let m2 = m * m;
    symmetric_reduce(&mut g, &m2);
    symmetric_reduce(&mut h, &m2);
    (int_poly_trim(g), int_poly_trim(h))
}

fn smallest_prime_factor(m: &BigInt) -> u64 {
    // In this module m is always a power of a u64 prime chosen by
    // `zassenhaus_monic_int`; recover it by trial division over candidates.
    let mut p = 2u64;
    loop {
        if (m % BigInt::from(p)).is_zero() {
            return p;
        }
        p = next_prime_u64(p + 1);
        assert!(p < 1 << 40, "unexpected modulus in Hensel lifting");
    }
}

impl FactorField for Rationals {
    fn factor_monic_squarefree(&self, f: &UPoly<Self>) -> Vec<UPoly<Self>> {
        zassenhaus_monic_squarefree(f)
    }
}

// --------------------------------------------------------------------------
// Towers: Cantor–Zassenhaus when finite, norm descent when over Q.
// --------------------------------------------------------------------------

impl<F: FactorField> FactorField for Tower<F> {
    fn factor_monic_squarefree(&self, f: &UPoly<Self>) -> Vec<UPoly<Self>> {
        if self.level() == 0 {
            // Degenerate tower: delegate to the base field.
            let base = self.base();
            let fb: UPoly<F> = f
                .iter()
                .map(|c| match c {
                    TElem::Base(t) => t.clone(),
                    _ => unreachable!("level-0 tower holds base elements only"),
                })
                .collect();
            return base
                .factor_monic_squarefree(&fb)
                .into_iter()
                .map(|g| g.into_iter().map(TElem::Base).collect())
                .collect();
        }
        if self.order().is_some() {
            cz_factor(self, f)
        } else {
            trager_factor(self, f)
        }
    }
}

/// Norm of `f` down one level: the product of the conjugates of `f` over
/// the roots of the top modulus. Coefficients of `f` live at tower level
/// `level`; the result's coefficients live at `level−1`. Computed by
/// evaluation–interpolation in the main variable, valid at every node
/// because the modulus is monic (so `Res(m, ·)` has no degree-drop issue).
fn norm_down_one<F: Field>(
    t: &Tower<F>,
    level: usize,
    f: &[TElem<F::Elem>],
) -> Vec<TElem<F::Elem>> {
    let top = t.view(level);
    let sub = t.view(level - 1);
    let m = t.modulus(level);
    let dm = m.len() - 1;
    let dx = f.len().saturating_sub(1);
    let target = dm * dx;
    let f = f.to_vec();
    let mut xs: Vec<TElem<F::Elem>> = vec![];
    let mut ys: Vec<TElem<F::Elem>> = vec![];
    let mut k: i64 = 0;
    while xs.len() <= target {
        let x0 = top.from_i64(k);
        let fx0 = upoly::eval(&top, &f, &x0);
        let coeffs = upoly::normalize(&sub, elem_coeffs(&fx0));
        let val = upoly::resultant(&sub, m, &coeffs);
        xs.push(sub.from_i64(k));
        ys.push(val);
        k = if k >= 0 { -(k + 1) } else { -k };
    }
    upoly::interpolate(&sub, &xs, &ys)
}

/// Coefficient list of a tower element with respect to its outer generator.
fn elem_coeffs<T: Clone>(e: &TElem<T>) -> Vec<TElem<T>> {
    match e {
        TElem::Base(_) => vec![e.clone()],
        TElem::Poly(v) => v.clone(),
    }
}

/// Norm all the way down to the base field.
pub fn norm_to_base<F: Field>(t: &Tower<F>, f: &[TElem<F::Elem>]) -> UPoly<F> {
    let mut cur = f.to_vec();
    for level in (1..=t.level()).rev() {
        cur = norm_down_one(t, level, &cur);
    }
    cur.into_iter()
        .map(|e| match e {
            TElem::Base(b) => b,
            TElem::Poly(_) => unreachable!("norm did not reach the base field"),
        })
        .collect()
}

/// Factorization over a characteristic-zero tower by norm descent: shift by
/// a small combination of the generators until the norm is squarefree,
/// factor the norm over the base field, then pull factors back with gcds.
fn trager_factor<F: FactorField>(t: &Tower<F>, f: &UPoly<Tower<F>>) -> Vec<UPoly<Tower<F>>> {
    let n = upoly::deg(t, f);
    if n <= 1 {
        return if n == 1 { vec![f.clone()] } else { vec![] };
    }
    let base = t.base().clone();
    let seed = fnv_seed(&["trager".into(), upoly::format_poly(t, f, "x")]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0u32..64 {
        // Shift x ← x − σ with σ a small generator combination (σ=0 first).
        let mut sigma = t.zero();
        if attempt > 0 {
            for k in 1..=t.level() {
                let s = (rng.next_u32() % 7) as i64 - 3;
                let term = t.mul(&t.from_i64(s), &t.gen_elem(k));
                sigma = t.add(&sigma, &term);
            }
            if t.is_zero(&sigma) {
                continue;
            }
        }
        let x_minus_sigma = upoly::normalize(t, vec![t.neg(&sigma), t.one()]);
        let shifted = upoly::compose(t, f, &x_minus_sigma);
        let nrm = norm_to_base(t, &shifted);
        let dn = upoly::derivative(&base, &nrm);
        if dn.is_empty() || upoly::deg(&base, &upoly::gcd(&base, &nrm, &dn)) != 0 {
            continue;
        }
        // Norm of a monic polynomial is monic; factor it over the base.
        let nrm_monic = upoly::monic(&base, &nrm).unwrap();
        let base_factors = base.factor_monic_squarefree(&nrm_monic);
        let x_plus_sigma = upoly::normalize(t, vec![sigma.clone(), t.one()]);
        let mut out = vec![];
        for h in base_factors {
            let h_lift: UPoly<Tower<F>> = h.into_iter().map(TElem::Base).collect();
            let g = upoly::gcd(t, &shifted, &h_lift);
            if upoly::deg(t, &g) > 0 {
                out.push(upoly::compose(t, &g, &x_plus_sigma));
            }
        }
        let total: isize = out.iter().map(|g| upoly::deg(t, g)).sum();
        assert_eq!(total, n, "norm descent lost degrees");
        return out;
    }
    panic!("no squarefree-norm shift found after 64 attempts");
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn qp(coeffs: &[i64]) -> UPoly<Rationals> {
        let q = Rationals;
        upoly::normalize(&q, coeffs.iter().map(|&c| q.from_i64(c)).collect())
    }

    fn refold<F: Field>(field: &F, fac: &Factorization<F>) -> UPoly<F> {
        let mut acc = upoly::constant(field, fac.unit.clone());
        for (g, m) in &fac.factors {
            for _ in 0..*m {
                acc = upoly::mul(field, &acc, g);
            }
        }
        acc
    }

    #[test]
    fn factor_over_prime_field_exhaustive_small() {
        // Every monic cubic over F_5 factors back to itself with irreducible
        // parts (irreducibility spot-checked by absence of roots for the
        // degree-2/3 factors).
        let f = PrimeField::new(5);
        for a in 0..5u64 {
            for b in 0..5u64 {
                for c in 0..5u64 {
                    let p = vec![c, b, a, 1];
                    let fac = factor(&f, &p);
                    assert_eq!(refold(&f, &fac), p);
                    for (g, _) in &fac.factors {
                        if g.len() >= 3 {
                            for x in 0..5u64 {
                                assert_ne!(upoly::eval(&f, g, &x), 0, "reducible part {g:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn factor_char2_uses_trace_splitting() {
        let f = PrimeField::new(2);
        // x^4 + x + 1 is irreducible over F_2; (x^2+x+1)^2 = x^4+x^2+1.
        let irr = vec![1u64, 1, 0, 0, 1];
        let fac = factor(&f, &irr);
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.factors[0], (irr.clone(), 1));
        let sq = vec![1u64, 0, 1, 0, 1];
        let fac2 = factor(&f, &sq);
        assert_eq!(fac2.factors, vec![(vec![1, 1, 1], 2)]);
        // x^2 + x = x(x+1): distinct roots in the field, split by trace.
        let fac3 = factor(&f, &vec![0u64, 1, 1]);
        assert_eq!(fac3.factors.len(), 2);
    }

    #[test]
    fn factor_random_products_roundtrip_fp() {
        let f = PrimeField::new(101);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let mut p = vec![f.one()];
            let k = rng.gen_range(1..5);
            for _ in 0..k {
                let d = rng.gen_range(1..4);
                let mut fac: UPoly<PrimeField> =
                    (0..d).map(|_| f.random(&mut rng)).collect();
                fac.push(1);
                let e = rng.gen_range(1..3);
                for _ in 0..e {
                    p = upoly::mul(&f, &p, &fac);
                }
            }
            let fac = factor(&f, &p);
            assert_eq!(refold(&f, &fac), p);
        }
    }

    #[test]
    fn factor_over_rationals_basics() {
        let q = Rationals;
        // x^2 − 1 = (x−1)(x+1)
        let fac = factor(&q, &qp(&[-1, 0, 1]));
        assert_eq!(fac.unit, q.one());
        assert_eq!(fac.factors, vec![(qp(&[-1, 1]), 1), (qp(&[1, 1]), 1)]);
        // x^3 − 2 is irreducible
        let fac = factor(&q, &qp(&[-2, 0, 0, 1]));
        assert_eq!(fac.factors, vec![(qp(&[-2, 0, 0, 1]), 1)]);
        // 2x^2 − 2 has unit 2
        let fac = factor(&q, &qp(&[-2, 0, 2]));
        assert_eq!(fac.unit, q.from_i64(2));
        assert_eq!(fac.factors.len(), 2);
    }

    #[test]
    fn factor_rationals_nonmonic_and_multiplicities() {
        let q = Rationals;
        // (2x+1)^2 (3x−1) (x^2+x+1)
        let p = {
            let a = qp(&[1, 2]);
            let b = qp(&[-1, 3]);
            let c = qp(&[1, 1, 1]);
            upoly::mul(&q, &upoly::mul(&q, &upoly::mul(&q, &a, &a), &b), &c)
        };
        let fac = factor(&q, &p);
        assert_eq!(refold(&q, &fac), p);
        // Factors are monic: the two linear ones are x+1/2 and x−1/3.
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let third = BigRational::new(BigInt::from(-1), BigInt::from(3));
        let mut seen_sq = false;
        for (g, m) in &fac.factors {
            if g.len() == 2 && g[0] == half {
                assert_eq!(*m, 2);
            }
            if g.len() == 2 && g[0] == third {
                assert_eq!(*m, 1);
            }
            if g.len() == 3 {
                seen_sq = true;
                assert_eq!(*m, 1);
            }
        }
        assert!(seen_sq);
    }

    #[test]
    fn factor_rationals_cyclotomic_like() {
        let q = Rationals;
        // x^6 − 1 = (x−1)(x+1)(x^2+x+1)(x^2−x+1)
        let fac = factor(&q, &qp(&[-1, 0, 0, 0, 0, 0, 1]));
        assert_eq!(fac.factors.len(), 4);
        assert_eq!(refold(&q, &fac), qp(&[-1, 0, 0, 0, 0, 0, 1]));
        let degs: Vec<usize> = fac.factors.iter().map(|(g, _)| g.len() - 1).collect();
        assert_eq!(degs, vec![1, 1, 2, 2]);
    }

    #[test]
    fn factor_rationals_larger_stress() {
        let q = Rationals;
        // Swinnerton-Dyer-flavoured: minimal polynomial of sqrt2+sqrt3 is
        // x^4 − 10x^2 + 1 (irreducible, but splits mod every prime).
        let p = qp(&[1, 0, -10, 0, 1]);
        let fac = factor(&q, &p);
        assert_eq!(fac.factors, vec![(p.clone(), 1)]);
    }

    #[test]
    fn factor_over_finite_tower() {
        // Over F_4, x^2 + x + 1 splits as (x−g)(x−g^2).
        let f2 = PrimeField::new(2);
        let t0 = Tower::new(f2);
        let t = t0.adjoin(&vec![t0.one(), t0.one(), t0.one()]);
        let g = t.gen_elem(1);
        let p = vec![t.one(), t.one(), t.one()];
        let fac = factor(&t, &p);
        assert_eq!(fac.factors.len(), 2);
        for (h, m) in &fac.factors {
            assert_eq!(*m, 1);
            assert_eq!(h.len(), 2);
            assert!(t.is_zero(&upoly::eval(&t, &p, &t.neg(&h[0]))));
        }
        let roots: Vec<_> = fac.factors.iter().map(|(h, _)| t.neg(&h[0])).collect();
        assert!(roots.contains(&g));
        assert!(roots.contains(&t.mul(&g, &g)));
    }

    #[test]
    fn factor_over_rational_tower_norm_descent() {
        // Over Q(sqrt2), x^2 − 2 = (x − sqrt2)(x + sqrt2).
        let t0 = Tower::new(Rationals);
        let t = t0.adjoin(&vec![t0.from_i64(-2), t0.zero(), t0.one()]);
        let r2 = t.gen_elem(1);
        let p = vec![t.from_i64(-2), t.zero(), t.one()];
        let fac = factor(&t, &p);
        assert_eq!(fac.factors.len(), 2);
        let roots: Vec<_> = fac.factors.iter().map(|(h, _)| t.neg(&h[0])).collect();
        assert!(roots.contains(&r2));
        assert!(roots.contains(&t.neg(&r2)));
        // x^2 + 1 stays irreducible over Q(sqrt2).
        let p2 = vec![t.one(), t.zero(), t.one()];
        let fac2 = factor(&t, &p2);
        assert_eq!(fac2.factors, vec![(p2.clone(), 1)]);
        // x^2 − 2*sqrt2*x + 2 = (x − sqrt2)^2: repeated root through the
        // squarefree step.
        let p3 = vec![
            t.from_i64(2),
            t.mul(&t.from_i64(-2), &r2),
            t.one(),
        ];
        let fac3 = factor(&t, &p3);
        assert_eq!(fac3.factors.len(), 1);
        assert_eq!(fac3.factors[0].1, 2);
    }

    #[test]
    fn factor_two_floor_rational_tower() {
        // Q(sqrt2, sqrt3): x^2 − 6 splits using both generators.
        let t0 = Tower::new(Rationals);
        let t1 = t0.adjoin(&vec![t0.from_i64(-2), t0.zero(), t0.one()]);
        let t2 = t1.adjoin(&vec![t1.from_i64(-3), t1.zero(), t1.one()]);
        let p = vec![t2.from_i64(-6), t2.zero(), t2.one()];
        let fac = factor(&t2, &p);
        assert_eq!(fac.factors.len(), 2);
        let r6 = t2.mul(&t2.gen_elem(1), &t2.gen_elem(2));
        let roots: Vec<_> = fac.factors.iter().map(|(h, _)| t2.neg(&h[0])).collect();
        assert!(roots.contains(&r6));
        assert!(roots.contains(&t2.neg(&r6)));
    }

    #[test]
    fn norm_to_base_is_power_compatible() {
        // Norm of (x − sqrt2) over Q(sqrt2) is x^2 − 2.
        let t0 = Tower::new(Rationals);
        let t = t0.adjoin(&vec![t0.from_i64(-2), t0.zero(), t0.one()]);
        let r2 = t.gen_elem(1);
        let lin = vec![t.neg(&r2), t.one()];
        let n = norm_to_base(&t, &lin);
        assert_eq!(n, qp(&[-2, 0, 1]));
    }

    #[test]
    fn roots_helper_returns_field_roots_only() {
        let f = PrimeField::new(7);
        // (x−2)(x−3)(x^2+1); x^2+1 is irreducible mod 7? 7≡3 mod 4, yes.
        let p = upoly::mul(
            &f,
            &upoly::mul(&f, &vec![f.from_i64(-2), 1], &vec![f.from_i64(-3), 1]),
            &vec![1, 0, 1],
        );
        let mut rs = roots(&f, &p);
        rs.sort();
        assert_eq!(rs, vec![2, 3]);
    }
}
