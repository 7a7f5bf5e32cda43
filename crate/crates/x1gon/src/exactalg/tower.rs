//! Iterated field extensions ("towers") over a generic base field.
//!
//! A tower of height `L` over a base field `K` is
//! `K(g_1)(g_2)…(g_L)` where each generator `g_k` satisfies a monic
//! irreducible polynomial over the level below. Elements are nested
//! coefficient trees: [`TElem::Base`] is a base-field constant at every
//! level, while a [`TElem::Poly`] appearing as a level-`k` element lists its
//! coefficients with respect to `g_k` (little-endian), each coefficient
//! being a level-`k−1` element.
//!
//! Canonical form: trailing zero coefficients are stripped, the empty list
//! collapses to `Base(0)`, and a one-element list whose entry is `Base`
//! collapses to that `Base`. A one-element list holding a `Poly` is kept:
//! it marks an element living in a lower level, and collapsing it would
//! change which generator the outer list refers to.

use super::field::Field;
use super::upoly::{self, UPoly};
use num_bigint::BigUint;
use num_traits::One;
use rand::RngCore;
use std::fmt::Debug;

#[derive(Clone, Debug, PartialEq)]
pub enum TElem<T> {
    Base(T),
    Poly(Vec<TElem<T>>),
}

/// An iterated extension of the base field `F`.
#[derive(Clone, Debug)]
pub struct Tower<F: Field> {
    base: F,
    /// `moduli[k]` is the monic defining polynomial of generator `g_{k+1}`,
    /// with coefficients that are level-`k` elements.
    moduli: Vec<Vec<TElem<F::Elem>>>,
}

/// The same tower truncated at `level`; implements [`Field`] so that all
/// univariate algorithms can run at any floor of the tower.
#[derive(Debug)]
pub struct LevelView<'a, F: Field> {
    tower: &'a Tower<F>,
    level: usize,
}

impl<F: Field> Clone for LevelView<'_, F> {
    fn clone(&self) -> Self {
        LevelView {
            tower: self.tower,
            level: self.level,
        }
    }
}

impl<F: Field> Tower<F> {
    pub fn new(base: F) -> Self {
        Tower {
            base,
            moduli: vec![],
        }
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn level(&self) -> usize {
        self.moduli.len()
    }

    pub fn view(&self, level: usize) -> LevelView<'_, F> {
        assert!(level <= self.level());
        LevelView { tower: self, level }
    }

    pub fn top(&self) -> LevelView<'_, F> {
        self.view(self.level())
    }

    /// Defining modulus of generator `k` (1-indexed).
    pub fn modulus(&self, k: usize) -> &Vec<TElem<F::Elem>> {
        &self.moduli[k - 1]
    }

    /// Extend the tower by a root of `modulus`, a polynomial with
    /// coefficients at the current top level. The modulus is made monic;
    /// it must be nonconstant, and irreducibility is the caller's
    /// responsibility (all adjoined moduli in this crate come from
    /// factorization routines).
    pub fn adjoin(&self, modulus: &[TElem<F::Elem>]) -> Tower<F> {
        let top = self.top();
        let m = upoly::normalize(&top, modulus.to_vec());
        assert!(
            upoly::deg(&top, &m) >= 1,
            "modulus must have positive degree"
        );
        let monic = upoly::monic(&top, &m).expect("leading coefficient not invertible");
        let mut t = self.clone();
        t.moduli.push(monic);
        t
    }

    /// Generator `g_k` (1-indexed), as an element of the full tower.
    pub fn gen_elem(&self, k: usize) -> TElem<F::Elem> {
        assert!(k >= 1 && k <= self.level());
        let deg_k = self.moduli[k - 1].len() - 1;
        assert!(deg_k >= 1);
        let at_level_k = TElem::Poly(vec![TElem::Base(self.base.zero()), TElem::Base(self.base.one())]);
        self.embed(at_level_k, k)
    }

    /// View a level-`from` element at the top level (wraps in one-element
    /// coefficient lists; `Base` passes through unchanged).
    pub fn embed(&self, e: TElem<F::Elem>, from: usize) -> TElem<F::Elem> {
        let mut e = e;
        for _ in from..self.level() {
            if matches!(e, TElem::Base(_)) {
                break;
            }
            e = TElem::Poly(vec![e]);
        }
        e
    }

    /// Extension degree of the whole tower over the base field.
    pub fn total_degree(&self) -> usize {
        self.moduli.iter().map(|m| m.len() - 1).product()
    }

    /// Degree of the modulus at each level, bottom to top.
    pub fn level_degrees(&self) -> Vec<usize> {
        self.moduli.iter().map(|m| m.len() - 1).collect()
    }

    fn normalize_elem(&self, level: usize, e: TElem<F::Elem>) -> TElem<F::Elem> {
        match e {
            TElem::Base(t) => TElem::Base(t),
            TElem::Poly(mut v) => {
                debug_assert!(level >= 1, "Poly element at base level");
                let v2: Vec<_> = v
                    .drain(..)
                    .map(|c| self.normalize_elem(level - 1, c))
                    .collect();
                let mut v2 = v2;
                while let Some(last) = v2.last() {
                    if self.is_zero_at(level - 1, last) {
                        v2.pop();
                    } else {
                        break;
                    }
                }
                match v2.len() {
                    0 => TElem::Base(self.base.zero()),
                    1 => match v2.into_iter().next().unwrap() {
                        TElem::Base(t) => TElem::Base(t),
                        p => TElem::Poly(vec![p]),
                    },
                    _ => TElem::Poly(v2),
                }
            }
        }
    }

    fn is_zero_at(&self, _level: usize, e: &TElem<F::Elem>) -> bool {
        match e {
            TElem::Base(t) => self.base.is_zero(t),
            TElem::Poly(v) => v.is_empty(), // normalized elements are never an all-zero list
        }
    }

    /// Coefficient list of `e` as a polynomial in `g_level`.
    fn coeffs(&self, e: &TElem<F::Elem>) -> Vec<TElem<F::Elem>> {
        match e {
            TElem::Base(_) => vec![e.clone()],
            TElem::Poly(v) => v.clone(),
        }
    }

    fn add_at(&self, level: usize, a: &TElem<F::Elem>, b: &TElem<F::Elem>) -> TElem<F::Elem> {
        match (a, b) {
            (TElem::Base(x), TElem::Base(y)) => TElem::Base(self.base.add(x, y)),
            _ => {
                assert!(level >= 1, "malformed element at base level");
                let va = self.coeffs(a);
                let vb = self.coeffs(b);
                let n = va.len().max(vb.len());
                let zero = TElem::Base(self.base.zero());
                let mut v = Vec::with_capacity(n);
                for i in 0..n {
                    let x = va.get(i).unwrap_or(&zero);
                    let y = vb.get(i).unwrap_or(&zero);
                    v.push(self.add_at(level - 1, x, y));
                }
                self.normalize_elem(level, TElem::Poly(v))
            }
        }
    }

    fn neg_at(&self, level: usize, a: &TElem<F::Elem>) -> TElem<F::Elem> {
        match a {
            TElem::Base(x) => TElem::Base(self.base.neg(x)),
            TElem::Poly(v) => TElem::Poly(v.iter().map(|c| self.neg_at(level - 1, c)).collect()),
        }
    }

    fn mul_at(&self, level: usize, a: &TElem<F::Elem>, b: &TElem<F::Elem>) -> TElem<F::Elem> {
        match (a, b) {
            (TElem::Base(x), TElem::Base(y)) => TElem::Base(self.base.mul(x, y)),
            _ => {
                assert!(level >= 1, "malformed element at base level");
                if self.is_zero_at(level, a) || self.is_zero_at(level, b) {
                    return TElem::Base(self.base.zero());
                }
                let sub = self.view(level - 1);
                let va = self.coeffs(a);
                let vb = self.coeffs(b);
                let prod = upoly::mul(&sub, &va, &vb);
                let red = upoly::rem(&sub, &prod, &self.moduli[level - 1]);
                self.normalize_elem(level, TElem::Poly(red))
            }
        }
    }

    fn inv_at(&self, level: usize, a: &TElem<F::Elem>) -> Option<TElem<F::Elem>> {
        match a {
            TElem::Base(x) => self.base.inv(x).map(TElem::Base),
            TElem::Poly(_) => {
                assert!(level >= 1, "malformed element at base level");
                if self.is_zero_at(level, a) {
                    return None;
                }
                let sub = self.view(level - 1);
                let va = self.coeffs(a);
                let (g, s, _) = upoly::egcd(&sub, &va, &self.moduli[level - 1]);
                // Moduli are irreducible, so any nonzero element is a unit.
                assert!(
                    upoly::deg(&sub, &g) == 0,
                    "non-invertible element: modulus at level {level} is reducible"
                );
                Some(self.normalize_elem(level, TElem::Poly(s)))
            }
        }
    }

    fn random_at(&self, level: usize, rng: &mut dyn RngCore) -> TElem<F::Elem> {
        if level == 0 {
            return TElem::Base(self.base.random(rng));
        }
        let d = self.moduli[level - 1].len() - 1;
        let v: Vec<_> = (0..d).map(|_| self.random_at(level - 1, rng)).collect();
        self.normalize_elem(level, TElem::Poly(v))
    }

    fn format_at(&self, level: usize, e: &TElem<F::Elem>) -> String {
        match e {
            TElem::Base(t) => self.base.format(t),
            TElem::Poly(v) => {
                let name = gen_name(level);
                let parts: Vec<String> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !self.is_zero_at(level - 1, c))
                    .map(|(i, c)| {
                        let cs = self.format_at(level - 1, c);
                        let cs = if cs.contains('+') || cs.contains('-') && i > 0 {
                            format!("({cs})")
                        } else {
                            cs
                        };
                        match i {
                            0 => cs,
                            1 if cs == "1" => name.clone(),
                            1 => format!("{cs}*{name}"),
                            _ if cs == "1" => format!("{name}^{i}"),
                            _ => format!("{cs}*{name}^{i}"),
                        }
                    })
                    .collect();
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join(" + ")
                }
            }
        }
    }
}

fn gen_name(level: usize) -> String {
    // g, h, i, … per tower floor; wraps past 'z' with indices.
    let letters = "ghijklmnopqrstuvwxyz";
    match letters.chars().nth(level - 1) {
        Some(c) => c.to_string(),
        None => format!("g{level}"),
    }
}

impl<F: Field> Field for LevelView<'_, F> {
    type Elem = TElem<F::Elem>;

    fn zero(&self) -> Self::Elem {
        TElem::Base(self.tower.base.zero())
    }
    fn one(&self) -> Self::Elem {
        TElem::Base(self.tower.base.one())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.tower.add_at(self.level, a, b)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.tower.neg_at(self.level, a)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.tower.mul_at(self.level, a, b)
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        self.tower.inv_at(self.level, a)
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.tower.is_zero_at(self.level, a)
    }
    fn characteristic(&self) -> u64 {
        self.tower.base.characteristic()
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        TElem::Base(self.tower.base.from_i64(n))
    }
    fn random(&self, rng: &mut dyn RngCore) -> Self::Elem {
        self.tower.random_at(self.level, rng)
    }
    fn format(&self, a: &Self::Elem) -> String {
        self.tower.format_at(self.level, a)
    }
    fn order(&self) -> Option<BigUint> {
        let base_order = self.tower.base.order()?;
        let mut total = BigUint::one();
        for m in &self.tower.moduli[..self.level] {
            let d = m.len() - 1;
            total *= BigUint::from(d);
        }
        Some(base_order.pow(biguint_to_u32(&total)))
    }
}

fn biguint_to_u32(n: &BigUint) -> u32 {
    let digits = n.to_u32_digits();
    match digits.len() {
        0 => 0,
        1 => digits[0],
        _ => panic!("extension degree too large"),
    }
}

impl<F: Field> Field for Tower<F> {
    type Elem = TElem<F::Elem>;

    fn zero(&self) -> Self::Elem {
        TElem::Base(self.base.zero())
    }
    fn one(&self) -> Self::Elem {
        TElem::Base(self.base.one())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add_at(self.level(), a, b)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.neg_at(self.level(), a)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul_at(self.level(), a, b)
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        self.inv_at(self.level(), a)
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.is_zero_at(self.level(), a)
    }
    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        TElem::Base(self.base.from_i64(n))
    }
    fn random(&self, rng: &mut dyn RngCore) -> Self::Elem {
        self.random_at(self.level(), rng)
    }
    fn format(&self, a: &Self::Elem) -> String {
        self.format_at(self.level(), a)
    }
    fn order(&self) -> Option<BigUint> {
        self.top().order()
    }
}

/// Lift a polynomial over the base field to tower elements.
pub fn lift_poly<F: Field>(_t: &Tower<F>, p: &UPoly<F>) -> Vec<TElem<F::Elem>> {
    p.iter().map(|c| TElem::Base(c.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::field::{PrimeField, Rationals};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn b(t: &Tower<PrimeField>, n: i64) -> TElem<u64> {
        t.from_i64(n)
    }

    #[test]
    fn f4_arithmetic() {
        let f2 = PrimeField::new(2);
        let t0 = Tower::new(f2);
        // g^2 + g + 1 = 0
        let modulus = vec![t0.one(), t0.one(), t0.one()];
        let t = t0.adjoin(&modulus);
        assert_eq!(t.total_degree(), 2);
        assert_eq!(t.order(), Some(BigUint::from(4u32)));
        let g = t.gen_elem(1);
        let g2 = t.mul(&g, &g);
        assert_eq!(g2, t.add(&g, &t.one())); // g^2 = g + 1
        let gi = t.inv(&g).unwrap();
        assert_eq!(gi, t.add(&g, &t.one())); // 1/g = g + 1
        // Every nonzero element satisfies e^3 = 1.
        for e in [t.one(), g.clone(), t.add(&g, &t.one())] {
            assert_eq!(t.pow(&e, 3), t.one());
        }
    }

    #[test]
    fn f16_two_floor_tower() {
        let f2 = PrimeField::new(2);
        let t1 = Tower::new(f2);
        let t4 = t1.adjoin(&vec![t1.one(), t1.one(), t1.one()]); // F_4 = F_2(g)
        let g = t4.gen_elem(1);
        // y^2 + y + g is irreducible over F_4 (y^2+y only takes values 0,1).
        let modulus = vec![g.clone(), t4.one(), t4.one()];
        let t16 = t4.adjoin(&modulus);
        assert_eq!(t16.total_degree(), 4);
        assert_eq!(t16.order(), Some(BigUint::from(16u32)));
        let h = t16.gen_elem(2);
        let g_up = t16.gen_elem(1);
        // h^2 = h + g
        assert_eq!(t16.mul(&h, &h), t16.add(&h, &g_up));
        // Nonzero elements satisfy e^15 = 1; spot-check random ones.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let e = t16.random(&mut rng);
            if t16.is_zero(&e) {
                continue;
            }
            assert_eq!(t16.pow(&e, 15), t16.one());
            // And the inverse matches e^14.
            assert_eq!(t16.inv(&e).unwrap(), t16.pow(&e, 14));
        }
    }

    #[test]
    fn rational_tower_sqrt2_sqrt3() {
        let t0 = Tower::new(Rationals);
        let x2m2 = vec![t0.from_i64(-2), t0.from_i64(0), t0.from_i64(1)];
        let t1 = t0.adjoin(&x2m2); // Q(sqrt 2)
        let r2 = t1.gen_elem(1);
        assert_eq!(t1.mul(&r2, &r2), t1.from_i64(2));
        // 1/(1+sqrt2) = sqrt2 − 1
        let e = t1.add(&t1.one(), &r2);
        let inv = t1.inv(&e).unwrap();
        assert_eq!(inv, t1.sub(&r2, &t1.one()));

        let x2m3 = vec![t1.from_i64(-3), t1.from_i64(0), t1.from_i64(1)];
        let t2 = t1.adjoin(&x2m3); // Q(sqrt2, sqrt3)
        assert_eq!(t2.total_degree(), 4);
        let r2u = t2.gen_elem(1);
        let r3 = t2.gen_elem(2);
        let r6 = t2.mul(&r2u, &r3);
        assert_eq!(t2.mul(&r6, &r6), t2.from_i64(6));
        // (sqrt2+sqrt3)^2 = 5 + 2*sqrt6
        let s = t2.add(&r2u, &r3);
        let s2 = t2.mul(&s, &s);
        let expect = t2.add(&t2.from_i64(5), &t2.mul(&t2.from_i64(2), &r6));
        assert_eq!(s2, expect);
        // Field inverse round-trip.
        let si = t2.inv(&s).unwrap();
        assert_eq!(t2.mul(&s, &si), t2.one());
    }

    #[test]
    fn normalization_rules() {
        let f5 = PrimeField::new(5);
        let t0 = Tower::new(f5);
        let t1 = t0.adjoin(&vec![t0.from_i64(2), t0.zero(), t0.one()]); // g^2=−2
        let t2 = t1.adjoin(&vec![t1.gen_elem(1), t1.one(), t1.one()]);
        // Adding zero keeps canonical form; embedding a level-1 element to
        // level 2 wraps once and survives arithmetic.
        let g_at2 = t2.gen_elem(1);
        assert!(matches!(&g_at2, TElem::Poly(v) if v.len() == 1));
        let z = t2.add(&g_at2, &t2.zero());
        assert_eq!(z, g_at2);
        // Base constants never get wrapped.
        let c = t2.from_i64(3);
        assert!(matches!(c, TElem::Base(_)));
        let c2 = t2.add(&c, &t2.zero());
        assert_eq!(c2, t2.from_i64(3));
        // g + (−g) collapses all the way to Base(0).
        let zero = t2.add(&g_at2, &t2.neg(&g_at2));
        assert_eq!(zero, TElem::Base(0));
    }

    #[test]
    fn upoly_algorithms_run_over_towers() {
        // gcd over F_9 = F_3(g), g^2 = −1.
        let f3 = PrimeField::new(3);
        let t0 = Tower::new(f3);
        let t = t0.adjoin(&vec![t0.one(), t0.zero(), t0.one()]);
        let g = t.gen_elem(1);
        // (x − g)(x + g) = x^2 + 1; gcd with (x − g)(x − 1) is x − g.
        let xm = |c: &TElem<u64>| vec![t.neg(c), t.one()];
        let a = upoly::mul(&t, &xm(&g), &xm(&t.neg(&g)));
        let bpl = upoly::mul(&t, &xm(&g), &xm(&t.one()));
        let gcd = upoly::gcd(&t, &a, &bpl);
        assert_eq!(gcd, xm(&g));
    }

    #[test]
    fn mixed_level_arithmetic() {
        let f7 = PrimeField::new(7);
        let t0 = Tower::new(f7);
        let t1 = t0.adjoin(&vec![t0.from_i64(3), t0.zero(), t0.one()]); // g^2 = −3 = 4
        let t2 = t1.adjoin(&vec![t1.gen_elem(1), t1.zero(), t1.one()]); // h^2 = −g
        let g = t2.gen_elem(1);
        let h = t2.gen_elem(2);
        // h^2 + g = 0
        assert!(t2.is_zero(&t2.add(&t2.mul(&h, &h), &g)));
        // h^4 = g^2 = 4
        assert_eq!(t2.pow(&h, 4), b(&t2, 4));
        // (g + h)(g − h) = g^2 − h^2 = 4 + g
        let lhs = t2.mul(&t2.add(&g, &h), &t2.sub(&g, &h));
        assert_eq!(lhs, t2.add(&b(&t2, 4), &g));
        // Inverses across levels.
        let e = t2.add(&t2.mul(&g, &h), &b(&t2, 2));
        let ei = t2.inv(&e).unwrap();
        assert_eq!(t2.mul(&e, &ei), t2.one());
    }

    #[test]
    fn order_of_higher_tower() {
        let f2 = PrimeField::new(2);
        let t0 = Tower::new(f2);
        let t1 = t0.adjoin(&vec![t0.one(), t0.one(), t0.one()]); // deg 2
        let g = t1.gen_elem(1);
        let t2 = t1.adjoin(&vec![g.clone(), t1.one(), t1.zero(), t1.one()]); // deg 3: y^3+y+g
        assert_eq!(t2.total_degree(), 6);
        assert_eq!(t2.order(), Some(BigUint::from(64u32)));
        assert_eq!(t2.level_degrees(), vec![2, 3]);
    }
}
