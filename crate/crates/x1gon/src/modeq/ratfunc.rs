//! Reduced rational functions in two variables over the rationals.

use crate::exactalg::{MultiPoly, PolyError, Rationals};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::Arc;

type QPoly = MultiPoly<Rationals>;

/// A quotient `num/den` of bivariate polynomials over `Q`, kept reduced:
/// `gcd(num, den) = 1` and `den` is integer-primitive with positive leading
/// coefficient under graded-lex. The zero function is `0/1`.
#[derive(Clone, Debug)]
pub struct RatFunc2 {
    pub num: QPoly,
    pub den: QPoly,
}

impl RatFunc2 {
    /// Build and reduce `num/den`. Errors with `DivisionError` when `den = 0`.
    pub fn new(num: QPoly, den: QPoly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionError);
        }
        if num.is_zero() {
            let vars: Vec<&str> = den.vars.iter().map(|s| s.as_str()).collect();
            return Ok(RatFunc2 {
                num,
                den: QPoly::one(Rationals, &vars),
            });
        }
        let g = num.gcd(&den)?;
        let num = num.exact_div(&g)?;
        let den = den.exact_div(&g)?;
        // Push the scalar content of the denominator into the numerator so
        // the denominator is primitive with positive graded-lex lead.
        let c = den.content();
        let ci = c.recip();
        Ok(RatFunc2 {
            num: num.mul_scalar(&ci),
            den: den.mul_scalar(&ci),
        })
    }

    pub fn from_poly(p: QPoly) -> Self {
        let vars: Vec<&str> = p.vars.iter().map(|s| s.as_str()).collect();
        let den = QPoly::one(Rationals, &vars);
        RatFunc2 { num: p, den }
    }

    /// Build from a pair already known to be coprime, skipping the gcd and
    /// applying only the denominator normalization. The caller is
    /// responsible for coprimality.
    pub fn from_coprime(num: QPoly, den: QPoly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionError);
        }
        if num.is_zero() {
            return Self::new(num, den);
        }
        let c = den.content();
        let ci = c.recip();
        Ok(RatFunc2 {
            num: num.mul_scalar(&ci),
            den: den.mul_scalar(&ci),
        })
    }

    pub fn constant(vars: &[&str], c: BigRational) -> Self {
        Self::from_poly(QPoly::constant(Rationals, vars, c))
    }

    pub fn var(vars: &[&str], i: usize) -> Self {
        Self::from_poly(QPoly::var(Rationals, vars, i))
    }

    pub fn parse(vars: &[&str], num: &str, den: &str) -> Result<Self, PolyError> {
        Self::new(
            QPoly::parse(Rationals, vars, num)?,
            QPoly::parse(Rationals, vars, den)?,
        )
    }

    pub fn vars(&self) -> Arc<Vec<String>> {
        self.num.vars.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the function is a polynomial with `den = 1`.
    pub fn is_poly(&self) -> bool {
        self.den.leading().map_or(false, |(e, c)| {
            e.0.iter().all(|&k| k == 0) && c.is_one()
        }) && self.den.terms.len() == 1
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        let n = self
            .num
            .mul(&other.den)?
            .add(&other.num.mul(&self.den)?)?;
        Self::new(n, self.den.mul(&other.den)?)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc2 {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        Self::new(self.num.mul(&other.num)?, self.den.mul(&other.den)?)
    }

    pub fn div(&self, other: &Self) -> Result<Self, PolyError> {
        if other.is_zero() {
            return Err(PolyError::DivisionError);
        }
        Self::new(self.num.mul(&other.den)?, self.den.mul(&other.num)?)
    }

    pub fn inv(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Err(PolyError::DivisionError);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    /// `self^n` for a signed exponent (negative powers invert first).
    pub fn pow_i(&self, n: i64) -> Result<Self, PolyError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let e = n.unsigned_abs() as u32;
        Ok(RatFunc2 {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    /// Evaluate at a point; `None` when the denominator vanishes there.
    pub fn eval(&self, point: &[BigRational]) -> Option<BigRational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(point) / d)
    }

    pub fn render(&self) -> String {
        if self.is_poly() {
            self.num.render()
        } else {
            format!("({})/({})", self.num.render(), self.den.render())
        }
    }
}

impl PartialEq for RatFunc2 {
    fn eq(&self, other: &Self) -> bool {
        // Cross-multiplied equality; robust independent of normalization.
        match (self.num.mul(&other.den), other.num.mul(&self.den)) {
            (Ok(a), Ok(b)) => a.sub(&b).map_or(false, |d| d.is_zero()),
            _ => false,
        }
    }
}

/// Substitute rational functions for the two variables of `p`, without the
/// final gcd reduction: with `p = sum a_ij u^i v^j`, `u = un/ud`,
/// `v = vn/vd` this returns the raw pair
/// `(sum a_ij un^i ud^(du-i) vn^j vd^(dv-j), ud^du vd^dv)`.
pub fn substitute_rat_parts(
    p: &QPoly,
    subs: &[RatFunc2; 2],
) -> Result<(QPoly, QPoly), PolyError> {
    assert_eq!(p.num_vars(), 2, "substitute_rat expects a bivariate input");
    let out_vars: Vec<&str> = subs[0].num.vars.iter().map(|s| s.as_str()).collect();
    if subs[1].num.vars != subs[0].num.vars {
        return Err(PolyError::FieldMismatch);
    }
    if p.is_zero() {
        let zero = QPoly::zero(Rationals, &out_vars);
        let one = QPoly::one(Rationals, &out_vars);
        return Ok((zero, one));
    }
    let du = p.degree_in(0).max(0) as u32;
    let dv = p.degree_in(1).max(0) as u32;
    let powers = |q: &QPoly, top: u32| -> Vec<QPoly> {
        let mut v = Vec::with_capacity(top as usize + 1);
        v.push(QPoly::one(Rationals, &out_vars));
        for _ in 1..=top {
            let last = v.last().unwrap().clone();
            v.push(last.mul(q).unwrap());
        }
        v
    };
    let un = powers(&subs[0].num, du);
    let ud = powers(&subs[0].den, du);
    let vn = powers(&subs[1].num, dv);
    let vd = powers(&subs[1].den, dv);
    let mut acc = QPoly::zero(Rationals, &out_vars);
    for (e, a) in &p.terms {
        let (i, j) = (e.0[0], e.0[1]);
        let t = un[i as usize]
            .mul(&ud[(du - i) as usize])?
            .mul(&vn[j as usize])?
            .mul(&vd[(dv - j) as usize])?
            .mul_scalar(a);
        acc = acc.add(&t)?;
    }
    let den = ud[du as usize].mul(&vd[dv as usize])?;
    Ok((acc, den))
}

/// Substitute rational functions for the two variables of `p` and reduce.
pub fn substitute_rat(p: &QPoly, subs: &[RatFunc2; 2]) -> Result<RatFunc2, PolyError> {
    let (num, den) = substitute_rat_parts(p, subs)?;
    RatFunc2::new(num, den)
}

/// Apply `substitute_rat` to numerator and denominator of a rational
/// function. `Err(DivisionError)` when the denominator maps to zero.
pub fn substitute_rat_fn(g: &RatFunc2, subs: &[RatFunc2; 2]) -> Result<RatFunc2, PolyError> {
    let n = substitute_rat(&g.num, subs)?;
    let d = substitute_rat(&g.den, subs)?;
    n.div(&d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(vars: &[&str], s: &str) -> QPoly {
        QPoly::parse(Rationals, vars, s).unwrap()
    }

    #[test]
    fn reduction_and_canonical_denominator() {
        let v = ["x", "y"];
        // (x^2-y^2)/(2x-2y) reduces to (x+y)/2; scalar content moves into
        // the numerator so the denominator is primitive (here: 1).
        let f = RatFunc2::new(q(&v, "x^2-y^2"), q(&v, "2*x-2*y")).unwrap();
        assert_eq!(f.den, q(&v, "1"));
        assert_eq!(f.num, q(&v, "1/2*x+1/2*y"));
        assert_eq!(f, RatFunc2::parse(&v, "x+y", "2").unwrap());
        // Negative-lead denominators are normalized away.
        let g = RatFunc2::new(q(&v, "x"), q(&v, "-y")).unwrap();
        assert_eq!(g.den, q(&v, "y"));
        assert_eq!(g.num, q(&v, "-x"));
    }

    #[test]
    fn arithmetic_follows_field_axioms() {
        let v = ["x", "y"];
        let a = RatFunc2::parse(&v, "x", "y").unwrap();
        let b = RatFunc2::parse(&v, "x+1", "x-1").unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.sub(&b).unwrap(), a);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.div(&b).unwrap(), a);
        assert_eq!(a.pow_i(-2).unwrap(), a.inv().unwrap().mul(&a.inv().unwrap()).unwrap());
        assert!(a.sub(&a).unwrap().is_zero());
        assert!(a.sub(&a).unwrap().is_poly());
    }

    #[test]
    fn substitution_composes_exactly() {
        // p(u, v) = u^2 + v under u = x/y, v = 1/x gives x^3 + y^2 over x y^2.
        let p = q(&["u", "v"], "u^2+v");
        let subs = [
            RatFunc2::parse(&["x", "y"], "x", "y").unwrap(),
            RatFunc2::parse(&["x", "y"], "1", "x").unwrap(),
        ];
        let r = substitute_rat(&p, &subs).unwrap();
        assert_eq!(r, RatFunc2::parse(&["x", "y"], "x^3+y^2", "x*y^2").unwrap());
        // Denominator collapse is reported.
        let g = RatFunc2::parse(&["u", "v"], "1", "u").unwrap();
        let zero_sub = [
            RatFunc2::from_poly(q(&["x", "y"], "0")),
            RatFunc2::from_poly(q(&["x", "y"], "0")),
        ];
        assert_eq!(substitute_rat_fn(&g, &zero_sub), Err(PolyError::DivisionError));
    }
}
