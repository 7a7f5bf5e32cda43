//! Exact arithmetic foundation: arbitrary-precision rationals, prime fields
//! and their extensions, sparse multivariate polynomials, univariate
//! factorization, and integer matrix normal forms.
//!
//! All values are immutable after construction and operations are pure
//! functions, so everything here is safe to share across threads.

pub mod factor;
pub mod field;
pub mod multipoly;
pub mod snf;
pub mod tower;
pub mod upoly;

pub use factor::{factor, FactorField, Factorization};
pub use field::{is_prime_u64, next_prime_u64, Field, PrimeField, Rationals};
pub use multipoly::{Exps, MultiPoly, PolyError, ScalarParse};
pub use snf::{determinant, elementary_divisors, mat_mul, smith_normal_form, IntMatrix};
pub use tower::{LevelView, TElem, Tower};
pub use upoly::UPoly;

use std::fmt;

/// Binary/unary polynomial operations exposed through [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Mul,
    ExactDiv,
    Gcd,
    Content,
    PrimitivePart,
}

/// Single entry point for rational polynomial arithmetic. `Content` and
/// `PrimitivePart` are unary and ignore `b`; `Content` returns a constant
/// polynomial.
pub fn poly_arith(
    a: &MultiPoly<Rationals>,
    b: &MultiPoly<Rationals>,
    op: PolyOp,
) -> Result<MultiPoly<Rationals>, PolyError> {
    match op {
        PolyOp::Add => a.add(b),
        PolyOp::Mul => a.mul(b),
        PolyOp::ExactDiv => a.exact_div(b),
        PolyOp::Gcd => a.gcd(b),
        PolyOp::Content => {
            let c = a.content();
            let mut out = MultiPoly::zero_with(Rationals, a.vars.clone());
            out.insert_term(vec![0; a.num_vars()], c);
            Ok(out)
        }
        PolyOp::PrimitivePart => a.primitive_part(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactError {
    /// Factorization of the zero polynomial was requested.
    ZeroPolynomial,
    /// The input involves more than one variable.
    NotUnivariate,
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::ZeroPolynomial => write!(f, "ZeroPolynomial"),
            ExactError::NotUnivariate => write!(f, "NotUnivariate"),
        }
    }
}

impl std::error::Error for ExactError {}

/// Factor a univariate polynomial (presented as a [`MultiPoly`] that uses at
/// most one variable) into monic irreducibles with multiplicities, together
/// with the leading unit. The product of `unit` and the factor powers equals
/// the input exactly.
pub fn factor_univariate<F: FactorField>(
    f: &MultiPoly<F>,
) -> Result<(F::Elem, Vec<(MultiPoly<F>, usize)>), ExactError> {
    if f.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    // Identify which variable (if any) is used.
    let mut used: Option<usize> = None;
    for e in f.terms.keys() {
        for (i, &k) in e.0.iter().enumerate() {
            if k > 0 {
                match used {
                    None => used = Some(i),
                    Some(j) if j == i => {}
                    Some(_) => return Err(ExactError::NotUnivariate),
                }
            }
        }
    }
    let var = used.unwrap_or(0);
    let deg = f.degree_in(var).max(0) as usize;
    let mut coeffs = vec![f.field.zero(); deg + 1];
    for (e, c) in &f.terms {
        coeffs[e.0[var] as usize] = c.clone();
    }
    let up: UPoly<F> = upoly::normalize(&f.field, coeffs);
    let fac = factor(&f.field, &up);
    let unit = fac.unit.clone();
    let n = f.num_vars();
    let back = |p: &UPoly<F>| -> MultiPoly<F> {
        let mut out = MultiPoly::zero_with(f.field.clone(), f.vars.clone());
        for (k, c) in p.iter().enumerate() {
            let mut e = vec![0u32; n];
            e[var] = k as u32;
            out.insert_term(e, c.clone());
        }
        out
    };
    Ok((unit, fac.factors.iter().map(|(p, m)| (back(p), *m)).collect()))
}
