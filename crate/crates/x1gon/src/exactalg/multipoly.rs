//! Sparse multivariate polynomials over a generic field, with named
//! variables, graded-lex term order, and a plain-text format.
//!
//! Text format: a sum of terms `c*x^i*y^j` with `*` between factors and `^`
//! for powers; coefficient, exponents, and `*` signs may be omitted where
//! unambiguous (`x^2*y-x*y^2+y-1` parses). Variables are single identifiers.

use super::field::{Field, Rationals};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Exponent vector ordered by graded lexicographic order (total degree
/// first, then lexicographic with earlier variables weighing more).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exps(pub Vec<u32>);

impl Exps {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exps {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exps {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse multivariate polynomial. Terms are kept in a map ordered by
/// graded-lex exponent; zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct MultiPoly<F: Field> {
    pub field: F,
    pub vars: Arc<Vec<String>>,
    pub terms: BTreeMap<Exps, F::Elem>,
}

impl<F: Field> PartialEq for MultiPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.terms == other.terms
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyError {
    /// Exact division failed or a divisor was zero.
    DivisionError,
    /// Operands live over different variable sets or fields.
    FieldMismatch,
    /// A parse error in the text format.
    Parse(String),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::DivisionError => write!(f, "DivisionError"),
            PolyError::FieldMismatch => write!(f, "FieldMismatch"),
            PolyError::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl std::error::Error for PolyError {}

impl<F: Field> MultiPoly<F> {
    pub fn zero(field: F, vars: &[&str]) -> Self {
        MultiPoly {
            field,
            vars: Arc::new(vars.iter().map(|s| s.to_string()).collect()),
            terms: BTreeMap::new(),
        }
    }

    pub fn zero_with(field: F, vars: Arc<Vec<String>>) -> Self {
        MultiPoly {
            field,
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: F, vars: &[&str], c: F::Elem) -> Self {
        let mut p = Self::zero(field, vars);
        if !p.field.is_zero(&c) {
            p.terms.insert(Exps(vec![0; p.vars.len()]), c);
        }
        p
    }

    pub fn one(field: F, vars: &[&str]) -> Self {
        let c = field.one();
        Self::constant(field, vars, c)
    }

    /// The `i`-th variable as a polynomial.
    pub fn var(field: F, vars: &[&str], i: usize) -> Self {
        let mut p = Self::zero(field, vars);
        let mut e = vec![0; p.vars.len()];
        e[i] = 1;
        p.terms.insert(Exps(e), p.field.one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn insert_term(&mut self, e: Vec<u32>, c: F::Elem) {
        assert_eq!(e.len(), self.vars.len());
        if self.field.is_zero(&c) {
            return;
        }
        let key = Exps(e);
        let cur = self.terms.remove(&key);
        let newc = match cur {
            Some(old) => self.field.add(&old, &c),
            None => c,
        };
        if !self.field.is_zero(&newc) {
            self.terms.insert(key, newc);
        }
    }

    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(|e| e.total() as i64).max().unwrap_or(-1)
    }

    pub fn degree_in(&self, var: usize) -> i64 {
        self.terms
            .keys()
            .map(|e| e.0[var] as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Leading term under graded-lex.
    pub fn leading(&self) -> Option<(&Exps, &F::Elem)> {
        self.terms.iter().next_back()
    }

    fn check_compat(&self, other: &Self) -> Result<(), PolyError> {
        if self.vars != other.vars && *self.vars != *other.vars {
            return Err(PolyError::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.0.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for (_, c) in out.terms.iter_mut() {
            *c = self.field.neg(c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        let mut out = Self::zero_with(self.field.clone(), self.vars.clone());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.0.iter().zip(&e2.0).map(|(a, b)| a + b).collect();
                out.insert_term(e, self.field.mul(c1, c2));
            }
        }
        Ok(out)
    }

    pub fn mul_scalar(&self, c: &F::Elem) -> Self {
        let mut out = Self::zero_with(self.field.clone(), self.vars.clone());
        for (e, v) in &self.terms {
            out.insert_term(e.0.clone(), self.field.mul(v, c));
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = {
            let mut p = Self::zero_with(self.field.clone(), self.vars.clone());
            p.insert_term(vec![0; self.vars.len()], self.field.one());
            p
        };
        for _ in 0..n {
            acc = acc.mul(self).unwrap();
        }
        acc
    }

    /// Exact multivariate division: errors unless the remainder is zero.
    pub fn exact_div(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        if other.is_zero() {
            return Err(PolyError::DivisionError);
        }
        let mut rem = self.clone();
        let mut quo = Self::zero_with(self.field.clone(), self.vars.clone());
        let (dl_e, dl_c) = {
            let (e, c) = other.leading().unwrap();
            (e.clone(), c.clone())
        };
        let dl_inv = self.field.inv(&dl_c).ok_or(PolyError::DivisionError)?;
        while !rem.is_zero() {
            let (rl_e, rl_c) = {
                let (e, c) = rem.leading().unwrap();
                (e.clone(), c.clone())
            };
            // Leading term of the remainder must be divisible by the
            // divisor's leading term.
            let mut diff = Vec::with_capacity(rl_e.0.len());
            for (a, b) in rl_e.0.iter().zip(&dl_e.0) {
                if a < b {
                    return Err(PolyError::DivisionError);
                }
                diff.push(a - b);
            }
            let qc = self.field.mul(&rl_c, &dl_inv);
            let mut t = Self::zero_with(self.field.clone(), self.vars.clone());
            t.insert_term(diff, qc);
            quo = quo.add(&t).unwrap();
            rem = rem.sub(&t.mul(other).unwrap()).unwrap();
        }
        Ok(quo)
    }

    /// Evaluate at a full point.
    pub fn eval(&self, point: &[F::Elem]) -> F::Elem {
        assert_eq!(point.len(), self.vars.len());
        let f = &self.field;
        let mut acc = f.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    t = f.mul(&t, &f.pow(&point[i], k as u64));
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// Substitute polynomials for every variable.
    pub fn substitute(&self, values: &[Self]) -> Result<Self, PolyError> {
        assert_eq!(values.len(), self.vars.len());
        let template = values
            .first()
            .cloned()
            .unwrap_or_else(|| Self::zero_with(self.field.clone(), self.vars.clone()));
        let mut acc = Self::zero_with(template.field.clone(), template.vars.clone());
        for (e, c) in &self.terms {
            let mut t = Self::constant(
                template.field.clone(),
                &template.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                c.clone(),
            );
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&values[i].pow(k))?;
                }
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// Map coefficients into another field (e.g. reduce mod p).
    pub fn map_coeffs<G: Field>(
        &self,
        target: G,
        f: impl Fn(&F::Elem) -> G::Elem,
    ) -> MultiPoly<G> {
        let mut out = MultiPoly::zero_with(target, self.vars.clone());
        for (e, c) in &self.terms {
            out.insert_term(e.0.clone(), f(c));
        }
        out
    }

    /// Render in the text format, terms in descending graded-lex order.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let cs = self.field.format(c);
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else if neg {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let mut factors: Vec<String> = vec![];
            for (i, &k) in e.0.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], k)),
                }
            }
            if factors.is_empty() {
                s.push_str(&mag);
            } else if mag == "1" {
                s.push_str(&factors.join("*"));
            } else {
                s.push_str(&mag);
                s.push('*');
                s.push_str(&factors.join("*"));
            }
        }
        s
    }

    /// Parse the text format with respect to a fixed variable list.
    pub fn parse(field: F, vars: &[&str], input: &str) -> Result<Self, PolyError>
    where
        F: ScalarParse,
    {
        let mut out = Self::zero(field.clone(), vars);
        let names: Vec<&str> = vars.to_vec();
        let cleaned: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(PolyError::Parse("empty input".into()));
        }
        // Split into signed terms at top level.
        let bytes = cleaned.as_bytes();
        let mut idx = 0usize;
        let mut sign = 1i64;
        if bytes[0] == b'+' {
            idx = 1;
        } else if bytes[0] == b'-' {
            sign = -1;
            idx = 1;
        }
        let mut start = idx;
        let mut pieces: Vec<(i64, String)> = vec![];
        let mut i = idx;
        while i <= bytes.len() {
            if i == bytes.len() || bytes[i] == b'+' || bytes[i] == b'-' {
                // '^-'? exponents are nonnegative here, and 'e-' notation is
                // not part of the format, so +/- always separates terms.
                if i > start {
                    pieces.push((sign, cleaned[start..i].to_string()));
                }
                if i < bytes.len() {
                    sign = if bytes[i] == b'-' { -1 } else { 1 };
                    start = i + 1;
                }
            }
            i += 1;
        }
        if pieces.is_empty() {
            return Err(PolyError::Parse("no terms".into()));
        }
        for (sg, term) in pieces {
            let (e, c) = parse_term::<F>(&field, &names, &term)?;
            let c = if sg < 0 { field.neg(&c) } else { c };
            out.insert_term(e, c);
        }
        Ok(out)
    }
}

/// Fields whose scalars can be read from the text format.
pub trait ScalarParse: Field {
    fn parse_scalar(&self, s: &str) -> Option<Self::Elem>;
}

impl ScalarParse for Rationals {
    fn parse_scalar(&self, s: &str) -> Option<BigRational> {
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        } else {
            let n: BigInt = s.parse().ok()?;
            Some(BigRational::from_integer(n))
        }
    }
}

impl ScalarParse for super::field::PrimeField {
    fn parse_scalar(&self, s: &str) -> Option<u64> {
        let n: i64 = s.parse().ok()?;
        Some(self.from_i64(n))
    }
}

fn parse_term<F: ScalarParse>(
    field: &F,
    names: &[&str],
    term: &str,
) -> Result<(Vec<u32>, F::Elem), PolyError> {
    let mut exps = vec![0u32; names.len()];
    let mut coeff = field.one();
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(PolyError::Parse(format!("empty factor in `{term}`")));
        }
        let (base, pow) = match factor.split_once('^') {
            Some((b, p)) => {
                let k: u32 = p
                    .parse()
                    .map_err(|_| PolyError::Parse(format!("bad exponent in `{factor}`")))?;
                (b, k)
            }
            None => (factor, 1),
        };
        if let Some(vi) = names.iter().position(|n| *n == base) {
            exps[vi] += pow;
        } else if let Some(c) = field.parse_scalar(base) {
            let mut c = c;
            // A numeric factor with an exponent (unusual but harmless).
            if pow != 1 {
                c = field.pow(&c, pow as u64);
            }
            coeff = field.mul(&coeff, &c);
        } else {
            return Err(PolyError::Parse(format!("unknown factor `{base}`")));
        }
    }
    Ok((exps, coeff))
}

// --------------------------------------------------------------------------
// Content / primitive part / gcd.
// --------------------------------------------------------------------------

impl MultiPoly<Rationals> {
    /// The scalar `c` with `self = c * primitive_part(self)`: the rational
    /// content signed so that the primitive part has positive leading
    /// coefficient under graded-lex. Zero polynomial has content 0.
    pub fn content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = num_integer::Integer::lcm(&den, c.denom());
        }
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            let int = (c * BigRational::from_integer(den.clone())).to_integer();
            num = num_integer::Integer::gcd(&num, &int);
        }
        let lead = self.leading().unwrap().1;
        if lead.is_negative() {
            num = -num;
        }
        BigRational::new(num, den)
    }

    /// `self / content(self)`: integer coefficients with gcd 1 and positive
    /// graded-lex leading coefficient.
    pub fn primitive_part(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let c = self.content();
        let ci = c.recip();
        Ok(self.mul_scalar(&ci))
    }

    /// Multivariate gcd by recursion on the last variable with primitive
    /// polynomial remainder sequences. Result is primitive with positive
    /// graded-lex leading coefficient (or zero).
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        if self.num_vars() == 0 {
            return Ok(Self::one(
                Rationals,
                &self.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            ));
        }
        let g = gcd_rec(self, other)?;
        g.primitive_part()
    }
}

/// Coefficients of `p` as a polynomial in its last variable; each entry has
/// the same variable list with the last exponent zeroed.
fn coeffs_in_last(p: &MultiPoly<Rationals>) -> Vec<MultiPoly<Rationals>> {
    let n = p.num_vars();
    let d = p.degree_in(n - 1);
    let mut out =
        vec![MultiPoly::zero_with(Rationals, p.vars.clone()); (d + 1).max(0) as usize];
    for (e, c) in &p.terms {
        let k = e.0[n - 1] as usize;
        let mut e2 = e.0.clone();
        e2[n - 1] = 0;
        out[k].insert_term(e2, c.clone());
    }
    out
}


/// gcd of all coefficients (a polynomial in the remaining variables).
fn content_in_last(p: &MultiPoly<Rationals>) -> Result<MultiPoly<Rationals>, PolyError> {
    let coeffs = coeffs_in_last(p);
    let mut acc = MultiPoly::zero_with(Rationals, p.vars.clone());
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        acc = if acc.is_zero() { c } else { acc.gcd(&c)? };
        if acc.total_degree() == 0 {
            break;
        }
    }
    Ok(acc)
}

fn gcd_rec(
    a: &MultiPoly<Rationals>,
    b: &MultiPoly<Rationals>,
) -> Result<MultiPoly<Rationals>, PolyError> {
    let n = a.num_vars();
    let da = a.degree_in(n - 1);
    let db = b.degree_in(n - 1);
    if da < 0 || db < 0 {
        unreachable!("zero handled by caller");
    }
    if da == 0 && db == 0 {
        // Both free of the last variable: recurse structurally on fewer
        // variables by treating the next variable as "last".
        return gcd_fewer_vars(a, b);
    }
    let ca = content_in_last(a)?;
    let cb = content_in_last(b)?;
    let content_gcd = ca.gcd(&cb)?;
    let mut f = a.exact_div(&ca)?;
    let mut g = b.exact_div(&cb)?;
    if f.degree_in(n - 1) < g.degree_in(n - 1) {
        std::mem::swap(&mut f, &mut g);
    }
    // Primitive PRS in the last variable.
    loop {
        if g.is_zero() {
            let pf = f.exact_div(&content_in_last(&f)?)?;
            return content_gcd.mul(&pf);
        }
        let r = pseudo_rem_last(&f, &g)?;
        f = g;
        g = if r.is_zero() {
            r
        } else {
            r.exact_div(&content_in_last(&r)?)?
        };
        if f.degree_in(n - 1) == 0 {
            // Coprime in the last variable.
            return Ok(content_gcd);
        }
    }
}

/// gcd when neither input involves the last variable: drop it temporarily.
fn gcd_fewer_vars(
    a: &MultiPoly<Rationals>,
    b: &MultiPoly<Rationals>,
) -> Result<MultiPoly<Rationals>, PolyError> {
    let n = a.num_vars();
    if n == 1 {
        // Constants in the only variable: gcd of scalars is 1 (content is
        // handled by the caller's primitive_part).
        let vars: Vec<&str> = a.vars.iter().map(|s| s.as_str()).collect();
        return Ok(MultiPoly::one(Rationals, &vars));
    }
    let drop = |p: &MultiPoly<Rationals>| {
        let vars: Vec<String> = p.vars[..n - 1].to_vec();
        let mut out = MultiPoly::zero_with(Rationals, Arc::new(vars));
        for (e, c) in &p.terms {
            out.insert_term(e.0[..n - 1].to_vec(), c.clone());
        }
        out
    };
    let ad = drop(a);
    let bd = drop(b);
    let g = ad.gcd(&bd)?;
    let mut out = MultiPoly::zero_with(Rationals, a.vars.clone());
    for (e, c) in &g.terms {
        let mut e2 = e.0.clone();
        e2.push(0);
        out.insert_term(e2, c.clone());
    }
    Ok(out)
}

/// Pseudo-remainder of `f` by `g` in the last variable:
/// `lc(g)^(df−dg+1) * f  mod  g`.
fn pseudo_rem_last(
    f: &MultiPoly<Rationals>,
    g: &MultiPoly<Rationals>,
) -> Result<MultiPoly<Rationals>, PolyError> {
    let n = f.num_vars();
    let dg = g.degree_in(n - 1);
    let gc = coeffs_in_last(g);
    let glc = gc[dg as usize].clone();
    let mut r = f.clone();
    while !r.is_zero() && r.degree_in(n - 1) >= dg {
        let dr = r.degree_in(n - 1);
        let rc = coeffs_in_last(&r);
        let rlc = rc[dr as usize].clone();
        // r ← lc(g)·r − lc(r)·x^(dr−dg)·g
        let mut shift_g = MultiPoly::zero_with(Rationals, g.vars.clone());
        for (e, c) in &g.terms {
            let mut e2 = e.0.clone();
            e2[n - 1] += (dr - dg) as u32;
            shift_g.insert_term(e2, c.clone());
        }
        r = glc.mul(&r)?.sub(&rlc.mul(&shift_g)?)?;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qparse(vars: &[&str], s: &str) -> MultiPoly<Rationals> {
        MultiPoly::parse(Rationals, vars, s).unwrap()
    }

    #[test]
    fn parse_and_render_round_trip() {
        let p = qparse(&["x", "y"], "x^2*y-x*y^2+y-1");
        assert_eq!(p.terms.len(), 4);
        let r = p.render();
        let p2 = qparse(&["x", "y"], &r);
        assert_eq!(p, p2);
        // Rendering uses descending graded-lex with signs folded in.
        assert_eq!(r, "x^2*y - x*y^2 + y - 1");
    }

    #[test]
    fn parse_coefficients_and_fractions() {
        let p = qparse(&["b", "c"], "16*b^2 + b - 20*c*b - 8*c^2*b + c^4 - 3/2*c");
        assert_eq!(p.degree_in(0), 2);
        assert_eq!(p.degree_in(1), 4);
        let q = Rationals;
        // Coefficient of c: −3/2.
        let mut e = vec![0, 1];
        let c = p.terms.get(&Exps(e.clone())).unwrap();
        assert_eq!(*c, q.neg(&BigRational::new(BigInt::from(3), BigInt::from(2))));
        e[1] = 0;
        assert!(p.terms.get(&Exps(e)).is_none());
    }

    #[test]
    fn parse_rejects_unknowns() {
        assert!(MultiPoly::parse(Rationals, &["x"], "x + z").is_err());
        assert!(MultiPoly::parse(Rationals, &["x"], "").is_err());
    }

    #[test]
    fn arithmetic_ring_axioms_spot() {
        let vars = ["x", "y"];
        let a = qparse(&vars, "x^2 - y");
        let b = qparse(&vars, "x + 3*y");
        let c = qparse(&vars, "2*x*y - 1");
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(a.sub(&a).unwrap().is_zero(), true);
    }

    #[test]
    fn exact_div_succeeds_and_fails() {
        let vars = ["x", "y"];
        let a = qparse(&vars, "x^2 - y^2");
        let b = qparse(&vars, "x - y");
        let q = a.exact_div(&b).unwrap();
        assert_eq!(q, qparse(&vars, "x + y"));
        let bad = qparse(&vars, "x - 2*y");
        assert_eq!(a.exact_div(&bad), Err(PolyError::DivisionError));
        assert_eq!(
            a.exact_div(&MultiPoly::zero(Rationals, &vars)),
            Err(PolyError::DivisionError)
        );
    }

    #[test]
    fn mismatched_variables_error() {
        let a = qparse(&["x", "y"], "x");
        let b = qparse(&["x", "z"], "x");
        assert_eq!(a.add(&b), Err(PolyError::FieldMismatch));
    }

    #[test]
    fn content_and_primitive_part() {
        let p = qparse(&["x", "y"], "4*x^2 - 6*y");
        assert_eq!(p.content(), BigRational::from_integer(BigInt::from(2)));
        let pp = p.primitive_part().unwrap();
        assert_eq!(pp, qparse(&["x", "y"], "2*x^2 - 3*y"));
        // Negative leading coefficient flips.
        let m = qparse(&["x", "y"], "-2*x^2 + 4*y");
        assert_eq!(m.content(), BigRational::from_integer(BigInt::from(-2)));
        assert_eq!(m.primitive_part().unwrap(), qparse(&["x", "y"], "x^2 - 2*y"));
        // Fractions clear.
        let f = qparse(&["x", "y"], "1/2*x + 3/4");
        assert_eq!(f.content(), BigRational::new(BigInt::from(1), BigInt::from(4)));
        assert_eq!(f.primitive_part().unwrap(), qparse(&["x", "y"], "2*x + 3"));
    }

    #[test]
    fn gcd_bivariate() {
        let vars = ["x", "y"];
        let g = qparse(&vars, "x + y - 1");
        let a = g.mul(&qparse(&vars, "x^2 - y")).unwrap();
        let b = g.mul(&qparse(&vars, "y^2 + x + 2")).unwrap();
        let got = a.gcd(&b).unwrap();
        assert_eq!(got, g);
        // Coprime inputs give 1.
        let one = qparse(&vars, "1");
        assert_eq!(
            qparse(&vars, "x").gcd(&qparse(&vars, "y")).unwrap(),
            one
        );
    }

    #[test]
    fn gcd_with_powers_and_scalars() {
        let vars = ["x", "y"];
        let g = qparse(&vars, "x - y");
        let a = g.pow(3).mul(&qparse(&vars, "2")).unwrap();
        let b = g.pow(2).mul(&qparse(&vars, "x + 1")).unwrap();
        let got = a.gcd(&b).unwrap();
        assert_eq!(got, g.pow(2));
    }

    #[test]
    fn graded_lex_leading_terms() {
        let p = qparse(&["x", "y"], "x^2*y - x*y^2 + y - 1");
        // Same total degree 3: x^2*y beats x*y^2 (lex on x first).
        let (e, _) = p.leading().unwrap();
        assert_eq!(e.0, vec![2, 1]);
        let q = qparse(&["b", "c"], "b^2 - b*c - c^3");
        let (e, c) = q.leading().unwrap();
        assert_eq!(e.0, vec![0, 3]); // c^3 has top total degree
        assert_eq!(*c, Rationals.from_i64(-1));
    }

    #[test]
    fn substitution_composes() {
        let vars = ["x", "y"];
        let p = qparse(&vars, "x^2 + y");
        let xv = qparse(&vars, "x + y");
        let yv = qparse(&vars, "x*y");
        let got = p.substitute(&[xv, yv]).unwrap();
        assert_eq!(got, qparse(&vars, "x^2 + 2*x*y + y^2 + x*y"));
    }

    #[test]
    fn eval_at_points() {
        let p = qparse(&["x", "y"], "x^2*y - 3");
        let q = Rationals;
        let v = p.eval(&[q.from_i64(2), q.from_i64(5)]);
        assert_eq!(v, q.from_i64(17));
    }
}
