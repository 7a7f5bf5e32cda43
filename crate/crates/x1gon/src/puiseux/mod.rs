//! Places of plane curves via rational Puiseux-style expansions.
//!
//! Given a squarefree bivariate polynomial `f(x, y)` over ℚ or a finite
//! field, this module enumerates the places of (the smooth model of) the
//! curve `f = 0` lying above any point of the x-line — finite values, values
//! in extensions given by their minimal polynomial, or infinity — and
//! computes exact valuations of rational functions at those places.
//!
//! Expansions are *rational* in Duval's sense: conjugate branches are never
//! split individually; each returned [`Place`] carries its residue field as
//! an explicit extension tower and represents a full Galois orbit of
//! branches over the base field. Parametrizations take the shape
//! `x = x0 + λ·t^e` (or `x = λ·t^{-e}` above infinity) with `y(t)` a Laurent
//! series; series are refined lazily until every requested valuation is
//! certain.

pub mod series;

use crate::exactalg::{factor, upoly, FactorField, Field, MultiPoly, TElem, Tower, UPoly};
use series::{LSeries, SOrd};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PuiseuxError {
    /// Ramification index divisible by the characteristic; the expansion
    /// cannot proceed over this field (callers switch primes).
    WildRamification,
    /// The curve polynomial has a repeated factor in `y` (or the expansion
    /// failed to terminate, which indicates the same defect).
    NotSquarefree,
    /// The rational function restricts to 0 (or ∞) identically on the curve.
    NotAFunction,
    /// The input is not a usable curve for place enumeration (wrong number
    /// of variables, no `y`-degree, vertical-line component through the
    /// requested center, or a reducible center polynomial).
    InvalidCurve,
}

impl fmt::Display for PuiseuxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PuiseuxError::WildRamification => "WildRamification",
            PuiseuxError::NotSquarefree => "NotSquarefree",
            PuiseuxError::NotAFunction => "NotAFunction",
            PuiseuxError::InvalidCurve => "InvalidCurve",
        };
        write!(f, "{s}")
    }
}

impl std::error::Error for PuiseuxError {}

/// A point of the projective x-line over the base field.
#[derive(Clone, Debug)]
pub enum Center<F: Field> {
    /// A base-field value.
    Rational(F::Elem),
    /// A closed point given by its monic irreducible minimal polynomial.
    Algebraic(UPoly<F>),
    /// The point at infinity.
    Infinity,
}

/// Sparse local model of a curve germ: exponent `(i, j)` of `x^i y^j` maps
/// to a coefficient in the current extension tower.
type Germ<E> = BTreeMap<(u32, u32), E>;

#[derive(Clone, Debug)]
struct PStep<E: Clone> {
    q: u32,
    m: u32,
    u: i64,
    v: i64,
    xi: TElem<E>,
    /// Tower level at which `xi` was recorded.
    level: usize,
}

/// One place of the curve over the base field.
///
/// Cloning is cheap relative to recomputation and gives an independent
/// series cache; clone per task when sharing across threads.
#[derive(Clone, Debug)]
pub struct Place<F: FactorField> {
    tower: Tower<F>,
    pub center: Center<F>,
    center_root: TElem<F::Elem>,
    center_level: usize,
    center_degree: usize,
    x_inverted: bool,
    y_inverted: bool,
    y_shift: TElem<F::Elem>,
    y_shift_level: usize,
    steps: Vec<PStep<F::Elem>>,
    /// Regular germ solved by Newton iteration; `None` when the remaining
    /// branch is exactly `y = 0` (the series terminates).
    germ: Option<Germ<TElem<F::Elem>>>,
    e: usize,
    lambda: TElem<F::Elem>,
    cache: RefCell<Option<(usize, LSeries<TElem<F::Elem>>, LSeries<TElem<F::Elem>>)>>,
}

/// A validated curve: squarefree in `y`, positive `y`-degree, two variables.
#[derive(Clone, Debug)]
pub struct Curve<F: FactorField> {
    pub f: MultiPoly<F>,
    pub deg_x: usize,
    pub deg_y: usize,
}

// ---------------------------------------------------------------------------
// Germ helpers (generic over the working tower W = Tower<F>).
// ---------------------------------------------------------------------------

fn germ_insert<W: Field>(w: &W, g: &mut Germ<W::Elem>, key: (u32, u32), c: W::Elem) {
    if w.is_zero(&c) {
        return;
    }
    match g.remove(&key) {
        Some(old) => {
            let s = w.add(&old, &c);
            if !w.is_zero(&s) {
                g.insert(key, s);
            }
        }
        None => {
            g.insert(key, c);
        }
    }
}

fn germ_coeff<W: Field>(w: &W, g: &Germ<W::Elem>, key: (u32, u32)) -> W::Elem {
    g.get(&key).cloned().unwrap_or_else(|| w.zero())
}

fn germ_deg_y<E>(g: &Germ<E>) -> u32 {
    g.keys().map(|&(_, j)| j).max().unwrap_or(0)
}

/// Powers `(a + Y)^j` for `j = 0..=maxj`, as coefficient vectors in `Y`.
fn shifted_powers<W: Field>(w: &W, a: &W::Elem, maxj: u32) -> Vec<Vec<W::Elem>> {
    let mut pows: Vec<Vec<W::Elem>> = vec![vec![w.one()]];
    for j in 1..=maxj {
        let prev = &pows[(j - 1) as usize];
        let mut next = vec![w.zero(); prev.len() + 1];
        for (r, c) in prev.iter().enumerate() {
            // * (a + Y)
            let t = w.mul(c, a);
            next[r] = w.add(&next[r], &t);
            next[r + 1] = w.add(&next[r + 1], c);
        }
        pows.push(next);
    }
    pows
}

/// `f(x, y + eta)`.
fn germ_shift_y<W: Field>(w: &W, g: &Germ<W::Elem>, eta: &W::Elem) -> Germ<W::Elem> {
    if w.is_zero(eta) {
        return g.clone();
    }
    let pows = shifted_powers(w, eta, germ_deg_y(g));
    let mut out = Germ::new();
    for (&(i, j), c) in g {
        for (r, b) in pows[j as usize].iter().enumerate() {
            germ_insert(w, &mut out, (i, r as u32), w.mul(c, b));
        }
    }
    out
}

/// `f(x + xc, y)`.
fn germ_shift_x<W: Field>(w: &W, g: &Germ<W::Elem>, xc: &W::Elem) -> Germ<W::Elem> {
    if w.is_zero(xc) {
        return g.clone();
    }
    let maxi = g.keys().map(|&(i, _)| i).max().unwrap_or(0);
    let pows = shifted_powers(w, xc, maxi);
    let mut out = Germ::new();
    for (&(i, j), c) in g {
        for (r, b) in pows[i as usize].iter().enumerate() {
            germ_insert(w, &mut out, (r as u32, j), w.mul(c, b));
        }
    }
    out
}

/// Reverse the `y`-exponents: `w^d · f(x, 1/w)` with `d = deg_y`.
fn germ_reverse_y<E: Clone>(g: &Germ<E>) -> Germ<E> {
    let d = germ_deg_y(g);
    g.iter().map(|(&(i, j), c)| ((i, d - j), c.clone())).collect()
}

fn signed_pow<W: Field>(w: &W, a: &W::Elem, n: i64) -> W::Elem {
    if n >= 0 {
        w.pow(a, n as u64)
    } else {
        let p = w.pow(a, (-n) as u64);
        w.inv(&p).expect("invertible element expected in expansion step")
    }
}

/// Newton-polygon edges with strictly negative slope `-m/q`, as
/// `(q, m, j_lo, j_hi, c)` where `c = q·i + m·j` on the edge.
fn polygon_edges<E>(g: &Germ<E>) -> Vec<(u32, u32, u32, u32, i64)> {
    let mut imin: BTreeMap<u32, u32> = BTreeMap::new();
    for &(i, j) in g.keys() {
        imin.entry(j)
            .and_modify(|v| {
                if i < *v {
                    *v = i;
                }
            })
            .or_insert(i);
    }
    let pts: Vec<(i64, i64)> = imin.iter().map(|(&j, &i)| (j as i64, i as i64)).collect();
    // Lower convex hull in (j, i).
    let mut hull: Vec<(i64, i64)> = vec![];
    for p in pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut edges = vec![];
    for win in hull.windows(2) {
        let (ja, ia) = win[0];
        let (jb, ib) = win[1];
        if ib >= ia {
            continue; // slope >= 0: no branch through the origin
        }
        let dj = jb - ja;
        let di = ia - ib;
        let g = num_integer::Integer::gcd(&dj, &di);
        let q = (dj / g) as u32;
        let m = (di / g) as u32;
        let c = q as i64 * ia + m as i64 * ja;
        edges.push((q, m, ja as u32, jb as u32, c));
    }
    edges
}

fn egcd_i64(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd_i64(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Substitute `x = xi^v X^q`, `y = X^m (xi^u + Y)` and divide by `X^c`.
fn germ_substitute<W: Field>(
    w: &W,
    g: &Germ<W::Elem>,
    xi: &W::Elem,
    q: u32,
    m: u32,
    u: i64,
    v: i64,
) -> Germ<W::Elem> {
    let xiu = signed_pow(w, xi, u);
    let pows = shifted_powers(w, &xiu, germ_deg_y(g));
    let mut c_min = i64::MAX;
    for &(i, j) in g.keys() {
        c_min = c_min.min(q as i64 * i as i64 + m as i64 * j as i64);
    }
    let mut out = Germ::new();
    for (&(i, j), c) in g {
        let xe = q as i64 * i as i64 + m as i64 * j as i64 - c_min;
        let scaled = w.mul(c, &signed_pow(w, xi, v * i as i64));
        for (r, b) in pows[j as usize].iter().enumerate() {
            germ_insert(w, &mut out, (xe as u32, r as u32), w.mul(&scaled, b));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Branch expansion.
// ---------------------------------------------------------------------------

struct Leaf<F: FactorField> {
    tower: Tower<F>,
    steps: Vec<PStep<F::Elem>>,
    germ: Option<Germ<TElem<F::Elem>>>,
}

const MAX_DEPTH: usize = 512;

fn expand_germ<F: FactorField>(
    tower: &Tower<F>,
    germ: Germ<TElem<F::Elem>>,
    steps: &[PStep<F::Elem>],
    depth: usize,
    out: &mut Vec<Leaf<F>>,
) -> Result<(), PuiseuxError> {
    if depth > MAX_DEPTH {
        // Non-termination indicates a repeated component.
        return Err(PuiseuxError::NotSquarefree);
    }
    let w = tower;
    let mut germ = germ;
    // Strip a `y | F` factor: the current branch head is an exact solution.
    if !germ.is_empty() && germ.keys().all(|&(_, j)| j >= 1) {
        germ = germ.iter().map(|(&(i, j), c)| ((i, j - 1), c.clone())).collect();
        if germ.keys().all(|&(_, j)| j >= 1) {
            return Err(PuiseuxError::NotSquarefree);
        }
        out.push(Leaf {
            tower: tower.clone(),
            steps: steps.to_vec(),
            germ: None,
        });
    }
    if germ.is_empty() {
        return Ok(());
    }
    if !w.is_zero(&germ_coeff(w, &germ, (0, 0))) {
        // No (further) branch through the origin.
        return Ok(());
    }
    if !w.is_zero(&germ_coeff(w, &germ, (0, 1))) {
        // Regular: dF/dy does not vanish at the origin.
        out.push(Leaf {
            tower: tower.clone(),
            steps: steps.to_vec(),
            germ: Some(germ),
        });
        return Ok(());
    }
    let p = w.characteristic();
    for (q, m, ja, jb, c) in polygon_edges(&germ) {
        if p != 0 && q as u64 % p == 0 {
            return Err(PuiseuxError::WildRamification);
        }
        // Characteristic polynomial of the edge.
        let ell = (jb - ja) / q;
        let mut phi: Vec<TElem<F::Elem>> = Vec::with_capacity(ell as usize + 1);
        for k in 0..=ell {
            let j = ja + k * q;
            let i_num = c - m as i64 * j as i64;
            debug_assert!(i_num % q as i64 == 0);
            let i = (i_num / q as i64) as u32;
            phi.push(germ_coeff(w, &germ, (i, j)));
        }
        let phi = upoly::normalize(w, phi);
        let fac = factor(w, &phi);
        let (_, bez_u, bez_v) = egcd_i64(q as i64, m as i64);
        // bez_u*q + bez_v*m = 1, so u*q - v*m = 1 with v = -bez_v.
        let (u, v) = (bez_u, -bez_v);
        for (h, _mult) in &fac.factors {
            let (new_tower, xi, germ_here): (Tower<F>, TElem<F::Elem>, Germ<TElem<F::Elem>>);
            if upoly::deg(w, h) == 1 {
                // Root in the current tower (h is monic: root = -h[0]).
                new_tower = tower.clone();
                xi = w.neg(&h[0]);
                germ_here = germ.clone();
            } else {
                let nt = tower.adjoin(h);
                let lvl = tower.level();
                xi = nt.gen_elem(nt.level());
                germ_here = germ
                    .iter()
                    .map(|(&k, cf)| (k, nt.embed(cf.clone(), lvl)))
                    .collect();
                new_tower = nt;
            }
            let g1 = germ_substitute(&new_tower, &germ_here, &xi, q, m, u, v);
            let mut steps2 = steps.to_vec();
            steps2.push(PStep {
                q,
                m,
                u,
                v,
                xi,
                level: new_tower.level(),
            });
            expand_germ(&new_tower, g1, &steps2, depth + 1, out)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Curve validation and place enumeration.
// ---------------------------------------------------------------------------

impl<F: FactorField> Curve<F> {
    /// Validate a curve polynomial: exactly two variables, positive
    /// `y`-degree, squarefree as a polynomial in `y` over the base field.
    pub fn new(f: &MultiPoly<F>) -> Result<Self, PuiseuxError> {
        if f.num_vars() != 2 {
            return Err(PuiseuxError::InvalidCurve);
        }
        let deg_y = f.degree_in(1);
        if deg_y < 1 {
            return Err(PuiseuxError::InvalidCurve);
        }
        let deg_x = f.degree_in(0).max(0) as usize;
        let deg_y = deg_y as usize;
        squarefree_in_y(f)?;
        Ok(Curve {
            f: f.clone(),
            deg_x,
            deg_y,
        })
    }

    /// All places of the curve above the given point of the x-line,
    /// including places where `y` has a pole (reciprocal chart).
    pub fn places_above(&self, x0: &Center<F>) -> Result<Vec<Place<F>>, PuiseuxError> {
        let base = self.f.field.clone();
        let mut tower = Tower::new(base.clone());
        let mut center_degree = 1usize;
        // Local model with the center moved to x = 0.
        let mut germ0: Germ<TElem<F::Elem>> = self
            .f
            .terms
            .iter()
            .map(|(e, c)| ((e.0[0], e.0[1]), TElem::Base(c.clone())))
            .collect();
        let (center_root, x_inverted) = match x0 {
            Center::Rational(a) => (TElem::Base(a.clone()), false),
            Center::Algebraic(pi) => {
                let pi = match upoly::monic(&base, pi) {
                    Some(p) => p,
                    None => return Err(PuiseuxError::InvalidCurve),
                };
                if upoly::deg(&base, &pi) < 1 {
                    return Err(PuiseuxError::InvalidCurve);
                }
                if upoly::deg(&base, &pi) == 1 {
                    (TElem::Base(base.neg(&pi[0])), false)
                } else {
                    let fac = factor(&base, &pi);
                    if fac.factors.len() != 1 || fac.factors[0].1 != 1 {
                        return Err(PuiseuxError::InvalidCurve);
                    }
                    let lifted: Vec<TElem<F::Elem>> =
                        pi.iter().map(|c| TElem::Base(c.clone())).collect();
                    tower = tower.adjoin(&lifted);
                    center_degree = upoly::deg(&base, &pi) as usize;
                    (tower.gen_elem(1), false)
                }
            }
            Center::Infinity => {
                // x -> 1/x, cleared: exponent reversal in x.
                let dx = self.deg_x as u32;
                germ0 = germ0
                    .iter()
                    .map(|(&(i, j), c)| ((dx - i, j), c.clone()))
                    .collect();
                (TElem::Base(base.zero()), true)
            }
        };
        let center_level = tower.level();
        // Shift so the center is at x = 0 (over the center tower).
        let shifted: Germ<TElem<F::Elem>> = germ_shift_x(&tower, &germ0, &center_root);

        let mut places: Vec<Place<F>> = vec![];

        // Chart A: finite y. Roots of f(0, y) over the center tower.
        let mut g0: Vec<TElem<F::Elem>> = vec![tower.zero(); self.deg_y + 1];
        for (&(i, j), c) in &shifted {
            if i == 0 {
                g0[j as usize] = c.clone();
            }
        }
        let g0 = upoly::normalize(&tower, g0);
        if upoly::deg(&tower, &g0) < 0 {
            // The fiber polynomial vanishes identically: vertical component.
            return Err(PuiseuxError::InvalidCurve);
        }
        let fac = factor(&tower, &g0);
        for (h, _mult) in &fac.factors {
            let (t_h, eta) = if upoly::deg(&tower, h) == 1 {
                (tower.clone(), tower.neg(&h[0]))
            } else {
                let nt = tower.adjoin(h);
                let xi = nt.gen_elem(nt.level());
                (nt, xi)
            };
            let lvl = t_h.level();
            let germ_h: Germ<TElem<F::Elem>> = shifted
                .iter()
                .map(|(&k, c)| (k, t_h.embed(c.clone(), center_level)))
                .collect();
            let germ_h = germ_shift_y(&t_h, &germ_h, &eta);
            let mut leaves = vec![];
            expand_germ(&t_h, germ_h, &[], 0, &mut leaves)?;
            for leaf in leaves {
                places.push(assemble_place(
                    x0.clone(),
                    center_root.clone(),
                    center_level,
                    center_degree,
                    x_inverted,
                    false,
                    eta.clone(),
                    lvl,
                    leaf,
                ));
            }
        }

        // Chart B: y has a pole. Reciprocal chart w = 1/y, branch at w = 0.
        let ginf = germ_reverse_y(&shifted);
        if tower.is_zero(&germ_coeff(&tower, &ginf, (0, 0))) {
            let mut leaves = vec![];
            expand_germ(&tower, ginf, &[], 0, &mut leaves)?;
            for leaf in leaves {
                places.push(assemble_place(
                    x0.clone(),
                    center_root.clone(),
                    center_level,
                    center_degree,
                    x_inverted,
                    true,
                    tower.zero(),
                    center_level,
                    leaf,
                ));
            }
        }
        Ok(places)
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble_place<F: FactorField>(
    center: Center<F>,
    center_root: TElem<F::Elem>,
    center_level: usize,
    center_degree: usize,
    x_inverted: bool,
    y_inverted: bool,
    y_shift: TElem<F::Elem>,
    y_shift_level: usize,
    leaf: Leaf<F>,
) -> Place<F> {
    let w = &leaf.tower;
    // e = prod q_k; lambda = prod xi_k^{v_k * q_1..q_{k-1}} accumulated via
    // mu_{k-1} = xi_k^{v_k} * mu_k^{q_k} walked from the innermost step.
    let mut mu = w.one();
    let mut e: usize = 1;
    for st in leaf.steps.iter().rev() {
        let xi = w.embed(st.xi.clone(), st.level);
        let muq = w.pow(&mu, st.q as u64);
        mu = w.mul(&signed_pow(w, &xi, st.v), &muq);
        e *= st.q as usize;
    }
    Place {
        tower: leaf.tower.clone(),
        center,
        center_root,
        center_level,
        center_degree,
        x_inverted,
        y_inverted,
        y_shift,
        y_shift_level,
        steps: leaf.steps,
        germ: leaf.germ,
        e,
        lambda: mu,
        cache: RefCell::new(None),
    }
}

/// Enumerate places above a point (validates the curve each call; use
/// [`Curve`] directly to amortize validation).
pub fn places_above<F: FactorField>(
    f: &MultiPoly<F>,
    x0: &Center<F>,
) -> Result<Vec<Place<F>>, PuiseuxError> {
    Curve::new(f)?.places_above(x0)
}

/// Σ e·(relative residue degree) over a fiber — should equal `deg_y f`.
pub fn fiber_degree<F: FactorField>(places: &[Place<F>]) -> usize {
    places
        .iter()
        .map(|p| p.ram_index() * p.rel_residue_degree())
        .sum()
}

// ---------------------------------------------------------------------------
// Squarefreeness certificate.
// ---------------------------------------------------------------------------

/// Exact check that `f` is squarefree as a polynomial in `y` over the base:
/// samples `gcd(f(r,·), ∂f/∂y(r,·))` at distinct points `r` drawn from
/// extension towers. One trivial gcd proves squarefreeness; `D+1` nontrivial
/// gcds at distinct points (D bounding `deg_x Res_y(f, f_y)`) prove a
/// repeated factor. The sample budget is capped; the expansion engine's
/// termination guard backstops pathological inputs.
fn squarefree_in_y<F: FactorField>(f: &MultiPoly<F>) -> Result<(), PuiseuxError> {
    let base = f.field.clone();
    let dx = f.degree_in(0).max(0) as u64;
    let dy = f.degree_in(1).max(0) as u64;
    // f_y == 0 (inseparable in y) is wild everywhere.
    let mut fy = MultiPoly::zero_with(base.clone(), f.vars.clone());
    for (e, c) in &f.terms {
        if e.0[1] == 0 {
            continue;
        }
        let mut e2 = e.0.clone();
        e2[1] -= 1;
        let j = base.from_i64(e.0[1] as i64);
        fy.insert_term(e2, base.mul(c, &j));
    }
    if fy.is_zero() {
        return if base.characteristic() == 0 {
            Err(PuiseuxError::InvalidCurve)
        } else {
            Err(PuiseuxError::WildRamification)
        };
    }
    let dbound = dx * (2 * dy).max(1) + 1;
    let budget = 40u64.min(dbound.max(2));

    // Working tower big enough to hold `budget` distinct points: one
    // extension of sufficient degree when the base field is too small.
    let mut tower = Tower::new(base.clone());
    if let Some(sz) = base.order() {
        use num_bigint::BigUint;
        let need = BigUint::from(budget + 2);
        if sz < need {
            let p = base.characteristic();
            let mut k = 1usize;
            let mut size = BigUint::from(p);
            while size < need {
                size *= p;
                k += 1;
            }
            for kk in k..k + 5 {
                if let Some(m) = irreducible_over(&tower, kk) {
                    tower = tower.adjoin(&m);
                    break;
                }
            }
        }
    }
    let mut nontrivial = 0u64;
    for k in 0..budget {
        let r = enumerate_element(&tower, k);
        // Evaluate f and f_y at x = r as univariate polynomials in y.
        let fr = eval_x(&tower, f, &r);
        let fyr = eval_x(&tower, &fy, &r);
        if (upoly::deg(&tower, &fr) as i64) < f.degree_in(1) {
            // Leading coefficient vanished; skip inconclusive sample.
            nontrivial += 1;
            continue;
        }
        let g = upoly::gcd(&tower, &fr, &fyr);
        if upoly::deg(&tower, &g) <= 0 {
            return Ok(());
        }
        nontrivial += 1;
    }
    if nontrivial > 0 {
        return Err(PuiseuxError::NotSquarefree);
    }
    Ok(())
}

fn eval_x<F: FactorField>(
    tower: &Tower<F>,
    f: &MultiPoly<F>,
    r: &TElem<F::Elem>,
) -> Vec<TElem<F::Elem>> {
    let dy = f.degree_in(1).max(0) as usize;
    let mut rows: Vec<Vec<(u32, TElem<F::Elem>)>> = vec![vec![]; dy + 1];
    for (e, c) in &f.terms {
        rows[e.0[1] as usize].push((e.0[0], TElem::Base(c.clone())));
    }
    let mut out = vec![tower.zero(); dy + 1];
    for (j, row) in rows.iter().enumerate() {
        let mut acc = tower.zero();
        for (i, c) in row {
            let t = tower.mul(c, &tower.pow(r, *i as u64));
            acc = tower.add(&acc, &t);
        }
        out[j] = acc;
    }
    upoly::normalize(tower, out)
}

/// Deterministic enumeration of distinct tower elements: integers in
/// characteristic zero (or a large enough prime field), digits of `k` in
/// base `p` over powers of the top generator otherwise.
fn enumerate_element<F: Field>(tower: &Tower<F>, k: u64) -> TElem<F::Elem> {
    let p = tower.characteristic();
    if p == 0 || tower.level() == 0 {
        return tower.from_i64((k % 1_000_003) as i64);
    }
    let g = tower.gen_elem(tower.level());
    let mut e = tower.zero();
    let mut gp = tower.one();
    let mut rest = k;
    loop {
        let d = (rest % p) as i64;
        if d != 0 {
            let t = tower.mul(&tower.from_i64(d), &gp);
            e = tower.add(&e, &t);
        }
        rest /= p;
        if rest == 0 {
            break;
        }
        gp = tower.mul(&gp, &g);
    }
    e
}

/// A monic irreducible of the given degree over the tower (by scanning
/// small coefficient combinations), if one is found quickly.
fn irreducible_over<F: FactorField>(
    tower: &Tower<F>,
    deg: usize,
) -> Option<Vec<TElem<F::Elem>>> {
    for trial in 0..512u64 {
        let mut coeffs: Vec<TElem<F::Elem>> = Vec::with_capacity(deg + 1);
        let mut t = trial;
        for i in 0..deg {
            let c = enumerate_element(tower, (t % 16) + if i == 0 { 1 } else { 0 });
            coeffs.push(c);
            t /= 16;
        }
        coeffs.push(tower.one());
        let p = upoly::normalize(tower, coeffs);
        if upoly::deg(tower, &p) != deg as isize {
            continue;
        }
        let fac = factor(tower, &p);
        if fac.factors.len() == 1
            && fac.factors[0].1 == 1
            && upoly::deg(tower, &fac.factors[0].0) == deg as isize
        {
            return Some(p);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Series assembly and valuations.
// ---------------------------------------------------------------------------

impl<F: FactorField> Place<F> {
    pub fn ram_index(&self) -> usize {
        self.e
    }

    /// Degree of the residue field over the base field.
    pub fn residue_degree(&self) -> usize {
        self.tower.total_degree().max(1)
    }

    /// Degree of the place (= residue degree over the base field).
    pub fn degree(&self) -> usize {
        self.residue_degree()
    }

    /// Residue degree relative to the center's own field of definition.
    pub fn rel_residue_degree(&self) -> usize {
        self.residue_degree() / self.center_degree.max(1)
    }

    pub fn center_is_infinity(&self) -> bool {
        self.x_inverted
    }

    /// Whether `y` has a pole at this place.
    pub fn y_at_infinity(&self) -> bool {
        self.y_inverted
    }

    /// Parametrization `(x(t), y(t))` with `y` known below `t^prec` (or
    /// exact). Cached; refined on demand.
    fn param(&self, prec: usize) -> (LSeries<TElem<F::Elem>>, LSeries<TElem<F::Elem>>) {
        {
            let cache = self.cache.borrow();
            if let Some((p, x, y)) = cache.as_ref() {
                if *p >= prec || y.hi.is_none() {
                    return (x.clone(), y.clone());
                }
            }
        }
        // Ask the tail for enough terms that the assembled window reaches
        // `prec` even after a reciprocal-chart inversion.
        let mut tail_terms = prec.max(4);
        let (x, y) = loop {
            let pair = self.assemble(tail_terms);
            let enough = match pair.1.hi {
                None => true,
                Some(h) => h >= prec as i64,
            };
            if enough {
                break pair;
            }
            tail_terms *= 2;
            assert!(tail_terms < 1 << 24, "series refinement runaway");
        };
        *self.cache.borrow_mut() = Some((prec, x.clone(), y.clone()));
        (x, y)
    }

    fn assemble(&self, tail_terms: usize) -> (LSeries<TElem<F::Elem>>, LSeries<TElem<F::Elem>>) {
        let w = &self.tower;
        let mut s = match &self.germ {
            Some(g) => newton_solve(w, g, tail_terms),
            None => series::exact_zero(w),
        };
        // Walk the expansion chain outward.
        let mut mu = w.one();
        let mut r: i64 = 1;
        for st in self.steps.iter().rev() {
            let xi = w.embed(st.xi.clone(), st.level);
            let xiu = signed_pow(w, &xi, st.u);
            let head = series::monomial(w, 0, xiu);
            let inner = series::add(w, &head, &s);
            let mum = w.pow(&mu, st.m as u64);
            let scaled = series::scale(w, &inner, &mum);
            s = series::shift_t(&scaled, st.m as i64 * r);
            // Update (mu, r) to the next-outer parameter scaling.
            let muq = w.pow(&mu, st.q as u64);
            mu = w.mul(&signed_pow(w, &xi, st.v), &muq);
            r *= st.q as i64;
        }
        debug_assert_eq!(r as usize, self.e);
        // y-chart.
        let eta = w.embed(self.y_shift.clone(), self.y_shift_level);
        let inner = series::add(w, &series::monomial(w, 0, eta), &s);
        let y = if self.y_inverted {
            match series::inv(w, &inner, tail_terms.max(4)) {
                Some(i) => i,
                None => {
                    // Leading term not visible yet: return a stub window so
                    // the caller refines.
                    LSeries {
                        lo: 0,
                        coeffs: vec![],
                        hi: Some(0),
                    }
                }
            }
        } else {
            inner
        };
        // x-chart.
        let xc = w.embed(self.center_root.clone(), self.center_level);
        let x = if self.x_inverted {
            // Transformed coordinate was lambda * t^e; x = its reciprocal.
            let li = w.inv(&self.lambda).expect("nonzero scale");
            series::monomial(w, -(self.e as i64), li)
        } else {
            series::add(
                w,
                &series::monomial(w, 0, xc),
                &series::monomial(w, self.e as i64, self.lambda.clone()),
            )
        };
        (x, y)
    }

    /// Order in `t` of a bivariate polynomial pulled back through the
    /// parametrization; refines lazily. `Err(NotAFunction)` if it restricts
    /// to zero on this branch.
    pub fn poly_order(&self, p: &MultiPoly<F>) -> Result<i64, PuiseuxError> {
        if p.is_zero() {
            return Err(PuiseuxError::NotAFunction);
        }
        if p.num_vars() != 2 {
            return Err(PuiseuxError::InvalidCurve);
        }
        let w = &self.tower;
        let dp = (p.degree_in(0) + p.degree_in(1) + 2) as i64;
        let bound = 4 * dp * (self.bound_seed() + 2) * (self.e as i64).max(1) + 64;
        let mut prec = 16usize;
        loop {
            let (x, y) = self.param(prec);
            let val = eval_poly_series(w, p, &x, &y);
            match series::ord(w, &val) {
                SOrd::Ord(v) => return Ok(v),
                SOrd::Zero => return Err(PuiseuxError::NotAFunction),
                SOrd::Unknown(h) => {
                    if h > bound {
                        return Err(PuiseuxError::NotAFunction);
                    }
                    prec *= 2;
                }
            }
        }
    }

    fn bound_seed(&self) -> i64 {
        // Total-degree proxy of the underlying curve germ chain; the germ
        // alone suffices as the chain only refines it.
        let g = match &self.germ {
            Some(g) => g.keys().map(|&(i, j)| (i + j) as i64).max().unwrap_or(1),
            None => 1,
        };
        g + self.steps.iter().map(|s| (s.q + s.m) as i64).sum::<i64>()
    }

    /// One-line debug dump: `center | e | resdeg | y-series head`.
    pub fn dump_line(&self) -> String {
        let w = &self.tower;
        let center = match &self.center {
            Center::Rational(a) => self.describe_scalar_base(a),
            Center::Algebraic(p) => format!("root of {}", upoly::format_poly(&self.base_field(), p, "x")),
            Center::Infinity => "inf".to_string(),
        };
        let (_, y) = self.param(8);
        let mut head = vec![];
        for (i, c) in y.coeffs.iter().enumerate().take(4) {
            if !w.is_zero(c) {
                head.push(format!("{}*t^{}", w.format(c), y.lo + i as i64));
            }
        }
        format!(
            "{center} | e={} | resdeg={} | y = {}{}",
            self.e,
            self.residue_degree(),
            if head.is_empty() { "0".to_string() } else { head.join(" + ") },
            if y.hi.is_some() { " + ..." } else { "" },
        )
    }

    fn base_field(&self) -> F {
        self.tower.base().clone()
    }

    fn describe_scalar_base(&self, a: &F::Elem) -> String {
        self.base_field().format(a)
    }
}

/// Solve a regular germ (`F(0,0) = 0`, `F_y(0,0) != 0`) for `y(t)` by Newton
/// iteration, correct below `t^nterms`.
fn newton_solve<W: Field>(w: &W, germ: &Germ<W::Elem>, nterms: usize) -> LSeries<W::Elem> {
    let p_target = nterms.max(2) as i64;
    // Derivative germ.
    let mut dgerm: Germ<W::Elem> = Germ::new();
    for (&(i, j), c) in germ {
        if j == 0 {
            continue;
        }
        let jf = w.from_i64(j as i64);
        germ_insert(w, &mut dgerm, (i, j - 1), w.mul(c, &jf));
    }
    let mut y = series::exact_zero(w); // current approximant (exact polynomial)
    let mut correct: i64 = 1; // y agrees with the solution below t^correct
    while correct < p_target {
        let next = (correct * 2).min(p_target);
        let fv = eval_germ_series(w, germ, &y, next + 1);
        let dv = eval_germ_series(w, &dgerm, &y, next + 1);
        let dv_inv = series::inv(w, &dv, next as usize + 1)
            .expect("regular germ has unit derivative");
        let delta = series::mul(w, &fv, &dv_inv);
        let y_new = series::add(w, &y, &series::neg(w, &delta));
        // Reinterpret the known window as the next exact approximant.
        let trunc = series::truncate(w, &y_new, next);
        y = LSeries {
            lo: trunc.lo,
            coeffs: trunc.coeffs,
            hi: None,
        };
        let mut tmp = y.clone();
        series_trim_exact(w, &mut tmp);
        y = tmp;
        correct = next;
    }
    let out = series::truncate(w, &y, p_target);
    LSeries {
        lo: out.lo,
        coeffs: out.coeffs,
        hi: Some(p_target),
    }
}

fn series_trim_exact<W: Field>(w: &W, s: &mut LSeries<W::Elem>) {
    while let Some(c) = s.coeffs.last() {
        if w.is_zero(c) {
            s.coeffs.pop();
        } else {
            break;
        }
    }
    while let Some(c) = s.coeffs.first() {
        if w.is_zero(c) {
            s.coeffs.remove(0);
            s.lo += 1;
        } else {
            break;
        }
    }
    if s.coeffs.is_empty() {
        s.lo = 0;
    }
}

/// Evaluate a germ at `x = t`, `y = given series`, truncated below `t^cap`.
fn eval_germ_series<W: Field>(
    w: &W,
    germ: &Germ<W::Elem>,
    y: &LSeries<W::Elem>,
    cap: i64,
) -> LSeries<W::Elem> {
    let dy = germ_deg_y(germ);
    // Collect rows: coefficient of y^j is an exact polynomial in t.
    let mut rows: Vec<LSeries<W::Elem>> = vec![series::exact_zero(w); dy as usize + 1];
    for (&(i, j), c) in germ {
        rows[j as usize] = series::add(w, &rows[j as usize], &series::monomial(w, i as i64, c.clone()));
    }
    let mut acc = series::exact_zero(w);
    for j in (0..=dy).rev() {
        acc = series::mul(w, &acc, y);
        acc = series::add(w, &acc, &rows[j as usize]);
        acc = series::truncate(w, &acc, cap);
    }
    acc
}

/// Evaluate a bivariate polynomial over the base field at series arguments.
fn eval_poly_series<F: FactorField>(
    w: &Tower<F>,
    p: &MultiPoly<F>,
    x: &LSeries<TElem<F::Elem>>,
    y: &LSeries<TElem<F::Elem>>,
) -> LSeries<TElem<F::Elem>> {
    let dy = p.degree_in(1).max(0) as u32;
    let mut rows: Vec<Vec<(u32, TElem<F::Elem>)>> = vec![vec![]; dy as usize + 1];
    for (e, c) in &p.terms {
        rows[e.0[1] as usize].push((e.0[0], TElem::Base(c.clone())));
    }
    // Row polynomials evaluated at the exact series x(t) by Horner on the
    // sparse exponent list (x is exact, so row values are exact).
    let row_val = |row: &[(u32, TElem<F::Elem>)]| -> LSeries<TElem<F::Elem>> {
        let mut sorted = row.to_vec();
        sorted.sort_by_key(|(i, _)| *i);
        let mut acc = series::exact_zero(w);
        let mut prev: u32 = 0;
        for (i, c) in sorted.iter().rev() {
            // First pass: acc is zero, so the gap power is irrelevant.
            acc = series::mul(w, &acc, &series::pow(w, x, prev.saturating_sub(*i)));
            prev = *i;
            acc = series::add(w, &acc, &series::monomial(w, 0, c.clone()));
        }
        if prev > 0 {
            acc = series::mul(w, &acc, &series::pow(w, x, prev));
        }
        acc
    };
    let mut acc = series::exact_zero(w);
    for j in (0..=dy).rev() {
        acc = series::mul(w, &acc, y);
        if !rows[j as usize].is_empty() {
            acc = series::add(w, &acc, &row_val(&rows[j as usize]));
        }
    }
    acc
}

/// Valuation of the rational function `num/den` at the place.
pub fn valuation<F: FactorField>(
    place: &Place<F>,
    num: &MultiPoly<F>,
    den: &MultiPoly<F>,
) -> Result<i64, PuiseuxError> {
    let vn = place.poly_order(num)?;
    let vd = place.poly_order(den)?;
    Ok(vn - vd)
}
