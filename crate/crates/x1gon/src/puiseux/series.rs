//! Truncated Laurent series over a generic field, with explicit tracking of
//! how far coefficients are known.
//!
//! A series is either *exact* (a Laurent polynomial, `hi = None`) or known
//! only on the exponent window `lo .. hi`. All operations propagate the
//! window soundly: a coefficient is stored only if it is provably correct.

use crate::exactalg::Field;

/// Result of asking for the order (valuation in `t`) of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SOrd {
    /// The series is exactly zero.
    Zero,
    /// First nonzero coefficient sits at this exponent.
    Ord(i64),
    /// All known coefficients vanish; the order is `>=` this bound.
    Unknown(i64),
}

#[derive(Clone, Debug)]
pub struct LSeries<E: Clone> {
    /// Exponent of `coeffs[0]`.
    pub lo: i64,
    pub coeffs: Vec<E>,
    /// Exponents `>= hi` are unknown; `None` means the series is exact.
    /// For `Some(h)`: `coeffs.len() == (h - lo) as usize`.
    pub hi: Option<i64>,
}

impl<E: Clone> LSeries<E> {
    pub fn window_end(&self) -> Option<i64> {
        self.hi
    }
}

pub fn exact_zero<F: Field>(_f: &F) -> LSeries<F::Elem> {
    LSeries {
        lo: 0,
        coeffs: vec![],
        hi: None,
    }
}

pub fn monomial<F: Field>(f: &F, k: i64, c: F::Elem) -> LSeries<F::Elem> {
    if f.is_zero(&c) {
        return exact_zero(f);
    }
    LSeries {
        lo: k,
        coeffs: vec![c],
        hi: None,
    }
}

pub fn from_terms<F: Field>(f: &F, terms: &[(i64, F::Elem)]) -> LSeries<F::Elem> {
    let mut s = exact_zero(f);
    for (k, c) in terms {
        s = add(f, &s, &monomial(f, *k, c.clone()));
    }
    s
}

fn trim_exact<F: Field>(f: &F, s: &mut LSeries<F::Elem>) {
    debug_assert!(s.hi.is_none());
    while let Some(c) = s.coeffs.last() {
        if f.is_zero(c) {
            s.coeffs.pop();
        } else {
            break;
        }
    }
    while let Some(c) = s.coeffs.first() {
        if f.is_zero(c) {
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

/// Clamp the known window to end at `h` (no-op if already tighter).
pub fn truncate<F: Field>(f: &F, s: &LSeries<F::Elem>, h: i64) -> LSeries<F::Elem> {
    let cur_end = s.lo + s.coeffs.len() as i64;
    let end = match s.hi {
        Some(old) => old.min(h),
        None => h,
    };
    if end >= cur_end && s.hi.is_none() {
        // Exact and fully inside the window: keep exact.
        return s.clone();
    }
    let end = end.max(s.lo);
    let mut coeffs = Vec::with_capacity((end - s.lo) as usize);
    for k in s.lo..end {
        let idx = (k - s.lo) as usize;
        if idx < s.coeffs.len() {
            coeffs.push(s.coeffs[idx].clone());
        } else {
            coeffs.push(f.zero());
        }
    }
    LSeries {
        lo: s.lo,
        coeffs,
        hi: Some(end),
    }
}

/// Drop leading coefficients that are known to be zero, raising `lo`. The
/// value is unchanged, but window bounds derived from `lo` in later
/// multiplications become tighter (a known-zero prefix can never meet an
/// unknown tail).
pub fn tighten<F: Field>(f: &F, s: &mut LSeries<F::Elem>) {
    while let Some(c) = s.coeffs.first() {
        if f.is_zero(c) {
            s.coeffs.remove(0);
            s.lo += 1;
        } else {
            break;
        }
    }
    if s.coeffs.is_empty() {
        if let Some(h) = s.hi {
            s.lo = h;
        } else {
            s.lo = 0;
        }
    }
}

pub fn add<F: Field>(f: &F, a: &LSeries<F::Elem>, b: &LSeries<F::Elem>) -> LSeries<F::Elem> {
    let hi = match (a.hi, b.hi) {
        (None, None) => None,
        (Some(x), None) => Some(x),
        (None, Some(y)) => Some(y),
        (Some(x), Some(y)) => Some(x.min(y)),
    };
    if a.coeffs.is_empty() && b.coeffs.is_empty() && hi.is_none() {
        return exact_zero(f);
    }
    let lo = match (a.coeffs.is_empty(), b.coeffs.is_empty()) {
        (true, true) => hi.unwrap_or(0),
        (true, false) => b.lo,
        (false, true) => a.lo,
        (false, false) => a.lo.min(b.lo),
    };
    let lo = match hi {
        Some(h) => lo.min(h),
        None => lo,
    };
    let a_end = a.lo + a.coeffs.len() as i64;
    let b_end = b.lo + b.coeffs.len() as i64;
    let end = match hi {
        Some(h) => h,
        None => a_end.max(b_end),
    };
    let mut coeffs = Vec::with_capacity((end - lo).max(0) as usize);
    for k in lo..end {
        let mut c = f.zero();
        if k >= a.lo && k < a_end {
            c = f.add(&c, &a.coeffs[(k - a.lo) as usize]);
        }
        if k >= b.lo && k < b_end {
            c = f.add(&c, &b.coeffs[(k - b.lo) as usize]);
        }
        coeffs.push(c);
    }
    let mut out = LSeries { lo, coeffs, hi };
    if out.hi.is_none() {
        trim_exact(f, &mut out);
    } else {
        tighten(f, &mut out);
    }
    out
}

pub fn neg<F: Field>(f: &F, a: &LSeries<F::Elem>) -> LSeries<F::Elem> {
    LSeries {
        lo: a.lo,
        coeffs: a.coeffs.iter().map(|c| f.neg(c)).collect(),
        hi: a.hi,
    }
}

pub fn scale<F: Field>(f: &F, a: &LSeries<F::Elem>, c: &F::Elem) -> LSeries<F::Elem> {
    if f.is_zero(c) {
        // Multiplying by an exact zero scalar erases even unknown tails.
        return exact_zero(f);
    }
    let mut out = LSeries {
        lo: a.lo,
        coeffs: a.coeffs.iter().map(|x| f.mul(x, c)).collect(),
        hi: a.hi,
    };
    if out.hi.is_none() {
        trim_exact(f, &mut out);
    }
    out
}

/// Multiply by `t^k`.
pub fn shift_t<E: Clone>(a: &LSeries<E>, k: i64) -> LSeries<E> {
    LSeries {
        lo: a.lo + k,
        coeffs: a.coeffs.clone(),
        hi: a.hi.map(|h| h + k),
    }
}

/// Substitute `t -> t^r` (exponent stretch).
pub fn stretch<F: Field>(f: &F, a: &LSeries<F::Elem>, r: u32) -> LSeries<F::Elem> {
    assert!(r >= 1);
    let r64 = r as i64;
    let mut coeffs = vec![];
    for (i, c) in a.coeffs.iter().enumerate() {
        if i > 0 {
            for _ in 0..r64 - 1 {
                coeffs.push(f.zero());
            }
        }
        let _ = i;
        coeffs.push(c.clone());
    }
    let mut out = LSeries {
        lo: a.lo * r64,
        // After stretching, intermediate exponents are known-zero, and the
        // unknown tail starts at hi*r.
        coeffs,
        hi: a.hi.map(|h| {
            let end = a.lo + a.coeffs.len() as i64;
            debug_assert_eq!(end, h);
            h * r64
        }),
    };
    // Pad the known-zero gap between (end-1)*r + 1 and hi*r.
    if let Some(h) = out.hi {
        let have = out.lo + out.coeffs.len() as i64;
        for _ in have..h {
            out.coeffs.push(f.zero());
        }
    } else {
        trim_exact(f, &mut out);
    }
    out
}

pub fn mul<F: Field>(f: &F, a: &LSeries<F::Elem>, b: &LSeries<F::Elem>) -> LSeries<F::Elem> {
    // An exact zero annihilates unknown tails too.
    if a.hi.is_none() && a.coeffs.is_empty() {
        return exact_zero(f);
    }
    if b.hi.is_none() && b.coeffs.is_empty() {
        return exact_zero(f);
    }
    let hi = match (a.hi, b.hi) {
        (None, None) => None,
        (Some(ha), None) => Some(ha + b.lo),
        (None, Some(hb)) => Some(hb + a.lo),
        (Some(ha), Some(hb)) => Some((ha + b.lo).min(hb + a.lo)),
    };
    let lo = a.lo + b.lo;
    let full_end = lo + (a.coeffs.len() + b.coeffs.len()).saturating_sub(1) as i64;
    let end = match hi {
        Some(h) => h.max(lo),
        None => full_end.max(lo),
    };
    let n = (end - lo) as usize;
    let mut coeffs = vec![f.zero(); n];
    for (i, ca) in a.coeffs.iter().enumerate() {
        if f.is_zero(ca) {
            continue;
        }
        for (j, cb) in b.coeffs.iter().enumerate() {
            let k = i + j;
            if k >= n {
                break;
            }
            let t = f.mul(ca, cb);
            coeffs[k] = f.add(&coeffs[k], &t);
        }
    }
    let mut out = LSeries { lo, coeffs, hi };
    if out.hi.is_none() {
        trim_exact(f, &mut out);
    } else {
        tighten(f, &mut out);
    }
    out
}

pub fn pow<F: Field>(f: &F, a: &LSeries<F::Elem>, n: u32) -> LSeries<F::Elem> {
    let mut acc = monomial(f, 0, f.one());
    let mut base = a.clone();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = mul(f, &acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = mul(f, &base, &base);
        }
    }
    acc
}

pub fn ord<F: Field>(f: &F, a: &LSeries<F::Elem>) -> SOrd {
    for (i, c) in a.coeffs.iter().enumerate() {
        if !f.is_zero(c) {
            return SOrd::Ord(a.lo + i as i64);
        }
    }
    match a.hi {
        None => SOrd::Zero,
        Some(h) => SOrd::Unknown(h),
    }
}

/// Multiplicative inverse, correct on a window of length `want` starting at
/// `-ord(a)`. Returns `None` if the leading coefficient cannot be located
/// inside the known window (caller should refine and retry) or the series is
/// exactly zero.
pub fn inv<F: Field>(f: &F, a: &LSeries<F::Elem>, want: usize) -> Option<LSeries<F::Elem>> {
    let v = match ord(f, a) {
        SOrd::Ord(v) => v,
        _ => return None,
    };
    // Known length of the unit part.
    let unit_known = match a.hi {
        Some(h) => (h - v) as usize,
        None => usize::MAX,
    };
    let len = want.max(1).min(unit_known);
    let idx0 = (v - a.lo) as usize;
    let c0 = &a.coeffs[idx0];
    let c0i = f.inv(c0).expect("leading coefficient is nonzero");
    // Invert the unit u = c0 (1 + r); b_k from the convolution recurrence.
    let mut b = vec![f.zero(); len];
    b[0] = c0i.clone();
    for k in 1..len {
        // sum_{i=1..k} a_{v+i} * b_{k-i} = -a_v * b_k
        let mut s = f.zero();
        for i in 1..=k {
            let ai = if idx0 + i < a.coeffs.len() {
                a.coeffs[idx0 + i].clone()
            } else {
                f.zero()
            };
            if f.is_zero(&ai) {
                continue;
            }
            let t = f.mul(&ai, &b[k - i]);
            s = f.add(&s, &t);
        }
        b[k] = f.neg(&f.mul(&s, &c0i));
    }
    Some(LSeries {
        lo: -v,
        coeffs: b,
        hi: Some(-v + len as i64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{PrimeField, Rationals};
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn exactness_propagates() {
        let f = Rationals;
        let a = from_terms(&f, &[(0, q(1)), (2, q(-3))]);
        let b = from_terms(&f, &[(-1, q(2))]);
        let p = mul(&f, &a, &b);
        assert_eq!(p.hi, None);
        assert_eq!(ord(&f, &p), SOrd::Ord(-1));
        // (1 - 3t^2) * 2t^-1 = 2t^-1 - 6t
        assert_eq!(p.coeffs, vec![q(2), q(0), q(-6)]);
    }

    #[test]
    fn truncated_windows_are_sound() {
        let f = Rationals;
        // a known to order < 3: a = 1 + t + (unknown >= t^3)
        let a = LSeries {
            lo: 0,
            coeffs: vec![q(1), q(1), q(0)],
            hi: Some(3),
        };
        let b = from_terms(&f, &[(1, q(1))]); // exact t
        let p = mul(&f, &a, &b);
        assert_eq!(p.hi, Some(4));
        assert_eq!(p.lo, 1);
        assert_eq!(p.coeffs, vec![q(1), q(1), q(0)]);
        // adding an exact series keeps the smaller window
        let s = add(&f, &p, &from_terms(&f, &[(0, q(5))]));
        assert_eq!(s.hi, Some(4));
        assert_eq!(ord(&f, &s), SOrd::Ord(0));
    }

    #[test]
    fn zero_annihilates() {
        let f = Rationals;
        let z = exact_zero(&f);
        let a = LSeries {
            lo: 0,
            coeffs: vec![q(0)],
            hi: Some(1),
        };
        let p = mul(&f, &z, &a);
        assert_eq!(ord(&f, &p), SOrd::Zero);
        // but truncated-zero times exact is only known on a window
        let b = from_terms(&f, &[(0, q(1))]);
        let p2 = mul(&f, &a, &b);
        assert_eq!(ord(&f, &p2), SOrd::Unknown(1));
    }

    #[test]
    fn inversion_of_unit_series() {
        let f = Rationals;
        // 1/(1 - t) = 1 + t + t^2 + ...
        let a = from_terms(&f, &[(0, q(1)), (1, q(-1))]);
        let i = inv(&f, &a, 5).unwrap();
        assert_eq!(i.lo, 0);
        assert_eq!(i.coeffs, vec![q(1); 5]);
        // 1/(2t^3(1+t)) has lo = -3
        let b = from_terms(&f, &[(3, q(2)), (4, q(2))]);
        let ib = inv(&f, &b, 4).unwrap();
        assert_eq!(ib.lo, -3);
        let prod = mul(&f, &b, &ib);
        assert_eq!(ord(&f, &prod), SOrd::Ord(0));
        assert_eq!(prod.coeffs[0], q(1));
        for k in 1..prod.coeffs.len() {
            assert_eq!(prod.coeffs[k], q(0), "k={k}");
        }
        // refusal when the window shows no leading coefficient
        let unknown = LSeries {
            lo: 0,
            coeffs: vec![q(0), q(0)],
            hi: Some(2),
        };
        assert!(inv(&f, &unknown, 3).is_none());
    }

    #[test]
    fn stretch_and_shift() {
        let f = PrimeField::new(7);
        let a = LSeries {
            lo: 1,
            coeffs: vec![1u64, 2, 3],
            hi: Some(4),
        };
        let s = stretch(&f, &a, 3);
        assert_eq!(s.lo, 3);
        assert_eq!(s.hi, Some(12));
        assert_eq!(s.coeffs, vec![1, 0, 0, 2, 0, 0, 3, 0, 0]);
        let sh = shift_t(&s, -5);
        assert_eq!(sh.lo, -2);
        assert_eq!(sh.hi, Some(7));
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let f = PrimeField::new(101);
        let a = from_terms(&f, &[(0, 1), (1, 5), (2, 7)]);
        let mut acc = monomial(&f, 0, 1);
        for _ in 0..6 {
            acc = mul(&f, &acc, &a);
        }
        let p = pow(&f, &a, 6);
        assert_eq!(p.lo, acc.lo);
        assert_eq!(p.coeffs, acc.coeffs);
    }
}
