//! Division-value ladders for the marked point (0,0) on the Tate normal form.
//!
//! The values `psi_k` of the division polynomials at the marked point satisfy
//! the usual doubling recurrences once the first five are known:
//!
//! ```text
//! psi_0 = 0,  psi_1 = 1,  psi_2 = -b,  psi_3 = -b^3,  psi_4 = b^5 c
//! psi_{2k+1} = psi_{k+2} psi_k^3   - psi_{k-1} psi_{k+1}^3
//! psi_{2k}   = psi_k (psi_{k+2} psi_{k-1}^2 - psi_{k-2} psi_{k+1}^2) / psi_2
//! ```
//!
//! All three ladders here compute the same objects in different coefficient
//! domains: symbolically in `Z[b,c]` (small indices only), as dense univariate
//! polynomials in `b` over a prime field with `c` specialized (the
//! interpolation workhorse), and as plain scalars (spot verification).

use crate::exactalg::{upoly, Field, MultiPoly, PrimeField, Rationals};

type QPoly = MultiPoly<Rationals>;

/// `psi_0 .. psi_n` as exact polynomials in `b, c`.
pub fn psi_symbolic(n: usize) -> Vec<QPoly> {
    let vars = ["b", "c"];
    let p = |s: &str| QPoly::parse(Rationals, &vars, s).expect("static polynomial");
    let mut v: Vec<QPoly> = vec![
        QPoly::zero(Rationals, &vars),
        QPoly::one(Rationals, &vars),
        p("-b"),
        p("-b^3"),
        p("b^5*c"),
    ];
    v.truncate(n + 1);
    let psi2 = p("-b");
    for m in v.len()..=n {
        let k = m / 2;
        let next = if m % 2 == 1 {
            let t1 = v[k + 2].mul(&v[k].pow(3)).unwrap();
            let t2 = v[k - 1].mul(&v[k + 1].pow(3)).unwrap();
            t1.sub(&t2).unwrap()
        } else {
            let t1 = v[k + 2].mul(&v[k - 1].pow(2)).unwrap();
            let t2 = v[k - 2].mul(&v[k + 1].pow(2)).unwrap();
            let num = v[k].mul(&t1.sub(&t2).unwrap()).unwrap();
            num.exact_div(&psi2).expect("even psi divisible by psi_2")
        };
        v.push(next);
    }
    v
}

/// `psi_0 .. psi_n` specialized at `c = c0`, as dense polynomials in `b`
/// over `F_p` (little-endian coefficient vectors).
pub fn psi_univariate(fp: &PrimeField, c0: u64, n: usize) -> Vec<upoly::UPoly<PrimeField>> {
    let neg1 = fp.neg(&fp.one());
    let mut v: Vec<upoly::UPoly<PrimeField>> = vec![
        vec![],
        vec![fp.one()],
        upoly::monomial(fp, neg1, 1),
        upoly::monomial(fp, neg1, 3),
        upoly::monomial(fp, c0 % fp.modulus(), 5),
    ];
    v.truncate(n + 1);
    for m in v.len()..=n {
        let k = m / 2;
        let next = if m % 2 == 1 {
            let cube = |a: &upoly::UPoly<PrimeField>| {
                let sq = upoly::mul(fp, a, a);
                upoly::mul(fp, &sq, a)
            };
            let t1 = upoly::mul(fp, &v[k + 2], &cube(&v[k]));
            let t2 = upoly::mul(fp, &v[k - 1], &cube(&v[k + 1]));
            upoly::sub(fp, &t1, &t2)
        } else {
            let t1 = upoly::mul(fp, &v[k + 2], &upoly::mul(fp, &v[k - 1], &v[k - 1]));
            let t2 = upoly::mul(fp, &v[k - 2], &upoly::mul(fp, &v[k + 1], &v[k + 1]));
            let num = upoly::mul(fp, &v[k], &upoly::sub(fp, &t1, &t2));
            div_by_neg_b(fp, &num)
        };
        v.push(next);
    }
    v
}

/// Exact division of a polynomial in `b` by `psi_2 = -b`.
fn div_by_neg_b(fp: &PrimeField, f: &upoly::UPoly<PrimeField>) -> upoly::UPoly<PrimeField> {
    if f.is_empty() {
        return vec![];
    }
    debug_assert!(fp.is_zero(&f[0]), "even-index psi value not divisible by b");
    f[1..].iter().map(|c| fp.neg(c)).collect()
}

/// `psi_0 .. psi_n` evaluated at `(b0, c0)` over `F_p`. Requires `b0 != 0`.
pub fn psi_scalar(fp: &PrimeField, b0: u64, c0: u64, n: usize) -> Vec<u64> {
    assert!(!fp.is_zero(&(b0 % fp.modulus())), "psi ladder needs b != 0");
    let b0 = b0 % fp.modulus();
    let c0 = c0 % fp.modulus();
    let psi2 = fp.neg(&b0);
    let inv_psi2 = fp.inv(&psi2).expect("nonzero");
    let b2 = fp.mul(&b0, &b0);
    let b3 = fp.mul(&b2, &b0);
    let b5 = fp.mul(&b3, &b2);
    let mut v: Vec<u64> = vec![0, 1, psi2, fp.neg(&b3), fp.mul(&b5, &c0)];
    v.truncate(n + 1);
    for m in v.len()..=n {
        let k = m / 2;
        let next = if m % 2 == 1 {
            let t1 = fp.mul(&v[k + 2], &fp.pow(&v[k], 3));
            let t2 = fp.mul(&v[k - 1], &fp.pow(&v[k + 1], 3));
            fp.sub(&t1, &t2)
        } else {
            let t1 = fp.mul(&v[k + 2], &fp.mul(&v[k - 1], &v[k - 1]));
            let t2 = fp.mul(&v[k - 2], &fp.mul(&v[k + 1], &v[k + 1]));
            fp.mul(&fp.mul(&v[k], &fp.sub(&t1, &t2)), &inv_psi2)
        };
        v.push(next);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> QPoly {
        QPoly::parse(Rationals, &["b", "c"], s).unwrap()
    }

    fn prod(factors: &[&str]) -> QPoly {
        factors
            .iter()
            .map(|s| p(s))
            .reduce(|a, b| a.mul(&b).unwrap())
            .unwrap()
    }

    #[test]
    fn symbolic_ladder_matches_closed_forms() {
        let v = psi_symbolic(9);
        assert_eq!(v[5], prod(&["b^8", "b-c"]));
        assert_eq!(v[6], prod(&["b^12", "b-c-c^2"]));
        assert_eq!(v[7], prod(&["-b^16", "b^2-b*c-c^3"]));
        assert_eq!(v[8], prod(&["-b^21", "c", "2*b^2-3*b*c+c^2-b*c^2"]));
        let cubic = p("c^3").mul(&p("b-c-c^2")).unwrap();
        let cube = p("b-c").pow(3);
        assert_eq!(
            v[9],
            p("b^27").mul(&cubic.add(&cube).unwrap()).unwrap()
        );
    }

    #[test]
    fn ladders_agree_with_each_other() {
        let fp = PrimeField::new(crate::exactalg::next_prime_u64(1 << 40));
        let (b0, c0) = (123_456u64, 987_654u64);
        let scal = psi_scalar(&fp, b0, c0, 24);
        let uni = psi_univariate(&fp, c0, 24);
        let sym = psi_symbolic(12);
        for k in 0..=24 {
            assert_eq!(upoly::eval(&fp, &uni[k], &b0), scal[k], "univariate k={k}");
        }
        for (k, s) in sym.iter().enumerate() {
            let mp = s.map_coeffs(fp.clone(), |q| {
                assert!(q.is_integer());
                fp.reduce_bigint(q.numer())
            });
            assert_eq!(mp.eval(&[b0, c0]), scal[k], "symbolic k={k}");
        }
    }
}
