//! Smith normal form of integer matrices, with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let r = a.len();
    let inner = if r > 0 { a[0].len() } else { 0 };
    let c = if b.is_empty() { 0 } else { b[0].len() };
    assert_eq!(inner, b.len());
    let mut out = vec![vec![BigInt::zero(); c]; r];
    for i in 0..r {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..c {
                let t = &a[i][k] * &b[k][j];
                out[i][j] += t;
            }
        }
    }
    out
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(a.iter().all(|r| r.len() == n));
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = &t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Smith normal form: returns `(u, s, v)` with `u * a * v = s`, `u` and `v`
/// unimodular, `s` diagonal with nonnegative entries `d_1 | d_2 | ...`.
pub fn smith_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    assert!(a.iter().all(|r| r.len() == cols));
    let mut s = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let mut t = 0usize;
    while t < rows && t < cols {
        // Locate a nonzero entry of minimal magnitude in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if s[i][j].is_zero() {
                    continue;
                }
                match &best {
                    Some((bi, bj)) if s[*bi][*bj].abs() <= s[i][j].abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        if pi != t {
            s.swap(pi, t);
            u.swap(pi, t);
        }
        if pj != t {
            swap_cols(&mut s, pj, t);
            swap_cols(&mut v, pj, t);
        }

        'reduce: loop {
            // Clear the pivot column with row operations.
            for i in t + 1..rows {
                if s[i][t].is_zero() {
                    continue;
                }
                let q = div_nearest(&s[i][t], &s[t][t]);
                if !q.is_zero() {
                    row_sub(&mut s, i, t, &q);
                    row_sub(&mut u, i, t, &q);
                }
                if !s[i][t].is_zero() {
                    // Remainder became the smaller pivot candidate.
                    s.swap(i, t);
                    u.swap(i, t);
                    continue 'reduce;
                }
            }
            // Clear the pivot row with column operations.
            for j in t + 1..cols {
                if s[t][j].is_zero() {
                    continue;
                }
                let q = div_nearest(&s[t][j], &s[t][t]);
                if !q.is_zero() {
                    col_sub(&mut s, j, t, &q);
                    col_sub(&mut v, j, t, &q);
                }
                if !s[t][j].is_zero() {
                    swap_cols(&mut s, j, t);
                    swap_cols(&mut v, j, t);
                    continue 'reduce;
                }
            }
            // Pivot must divide every entry of the trailing block so the
            // diagonal ends up a divisibility chain.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&s[i][j] % &s[t][t]).is_zero() {
                        // Fold row i into the pivot row and restart.
                        let one = BigInt::one();
                        row_add(&mut s, t, i, &one);
                        row_add(&mut u, t, i, &one);
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        t += 1;
    }

    // Normalize diagonal signs.
    for i in 0..rows.min(cols) {
        if s[i][i].is_negative() {
            for j in 0..cols {
                s[i][j] = -s[i][j].clone();
            }
            for j in 0..rows {
                u[i][j] = -u[i][j].clone();
            }
        }
    }
    (u, s, v)
}

/// Diagonal of the Smith form (including zeros), length `min(rows, cols)`.
pub fn elementary_divisors(a: &IntMatrix) -> Vec<BigInt> {
    let (_, s, _) = smith_normal_form(a);
    let n = s.len().min(if s.is_empty() { 0 } else { s[0].len() });
    (0..n).map(|i| s[i][i].clone()).collect()
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// `row[i] -= q * row[k]`
fn row_sub(m: &mut IntMatrix, i: usize, k: usize, q: &BigInt) {
    let rk: Vec<BigInt> = m[k].clone();
    for (x, y) in m[i].iter_mut().zip(rk) {
        *x -= q * y;
    }
}

fn row_add(m: &mut IntMatrix, i: usize, k: usize, q: &BigInt) {
    let rk: Vec<BigInt> = m[k].clone();
    for (x, y) in m[i].iter_mut().zip(rk) {
        *x += q * y;
    }
}

/// `col[j] -= q * col[k]`
fn col_sub(m: &mut IntMatrix, j: usize, k: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let t = q * &row[k];
        row[j] -= t;
    }
}

/// Division rounded to nearest (ties toward zero): minimizes |remainder|.
fn div_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let two_r = r.abs() * 2;
    if two_r > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| bi(x)).collect())
            .collect()
    }

    fn check_snf(a: &IntMatrix) {
        let (u, s, v) = smith_normal_form(a);
        // u * a * v == s
        assert_eq!(mat_mul(&mat_mul(&u, a), &v), s);
        // unimodular
        assert_eq!(determinant(&u).abs(), bi(1));
        assert_eq!(determinant(&v).abs(), bi(1));
        // diagonal, nonnegative, divisibility chain
        let rows = s.len();
        let cols = if rows > 0 { s[0].len() } else { 0 };
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    assert!(s[i][j].is_zero(), "off-diagonal nonzero");
                }
            }
        }
        let n = rows.min(cols);
        for i in 0..n {
            assert!(!s[i][i].is_negative());
            if i + 1 < n && !s[i + 1][i + 1].is_zero() {
                assert!(
                    (&s[i + 1][i + 1] % &s[i][i].clone().max(bi(1))).is_zero()
                        || s[i][i].is_zero() && s[i + 1][i + 1].is_zero(),
                    "divisibility chain broken"
                );
            }
            if s[i][i].is_zero() && i + 1 < n {
                assert!(s[i + 1][i + 1].is_zero(), "zero before nonzero divisor");
            }
        }
    }

    /// gcd of all k-by-k minors.
    fn minors_gcd(a: &IntMatrix, k: usize) -> BigInt {
        let rows = a.len();
        let cols = a[0].len();
        let mut g = BigInt::zero();
        let rsets = subsets(rows, k);
        let csets = subsets(cols, k);
        for rs in &rsets {
            for cs in &csets {
                let sub: IntMatrix = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| a[i][j].clone()).collect())
                    .collect();
                g = g.gcd(&determinant(&sub));
            }
        }
        g
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![];
        let mut cur = vec![];
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(0, n, k, &mut cur, &mut out);
        out
    }

    #[test]
    fn snf_diag_2_3_becomes_1_6() {
        let a = mat(&[&[2, 0], &[0, 3]]);
        let (_, s, _) = smith_normal_form(&a);
        assert_eq!(s, mat(&[&[1, 0], &[0, 6]]));
        check_snf(&a);
    }

    #[test]
    fn snf_small_cases() {
        let a = mat(&[&[2, 4], &[6, 8]]);
        let (_, s, _) = smith_normal_form(&a);
        assert_eq!(s, mat(&[&[2, 0], &[0, 4]]));
        check_snf(&a);

        // Rank-deficient.
        let b = mat(&[&[1, 2, 3], &[2, 4, 6]]);
        let (_, s, _) = smith_normal_form(&b);
        assert_eq!(s[0][0], bi(1));
        assert_eq!(s[1][1], bi(0));
        check_snf(&b);

        // Zero matrix and empty-ish shapes.
        check_snf(&mat(&[&[0, 0], &[0, 0]]));
        check_snf(&mat(&[&[5]]));
        check_snf(&mat(&[&[0]]));
    }

    #[test]
    fn snf_matches_minor_gcd_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..60 {
            let rows = 1 + (trial % 4);
            let cols = 1 + ((trial / 4) % 4);
            let a: IntMatrix = (0..rows)
                .map(|_| (0..cols).map(|_| bi(rng.gen_range(-9..=9))).collect())
                .collect();
            check_snf(&a);
            let (_, s, _) = smith_normal_form(&a);
            // d_1 * ... * d_k == gcd of k-by-k minors.
            let n = rows.min(cols);
            let mut prod = bi(1);
            for k in 1..=n {
                prod *= &s[k - 1][k - 1];
                let g = minors_gcd(&a, k);
                assert_eq!(prod.abs(), g.abs(), "k={k} a={a:?}");
                if g.is_zero() {
                    break;
                }
            }
        }
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        fn det_slow(a: &IntMatrix) -> BigInt {
            let n = a.len();
            if n == 0 {
                return bi(1);
            }
            if n == 1 {
                return a[0][0].clone();
            }
            let mut acc = BigInt::zero();
            for j in 0..n {
                let minor: IntMatrix = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&k| k != j)
                            .map(|k| a[i][k].clone())
                            .collect()
                    })
                    .collect();
                let t = &a[0][j] * det_slow(&minor);
                if j % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            acc
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5);
            let a: IntMatrix = (0..n)
                .map(|_| (0..n).map(|_| bi(rng.gen_range(-6..=6))).collect())
                .collect();
            assert_eq!(determinant(&a), det_slow(&a));
        }
    }

    #[test]
    fn div_nearest_minimizes_remainder() {
        for a in -20i64..=20 {
            for b in [-7i64, -3, -2, 2, 3, 7] {
                let q = div_nearest(&bi(a), &bi(b));
                let r = bi(a) - &q * bi(b);
                assert!(r.abs() * 2 <= bi(b).abs(), "a={a} b={b} q={q} r={r}");
            }
        }
    }
}
