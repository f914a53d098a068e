//! Exact linear algebra over `Z` and `Q`: Smith normal form, kernels,
//! saturations and quotient coordinates.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{q, Q};
use crate::error::{Error, Result};

pub type Mat = Vec<Vec<i64>>;

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_q(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_iq(a: &[i64], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| q(*x) * y).sum()
}

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn transpose(a: &[Vec<i64>], ncols: usize) -> Mat {
    (0..ncols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Mat {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|r| (0..n).map(|j| r.iter().zip(b).map(|(x, br)| x * br[j]).sum()).collect())
        .collect()
}

pub fn mat_vec(a: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    a.iter().map(|r| dot(r, v)).collect()
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divides by the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = gcd_slice(v);
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// The primitive integer vector on the ray through a rational vector.
pub fn primitive_q(v: &[Q]) -> Result<Vec<i64>> {
    let l = v.iter().fold(num_bigint::BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |g, x| g.gcd(x));
    ints.iter()
        .map(|x| {
            let y = if g.is_zero() { x.clone() } else { x / &g };
            i64::try_from(y).map_err(|_| Error::Overflow("primitive vector"))
        })
        .collect()
}

/// `u · a · v = d` with `u`, `v` unimodular and `d` diagonal, `d[i][i] | d[i+1][i+1]`,
/// all diagonal entries nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub u: Mat,
    pub d: Mat,
    pub v: Mat,
}

impl Snf {
    pub fn invariant_factors(&self) -> Vec<i64> {
        (0..self.d.len().min(self.d.first().map_or(0, Vec::len)))
            .map(|i| self.d[i][i])
            .filter(|&x| x != 0)
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn ck(x: Option<i128>) -> Result<i128> {
    x.ok_or(Error::Overflow("Smith normal form"))
}

fn row_axpy(m: &mut [Vec<i128>], dst: usize, src: usize, f: i128) -> Result<()> {
    if f == 0 {
        return Ok(());
    }
    for j in 0..m[dst].len() {
        let t = ck(m[src][j].checked_mul(f))?;
        m[dst][j] = ck(m[dst][j].checked_add(t))?;
    }
    Ok(())
}

fn col_axpy(m: &mut [Vec<i128>], dst: usize, src: usize, f: i128) -> Result<()> {
    if f == 0 {
        return Ok(());
    }
    for r in m.iter_mut() {
        let t = ck(r[src].checked_mul(f))?;
        r[dst] = ck(r[dst].checked_add(t))?;
    }
    Ok(())
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    for r in m.iter_mut() {
        r.swap(a, b);
    }
}

/// Smith normal form of an `m × n` integer matrix given by rows.
pub fn smith_normal_form(a: &[Vec<i64>], ncols: usize) -> Result<Snf> {
    let m = a.len();
    let n = ncols;
    let mut d: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = identity(m).into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let mut v: Vec<Vec<i128>> = identity(n).into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    for t in 0..m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if d[i][j] != 0 && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if d[i][t] != 0 {
                    let f = -d[i][t].div_euclid(d[t][t]);
                    row_axpy(&mut d, i, t, f)?;
                    row_axpy(&mut u, i, t, f)?;
                    if d[i][t] != 0 {
                        d.swap(t, i);
                        u.swap(t, i);
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if d[t][j] != 0 {
                    let f = -d[t][j].div_euclid(d[t][t]);
                    col_axpy(&mut d, j, t, f)?;
                    col_axpy(&mut v, j, t, f)?;
                    if d[t][j] != 0 {
                        swap_cols(&mut d, t, j);
                        swap_cols(&mut v, t, j);
                        clean = false;
                    }
                }
            }
            if clean {
                let p = d[t][t];
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| d[i][j] % p != 0));
                match bad {
                    Some(i) => {
                        row_axpy(&mut d, t, i, 1)?;
                        row_axpy(&mut u, t, i, 1)?;
                    }
                    None => break,
                }
            }
        }
        if d[t][t] < 0 {
            for x in d[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let back = |m: Vec<Vec<i128>>| -> Result<Mat> {
        m.into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).map_err(|_| Error::Overflow("Smith normal form"))).collect())
            .collect()
    };
    Ok(Snf { u: back(u)?, d: back(d)?, v: back(v)? })
}

/// Saturated basis of `{x ∈ Z^n : a·x = 0}`.
pub fn integer_kernel(a: &[Vec<i64>], ncols: usize) -> Result<Mat> {
    if a.is_empty() {
        return Ok(identity(ncols));
    }
    let s = smith_normal_form(a, ncols)?;
    let r = s.rank();
    Ok((r..ncols).map(|j| s.v.iter().map(|row| row[j]).collect()).collect())
}

/// Basis of `span(gens) ∩ Z^d`.
pub fn saturation_basis(gens: &[Vec<i64>], d: usize) -> Result<Mat> {
    if gens.iter().all(|g| g.iter().all(|&x| x == 0)) {
        return Ok(Vec::new());
    }
    let perp = integer_kernel(gens, d)?;
    integer_kernel(&perp, d)
}

/// True when the vectors are linearly independent and span a saturated sublattice.
pub fn is_saturated_basis(basis: &[Vec<i64>], d: usize) -> Result<bool> {
    if basis.is_empty() {
        return Ok(true);
    }
    let s = smith_normal_form(basis, d)?;
    let f = s.invariant_factors();
    Ok(f.len() == basis.len() && f.iter().all(|&x| x == 1))
}

/// A unimodular `p` with `p(span(gens) ∩ Z^d) = Z^k × 0`, together with `k`.
/// The last `d - k` coordinates of `p·x` are coordinates on `Z^d / span(gens)`.
pub fn quotient_transform(gens: &[Vec<i64>], d: usize) -> Result<(Mat, usize)> {
    if gens.is_empty() {
        return Ok((identity(d), 0));
    }
    let cols = transpose(gens, d);
    let s = smith_normal_form(&cols, gens.len())?;
    let k = s.rank();
    Ok((s.u, k))
}

/// Inverse of a unimodular matrix.
pub fn inverse_unimodular(p: &[Vec<i64>]) -> Result<Mat> {
    let n = p.len();
    let rows: Vec<Vec<Q>> = p.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    let mut out = vec![vec![0i64; n]; n];
    for j in 0..n {
        let mut e = vec![Q::zero(); n];
        e[j] = Q::one();
        let col = solve_q(&rows, &e).ok_or_else(|| Error::Undefined("matrix is singular".into()))?;
        for i in 0..n {
            if !col[i].is_integer() {
                return Err(Error::Undefined("matrix is not unimodular".into()));
            }
            out[i][j] = i64::try_from(col[i].to_integer()).map_err(|_| Error::Overflow("inverse"))?;
        }
    }
    Ok(out)
}

/// Reduced row echelon form; returns the nonzero rows and pivot columns.
pub fn rref(rows: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= p * &f;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank_q(rows: &[Vec<Q>]) -> usize {
    rref(rows).1.len()
}

pub fn rank_i(rows: &[Vec<i64>]) -> usize {
    rank_q(&to_q(rows))
}

pub fn to_q(rows: &[Vec<i64>]) -> Vec<Vec<Q>> {
    rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

/// Basis of `{x : rows·x = 0}` over `Q`.
pub fn nullspace_q(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let (r, piv) = rref(rows);
    (0..ncols)
        .filter(|c| !piv.contains(c))
        .map(|free| {
            let mut x = vec![Q::zero(); ncols];
            x[free] = Q::one();
            for (i, &pc) in piv.iter().enumerate() {
                x[pc] = -r[i][free].clone();
            }
            x
        })
        .collect()
}

/// Some solution of `a·x = b`, or `None` when the system is inconsistent.
pub fn solve_q(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let ncols = a.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| r.iter().cloned().chain(std::iter::once(bi.clone())).collect())
        .collect();
    let (r, piv) = rref(&aug);
    if piv.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (i, &pc) in piv.iter().enumerate() {
        x[pc] = r[i][ncols].clone();
    }
    Some(x)
}

pub fn is_zero_vec(v: &[i64]) -> bool {
    v.iter().all(|&x| x == 0)
}

pub fn neg(v: &[i64]) -> Vec<i64> {
    v.iter().map(|x| -x).collect()
}

pub fn has_negative(v: &[Q]) -> bool {
    v.iter().any(Signed::is_negative)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(a: &Mat, n: usize) {
        let s = smith_normal_form(a, n).unwrap();
        assert_eq!(mat_mul(&mat_mul(&s.u, a), &s.v), s.d);
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        for (i, r) in s.d.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                if i != j {
                    assert_eq!(x, 0);
                }
            }
        }
    }

    #[test]
    fn snf_known_invariants() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith_normal_form(&a, 3).unwrap();
        assert_eq!(s.invariant_factors(), vec![2, 6, 12]);
        check_snf(&a, 3);
        let b = vec![vec![0, 0], vec![0, 0]];
        assert_eq!(smith_normal_form(&b, 2).unwrap().rank(), 0);
    }

    #[test]
    fn kernel_and_saturation() {
        let k = integer_kernel(&[vec![1, 1, 1]], 3).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v.iter().sum::<i64>(), 0);
        }
        assert!(is_saturated_basis(&k, 3).unwrap());
        let s = saturation_basis(&[vec![2, 2, 0]], 3).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(primitive(&s[0]).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1, 1, 0]);
        assert!(!is_saturated_basis(&[vec![2, 0]], 2).unwrap());
    }

    #[test]
    fn quotient_coordinates_kill_the_span() {
        let g = vec![vec![1, 1, 0]];
        let (p, k) = quotient_transform(&g, 3).unwrap();
        assert_eq!(k, 1);
        let img = mat_vec(&p, &g[0]);
        assert!(img[1..].iter().all(|&x| x == 0));
        let pinv = inverse_unimodular(&p).unwrap();
        assert_eq!(mat_mul(&p, &pinv), identity(3));
    }

    #[test]
    fn rational_solve() {
        let a = to_q(&[vec![1, 2], vec![2, 4]]);
        assert!(solve_q(&a, &[q(1), q(3)]).is_none());
        let x = solve_q(&a, &[q(1), q(2)]).unwrap();
        assert_eq!(&x[0] + q(2) * &x[1], q(1));
        assert_eq!(nullspace_q(&a, 2).len(), 1);
        assert_eq!(primitive_q(&[crate::arith::qr(1, 2), crate::arith::qr(-1, 3)]).unwrap(), vec![3, -2]);
    }
}
