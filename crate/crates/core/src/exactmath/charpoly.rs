//! Division-free characteristic polynomials (Berkowitz).
//!
//! Sign convention used throughout the crate: [`charpoly`] returns the
//! coefficients of `det(M - λ·Id)`, lowest degree first. For a `d×d` matrix
//! this equals `(-1)^d det(λ·Id - M)`, so the leading coefficient is `(-1)^d`.

use super::ring::Ring;

use crate::error::{Error, Result};

fn check_square<T>(m: &[Vec<T>]) -> Result<usize> {
    let d = m.len();
    for row in m {
        if row.len() != d {
            return Err(Error::NotSquare {
                rows: d,
                cols: row.len(),
            });
        }
    }
    Ok(d)
}

/// Coefficients of `det(λ·Id - M)`, highest degree first (so the first entry is one).
pub fn berkowitz<T: Ring>(m: &[Vec<T>]) -> Result<Vec<T>> {
    let d = check_square(m)?;
    let mut p = vec![T::one()];
    for k in 0..d {
        let mut t = Vec::with_capacity(k + 2);
        t.push(T::one());
        t.push(-m[k][k].clone());
        let mut v: Vec<T> = (0..k).map(|i| m[i][k].clone()).collect();
        for _ in 2..k + 2 {
            let rv = (0..k).fold(T::zero(), |acc, j| acc + m[k][j].clone() * v[j].clone());
            t.push(-rv);
            v = (0..k)
                .map(|i| {
                    (0..k).fold(T::zero(), |acc, j| acc + m[i][j].clone() * v[j].clone())
                })
                .collect();
        }
        let mut next = Vec::with_capacity(k + 2);
        for i in 0..k + 2 {
            let mut acc = T::zero();
            for j in 0..=i.min(k) {
                if !t[i - j].is_zero() && !p[j].is_zero() {
                    acc = acc + t[i - j].clone() * p[j].clone();
                }
            }
            next.push(acc);
        }
        p = next;
    }
    Ok(p)
}

/// Coefficients of `det(M - λ·Id)`, lowest degree first.
pub fn charpoly<T: Ring>(m: &[Vec<T>]) -> Result<Vec<T>> {
    let d = check_square(m)?;
    let hi_first = berkowitz(m)?;
    let flip = d % 2 == 1;
    Ok(hi_first
        .into_iter()
        .rev()
        .map(|c| if flip { -c } else { c })
        .collect())
}

/// Division-free determinant.
pub fn det<T: Ring>(m: &[Vec<T>]) -> Result<T> {
    Ok(charpoly(m)?.into_iter().next().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::poly::UniPoly;
    use crate::exactmath::rat::{int, Rat};

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn identity_2x2() {
        let c = charpoly(&ints(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(c, vec![int(1), int(-2), int(1)]);
    }

    #[test]
    fn diag_123() {
        // det(M - λ) = (1-λ)(2-λ)(3-λ) = -λ³ + 6λ² - 11λ + 6
        let c = charpoly(&ints(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]])).unwrap();
        assert_eq!(c, vec![int(6), int(-11), int(6), int(-1)]);
    }

    #[test]
    fn over_polynomials() {
        let m = vec![vec![UniPoly::x()]];
        let c = charpoly(&m).unwrap();
        assert_eq!(c, vec![UniPoly::x(), UniPoly::from_ints(&[-1])]);
    }

    #[test]
    fn non_square() {
        let m = vec![vec![int(1), int(2)]];
        assert!(matches!(charpoly(&m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn dense_det() {
        let m = ints(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(det(&m).unwrap(), int(4));
        let e: Vec<Vec<Rat>> = Vec::new();
        assert_eq!(det(&e).unwrap(), int(1));
    }
}
