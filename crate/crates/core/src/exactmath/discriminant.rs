use num_traits::Zero;

use super::charpoly::det;
use super::poly::UniPoly;
use super::rat::Rat;
use crate::error::{Error, Result};

/// Sylvester matrix of `p` (degree `m`) and `q` (degree `k`), size `(m+k)×(m+k)`.
/// Rows hold shifted coefficient vectors, highest degree first.
pub fn sylvester_matrix(p: &UniPoly, q: &UniPoly) -> Result<Vec<Vec<Rat>>> {
    let m = p.degree().ok_or(Error::ZeroPolynomial)?;
    let k = q.degree().ok_or(Error::ZeroPolynomial)?;
    let size = m + k;
    let mut rows = Vec::with_capacity(size);
    for (poly, deg, count) in [(p, m, k), (q, k, m)] {
        for shift in 0..count {
            let mut row = vec![Rat::zero(); size];
            for i in 0..=deg {
                row[shift + i] = poly.coeff(deg - i);
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn resultant(p: &UniPoly, q: &UniPoly) -> Result<Rat> {
    det(&sylvester_matrix(p, q)?)
}

/// Discriminant `a_n^{2n-2} ∏_{i<j} (r_i - r_j)^2`, computed as
/// `(-1)^{n(n-1)/2} Res(p, p') / a_n`.
pub fn discriminant_x(p: &UniPoly) -> Result<Rat> {
    let n = p.degree().ok_or(Error::ZeroPolynomial)?;
    if n == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let res = resultant(p, &p.derivative())?;
    let d = res / p.leading().unwrap();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}
