use std::fmt;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use super::charpoly::charpoly;
use super::rat::{to_f64, Rat};
use crate::error::{Error, Result};

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[Rat]>::to_vec).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        RatMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Symmetric rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymMatRat {
    dim: usize,
    entries: Vec<Rat>,
}

impl SymMatRat {
    pub fn zeros(dim: usize) -> Self {
        SymMatRat {
            dim,
            entries: vec![Rat::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diag(&vec![Rat::one(); dim])
    }

    pub fn diag(d: &[Rat]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.entries[i * d.len() + i] = v.clone();
        }
        m
    }

    /// Builds from the upper triangle produced by `f(i, j)` with `i <= j`.
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let m = RatMatrix::from_rows(rows)?;
        Self::try_from(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        let d = self.dim;
        self.entries[j * d + i] = v.clone();
        self.entries[i * d + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &Rat) {
        let d = self.dim;
        self.entries[i * d + j] += v;
        if i != j {
            self.entries[j * d + i] += v;
        }
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.entries.chunks(self.dim.max(1)).take(self.dim).map(<[Rat]>::to_vec).collect()
    }

    pub fn as_matrix(&self) -> RatMatrix {
        RatMatrix {
            rows: self.dim,
            cols: self.dim,
            data: self.entries.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn trace(&self) -> Rat {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn add(&self, other: &SymMatRat) -> SymMatRat {
        assert_eq!(self.dim, other.dim);
        SymMatRat {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &SymMatRat) -> SymMatRat {
        assert_eq!(self.dim, other.dim);
        SymMatRat {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> SymMatRat {
        SymMatRat {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: &Rat, other: &SymMatRat) -> SymMatRat {
        assert_eq!(self.dim, other.dim);
        SymMatRat {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    /// Frobenius inner product `tr(self · other)`.
    pub fn frobenius(&self, other: &SymMatRat) -> Rat {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `vᵀ M v`
    pub fn quad_form(&self, v: &[Rat]) -> Rat {
        assert_eq!(v.len(), self.dim);
        let mut acc = Rat::zero();
        for i in 0..self.dim {
            if v[i].is_zero() {
                continue;
            }
            let mut row = Rat::zero();
            for j in 0..self.dim {
                let m = self.get(i, j);
                if !m.is_zero() && !v[j].is_zero() {
                    row += m * &v[j];
                }
            }
            acc += &v[i] * row;
        }
        acc
    }

    /// `Pᵀ M P` for a square `P`.
    pub fn congruence(&self, p: &RatMatrix) -> Result<SymMatRat> {
        let prod = p.transpose().mul(&self.as_matrix())?.mul(p)?;
        SymMatRat::try_from(prod)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| to_f64(self.get(i, j)))
    }

    pub fn max_abs(&self) -> Rat {
        self.entries.iter().map(Signed::abs).max().unwrap_or_else(Rat::zero)
    }
}

impl TryFrom<RatMatrix> for SymMatRat {
    type Error = Error;
    fn try_from(m: RatMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        if !m.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(SymMatRat {
            dim: m.rows,
            entries: m.data,
        })
    }
}

impl fmt::Display for SymMatRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsdStatus {
    PositiveDefinite,
    PsdSingular,
    NotPsd,
}

impl PsdStatus {
    pub fn is_psd(self) -> bool {
        self != PsdStatus::NotPsd
    }
}

/// Elementary symmetric functions `σ_1 … σ_d` of the eigenvalues.
///
/// With `det(M - λ) = Σ c_k λ^k` (see [`charpoly`]) one has
/// `det(λ - M) = λ^d + Σ_i (-1)^i σ_i λ^{d-i}`.
pub fn eigen_symmetric_functions(m: &SymMatRat) -> Vec<Rat> {
    let d = m.dim();
    let c = charpoly(&m.rows()).expect("square");
    // det(λ - M) = (-1)^d c(λ); coefficient of λ^{d-i} is (-1)^d c_{d-i} = (-1)^i σ_i
    (1..=d)
        .map(|i| {
            let v = c[d - i].clone();
            if (d + i) % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Exact PSD test from the signs of the eigenvalue symmetric functions:
/// a real symmetric matrix is PSD iff all `σ_i ≥ 0`, and PD iff all `σ_i > 0`.
pub fn psd_status(m: &SymMatRat) -> PsdStatus {
    let sig = eigen_symmetric_functions(m);
    if sig.iter().any(Signed::is_negative) {
        PsdStatus::NotPsd
    } else if sig.iter().all(Signed::is_positive) {
        PsdStatus::PositiveDefinite
    } else {
        PsdStatus::PsdSingular
    }
}

/// Exact PSD test by symmetric Gaussian elimination (`LDLᵀ` without pivoting).
///
/// A zero pivot forces the rest of its row to vanish for a PSD matrix, so the
/// verdict is exact. `O(d³)` rational operations, usable for large matrices
/// where the characteristic polynomial gets expensive.
pub fn psd_status_by_elimination(m: &SymMatRat) -> PsdStatus {
    let d = m.dim();
    let mut a = m.rows();
    let mut singular = false;
    for k in 0..d {
        let pivot = a[k][k].clone();
        if pivot.is_negative() {
            return PsdStatus::NotPsd;
        }
        if pivot.is_zero() {
            if (k + 1..d).any(|j| !a[k][j].is_zero()) {
                return PsdStatus::NotPsd;
            }
            singular = true;
            continue;
        }
        for i in k + 1..d {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for j in i..d {
                if a[k][j].is_zero() {
                    continue;
                }
                let delta = &f * &a[k][j];
                a[i][j] -= &delta;
                if j != i {
                    a[j][i] = a[i][j].clone();
                }
            }
        }
    }
    if singular {
        PsdStatus::PsdSingular
    } else {
        PsdStatus::PositiveDefinite
    }
}
