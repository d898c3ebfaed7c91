//! Outer relaxation: Weitzenböck curvature terms on traceless symmetric
//! tensors, realised as harmonic polynomials and integrated exactly over the
//! unit sphere.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactmath::{int, psd_status_by_elimination, PsdStatus, Rat, SymMatRat};
use crate::tensorspace::{binomial, CurvOp, PluckerBasis};

/// Largest supported tensor degree `p`.
pub const MAX_DEGREE: usize = 6;

/// Exponent vectors of all degree-`d` monomials in `n` variables, lexicographically
/// descending (`x_1^d` first).
pub fn monomials(n: usize, d: usize) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n - 1 {
            prefix.push(d as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e as u32);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Harmonic homogeneous polynomials of degree `p` in `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicBasis {
    pub n: usize,
    pub p: usize,
    /// Degree-`p` monomials indexing the coefficient vectors.
    pub monomials: Vec<Vec<u32>>,
    /// Each element is a primitive integer coefficient vector.
    pub basis: Vec<Vec<Rat>>,
}

impl HarmonicBasis {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Expected dimension of the space of degree-`p` harmonics.
    pub fn expected_len(n: usize, p: usize) -> usize {
        if p < 2 {
            binomial(n + p - 1, p)
        } else {
            binomial(n + p - 1, p) - binomial(n + p - 3, p - 2)
        }
    }
}

/// Laplacian of a degree-`p` polynomial as a vector over degree-`p-2` monomials.
pub fn laplacian(n: usize, p: usize, coeffs: &[Rat]) -> Vec<Rat> {
    let src = monomials(n, p);
    if p < 2 {
        return Vec::new();
    }
    let dst = monomials(n, p - 2);
    let index: HashMap<&Vec<u32>, usize> = dst.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut out = vec![Rat::zero(); dst.len()];
    for (alpha, c) in src.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            if alpha[i] >= 2 {
                let mut beta = alpha.clone();
                beta[i] -= 2;
                let f = int(i64::from(alpha[i] * (alpha[i] - 1)));
                out[index[&beta]] += c * f;
            }
        }
    }
    out
}

fn primitive_vector(v: Vec<Rat>) -> Vec<Rat> {
    let mut lcm = BigInt::one();
    for c in &v {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    ints.into_iter().map(|x| Rat::from_integer(x / &g)).collect()
}

/// Null space of a rational matrix (rows given) by reduced row echelon form.
/// Free variables in increasing column order, each set to one.
fn null_space(rows: Vec<Vec<Rat>>, cols: usize) -> Vec<Vec<Rat>> {
    let mut a = rows;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in c..cols {
                    if !a[r][k].is_zero() {
                        let d = &f * &a[r][k];
                        a[i][k] -= d;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            primitive_vector(v)
        })
        .collect()
}

pub fn harmonic_basis(n: usize, p: usize) -> Result<HarmonicBasis> {
    if n < 2 || p < 1 {
        return Err(Error::InvalidArgument(format!(
            "harmonic basis needs n >= 2 and p >= 1, got n = {n}, p = {p}"
        )));
    }
    let mons = monomials(n, p);
    let cols = mons.len();
    let lap_rows = if p >= 2 {
        // columns of the Laplacian are images of unit vectors
        let dst_len = binomial(n + p - 3, p - 2);
        let mut rows = vec![vec![Rat::zero(); cols]; dst_len];
        for c in 0..cols {
            let mut e = vec![Rat::zero(); cols];
            e[c] = Rat::one();
            for (r, v) in laplacian(n, p, &e).into_iter().enumerate() {
                rows[r][c] = v;
            }
        }
        rows
    } else {
        Vec::new()
    };
    let basis = null_space(lap_rows, cols);
    Ok(HarmonicBasis {
        n,
        p,
        monomials: mons,
        basis,
    })
}

fn double_factorial_odd(k: u32) -> BigInt {
    // (k-1)!! for even k
    let mut acc = BigInt::one();
    let mut i = k.saturating_sub(1);
    while i > 1 {
        acc *= i;
        i -= 2;
    }
    acc
}

/// Numerator `∏ (α_i - 1)!!` of the sphere moment (zero if some `α_i` is odd).
fn moment_numerator(alpha: &[u32]) -> BigInt {
    if alpha.iter().any(|a| a % 2 == 1) {
        return BigInt::zero();
    }
    alpha.iter().map(|&a| double_factorial_odd(a)).product()
}

/// Average of `x^α` over the unit sphere in `ℝⁿ`, `n = alpha.len()`.
pub fn sphere_moment(alpha: &[u32]) -> Rat {
    let n = alpha.len() as u64;
    let num = moment_numerator(alpha);
    if num.is_zero() {
        return Rat::zero();
    }
    let total: u64 = alpha.iter().map(|&a| u64::from(a)).sum();
    let mut den = BigInt::one();
    let mut k = 0;
    while k + 2 <= total {
        den *= n + k;
        k += 2;
    }
    Rat::new(num, den)
}

/// Data independent of the operator, cached per `(n, p)`.
struct Precomp {
    h: usize,
    pairs: usize,
    /// `u[a][P]`: sparse coefficients of component `P` of `x∧∇ψ_a`.
    u: Vec<Vec<Vec<(usize, Rat)>>>,
    /// Moment Gram matrix over degree-`p` monomials, sparse rows, moments
    /// scaled by the common positive denominator of degree `2p`.
    gram: Vec<Vec<(usize, Rat)>>,
}

fn precompute(n: usize, p: usize) -> Result<Arc<Precomp>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Precomp>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("cache lock").get(&(n, p)) {
        return Ok(hit.clone());
    }
    let hb = harmonic_basis(n, p)?;
    let mons = &hb.monomials;
    let index: HashMap<&Vec<u32>, usize> = mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let plucker = PluckerBasis::new(n);

    let u: Vec<Vec<Vec<(usize, Rat)>>> = hb
        .basis
        .iter()
        .map(|psi| {
            plucker
                .pairs()
                .iter()
                .map(|&(i, j)| {
                    // x_i ∂_j ψ - x_j ∂_i ψ
                    let mut acc: HashMap<usize, Rat> = HashMap::new();
                    for (alpha, c) in mons.iter().zip(psi) {
                        if c.is_zero() {
                            continue;
                        }
                        for (from, to, sgn) in [(j, i, 1i64), (i, j, -1i64)] {
                            if alpha[from] == 0 {
                                continue;
                            }
                            let mut beta = alpha.clone();
                            beta[from] -= 1;
                            beta[to] += 1;
                            let v = c * int(sgn * i64::from(alpha[from]));
                            *acc.entry(index[&beta]).or_insert_with(Rat::zero) += v;
                        }
                    }
                    let mut sparse: Vec<(usize, Rat)> =
                        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                    sparse.sort_by_key(|(k, _)| *k);
                    sparse
                })
                .collect()
        })
        .collect();

    let gram = mons
        .iter()
        .map(|a| {
            mons.iter()
                .enumerate()
                .filter_map(|(k, b)| {
                    let s: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    let m = moment_numerator(&s);
                    (!m.is_zero()).then(|| (k, Rat::from_integer(m)))
                })
                .collect()
        })
        .collect();

    let pre = Arc::new(Precomp {
        h: hb.len(),
        pairs: plucker.len(),
        u,
        gram,
    });
    cache.lock().expect("cache lock").insert((n, p), pre.clone());
    Ok(pre)
}

/// Matrix of the Weitzenböck curvature term on degree-`p` harmonics, up to a
/// positive factor depending only on `(n, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTerm {
    pub n: usize,
    pub p: usize,
    pub matrix: SymMatRat,
}

/// `K_ab ∝ mean over the sphere of ⟨R(x∧∇ψ_a), x∧∇ψ_b⟩`.
///
/// The common denominator `n(n+2)…(n+2p-2)` of the degree-`2p` moments is
/// dropped, which makes `p = 1` coincide with the Ricci contraction.
pub fn curvature_term(r: &CurvOp, p: usize) -> Result<CurvatureTerm> {
    if p < 1 || p > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "tensor degree p must lie in 1..={MAX_DEGREE}, got {p}"
        )));
    }
    let n = r.n();
    let pre = precompute(n, p)?;
    let nmon = pre.gram.len();

    // w[b][P] = G · Σ_Q R_PQ u[b][Q]
    let w: Vec<Vec<Vec<Rat>>> = (0..pre.h)
        .into_par_iter()
        .map(|b| {
            (0..pre.pairs)
                .map(|pp| {
                    let mut v = vec![Rat::zero(); nmon];
                    for q in 0..pre.pairs {
                        let rpq = r.get(pp, q);
                        if rpq.is_zero() {
                            continue;
                        }
                        for (k, c) in &pre.u[b][q] {
                            v[*k] += rpq * c;
                        }
                    }
                    let mut gv = vec![Rat::zero(); nmon];
                    for (row, g) in gv.iter_mut().zip(&pre.gram) {
                        for (k, m) in row_iter(g) {
                            if !v[k].is_zero() {
                                *row += m * &v[k];
                            }
                        }
                    }
                    gv
                })
                .collect()
        })
        .collect();

    let rows: Vec<Vec<Rat>> = (0..pre.h)
        .into_par_iter()
        .map(|a| {
            (0..pre.h)
                .map(|b| {
                    let mut acc = Rat::zero();
                    for pp in 0..pre.pairs {
                        for (k, c) in &pre.u[a][pp] {
                            let x = &w[b][pp][*k];
                            if !x.is_zero() {
                                acc += c * x;
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let matrix = SymMatRat::from_rows(rows)?;
    Ok(CurvatureTerm { n, p, matrix })
}

fn row_iter(row: &[(usize, Rat)]) -> impl Iterator<Item = (usize, &Rat)> {
    row.iter().map(|(k, m)| (*k, m))
}

/// Ricci contraction `Ric_ab = Σ_k ⟨R(e_a∧e_k), e_b∧e_k⟩`.
pub fn ricci(r: &CurvOp) -> SymMatRat {
    let n = r.n();
    let basis = PluckerBasis::new(n);
    SymMatRat::from_upper(n, |a, b| {
        let mut acc = Rat::zero();
        for k in 0..n {
            let (Some((i, si)), Some((j, sj))) = (basis.signed_index(a, k), basis.signed_index(b, k))
            else {
                continue;
            };
            let v = r.get(i, j);
            if si == sj {
                acc += v;
            } else {
                acc -= v;
            }
        }
        acc
    })
}

/// Outcome of the outer test up to some level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterReport {
    /// Status of the curvature term for `p = 1, 2, …` as far as checked.
    pub statuses: Vec<PsdStatus>,
}

impl OuterReport {
    pub fn holds(&self) -> bool {
        self.statuses.iter().all(|s| s.is_psd())
    }

    /// Smallest `p` whose curvature term is not PSD.
    pub fn failing_degree(&self) -> Option<usize> {
        self.statuses.iter().position(|s| !s.is_psd()).map(|i| i + 1)
    }
}

/// Exact PSD status of the curvature term of degree `p`.
pub fn outer_status(r: &CurvOp, p: usize) -> Result<PsdStatus> {
    Ok(psd_status_by_elimination(&curvature_term(r, p)?.matrix))
}

/// Checks degrees `p = 1 … m+1`, stopping at the first failure.
pub fn outer_report(r: &CurvOp, m: usize) -> Result<OuterReport> {
    let mut statuses = Vec::new();
    for p in 1..=m + 1 {
        let s = outer_status(r, p)?;
        statuses.push(s);
        if !s.is_psd() {
            break;
        }
    }
    Ok(OuterReport { statuses })
}

/// Membership in the outer relaxation of level `m`.
pub fn outer_membership(r: &CurvOp, m: usize) -> Result<bool> {
    Ok(outer_report(r, m)?.holds())
}
