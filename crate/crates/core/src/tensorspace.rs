//! Plücker-basis structure of `∧²ℝⁿ`: operator types, the Bianchi projection,
//! the `∧⁴` embedding, sectional curvature, bound reductions and the
//! semi-Riemannian reduction.

use std::ops::Deref;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exactmath::{int, Rat, RatMatrix, SymMatRat};

/// Denominator of the rational grid used by [`random_curvop`].
pub const RANDOM_GRID_DENOM: i64 = 8;

/// Lexicographic indexing of pairs `i < j` (0-based) of `{0, …, n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerBasis {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl PluckerBasis {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        PluckerBasis { n, pairs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self, idx: usize) -> (usize, usize) {
        self.pairs[idx]
    }

    /// Position of the pair `{i, j}` together with the orientation sign
    /// (`+1` when `i < j`, `-1` when `i > j`); `None` when `i == j`.
    pub fn signed_index(&self, i: usize, j: usize) -> Option<(usize, i8)> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Some((pair_index(self.n, i, j), 1)),
            std::cmp::Ordering::Greater => Some((pair_index(self.n, j, i), -1)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        pair_index(self.n, i, j)
    }

    /// Human-readable 1-based label such as `"12"` or `"1,10"`.
    pub fn label(&self, idx: usize) -> String {
        let (i, j) = self.pairs[idx];
        if self.n < 10 {
            format!("{}{}", i + 1, j + 1)
        } else {
            format!("{},{}", i + 1, j + 1)
        }
    }
}

/// Lexicographic position of the pair `i < j` among pairs of `{0, …, n-1}`.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Symmetric operator on `∧²ℝⁿ` in the Plücker basis, no Bianchi condition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModCurvOp {
    n: usize,
    matrix: SymMatRat,
}

impl ModCurvOp {
    pub fn new(n: usize, matrix: SymMatRat) -> Result<Self> {
        let want = binomial(n, 2);
        if matrix.dim() != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                got: matrix.dim(),
            });
        }
        Ok(ModCurvOp { n, matrix })
    }

    pub fn zero(n: usize) -> Self {
        ModCurvOp {
            n,
            matrix: SymMatRat::zeros(binomial(n, 2)),
        }
    }

    pub fn identity(n: usize) -> Self {
        ModCurvOp {
            n,
            matrix: SymMatRat::identity(binomial(n, 2)),
        }
    }

    pub fn diag(n: usize, d: &[Rat]) -> Result<Self> {
        Self::new(n, SymMatRat::diag(d))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SymMatRat {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymMatRat {
        self.matrix
    }

    pub fn get(&self, a: usize, b: usize) -> &Rat {
        self.matrix.get(a, b)
    }

    pub fn add(&self, other: &ModCurvOp) -> ModCurvOp {
        ModCurvOp {
            n: self.n,
            matrix: self.matrix.add(&other.matrix),
        }
    }

    pub fn sub(&self, other: &ModCurvOp) -> ModCurvOp {
        ModCurvOp {
            n: self.n,
            matrix: self.matrix.sub(&other.matrix),
        }
    }

    pub fn scale(&self, s: &Rat) -> ModCurvOp {
        ModCurvOp {
            n: self.n,
            matrix: self.matrix.scale(s),
        }
    }

    pub fn add_scaled(&self, s: &Rat, other: &ModCurvOp) -> ModCurvOp {
        ModCurvOp {
            n: self.n,
            matrix: self.matrix.add_scaled(s, &other.matrix),
        }
    }

    pub fn frobenius(&self, other: &ModCurvOp) -> Rat {
        self.matrix.frobenius(&other.matrix)
    }

    /// Pairings `⟨S, W_q⟩` with the embedded `∧⁴` basis elements; all zero
    /// exactly when the first Bianchi identity holds.
    pub fn bianchi_residual(&self) -> Vec<Rat> {
        wedge4_basis(self.n)
            .iter()
            .map(|quad| {
                wedge4_support(self.n, quad)
                    .into_iter()
                    .map(|(a, b, s)| {
                        let v = self.matrix.get(a, b);
                        if s > 0 {
                            v.clone()
                        } else {
                            -v.clone()
                        }
                    })
                    .sum()
            })
            .collect()
    }

    pub fn is_bianchi(&self) -> bool {
        self.bianchi_residual().iter().all(Zero::is_zero)
    }

    /// Conjugation `Λ M Λᵀ` by the `∧²` lift `Λ` of an `n×n` matrix.
    pub fn conjugate_by(&self, p: &RatMatrix) -> Result<ModCurvOp> {
        let lift = wedge2_lift(p)?;
        let m = SymMatRat::try_from(lift.mul(&self.matrix.as_matrix())?.mul(&lift.transpose())?)?;
        ModCurvOp::new(self.n, m)
    }
}

/// Algebraic curvature operator: a [`ModCurvOp`] satisfying the first Bianchi identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurvOp(ModCurvOp);

impl CurvOp {
    pub fn new(op: ModCurvOp) -> Result<Self> {
        if op.is_bianchi() {
            Ok(CurvOp(op))
        } else {
            Err(Error::NotBianchi)
        }
    }

    pub fn from_matrix(n: usize, m: SymMatRat) -> Result<Self> {
        Self::new(ModCurvOp::new(n, m)?)
    }

    pub fn identity(n: usize) -> Self {
        CurvOp(ModCurvOp::identity(n))
    }

    pub fn zero(n: usize) -> Self {
        CurvOp(ModCurvOp::zero(n))
    }

    /// Diagonal matrices in the Plücker basis always satisfy Bianchi.
    pub fn diag(n: usize, d: &[Rat]) -> Result<Self> {
        Ok(CurvOp(ModCurvOp::diag(n, d)?))
    }

    pub fn as_mod(&self) -> &ModCurvOp {
        &self.0
    }

    pub fn into_mod(self) -> ModCurvOp {
        self.0
    }

    pub fn add(&self, other: &CurvOp) -> CurvOp {
        CurvOp(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &CurvOp) -> CurvOp {
        CurvOp(self.0.sub(&other.0))
    }

    pub fn scale(&self, s: &Rat) -> CurvOp {
        CurvOp(self.0.scale(s))
    }

    pub fn neg(&self) -> CurvOp {
        self.scale(&-Rat::one())
    }

    pub fn add_scaled(&self, s: &Rat, other: &CurvOp) -> CurvOp {
        CurvOp(self.0.add_scaled(s, &other.0))
    }
}

impl Deref for CurvOp {
    type Target = ModCurvOp;
    fn deref(&self) -> &ModCurvOp {
        &self.0
    }
}

/// Standard basis `e_i∧e_j∧e_k∧e_l`, `i<j<k<l`, of `∧⁴ℝⁿ` in lexicographic order.
pub fn wedge4_basis(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    out.push([i, j, k, l]);
                }
            }
        }
    }
    out
}

/// Nonzero entries `(row, col, sign)` of the embedding of `e_i∧e_j∧e_k∧e_l`.
pub fn wedge4_support(n: usize, q: &[usize; 4]) -> Vec<(usize, usize, i8)> {
    let [i, j, k, l] = *q;
    let ix = |a, b| pair_index(n, a, b);
    let mut out = Vec::with_capacity(6);
    for (a, b, s) in [
        (ix(i, j), ix(k, l), 1),
        (ix(i, k), ix(j, l), -1),
        (ix(i, l), ix(j, k), 1),
    ] {
        out.push((a, b, s));
        out.push((b, a, s));
    }
    out
}

/// Symmetric matrix of `α ↦ ⟨ω, α∧α⟩` for `ω = Σ coeffs[q] · (q-th ∧⁴ basis element)`.
/// For `n < 4` the result is the zero matrix.
pub fn wedge4_embed(n: usize, coeffs: &[Rat]) -> Result<ModCurvOp> {
    let basis = wedge4_basis(n);
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: coeffs.len(),
        });
    }
    let mut m = SymMatRat::zeros(binomial(n, 2));
    for (quad, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (a, b, s) in wedge4_support(n, quad) {
            if a < b {
                let v = if s > 0 { c.clone() } else { -c.clone() };
                m.add_to(a, b, &v);
            }
        }
    }
    ModCurvOp::new(n, m)
}

/// Embedding of a single `∧⁴` basis element.
pub fn wedge4_element(n: usize, q: usize) -> ModCurvOp {
    let mut coeffs = vec![Rat::zero(); binomial(n, 4)];
    coeffs[q] = Rat::one();
    wedge4_embed(n, &coeffs).expect("length matches")
}

/// The Hodge star of `∧²ℝ⁴` in the Plücker basis.
pub fn hodge_star() -> ModCurvOp {
    wedge4_element(4, 0)
}

/// Orthogonal projection onto the Bianchi subspace: `S - Σ_q ⟨S, W_q⟩/⟨W_q, W_q⟩ · W_q`.
/// The embedded basis elements have disjoint supports and squared norm 6.
pub fn bianchi_project(s: &ModCurvOp) -> CurvOp {
    let n = s.n();
    let six = int(6);
    let mut m = s.matrix().clone();
    for (quad, r) in wedge4_basis(n).iter().zip(s.bianchi_residual()) {
        if r.is_zero() {
            continue;
        }
        let c = r / &six;
        for (a, b, sgn) in wedge4_support(n, quad) {
            if a < b {
                let v = if sgn > 0 { -c.clone() } else { c.clone() };
                m.add_to(a, b, &v);
            }
        }
    }
    CurvOp(ModCurvOp { n, matrix: m })
}

/// Plücker coordinates of `X∧Y`: `α_ij = X_i Y_j - X_j Y_i`.
pub fn wedge2(x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    let n = x.len();
    PluckerBasis::new(n)
        .pairs()
        .iter()
        .map(|&(i, j)| &x[i] * &y[j] - &x[j] * &y[i])
        .collect()
}

pub fn wedge2_f64(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(binomial(n, 2));
    for i in 0..n {
        for j in i + 1..n {
            out.push(x[i] * y[j] - x[j] * y[i]);
        }
    }
    out
}

/// `∧²` lift of an `n×n` matrix: entry `((ij),(kl))` is `P_ik P_jl - P_il P_jk`.
pub fn wedge2_lift(p: &RatMatrix) -> Result<RatMatrix> {
    if p.rows() != p.cols() {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let basis = PluckerBasis::new(p.rows());
    let pairs = basis.pairs();
    Ok(RatMatrix::from_fn(pairs.len(), pairs.len(), |a, b| {
        let (i, j) = pairs[a];
        let (k, l) = pairs[b];
        p.get(i, k) * p.get(j, l) - p.get(i, l) * p.get(j, k)
    }))
}

/// Sectional curvature `⟨R(X∧Y), X∧Y⟩ / ⟨X∧Y, X∧Y⟩`.
pub fn sec_eval(r: &ModCurvOp, x: &[Rat], y: &[Rat]) -> Result<Rat> {
    if x.len() != r.n() || y.len() != r.n() {
        return Err(Error::DimensionMismatch {
            expected: r.n(),
            got: x.len().min(y.len()),
        });
    }
    let alpha = wedge2(x, y);
    let norm: Rat = alpha.iter().map(|a| a * a).sum();
    if norm.is_zero() {
        return Err(Error::DegeneratePlane);
    }
    Ok(r.matrix().quad_form(&alpha) / norm)
}

/// Minimum of the sectional curvature over `samples` pseudorandom 2-planes.
/// Deterministic for a given seed; floating point.
pub fn sec_sample_min(r: &ModCurvOp, samples: usize, seed: u64) -> f64 {
    let n = r.n();
    let m = r.matrix().to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let mut taken = 0;
    while taken < samples.max(1) {
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let alpha = wedge2_f64(&x, &y);
        let norm: f64 = alpha.iter().map(|a| a * a).sum();
        if norm < 1e-12 {
            continue;
        }
        let mut num = 0.0;
        for (a, va) in alpha.iter().enumerate() {
            for (b, vb) in alpha.iter().enumerate() {
                let e = m[(a, b)];
                if e != 0.0 {
                    num += va * e * vb;
                }
            }
        }
        best = best.min(num / norm);
        taken += 1;
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSide {
    Lower,
    Upper,
}

/// `Lower`: `R - k·Id`; `Upper`: `k·Id - R`. Either way the bound becomes `sec ≥ 0`.
pub fn apply_bound_reduction(r: &CurvOp, k: &Rat, side: BoundSide) -> CurvOp {
    let id = CurvOp::identity(r.n());
    match side {
        BoundSide::Lower => r.add_scaled(&-k.clone(), &id),
        BoundSide::Upper => id.scale(k).sub(r),
    }
}

/// Index `ν` of `G = diag(-1,…,-1, 1,…,1)` with `ν` negative entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    n: usize,
    nu: usize,
}

impl Signature {
    pub fn new(n: usize, nu: usize) -> Result<Self> {
        if nu > n {
            return Err(Error::BadSignature { n, nu });
        }
        Ok(Signature { n, nu })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    fn g(&self, i: usize) -> i64 {
        if i < self.nu {
            -1
        } else {
            1
        }
    }
}

/// `G∧G`: diagonal with entry `G_ii G_jj` at the pair `(i, j)`.
pub fn g_wedge_g(sig: &Signature) -> ModCurvOp {
    let basis = PluckerBasis::new(sig.n);
    let d: Vec<Rat> = basis.pairs().iter().map(|&(i, j)| int(sig.g(i) * sig.g(j))).collect();
    ModCurvOp::diag(sig.n, &d).expect("dimension matches")
}

/// `ψ_Q(R) = (G∧G)·R`, defined when the product is symmetric.
pub fn psi_q(r: &RatMatrix, sig: &Signature) -> Result<ModCurvOp> {
    let dim = binomial(sig.n, 2);
    if r.rows() != dim || r.cols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: r.rows().max(r.cols()),
        });
    }
    let gg = g_wedge_g(sig);
    let prod = RatMatrix::from_fn(dim, dim, |a, b| gg.get(a, a) * r.get(a, b));
    let m = SymMatRat::try_from(prod).map_err(|_| Error::NotQSymmetric)?;
    ModCurvOp::new(sig.n, m)
}

/// Bianchi projection of a random symmetric matrix with entries on the grid
/// `(1/8)ℤ ∩ [-magnitude, magnitude]`.
pub fn random_curvop(n: usize, seed: u64, magnitude: u32) -> CurvOp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_curvop_with(n, &mut rng, magnitude)
}

pub fn random_curvop_with(n: usize, rng: &mut impl Rng, magnitude: u32) -> CurvOp {
    let bound = i64::from(magnitude) * RANDOM_GRID_DENOM;
    let dim = binomial(n, 2);
    let m = SymMatRat::from_upper(dim, |_, _| {
        Rat::new(rng.random_range(-bound..=bound).into(), RANDOM_GRID_DENOM.into())
    });
    bianchi_project(&ModCurvOp { n, matrix: m })
}

/// Largest Gershgorin radius bound `max_a Σ_b |M_ab|`.
pub fn gershgorin_bound(m: &SymMatRat) -> Rat {
    (0..m.dim())
        .map(|a| (0..m.dim()).map(|b| m.get(a, b).abs()).sum::<Rat>())
        .max()
        .unwrap_or_else(Rat::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    #[test]
    fn pair_indexing() {
        let b = PluckerBasis::new(5);
        for (idx, &(i, j)) in b.pairs().iter().enumerate() {
            assert_eq!(b.index(i, j), idx);
        }
        assert_eq!(b.len(), 10);
        assert_eq!(b.label(0), "12");
        assert_eq!(b.signed_index(3, 1), Some((b.index(1, 3), -1)));
    }

    #[test]
    fn hodge_star_entries() {
        let s = hodge_star();
        let b = PluckerBasis::new(4);
        assert_eq!(*s.get(b.index(0, 1), b.index(2, 3)), int(1));
        assert_eq!(*s.get(b.index(0, 2), b.index(1, 3)), int(-1));
        assert_eq!(*s.get(b.index(0, 3), b.index(1, 2)), int(1));
        assert_eq!(s.matrix().trace(), int(0));
        let sq = s.matrix().as_matrix().mul(&s.matrix().as_matrix()).unwrap();
        assert_eq!(SymMatRat::try_from(sq).unwrap(), SymMatRat::identity(6));
    }

    #[test]
    fn small_wedge4_is_zero() {
        assert!(wedge4_embed(3, &[]).unwrap().matrix().is_zero());
        assert!(wedge4_embed(5, &vec![Rat::zero(); 5]).unwrap().matrix().is_zero());
    }

    #[test]
    fn projection_examples() {
        assert!(bianchi_project(&hodge_star()).matrix().is_zero());
        let id = ModCurvOp::identity(5);
        assert_eq!(bianchi_project(&id).as_mod(), &id);
    }

    #[test]
    fn sec_examples() {
        let e = |i: usize, n: usize| -> Vec<Rat> {
            (0..n).map(|k| if k == i { int(1) } else { int(0) }).collect()
        };
        assert_eq!(sec_eval(&ModCurvOp::identity(4), &e(0, 4), &e(1, 4)).unwrap(), int(1));
        let d = CurvOp::diag(4, &(1..=6).map(int).collect::<Vec<_>>()).unwrap();
        assert_eq!(sec_eval(&d, &e(0, 4), &e(2, 4)).unwrap(), int(2));
        assert_eq!(sec_eval(&d, &e(0, 4), &e(0, 4)), Err(Error::DegeneratePlane));
        assert_eq!(sec_sample_min(&ModCurvOp::identity(4), 50, 1), 1.0);
        assert_eq!(sec_sample_min(&ModCurvOp::identity(4).scale(&int(-1)), 50, 1), -1.0);
    }

    #[test]
    fn bound_reduction() {
        let id = CurvOp::identity(4);
        assert!(apply_bound_reduction(&id, &int(1), BoundSide::Lower).matrix().is_zero());
        assert_eq!(apply_bound_reduction(&id, &int(0), BoundSide::Lower), id);
        assert_eq!(apply_bound_reduction(&CurvOp::zero(4), &int(1), BoundSide::Upper), id);
        let r = apply_bound_reduction(&id, &rat(1, 2), BoundSide::Upper);
        assert_eq!(*r.get(0, 0), rat(-1, 2));
    }

    #[test]
    fn signature_ops() {
        let s = Signature::new(4, 1).unwrap();
        let d: Vec<Rat> = [-1, -1, -1, 1, 1, 1].iter().map(|&v| int(v)).collect();
        assert_eq!(g_wedge_g(&s), ModCurvOp::diag(4, &d).unwrap());
        assert_eq!(g_wedge_g(&Signature::new(4, 0).unwrap()), ModCurvOp::identity(4));
        assert_eq!(g_wedge_g(&Signature::new(4, 4).unwrap()), ModCurvOp::identity(4));
        assert!(Signature::new(3, 4).is_err());
        let gg = g_wedge_g(&s).matrix().as_matrix();
        assert_eq!(psi_q(&gg, &s).unwrap(), ModCurvOp::identity(4));
        let bad = RatMatrix::from_fn(6, 6, |a, b| if a == 0 && b == 3 { int(1) } else { int(0) });
        let bad = RatMatrix::from_fn(6, 6, |a, b| bad.get(a, b) + bad.get(b, a));
        assert_eq!(psi_q(&bad, &s), Err(Error::NotQSymmetric));
    }

    #[test]
    fn random_is_bianchi() {
        for seed in 0..5 {
            let r = random_curvop(4, seed, 2);
            assert!(r.is_bianchi());
            assert_eq!(r.frobenius(&hodge_star()), int(0));
        }
        assert_eq!(random_curvop(2, 3, 1).dim(), 1);
        assert_eq!(random_curvop(5, 9, 1), random_curvop(5, 9, 1));
    }
}
