//! Exact decision procedures in dimension four.
//!
//! By the Finsler–Thorpe trick, `sec_R ≥ 0` holds iff `R + x·*` is positive
//! semidefinite for some real `x`, where `*` is the Hodge star. The
//! eigenvalue symmetric functions `σ_i(x)` of `R + x·*` are polynomials of
//! degree at most `i`, so the question reduces to sign conditions over a
//! common root-isolating partition of `σ_1, …, σ_6`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::sturm::{isolate_roots, refine_bracket};
use crate::exactmath::{
    berkowitz, count_roots, discriminant_x, isolate_family, psd_status, ExtRat,
    IsolatingPartition, PsdStatus, Rat, UniPoly,
};
use crate::tensorspace::{apply_bound_reduction, hodge_star, BoundSide, CurvOp};

/// The symmetric functions `σ_1(x), …, σ_6(x)` of the eigenvalues of `R + x·*`:
/// `det(λ - R - x·*) = λ⁶ + Σ_i (-1)^i σ_i(x) λ^{6-i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamCharPoly {
    pub sigma: Vec<UniPoly>,
}

impl ParamCharPoly {
    /// `σ_i` for `i` in `1..=6`.
    pub fn get(&self, i: usize) -> &UniPoly {
        &self.sigma[i - 1]
    }

    /// Nonzero members, which form the isolation family.
    fn family(&self) -> Vec<(usize, &UniPoly)> {
        self.sigma.iter().enumerate().filter(|(_, p)| !p.is_zero()).collect()
    }

    fn signs_at(&self, x: &ExtRat) -> Vec<i8> {
        self.sigma.iter().map(|p| p.sign_at(x)).collect()
    }
}

fn require_dim4(r: &CurvOp) -> Result<()> {
    if r.n() != 4 {
        return Err(Error::WrongDimension {
            expected: 4,
            got: r.n(),
        });
    }
    Ok(())
}

/// `R + x·*` as a matrix over `ℚ[x]`.
fn pencil(r: &CurvOp) -> Vec<Vec<UniPoly>> {
    let star = hodge_star();
    (0..6)
        .map(|a| {
            (0..6)
                .map(|b| UniPoly::new(vec![r.get(a, b).clone(), star.get(a, b).clone()]))
                .collect()
        })
        .collect()
}

pub fn param_charpoly(r: &CurvOp) -> Result<ParamCharPoly> {
    require_dim4(r)?;
    let c = berkowitz(&pencil(r))?;
    let sigma = (1..=6)
        .map(|i| if i % 2 == 1 { -c[i].clone() } else { c[i].clone() })
        .collect();
    Ok(ParamCharPoly { sigma })
}

/// `x ↦ det(R - k·Id + x·*)`, a polynomial of degree exactly six.
pub fn pencil_determinant(r: &CurvOp, k: &Rat) -> Result<UniPoly> {
    let shifted = apply_bound_reduction(r, k, BoundSide::Lower);
    let p = param_charpoly(&shifted)?.sigma.pop().expect("six entries");
    if p.degree() != Some(6) {
        return Err(Error::Numerical(format!(
            "pencil determinant has degree {:?}, expected 6",
            p.degree()
        )));
    }
    Ok(p)
}

/// The defining polynomial: the discriminant in `x` of `det(R - k·Id + x·*)`.
pub fn defining_poly(r: &CurvOp, k: &Rat) -> Result<Rat> {
    discriminant_x(&pencil_determinant(r, k)?)
}

fn partition_of(pc: &ParamCharPoly) -> Result<IsolatingPartition> {
    let fam: Vec<UniPoly> = pc.family().into_iter().map(|(_, p)| p.clone()).collect();
    isolate_family(&fam)
}

/// Expands the member-indexed root flags of the nonzero family back to all six `σ_i`.
fn flags_for(pc: &ParamCharPoly, part: &IsolatingPartition, j: usize) -> Vec<bool> {
    let mut out = vec![false; 6];
    for (slot, (i, _)) in pc.family().into_iter().enumerate() {
        out[i] = part.has_root(j, slot);
    }
    out
}

/// Index of a finite partition point where every `σ_i` is positive.
fn strict_point(pc: &ParamCharPoly, part: &IsolatingPartition) -> Option<usize> {
    part.points
        .iter()
        .position(|a| a.is_finite() && pc.signs_at(a).iter().all(|&s| s > 0))
}

/// First interval passing the test: every `σ_i` negative at both ends has a root inside.
fn accepting_interval(pc: &ParamCharPoly, part: &IsolatingPartition) -> Option<usize> {
    (0..part.num_intervals()).find(|&j| {
        let (a, b) = part.interval(j);
        let (sa, sb) = (pc.signs_at(a), pc.signs_at(b));
        let flags = flags_for(pc, part, j);
        (0..6).all(|i| !(sa[i] < 0 && sb[i] < 0) || flags[i])
    })
}

/// Decides `sec_R > 0` for `n = 4`.
pub fn query_sec_gt(r: &CurvOp) -> Result<bool> {
    let pc = param_charpoly(r)?;
    let part = partition_of(&pc)?;
    Ok(strict_point(&pc, &part).is_some())
}

/// Decides `sec_R ≥ 0` for `n = 4`.
pub fn query_sec_geq(r: &CurvOp) -> Result<bool> {
    let pc = param_charpoly(r)?;
    let part = partition_of(&pc)?;
    Ok(accepting_interval(&pc, &part).is_some())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FtWitness {
    /// `R + x₀·*` is PSD at this rational `x₀`.
    RationalPoint(Rat),
    /// The unique root of `factor` in the open interval `(lo, hi)`.
    IsolatedRoot {
        lo: Rat,
        hi: Rat,
        factor: UniPoly,
    },
}

/// A shift `x₀` with `R + x₀·* ⪰ 0`, which certifies `sec_R ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FtCertificate {
    pub witness: FtWitness,
    /// `R + x₀·*` is positive definite.
    pub strict: bool,
}

impl FtCertificate {
    /// Exact re-verification against `R`.
    pub fn verify(&self, r: &CurvOp) -> Result<bool> {
        match &self.witness {
            FtWitness::RationalPoint(x0) => {
                let st = psd_status(&shifted_by_star(r, x0)?);
                Ok(if self.strict {
                    st == PsdStatus::PositiveDefinite
                } else {
                    st != PsdStatus::NotPsd
                })
            }
            FtWitness::IsolatedRoot { lo, hi, factor } => {
                verify_isolated(&param_charpoly(r)?, lo, hi, factor).map(|ok| ok && !self.strict)
            }
        }
    }
}

/// `R + x·*` as an exact symmetric matrix.
pub fn shifted_by_star(r: &CurvOp, x: &Rat) -> Result<crate::exactmath::SymMatRat> {
    require_dim4(r)?;
    Ok(r.matrix().add_scaled(x, hodge_star().matrix()))
}

/// Every `σ_i` is zero or positive at the unique root `x*` of `factor` in `(lo, hi)`.
fn verify_isolated(pc: &ParamCharPoly, lo: &Rat, hi: &Rat, factor: &UniPoly) -> Result<bool> {
    let (a, b) = (ExtRat::Finite(lo.clone()), ExtRat::Finite(hi.clone()));
    if lo >= hi || factor.sign_at(&a) == 0 || factor.sign_at(&b) == 0 {
        return Ok(false);
    }
    if count_roots(factor, &a, &b)? != 1 {
        return Ok(false);
    }
    for s in &pc.sigma {
        if s.is_zero() {
            continue;
        }
        // σ vanishes at x* iff gcd(σ, factor) has a root in the bracket
        let g = s.gcd(factor);
        if g.degree().unwrap_or(0) > 0 && count_roots(&g, &a, &b)? == 1 {
            continue;
        }
        // otherwise σ has constant sign on the bracket only if it has no root there
        if s.sign_at(&a) == 0 || s.sign_at(&b) == 0 {
            return Ok(false);
        }
        if count_roots(s, &a, &b)? > 0 || s.sign_at(&a) < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Simplest rational (smallest denominator) in the closed interval `[lo, hi]`.
fn simplest_between(lo: &Rat, hi: &Rat) -> Rat {
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if &(&fl + Rat::one()) <= hi {
        return fl + Rat::one();
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// The simplest rational in the stretch around the strict point `idx` known to
/// be free of roots: from the left neighbour's root bracket (or point, if that
/// interval has no root) to the right neighbour's.
fn simplest_strict_point(part: &IsolatingPartition, idx: usize) -> Rat {
    let p = part.points[idx].finite().expect("finite").clone();
    let lo = match &part.brackets[idx - 1] {
        Some((_, hi)) => hi.clone(),
        None => part.points[idx - 1].finite().cloned().unwrap_or_else(|| p.clone()),
    };
    let hi = match &part.brackets[idx] {
        Some((lo, _)) => lo.clone(),
        None => part.points[idx + 1].finite().cloned().unwrap_or_else(|| p.clone()),
    };
    if lo > hi {
        return p;
    }
    if lo <= Rat::zero() && hi >= Rat::zero() {
        return Rat::zero();
    }
    simplest_between(&lo, &hi)
}

/// Finsler–Thorpe certificate, or `None` when `sec_R ≥ 0` fails.
pub fn ft_certificate(r: &CurvOp) -> Result<Option<FtCertificate>> {
    let pc = param_charpoly(r)?;
    let part = partition_of(&pc)?;
    let Some(j) = accepting_interval(&pc, &part) else {
        return Ok(None);
    };
    if let Some(idx) = strict_point(&pc, &part) {
        let x0 = simplest_strict_point(&part, idx);
        return Ok(Some(FtCertificate {
            witness: FtWitness::RationalPoint(x0),
            strict: true,
        }));
    }
    for a in part.points.iter().filter(|a| a.is_finite()) {
        if pc.signs_at(a).iter().all(|&s| s >= 0) {
            return Ok(Some(FtCertificate {
                witness: FtWitness::RationalPoint(a.finite().unwrap().clone()),
                strict: false,
            }));
        }
    }

    // The witness is the unique root point of the accepting interval, a common
    // root of every member flagged there.
    let flags = flags_for(&pc, &part, j);
    let mut g = UniPoly::zero();
    for (i, s) in pc.sigma.iter().enumerate() {
        if flags[i] {
            g = g.gcd(s);
        }
    }
    let g = g.squarefree_part();
    let (lo, hi) = part.brackets[j]
        .clone()
        .ok_or_else(|| Error::Numerical("accepting interval without a root".into()))?;
    if g.degree() == Some(1) {
        let x0 = -g.coeff(0) / g.coeff(1);
        return Ok(Some(FtCertificate {
            witness: FtWitness::RationalPoint(x0),
            strict: false,
        }));
    }
    // tighten the bracket to g's root inside it
    let inner = isolate_roots(&g)?
        .into_iter()
        .find(|(a, b)| {
            let (ea, eb) = (ExtRat::Finite(a.clone()), ExtRat::Finite(b.clone()));
            let (l, h) = (ExtRat::Finite(lo.clone()), ExtRat::Finite(hi.clone()));
            ea < h && eb > l && count_roots(&g, &ea.clone().max(l), &eb.clone().min(h)).unwrap_or(0) == 1
        })
        .ok_or_else(|| Error::Numerical("lost the witness root".into()))?;
    let (a, b) = (inner.0.max(lo), inner.1.min(hi));
    let width = Rat::new(1.into(), num_bigint::BigInt::one() << 200u32);
    let (a, b) = refine_bracket(&g, &a, &b, &width);
    if a == b {
        return Ok(Some(FtCertificate {
            witness: FtWitness::RationalPoint(a),
            strict: false,
        }));
    }
    let cand = simplest_between(&a, &b);
    if g.eval(&cand).is_zero() {
        return Ok(Some(FtCertificate {
            witness: FtWitness::RationalPoint(cand),
            strict: false,
        }));
    }
    Ok(Some(FtCertificate {
        witness: FtWitness::IsolatedRoot {
            lo: a,
            hi: b,
            factor: g,
        },
        strict: false,
    }))
}

/// Decides `sec_R ≥ k` (or `> k`) for `Lower`, `sec_R ≤ k` (or `< k`) for `Upper`.
pub fn query_bound(r: &CurvOp, k: &Rat, side: BoundSide, strict: bool) -> Result<bool> {
    require_dim4(r)?;
    let reduced = apply_bound_reduction(r, k, side);
    if strict {
        query_sec_gt(&reduced)
    } else {
        query_sec_geq(&reduced)
    }
}

/// Exact bound query for `n ≤ 4`. In dimensions up to three every 2-vector is
/// decomposable, so the bound is equivalent to `R - k·Id` being PSD (or PD).
pub fn query_bound_exact(r: &CurvOp, k: &Rat, side: BoundSide, strict: bool) -> Result<bool> {
    match r.n() {
        4 => query_bound(r, k, side, strict),
        n if n <= 3 => {
            let st = psd_status(apply_bound_reduction(r, k, side).matrix());
            Ok(if strict {
                st == PsdStatus::PositiveDefinite
            } else {
                st != PsdStatus::NotPsd
            })
        }
        n => Err(Error::WrongDimension { expected: 4, got: n }),
    }
}

/// Sign of a defining-polynomial value, convenient for reports.
pub fn defining_poly_sign(r: &CurvOp, k: &Rat) -> Result<i8> {
    let v = defining_poly(r, k)?;
    Ok(if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{eigen_symmetric_functions, int, rat};

    fn diag(v: &[i64]) -> CurvOp {
        CurvOp::diag(4, &v.iter().map(|&x| int(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_sigmas() {
        let pc = param_charpoly(&CurvOp::identity(4)).unwrap();
        // (1 - x^2)^3
        assert_eq!(*pc.get(6), UniPoly::from_ints(&[1, 0, -3, 0, 3, 0, -1]));
        assert_eq!(*pc.get(1), UniPoly::from_ints(&[6]));
    }

    #[test]
    fn zero_sigmas() {
        let pc = param_charpoly(&CurvOp::zero(4)).unwrap();
        assert!(pc.get(1).is_zero());
        assert_eq!(*pc.get(2), UniPoly::from_ints(&[0, 0, -3]));
        assert_eq!(*pc.get(6), UniPoly::from_ints(&[0, 0, 0, 0, 0, 0, -1]));
    }

    #[test]
    fn sigmas_match_pointwise() {
        let r = diag(&[1, 2, 3, 4, 5, 6]);
        let pc = param_charpoly(&r).unwrap();
        assert_eq!(*pc.get(1), UniPoly::from_ints(&[21]));
        for x in [-3, 0, 1, 5] {
            let e = eigen_symmetric_functions(&shifted_by_star(&r, &int(x)).unwrap());
            for i in 1..=6 {
                assert_eq!(pc.get(i).eval(&int(x)), e[i - 1]);
            }
        }
    }

    #[test]
    fn defining_poly_examples() {
        assert_eq!(defining_poly(&CurvOp::identity(4), &int(0)).unwrap(), int(0));
        assert_eq!(defining_poly(&CurvOp::zero(4), &int(0)).unwrap(), int(0));
        assert!(defining_poly(&diag(&[1, 2, 3, 4, 5, 6]), &int(0)).unwrap() > int(0));
        assert!(matches!(
            defining_poly(&CurvOp::identity(5), &int(0)),
            Err(Error::WrongDimension { .. })
        ));
    }

    #[test]
    fn queries() {
        let id = CurvOp::identity(4);
        assert!(query_sec_gt(&id).unwrap());
        assert!(!query_sec_gt(&id.neg()).unwrap());
        assert!(!query_sec_geq(&id.neg()).unwrap());
        assert!(query_sec_gt(&diag(&[1, 2, 3, 4, 5, 6])).unwrap());
        let flat = diag(&[0, 1, 1, 1, 1, 0]);
        assert!(query_sec_geq(&flat).unwrap());
        assert!(!query_sec_gt(&flat).unwrap());
    }

    #[test]
    fn certificates() {
        let id = CurvOp::identity(4);
        let c = ft_certificate(&id).unwrap().unwrap();
        assert!(c.strict);
        assert!(c.verify(&id).unwrap());
        let flat = diag(&[0, 1, 1, 1, 1, 0]);
        let c = ft_certificate(&flat).unwrap().unwrap();
        assert_eq!(
            c,
            FtCertificate {
                witness: FtWitness::RationalPoint(int(0)),
                strict: false
            }
        );
        assert!(c.verify(&flat).unwrap());
        assert_eq!(ft_certificate(&id.neg()).unwrap(), None);
    }

    #[test]
    fn bound_queries() {
        let id = CurvOp::identity(4);
        assert!(query_bound(&id, &int(1), BoundSide::Lower, false).unwrap());
        assert!(!query_bound(&id, &int(1), BoundSide::Lower, true).unwrap());
        assert!(query_bound(&id, &int(2), BoundSide::Upper, true).unwrap());
        let id3 = CurvOp::identity(3);
        assert!(query_bound_exact(&id3, &rat(1, 2), BoundSide::Lower, true).unwrap());
        assert!(!query_bound_exact(&id3, &int(1), BoundSide::Lower, true).unwrap());
        assert!(query_bound_exact(&id3, &int(1), BoundSide::Lower, false).unwrap());
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&rat(1, 3), &rat(2, 3)), rat(1, 2));
        assert_eq!(simplest_between(&rat(7, 10), &rat(8, 10)), rat(3, 4));
        assert_eq!(simplest_between(&rat(-1, 3), &rat(1, 3)), int(0));
        assert_eq!(simplest_between(&rat(-5, 7), &rat(-5, 7)), rat(-5, 7));
    }
}
