//! Gram certificates: exact hardening of a numeric solution and a text dump.
//!
//! Text format, one record per line, `#` starts a comment:
//!
//! ```text
//! sos-certificate
//! n 5
//! m 1
//! basis 55                      <- monomials of degree m+1, listed below
//! monomial 0 x01*x01            <- index, product of Plücker variables x_ij (0-based i < j)
//! gram 0 0 1/2                  <- upper-triangle entry, exact rational (zero entries omitted)
//! ideal x01*x23 0 2 3 4 -1/2    <- multiplier monomial (or 1), relation quadruple i j k l, coefficient
//! residual 0                    <- coefficient max-norm of r^m P - [x]ᵗ G [x] - ideal part
//! psd_shift 0                   <- smallest tried ε with G + εI ⪰ 0 exactly, or "none"
//! verified_exact true
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use super::straighten::{
    add_scaled, expand_ideal, monomials, mul_monomials, IdealPart, Monomial, Polynomial, Reduction, Straightener,
};
use super::{max_coefficient, multiply_by_r_power, QuadForm};
use crate::error::{Error, Result};
use crate::exactmath::{from_f64, psd_status_by_elimination, round_dyadic, rat, Rat, SymMatRat};
use crate::tensorspace::{wedge4_basis, PluckerBasis};

/// Gram entries are rounded to this many fractional bits.
const ROUND_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct SosCertificate {
    pub n: usize,
    pub m: usize,
    /// All monomials of degree `m+1`.
    pub basis: Vec<Monomial>,
    /// Exact Gram matrix over `basis`.
    pub gram: SymMatRat,
    /// Coefficients `c` of `x^β g_q`, as `(β, q, c)`.
    pub ideal_coeffs: Vec<(Monomial, usize, Rat)>,
    /// Coefficient max-norm of `r^m P − [x]ᵗ G [x] − Σ c x^β g_q`.
    pub residual: Rat,
    /// Smallest tried `ε ≥ 0` with `G + εI ⪰ 0` in exact arithmetic.
    /// `r^m P + ε Σ s²` is then a sum of squares modulo the ideal, so the
    /// quadratic form is at least `−ε` on unit decomposable 2-vectors.
    pub psd_shift: Option<Rat>,
    pub numeric_min_eig: f64,
}

impl SosCertificate {
    /// Exact identity and exact PSD with no shift.
    pub fn verified_exact(&self) -> bool {
        self.residual.is_zero() && self.psd_shift.as_ref().is_some_and(Zero::is_zero)
    }

    /// Certified lower bound on the quadratic form over unit decomposables.
    pub fn lower_bound(&self) -> Option<Rat> {
        if !self.residual.is_zero() {
            return None;
        }
        self.psd_shift.as_ref().map(|e| -e)
    }

    /// Recomputes the coefficient residual against `p` in exact arithmetic.
    pub fn check(&self, p: &QuadForm) -> Result<Rat> {
        if p.n() != self.n {
            return Err(Error::WrongDimension {
                expected: self.n,
                got: p.n(),
            });
        }
        let mut diff = multiply_by_r_power(p, self.m);
        add_scaled(&mut diff, &-Rat::one(), &gram_polynomial(&self.basis, &self.gram));
        let ideal: IdealPart = self
            .ideal_coeffs
            .iter()
            .map(|(b, q, c)| ((b.clone(), *q), c.clone()))
            .collect();
        add_scaled(&mut diff, &-Rat::one(), &expand_ideal(self.n, &ideal));
        Ok(max_coefficient(&diff))
    }

    pub fn to_text(&self) -> String {
        let pairs = PluckerBasis::new(self.n);
        let quads = wedge4_basis(self.n);
        let mut out = String::new();
        let _ = writeln!(out, "sos-certificate");
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "m {}", self.m);
        let _ = writeln!(out, "basis {}", self.basis.len());
        for (i, mo) in self.basis.iter().enumerate() {
            let _ = writeln!(out, "monomial {i} {}", format_monomial(&pairs, mo));
        }
        for i in 0..self.gram.dim() {
            for j in i..self.gram.dim() {
                let v = self.gram.get(i, j);
                if !v.is_zero() {
                    let _ = writeln!(out, "gram {i} {j} {v}");
                }
            }
        }
        for (b, q, c) in &self.ideal_coeffs {
            let [i, j, k, l] = quads[*q];
            let _ = writeln!(out, "ideal {} {i} {j} {k} {l} {c}", format_monomial(&pairs, b));
        }
        let _ = writeln!(out, "residual {}", self.residual);
        match &self.psd_shift {
            Some(e) => {
                let _ = writeln!(out, "psd_shift {e}");
            }
            None => {
                let _ = writeln!(out, "psd_shift none");
            }
        }
        let _ = writeln!(out, "verified_exact {}", self.verified_exact());
        out
    }
}

pub fn format_monomial(pairs: &PluckerBasis, mo: &[u16]) -> String {
    if mo.is_empty() {
        return "1".into();
    }
    mo.iter()
        .map(|&v| {
            let (i, j) = pairs.pair(v as usize);
            format!("x{i}{j}")
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn gram_polynomial(basis: &[Monomial], g: &SymMatRat) -> Polynomial {
    let mut out = Polynomial::new();
    let two = rat(2, 1);
    for (a, sa) in basis.iter().enumerate() {
        for (b, sb) in basis.iter().enumerate().skip(a) {
            let v = g.get(a, b);
            if v.is_zero() {
                continue;
            }
            let c = if a == b { v.clone() } else { &two * v };
            add_scaled(&mut out, &c, &Polynomial::from([(mul_monomials(sa, sb), Rat::one())]));
        }
    }
    out
}

/// Turns a numeric Gram matrix over standard monomials into an exact
/// certificate: dyadic rounding, then an exact correction of one Gram entry
/// per standard monomial so that the quotient identity holds exactly, then
/// exact PSD checks of `G + εI` over a short ladder of shifts.
pub(super) fn harden(
    p: &QuadForm,
    m: usize,
    std_basis: &[Monomial],
    g: &DMatrix<f64>,
    target: &Reduction,
    s: &mut Straightener,
    tol: f64,
) -> SosCertificate {
    let d = std_basis.len();
    let mut gram = SymMatRat::from_upper(d, |a, b| round_dyadic(0.5 * (g[(a, b)] + g[(b, a)]), ROUND_BITS));
    let index: HashMap<&Monomial, usize> = std_basis.iter().enumerate().map(|(i, mo)| (mo, i)).collect();

    let weight = |a: usize, b: usize| if a == b { Rat::one() } else { rat(2, 1) };
    let mut current = Polynomial::new();
    for a in 0..d {
        for b in a..d {
            let v = gram.get(a, b);
            if v.is_zero() {
                continue;
            }
            let red = s.reduce(&mul_monomials(&std_basis[a], &std_basis[b]));
            add_scaled(&mut current, &(v * weight(a, b)), &red.standard);
        }
    }
    let mut err = target.standard.clone();
    add_scaled(&mut err, &-Rat::one(), &current);
    for (tau, e) in err {
        // a standard monomial of degree 2m+2 splits into two standard halves
        // whose product is already standard, so this entry feeds only `tau`
        let a = index[&tau[..=m].to_vec()];
        let b = index[&tau[m + 1..].to_vec()];
        gram.add_to(a, b, &(e / weight(a, b)));
    }

    let tol_r = from_f64(tol);
    let ladder = [Rat::zero(), &tol_r / rat(100, 1), &tol_r / rat(10, 1), tol_r.clone()];
    let psd_shift = ladder.into_iter().find(|eps| {
        let shifted = gram.add_scaled(eps, &SymMatRat::identity(d));
        psd_status_by_elimination(&shifted).is_psd()
    });

    let mut ideal = target.ideal.clone();
    for a in 0..d {
        for b in a..d {
            let v = gram.get(a, b);
            if v.is_zero() {
                continue;
            }
            let red = s.reduce(&mul_monomials(&std_basis[a], &std_basis[b]));
            add_scaled(&mut ideal, &-(v * weight(a, b)), &red.ideal);
        }
    }

    let basis = monomials(p.dim(), m + 1);
    let pos: Vec<usize> = {
        let full: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, mo)| (mo, i)).collect();
        std_basis.iter().map(|mo| full[mo]).collect()
    };
    let mut padded = SymMatRat::zeros(basis.len());
    for a in 0..d {
        for b in a..d {
            padded.set(pos[a], pos[b], gram.get(a, b).clone());
        }
    }
    let numeric_min_eig = crate::sdp::min_eigenvalue(&padded.to_f64());
    let mut cert = SosCertificate {
        n: p.n(),
        m,
        basis,
        gram: padded,
        ideal_coeffs: ideal.into_iter().map(|((b, q), c)| (b, q, c)).collect(),
        residual: Rat::zero(),
        psd_shift,
        numeric_min_eig,
    };
    cert.residual = cert.check(p).expect("same dimension");
    cert
}
