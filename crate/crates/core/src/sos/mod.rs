//! Inner relaxation: `r^m·P` as a sum of squares modulo the Plücker relations,
//! where `r` is the sum of squares of the Plücker coordinates.
//!
//! Two SDP formulations are available. [`build_sos_sdp`] uses a Gram matrix over
//! all monomials of degree `m+1` and free multipliers for the ideal part.
//! [`build_reduced_sos_sdp`] works in the quotient ring directly: Gram matrix
//! over standard monomials, one constraint per standard monomial of degree
//! `2m+2`. Both describe the same set. The reduced one has no multipliers and
//! none of the zero directions the full Gram matrix picks up from the ideal,
//! which is what the membership test solves.

mod cert;
mod straighten;

use std::collections::HashMap;

use num_traits::{ToPrimitive, Zero};

pub use cert::{format_monomial, SosCertificate};
pub use straighten::{
    add_scaled, expand_ideal, monomials, mul_monomials, mul_polys, quad_polynomial, r_power,
    relation_polynomial, IdealPart, Monomial, Polynomial, Reduction, Straightener,
};

use crate::error::{Error, Result};
use crate::sdp::{self, Constraint, Entry, SdpProblem, SdpVerdict};
use crate::tensorspace::{binomial, wedge4_basis, wedge4_element, ModCurvOp};

/// A quadratic form in the Plücker variables, given by a symmetric
/// representative. Only its class modulo the Plücker relations matters here.
pub type QuadForm = ModCurvOp;

/// Default cap on the Gram matrix dimension of a membership problem.
pub const DEFAULT_MAX_PROBLEM_DIM: usize = 60;

/// Environment variable overriding [`DEFAULT_MAX_PROBLEM_DIM`].
pub const MAX_DIM_ENV: &str = "CURVCONE_MAX_PROBLEM_DIM";

pub fn max_problem_dim() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_PROBLEM_DIM)
}

/// The quadratic Plücker relations, one per basis element of `∧⁴ℝⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PluckerIdealBasis {
    pub n: usize,
    pub quads: Vec<[usize; 4]>,
    pub generators: Vec<ModCurvOp>,
}

pub fn plucker_ideal(n: usize) -> PluckerIdealBasis {
    let quads = wedge4_basis(n);
    let generators = (0..quads.len()).map(|q| wedge4_element(n, q)).collect();
    PluckerIdealBasis { n, quads, generators }
}

/// Exact expansion of `r^m · P`.
pub fn multiply_by_r_power(p: &QuadForm, m: usize) -> Polynomial {
    mul_polys(&r_power(p.dim(), m), &quad_polynomial(p))
}

/// Number of standard monomials of degree `d`, i.e. the dimension of the
/// degree-`d` part of the Grassmannian coordinate ring.
pub fn standard_count(n: usize, d: usize) -> usize {
    if n < 2 {
        return usize::from(d == 0);
    }
    binomial(n + d - 1, d) * binomial(n + d - 2, d) / (d + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formulation {
    /// Gram over all monomials, free multipliers for the ideal.
    Multipliers,
    /// Gram over standard monomials, constraints in the quotient ring.
    Reduced,
}

/// An SOS feasibility problem together with the meaning of its indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SosSdp {
    pub formulation: Formulation,
    pub n: usize,
    pub m: usize,
    pub problem: SdpProblem,
    /// Index set of the Gram block.
    pub gram_basis: Vec<Monomial>,
    /// Monomial of each constraint row.
    pub constraint_monomials: Vec<Monomial>,
    /// `(β, q)` of each free variable: the coefficient of `x^β g_q`.
    pub multipliers: Vec<(Monomial, usize)>,
}

fn to_f64(r: &crate::exactmath::Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if binomial(n, 2) > u16::MAX as usize {
        return Err(Error::InvalidArgument(format!("n = {n} is too large")));
    }
    Ok(())
}

/// Gram entry `(a, b)` contributes `G_ab + G_ba` to the product `s_a s_b`, and
/// an off-diagonal [`Entry`] stands for both positions, so the value is the
/// coefficient itself in both cases.
fn gram_entry(a: usize, b: usize, coeff: f64) -> Entry {
    Entry::new(0, a, b, coeff)
}

/// Full formulation: `r^m·P = [x]ᵗ G [x] + Σ c_{β,q} x^β g_q` coefficientwise,
/// over all monomials of degree `m+1` (Gram) and `2m+2` (constraints).
pub fn build_sos_sdp(p: &QuadForm, m: usize) -> Result<SosSdp> {
    let n = p.n();
    check_n(n)?;
    let vars = p.dim();
    let gram_basis = monomials(vars, m + 1);
    let constraint_monomials = monomials(vars, 2 * m + 2);
    let row_of: HashMap<&Monomial, usize> =
        constraint_monomials.iter().enumerate().map(|(i, mo)| (mo, i)).collect();
    let mut rows: Vec<Constraint> = vec![Constraint::default(); constraint_monomials.len()];

    for (a, sa) in gram_basis.iter().enumerate() {
        for (b, sb) in gram_basis.iter().enumerate().skip(a) {
            rows[row_of[&mul_monomials(sa, sb)]].entries.push(gram_entry(a, b, 1.0));
        }
    }
    let betas = monomials(vars, 2 * m);
    let nq = wedge4_basis(n).len();
    let mut multipliers = Vec::with_capacity(betas.len() * nq);
    for q in 0..nq {
        let g = relation_polynomial(n, q);
        for beta in &betas {
            let k = multipliers.len();
            multipliers.push((beta.clone(), q));
            for (mo, c) in &g {
                rows[row_of[&mul_monomials(beta, mo)]].free.push((k, to_f64(c)));
            }
        }
    }
    for (mo, c) in multiply_by_r_power(p, m) {
        rows[row_of[&mo]].rhs = to_f64(&c);
    }

    let mut problem = SdpProblem::new(vec![gram_basis.len()]);
    problem.num_free = multipliers.len();
    for r in rows {
        problem.add_constraint(r);
    }
    Ok(SosSdp {
        formulation: Formulation::Multipliers,
        n,
        m,
        problem,
        gram_basis,
        constraint_monomials,
        multipliers,
    })
}

/// Quotient-ring formulation: `NF(r^m·P) = Σ G_ab NF(s_a s_b)` over standard
/// monomials.
pub fn build_reduced_sos_sdp(p: &QuadForm, m: usize) -> Result<SosSdp> {
    check_n(p.n())?;
    let mut s = Straightener::new(p.n());
    let target = s.reduce_poly(&multiply_by_r_power(p, m));
    Ok(reduced_with(&mut s, &target.standard, m))
}

fn reduced_with(s: &mut Straightener, target: &Polynomial, m: usize) -> SosSdp {
    let gram_basis = s.standard_monomials(m + 1);
    let constraint_monomials = s.standard_monomials(2 * m + 2);
    let row_of: HashMap<&Monomial, usize> =
        constraint_monomials.iter().enumerate().map(|(i, mo)| (mo, i)).collect();
    let mut rows: Vec<Constraint> = vec![Constraint::default(); constraint_monomials.len()];
    for (a, sa) in gram_basis.iter().enumerate() {
        for (b, sb) in gram_basis.iter().enumerate().skip(a) {
            let red = s.reduce(&mul_monomials(sa, sb));
            for (mo, c) in &red.standard {
                rows[row_of[mo]].entries.push(gram_entry(a, b, to_f64(c)));
            }
        }
    }
    for (mo, c) in target {
        rows[row_of[mo]].rhs = to_f64(c);
    }
    let mut problem = SdpProblem::new(vec![gram_basis.len()]);
    for r in rows {
        problem.add_constraint(r);
    }
    SosSdp {
        formulation: Formulation::Reduced,
        n: s.n(),
        m,
        problem,
        gram_basis,
        constraint_monomials,
        multipliers: Vec::new(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InnerOutcome {
    Yes(Box<SosCertificate>),
    /// The SDP is infeasible; `margin` is the verified Farkas margin.
    NoCertificate { margin: f64 },
    /// Neither a feasible point nor a dual ray within tolerance.
    /// `slack` is the approximate optimum of the max-min-eigenvalue problem.
    Inconclusive { slack: f64 },
}

impl InnerOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, InnerOutcome::Yes(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            InnerOutcome::Yes(_) => "YES",
            InnerOutcome::NoCertificate { .. } => "NO_CERTIFICATE",
            InnerOutcome::Inconclusive { .. } => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Largest admissible Gram dimension.
    pub max_dim: usize,
}

impl InnerOptions {
    pub fn new(tol: f64) -> Self {
        InnerOptions {
            tol,
            max_iters: sdp::DEFAULT_MAX_ITERS,
            max_dim: max_problem_dim(),
        }
    }
}

/// Membership of `P` in the inner relaxation of level `m`.
pub fn inner_membership(p: &QuadForm, m: usize, tol: f64) -> Result<InnerOutcome> {
    inner_membership_with(p, m, &InnerOptions::new(tol))
}

pub fn inner_membership_with(p: &QuadForm, m: usize, opts: &InnerOptions) -> Result<InnerOutcome> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let n = p.n();
    check_n(n)?;
    let dim = standard_count(n, m + 1);
    if dim > opts.max_dim {
        return Err(Error::SizeCap { dim, cap: opts.max_dim });
    }
    let mut s = Straightener::new(n);
    let target = s.reduce_poly(&multiply_by_r_power(p, m));
    let sos = reduced_with(&mut s, &target.standard, m);
    let status = sdp::solve(&sos.problem, opts.tol, opts.max_iters)?;
    Ok(match status.verdict {
        SdpVerdict::Feasible => {
            let point = status.point.expect("feasible status carries a point");
            let cert = cert::harden(p, m, &sos.gram_basis, &point.blocks[0], &target, &mut s, opts.tol);
            InnerOutcome::Yes(Box::new(cert))
        }
        SdpVerdict::Infeasible => InnerOutcome::NoCertificate {
            margin: status.ray_margin.unwrap_or(0.0),
        },
        SdpVerdict::Inconclusive => InnerOutcome::Inconclusive {
            slack: status.min_eig_slack,
        },
    })
}

/// Coefficient max-norm of a polynomial.
pub fn max_coefficient(p: &Polynomial) -> crate::exactmath::Rat {
    p.values()
        .map(|c| if c < &Zero::zero() { -c } else { c.clone() })
        .max()
        .unwrap_or_else(Zero::zero)
}
