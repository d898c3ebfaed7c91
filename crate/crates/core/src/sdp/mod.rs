//! Dense primal-dual interior-point solver for small semidefinite feasibility
//! problems.
//!
//! Problem form: find block-diagonal `X ⪰ 0` and free `u` with
//! `⟨A_i, X⟩ + Σ_k F_ik u_k = b_i`. Feasibility is decided through the
//! strengthened problem `max t` subject to `A(X + t·Id) + F u = b`, whose
//! optimal value is positive, zero or negative exactly when the original
//! problem is strictly feasible, weakly feasible or infeasible. A negative
//! optimum comes with a Farkas ray from the dual.

mod io;
mod ipm;

pub use io::{read_triplets, write_triplets};
pub use ipm::TRACE_ENV;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use ipm::{Core, IpmOptions, IpmOutcome};

pub const DEFAULT_FEAS_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITERS: usize = 200;
/// Upper bound imposed on the slack `t` by [`min_eig_slack`].
pub const SLACK_CAP: f64 = 1e3;

/// One coefficient of a symmetric constraint matrix. For `row < col` the value
/// sits at both `(row, col)` and `(col, row)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl Entry {
    pub fn new(block: usize, row: usize, col: usize, value: f64) -> Self {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        Entry {
            block,
            row,
            col,
            value,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Constraint {
    pub entries: Vec<Entry>,
    /// Coefficients `(k, F_ik)` of the free variables.
    pub free: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Linear objective `⟨C, X⟩ + c_fᵀu`, minimised.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Objective {
    pub entries: Vec<Entry>,
    pub free: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub num_free: usize,
    pub constraints: Vec<Constraint>,
    pub objective: Option<Objective>,
}

impl SdpProblem {
    pub fn new(block_dims: Vec<usize>) -> Self {
        SdpProblem {
            block_dims,
            ..Default::default()
        }
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn validate(&self) -> Result<()> {
        let check_entries = |entries: &[Entry]| -> Result<()> {
            for e in entries {
                let d = *self.block_dims.get(e.block).ok_or(Error::DimensionMismatch {
                    expected: self.block_dims.len(),
                    got: e.block + 1,
                })?;
                if e.row > e.col || e.col >= d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: e.col.max(e.row) + 1,
                    });
                }
                if !e.value.is_finite() {
                    return Err(Error::InvalidArgument("non-finite coefficient".into()));
                }
            }
            Ok(())
        };
        let check_free = |free: &[(usize, f64)]| -> Result<()> {
            for &(k, v) in free {
                if k >= self.num_free || !v.is_finite() {
                    return Err(Error::DimensionMismatch {
                        expected: self.num_free,
                        got: k + 1,
                    });
                }
            }
            Ok(())
        };
        if self.block_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("empty block".into()));
        }
        for c in &self.constraints {
            check_entries(&c.entries)?;
            check_free(&c.free)?;
            if !c.rhs.is_finite() {
                return Err(Error::InvalidArgument("non-finite right-hand side".into()));
            }
        }
        if let Some(obj) = &self.objective {
            check_entries(&obj.entries)?;
            check_free(&obj.free)?;
        }
        Ok(())
    }

    /// `⟨A_i, X⟩ + F_i u` for every constraint.
    pub fn apply(&self, x: &[DMatrix<f64>], u: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| {
                let mut acc = 0.0;
                for e in &c.entries {
                    let v = x[e.block][(e.row, e.col)];
                    acc += if e.row == e.col { e.value * v } else { 2.0 * e.value * v };
                }
                for &(k, f) in &c.free {
                    acc += f * u[k];
                }
                acc
            })
            .collect()
    }

    /// `Σ_i w_i A_i` per block.
    pub fn adjoint(&self, w: &[f64]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> =
            self.block_dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
        for (c, wi) in self.constraints.iter().zip(w) {
            for e in &c.entries {
                out[e.block][(e.row, e.col)] += wi * e.value;
                if e.row != e.col {
                    out[e.block][(e.col, e.row)] += wi * e.value;
                }
            }
        }
        out
    }

    /// `Σ_i w_i F_ik` for every free variable `k`.
    pub fn adjoint_free(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_free];
        for (c, wi) in self.constraints.iter().zip(w) {
            for &(k, f) in &c.free {
                out[k] += wi * f;
            }
        }
        out
    }

    /// Same problem with every constraint row multiplied by `s`.
    pub fn scaled_rows(&self, s: f64) -> SdpProblem {
        let mut p = self.clone();
        for c in &mut p.constraints {
            for e in &mut c.entries {
                e.value *= s;
            }
            for f in &mut c.free {
                f.1 *= s;
            }
            c.rhs *= s;
        }
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpVerdict {
    Feasible,
    Infeasible,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpPoint {
    pub blocks: Vec<DMatrix<f64>>,
    pub free: Vec<f64>,
}

impl SdpPoint {
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks.iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residuals {
    /// Largest constraint violation of the returned point, each row measured
    /// relative to its coefficient norm.
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpStatus {
    pub verdict: SdpVerdict,
    pub point: Option<SdpPoint>,
    /// Farkas ray `w` (one weight per constraint) with `Σ w_i A_i ⪰ 0`,
    /// `Σ w_i F_i = 0` and `bᵀw < 0`, normalised to `tr(Σ w_i A_i) = 1`.
    pub dual_ray: Option<Vec<f64>>,
    /// Margin `-bᵀw` of the ray.
    pub ray_margin: Option<f64>,
    pub residuals: Residuals,
    /// Approximate optimum of the strengthened problem.
    pub min_eig_slack: f64,
    pub iterations: usize,
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

/// Row norms used to measure residuals (max with 1e-300 to avoid zero division).
fn row_norms(p: &SdpProblem) -> Vec<f64> {
    p.constraints
        .iter()
        .map(|c| {
            let s: f64 = c
                .entries
                .iter()
                .map(|e| if e.row == e.col { e.value * e.value } else { 2.0 * e.value * e.value })
                .sum::<f64>()
                + c.free.iter().map(|f| f.1 * f.1).sum::<f64>();
            s.sqrt().max(1e-300)
        })
        .collect()
}

/// Scaled relative residual `max_i |A_i(X) + F_i u - b_i| / ‖row_i‖`.
pub fn constraint_residual(p: &SdpProblem, point: &SdpPoint) -> f64 {
    let ax = p.apply(&point.blocks, &point.free);
    let norms = row_norms(p);
    ax.iter()
        .zip(&p.constraints)
        .zip(&norms)
        .map(|((v, c), s)| ((v - c.rhs) / s).abs())
        .fold(0.0, f64::max)
}

/// Checks a Farkas ray in floating point: `Σ w_i A_i` PSD, free part zero,
/// and `bᵀw ≤ -margin` after normalising the trace to one.
pub fn verify_ray(p: &SdpProblem, w: &[f64], margin: f64) -> bool {
    let z = p.adjoint(w);
    let tr: f64 = z.iter().map(|m| m.trace()).sum();
    if !(tr > 0.0) {
        return false;
    }
    let psd = z.iter().all(|m| min_eigenvalue(m) >= 0.0);
    let wnorm = w.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let free_ok = p.adjoint_free(w).iter().all(|f| f.abs() <= 1e-9 * wnorm);
    let bw: f64 = p.constraints.iter().zip(w).map(|(c, wi)| c.rhs * wi).sum::<f64>() / tr;
    psd && free_ok && bw <= -margin
}

/// Slack formulation with the bound `t ≤ cap`, carried by an extra 1x1 block
/// and a last constraint row `t + s = cap`. The bound keeps problems with a
/// recession direction (typically through free variables) bounded.
fn core_for_slack(p: &SdpProblem, cap: f64) -> Core {
    let norms = row_norms(p);
    let nfree = p.num_free + 1;
    let m = p.constraints.len();
    let mut f = DMatrix::zeros(m + 1, nfree);
    let mut b = DVector::zeros(m + 1);
    let mut a = Vec::with_capacity(m);
    for (i, (c, s)) in p.constraints.iter().zip(&norms).enumerate() {
        let mut trace = 0.0;
        let mut rows = Vec::with_capacity(2 * c.entries.len());
        for e in &c.entries {
            let v = e.value / s;
            rows.push((e.block, e.row, e.col, v));
            if e.row != e.col {
                rows.push((e.block, e.col, e.row, v));
            } else {
                trace += v;
            }
        }
        a.push(rows);
        for &(k, v) in &c.free {
            f[(i, k)] += v / s;
        }
        f[(i, p.num_free)] = trace;
        b[i] = c.rhs / s;
    }
    let mut dims = p.block_dims.clone();
    dims.push(1);
    a.push(vec![(dims.len() - 1, 0, 0, 1.0)]);
    f[(m, p.num_free)] = 1.0;
    b[m] = cap;
    let c_blocks = dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
    let mut cf = DVector::zeros(nfree);
    cf[p.num_free] = -1.0;
    Core {
        dims,
        a,
        f,
        b,
        c: c_blocks,
        cf,
        capped: true,
    }
}

fn core_for_objective(p: &SdpProblem, obj: &Objective) -> Core {
    let norms = row_norms(p);
    let m = p.constraints.len();
    let mut f = DMatrix::zeros(m, p.num_free);
    let mut b = DVector::zeros(m);
    let mut a = Vec::with_capacity(m);
    for (i, (c, s)) in p.constraints.iter().zip(&norms).enumerate() {
        let mut rows = Vec::with_capacity(2 * c.entries.len());
        for e in &c.entries {
            let v = e.value / s;
            rows.push((e.block, e.row, e.col, v));
            if e.row != e.col {
                rows.push((e.block, e.col, e.row, v));
            }
        }
        a.push(rows);
        for &(k, v) in &c.free {
            f[(i, k)] += v / s;
        }
        b[i] = c.rhs / s;
    }
    let mut c_blocks: Vec<DMatrix<f64>> = p.block_dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
    for e in &obj.entries {
        c_blocks[e.block][(e.row, e.col)] += e.value;
        if e.row != e.col {
            c_blocks[e.block][(e.col, e.row)] += e.value;
        }
    }
    let mut cf = DVector::zeros(p.num_free);
    for &(k, v) in &obj.free {
        cf[k] += v;
    }
    Core {
        dims: p.block_dims.clone(),
        a,
        f,
        b,
        c: c_blocks,
        cf,
        capped: false,
    }
}

/// Unscaled dual weights from the solver's weights on normalised rows.
fn unscale(p: &SdpProblem, y: &DVector<f64>) -> Vec<f64> {
    row_norms(p).iter().zip(y.iter()).map(|(s, v)| v / s).collect()
}

fn slack_point(out: &IpmOutcome, num_free: usize) -> (SdpPoint, f64) {
    let t = out.u[num_free];
    let blocks = out.x[..out.x.len() - 1]
        .iter()
        .map(|x| {
            let mut g = x.clone();
            for i in 0..g.nrows() {
                g[(i, i)] += t;
            }
            g
        })
        .collect();
    let free = out.u.iter().take(num_free).copied().collect();
    (SdpPoint { blocks, free }, t)
}

/// Maximises `t` subject to `A(X + t·Id) + F u = b`, `X ⪰ 0`. Returns the
/// approximate optimum and the point `G = X + t·Id`. The optimum is clipped
/// at [`SLACK_CAP`].
pub fn min_eig_slack(p: &SdpProblem) -> Result<(f64, SdpPoint)> {
    min_eig_slack_with(p, DEFAULT_MAX_ITERS)
}

pub fn min_eig_slack_with(p: &SdpProblem, max_iters: usize) -> Result<(f64, SdpPoint)> {
    p.validate()?;
    let core = core_for_slack(p, SLACK_CAP);
    let out = ipm::run(&core, &IpmOptions::converge(max_iters));
    let (point, t) = slack_point(&out, p.num_free);
    Ok((t, point))
}

/// Decides feasibility (and optimises the objective when one is given).
pub fn solve(p: &SdpProblem, feas_tol: f64, max_iters: usize) -> Result<SdpStatus> {
    if !(feas_tol > 0.0) {
        return Err(Error::InvalidArgument("feas_tol must be positive".into()));
    }
    p.validate()?;
    // only the sign of t matters here
    let core = core_for_slack(p, 1.0);
    let mut opts = IpmOptions::converge(max_iters);
    opts.ray_margin = Some(feas_tol);
    let out = ipm::run(&core, &opts);
    let (point, t) = slack_point(&out, p.num_free);
    let residuals = Residuals {
        primal: constraint_residual(p, &point),
        dual: out.dual_residual,
        gap: out.gap,
    };

    let w: Vec<f64> = unscale(p, &out.y.rows(0, p.constraints.len()).into_owned()).iter().map(|v| -v).collect();
    let tr: f64 = p.adjoint(&w).iter().map(|m| m.trace()).sum();
    if t < -feas_tol && tr > 0.0 && verify_ray(p, &w, feas_tol) {
        let w: Vec<f64> = w.iter().map(|v| v / tr).collect();
        let margin = -p.constraints.iter().zip(&w).map(|(c, wi)| c.rhs * wi).sum::<f64>();
        return Ok(SdpStatus {
            verdict: SdpVerdict::Infeasible,
            point: None,
            dual_ray: Some(w),
            ray_margin: Some(margin),
            residuals,
            min_eig_slack: t,
            iterations: out.iterations,
        });
    }

    let feasible = residuals.primal <= feas_tol && point.min_eigenvalue() >= -feas_tol;
    if !feasible {
        return Ok(SdpStatus {
            verdict: SdpVerdict::Inconclusive,
            point: Some(point),
            dual_ray: None,
            ray_margin: None,
            residuals,
            min_eig_slack: t,
            iterations: out.iterations,
        });
    }

    let (point, residuals, iterations) = match &p.objective {
        None => (point, residuals, out.iterations),
        Some(obj) => {
            let oc = core_for_objective(p, obj);
            let o = ipm::run(&oc, &IpmOptions::converge(max_iters));
            let cand = SdpPoint {
                blocks: o.x.clone(),
                free: o.u.iter().copied().collect(),
            };
            let res = constraint_residual(p, &cand);
            if res <= feas_tol && cand.min_eigenvalue() >= -feas_tol {
                let r = Residuals {
                    primal: res,
                    dual: o.dual_residual,
                    gap: o.gap,
                };
                (cand, r, out.iterations + o.iterations)
            } else {
                (point, residuals, out.iterations + o.iterations)
            }
        }
    };
    Ok(SdpStatus {
        verdict: SdpVerdict::Feasible,
        point: Some(point),
        dual_ray: None,
        ray_margin: None,
        residuals,
        min_eig_slack: t,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(rhs: f64) -> SdpProblem {
        let mut p = SdpProblem::new(vec![1]);
        p.add_constraint(Constraint {
            entries: vec![Entry::new(0, 0, 0, 1.0)],
            free: vec![],
            rhs,
        });
        p
    }

    fn fix_matrix(vals: [[f64; 2]; 2]) -> SdpProblem {
        let mut p = SdpProblem::new(vec![2]);
        for (r, c) in [(0, 0), (0, 1), (1, 1)] {
            p.add_constraint(Constraint {
                entries: vec![Entry::new(0, r, c, 1.0)],
                free: vec![],
                rhs: vals[r][c],
            });
        }
        p
    }

    #[test]
    fn scalar_cases() {
        let s = solve(&scalar(1.0), 1e-7, 200).unwrap();
        assert_eq!(s.verdict, SdpVerdict::Feasible);
        assert!((s.point.unwrap().blocks[0][(0, 0)] - 1.0).abs() < 1e-7);
        let s = solve(&scalar(-1.0), 1e-7, 200).unwrap();
        assert_eq!(s.verdict, SdpVerdict::Infeasible);
        assert!(s.ray_margin.unwrap() > 0.5);
    }

    #[test]
    fn trace_constraint() {
        let mut p = SdpProblem::new(vec![2]);
        p.add_constraint(Constraint {
            entries: vec![Entry::new(0, 0, 0, 1.0), Entry::new(0, 1, 1, 1.0)],
            free: vec![],
            rhs: 1.0,
        });
        let s = solve(&p, 1e-7, 200).unwrap();
        assert_eq!(s.verdict, SdpVerdict::Feasible);
        let x = &s.point.unwrap().blocks[0];
        assert!((x.trace() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn slack_values() {
        let (t, _) = min_eig_slack(&fix_matrix([[1.0, 0.0], [0.0, 1.0]])).unwrap();
        assert!((t - 1.0).abs() < 1e-7, "{t}");
        let (t, _) = min_eig_slack(&fix_matrix([[1.0, 0.0], [0.0, -1.0]])).unwrap();
        assert!((t + 1.0).abs() < 1e-7, "{t}");
        let (t, _) = min_eig_slack(&fix_matrix([[0.0, 0.0], [0.0, 0.0]])).unwrap();
        assert!(t.abs() < 1e-7, "{t}");
    }

    #[test]
    fn free_variables() {
        // x + u = -1 is feasible with a free u
        let mut p = scalar(-1.0);
        p.num_free = 1;
        p.constraints[0].free.push((0, 1.0));
        assert_eq!(solve(&p, 1e-7, 200).unwrap().verdict, SdpVerdict::Feasible);
    }

    #[test]
    fn objective_mode() {
        // min X_00 subject to tr X = 1 on a 2x2 block
        let mut p = SdpProblem::new(vec![2]);
        p.add_constraint(Constraint {
            entries: vec![Entry::new(0, 0, 0, 1.0), Entry::new(0, 1, 1, 1.0)],
            free: vec![],
            rhs: 1.0,
        });
        p.objective = Some(Objective {
            entries: vec![Entry::new(0, 0, 0, 1.0)],
            free: vec![],
        });
        let s = solve(&p, 1e-7, 200).unwrap();
        assert_eq!(s.verdict, SdpVerdict::Feasible);
        assert!(s.point.unwrap().blocks[0][(0, 0)].abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_indices() {
        let mut p = scalar(1.0);
        p.constraints[0].entries.push(Entry::new(0, 0, 3, 1.0));
        assert!(matches!(solve(&p, 1e-7, 10), Err(Error::DimensionMismatch { .. })));
    }
}
