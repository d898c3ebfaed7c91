//! Infeasible-start primal-dual path following with the HKM search direction
//! and Mehrotra's predictor-corrector.
//!
//! Primal: `min ⟨C, X⟩ + c_fᵀu` s.t. `A(X) + F u = b`, `X ⪰ 0`.
//! Dual:   `max bᵀy` s.t. `Aᵀy + Z = C`, `Fᵀy = c_f`, `Z ⪰ 0`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use rayon::prelude::*;

/// Sparse constraint row: `(block, p, q, v)` with both `(p, q)` and `(q, p)`
/// listed for off-diagonal positions.
pub(super) type Row = Vec<(usize, usize, usize, f64)>;

pub(super) struct Core {
    pub dims: Vec<usize>,
    pub a: Vec<Row>,
    pub f: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: Vec<DMatrix<f64>>,
    pub cf: DVector<f64>,
    /// The last row and last block hold the slack bound and are not part of
    /// the problem a Farkas ray certifies.
    pub capped: bool,
}

/// Set to print one progress line per iteration on stderr.
pub const TRACE_ENV: &str = "CURVCONE_IPM_TRACE";

/// Iterations without a new best iterate before giving up.
const STALL_ITERS: usize = 30;

pub(super) struct IpmOptions {
    pub max_iters: usize,
    pub tol: f64,
    /// Stop as soon as `-y` is a Farkas ray with this margin.
    pub ray_margin: Option<f64>,
}

impl IpmOptions {
    pub fn converge(max_iters: usize) -> Self {
        IpmOptions {
            max_iters,
            tol: 1e-10,
            ray_margin: None,
        }
    }
}

pub(super) struct IpmOutcome {
    pub x: Vec<DMatrix<f64>>,
    pub y: DVector<f64>,
    pub u: DVector<f64>,
    pub iterations: usize,
    pub dual_residual: f64,
    pub gap: f64,
}

type Blocks = Vec<DMatrix<f64>>;

struct Direction {
    dx: Blocks,
    dz: Blocks,
    dy: DVector<f64>,
    du: DVector<f64>,
}

impl Core {
    fn apply(&self, k: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.a.len(),
            self.a.iter().map(|row| row.iter().map(|&(bl, p, q, v)| v * k[bl][(p, q)]).sum::<f64>()),
        )
    }

    fn adjoint(&self, y: &DVector<f64>) -> Blocks {
        let mut out: Blocks = self.dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
        for (row, yi) in self.a.iter().zip(y.iter()) {
            if *yi == 0.0 {
                continue;
            }
            for &(bl, p, q, v) in row {
                out[bl][(p, q)] += yi * v;
            }
        }
        out
    }

    /// `M_ij = tr(A_i X A_j Z⁻¹)`.
    fn schur(&self, x: &[DMatrix<f64>], zinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.a.len();
        let cols: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                // B = X A_j Z⁻¹, one dense matrix per touched block
                let mut bmats: Vec<Option<DMatrix<f64>>> = vec![None; self.dims.len()];
                for &(bl, p, q, v) in &self.a[j] {
                    let d = self.dims[bl];
                    let bm = bmats[bl].get_or_insert_with(|| DMatrix::zeros(d, d));
                    let xc = x[bl].column(p);
                    let zr = zinv[bl].row(q);
                    for c in 0..d {
                        let s = v * zr[c];
                        if s != 0.0 {
                            let mut col = bm.column_mut(c);
                            col.axpy(s, &xc, 1.0);
                        }
                    }
                }
                self.a
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|&(bl, p, q, v)| bmats[bl].as_ref().map_or(0.0, |bm| v * bm[(p, q)]))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let mut mm = DMatrix::from_fn(m, m, |i, j| cols[j][i]);
        let t = mm.transpose();
        mm += t;
        mm *= 0.5;
        mm
    }
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn scaled_identity(dims: &[usize], s: f64) -> Blocks {
    dims.iter().map(|&d| DMatrix::identity(d, d) * s).collect()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

fn inverse_spd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    Cholesky::new(m.clone()).map(|c| c.inverse())
}

/// Largest `α` with `X + α·dX ⪰ 0` (infinite if `dX ⪰ 0`).
fn max_step(x: &[DMatrix<f64>], dx: &[DMatrix<f64>]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        let Some(ch) = Cholesky::new(xb.clone()) else {
            return 0.0;
        };
        let l = ch.l();
        let Some(t) = l.solve_lower_triangular(db) else {
            return 0.0;
        };
        let Some(w) = l.solve_lower_triangular(&t.transpose()) else {
            return 0.0;
        };
        let lam = SymmetricEigen::new(sym(w)).eigenvalues.min();
        if lam < 0.0 {
            alpha = alpha.min(-1.0 / lam);
        }
    }
    alpha
}

/// Cholesky with increasing diagonal regularisation.
fn factor(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Some(c);
    }
    let scale = m.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let mut reg = 1e-14 * scale;
    for _ in 0..12 {
        let mut r = m.clone();
        for i in 0..r.nrows() {
            r[(i, i)] += reg;
        }
        if let Some(c) = Cholesky::new(r) {
            return Some(c);
        }
        reg *= 10.0;
    }
    None
}

fn solve_small(s: &DMatrix<f64>, r: &DVector<f64>) -> Option<DVector<f64>> {
    if s.nrows() == 0 {
        return Some(DVector::zeros(0));
    }
    if let Some(c) = factor(s) {
        return Some(c.solve(r));
    }
    s.clone().lu().solve(r)
}

#[derive(Clone)]
struct State {
    x: Blocks,
    z: Blocks,
    y: DVector<f64>,
    u: DVector<f64>,
}

fn initial_state(core: &Core) -> State {
    let n: usize = core.dims.iter().sum();
    let sqrt_n = (n as f64).sqrt();
    let mut xi: f64 = 10.0f64.max(sqrt_n);
    let mut eta: f64 = 10.0f64.max(sqrt_n);
    for (i, row) in core.a.iter().enumerate() {
        let na = row.iter().map(|e| e.3 * e.3).sum::<f64>().sqrt();
        xi = xi.max(n as f64 * (1.0 + core.b[i].abs()) / (1.0 + na));
        eta = eta.max(na);
    }
    let cn = core.c.iter().map(|c| c.norm()).sum::<f64>();
    eta = eta.max((1.0 + cn) / sqrt_n.max(1.0));
    State {
        x: scaled_identity(&core.dims, xi),
        z: scaled_identity(&core.dims, eta),
        y: DVector::zeros(core.a.len()),
        u: DVector::zeros(core.f.ncols()),
    }
}

struct Residual {
    rp: DVector<f64>,
    rd: Blocks,
    rf: DVector<f64>,
}

fn residual(core: &Core, s: &State) -> Residual {
    let rp = &core.b - core.apply(&s.x) - &core.f * &s.u;
    let aty = core.adjoint(&s.y);
    let rd = core
        .c
        .iter()
        .zip(&aty)
        .zip(&s.z)
        .map(|((c, a), z)| c - a - z)
        .collect();
    let rf = &core.cf - core.f.transpose() * &s.y;
    Residual { rp, rd, rf }
}

fn ray_found(core: &Core, y: &DVector<f64>, margin: f64) -> bool {
    let mut w = -y;
    if core.capped {
        let m = w.len();
        w[m - 1] = 0.0;
    }
    let zw = core.adjoint(&w);
    let tr: f64 = zw.iter().map(|m| m.trace()).sum();
    if !(tr > 0.0) {
        return false;
    }
    let nf = core.f.ncols();
    let ftw = core.f.transpose() * &w;
    let wn = w.amax().max(1e-300);
    // the last free column of the slack formulation carries the trace
    if (0..nf.saturating_sub(1)).any(|k| ftw[k].abs() > 1e-9 * wn) {
        return false;
    }
    if core.b.dot(&w) / tr > -margin {
        return false;
    }
    zw.into_iter().all(|m| SymmetricEigen::new(m).eigenvalues.min() >= 0.0)
}

pub(super) fn run(core: &Core, opts: &IpmOptions) -> IpmOutcome {
    let n: usize = core.dims.iter().sum::<usize>().max(1);
    let mut s = initial_state(core);
    let bnorm = 1.0 + core.b.amax();
    let cnorm = 1.0 + core.c.iter().map(|c| c.norm()).sum::<f64>() + core.cf.amax();
    let mut iterations = 0;
    let mut dual_residual = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut small_steps = 0;
    let trace = std::env::var_os(TRACE_ENV).is_some();
    // degenerate problems can lose accuracy after reaching it, so the iterate
    // with the smallest worst-case residual is what gets reported
    let mut best: Option<(f64, State, usize, f64, f64)> = None;

    for it in 0..opts.max_iters {
        iterations = it;
        let res = residual(core, &s);
        let mu = inner(&s.x, &s.z) / n as f64;
        let pobj = inner(&core.c, &s.x) + core.cf.dot(&s.u);
        let dobj = core.b.dot(&s.y);
        let pinf = res.rp.amax() / bnorm;
        dual_residual = (res.rd.iter().map(|m| m.norm()).fold(0.0, f64::max) + res.rf.amax()) / cnorm;
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if trace {
            eprintln!("ipm {it:3} pinf {pinf:.2e} dinf {dual_residual:.2e} gap {gap:.2e} mu {mu:.2e}");
        }
        if pinf < opts.tol && dual_residual < opts.tol && gap < opts.tol {
            break;
        }
        let merit = pinf.max(dual_residual).max(gap);
        if merit.is_finite() && best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, s.clone(), it, dual_residual, gap));
        }
        if let Some(margin) = opts.ray_margin {
            if ray_found(core, &s.y, margin) {
                best = None;
                break;
            }
        }
        if best.as_ref().is_some_and(|b| it >= b.2 + STALL_ITERS) {
            break;
        }

        let Some(zinv) = s.z.iter().map(inverse_spd).collect::<Option<Blocks>>() else {
            break;
        };
        let mm = core.schur(&s.x, &zinv);
        let Some(chol) = factor(&mm) else {
            break;
        };
        let minv_f = chol.solve(&core.f);
        let schur_f = core.f.transpose() * &minv_f;

        let xrdz: Blocks = s
            .x
            .iter()
            .zip(&res.rd)
            .zip(&zinv)
            .map(|((x, rd), zi)| x * rd * zi)
            .collect();
        let a_xrdz = core.apply(&xrdz);

        let direction = |rc_zinv: &Blocks| -> Option<Direction> {
            let r1 = &res.rp - core.apply(rc_zinv) + &a_xrdz;
            let minv_r1 = chol.solve(&r1);
            let du = solve_small(&schur_f, &(core.f.transpose() * &minv_r1 - &res.rf))?;
            let dy = &minv_r1 - &minv_f * &du;
            let aty = core.adjoint(&dy);
            let dz: Blocks = res.rd.iter().zip(&aty).map(|(r, a)| r - a).collect();
            let dx: Blocks = rc_zinv
                .iter()
                .zip(&s.x)
                .zip(&dz)
                .zip(&zinv)
                .map(|(((rc, x), dzb), zi)| sym(rc - x * dzb * zi))
                .collect();
            Some(Direction { dx, dz, dy, du })
        };

        // predictor
        let rc_aff: Blocks = s.x.iter().map(|x| -x).collect();
        let Some(aff) = direction(&rc_aff) else {
            break;
        };
        let ap = max_step(&s.x, &aff.dx).min(1.0);
        let ad = max_step(&s.z, &aff.dz).min(1.0);
        let x_aff: Blocks = s.x.iter().zip(&aff.dx).map(|(x, d)| x + d * ap).collect();
        let z_aff: Blocks = s.z.iter().zip(&aff.dz).map(|(z, d)| z + d * ad).collect();
        let mu_aff = inner(&x_aff, &z_aff) / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let rc: Blocks = zinv
            .iter()
            .zip(&s.x)
            .zip(aff.dx.iter().zip(&aff.dz))
            .map(|((zi, x), (dxa, dza))| zi * (sigma * mu) - x - dxa * dza * zi)
            .collect();
        let Some(dir) = direction(&rc) else {
            break;
        };
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let ap = (gamma * max_step(&s.x, &dir.dx)).min(1.0);
        let ad = (gamma * max_step(&s.z, &dir.dz)).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            small_steps += 1;
            if small_steps >= 3 {
                break;
            }
        } else {
            small_steps = 0;
        }
        for (x, d) in s.x.iter_mut().zip(&dir.dx) {
            *x += d * ap;
        }
        s.u += &dir.du * ap;
        s.y += &dir.dy * ad;
        for (z, d) in s.z.iter_mut().zip(&dir.dz) {
            *z += d * ad;
        }
        iterations = it + 1;
    }

    if let Some((_, b, _, dr, g)) = best {
        s = b;
        dual_residual = dr;
        gap = g;
    }
    IpmOutcome {
        x: s.x,
        y: s.y,
        u: s.u,
        iterations,
        dual_residual,
        gap,
    }
}
