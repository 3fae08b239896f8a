use nalgebra::{Cholesky, DMatrix, DVector};

use crate::qp::QpProblem;

/// Dual coordinate-ascent settings.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub kkt_tol: f64,
    /// Total dual sweep budget across penalty rounds.
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kkt_tol: 1e-6,
            max_iters: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Converged,
    MaxIter,
    InfeasibleFallback,
}

impl SolverStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverStatus::Converged => "converged",
            SolverStatus::MaxIter => "max-iter",
            SolverStatus::InfeasibleFallback => "infeasible-fallback",
        }
    }
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    /// Input trajectory (length `horizon * n_u`), exactly feasible for the
    /// hard box and rate constraints.
    pub inputs: DVector<f64>,
    pub status: SolverStatus,
    /// Dual coordinate-ascent sweeps performed (all penalty rounds).
    pub iterations: usize,
    pub kkt_residual: f64,
    /// Full objective of the returned trajectory with minimal slacks.
    pub objective: f64,
}

/// Project an input trajectory onto the box and rate constraint chain.
/// Returns `None` when some step has an empty feasible interval.
fn project_input_chain(qp: &QpProblem, u: &mut DVector<f64>) -> Option<()> {
    let mut prev_p = qp.u_prev[0];
    for i in 0..qp.horizon {
        for c in 0..qp.n_u {
            let mut lo = qp.u_lb[c];
            let mut hi = qp.u_ub[c];
            if c == 0 {
                lo = lo.max(prev_p + qp.dp_bounds.0);
                hi = hi.min(prev_p + qp.dp_bounds.1);
            }
            if lo > hi + 1e-9 {
                return None;
            }
            let idx = i * qp.n_u + c;
            u[idx] = u[idx].clamp(lo, hi.max(lo));
            if c == 0 {
                prev_p = u[idx];
            }
        }
    }
    Some(())
}

fn fallback(qp: &QpProblem, iterations: usize) -> QpSolution {
    let mut u = DVector::zeros(qp.input_dim());
    for i in 0..qp.horizon {
        for c in 0..qp.n_u {
            u[i * qp.n_u + c] = qp.u_prev[c].clamp(qp.u_lb[c], qp.u_ub[c]);
        }
    }
    let (hi, lo) = qp.slacks_for(&u, qp.x_bounds);
    let z = qp.pack(&u, &hi, &lo);
    QpSolution {
        objective: qp.objective(&z),
        inputs: u,
        status: SolverStatus::InfeasibleFallback,
        iterations,
        kkt_residual: f64::INFINITY,
    }
}

/// Box and rate rows over the inputs alone: `A u <= b`.
fn input_rows(qp: &QpProblem) -> (DMatrix<f64>, DVector<f64>) {
    let nu = qp.input_dim();
    let h = qp.horizon;
    let m = 2 * nu + 2 * h;
    let mut a = DMatrix::zeros(m, nu);
    let mut b = DVector::zeros(m);
    let mut row = 0;
    for i in 0..h {
        for c in 0..qp.n_u {
            a[(row, i * qp.n_u + c)] = 1.0;
            b[row] = qp.u_ub[c];
            row += 1;
        }
    }
    for i in 0..h {
        for c in 0..qp.n_u {
            a[(row, i * qp.n_u + c)] = -1.0;
            b[row] = -qp.u_lb[c];
            row += 1;
        }
    }
    for i in 0..h {
        a[(row, i * qp.n_u)] = 1.0;
        if i == 0 {
            b[row] = qp.dp_bounds.1 + qp.u_prev[0];
        } else {
            a[(row, (i - 1) * qp.n_u)] = -1.0;
            b[row] = qp.dp_bounds.1;
        }
        row += 1;
    }
    for i in 0..h {
        a[(row, i * qp.n_u)] = -1.0;
        if i == 0 {
            b[row] = -(qp.dp_bounds.0 + qp.u_prev[0]);
        } else {
            a[(row, (i - 1) * qp.n_u)] = 1.0;
            b[row] = -qp.dp_bounds.0;
        }
        row += 1;
    }
    (a, b)
}

/// Exact KKT solve on a guessed active set, with sign-driven refinement.
/// Returns the polished point and its residual when the guess certifies.
fn active_set_polish(
    z_unc: &DVector<f64>,
    hi_at: &DMatrix<f64>,
    p_raw: &DMatrix<f64>,
    d_raw: &DVector<f64>,
    b_len: usize,
    mut act: Vec<usize>,
    tol: f64,
) -> Option<(DVector<f64>, f64)> {
    for _ in 0..6 {
        if act.is_empty() {
            return None;
        }
        let k = act.len();
        let p_act = DMatrix::from_fn(k, k, |i, j| p_raw[(act[i], act[j])]);
        let d_act = DVector::from_fn(k, |i, _| d_raw[act[i]]);
        let svd = p_act.svd(true, true);
        let mu = svd.solve(&d_act, 1e-12).ok()?;
        if let Some(worst) = (0..k).filter(|&i| mu[i] < -1e-9).min_by(|&i, &j| {
            mu[i].partial_cmp(&mu[j]).expect("finite multipliers")
        }) {
            act.remove(worst);
            continue;
        }
        let mut lambda = DVector::zeros(b_len);
        for (i, &row) in act.iter().enumerate() {
            lambda[row] = mu[i].max(0.0);
        }
        let z = z_unc - hi_at * &lambda;
        let s = d_raw - p_raw * &lambda;
        let mut primal = 0.0f64;
        let mut comp = 0.0f64;
        for i in 0..b_len {
            primal = primal.max(s[i]);
            comp = comp.max((lambda[i] * s[i]).abs());
        }
        let kkt = primal.max(0.0).max(comp);
        if kkt <= tol {
            return Some((z, kkt));
        }
        return None;
    }
    None
}

/// Dual projected SOR on `min 0.5 u^T H u + f^T u  s.t.  A u <= b`, with a
/// periodic active-set polish. Returns `(u, sweeps, dual_residual)`.
fn dual_sor(
    h_mat: &DMatrix<f64>,
    f: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    tol: f64,
    sweep_budget: usize,
) -> Option<(DVector<f64>, usize, f64)> {
    let chol = Cholesky::new(h_mat.clone())?;
    let m = b.len();
    let z_unc = chol.solve(&(-f));
    let hi_at = chol.solve(&a.transpose());
    let p_raw = a * &hi_at;
    let d_raw = a * &z_unc - b;

    let viol0 = d_raw.iter().fold(0.0f64, |acc, v| acc.max(*v));
    if viol0 <= tol {
        return Some((z_unc, 0, viol0.max(0.0)));
    }

    // Unit-diagonal scaling keeps the sweep rate independent of row units.
    let scale = DVector::from_fn(m, |i, _| p_raw[(i, i)].max(1e-300).sqrt());
    let p = DMatrix::from_fn(m, m, |i, j| p_raw[(i, j)] / (scale[i] * scale[j]));
    let d = DVector::from_fn(m, |i, _| d_raw[i] / scale[i]);

    let mut lambda = DVector::<f64>::zeros(m);
    let mut sweeps = 0;
    let mut kkt = f64::INFINITY;
    const OMEGA: f64 = 1.5;
    while sweeps < sweep_budget {
        sweeps += 1;
        for i in 0..m {
            let mut g_i = d[i];
            for j in 0..m {
                if j != i {
                    g_i -= p[(i, j)] * lambda[j];
                }
            }
            lambda[i] = (lambda[i] + OMEGA * (g_i - lambda[i])).max(0.0);
        }
        let s = &d - &p * &lambda;
        let mut primal = 0.0f64;
        let mut comp = 0.0f64;
        for i in 0..m {
            primal = primal.max(s[i] * scale[i]);
            comp = comp.max((lambda[i] * s[i]).abs());
        }
        kkt = primal.max(0.0).max(comp);
        if kkt <= tol {
            break;
        }
        // The sweeps identify the active face quickly; the polish then pins
        // the multipliers exactly instead of waiting out the slow tail.
        if sweeps % 10 == 0 {
            let act: Vec<usize> = (0..m)
                .filter(|&i| lambda[i] > 1e-12 || s[i].abs() <= 1e-7)
                .collect();
            if let Some((z, polished_kkt)) =
                active_set_polish(&z_unc, &hi_at, &p_raw, &d_raw, m, act, tol)
            {
                return Some((z, sweeps, polished_kkt));
            }
        }
    }
    let lambda_orig = DVector::from_fn(m, |i, _| lambda[i] / scale[i]);
    Some((&z_unc - &hi_at * &lambda_orig, sweeps, kkt))
}

const MAX_PENALTY_ROUNDS: usize = 40;

/// Solve the condensed QP: an outer penalty active-set loop eliminates the
/// soft state-bound slacks in closed form, and a Hildreth-style dual
/// coordinate ascent (projected SOR with row equilibration) handles the hard
/// input box and rate rows. Deterministic; the returned trajectory is always
/// projected to exact hard-constraint feasibility.
pub fn solve_qp(qp: &QpProblem, cfg: &SolverConfig) -> QpSolution {
    let nu = qp.input_dim();
    let h = qp.horizon;
    let h_uu = qp.hessian_input_block();
    let f_u = DVector::from_fn(nu, |i, _| qp.gradient[i]);
    let (a_br, b_br) = input_rows(qp);
    let (x_l, x_u) = qp.x_bounds;
    let rho = qp.slack_weight;

    // Active state-bound violation pattern: +1 above, -1 below, 0 inside.
    let mut pattern = vec![0i8; h];
    let mut total_sweeps = 0usize;
    let mut last = None;

    for _round in 0..MAX_PENALTY_ROUNDS {
        // Fold the active quadratic penalties into the input-space QP.
        let mut h_pen = h_uu.clone();
        let mut f_pen = f_u.clone();
        for i in 0..h {
            if pattern[i] == 0 {
                continue;
            }
            let bound = if pattern[i] > 0 { x_u } else { x_l };
            let offset = qp.state_base[i] - bound;
            for r in 0..nu {
                let mi_r = qp.m_matrix[(i, r)];
                f_pen[r] += 2.0 * rho * offset * mi_r;
                for c in 0..nu {
                    h_pen[(r, c)] += 2.0 * rho * mi_r * qp.m_matrix[(i, c)];
                }
            }
        }

        let budget = cfg.max_iters.saturating_sub(total_sweeps);
        let (u, sweeps, dual_res) =
            match dual_sor(&h_pen, &f_pen, &a_br, &b_br, cfg.kkt_tol, budget.max(1)) {
                Some(v) => v,
                None => return fallback(qp, total_sweeps),
            };
        total_sweeps += sweeps;

        let x = qp.predicted_states(&u);
        let new_pattern: Vec<i8> = (0..h)
            .map(|i| {
                if x[i] > x_u {
                    1
                } else if x[i] < x_l {
                    -1
                } else {
                    0
                }
            })
            .collect();
        let stable = new_pattern == pattern;
        let converged = stable && dual_res <= cfg.kkt_tol;
        last = Some((u, dual_res, converged));
        if converged || total_sweeps >= cfg.max_iters {
            break;
        }
        pattern = new_pattern;
    }

    let (u_raw, dual_res, converged) = last.expect("at least one penalty round runs");
    let mut u = u_raw;
    if project_input_chain(qp, &mut u).is_none() {
        return fallback(qp, total_sweeps);
    }
    let (s_hi, s_lo) = qp.slacks_for(&u, qp.x_bounds);
    let z_feasible = qp.pack(&u, &s_hi, &s_lo);
    QpSolution {
        objective: qp.objective(&z_feasible),
        inputs: u,
        status: if converged {
            SolverStatus::Converged
        } else {
            SolverStatus::MaxIter
        },
        iterations: total_sweeps,
        kkt_residual: dual_res,
    }
}
