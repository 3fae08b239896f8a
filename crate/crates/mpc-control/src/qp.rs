use gpdyn::Linearization;
use nalgebra::{DMatrix, DVector};

use crate::config::MpcConfig;
use crate::MpcError;

/// Condensed QP over the input horizon in the form
/// `min 0.5 z^T H z + f^T z + c0  s.t.  A z <= b`.
///
/// The decision vector `z` is `[u_0 .. u_{H-1}, s_hi_0 .. s_hi_{H-1},
/// s_lo_0 .. s_lo_{H-1}]`: the inputs (power, plus speed when speed control
/// is on) followed by the soft state-bound slacks. Constraint rows cover the
/// input boxes, the power rate couplings anchored at the previous input, the
/// slack-relaxed state boxes, and slack non-negativity.
#[derive(Debug, Clone)]
pub struct QpProblem {
    pub hessian: DMatrix<f64>,
    pub gradient: DVector<f64>,
    pub a_ineq: DMatrix<f64>,
    pub b_ineq: DVector<f64>,
    /// Constant cost term so `objective` reports the full tracking cost.
    pub cost_offset: f64,
    /// Prediction operator: `x = state_base + m_matrix * u`.
    pub m_matrix: DMatrix<f64>,
    pub state_base: DVector<f64>,
    pub horizon: usize,
    /// Input channels per step: 1 (power) or 2 (power, speed).
    pub n_u: usize,
    pub u_prev: Vec<f64>,
    pub u_lb: Vec<f64>,
    pub u_ub: Vec<f64>,
    pub dp_bounds: (f64, f64),
    pub x_bounds: (f64, f64),
    pub slack_weight: f64,
}

impl QpProblem {
    pub fn input_dim(&self) -> usize {
        self.horizon * self.n_u
    }

    pub fn n_vars(&self) -> usize {
        self.input_dim() + 2 * self.horizon
    }

    /// Hessian block over the inputs alone (excluding slack variables).
    pub fn hessian_input_block(&self) -> DMatrix<f64> {
        let n = self.input_dim();
        DMatrix::from_fn(n, n, |i, j| self.hessian[(i, j)])
    }

    /// Predicted states `x_1 .. x_H` for an input trajectory.
    pub fn predicted_states(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.state_base + &self.m_matrix * u
    }

    /// Full objective `0.5 z^T H z + f^T z + c0`.
    pub fn objective(&self, z: &DVector<f64>) -> f64 {
        0.5 * (&self.hessian * z).dot(z) + self.gradient.dot(z) + self.cost_offset
    }

    /// Minimal feasible slacks for an input trajectory, from the state-bound
    /// violations it produces.
    pub fn slacks_for(&self, u: &DVector<f64>, x_bounds: (f64, f64)) -> (DVector<f64>, DVector<f64>) {
        let x = self.predicted_states(u);
        let hi = DVector::from_fn(self.horizon, |i, _| (x[i] - x_bounds.1).max(0.0));
        let lo = DVector::from_fn(self.horizon, |i, _| (x_bounds.0 - x[i]).max(0.0));
        (hi, lo)
    }

    /// Assemble the full decision vector from inputs and slacks.
    pub fn pack(&self, u: &DVector<f64>, s_hi: &DVector<f64>, s_lo: &DVector<f64>) -> DVector<f64> {
        let mut z = DVector::zeros(self.n_vars());
        z.rows_mut(0, self.input_dim()).copy_from(u);
        z.rows_mut(self.input_dim(), self.horizon).copy_from(s_hi);
        z.rows_mut(self.input_dim() + self.horizon, self.horizon)
            .copy_from(s_lo);
        z
    }
}

/// Condense the affine prediction model into the QP for one control step.
///
/// Cost: `sum_i Q (x_i - x_ref)^2 + du_i^T R du_i + Qf (x_H - x_ref)^2` with
/// `du_0` anchored at `u_prev`; with `literal_cost` the state target is 0 and
/// absolute inputs are penalized instead of rates. State boxes are soft with
/// quadratic slack weight; input boxes and power rate bounds are hard rows.
pub fn build_qp(
    lin: &Linearization,
    x0: f64,
    u_prev: (f64, f64),
    cfg: &MpcConfig,
) -> Result<QpProblem, MpcError> {
    cfg.validate()?;
    if ![lin.a_d, lin.b_d[0], lin.b_d[1], lin.c_d, x0, u_prev.0, u_prev.1]
        .iter()
        .all(|v| v.is_finite())
    {
        return Err(MpcError::NonFinite);
    }

    let h = cfg.horizon;
    let n_u = if cfg.control_speed { 2 } else { 1 };
    let nu_total = h * n_u;
    let n_vars = nu_total + 2 * h;
    let a = lin.a_d;

    let (b_eff, c_eff, u_prev_vec, u_lb, u_ub): (Vec<f64>, f64, Vec<f64>, Vec<f64>, Vec<f64>) =
        if cfg.control_speed {
            (
                vec![lin.b_d[0], lin.b_d[1]],
                lin.c_d,
                vec![u_prev.0, u_prev.1],
                vec![cfg.p_bounds_w.0, cfg.v_bounds_mm_s.0],
                vec![cfg.p_bounds_w.1, cfg.v_bounds_mm_s.1],
            )
        } else {
            // Fixed speed folds into the affine offset.
            (
                vec![lin.b_d[0]],
                lin.c_d + lin.b_d[1] * u_prev.1,
                vec![u_prev.0],
                vec![cfg.p_bounds_w.0],
                vec![cfg.p_bounds_w.1],
            )
        };

    // Prediction operator x_{i+1} = a x_i + b_eff . u_i + c_eff condensed to
    // x = state_base + M u.
    let mut state_base = DVector::zeros(h);
    let mut m_matrix = DMatrix::zeros(h, nu_total);
    let mut a_pow = vec![1.0; h + 1];
    for i in 1..=h {
        a_pow[i] = a_pow[i - 1] * a;
    }
    let mut sc = 0.0;
    for i in 0..h {
        sc = a * sc + c_eff;
        state_base[i] = a_pow[i + 1] * x0 + sc;
        for j in 0..=i {
            for c in 0..n_u {
                m_matrix[(i, j * n_u + c)] = a_pow[i - j] * b_eff[c];
            }
        }
    }

    // State weights: Q on intermediate states, Qf on the terminal one.
    let w = DVector::from_fn(h, |i, _| if i + 1 == h { cfg.qf } else { cfg.q });
    let target = if cfg.literal_cost { 0.0 } else { cfg.x_ref_mm2 };
    let err0 = DVector::from_fn(h, |i, _| state_base[i] - target);

    let wm = DMatrix::from_fn(h, nu_total, |i, j| w[i] * m_matrix[(i, j)]);
    let mut h_uu = m_matrix.transpose() * &wm * 2.0;
    let mut f_u = m_matrix.transpose() * DVector::from_fn(h, |i, _| 2.0 * w[i] * err0[i]);
    let mut cost_offset = (0..h).map(|i| w[i] * err0[i] * err0[i]).sum::<f64>();

    if cfg.literal_cost {
        for i in 0..nu_total {
            h_uu[(i, i)] += 2.0 * cfg.r;
        }
    } else {
        // Rate penalty (D u - E u_prev)^T R (D u - E u_prev).
        let mut d = DMatrix::zeros(nu_total, nu_total);
        for i in 0..h {
            for c in 0..n_u {
                d[(i * n_u + c, i * n_u + c)] = 1.0;
                if i > 0 {
                    d[(i * n_u + c, (i - 1) * n_u + c)] = -1.0;
                }
            }
        }
        h_uu += d.transpose() * &d * (2.0 * cfg.r);
        for c in 0..n_u {
            // Only the first step couples to u_prev through D^T R E.
            f_u[c] += -2.0 * cfg.r * u_prev_vec[c];
            cost_offset += cfg.r * u_prev_vec[c] * u_prev_vec[c];
        }
    }

    let mut hessian = DMatrix::zeros(n_vars, n_vars);
    for i in 0..nu_total {
        for j in 0..nu_total {
            // Exact symmetry for the solver's Cholesky path.
            hessian[(i, j)] = 0.5 * (h_uu[(i, j)] + h_uu[(j, i)]);
        }
    }
    for i in nu_total..n_vars {
        hessian[(i, i)] = 2.0 * cfg.slack_weight;
    }
    let mut gradient = DVector::zeros(n_vars);
    gradient.rows_mut(0, nu_total).copy_from(&f_u);

    // Constraint rows.
    let m_rows = 2 * nu_total + 2 * h + 4 * h;
    let mut a_ineq = DMatrix::zeros(m_rows, n_vars);
    let mut b_ineq = DVector::zeros(m_rows);
    let mut row = 0;
    for i in 0..h {
        for c in 0..n_u {
            a_ineq[(row, i * n_u + c)] = 1.0;
            b_ineq[row] = u_ub[c];
            row += 1;
        }
    }
    for i in 0..h {
        for c in 0..n_u {
            a_ineq[(row, i * n_u + c)] = -1.0;
            b_ineq[row] = -u_lb[c];
            row += 1;
        }
    }
    // Power rate rows, anchored at the previous applied power.
    for i in 0..h {
        a_ineq[(row, i * n_u)] = 1.0;
        if i == 0 {
            b_ineq[row] = cfg.dp_bounds_w.1 + u_prev_vec[0];
        } else {
            a_ineq[(row, (i - 1) * n_u)] = -1.0;
            b_ineq[row] = cfg.dp_bounds_w.1;
        }
        row += 1;
    }
    for i in 0..h {
        a_ineq[(row, i * n_u)] = -1.0;
        if i == 0 {
            b_ineq[row] = -(cfg.dp_bounds_w.0 + u_prev_vec[0]);
        } else {
            a_ineq[(row, (i - 1) * n_u)] = 1.0;
            b_ineq[row] = -cfg.dp_bounds_w.0;
        }
        row += 1;
    }
    // Soft state boxes: x_i - s_hi_i <= x_u and -x_i - s_lo_i <= -x_l.
    for i in 0..h {
        for j in 0..nu_total {
            a_ineq[(row, j)] = m_matrix[(i, j)];
        }
        a_ineq[(row, nu_total + i)] = -1.0;
        b_ineq[row] = cfg.x_bounds_mm2.1 - state_base[i];
        row += 1;
    }
    for i in 0..h {
        for j in 0..nu_total {
            a_ineq[(row, j)] = -m_matrix[(i, j)];
        }
        a_ineq[(row, nu_total + h + i)] = -1.0;
        b_ineq[row] = state_base[i] - cfg.x_bounds_mm2.0;
        row += 1;
    }
    for i in 0..2 * h {
        a_ineq[(row, nu_total + i)] = -1.0;
        b_ineq[row] = 0.0;
        row += 1;
    }
    debug_assert_eq!(row, m_rows);

    Ok(QpProblem {
        hessian,
        gradient,
        a_ineq,
        b_ineq,
        cost_offset,
        m_matrix,
        state_base,
        horizon: h,
        n_u,
        u_prev: u_prev_vec,
        u_lb,
        u_ub,
        dp_bounds: cfg.dp_bounds_w,
        x_bounds: cfg.x_bounds_mm2,
        slack_weight: cfg.slack_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(a: f64, b_p: f64, b_v: f64, c: f64) -> Linearization {
        Linearization {
            a_d: a,
            b_d: [b_p, b_v],
            c_d: c,
        }
    }

    #[test]
    fn h1_power_only_has_one_input_and_positive_scalar_hessian_block() {
        let cfg = MpcConfig {
            horizon: 1,
            ..MpcConfig::default()
        };
        let qp = build_qp(&lin(0.8, 1e-4, -1e-5, 0.01), 0.05, (250.0, 800.0), &cfg).unwrap();
        assert_eq!(qp.input_dim(), 1);
        let block = qp.hessian_input_block();
        assert_eq!(block.nrows(), 1);
        assert!(block[(0, 0)] > 0.0);
        // Rate-penalty Hessian at H = 1 is exactly 2(R + Qf b^2).
        let expected = 2.0 * (cfg.r + cfg.qf * 1e-4f64 * 1e-4);
        assert!((block[(0, 0)] - expected).abs() < 1e-12);
    }

    #[test]
    fn condensed_prediction_matches_stepwise_iteration() {
        let l = lin(0.93, 2.4e-4, -3.0e-5, 0.004);
        let cfg = MpcConfig {
            horizon: 7,
            control_speed: true,
            ..MpcConfig::default()
        };
        let x0 = 0.07;
        let qp = build_qp(&l, x0, (240.0, 810.0), &cfg).unwrap();
        let u: Vec<f64> = (0..14)
            .map(|i| if i % 2 == 0 { 200.0 + 7.0 * i as f64 } else { 780.0 + 3.0 * i as f64 })
            .collect();
        let x_cond = qp.predicted_states(&DVector::from_column_slice(&u));
        let mut x = x0;
        for i in 0..7 {
            x = l.a_d * x + l.b_d[0] * u[2 * i] + l.b_d[1] * u[2 * i + 1] + l.c_d;
            assert!(
                (x_cond[i] - x).abs() <= 1e-10 * x.abs().max(1.0),
                "state {i}: condensed {} vs iterated {x}",
                x_cond[i]
            );
        }
    }

    #[test]
    fn hessian_is_symmetric_positive_definite() {
        let cfg = MpcConfig {
            horizon: 12,
            ..MpcConfig::default()
        };
        let qp = build_qp(&lin(0.85, 1.5e-4, -2e-5, 0.008), 0.04, (230.0, 800.0), &cfg).unwrap();
        for i in 0..qp.n_vars() {
            for j in 0..qp.n_vars() {
                assert_eq!(qp.hessian[(i, j)], qp.hessian[(j, i)]);
            }
        }
        assert!(nalgebra::Cholesky::new(qp.hessian.clone()).is_some());
    }

    #[test]
    fn objective_constant_makes_cost_physical() {
        // With u = u_prev held and no state error, cost should be exactly the
        // tracking residual of the natural trajectory.
        let l = lin(0.0, 0.0, 0.0, 0.09);
        let cfg = MpcConfig {
            horizon: 3,
            ..MpcConfig::default()
        };
        // a = 0, b = 0: states are exactly c = x_ref -> zero cost everywhere.
        let qp = build_qp(&l, 0.09, (250.0, 800.0), &cfg).unwrap();
        let u = DVector::from_element(3, 250.0);
        let (hi, lo) = qp.slacks_for(&u, cfg.x_bounds_mm2);
        let z = qp.pack(&u, &hi, &lo);
        assert!(qp.objective(&z).abs() < 1e-12);
    }
}
