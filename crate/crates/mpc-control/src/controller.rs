use std::time::Instant;

use gpdyn::DynModel;

use crate::config::MpcConfig;
use crate::qp::build_qp;
use crate::solver::{solve_qp, SolverConfig, SolverStatus};
use crate::MpcError;

/// The command emitted for one control step plus solver telemetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub power_w: f64,
    pub speed_mm_s: f64,
    pub status: SolverStatus,
    pub iterations: usize,
    pub solve_time_s: f64,
    /// Temperature feedforward contribution already included in `power_w`.
    pub ff_term_w: f64,
}

/// Temperature feedforward: `k_ff (T_ref - T_k) + k_d (T_prev - T_k)`.
/// Both gains default to zero, which disables the term.
pub fn feedforward_term(t_k: f64, t_prev: f64, t_ref: f64, k_ff: f64, k_d: f64) -> f64 {
    k_ff * (t_ref - t_k) + k_d * (t_prev - t_k)
}

/// One receding-horizon step: linearize the model at the measured state and
/// previous input, build and solve the condensed QP, apply the first input
/// plus feedforward, and clamp to the hard box and rate bounds.
///
/// Solver fallbacks are reported in the output status, never as errors.
pub fn control_step(
    model: &DynModel,
    x_k: f64,
    t_k: f64,
    t_prev: f64,
    u_prev: (f64, f64),
    cfg: &MpcConfig,
    solver_cfg: &SolverConfig,
) -> Result<ControlOutput, MpcError> {
    if ![x_k, t_k, t_prev, u_prev.0, u_prev.1].iter().all(|v| v.is_finite()) {
        return Err(MpcError::NonFinite);
    }
    let started = Instant::now();
    let lin = model.linearize(x_k, t_k, u_prev.0, u_prev.1);
    let qp = build_qp(&lin, x_k, u_prev, cfg)?;
    let sol = solve_qp(&qp, solver_cfg);

    let ff = feedforward_term(t_k, t_prev, cfg.t_ref_k, cfg.k_ff_w_per_k, cfg.k_d_w_per_k);
    let raw_power = sol.inputs[0] + ff;
    let power = raw_power
        .clamp(
            u_prev.0 + cfg.dp_bounds_w.0,
            (u_prev.0 + cfg.dp_bounds_w.1).max(u_prev.0 + cfg.dp_bounds_w.0),
        )
        .clamp(cfg.p_bounds_w.0, cfg.p_bounds_w.1);
    let speed = if cfg.control_speed {
        sol.inputs[1].clamp(cfg.v_bounds_mm_s.0, cfg.v_bounds_mm_s.1)
    } else {
        u_prev.1
    };

    Ok(ControlOutput {
        power_w: power,
        speed_mm_s: speed,
        status: sol.status,
        iterations: sol.iterations,
        solve_time_s: started.elapsed().as_secs_f64(),
        ff_term_w: ff,
    })
}
