use crate::params::LaserParams;

/// Volumetric heat flux (W/m^3) of the Gaussian beam at distances
/// `(dx, dy, dz)` metres from the beam centre:
///
/// `(6 sqrt(3) a p) / (r_s^2 c pi sqrt(pi)) * exp(-3 [(dx/r_s)^2 + (dy/r_s)^2 + (dz/c)^2])`
pub fn heat_source_eval(dx: f64, dy: f64, dz: f64, power_w: f64, laser: &LaserParams) -> f64 {
    let rs = laser.beam_radius_m();
    let c = laser.penetration_depth_m();
    let coef = 6.0 * 3.0f64.sqrt() * laser.absorptivity * power_w
        / (rs * rs * c * std::f64::consts::PI * std::f64::consts::PI.sqrt());
    let ex = (dx / rs).powi(2) + (dy / rs).powi(2) + (dz / c).powi(2);
    coef * (-3.0 * ex).exp()
}

/// Per-axis fraction of the Gaussian profile `exp(-3 (u/scale)^2)` falling in
/// the interval `[lo, hi]`, relative to the full-line integral.
fn axis_fraction(lo: f64, hi: f64, scale: f64) -> f64 {
    let s = 3.0f64.sqrt() / scale;
    0.5 * (libm::erf(hi * s) - libm::erf(lo * s))
}

/// Cell-integrated deposition weights along one axis for nodes owning
/// `[center - h/2, center + h/2]`. Returns the weight per node index in
/// `lo_idx..=hi_idx` (inclusive window) around the beam.
pub(crate) fn axis_weights(
    node_coord: impl Fn(usize) -> f64,
    n: usize,
    beam: f64,
    h: f64,
    scale: f64,
    cutoff: f64,
) -> (usize, Vec<f64>) {
    // Window of nodes whose cells can carry non-negligible weight.
    let first = node_coord(0);
    let lo_idx = (((beam - cutoff - first) / h).floor().max(0.0)) as usize;
    let hi_idx = ((((beam + cutoff - first) / h).ceil()) as usize).min(n.saturating_sub(1));
    if lo_idx > hi_idx {
        return (0, Vec::new());
    }
    let mut w = Vec::with_capacity(hi_idx - lo_idx + 1);
    for i in lo_idx..=hi_idx {
        let x = node_coord(i);
        w.push(axis_fraction(x - 0.5 * h - beam, x + 0.5 * h - beam, scale));
    }
    (lo_idx, w)
}

/// Vertical deposition weights for the half-space z <= 0: node k owns
/// `[-k h - h/2, -k h + h/2]` clipped at the surface. Normalized so the
/// weights over the half-space sum to 1 (full absorbed power enters the
/// material when the domain is deep enough).
pub(crate) fn depth_weights(nz: usize, h: f64, c: f64, cutoff: f64) -> Vec<f64> {
    let s = 3.0f64.sqrt() / c;
    // Half-line integral of exp(-3 (z/c)^2) over z <= 0 equals half the full
    // line, so the normalizer for [erf(hi s) - erf(lo s)] / 2 terms is 1/2.
    let mut w = Vec::new();
    for k in 0..nz {
        let z_hi = (-(k as f64) * h + 0.5 * h).min(0.0);
        let z_lo = -(k as f64) * h - 0.5 * h;
        if z_hi < -cutoff {
            break;
        }
        w.push(libm::erf(z_hi * s) - libm::erf(z_lo * s));
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn centre_value_for_reference_parameters() {
        // a = 0.4, p = 250 W, r_s = 50 um, c = 3 um evaluated at the origin.
        let q = heat_source_eval(0.0, 0.0, 0.0, 250.0, &LaserParams::default());
        assert_relative_eq!(q, 2.4884321592469227e16, max_relative = 1e-12);
    }

    #[test]
    fn one_beam_radius_off_axis_drops_by_e_cubed() {
        let laser = LaserParams::default();
        let q0 = heat_source_eval(0.0, 0.0, 0.0, 250.0, &laser);
        let q1 = heat_source_eval(laser.beam_radius_m(), 0.0, 0.0, 250.0, &laser);
        assert_relative_eq!(q1, q0 * (-3.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn depth_weights_capture_absorbed_power() {
        let c = 3e-6;
        let w = depth_weights(20, 40e-6, c, 6.0 * c);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn axis_weights_sum_to_one_when_window_covers_beam() {
        let h = 40e-6;
        let rs = 50e-6;
        let (_, w) = axis_weights(|i| i as f64 * h, 200, 100.0 * h, h, rs, 6.0 * rs);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-9);
    }
}
