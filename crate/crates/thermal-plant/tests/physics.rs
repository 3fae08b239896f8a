//! Plant-level physics gates: source quadrature, steady-track monotonicity,
//! mirror symmetry, residual-heat behavior, and run determinism.

use scan_datagen::{make_case, CaseDefaults, ScanPlan, Waveform};
use thermal_plant::{
    heat_source_eval, run_scan, run_scan_full, GridConfig, LaserParams, SimConfig, StepRecord,
};

fn constant_plan(power_w: f64, length_mm: f64, n_tracks: usize) -> ScanPlan {
    let d = CaseDefaults::default();
    ScanPlan::parallel_tracks(
        [0.0, 0.0],
        length_mm,
        n_tracks,
        0.1,
        true,
        Waveform::constant(power_w, d.power_clamp_w),
        Waveform::constant(800.0, d.speed_clamp_mm_s),
        50e-6,
    )
    .unwrap()
}

fn steady_tail_mean(records: &[StepRecord]) -> f64 {
    let n = records.len();
    let tail = &records[(n * 3 / 5)..];
    tail.iter().map(|r| r.melt_area_mm2).sum::<f64>() / tail.len() as f64
}

/// Midpoint quadrature of the volumetric source over the half-space z <= 0.
fn half_space_integral_w(power_w: f64, laser: &LaserParams) -> f64 {
    let rs = laser.beam_radius_m();
    let c = laser.penetration_depth_m();
    let hx = rs / 8.0;
    let hz = c / 8.0;
    let nxy = (12.0f64 / (1.0 / 8.0)).round() as i64; // +-6 r_s
    let nz = (6.0f64 / (1.0 / 8.0)).round() as i64; // -6 c .. 0
    let mut total = 0.0;
    for iz in 0..nz {
        let z = -(iz as f64 + 0.5) * hz;
        let mut plane = 0.0;
        for iy in 0..nxy {
            let y = -6.0 * rs + (iy as f64 + 0.5) * hx;
            for ix in 0..nxy {
                let x = -6.0 * rs + (ix as f64 + 0.5) * hx;
                plane += heat_source_eval(x, y, z, power_w, laser);
            }
        }
        total += plane;
    }
    total * hx * hx * hz
}

#[test]
fn half_space_integral_equals_absorbed_power() {
    // Reference parameters and a handful of perturbed ones.
    let cases = [
        LaserParams::default(),
        LaserParams {
            absorptivity: 0.7,
            beam_radius_um: 35.0,
            penetration_depth_um: 8.0,
        },
        LaserParams {
            absorptivity: 0.25,
            beam_radius_um: 80.0,
            penetration_depth_um: 1.5,
        },
    ];
    for laser in cases {
        for power in [100.0, 250.0] {
            let integral = half_space_integral_w(power, &laser);
            let absorbed = laser.absorptivity * power;
            let rel = (integral - absorbed).abs() / absorbed;
            assert!(
                rel < 5e-3,
                "integral {integral} W vs absorbed {absorbed} W (rel {rel})"
            );
        }
    }
}

#[test]
fn steady_track_melt_area_increases_with_power() {
    let sim = SimConfig::default();
    let mut prev = 0.0;
    for p in [200.0, 250.0, 300.0] {
        let records = run_scan(&constant_plan(p, 3.0, 1), None, &sim).unwrap();
        let area = steady_tail_mean(&records);
        assert!(
            area > prev,
            "melt area not increasing: {area} at {p} W after {prev}"
        );
        prev = area;
    }
}

#[test]
fn mirrored_scan_direction_mirrors_the_field() {
    let d = CaseDefaults::default();
    let sim = SimConfig {
        grid: GridConfig {
            cell_size_um: 40.0,
            margin_x_mm: 0.5,
            margin_y_mm: 0.4,
            depth_mm: 0.4,
        },
        ..SimConfig::default()
    };
    let forward = ScanPlan::parallel_tracks(
        [0.0, 0.0],
        2.0,
        1,
        0.1,
        true,
        Waveform::constant(250.0, d.power_clamp_w),
        Waveform::constant(800.0, d.speed_clamp_mm_s),
        50e-6,
    )
    .unwrap();
    let mut backward = forward.clone();
    backward.tracks[0].start_mm = [2.0, 0.0];
    backward.tracks[0].end_mm = [0.0, 0.0];

    let (_, field_f) = run_scan_full(&forward, None, &sim).unwrap();
    let (_, field_b) = run_scan_full(&backward, None, &sim).unwrap();
    let (nx, ny, nz) = field_f.dims();
    assert_eq!((nx, ny, nz), field_b.dims());
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let a = field_f.at(i, j, k);
                let b = field_b.at(nx - 1 - i, j, k);
                assert!(
                    (a - b).abs() <= 1e-9 * a.abs().max(1.0),
                    "asymmetry at ({i},{j},{k}): {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn second_track_sees_residual_heat_in_lookahead() {
    let plan = make_case(5, &CaseDefaults::default()).unwrap();
    let sim = SimConfig {
        grid: GridConfig {
            cell_size_um: 40.0,
            ..GridConfig::default()
        },
        ..SimConfig::default()
    };
    let records = run_scan(&plan, None, &sim).unwrap();
    let ambient = sim.material.ambient_temp_k;
    let track2 = &records[125..];
    let max_look = track2.iter().map(|r| r.lookahead_t_k).fold(f64::MIN, f64::max);
    assert!(
        max_look > ambient + 100.0,
        "second-track lookahead never sees residual heat (max {max_look} K)"
    );
}

#[test]
fn multi_track_scan_spikes_at_each_track_start() {
    // Shortened 4-track analog: the area at each new track start jumps well
    // above the steady level of the previous track.
    let plan = constant_plan(250.0, 3.0, 4);
    let sim = SimConfig {
        grid: GridConfig {
            cell_size_um: 40.0,
            margin_x_mm: 0.6,
            margin_y_mm: 0.5,
            depth_mm: 0.5,
        },
        ..SimConfig::default()
    };
    let records = run_scan(&plan, None, &sim).unwrap();
    let steps_per_track = records.len() / 4;
    for track in 1..4 {
        let prev_tail = steady_tail_mean(&records[(track - 1) * steps_per_track..track * steps_per_track]);
        let head_peak = records[track * steps_per_track..track * steps_per_track + 15]
            .iter()
            .map(|r| r.melt_area_mm2)
            .fold(f64::MIN, f64::max);
        assert!(
            head_peak > 1.5 * prev_tail,
            "track {track}: start peak {head_peak} vs previous steady {prev_tail}"
        );
    }
}

#[test]
fn grid_refinement_halving_changes_area_less_than_15_percent() {
    let plan = constant_plan(250.0, 2.0, 1);
    let mut areas = Vec::new();
    for cell in [10.0, 5.0] {
        let sim = SimConfig {
            grid: GridConfig {
                cell_size_um: cell,
                margin_x_mm: 0.45,
                margin_y_mm: 0.4,
                depth_mm: 0.3,
            },
            ..SimConfig::default()
        };
        let records = run_scan(&plan, None, &sim).unwrap();
        areas.push(steady_tail_mean(&records));
    }
    let change = (areas[1] - areas[0]).abs() / areas[1];
    assert!(
        change < 0.15,
        "halving 10 um -> 5 um moved steady area by {:.1}%",
        100.0 * change
    );
}

#[test]
fn identical_runs_are_bitwise_identical() {
    let plan = make_case(2, &CaseDefaults::default()).unwrap();
    let sim = SimConfig {
        grid: GridConfig {
            cell_size_um: 40.0,
            ..GridConfig::default()
        },
        ..SimConfig::default()
    };
    let a = run_scan(&plan, None, &sim).unwrap();
    let b = run_scan(&plan, None, &sim).unwrap();
    assert_eq!(a, b);
}
