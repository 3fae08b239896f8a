//! Scratch: variance decomposition and smooth-pool ceiling.
use gpdyn::{build_samples_with, DynSample, Normalizer, SampleOptions};
use gp_core::{Dataset, Hyperparams, TrainedGP};
use loop_harness::generate_case_logs;
use scan_datagen::{split_indices, CaseDefaults};
use thermal_plant::SimConfig;

fn fit_eval(train: &[DynSample], val: &[DynSample], hp: &Hyperparams) -> (f64, f64) {
    let norm = Normalizer::fit(train).unwrap();
    let rows: Vec<Vec<f64>> = train.iter().map(|s| norm.normalize_input(s.input()).to_vec()).collect();
    let ys: Vec<f64> = train.iter().map(|s| norm.normalize_target(s.next_area_mm2)).collect();
    let data = Dataset::from_rows(&rows, &ys).unwrap();
    let gp = TrainedGP::fit(data, hp.clone(), 0.0).unwrap();
    let mean_y = val.iter().map(|s| s.next_area_mm2).sum::<f64>() / val.len() as f64;
    let mut ss_res = 0.0; let mut ss_tot = 0.0; let mut ae = 0.0; let mut ay = 0.0;
    for s in val {
        let z = norm.normalize_input(s.input());
        let pred = norm.denormalize_target(gp.predict(&z).unwrap().mean).max(0.0);
        ss_res += (pred - s.next_area_mm2).powi(2);
        ss_tot += (s.next_area_mm2 - mean_y).powi(2);
        ae += (pred - s.next_area_mm2).abs();
        ay += s.next_area_mm2.abs();
    }
    (1.0 - ss_res / ss_tot, 100.0 * ae / ay)
}

fn main() {
    let logs = generate_case_logs(&CaseDefaults::default(), &SimConfig::default()).unwrap();
    let mut pool = Vec::new();
    for (_, _, records) in &logs {
        pool.extend(build_samples_with(records, SampleOptions { exclude_track_transitions: true }).unwrap());
    }
    println!("smooth pool: {} samples", pool.len());
    let mean = pool.iter().map(|s| s.next_area_mm2).sum::<f64>() / pool.len() as f64;
    let var = pool.iter().map(|s| (s.next_area_mm2 - mean).powi(2)).sum::<f64>() / pool.len() as f64;
    let maxa = pool.iter().map(|s| s.next_area_mm2).fold(f64::MIN, f64::max);
    println!("mean {mean:.5} var {var:.3e} max {maxa:.5}");

    // High-target share: how much of the variance sits in the top 3%?
    let mut targets: Vec<f64> = pool.iter().map(|s| s.next_area_mm2).collect();
    targets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p97 = targets[(targets.len() as f64 * 0.97) as usize];
    let high_var: f64 = pool.iter().filter(|s| s.next_area_mm2 > p97)
        .map(|s| (s.next_area_mm2 - mean).powi(2)).sum::<f64>() / pool.len() as f64;
    println!("p97 {p97:.5}; top-3% variance share {:.1}%", 100.0 * high_var / var);

    let (ti, vi) = split_indices(pool.len(), 100, 0).unwrap();
    let train: Vec<DynSample> = ti.iter().map(|&i| pool[i]).collect();
    let val: Vec<DynSample> = vi.iter().map(|&i| pool[i]).collect();
    for l in [1.0, 4.0, 9.0, 25.0] {
        for sn in [0.05, 0.1] {
            let hp = Hyperparams::new(1.0, sn, vec![l; 4]).unwrap();
            let (r2, mae) = fit_eval(&train, &val, &hp);
            println!("smooth l={l:>4} sn={sn}: R2={r2:.4} MAE={mae:.2}%");
        }
    }
}
