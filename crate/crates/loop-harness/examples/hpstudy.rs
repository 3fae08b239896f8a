//! Scratch: achievable one-step generalization on the nine-case pool.
use gpdyn::{build_samples, DynSample, Normalizer};
use gp_core::{Dataset, Hyperparams, TrainedGP};
use loop_harness::generate_case_logs;
use scan_datagen::{split_indices, CaseDefaults};
use thermal_plant::SimConfig;
use std::path::Path;

fn pool() -> Vec<DynSample> {
    let cache = Path::new("/tmp/pool_cache.json");
    if cache.exists() {
        return serde_json::from_str(&std::fs::read_to_string(cache).unwrap()).unwrap();
    }
    let logs = generate_case_logs(&CaseDefaults::default(), &SimConfig::default()).unwrap();
    let mut pool = Vec::new();
    for (_, _, records) in &logs {
        pool.extend(build_samples(records).unwrap());
    }
    std::fs::write(cache, serde_json::to_string(&pool).unwrap()).unwrap();
    pool
}

fn fit_eval(train: &[DynSample], val: &[DynSample], hp: &Hyperparams) -> (f64, f64, f64) {
    let norm = Normalizer::fit(train).unwrap();
    let rows: Vec<Vec<f64>> = train.iter().map(|s| norm.normalize_input(s.input()).to_vec()).collect();
    let ys: Vec<f64> = train.iter().map(|s| norm.normalize_target(s.next_area_mm2)).collect();
    let data = Dataset::from_rows(&rows, &ys).unwrap();
    let gp = TrainedGP::fit(data, hp.clone(), 0.0).unwrap();
    let lml = gp.log_marginal();
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
    (1.0 - ss_res / ss_tot, 100.0 * ae / ay, lml)
}

fn main() {
    let pool = pool();
    println!("pool: {} samples", pool.len());
    let (ti, vi) = split_indices(pool.len(), 100, 0).unwrap();
    let train: Vec<DynSample> = ti.iter().map(|&i| pool[i]).collect();
    let val: Vec<DynSample> = vi.iter().map(|&i| pool[i]).collect();

    // Manual hyperparameter grid, lengthscales in normalized squared units.
    for l in [0.5, 1.0, 2.0, 4.0, 9.0, 25.0] {
        for sn in [0.02, 0.05, 0.1, 0.2] {
            let hp = Hyperparams::new(1.0, sn, vec![l; 4]).unwrap();
            let (r2, mae, lml) = fit_eval(&train, &val, &hp);
            println!("l={l:>5} sn={sn:>5}: R2={r2:>7.4} MAE={mae:>6.2}% lml={lml:>9.1}");
        }
    }
    // Anisotropic: longer area/temp lengthscales.
    for (name, ls) in [
        ("area-long", vec![9.0, 1.0, 1.0, 1.0]),
        ("all4-t25", vec![4.0, 25.0, 4.0, 4.0]),
        ("mixed", vec![2.0, 9.0, 2.0, 9.0]),
    ] {
        let hp = Hyperparams::new(1.0, 0.05, ls).unwrap();
        let (r2, mae, lml) = fit_eval(&train, &val, &hp);
        println!("{name}: R2={r2:.4} MAE={mae:.2}% lml={lml:.1}");
    }
}
