//! Property tests for posterior bounds and ascent contracts.

use gp_core::{optimize_hyperparams, Dataset, Hyperparams, OptConfig, TrainedGP};
use proptest::prelude::*;

fn dataset_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (1usize..10).prop_flat_map(|m| {
        (
            proptest::collection::vec(
                proptest::collection::vec(-3.0f64..3.0, 2),
                m,
            ),
            proptest::collection::vec(-5.0f64..5.0, m),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn variance_stays_within_prior_bounds((rows, targets) in dataset_strategy(),
                                          qx in -4.0f64..4.0, qy in -4.0f64..4.0,
                                          sigma_f in 0.2f64..3.0, sigma_n in 0.0f64..1.0) {
        let data = Dataset::from_rows(&rows, &targets).unwrap();
        let hp = Hyperparams::new(sigma_f, sigma_n, vec![1.0, 1.0]).unwrap();
        let gp = TrainedGP::fit(data, hp, 0.0).unwrap();
        let p = gp.predict(&[qx, qy]).unwrap();
        prop_assert!(p.variance >= 0.0);
        prop_assert!(p.variance <= sigma_f * sigma_f + sigma_n * sigma_n + 1e-9);
    }

    #[test]
    fn optimizer_never_worsens_the_init_score((rows, targets) in dataset_strategy(),
                                              seed in 0u64..32) {
        let data = Dataset::from_rows(&rows, &targets).unwrap();
        let init = Hyperparams::new(1.0, 0.4, vec![1.0, 1.0]).unwrap();
        let init_score = TrainedGP::fit(data.clone(), init.clone(), 0.0)
            .unwrap()
            .log_marginal();
        let cfg = OptConfig { max_iters: 15, restarts: 2, seed, ..OptConfig::default() };
        let out = optimize_hyperparams(&data, &init, &cfg).unwrap();
        prop_assert!(out.log_marginal >= init_score - 1e-12);
    }
}
