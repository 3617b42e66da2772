use qpoker_core::mitigation::pipeline::{job_rng, mean_stderr, run_repetition};
use qpoker_core::noisesim::sample_noisy;
use qpoker_core::transpiler::transpile;
use qpoker_core::{circuit::reference_hand_circuit, Circuit, DeviceModel, NoiseConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference_on_qx2() -> (Circuit, DeviceModel) {
    let device = DeviceModel::qx2();
    (transpile(&reference_hand_circuit(), &device).unwrap().circuit, device)
}

fn sample_variance(v: &[f64]) -> f64 {
    let (m, _) = mean_stderr(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
}

#[test]
fn expectation_falls_as_cx_noise_grows() {
    let (c, device) = reference_on_qx2();
    let base = NoiseConfig::from_device(&device);
    let per_scale: Vec<Vec<f64>> = [1.0, 2.0, 4.0]
        .iter()
        .map(|&s| {
            let noise = base.scaled(s).unwrap();
            (0..64)
                .map(|seed| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    sample_noisy(&c, &device, &noise, 1024, &mut rng).unwrap().expectation_ones().unwrap()
                })
                .collect()
        })
        .collect();
    for w in per_scale.windows(2) {
        let (m0, s0) = mean_stderr(&w[0]);
        let (m1, s1) = mean_stderr(&w[1]);
        assert!(m0 - m1 > 2.0 * (s0 * s0 + s1 * s1).sqrt(), "{m0} ± {s0} vs {m1} ± {s1}");
    }
}

#[test]
fn twirling_does_not_shrink_repetition_variance() {
    let (c, device) = reference_on_qx2();
    let noise = NoiseConfig::from_device(&device);
    let collect = |twirl: bool| -> Vec<f64> {
        (0..20u64)
            .flat_map(|seed| {
                let (c, device, noise) = (&c, &device, &noise);
                (0..32).map(move |rep| {
                    let mut rng = job_rng(seed, 3, rep);
                    run_repetition(c, device, noise, 8.0, 512, twirl, None, &mut rng).unwrap()
                })
            })
            .collect()
    };
    let twirled = collect(true);
    let plain = collect(false);
    let observed = sample_variance(&twirled) - sample_variance(&plain);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let resample = |v: &[f64], rng: &mut ChaCha8Rng| -> Vec<f64> { (0..v.len()).map(|_| v[rng.random_range(0..v.len())]).collect() };
    let mut diffs: Vec<f64> = (0..2000)
        .map(|_| sample_variance(&resample(&twirled, &mut rng)) - sample_variance(&resample(&plain, &mut rng)))
        .collect();
    diffs.sort_by(f64::total_cmp);
    let upper = diffs[(0.95 * diffs.len() as f64) as usize];
    assert!(upper >= 0.0, "twirled variance significantly smaller: observed {observed}, 95% upper {upper}");
}
