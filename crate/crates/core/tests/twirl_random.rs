use qpoker_core::mitigation::amplify::amplify_noise;
use qpoker_core::mitigation::twirl::{twirl_cx, TwirlTable};
use qpoker_core::qcore::state::simulate;
use qpoker_core::transpiler::{decompose_to_basis, merge_single_qubit, transpile};
use qpoker_core::{circuit::reference_hand_circuit, Circuit, DeviceModel, Gate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_circuit(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let q = rng.random_range(0..n);
        let g = match rng.random_range(0..5) {
            0 => Gate::x(q),
            1 => Gate::z(q),
            2 => Gate::h(q),
            3 => Gate::u3(q, rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
            _ => Gate::cx(q, (q + rng.random_range(1..n)) % n),
        };
        c.push(g);
    }
    c
}

#[test]
fn table_rows_hold() {
    assert_eq!(TwirlTable::standard().verify(1e-12).unwrap().len(), 16);
}

#[test]
fn thousand_random_twirls_preserve_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..1000 {
        let len = rng.random_range(1..40);
        let c = random_circuit(&mut rng, 5, len);
        let t = twirl_cx(&c, &mut rng);
        assert_eq!(t.count_cx(), c.count_cx());
        let f = simulate::<f64>(&c).unwrap().fidelity(&simulate(&t).unwrap()).unwrap();
        assert!(f >= 1.0 - 1e-9, "{f}");
    }
}

#[test]
fn merged_depth_stays_flat_under_amplification() {
    let device = DeviceModel::qx2();
    let base = transpile(&reference_hand_circuit(), &device).unwrap().circuit;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mean_depth = |r: f64, rng: &mut ChaCha8Rng| {
        let total: usize = (0..200)
            .map(|_| {
                let t = amplify_noise(&twirl_cx(&base, rng), &device, r, rng).unwrap();
                merge_single_qubit(&decompose_to_basis(&t).unwrap()).depth()
            })
            .sum();
        total as f64 / 200.0
    };
    let d1 = mean_depth(1.0, &mut rng);
    let d32 = mean_depth(32.0, &mut rng);
    assert!(d32 <= 2.0 * d1, "r=1: {d1}, r=32: {d32}");
}
