use rand::Rng;

use crate::circuit::Circuit;
use crate::device::DeviceModel;
use crate::error::{QError, QResult};
use crate::noisesim::{apply_insertions, check_conformant, cx_sites, draw_insertions};

/// Extra insertion probability `(r − 1)ε` for amplification factor `r`, capped at 1.
pub fn amplification_probability(r: f64, eps: f64) -> QResult<f64> {
    if r.is_nan() || r < 1.0 {
        return Err(QError::AmplificationBelowOne(r));
    }
    Ok(((r - 1.0) * eps).min(1.0))
}

/// After each CX on edge `(i, j)`, inserts with probability `(r − 1)ε_{i,j}` one of the 15
/// non-identity two-qubit Paulis, drawn uniformly.
pub fn amplify_noise<R: Rng + ?Sized>(circuit: &Circuit, device: &DeviceModel, r: f64, rng: &mut R) -> QResult<Circuit> {
    amplification_probability(r, 0.0)?;
    check_conformant(circuit, device)?;
    let sites = cx_sites(circuit, |a, b| {
        amplification_probability(r, device.cx_error(a, b).unwrap_or(0.0)).expect("r checked above")
    });
    let mut insertions = Vec::new();
    draw_insertions(&sites, rng, &mut insertions);
    Ok(apply_insertions(circuit, &insertions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Tag;
    use crate::qcore::gate::{Gate, GateKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_cx() -> Circuit {
        let mut c = Circuit::new(5);
        c.push(Gate::cx(0, 1));
        c
    }

    #[test]
    fn unit_factor_leaves_circuit_alone() {
        let c = crate::transpiler::transpile(&crate::circuit::reference_hand_circuit(), &DeviceModel::qx2())
            .unwrap()
            .circuit;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(amplify_noise(&c, &DeviceModel::qx2(), 1.0, &mut rng).unwrap(), c);
        }
    }

    #[test]
    fn rejects_factor_below_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            amplify_noise(&one_cx(), &DeviceModel::qx2(), 0.5, &mut rng),
            Err(QError::AmplificationBelowOne(0.5))
        );
    }

    #[test]
    fn probability_formula() {
        assert!((amplification_probability(4.0, 0.01).unwrap() - 0.03).abs() < 1e-15);
        assert_eq!(amplification_probability(1.0, 0.02).unwrap(), 0.0);
        assert_eq!(amplification_probability(200.0, 0.02).unwrap(), 1.0);
    }

    #[test]
    fn inserted_pairs_are_tagged_and_nontrivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let device = DeviceModel::qx2();
        let mut seen = 0;
        for _ in 0..2000 {
            let out = amplify_noise(&one_cx(), &device, 32.0, &mut rng).unwrap();
            if out.len() > 1 {
                seen += 1;
                assert_eq!(out.len(), 3);
                assert!(out.ops[1..].iter().all(|g| g.tag == Some(Tag::NoiseInjection)));
                assert!(out.ops[1..].iter().any(|g| g.kind != GateKind::PauliI));
            }
        }
        assert!(seen > 0);
    }
}
