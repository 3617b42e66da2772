//! Lowering of logical circuits onto a device: basis decomposition, SWAP routing and
//! single-qubit merging.

mod basis;
mod merge;
mod route;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::Serialize;

pub use basis::{decompose_to_basis, is_basis, lower_gate};
pub use merge::{merge_single_qubit, u3_angles};
pub use route::{route_best, route_from, route_identity, Routed, EXHAUSTIVE_LAYOUT_LIMIT};

use crate::circuit::{Circuit, LayoutPermutation};
use crate::device::DeviceModel;
use crate::error::{QError, QResult};
use crate::qcore::state::{simulate, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TranspileStats {
    pub cx_count: usize,
    pub depth: usize,
}

/// A device-executable circuit over physical qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct TranspileResult {
    pub circuit: Circuit,
    pub initial_layout: LayoutPermutation,
    pub final_layout: LayoutPermutation,
    pub stats: TranspileStats,
}

impl TranspileResult {
    fn from_routed(routed: Routed, merge: bool) -> QResult<Self> {
        let mut circuit = decompose_to_basis(&routed.circuit)?;
        if merge {
            circuit = merge_single_qubit(&circuit);
        }
        let stats = TranspileStats { cx_count: circuit.count_cx(), depth: circuit.depth() };
        Ok(TranspileResult { circuit, initial_layout: routed.initial_layout, final_layout: routed.final_layout, stats })
    }

    /// Maps a measured physical basis index back to logical qubit order.
    pub fn logical_index(&self, physical: usize) -> usize {
        (0..self.final_layout.len()).fold(0, |acc, l| acc | ((physical >> self.final_layout.physical(l) & 1) << l))
    }
}

/// Greedy routing from the identity layout, lowered to the basis gate set.
pub fn route(circuit: &Circuit, device: &DeviceModel) -> QResult<TranspileResult> {
    let basis = decompose_to_basis(circuit)?;
    TranspileResult::from_routed(route_identity(&basis, device)?, false)
}

/// Full pipeline: basis lowering, routing with initial-layout search, single-qubit merging.
///
/// Layouts are ranked by CX count, then by merged depth.
pub fn transpile(circuit: &Circuit, device: &DeviceModel) -> QResult<TranspileResult> {
    let basis = decompose_to_basis(circuit)?;
    let routed = route_best(&basis, device, |r| {
        let lowered = merge_single_qubit(&decompose_to_basis(&r.circuit)?);
        Ok((lowered.count_cx(), lowered.depth()))
    })?;
    TranspileResult::from_routed(routed, true)
}

/// Checks that every two-qubit gate sits on a device edge.
pub fn check_coupling(circuit: &Circuit, device: &DeviceModel) -> QResult<()> {
    crate::noisesim::check_conformant(circuit, device)
}

/// Phase-insensitive overlap of the routed circuit's output, read through the final layout,
/// with the logical circuit's output (both on the device register).
pub fn equivalence_fidelity(logical: &Circuit, result: &TranspileResult) -> QResult<f64> {
    let n = result.circuit.n;
    let expected = simulate::<f64>(&logical.widened(n)?)?;
    let physical = simulate::<f64>(&result.circuit)?;
    let mut amps = vec![Complex::new(0.0, 0.0); 1 << n];
    for (p, a) in physical.amplitudes().iter().enumerate() {
        amps[result.logical_index(p)] = *a;
    }
    let got = StateVector::from_amplitudes(amps)?;
    expected.fidelity(&got)
}

/// `max |A − e^{iθ} B|` with `θ` taken from the largest-magnitude entry of `B`.
pub fn phase_distance(a: &DMatrix<Complex<f64>>, b: &DMatrix<Complex<f64>>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let (k, _) = b.iter().enumerate().fold((0, 0.0), |(bk, bv), (i, z)| if z.norm() > bv { (i, z.norm()) } else { (bk, bv) });
    let ratio = a.as_slice()[k] / b.as_slice()[k];
    if !ratio.norm().is_finite() || ratio.norm() == 0.0 {
        return f64::INFINITY;
    }
    let phase = ratio / ratio.norm();
    a.iter().zip(b.iter()).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max)
}

/// Errors unless `result` is coupling-compliant and equivalent to `logical` within `tol`.
pub fn verify(logical: &Circuit, result: &TranspileResult, device: &DeviceModel, tol: f64) -> QResult<()> {
    check_coupling(&result.circuit, device)?;
    let f = equivalence_fidelity(logical, result)?;
    if 1.0 - f > tol {
        return Err(QError::Malformed(format!("transpiled circuit diverges: fidelity {f}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::reference_hand_circuit;
    use crate::qcore::gate::Gate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conformant_circuit_is_untouched() {
        let mut c = Circuit::new(5);
        c.push(Gate::h(0)).push(Gate::cx(0, 1)).push(Gate::cx(2, 1)).push(Gate::cx(4, 3));
        for device in [DeviceModel::qx2(), DeviceModel::ourense()] {
            let r = transpile(&c, &device).unwrap();
            assert_eq!(r.stats.cx_count, 3);
            assert!(r.initial_layout.is_identity() && r.final_layout.is_identity());
            let g = route(&c, &device).unwrap();
            assert_eq!(g.stats.cx_count, 3);
        }
    }

    #[test]
    fn reference_hand_on_both_devices() {
        let c = reference_hand_circuit();
        for device in [DeviceModel::qx2(), DeviceModel::ourense()] {
            let r = transpile(&c, &device).unwrap();
            verify(&c, &r, &device, 1e-10).unwrap();
            assert!(r.stats.cx_count <= 12, "{}: {}", device.name, r.stats.cx_count);
        }
    }

    #[test]
    fn greedy_identity_routing_is_sound_on_reference_hand() {
        let c = reference_hand_circuit();
        for device in [DeviceModel::qx2(), DeviceModel::ourense()] {
            let r = route(&c, &device).unwrap();
            verify(&c, &r, &device, 1e-10).unwrap();
        }
    }

    #[test]
    fn routing_soundness_on_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for device in [DeviceModel::qx2(), DeviceModel::ourense()] {
            for _ in 0..500 {
                let mut c = Circuit::new(5);
                let n_cx = rng.random_range(0..=10);
                for _ in 0..n_cx {
                    let q = rng.random_range(0..5);
                    c.push(Gate::u3(q, rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), 0.2));
                    let a = rng.random_range(0..5);
                    let b = (a + rng.random_range(1..5)) % 5;
                    c.push(Gate::cx(a, b));
                }
                for r in [route(&c, &device).unwrap(), transpile(&c, &device).unwrap()] {
                    check_coupling(&r.circuit, &device).unwrap();
                    let f = equivalence_fidelity(&c, &r).unwrap();
                    assert!(f >= 1.0 - 1e-9, "{}: {f}", device.name);
                }
            }
        }
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let h = Gate::h(0).matrix::<f64>();
        let shifted = h.map(|z| z * Complex::from_polar(1.0, 0.7));
        assert!(phase_distance(&h, &shifted) < 1e-15);
        assert!(phase_distance(&h, &Gate::x(0).matrix()) > 0.1);
    }

    #[test]
    fn logical_index_reads_through_layout() {
        let r = TranspileResult {
            circuit: Circuit::new(3),
            initial_layout: LayoutPermutation::identity(3),
            final_layout: LayoutPermutation::new(vec![2, 0, 1]).unwrap(),
            stats: TranspileStats { cx_count: 0, depth: 0 },
        };
        // logical 0 sits on physical 2
        assert_eq!(r.logical_index(0b100), 0b001);
        assert_eq!(r.logical_index(0b001), 0b010);
    }
}
