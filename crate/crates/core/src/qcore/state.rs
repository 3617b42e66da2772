use num_complex::Complex;

use crate::circuit::Circuit;
use crate::error::{QError, QResult};
use crate::qcore::gate::{Gate, GateKind};
use crate::scalar::Real;

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 8;

/// Dense pure state over `n` qubits. Bit `k` of an amplitude index is qubit `q_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> QResult<Self> {
        Self::basis(n, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> QResult<Self> {
        check_width(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(QError::TargetOutOfRange { target: index, n: dim });
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(StateVector { n, amps })
    }

    /// Wraps raw amplitudes; they must have length `2^n` and unit norm within 1e−6.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> QResult<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(QError::Malformed(format!("{dim} amplitudes is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        check_width(n)?;
        let state = StateVector { n, amps };
        let norm = state.norm_sqr().to_f64_lossy();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(QError::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Probability vector `|amps_i|²`.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> QResult<Complex<T>> {
        if self.n != other.n {
            return Err(QError::QubitCountMismatch { expected: self.n, got: other.n });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Phase-insensitive overlap `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &Self) -> QResult<T> {
        Ok(self.inner(other)?.norm_sqr().sqrt())
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> QResult<()> {
        gate.validate(self.n)?;
        apply_unchecked(&mut self.amps, gate);
        Ok(())
    }

    /// Applies every gate of `circuit` in order.
    pub fn run(&mut self, circuit: &Circuit) -> QResult<()> {
        if circuit.n != self.n {
            return Err(QError::QubitCountMismatch { expected: circuit.n, got: self.n });
        }
        for g in &circuit.ops {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Marginal probability that `qubit` reads 1.
    pub fn prob_one(&self, qubit: usize) -> QResult<T> {
        self.check_qubit(qubit)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> qubit & 1 == 1)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr()))
    }

    /// Single-qubit reduced density matrix `[[ρ00, ρ01], [ρ10, ρ11]]`.
    pub fn reduced_density(&self, qubit: usize) -> QResult<[Complex<T>; 4]> {
        self.check_qubit(qubit)?;
        let zero = Complex::new(T::zero(), T::zero());
        let (mut r00, mut r11, mut r01) = (T::zero(), T::zero(), zero);
        let bit = 1usize << qubit;
        for i in (0..self.amps.len()).filter(|i| i & bit == 0) {
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            r00 += a0.norm_sqr();
            r11 += a1.norm_sqr();
            r01 += a0 * a1.conj();
        }
        Ok([Complex::new(r00, T::zero()), r01, r01.conj(), Complex::new(r11, T::zero())])
    }

    /// `Tr(ρ_q²)` of the reduced state of `qubit`; 1 for a product qubit, 1/2 when maximally mixed.
    pub fn reduced_purity(&self, qubit: usize) -> QResult<T> {
        let [r00, r01, _, r11] = self.reduced_density(qubit)?;
        let two = T::of(2.0);
        Ok(r00.re.clone() * r00.re + r11.re.clone() * r11.re + two * r01.norm_sqr())
    }

    fn check_qubit(&self, qubit: usize) -> QResult<()> {
        if qubit >= self.n {
            return Err(QError::TargetOutOfRange { target: qubit, n: self.n });
        }
        Ok(())
    }
}

fn check_width(n: usize) -> QResult<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(QError::QubitCountOutOfRange(n));
    }
    Ok(())
}

/// Returns `U|ψ⟩` without touching the input.
pub fn apply_gate<T: Real>(state: &StateVector<T>, gate: &Gate) -> QResult<StateVector<T>> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// Runs `circuit` on a copy of `init`.
pub fn run_circuit<T: Real>(circuit: &Circuit, init: &StateVector<T>) -> QResult<StateVector<T>> {
    let mut out = init.clone();
    out.run(circuit)?;
    Ok(out)
}

/// Simulates `circuit` from `|0…0⟩`.
pub fn simulate<T: Real>(circuit: &Circuit) -> QResult<StateVector<T>> {
    let mut s = StateVector::zero(circuit.n)?;
    s.run(circuit)?;
    Ok(s)
}

/// Gate kernel on a raw amplitude slice; the gate must already be validated for it.
pub(crate) fn apply_unchecked<T: Real>(amps: &mut [Complex<T>], gate: &Gate) {
    match gate.kind {
        GateKind::PauliI => {}
        GateKind::CX => {
            let (c, t) = (1usize << gate.targets[0], 1usize << gate.targets[1]);
            for i in 0..amps.len() {
                if i & c != 0 && i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        GateKind::SWAP => {
            let (a, b) = (1usize << gate.targets[0], 1usize << gate.targets[1]);
            for i in 0..amps.len() {
                if i & a != 0 && i & b == 0 {
                    amps.swap(i, (i & !a) | b);
                }
            }
        }
        GateKind::X | GateKind::PauliX => {
            let bit = 1usize << gate.targets[0];
            for i in (0..amps.len()).filter(|i| i & bit == 0) {
                amps.swap(i, i | bit);
            }
        }
        GateKind::Z | GateKind::PauliZ => {
            let bit = 1usize << gate.targets[0];
            for (i, a) in amps.iter_mut().enumerate() {
                if i & bit != 0 {
                    *a = -*a;
                }
            }
        }
        _ => {
            let [m00, m01, m10, m11] = gate.entries_1q::<T>();
            let bit = 1usize << gate.targets[0];
            for i in (0..amps.len()).filter(|i| i & bit == 0) {
                let (a0, a1) = (amps[i], amps[i | bit]);
                amps[i] = m00 * a0 + m01 * a1;
                amps[i | bit] = m10 * a0 + m11 * a1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{reference_hand_circuit, Circuit};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    /// Applies a gate through its full local matrix; independent of the fast kernels.
    fn apply_via_matrix(state: &StateVector<f64>, gate: &Gate) -> Vec<Complex<f64>> {
        let m = gate.matrix::<f64>();
        let k = gate.targets.len();
        let amps = state.amplitudes();
        let mut out = vec![c(0.0, 0.0); amps.len()];
        for (i, out_i) in out.iter_mut().enumerate() {
            let row = (0..k).fold(0, |acc, j| acc | ((i >> gate.targets[j] & 1) << j));
            for col in 0..(1 << k) {
                let mut src = i;
                for j in 0..k {
                    let bit = 1 << gate.targets[j];
                    if col >> j & 1 == 1 {
                        src |= bit;
                    } else {
                        src &= !bit;
                    }
                }
                *out_i += m[(row, col)] * amps[src];
            }
        }
        out
    }

    #[test]
    fn pauli_x_flips_zero() {
        let s = apply_gate(&StateVector::<f64>::zero(1).unwrap(), &Gate::x(0)).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn hadamard_makes_plus() {
        let s = apply_gate(&StateVector::<f64>::zero(1).unwrap(), &Gate::h(0)).unwrap();
        for a in s.amplitudes() {
            assert!((a - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn cx_with_control_set() {
        // |10⟩ printed q1 q0 means q1 = 1; use q1 as control.
        let s = StateVector::<f64>::basis(2, 0b10).unwrap();
        let s = apply_gate(&s, &Gate::cx(1, 0)).unwrap();
        assert_eq!(s.amplitudes()[0b11], c(1.0, 0.0));
    }

    #[test]
    fn errors_on_bad_targets() {
        let mut s = StateVector::<f64>::zero(2).unwrap();
        assert!(matches!(s.apply(&Gate::x(2)), Err(QError::TargetOutOfRange { .. })));
        assert!(matches!(s.apply(&Gate::cx(0, 0)), Err(QError::DuplicateTargets(_))));
        assert!(matches!(StateVector::<f64>::zero(9), Err(QError::QubitCountOutOfRange(9))));
    }

    #[test]
    fn max_circuit_state() {
        // Hand-derived from the card sequence: q0 = q2 = q3 = 1, (q4, q1) = (|11⟩ − |00⟩)/√2.
        let s = simulate::<f64>(&reference_hand_circuit()).unwrap();
        let amps = s.amplitudes();
        assert!((amps[0b11111] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!((amps[0b01101] - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        let probs = s.probabilities();
        assert!((probs[0b01101] - 0.5).abs() < 1e-12);
        assert!((probs[0b11111] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let init = StateVector::<f64>::basis(3, 5).unwrap();
        let out = run_circuit(&Circuit::new(3), &init).unwrap();
        assert_eq!(out, init);
    }

    #[test]
    fn circuit_width_must_match() {
        let init = StateVector::<f64>::zero(3).unwrap();
        assert!(matches!(
            run_circuit(&Circuit::new(2), &init),
            Err(QError::QubitCountMismatch { .. })
        ));
    }

    #[test]
    fn reduced_purity_examples() {
        let product = StateVector::<f64>::basis(5, 0b01101).unwrap();
        for q in 0..5 {
            assert!((product.reduced_purity(q).unwrap() - 1.0).abs() < 1e-12);
        }
        let mut bell = Circuit::new(2);
        bell.push(Gate::h(0)).push(Gate::cx(0, 1));
        let bell = simulate::<f64>(&bell).unwrap();
        assert!((bell.reduced_purity(0).unwrap() - 0.5).abs() < 1e-12);
        assert!((bell.reduced_purity(1).unwrap() - 0.5).abs() < 1e-12);
        let max = simulate::<f64>(&reference_hand_circuit()).unwrap();
        assert!((max.reduced_purity(3).unwrap() - 1.0).abs() < 1e-12);
        assert!((max.reduced_purity(1).unwrap() - 0.5).abs() < 1e-12);
        assert!((max.reduced_purity(4).unwrap() - 0.5).abs() < 1e-12);
        assert!(max.reduced_purity(5).is_err());
    }

    #[test]
    fn f32_state_tracks_f64() {
        let s32 = simulate::<f32>(&reference_hand_circuit()).unwrap();
        let s64 = simulate::<f64>(&reference_hand_circuit()).unwrap();
        for (a, b) in s32.amplitudes().iter().zip(s64.amplitudes()) {
            assert!((a.re as f64 - b.re).abs() < 1e-6 && (a.im as f64 - b.im).abs() < 1e-6);
        }
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
        (0usize..12, 0..n, 1..n, -4.0f64..4.0, -4.0f64..4.0, -4.0f64..4.0).prop_map(
            move |(k, a, off, x, y, z)| {
                let kind = GateKind::ALL[k];
                let targets = if kind.arity() == 2 { vec![a, (a + off) % n] } else { vec![a] };
                Gate::new(kind, targets, [x, y, z][..kind.param_count()].to_vec())
            },
        )
    }

    proptest! {
        #[test]
        fn kernels_match_matrix_application(gates in prop::collection::vec(arb_gate(4), 1..20)) {
            let mut s = StateVector::<f64>::zero(4).unwrap();
            s.apply(&Gate::h(0)).unwrap();
            s.apply(&Gate::u3(2, 0.7, 0.2, -0.4)).unwrap();
            for g in &gates {
                let expect = apply_via_matrix(&s, g);
                s.apply(g).unwrap();
                for (a, b) in s.amplitudes().iter().zip(&expect) {
                    prop_assert!((a - b).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn norm_is_preserved(n in 1usize..=5, seed in 0usize..1000, gates in prop::collection::vec(arb_gate(5), 0..50)) {
            let mut s = StateVector::<f64>::basis(n, seed % (1 << n)).unwrap();
            for g in gates.iter().filter(|g| g.validate(n).is_ok()) {
                s.apply(g).unwrap();
            }
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }
}
