use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{QError, QResult};
use crate::qcore::gate::Gate;
use crate::qcore::state::{apply_unchecked, StateVector};
use crate::scalar::Real;

/// Mixed state `ρ` on `n` qubits, same bit ordering as [`StateVector`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    n: usize,
    rho: DMatrix<Complex<T>>,
}

/// Tolerance for algebraic identities at the working precision.
fn identity_tol<T: Real>() -> T {
    let floor = T::eps() * T::of(1e3);
    let tol = T::of(1e-10);
    if floor > tol {
        floor
    } else {
        tol
    }
}

impl<T: Real> DensityMatrix<T> {
    /// `|ψ⟩⟨ψ|`.
    pub fn from_state(state: &StateVector<T>) -> Self {
        let a = state.amplitudes();
        let dim = a.len();
        let rho = DMatrix::from_fn(dim, dim, |i, j| a[i] * a[j].conj());
        DensityMatrix { n: state.num_qubits(), rho }
    }

    /// Wraps a matrix after checking shape, Hermiticity, unit trace and positivity.
    pub fn from_matrix(rho: DMatrix<Complex<T>>) -> QResult<Self> {
        let dim = rho.nrows();
        if dim != rho.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(QError::Malformed(format!("{}x{} is not a qubit density matrix", dim, rho.ncols())));
        }
        let dm = DensityMatrix { n: dim.trailing_zeros() as usize, rho };
        let tol = identity_tol::<T>();
        if dm.hermiticity_defect() > tol {
            return Err(QError::Malformed("density matrix is not Hermitian".into()));
        }
        if (dm.trace() - T::one()).abs() > tol {
            return Err(QError::Malformed("density matrix trace is not 1".into()));
        }
        if dm.min_eigenvalue() < -T::of(1e-9) {
            return Err(QError::Malformed("density matrix is not positive semidefinite".into()));
        }
        Ok(dm)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.rho
    }

    pub fn trace(&self) -> T {
        (0..self.rho.nrows()).fold(T::zero(), |acc, i| acc + self.rho[(i, i)].re.clone())
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> T {
        self.rho.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Diagonal of `ρ`, i.e. computational-basis outcome probabilities.
    pub fn probabilities(&self) -> Vec<T> {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)].re.clone()).collect()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_defect(&self) -> T {
        let dim = self.rho.nrows();
        let mut worst = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                let d = (self.rho[(i, j)] - self.rho[(j, i)].conj()).norm_sqr().sqrt();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> T {
        let herm = (&self.rho + self.rho.adjoint()).map(|z| z * T::of(0.5));
        herm.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(T::max_value().unwrap_or_else(T::one), |a, b| if b < a { b } else { a })
    }

    /// `UρU†` for a gate.
    pub fn apply_gate(&self, gate: &Gate) -> QResult<Self> {
        gate.validate(self.n)?;
        let mut out = self.clone();
        out.conjugate_by(|col| apply_unchecked(col, gate));
        Ok(out)
    }

    /// `Σ K ρ K†` for single-qubit Kraus operators (row-major 2×2) acting on `qubit`.
    pub fn apply_local_channel(&self, qubit: usize, kraus: &[[Complex<T>; 4]]) -> QResult<Self> {
        if qubit >= self.n {
            return Err(QError::TargetOutOfRange { target: qubit, n: self.n });
        }
        check_completeness(
            &kraus.iter().map(|k| DMatrix::from_row_slice(2, 2, k)).collect::<Vec<_>>(),
            2,
        )?;
        let dim = self.rho.nrows();
        let mut acc = DMatrix::zeros(dim, dim);
        for k in kraus {
            let mut term = self.clone();
            term.conjugate_by(|col| apply_entries(col, qubit, k));
            acc += term.rho;
        }
        Ok(DensityMatrix { n: self.n, rho: acc })
    }

    /// Replaces `ρ` with `A ρ A†`, where `apply` maps a column vector `v` to `A v`.
    fn conjugate_by(&mut self, apply: impl Fn(&mut [Complex<T>])) {
        for mut col in self.rho.column_iter_mut() {
            apply(col.as_mut_slice());
        }
        let mut adj = self.rho.adjoint();
        for mut col in adj.column_iter_mut() {
            apply(col.as_mut_slice());
        }
        self.rho = adj.adjoint();
    }
}

/// `Σ K_i ρ K_i†` for full-register Kraus operators.
pub fn apply_channel<T: Real>(rho: &DensityMatrix<T>, kraus: &[DMatrix<Complex<T>>]) -> QResult<DensityMatrix<T>> {
    let dim = rho.rho.nrows();
    check_completeness(kraus, dim)?;
    let mut acc = DMatrix::zeros(dim, dim);
    for k in kraus {
        acc += k * &rho.rho * k.adjoint();
    }
    Ok(DensityMatrix { n: rho.n, rho: acc })
}

/// Checks `Σ K†K = I` within the identity tolerance.
pub fn check_completeness<T: Real>(kraus: &[DMatrix<Complex<T>>], dim: usize) -> QResult<()> {
    if kraus.is_empty() {
        return Err(QError::NotTracePreserving(1.0));
    }
    let mut sum = DMatrix::<Complex<T>>::zeros(dim, dim);
    for k in kraus {
        if k.nrows() != dim || k.ncols() != dim {
            return Err(QError::KrausDimension { expected: dim, got: k.nrows() });
        }
        sum += k.adjoint() * k;
    }
    let id = DMatrix::<Complex<T>>::identity(dim, dim);
    let dev = (sum - id).iter().fold(T::zero(), |m, z| {
        let a = z.norm_sqr().sqrt();
        if a > m {
            a
        } else {
            m
        }
    });
    if dev > identity_tol::<T>() {
        return Err(QError::NotTracePreserving(dev.to_f64_lossy()));
    }
    Ok(())
}

fn apply_entries<T: Real>(amps: &mut [Complex<T>], qubit: usize, m: &[Complex<T>; 4]) {
    let bit = 1usize << qubit;
    for i in (0..amps.len()).filter(|i| i & bit == 0) {
        let (a0, a1) = (amps[i], amps[i | bit]);
        amps[i] = m[0] * a0 + m[1] * a1;
        amps[i | bit] = m[2] * a0 + m[3] * a1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::reference_hand_circuit;
    use crate::noisesim::amplitude_damping_kraus;
    use crate::qcore::state::simulate;
    use proptest::prelude::*;

    fn damping(p: f64) -> Vec<DMatrix<Complex<f64>>> {
        amplitude_damping_kraus::<f64>(p)
            .unwrap()
            .iter()
            .map(|k| DMatrix::from_row_slice(2, 2, k))
            .collect()
    }

    fn excited() -> DensityMatrix<f64> {
        DensityMatrix::from_state(&StateVector::basis(1, 1).unwrap())
    }

    #[test]
    fn full_decay() {
        let out = apply_channel(&excited(), &damping(1.0)).unwrap();
        assert!((out.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(out.matrix()[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn zero_damping_is_identity() {
        let s = simulate::<f64>(&{
            let mut c = crate::Circuit::new(1);
            c.push(Gate::u3(0, 0.4, 0.3, 0.1));
            c
        })
        .unwrap();
        let rho = DensityMatrix::from_state(&s);
        let out = apply_channel(&rho, &damping(0.0)).unwrap();
        assert!((out.matrix() - rho.matrix()).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn half_decay_hand_applied() {
        // K0|1⟩⟨1|K0† = (1−p)|1⟩⟨1|, K1|1⟩⟨1|K1† = p|0⟩⟨0|
        let out = apply_channel(&excited(), &damping(0.5)).unwrap();
        let m = out.matrix();
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((m[(1, 1)].re - 0.5).abs() < 1e-12);
        assert!(m[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let mut ks = damping(0.3);
        ks.pop();
        assert!(matches!(apply_channel(&excited(), &ks), Err(QError::NotTracePreserving(_))));
        let big = vec![DMatrix::<Complex<f64>>::identity(4, 4)];
        assert!(matches!(apply_channel(&excited(), &big), Err(QError::KrausDimension { .. })));
    }

    #[test]
    fn local_channel_matches_embedded_channel() {
        let s = simulate::<f64>(&reference_hand_circuit()).unwrap();
        let rho = DensityMatrix::from_state(&s);
        let local = amplitude_damping_kraus::<f64>(0.3).unwrap();
        let a = rho.apply_local_channel(2, &local).unwrap();
        // Embed I⊗K⊗I explicitly.
        let full: Vec<_> = local
            .iter()
            .map(|k| {
                DMatrix::from_fn(32, 32, |r, c| {
                    let rest = !(1usize << 2);
                    if r & rest != c & rest {
                        return Complex::new(0.0, 0.0);
                    }
                    k[(r >> 2 & 1) * 2 + (c >> 2 & 1)]
                })
            })
            .collect();
        let b = apply_channel(&rho, &full).unwrap();
        assert!((a.matrix() - b.matrix()).iter().all(|z| z.norm() < 1e-12));
        assert!((a.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_conjugation_matches_pure_evolution() {
        let c = reference_hand_circuit();
        let mut rho = DensityMatrix::from_state(&StateVector::<f64>::zero(5).unwrap());
        for g in &c.ops {
            rho = rho.apply_gate(g).unwrap();
        }
        let expect = DensityMatrix::from_state(&simulate::<f64>(&c).unwrap());
        assert!((rho.matrix() - expect.matrix()).iter().all(|z| z.norm() < 1e-12));
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!(DensityMatrix::from_matrix(rho.matrix().clone()).is_ok());
    }

    #[test]
    fn from_matrix_rejects_invalid() {
        let mut m = DMatrix::<Complex<f64>>::identity(2, 2);
        assert!(DensityMatrix::from_matrix(m.clone()).is_err()); // trace 2
        m[(1, 1)] = Complex::new(-0.5, 0.0);
        m[(0, 0)] = Complex::new(1.5, 0.0);
        assert!(DensityMatrix::from_matrix(m).is_err()); // negative eigenvalue
    }

    fn random_kraus_pair(a: f64, b: f64) -> Vec<DMatrix<Complex<f64>>> {
        // Unitary mixture: sqrt(q) U, sqrt(1−q) V is always a valid channel.
        let q = a.clamp(0.0, 1.0);
        let u = Gate::u3(0, a * 3.0, b, a - b).matrix::<f64>();
        let v = Gate::u2(0, b, a).matrix::<f64>();
        vec![u.map(|z| z * q.sqrt()), v.map(|z| z * (1.0 - q).sqrt())]
    }

    proptest! {
        #[test]
        fn channels_preserve_trace_and_hermiticity(a in 0.0f64..1.0, b in -3.0f64..3.0, p in 0.0f64..1.0, theta in -3.0f64..3.0) {
            let mut c = crate::Circuit::new(1);
            c.push(Gate::u3(0, theta, b, a));
            let rho = DensityMatrix::from_state(&simulate::<f64>(&c).unwrap());
            let out = apply_channel(&rho, &random_kraus_pair(a, b)).unwrap();
            let out = apply_channel(&out, &damping(p)).unwrap();
            prop_assert!((out.trace() - 1.0).abs() < 1e-10);
            prop_assert!(out.hermiticity_defect() < 1e-10);
            prop_assert!(out.min_eigenvalue() > -1e-9);
        }
    }
}
