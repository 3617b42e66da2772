use nalgebra::{DMatrix, DVector};

use crate::circuit::Circuit;
use crate::error::{QError, QResult};
use crate::qcore::gate::Gate;
use crate::qcore::sample::Counts;
use crate::scalar::Real;

/// Column-stochastic readout model: entry `(i, j)` is P(observe `i` | prepared `j`).
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationMatrix<T: Real> {
    n: usize,
    p: DMatrix<T>,
}

fn stochastic_tol<T: Real>() -> T {
    let floor = T::of(1e-9);
    let scaled = T::eps() * T::of(1e3);
    if scaled > floor {
        scaled
    } else {
        floor
    }
}

impl<T: Real> CalibrationMatrix<T> {
    pub fn new(p: DMatrix<T>) -> QResult<Self> {
        let dim = p.nrows();
        if dim < 2 || !dim.is_power_of_two() || p.ncols() != dim {
            return Err(QError::NotStochastic(format!("shape {}x{} is not 2^n square", p.nrows(), p.ncols())));
        }
        let tol = stochastic_tol::<T>();
        for (j, col) in p.column_iter().enumerate() {
            if col.iter().any(|x| !(x.clone() >= -tol.clone() && x.clone() <= T::one() + tol.clone())) {
                return Err(QError::NotStochastic(format!("column {j} has an entry outside [0, 1]")));
            }
            let sum = col.iter().fold(T::zero(), |a, x| a + x.clone());
            if (sum.clone() - T::one()).abs() > tol {
                return Err(QError::NotStochastic(format!("column {j} sums to {sum}")));
            }
        }
        Ok(CalibrationMatrix { n: dim.trailing_zeros() as usize, p })
    }

    pub fn identity(n: usize) -> Self {
        CalibrationMatrix { n, p: DMatrix::identity(1 << n, 1 << n) }
    }

    /// Independent flips with per-qubit probabilities.
    pub fn from_flip_rates(flip: &[f64]) -> QResult<Self> {
        let n = flip.len();
        let dim = 1usize << n;
        let p = DMatrix::from_fn(dim, dim, |i, j| {
            let prob = (0..n).fold(1.0, |acc, q| {
                if (i ^ j) >> q & 1 == 1 {
                    acc * flip[q]
                } else {
                    acc * (1.0 - flip[q])
                }
            });
            T::of(prob)
        });
        Self::new(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.p
    }

    /// `P · d`.
    pub fn forward(&self, d: &[T]) -> QResult<Vec<T>> {
        self.check_len(d.len())?;
        Ok((&self.p * DVector::from_column_slice(d)).iter().cloned().collect())
    }

    /// Ratio of largest to smallest singular value; infinite when singular.
    pub fn condition_number(&self) -> T {
        let sv = self.p.clone().singular_values();
        let max = sv.iter().cloned().fold(T::zero(), |a, b| if b > a { b } else { a });
        let min = sv.iter().cloned().fold(max.clone(), |a, b| if b < a { b } else { a });
        if min <= T::zero() {
            return T::one() / T::zero();
        }
        max / min
    }

    fn check_len(&self, len: usize) -> QResult<()> {
        if len != self.p.nrows() {
            return Err(QError::QubitCountMismatch { expected: self.n, got: len.trailing_zeros() as usize });
        }
        Ok(())
    }
}

/// Calibrates by preparing each basis state with X gates and measuring it `shots` times.
pub fn build_calibration<F>(n: usize, mut measure: F, shots: u64) -> QResult<CalibrationMatrix<f64>>
where
    F: FnMut(&Circuit, u64) -> QResult<Counts>,
{
    if shots == 0 {
        return Err(QError::ZeroShots);
    }
    let dim = 1usize << n;
    let mut p = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut prep = Circuit::new(n).with_name(format!("prep-{j}"));
        for q in (0..n).filter(|q| j >> q & 1 == 1) {
            prep.push(Gate::x(q));
        }
        let counts = measure(&prep, shots)?;
        if counts.num_qubits() != n {
            return Err(QError::QubitCountMismatch { expected: n, got: counts.num_qubits() });
        }
        for (i, pr) in counts.probabilities().into_iter().enumerate() {
            p[(i, j)] = pr;
        }
    }
    CalibrationMatrix::new(p)
}

/// Least squares on the columns in `passive`, zero elsewhere.
fn passive_solve<T: Real>(a: &DMatrix<T>, b: &DVector<T>, passive: &[usize]) -> DVector<T> {
    let sub = a.select_columns(passive);
    let sol = sub.svd(true, true).solve(b, T::eps()).expect("both SVD factors were computed");
    let mut out = DVector::zeros(a.ncols());
    for (k, &j) in passive.iter().enumerate() {
        out[j] = sol[k].clone();
    }
    out
}

/// Lawson–Hanson nonnegative least squares: `argmin ‖Ax − b‖` subject to `x ≥ 0`.
pub fn nnls<T: Real>(a: &DMatrix<T>, b: &DVector<T>) -> DVector<T> {
    let m = a.ncols();
    let scale = a.iter().fold(T::zero(), |acc, x| acc + x.clone().abs()) * b.iter().fold(T::one(), |acc, x| acc + x.clone().abs());
    let tol = T::eps() * T::of(10.0 * m as f64) * scale;
    let mut x = DVector::<T>::zeros(m);
    let mut passive: Vec<usize> = Vec::new();
    for _ in 0..3 * m + 10 {
        let w = a.transpose() * (b - a * &x);
        let Some(j) = (0..m)
            .filter(|j| !passive.contains(j) && w[*j] > tol)
            .max_by(|&i, &k| w[i].partial_cmp(&w[k]).unwrap_or(std::cmp::Ordering::Equal))
        else {
            break;
        };
        passive.push(j);
        loop {
            let s = passive_solve(a, b, &passive);
            if passive.iter().all(|&i| s[i] > T::zero()) {
                x = s;
                break;
            }
            let mut alpha = T::one();
            for &i in &passive {
                if s[i] <= T::zero() {
                    let step = x[i].clone() / (x[i].clone() - s[i].clone());
                    if step < alpha {
                        alpha = step;
                    }
                }
            }
            x += (&s - &x) * alpha;
            passive.retain(|&i| x[i] > tol);
            for i in 0..m {
                if !passive.contains(&i) {
                    x[i] = T::zero();
                }
            }
            if passive.is_empty() {
                break;
            }
        }
    }
    x
}

/// Recovers the pre-readout distribution from `d_noisy = P · d_ideal` by nonnegative least
/// squares followed by renormalization onto the simplex.
pub fn apply_filter<T: Real>(cal: &CalibrationMatrix<T>, d_noisy: &[T]) -> QResult<Vec<T>> {
    cal.check_len(d_noisy.len())?;
    let cond = cal.condition_number();
    if !(cond.clone() * T::eps() * T::of(100.0) < T::one()) {
        return Err(QError::SingularCalibration { condition: cond.to_f64_lossy() });
    }
    if d_noisy.iter().any(|x| !(x.clone() >= T::zero())) {
        return Err(QError::NegativeWeight);
    }
    let x = nnls(&cal.p, &DVector::from_column_slice(d_noisy));
    let total = x.iter().fold(T::zero(), |a, v| a + v.clone());
    if total <= T::zero() {
        return Err(QError::EmptyDistribution);
    }
    Ok(x.iter().map(|v| v.clone() / total.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::DeviceModel;
    use crate::noisesim::{sample_noisy, NoiseConfig};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn symmetric_example() -> CalibrationMatrix<f64> {
        let off = 0.2 / 3.0;
        CalibrationMatrix::new(DMatrix::from_fn(4, 4, |i, j| if i == j { 0.8 } else { off })).unwrap()
    }

    #[test]
    fn worked_example() {
        let d: Vec<f64> = [13.0, 2.0, 2.0, 13.0].iter().map(|x| x / 30.0).collect();
        let out = apply_filter(&symmetric_example(), &d).unwrap();
        for (a, b) in out.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((a - b).abs() < 1e-10, "{out:?}");
        }
    }

    #[test]
    fn identity_is_transparent() {
        let d = vec![0.1f64, 0.2, 0.3, 0.4];
        let out = apply_filter(&CalibrationMatrix::identity(2), &d).unwrap();
        for (a, b) in out.iter().zip(&d) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn overshoot_is_clipped_to_simplex() {
        // Noisy data outside P's image: plain inversion would go negative.
        let d = vec![0.0, 0.5, 0.5, 0.0];
        let out = apply_filter(&symmetric_example(), &d).unwrap();
        assert!(out.iter().all(|&x| x >= 0.0));
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_reports_condition() {
        let p = DMatrix::from_element(2, 2, 0.5);
        let cal = CalibrationMatrix::new(p).unwrap();
        assert!(matches!(apply_filter(&cal, &[0.5, 0.5]), Err(QError::SingularCalibration { .. })));
    }

    #[test]
    fn rejects_row_stochastic_only() {
        let p = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.5, 0.5]);
        assert!(matches!(CalibrationMatrix::new(p), Err(QError::NotStochastic(_))));
    }

    #[test]
    fn noiseless_calibration_is_identity() {
        let device = DeviceModel::qx2();
        let noise = NoiseConfig::ideal(5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut runs = 0;
        let cal = build_calibration(
            5,
            |c, shots| {
                runs += 1;
                sample_noisy(c, &device, &noise, shots, &mut rng)
            },
            64,
        )
        .unwrap();
        assert_eq!(runs, 32);
        assert_eq!(cal.matrix(), &DMatrix::identity(32, 32));
    }

    #[test]
    fn single_qubit_flip_calibration() {
        let device = DeviceModel::ideal(1);
        let mut noise = NoiseConfig::ideal(1);
        noise.readout = vec![0.1];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let shots = 100_000;
        let cal = build_calibration(1, |c, s| sample_noisy(c, &device, &noise, s, &mut rng), shots).unwrap();
        let sigma = (0.09f64 / shots as f64).sqrt();
        let m = cal.matrix();
        for (i, j, want) in [(0, 0, 0.9), (1, 0, 0.1), (0, 1, 0.1), (1, 1, 0.9)] {
            assert!((m[(i, j)] - want).abs() < 4.0 * sigma, "({i},{j}) = {}", m[(i, j)]);
        }
        assert_eq!(build_calibration(1, |c, s| sample_noisy(c, &device, &noise, s, &mut rng), 0), Err(QError::ZeroShots));
    }

    #[test]
    fn nnls_matches_unconstrained_when_interior() {
        let a = DMatrix::<f64>::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_column_slice(&[1.0, 2.0, 3.0]);
        let x = nnls(&a, &b);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
        let b = DVector::from_column_slice(&[-1.0, 2.0, 1.0]);
        let x = nnls(&a, &b);
        assert_eq!(x[0], 0.0);
        assert!((x[1] - 1.5).abs() < 1e-12);
    }

    fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, n).prop_filter_map("nonzero", |v| {
            let s: f64 = v.iter().sum();
            (s > 1e-3).then(|| v.iter().map(|x| x / s).collect())
        })
    }

    proptest! {
        #[test]
        fn round_trip_through_readout_model(d in simplex(8), flips in prop::collection::vec(0.0f64..0.2, 3)) {
            let cal = CalibrationMatrix::<f64>::from_flip_rates(&flips).unwrap();
            let noisy = cal.forward(&d).unwrap();
            let back = apply_filter(&cal, &noisy).unwrap();
            for (a, b) in back.iter().zip(&d) {
                prop_assert!((a - b).abs() < 1e-8, "{:?} vs {:?}", back, d);
            }
        }

        #[test]
        fn output_always_on_simplex(d in simplex(4), flips in prop::collection::vec(0.0f64..0.45, 2)) {
            let cal = CalibrationMatrix::<f64>::from_flip_rates(&flips).unwrap();
            let out = apply_filter(&cal, &d).unwrap();
            prop_assert!(out.iter().all(|&x| x >= 0.0));
            prop_assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
