use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{QError, QResult};
use crate::qcore::state::{StateVector, MAX_QUBITS};
use crate::scalar::Real;

/// The diagonal observable counting ones in a computational basis string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberOperator {
    n: usize,
    diag: Vec<u32>,
}

impl NumberOperator {
    /// Diagonal built from popcounts, `b(i) = #ones(i)`.
    pub fn direct(n: usize) -> QResult<Self> {
        check_n(n)?;
        Ok(NumberOperator { n, diag: (0..1u32 << n).map(u32::count_ones).collect() })
    }

    /// Diagonal extracted from `Σ_i a_i† a_i` with Jordan-Wigner strings.
    pub fn second_quantized(n: usize) -> QResult<Self> {
        let m = second_quantized_matrix::<f64>(n)?;
        let dim = 1usize << n;
        let mut diag = Vec::with_capacity(dim);
        for i in 0..dim {
            for j in 0..dim {
                if i != j && m[(i, j)].norm() > 1e-12 {
                    return Err(QError::Malformed(format!("off-diagonal entry at ({i},{j})")));
                }
            }
            let v = m[(i, i)];
            let r = v.re.round();
            if (v.re - r).abs() > 1e-12 || v.im.abs() > 1e-12 || r < 0.0 {
                return Err(QError::Malformed(format!("non-integer eigenvalue {v} at {i}")));
            }
            diag.push(r as u32);
        }
        Ok(NumberOperator { n, diag })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[u32] {
        &self.diag
    }

    /// Dense matrix form.
    pub fn matrix<T: Real>(&self) -> DMatrix<Complex<T>> {
        let dim = self.diag.len();
        DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex::new(T::of(self.diag[i] as f64), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    /// `⟨ψ|A|ψ⟩` by dense matrix-vector quadrature.
    pub fn expectation<T: Real>(&self, state: &StateVector<T>) -> QResult<T> {
        if state.num_qubits() != self.n {
            return Err(QError::QubitCountMismatch { expected: self.n, got: state.num_qubits() });
        }
        let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
        let v = psi.adjoint() * (self.matrix::<T>() * &psi);
        Ok(v[(0, 0)].re.clone())
    }
}

/// Builds the operator along both routes and checks they agree entrywise.
pub fn build_number_operator(n: usize) -> QResult<NumberOperator> {
    let direct = NumberOperator::direct(n)?;
    let sq = NumberOperator::second_quantized(n)?;
    if direct != sq {
        return Err(QError::Malformed("number operator constructions disagree".into()));
    }
    Ok(direct)
}

fn check_n(n: usize) -> QResult<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(QError::QubitCountOutOfRange(n));
    }
    Ok(())
}

fn kron<T: Real>(a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    a.kronecker(b)
}

/// Creation operator `a_i† = I^{⊗ n−i−1} ⊗ Q⁺ ⊗ σ_z^{⊗ i}` with `Q^± = (σ_x ∓ iσ_y)/2`.
///
/// The leftmost Kronecker factor is the most significant qubit, so `Q⁺` acts on `q_i`.
pub fn creation<T: Real>(n: usize, i: usize) -> DMatrix<Complex<T>> {
    ladder(n, i, true)
}

/// Annihilation operator `a_i`.
pub fn annihilation<T: Real>(n: usize, i: usize) -> DMatrix<Complex<T>> {
    ladder(n, i, false)
}

fn ladder<T: Real>(n: usize, i: usize, raise: bool) -> DMatrix<Complex<T>> {
    let c = |re: f64, im: f64| Complex::new(T::of(re), T::of(im));
    let sx = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
    let sy = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
    let sz = DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
    let sign = if raise { -1.0 } else { 1.0 };
    let q = (&sx + sy.map(|z| z * c(0.0, sign))).map(|z| z * c(0.5, 0.0));
    let id = DMatrix::<Complex<T>>::identity(2, 2);
    let mut out = DMatrix::<Complex<T>>::identity(1, 1);
    for _ in 0..(n - i - 1) {
        out = kron(&out, &id);
    }
    out = kron(&out, &q);
    for _ in 0..i {
        out = kron(&out, &sz);
    }
    out
}

/// `Σ_i a_i† a_i` as a dense matrix.
pub fn second_quantized_matrix<T: Real>(n: usize) -> QResult<DMatrix<Complex<T>>> {
    check_n(n)?;
    let dim = 1usize << n;
    let mut a = DMatrix::zeros(dim, dim);
    for i in 0..n {
        a += creation::<T>(n, i) * annihilation::<T>(n, i);
    }
    Ok(a)
}

/// `Σ_i b(i)·p(i) / Σ_i p(i)` for a weight vector indexed by basis state.
pub fn expectation_ones<T: Real>(weights: &[T]) -> QResult<T> {
    if weights.is_empty() {
        return Err(QError::EmptyDistribution);
    }
    let mut total = T::zero();
    let mut acc = T::zero();
    for (i, w) in weights.iter().enumerate() {
        if !(w.clone() >= T::zero()) {
            return Err(QError::NegativeWeight);
        }
        total += w.clone();
        acc += w.clone() * T::of((i as u64).count_ones() as f64);
    }
    if total <= T::zero() {
        return Err(QError::EmptyDistribution);
    }
    Ok(acc / total)
}
