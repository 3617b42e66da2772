use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;

use crate::circuit::{Circuit, Tag};
use crate::error::{QError, QResult};
use crate::qcore::gate::{Gate, GateKind, Pauli};

/// One valid twirl of CX: `σ_a ⊗ σ_b` before, `σ_c ⊗ σ_d` after (first factor on the control).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwirlRow {
    pub a: Pauli,
    pub b: Pauli,
    pub c: Pauli,
    pub d: Pauli,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwirlTable {
    rows: [TwirlRow; 16],
}

impl Default for TwirlTable {
    fn default() -> Self {
        Self::standard()
    }
}

impl TwirlTable {
    /// The sixteen combinations, ordered by `(a, b)` over `I, X, Y, Z`.
    pub fn standard() -> Self {
        use Pauli::{I, X, Y, Z};
        const C: [Pauli; 16] = [I, I, Z, Z, X, X, Y, Y, Y, Y, X, X, Z, Z, I, I];
        const D: [Pauli; 16] = [I, X, Y, Z, X, I, Z, Y, X, I, Z, Y, I, X, Y, Z];
        let rows = std::array::from_fn(|k| TwirlRow { a: Pauli::ALL[k / 4], b: Pauli::ALL[k % 4], c: C[k], d: D[k] });
        TwirlTable { rows }
    }

    pub fn rows(&self) -> &[TwirlRow; 16] {
        &self.rows
    }

    pub fn lookup(&self, a: Pauli, b: Pauli) -> TwirlRow {
        self.rows[a as usize * 4 + b as usize]
    }

    /// Phase of every row; fails on the first row that violates the identity.
    pub fn verify(&self, tol: f64) -> QResult<Vec<f64>> {
        self.rows
            .iter()
            .map(|row| {
                row_phase(row, tol).ok_or_else(|| QError::Malformed(format!("twirl row {row:?} fails the CX identity")))
            })
            .collect()
    }
}

/// Two-qubit operator with `p_control` on local bit 0 and `p_target` on local bit 1.
fn pair_matrix(p_control: Pauli, p_target: Pauli) -> DMatrix<Complex<f64>> {
    p_target.matrix::<f64>().kronecker(&p_control.matrix::<f64>())
}

/// `θ` with `σ_c ⊗ σ_d = e^{iθ} CX (σ_a ⊗ σ_b) CX†` within `tol`, if it exists.
///
/// The phase is read off the largest-magnitude entry of the right-hand side.
pub fn row_phase(row: &TwirlRow, tol: f64) -> Option<f64> {
    let cx = Gate::cx(0, 1).matrix::<f64>();
    let rhs = &cx * pair_matrix(row.a, row.b) * cx.adjoint();
    let lhs = pair_matrix(row.c, row.d);
    let k = rhs
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|(k, _)| k)?;
    let phase = lhs.as_slice()[k] / rhs.as_slice()[k];
    if (phase.norm() - 1.0).abs() > tol {
        return None;
    }
    let worst = lhs.iter().zip(rhs.iter()).map(|(l, r)| (l - phase * r).norm()).fold(0.0, f64::max);
    (worst <= tol).then(|| phase.im.atan2(phase.re))
}

/// Surrounds every CX with a uniformly drawn twirl row. Identity factors are omitted.
pub fn twirl_cx<R: Rng + ?Sized>(circuit: &Circuit, rng: &mut R) -> Circuit {
    let table = TwirlTable::standard();
    let mut out = Circuit { n: circuit.n, ops: Vec::with_capacity(circuit.len() * 3), name: circuit.name.clone() };
    let push = |ops: &mut Vec<Gate>, p: Pauli, q: usize| {
        if p != Pauli::I {
            ops.push(Gate::pauli(p, q).tagged(Tag::Twirl));
        }
    };
    for g in &circuit.ops {
        if g.kind != GateKind::CX {
            out.ops.push(g.clone());
            continue;
        }
        let (c, t) = (g.targets[0], g.targets[1]);
        let row = table.rows[rng.random_range(0..16)];
        push(&mut out.ops, row.a, c);
        push(&mut out.ops, row.b, t);
        out.ops.push(g.clone());
        push(&mut out.ops, row.c, c);
        push(&mut out.ops, row.d, t);
    }
    out
}
