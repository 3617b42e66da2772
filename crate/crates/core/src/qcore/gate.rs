use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::circuit::Tag;
use crate::error::{QError, QResult};
use crate::scalar::{cis, Real};

/// The finite gate set understood by the simulator.
///
/// `PauliI`..`PauliZ` are kept apart from `X`/`Z` so that inserted twirl and
/// noise gates stay distinguishable from the logical circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    X,
    Z,
    H,
    CX,
    U1,
    U2,
    U3,
    SWAP,
    PauliI,
    PauliX,
    PauliY,
    PauliZ,
}

impl GateKind {
    pub const ALL: [GateKind; 12] = [
        GateKind::X,
        GateKind::Z,
        GateKind::H,
        GateKind::CX,
        GateKind::U1,
        GateKind::U2,
        GateKind::U3,
        GateKind::SWAP,
        GateKind::PauliI,
        GateKind::PauliX,
        GateKind::PauliY,
        GateKind::PauliZ,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::SWAP => 2,
            _ => 1,
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateKind::U1 => 1,
            GateKind::U2 => 2,
            GateKind::U3 => 3,
            _ => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::CX => "CX",
            GateKind::U1 => "U1",
            GateKind::U2 => "U2",
            GateKind::U3 => "U3",
            GateKind::SWAP => "SWAP",
            GateKind::PauliI => "PauliI",
            GateKind::PauliX => "PauliX",
            GateKind::PauliY => "PauliY",
            GateKind::PauliZ => "PauliZ",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = QError;

    fn from_str(s: &str) -> QResult<Self> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| QError::UnknownGateKind(s.to_string()))
    }
}

impl Serialize for GateKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for GateKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One gate application. For `CX` the targets are `[control, target]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<Tag>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, params: Vec<f64>) -> Self {
        Gate { kind, targets, params, tag: None }
    }

    pub fn x(q: usize) -> Self {
        Gate::new(GateKind::X, vec![q], vec![])
    }

    pub fn z(q: usize) -> Self {
        Gate::new(GateKind::Z, vec![q], vec![])
    }

    pub fn h(q: usize) -> Self {
        Gate::new(GateKind::H, vec![q], vec![])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::new(GateKind::CX, vec![control, target], vec![])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::SWAP, vec![a, b], vec![])
    }

    pub fn u1(q: usize, lambda: f64) -> Self {
        Gate::new(GateKind::U1, vec![q], vec![lambda])
    }

    pub fn u2(q: usize, phi: f64, lambda: f64) -> Self {
        Gate::new(GateKind::U2, vec![q], vec![phi, lambda])
    }

    pub fn u3(q: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Gate::new(GateKind::U3, vec![q], vec![theta, phi, lambda])
    }

    pub fn pauli(p: Pauli, q: usize) -> Self {
        Gate::new(p.gate_kind(), vec![q], vec![])
    }

    pub fn tagged(mut self, tag: Tag) -> Self {
        self.tag = Some(tag);
        self
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }

    /// Checks arity, parameters and targets against an `n`-qubit register.
    pub fn validate(&self, n: usize) -> QResult<()> {
        let arity = self.kind.arity();
        if self.targets.len() != arity {
            return Err(QError::Arity {
                kind: self.kind.to_string(),
                expected: arity,
                got: self.targets.len(),
            });
        }
        let pc = self.kind.param_count();
        if self.params.len() != pc {
            return Err(QError::Params {
                kind: self.kind.to_string(),
                expected: pc,
                got: self.params.len(),
            });
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(QError::NonFiniteParam);
        }
        if let Some(&t) = self.targets.iter().find(|&&t| t >= n) {
            return Err(QError::TargetOutOfRange { target: t, n });
        }
        if arity == 2 && self.targets[0] == self.targets[1] {
            return Err(QError::DuplicateTargets(self.targets.clone()));
        }
        Ok(())
    }

    /// The gate's unitary in its local basis: bit `j` of the row/column index is the
    /// value of `targets[j]`.
    pub fn matrix<T: Real>(&self) -> DMatrix<Complex<T>> {
        match self.kind {
            GateKind::CX => {
                // |c t> with c = bit 0, t = bit 1: flips t when c = 1
                let mut m = DMatrix::zeros(4, 4);
                let one = Complex::new(T::one(), T::zero());
                m[(0, 0)] = one;
                m[(2, 2)] = one;
                m[(3, 1)] = one;
                m[(1, 3)] = one;
                m
            }
            GateKind::SWAP => {
                let mut m = DMatrix::zeros(4, 4);
                let one = Complex::new(T::one(), T::zero());
                m[(0, 0)] = one;
                m[(1, 2)] = one;
                m[(2, 1)] = one;
                m[(3, 3)] = one;
                m
            }
            _ => {
                let [a, b, c, d] = self.entries_1q::<T>();
                DMatrix::from_row_slice(2, 2, &[a, b, c, d])
            }
        }
    }

    /// Row-major 2×2 entries of a single-qubit gate.
    pub fn entries_1q<T: Real>(&self) -> [Complex<T>; 4] {
        let p = |i: usize| T::of(self.params[i]);
        match self.kind {
            GateKind::U1 => u3_entries(T::zero(), T::zero(), p(0)),
            GateKind::U2 => {
                let s = T::of(FRAC_1_SQRT_2);
                let (phi, lambda) = (p(0), p(1));
                [
                    Complex::new(s.clone(), T::zero()),
                    -cis(lambda.clone()) * s.clone(),
                    cis(phi.clone()) * s.clone(),
                    cis(phi + lambda) * s,
                ]
            }
            GateKind::U3 => u3_entries(p(0), p(1), p(2)),
            GateKind::CX | GateKind::SWAP => panic!("{} is a two-qubit gate", self.kind),
            k => single_qubit_fixed::<T>(k),
        }
    }

    /// The inverse gate. Self-inverse kinds are returned unchanged.
    pub fn inverse(&self) -> Gate {
        use crate::scalar::principal_angle as pa;
        use std::f64::consts::PI;
        let params = match self.kind {
            GateKind::U1 => vec![pa(-self.params[0])],
            // U2(φ,λ)† = U2(−λ−π, π−φ)
            GateKind::U2 => vec![pa(-self.params[1] - PI), pa(PI - self.params[0])],
            // U3(θ,φ,λ)† = U3(−θ,−λ,−φ)
            GateKind::U3 => vec![-self.params[0], pa(-self.params[2]), pa(-self.params[1])],
            _ => self.params.clone(),
        };
        Gate { kind: self.kind, targets: self.targets.clone(), params, tag: self.tag }
    }
}

pub(crate) fn u3_entries<T: Real>(theta: T, phi: T, lambda: T) -> [Complex<T>; 4] {
    let half = theta / T::of(2.0);
    let (c, s) = (half.clone().cos(), half.sin());
    [
        Complex::new(c.clone(), T::zero()),
        -cis(lambda.clone()) * s.clone(),
        cis(phi.clone()) * s,
        cis(phi + lambda) * c,
    ]
}

/// Row-major entries of a fixed (parameter-free) single-qubit gate.
pub(crate) fn single_qubit_fixed<T: Real>(kind: GateKind) -> [Complex<T>; 4] {
    let o = Complex::new(T::zero(), T::zero());
    let l = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let h = Complex::new(T::of(FRAC_1_SQRT_2), T::zero());
    match kind {
        GateKind::X | GateKind::PauliX => [o, l, l, o],
        GateKind::Z | GateKind::PauliZ => [l, o, o, -l],
        GateKind::PauliY => [o, -i, i, o],
        GateKind::PauliI => [l, o, o, l],
        GateKind::H => [h, h, h, -h],
        _ => unreachable!("{kind} is not a fixed single-qubit gate"),
    }
}

/// Single-qubit Pauli operator labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn gate_kind(self) -> GateKind {
        match self {
            Pauli::I => GateKind::PauliI,
            Pauli::X => GateKind::PauliX,
            Pauli::Y => GateKind::PauliY,
            Pauli::Z => GateKind::PauliZ,
        }
    }

    pub fn matrix<T: Real>(self) -> DMatrix<Complex<T>> {
        let [a, b, c, d] = single_qubit_fixed::<T>(self.gate_kind());
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }
}
