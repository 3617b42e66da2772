//! Circuit intermediate representation and its canonical JSON form (`.qpc.json`).

use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};
use crate::qcore::gate::{Gate, GateKind};

/// Where an operation came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Community,
    Player,
    Twirl,
    NoiseInjection,
    Routing,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Circuit {
    pub n: usize,
    pub ops: Vec<Gate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, ops: Vec::new(), name: None }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Builds a circuit, validating every gate against `n`.
    pub fn from_ops(n: usize, ops: Vec<Gate>) -> QResult<Self> {
        let c = Circuit { n, ops, name: None };
        c.validate()?;
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.ops.push(gate);
        self
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn validate(&self) -> QResult<()> {
        self.ops.iter().try_for_each(|g| g.validate(self.n))
    }

    /// `self` followed by `other` (both on the same register).
    pub fn then(&self, other: &Circuit) -> QResult<Circuit> {
        if self.n != other.n {
            return Err(QError::QubitCountMismatch { expected: self.n, got: other.n });
        }
        let mut out = self.clone();
        out.ops.extend(other.ops.iter().cloned());
        Ok(out)
    }

    /// Same ops on a register of `n ≥ self.n` qubits.
    pub fn widened(&self, n: usize) -> QResult<Circuit> {
        if n < self.n {
            return Err(QError::CircuitTooWide { circuit: self.n, device: n });
        }
        Ok(Circuit { n, ops: self.ops.clone(), name: self.name.clone() })
    }

    /// Longest input-output path, each gate counting one layer (ASAP layering).
    pub fn depth(&self) -> usize {
        self.layers().into_iter().max().unwrap_or(0)
    }

    /// ASAP layer index (1-based) of every op.
    pub fn layers(&self) -> Vec<usize> {
        let mut level = vec![0usize; self.n];
        self.ops
            .iter()
            .map(|g| {
                let l = g.targets.iter().map(|&t| level[t]).max().unwrap_or(0) + 1;
                for &t in &g.targets {
                    level[t] = l;
                }
                l
            })
            .collect()
    }

    /// Number of CX gates, counting each SWAP as its three-CX decomposition.
    pub fn count_cx(&self) -> usize {
        self.ops
            .iter()
            .map(|g| match g.kind {
                GateKind::CX => 1,
                GateKind::SWAP => 3,
                _ => 0,
            })
            .sum()
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n: self.n,
            ops: self.ops.iter().rev().map(Gate::inverse).collect(),
            name: self.name.as_ref().map(|s| format!("{s}^-1")),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> QResult<Circuit> {
        let raw: RawCircuit = serde_json::from_str(text)?;
        let ops = raw
            .ops
            .into_iter()
            .map(|op| {
                let kind: GateKind = op.kind.parse()?;
                Ok(Gate { kind, targets: op.targets, params: op.params, tag: op.tag })
            })
            .collect::<QResult<Vec<_>>>()?;
        let c = Circuit { n: raw.n, ops, name: raw.name };
        if c.n == 0 || c.n > crate::qcore::state::MAX_QUBITS {
            return Err(QError::QubitCountOutOfRange(c.n));
        }
        c.validate()?;
        Ok(c)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Circuit::from_json(&v.to_string()).map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    n: usize,
    ops: Vec<RawOp>,
    #[serde(default)]
    name: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOp {
    kind: String,
    targets: Vec<usize>,
    #[serde(default)]
    params: Vec<f64>,
    #[serde(default)]
    tag: Option<Tag>,
}

/// Logical → physical qubit assignment; always a bijection on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LayoutPermutation {
    mapping: Vec<usize>,
}

impl LayoutPermutation {
    pub fn identity(n: usize) -> Self {
        LayoutPermutation { mapping: (0..n).collect() }
    }

    pub fn new(mapping: Vec<usize>) -> QResult<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &p in &mapping {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(QError::InvalidLayout(format!("{mapping:?} is not a permutation")));
            }
        }
        Ok(LayoutPermutation { mapping })
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Physical qubit hosting `logical`.
    pub fn physical(&self, logical: usize) -> usize {
        self.mapping[logical]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }

    /// Physical → logical.
    pub fn inverse(&self) -> LayoutPermutation {
        let mut inv = vec![0; self.mapping.len()];
        for (l, &p) in self.mapping.iter().enumerate() {
            inv[p] = l;
        }
        LayoutPermutation { mapping: inv }
    }

    /// Exchanges the logical qubits sitting on physical qubits `a` and `b`.
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        for p in self.mapping.iter_mut() {
            if *p == a {
                *p = b;
            } else if *p == b {
                *p = a;
            }
        }
    }
}

impl TryFrom<Vec<usize>> for LayoutPermutation {
    type Error = QError;

    fn try_from(v: Vec<usize>) -> QResult<Self> {
        LayoutPermutation::new(v)
    }
}

impl From<LayoutPermutation> for Vec<usize> {
    fn from(l: LayoutPermutation) -> Self {
        l.mapping
    }
}

/// Community cards of the reference hand: X on q0 and q1, HZ on q3 and q4, then
/// CX(0→2), CX(1→2), CX(4→1), CX(0→4), CX(2→4).
pub fn reference_community() -> Circuit {
    let ops = vec![
        Gate::x(0),
        Gate::x(1),
        Gate::h(3),
        Gate::h(4),
        Gate::z(3),
        Gate::z(4),
        Gate::cx(0, 2),
        Gate::cx(1, 2),
        Gate::cx(4, 1),
        Gate::cx(0, 4),
        Gate::cx(2, 4),
    ];
    Circuit {
        n: 5,
        ops: ops.into_iter().map(|g| g.tagged(Tag::Community)).collect(),
        name: Some("community".into()),
    }
}

/// The reference player's placement: X on q2, ZH on q3, CX(2→3).
pub fn reference_placement() -> Circuit {
    let ops = vec![Gate::x(2), Gate::z(3), Gate::h(3), Gate::cx(2, 3)];
    Circuit {
        n: 5,
        ops: ops.into_iter().map(|g| g.tagged(Tag::Player)).collect(),
        name: Some("placement".into()),
    }
}

/// Community cards followed by the reference placement; prepares
/// `(|11111⟩ − |01101⟩)/√2`, so ⟨#ones⟩ = 4.
pub fn reference_hand_circuit() -> Circuit {
    let mut c = reference_community().then(&reference_placement()).expect("same width");
    c.name = Some("reference-hand".into());
    c
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::qcore::state::simulate;
    use proptest::prelude::*;

    #[test]
    fn depth_and_cx_of_trivial_circuits() {
        let empty = Circuit::new(3);
        assert_eq!(empty.depth(), 0);
        assert_eq!(empty.count_cx(), 0);
        let mut singles = Circuit::new(2);
        singles.push(Gate::h(0)).push(Gate::x(1)).push(Gate::z(0));
        assert_eq!(singles.count_cx(), 0);
        assert_eq!(singles.depth(), 2);
    }

    #[test]
    fn swap_counts_three() {
        let base = reference_hand_circuit();
        let mut with_swap = base.clone();
        with_swap.push(Gate::swap(0, 1));
        assert_eq!(with_swap.count_cx(), base.count_cx() + 3);
    }

    #[test]
    fn inverse_examples() {
        let mut c = Circuit::new(1);
        c.push(Gate::x(0));
        assert_eq!(c.inverse().ops, c.ops);
        let mut c = Circuit::new(2);
        c.push(Gate::h(0)).push(Gate::cx(0, 1));
        assert_eq!(c.inverse().ops, vec![Gate::cx(0, 1), Gate::h(0)]);
    }

    #[test]
    fn json_round_trip_reference() {
        let c = reference_hand_circuit();
        let back = Circuit::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn json_rejects_unknown_kind() {
        let doc = r#"{"n": 2, "ops": [{"kind": "CZ", "targets": [0, 1], "params": []}]}"#;
        let err = Circuit::from_json(doc).unwrap_err();
        assert_eq!(err, QError::UnknownGateKind("CZ".into()));
        assert!(err.to_string().starts_with("unknown gate kind"));
    }

    #[test]
    fn json_rejects_out_of_range_target() {
        let doc = r#"{"n": 5, "ops": [{"kind": "X", "targets": [7], "params": []}]}"#;
        let err = Circuit::from_json(doc).unwrap_err();
        assert!(err.to_string().starts_with("target out of range"), "{err}");
    }

    #[test]
    fn json_rejects_malformed() {
        assert!(matches!(Circuit::from_json("{\"n\": 2, \"ops\": ["), Err(QError::Malformed(_))));
        assert!(matches!(Circuit::from_json(r#"{"n": 0, "ops": []}"#), Err(QError::QubitCountOutOfRange(0))));
    }

    #[test]
    fn layout_validation() {
        assert!(LayoutPermutation::new(vec![1, 0, 2]).is_ok());
        assert!(LayoutPermutation::new(vec![1, 1, 2]).is_err());
        assert!(LayoutPermutation::new(vec![0, 3, 1]).is_err());
        let mut l = LayoutPermutation::identity(3);
        l.swap_physical(0, 2);
        assert_eq!(l.as_slice(), &[2, 1, 0]);
        assert_eq!(l.inverse().as_slice(), &[2, 1, 0]);
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(serde_json::from_str::<LayoutPermutation>(&json).unwrap(), l);
        assert!(serde_json::from_str::<LayoutPermutation>("[0,0]").is_err());
    }

    pub(crate) fn arb_circuit(n: usize, max_len: usize) -> impl Strategy<Value = Circuit> {
        let gate = (0usize..12, 0..n, 1..n, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(
            move |(k, a, off, x, y, z)| {
                let kind = GateKind::ALL[k];
                let targets = if kind.arity() == 2 { vec![a, (a + off) % n] } else { vec![a] };
                Gate::new(kind, targets, [x, y, z][..kind.param_count()].to_vec())
            },
        );
        prop::collection::vec(gate, 0..max_len).prop_map(move |ops| Circuit { n, ops, name: None })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn composition_bounds(a in arb_circuit(4, 20), b in arb_circuit(4, 20)) {
            let ab = a.then(&b).unwrap();
            prop_assert!(ab.depth() <= a.depth() + b.depth());
            prop_assert_eq!(ab.count_cx(), a.count_cx() + b.count_cx());
        }

        #[test]
        fn json_round_trip(c in arb_circuit(5, 30)) {
            prop_assert_eq!(Circuit::from_json(&c.to_json()).unwrap(), c);
        }

        #[test]
        fn double_inverse_of_parameter_free(c in arb_circuit(4, 30)) {
            let fixed = Circuit { n: 4, ops: c.ops.into_iter().filter(|g| g.params.is_empty()).collect(), name: None };
            prop_assert_eq!(fixed.inverse().inverse(), fixed);
        }

        #[test]
        fn circuit_then_inverse_is_identity(c in arb_circuit(5, 40)) {
            let round = c.then(&c.inverse()).unwrap();
            let s = simulate::<f64>(&round).unwrap();
            prop_assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-10);
        }
    }
}
