use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::Circuit;
use crate::error::QResult;
use crate::qcore::gate::{Gate, GateKind};

/// Lowering of one gate to `{U1, U2, U3, CX}`; identities vanish.
pub fn lower_gate(g: &Gate) -> Vec<Gate> {
    let q = || g.targets[0];
    let lowered = match g.kind {
        GateKind::U1 | GateKind::U2 | GateKind::U3 | GateKind::CX => vec![g.clone()],
        GateKind::PauliI => vec![],
        GateKind::X | GateKind::PauliX => vec![Gate::u3(q(), PI, 0.0, PI)],
        GateKind::PauliY => vec![Gate::u3(q(), PI, FRAC_PI_2, FRAC_PI_2)],
        GateKind::Z | GateKind::PauliZ => vec![Gate::u1(q(), PI)],
        GateKind::H => vec![Gate::u2(q(), 0.0, PI)],
        GateKind::SWAP => {
            let (a, b) = (g.targets[0], g.targets[1]);
            vec![Gate::cx(a, b), Gate::cx(b, a), Gate::cx(a, b)]
        }
    };
    lowered
        .into_iter()
        .map(|mut out| {
            out.tag = g.tag;
            out
        })
        .collect()
}

/// Rewrites every gate over `{U1, U2, U3, CX}`, exactly up to global phase.
pub fn decompose_to_basis(circuit: &Circuit) -> QResult<Circuit> {
    circuit.validate()?;
    Ok(Circuit {
        n: circuit.n,
        ops: circuit.ops.iter().flat_map(lower_gate).collect(),
        name: circuit.name.clone(),
    })
}

pub fn is_basis(kind: GateKind) -> bool {
    matches!(kind, GateKind::U1 | GateKind::U2 | GateKind::U3 | GateKind::CX)
}
