use crate::circuit::{Circuit, LayoutPermutation, Tag};
use crate::device::DeviceModel;
use crate::error::{QError, QResult};
use crate::qcore::gate::Gate;

/// Largest device for which every initial layout is tried.
pub const EXHAUSTIVE_LAYOUT_LIMIT: usize = 6;

/// Routed circuit over physical qubits plus the layouts at its two ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Routed {
    pub circuit: Circuit,
    pub initial_layout: LayoutPermutation,
    pub final_layout: LayoutPermutation,
}

/// Greedy SWAP routing from a given initial layout (logical → physical over all device qubits).
///
/// Before each CX whose endpoints are not adjacent, one SWAP is inserted that shortens their
/// distance by one; among all such SWAPs touching either endpoint the lowest-indexed pair
/// wins. Inserted SWAPs are tagged [`Tag::Routing`].
pub fn route_from(circuit: &Circuit, device: &DeviceModel, initial: &LayoutPermutation) -> QResult<Routed> {
    circuit.validate()?;
    let n = device.num_qubits();
    if circuit.n > n {
        return Err(QError::CircuitTooWide { circuit: circuit.n, device: n });
    }
    if initial.len() != n {
        return Err(QError::InvalidLayout(format!("layout covers {} qubits, device has {n}", initial.len())));
    }
    let mut layout = initial.clone();
    let mut out = Circuit { n, ops: Vec::with_capacity(circuit.len()), name: circuit.name.clone() };
    for g in &circuit.ops {
        if g.is_two_qubit() {
            loop {
                let (pa, pb) = (layout.physical(g.targets[0]), layout.physical(g.targets[1]));
                let d = device.distance(pa, pb);
                if d <= 1 {
                    break;
                }
                let mut best: Option<(usize, usize)> = None;
                for (from, other) in [(pa, pb), (pb, pa)] {
                    for nb in device.neighbors(from) {
                        if device.distance(nb, other) + 1 == d {
                            let cand = (from.min(nb), from.max(nb));
                            if best.is_none_or(|b| cand < b) {
                                best = Some(cand);
                            }
                        }
                    }
                }
                let (a, b) = best.expect("connected device always has a shortening swap");
                out.ops.push(Gate::swap(a, b).tagged(Tag::Routing));
                layout.swap_physical(a, b);
            }
        }
        let mut mapped = g.clone();
        for t in mapped.targets.iter_mut() {
            *t = layout.physical(*t);
        }
        out.ops.push(mapped);
    }
    Ok(Routed { circuit: out, initial_layout: initial.clone(), final_layout: layout })
}

/// Greedy routing from the identity layout.
pub fn route_identity(circuit: &Circuit, device: &DeviceModel) -> QResult<Routed> {
    route_from(circuit, device, &LayoutPermutation::identity(device.num_qubits()))
}

/// Routes from every initial layout (devices up to [`EXHAUSTIVE_LAYOUT_LIMIT`] qubits) and
/// keeps the one minimizing `score`. The identity goes first and is only replaced by a
/// strictly better layout.
pub fn route_best<K: Ord>(
    circuit: &Circuit,
    device: &DeviceModel,
    score: impl Fn(&Routed) -> QResult<K>,
) -> QResult<Routed> {
    let n = device.num_qubits();
    let mut best = route_identity(circuit, device)?;
    let mut best_score = score(&best)?;
    if n > EXHAUSTIVE_LAYOUT_LIMIT {
        return Ok(best);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    while next_permutation(&mut perm) {
        let layout = LayoutPermutation::new(perm.clone())?;
        let cand = route_from(circuit, device, &layout)?;
        let s = score(&cand)?;
        if s < best_score {
            best = cand;
            best_score = s;
        }
    }
    Ok(best)
}

/// Lexicographic successor; false once `v` is the last permutation.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}
