//! Stochastic noise: random two-qubit Paulis after CX gates, readout bit flips and an
//! optional amplitude-damping channel applied after every circuit layer.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Tag};
use crate::device::{edge_key, DeviceModel};
use crate::error::{QError, QResult};
use crate::qcore::density::DensityMatrix;
use crate::qcore::gate::{Gate, GateKind, Pauli};
use crate::qcore::sample::{Counts, Sampler};
use crate::qcore::state::{apply_unchecked, StateVector};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Probability of a random non-identity two-qubit Pauli after each CX, per edge.
    #[serde(with = "crate::device::edge_map")]
    pub cx_pauli: BTreeMap<(usize, usize), f64>,
    /// Per-qubit readout flip probability.
    pub readout: Vec<f64>,
    /// Per-qubit damping strength applied once per circuit layer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_damping: Option<Vec<f64>>,
}

fn check_probability(p: f64) -> QResult<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QError::ProbabilityOutOfRange(p));
    }
    Ok(())
}

impl NoiseConfig {
    /// No noise at all on `n` qubits.
    pub fn ideal(n: usize) -> Self {
        NoiseConfig { cx_pauli: BTreeMap::new(), readout: vec![0.0; n], amplitude_damping: None }
    }

    /// Baseline model of a device: CX Pauli rate `ε_{i,j}` and the device readout rates.
    pub fn from_device(device: &DeviceModel) -> Self {
        NoiseConfig {
            cx_pauli: device.cx_errors().clone(),
            readout: device.readout_error().to_vec(),
            amplitude_damping: None,
        }
    }

    /// Same config with every CX rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> QResult<Self> {
        let mut out = self.clone();
        for p in out.cx_pauli.values_mut() {
            *p *= factor;
            check_probability(*p)?;
        }
        Ok(out)
    }

    /// Same config without readout errors.
    pub fn without_readout(&self) -> Self {
        NoiseConfig { readout: vec![0.0; self.readout.len()], ..self.clone() }
    }

    pub fn validate(&self) -> QResult<()> {
        self.cx_pauli.values().try_for_each(|&p| check_probability(p))?;
        self.readout.iter().try_for_each(|&p| check_probability(p))?;
        if let Some(d) = &self.amplitude_damping {
            if d.len() != self.readout.len() {
                return Err(QError::QubitCountMismatch { expected: self.readout.len(), got: d.len() });
            }
            d.iter().try_for_each(|&p| check_probability(p))?;
        }
        Ok(())
    }

    /// CX Pauli rate of the edge `{a, b}`; zero for unlisted edges.
    pub fn cx_rate(&self, a: usize, b: usize) -> f64 {
        self.cx_pauli.get(&edge_key(a, b)).copied().unwrap_or(0.0)
    }

    pub fn is_ideal(&self) -> bool {
        self.cx_pauli.values().all(|&p| p == 0.0)
            && self.readout.iter().all(|&p| p == 0.0)
            && self.amplitude_damping.as_ref().is_none_or(|d| d.iter().all(|&p| p == 0.0))
    }
}

/// `(σ_e, σ_f)` for a pair index in `0..16`; `σ_e` acts on the control.
pub fn pauli_pair(index: u8) -> (Pauli, Pauli) {
    (Pauli::ALL[(index / 4) as usize], Pauli::ALL[(index % 4) as usize])
}

/// One stochastic Pauli insertion right after op `after`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Insertion {
    pub after: usize,
    /// Index into [`pauli_pair`], never 0.
    pub pair: u8,
}

/// Positions of all CX gates with their insertion probability.
pub(crate) fn cx_sites(circuit: &Circuit, rate: impl Fn(usize, usize) -> f64) -> Vec<(usize, f64)> {
    circuit
        .ops
        .iter()
        .enumerate()
        .filter(|(_, g)| g.kind == GateKind::CX)
        .map(|(i, g)| (i, rate(g.targets[0], g.targets[1])))
        .collect()
}

/// Draws the insertions of one realization. Sites with probability 0 consume no randomness.
pub(crate) fn draw_insertions<R: Rng + ?Sized>(sites: &[(usize, f64)], rng: &mut R, out: &mut Vec<Insertion>) {
    out.clear();
    for &(after, p) in sites {
        if p > 0.0 && rng.random::<f64>() < p {
            out.push(Insertion { after, pair: rng.random_range(1..16u8) });
        }
    }
}

/// Materializes a realization as an explicit circuit with tagged Pauli gates.
pub fn apply_insertions(circuit: &Circuit, insertions: &[Insertion]) -> Circuit {
    let mut out = Circuit { n: circuit.n, ops: Vec::with_capacity(circuit.len() + 2 * insertions.len()), name: circuit.name.clone() };
    let mut k = 0;
    for (i, g) in circuit.ops.iter().enumerate() {
        out.ops.push(g.clone());
        while k < insertions.len() && insertions[k].after == i {
            let (e, f) = pauli_pair(insertions[k].pair);
            out.ops.push(Gate::pauli(e, g.targets[0]).tagged(Tag::NoiseInjection));
            out.ops.push(Gate::pauli(f, g.targets[1]).tagged(Tag::NoiseInjection));
            k += 1;
        }
    }
    out
}

/// Flips bit `q` of `bits` with probability `p[q]`. Zero rates consume no randomness.
pub fn flip_readout<R: Rng + ?Sized>(bits: usize, p: &[f64], rng: &mut R) -> usize {
    let mut out = bits;
    for (q, &pq) in p.iter().enumerate() {
        if pq > 0.0 && rng.random::<f64>() < pq {
            out ^= 1 << q;
        }
    }
    out
}

/// Kraus pair `K0 = diag(1, √(1−p))`, `K1 = √p |0⟩⟨1|`, row-major.
pub fn amplitude_damping_kraus<T: Real>(p: f64) -> QResult<[[Complex<T>; 4]; 2]> {
    check_probability(p)?;
    let z = Complex::new(T::zero(), T::zero());
    let r = |x: f64| Complex::new(T::of(x), T::zero());
    Ok([[r(1.0), z, z, r((1.0 - p).sqrt())], [z, r(p.sqrt()), z, z]])
}

/// Checks that `circuit` fits on `device` and every two-qubit gate sits on an edge.
pub fn check_conformant(circuit: &Circuit, device: &DeviceModel) -> QResult<()> {
    circuit.validate()?;
    if circuit.n > device.num_qubits() {
        return Err(QError::CircuitTooWide { circuit: circuit.n, device: device.num_qubits() });
    }
    for g in circuit.ops.iter().filter(|g| g.is_two_qubit()) {
        let (c, t) = (g.targets[0], g.targets[1]);
        if !device.allowed(c, t)? {
            return Err(QError::NonConformant { control: c, target: t });
        }
    }
    Ok(())
}

fn statevector_probs(circuit: &Circuit, insertions: &[Insertion]) -> QResult<Vec<f64>> {
    let mut s = StateVector::<f64>::zero(circuit.n)?;
    let mut amps = s.amplitudes().to_vec();
    let mut k = 0;
    for (i, g) in circuit.ops.iter().enumerate() {
        apply_unchecked(&mut amps, g);
        while k < insertions.len() && insertions[k].after == i {
            let (e, f) = pauli_pair(insertions[k].pair);
            apply_unchecked(&mut amps, &Gate::pauli(e, g.targets[0]));
            apply_unchecked(&mut amps, &Gate::pauli(f, g.targets[1]));
            k += 1;
        }
    }
    s = StateVector::from_amplitudes(amps)?;
    Ok(s.probabilities())
}

fn density_probs(circuit: &Circuit, insertions: &[Insertion], damping: &[f64]) -> QResult<Vec<f64>> {
    let realized = apply_insertions(circuit, insertions);
    let layers = realized.layers();
    let mut order: Vec<usize> = (0..realized.len()).collect();
    order.sort_by_key(|&i| layers[i]);
    let kraus = damping
        .iter()
        .map(|&p| amplitude_damping_kraus::<f64>(p))
        .collect::<QResult<Vec<_>>>()?;
    let mut rho = DensityMatrix::from_state(&StateVector::<f64>::zero(circuit.n)?);
    for (pos, &i) in order.iter().enumerate() {
        rho = rho.apply_gate(&realized.ops[i])?;
        let layer_done = order.get(pos + 1).is_none_or(|&j| layers[j] != layers[i]);
        if layer_done {
            for (q, k) in kraus.iter().enumerate().take(circuit.n) {
                if damping[q] > 0.0 {
                    rho = rho.apply_local_channel(q, k)?;
                }
            }
        }
    }
    Ok(rho.probabilities())
}

/// Samples `shots` noisy executions of a device-conformant circuit.
///
/// Each shot draws its own Pauli insertions, simulates that realization (cached by
/// realization), measures once and then applies readout flips. With all rates at zero the
/// random stream is consumed exactly like [`crate::qcore::sample`].
pub fn sample_noisy<R: Rng + ?Sized>(
    circuit: &Circuit,
    device: &DeviceModel,
    noise: &NoiseConfig,
    shots: u64,
    rng: &mut R,
) -> QResult<Counts> {
    if shots == 0 {
        return Err(QError::ZeroShots);
    }
    check_conformant(circuit, device)?;
    noise.validate()?;
    if noise.readout.len() < circuit.n {
        return Err(QError::QubitCountMismatch { expected: circuit.n, got: noise.readout.len() });
    }
    let sites = cx_sites(circuit, |a, b| noise.cx_rate(a, b));
    let readout = &noise.readout[..circuit.n];
    let damping = noise.amplitude_damping.as_deref().filter(|d| d.iter().any(|&p| p > 0.0));
    let probs = |ins: &[Insertion]| match damping {
        Some(d) => density_probs(circuit, ins, d),
        None => statevector_probs(circuit, ins),
    };

    let ideal = Sampler::new(probs(&[])?);
    let mut cache: HashMap<Vec<Insertion>, Sampler> = HashMap::new();
    let mut insertions = Vec::new();
    let mut counts = Counts::zeros(circuit.n);
    for _ in 0..shots {
        draw_insertions(&sites, rng, &mut insertions);
        let outcome = if insertions.is_empty() {
            ideal.draw(rng)
        } else {
            if !cache.contains_key(&insertions) {
                cache.insert(insertions.clone(), Sampler::new(probs(&insertions)?));
            }
            cache[&insertions].draw(rng)
        };
        counts.record(flip_readout(outcome, readout, rng));
    }
    Ok(counts)
}
