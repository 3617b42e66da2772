use num_complex::Complex;

use crate::circuit::Circuit;
use crate::qcore::gate::Gate;
use crate::scalar::principal_angle;

const TOL: f64 = 1e-12;

type M2 = [Complex<f64>; 4];

fn mul(a: &M2, b: &M2) -> M2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// ZYZ angles `(θ, φ, λ)` of a 2×2 unitary with `U = e^{iα} U3(θ, φ, λ)`, all in (−π, π].
///
/// When `sin(θ/2)` vanishes `φ` is fixed to 0; when `cos(θ/2)` vanishes `λ` is fixed to 0.
pub fn u3_angles(u: &M2) -> (f64, f64, f64) {
    let (c, s) = (u[0].norm(), u[2].norm());
    let theta = 2.0 * s.atan2(c);
    let arg = |z: Complex<f64>| z.im.atan2(z.re);
    let (phi, lambda) = if s < TOL {
        (0.0, arg(u[3]) - arg(u[0]))
    } else if c < TOL {
        (arg(u[2]) - arg(-u[1]), 0.0)
    } else {
        (arg(u[2]) - arg(u[0]), arg(-u[1]) - arg(u[0]))
    };
    (principal_angle(theta), principal_angle(phi), principal_angle(lambda))
}

fn flush(run: &mut Vec<Gate>, out: &mut Vec<Gate>) {
    match run.len() {
        0 => {}
        1 => out.push(run.pop().expect("one gate")),
        _ => {
            let q = run[0].targets[0];
            let id = [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
            let product = run.iter().fold(id, |acc, g| mul(&g.entries_1q::<f64>(), &acc));
            let (theta, phi, lambda) = u3_angles(&product);
            let is_identity = theta.abs() < 1e-10 && principal_angle(phi + lambda).abs() < 1e-10;
            if !is_identity {
                let tag = run[0].tag.filter(|t| run.iter().all(|g| g.tag == Some(*t)));
                let mut merged = Gate::u3(q, theta, phi, lambda);
                merged.tag = tag;
                out.push(merged);
            }
            run.clear();
        }
    }
}

/// Collapses each maximal run of single-qubit gates on a wire into one U3.
///
/// Runs whose product is the identity up to phase are dropped. Isolated gates are kept as
/// they are, so a circuit without adjacent single-qubit gates comes back unchanged.
pub fn merge_single_qubit(circuit: &Circuit) -> Circuit {
    let mut pending: Vec<Vec<Gate>> = vec![Vec::new(); circuit.n];
    let mut ops = Vec::with_capacity(circuit.len());
    for g in &circuit.ops {
        if g.targets.len() == 1 {
            pending[g.targets[0]].push(g.clone());
        } else {
            for &t in &g.targets {
                flush(&mut pending[t], &mut ops);
            }
            ops.push(g.clone());
        }
    }
    for run in pending.iter_mut() {
        flush(run, &mut ops);
    }
    Circuit { n: circuit.n, ops, name: circuit.name.clone() }
}
