//! Device models: coupling graph, per-edge CX error, per-qubit readout and gate error.
//!
//! The two shipped configurations reproduce the coupling graphs of the five-qubit
//! `qx2` (bow-tie, 6 edges) and `ourense` (T shape, 4 edges) devices. Their error rates
//! are illustrative values with the usual ratio of roughly ten between two-qubit and
//! single-qubit error, not calibration data.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};

const QX2_JSON: &str = include_str!("../devices/qx2.json");
const OURENSE_JSON: &str = include_str!("../devices/ourense.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DeviceConfig", into = "DeviceConfig")]
pub struct DeviceModel {
    pub name: String,
    n: usize,
    /// Sorted pairs `(a, b)` with `a < b`.
    edges: Vec<(usize, usize)>,
    cx_error: BTreeMap<(usize, usize), f64>,
    readout_error: Vec<f64>,
    single_qubit_error: Vec<f64>,
    distances: Vec<Vec<usize>>,
}

/// On-disk form of a device.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub name: String,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub cx_error: BTreeMap<String, f64>,
    pub readout_error: Vec<f64>,
    pub single_qubit_error: Vec<f64>,
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn parse_edge_key(key: &str) -> QResult<(usize, usize)> {
    let bad = || QError::InvalidDevice(format!("bad cx_error key {key:?}, expected \"i-j\""));
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    let a = a.trim().parse::<usize>().map_err(|_| bad())?;
    let b = b.trim().parse::<usize>().map_err(|_| bad())?;
    Ok(edge_key(a, b))
}

/// Serde adapter for maps keyed by undirected edges, written as `"i-j"` strings.
pub mod edge_map {
    use std::collections::BTreeMap;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<(usize, usize), f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(&(a, b), p)| (format!("{a}-{b}"), p)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(usize, usize), f64>, D::Error> {
        BTreeMap::<String, f64>::deserialize(d)?
            .into_iter()
            .map(|(k, p)| super::parse_edge_key(&k).map(|e| (e, p)).map_err(D::Error::custom))
            .collect()
    }
}

fn check_rate(what: &str, p: f64) -> QResult<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QError::InvalidDevice(format!("{what} rate {p} outside [0, 1]")));
    }
    Ok(())
}

impl TryFrom<DeviceConfig> for DeviceModel {
    type Error = QError;

    fn try_from(cfg: DeviceConfig) -> QResult<Self> {
        let n = cfg.n;
        if n == 0 {
            return Err(QError::InvalidDevice("device has no qubits".into()));
        }
        let mut edges = Vec::new();
        for [a, b] in cfg.edges {
            if a >= n || b >= n {
                return Err(QError::InvalidDevice(format!("dangling edge ({a},{b}) on {n} qubits")));
            }
            if a == b {
                return Err(QError::InvalidDevice(format!("self-loop on qubit {a}")));
            }
            let e = edge_key(a, b);
            if edges.contains(&e) {
                return Err(QError::InvalidDevice(format!("duplicate edge ({a},{b})")));
            }
            edges.push(e);
        }
        edges.sort_unstable();

        let mut cx_error = BTreeMap::new();
        for (key, p) in cfg.cx_error {
            let e = parse_edge_key(&key)?;
            if !edges.contains(&e) {
                return Err(QError::InvalidDevice(format!("cx_error for non-edge {key}")));
            }
            check_rate("cx_error", p)?;
            cx_error.insert(e, p);
        }
        if let Some(e) = edges.iter().find(|e| !cx_error.contains_key(e)) {
            return Err(QError::InvalidDevice(format!("missing cx_error for edge {}-{}", e.0, e.1)));
        }
        for (what, v) in [("readout_error", &cfg.readout_error), ("single_qubit_error", &cfg.single_qubit_error)] {
            if v.len() != n {
                return Err(QError::InvalidDevice(format!("{what} has {} entries for {n} qubits", v.len())));
            }
            v.iter().try_for_each(|&p| check_rate(what, p))?;
        }

        let distances = all_pairs_distances(n, &edges);
        if distances[0].iter().any(|&d| d == usize::MAX) {
            return Err(QError::InvalidDevice("coupling graph is disconnected".into()));
        }
        Ok(DeviceModel {
            name: cfg.name,
            n,
            edges,
            cx_error,
            readout_error: cfg.readout_error,
            single_qubit_error: cfg.single_qubit_error,
            distances,
        })
    }
}

impl From<DeviceModel> for DeviceConfig {
    fn from(d: DeviceModel) -> Self {
        DeviceConfig {
            name: d.name,
            n: d.n,
            edges: d.edges.iter().map(|&(a, b)| [a, b]).collect(),
            cx_error: d.cx_error.iter().map(|(&(a, b), &p)| (format!("{a}-{b}"), p)).collect(),
            readout_error: d.readout_error,
            single_qubit_error: d.single_qubit_error,
        }
    }
}

fn all_pairs_distances(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    (0..n)
        .map(|src| {
            let mut dist = vec![usize::MAX; n];
            dist[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            dist
        })
        .collect()
}

/// Parses and validates a JSON device configuration.
pub fn load_device(text: &str) -> QResult<DeviceModel> {
    let cfg: DeviceConfig = serde_json::from_str(text)?;
    DeviceModel::try_from(cfg)
}

impl DeviceModel {
    pub fn qx2() -> Self {
        load_device(QX2_JSON).expect("shipped qx2 config is valid")
    }

    pub fn ourense() -> Self {
        load_device(OURENSE_JSON).expect("shipped ourense config is valid")
    }

    /// Looks up a shipped device by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "qx2" => Some(Self::qx2()),
            "ourense" => Some(Self::ourense()),
            _ => None,
        }
    }

    /// Fully connected device without errors, handy for ideal runs.
    pub fn ideal(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| [a, b])).collect::<Vec<_>>();
        let cfg = DeviceConfig {
            name: format!("ideal-{n}"),
            n,
            cx_error: edges.iter().map(|[a, b]| (format!("{a}-{b}"), 0.0)).collect(),
            edges,
            readout_error: vec![0.0; n],
            single_qubit_error: vec![0.0; n],
        };
        DeviceModel::try_from(cfg).expect("complete graph is valid")
    }

    /// Same topology with every error rate set to zero.
    pub fn noiseless(&self) -> Self {
        let mut d = self.clone();
        d.cx_error.values_mut().for_each(|p| *p = 0.0);
        d.readout_error.fill(0.0);
        d.single_qubit_error.fill(0.0);
        d
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device serializes")
    }

    /// Whether a CX between `control` and `target` is native (either direction).
    pub fn allowed(&self, control: usize, target: usize) -> QResult<bool> {
        for q in [control, target] {
            if q >= self.n {
                return Err(QError::TargetOutOfRange { target: q, n: self.n });
            }
        }
        if control == target {
            return Err(QError::DuplicateTargets(vec![control, target]));
        }
        Ok(self.cx_error.contains_key(&edge_key(control, target)))
    }

    /// CX error rate of the edge `{a, b}`, if it exists.
    pub fn cx_error(&self, a: usize, b: usize) -> Option<f64> {
        self.cx_error.get(&edge_key(a, b)).copied()
    }

    pub fn cx_errors(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.cx_error
    }

    pub fn readout_error(&self) -> &[f64] {
        &self.readout_error
    }

    pub fn single_qubit_error(&self) -> &[f64] {
        &self.single_qubit_error
    }

    /// Hop distance between two physical qubits.
    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.distances[a][b]
    }

    pub fn neighbors(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == q {
                Some(b)
            } else if b == q {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn mean_cx_error(&self) -> f64 {
        self.cx_error.values().sum::<f64>() / self.cx_error.len().max(1) as f64
    }

    pub fn mean_single_qubit_error(&self) -> f64 {
        self.single_qubit_error.iter().sum::<f64>() / self.n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_topologies() {
        let qx2 = DeviceModel::qx2();
        assert_eq!(qx2.edges().len(), 6);
        assert_eq!(qx2.edges(), &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]);
        let ourense = DeviceModel::ourense();
        assert_eq!(ourense.edges().len(), 4);
        assert_eq!(ourense.edges(), &[(0, 1), (1, 2), (1, 3), (3, 4)]);
    }

    #[test]
    fn allowed_examples() {
        assert!(DeviceModel::qx2().allowed(3, 4).unwrap());
        assert!(!DeviceModel::ourense().allowed(0, 4).unwrap());
        for d in [DeviceModel::qx2(), DeviceModel::ourense()] {
            for k in 0..5 {
                assert!(d.allowed(k, k).is_err());
            }
            assert!(d.allowed(0, 5).is_err());
        }
    }

    #[test]
    fn allowed_is_symmetric() {
        for d in [DeviceModel::qx2(), DeviceModel::ourense()] {
            for a in 0..5 {
                for b in (0..5).filter(|&b| b != a) {
                    assert_eq!(d.allowed(a, b).unwrap(), d.allowed(b, a).unwrap());
                }
            }
        }
    }

    #[test]
    fn rejects_dangling_edge() {
        let text = QX2_JSON.replace("[3, 4]]", "[3, 4], [0, 9]]");
        let err = load_device(&text).unwrap_err();
        assert!(matches!(err, QError::InvalidDevice(_)), "{err}");
    }

    #[test]
    fn rejects_disconnected_graph() {
        let text = r#"{"name":"split","n":4,"edges":[[0,1],[2,3]],"cx_error":{"0-1":0.01,"2-3":0.01},
            "readout_error":[0,0,0,0],"single_qubit_error":[0,0,0,0]}"#;
        let err = load_device(text).unwrap_err();
        assert!(err.to_string().contains("disconnected"));
    }

    #[test]
    fn rejects_bad_rates() {
        let text = QX2_JSON.replace("0.030,", "1.5,");
        assert!(load_device(&text).is_err());
        let text = QX2_JSON.replace("\"0-1\": 0.020", "\"0-1\": -0.1");
        assert!(load_device(&text).is_err());
        let text = QX2_JSON.replace("\"3-4\": 0.019", "\"0-4\": 0.019");
        assert!(load_device(&text).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = DeviceModel::ourense();
        assert_eq!(load_device(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn error_ratio_is_about_one_order_of_magnitude() {
        for d in [DeviceModel::qx2(), DeviceModel::ourense()] {
            let ratio = d.mean_cx_error() / d.mean_single_qubit_error();
            assert!((5.0..=20.0).contains(&ratio), "{}: {ratio}", d.name);
        }
    }

    #[test]
    fn distances() {
        let o = DeviceModel::ourense();
        assert_eq!(o.distance(0, 4), 3);
        assert_eq!(o.distance(2, 4), 3);
        assert_eq!(o.neighbors(1).collect::<Vec<_>>(), vec![0, 2, 3]);
    }
}
