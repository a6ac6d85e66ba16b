//! Problem data: nodes, per-product demands, travel matrices and fleet parameters.
//!
//! Instances come from two places. Coordinates are read from Solomon VRPTW
//! files (or drawn synthetically with the same R/C/RC flavour), and the rest
//! of the data is generated from a [`GeneratorConfig`]. The native archive
//! format is the JSON [`InstanceDocument`].

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when comparing matrix entries and demand sums.
pub const EPS: f64 = 1e-9;

/// A location in the plane. Node 0 is the depot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl Node {
    pub fn new(id: usize, x: f64, y: f64) -> Self {
        Node { id, x, y }
    }

    pub fn distance(&self, other: &Node) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Dense square matrix of travel times.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelMatrix {
    size: usize,
    data: Vec<f64>,
}

impl TravelMatrix {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                data.push(f(i, j));
            }
        }
        TravelMatrix { size, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.size + j] = value;
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scaled(&self, factor: f64) -> Self {
        TravelMatrix {
            size: self.size,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Solomon network flavour: random, clustered, or mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NetworkKind {
    R,
    C,
    RC,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 3] = [NetworkKind::R, NetworkKind::C, NetworkKind::RC];
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetworkKind::R => "R",
            NetworkKind::C => "C",
            NetworkKind::RC => "RC",
        })
    }
}

impl FromStr for NetworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "R" => Ok(NetworkKind::R),
            "C" => Ok(NetworkKind::C),
            "RC" => Ok(NetworkKind::RC),
            other => Err(Error::InvalidInstance(format!(
                "unknown network kind {other:?} (expected R, C or RC)"
            ))),
        }
    }
}

/// Immutable problem data.
///
/// `demand` and `service_time` are indexed by node id; the depot row is all
/// zeros. Travel matrices are derived from the coordinates.
#[derive(Debug, Clone)]
pub struct Instance {
    pub nodes: Vec<Node>,
    pub demand: Vec<Vec<f64>>,
    pub service_time: Vec<f64>,
    pub mhc_travel: TravelMatrix,
    pub truck_travel: TravelMatrix,
    pub num_mhc: usize,
    pub capacity: f64,
    pub resupply_time: f64,
    pub num_products: usize,
    pub truck_speed_factor: f64,
    pub seed: Option<u64>,
}

impl Instance {
    /// Assembles an instance and derives both travel matrices from `nodes`.
    pub fn new(
        nodes: Vec<Node>,
        demand: Vec<Vec<f64>>,
        service_time: Vec<f64>,
        num_mhc: usize,
        capacity: f64,
        resupply_time: f64,
        truck_speed_factor: f64,
    ) -> Self {
        let (mhc_travel, truck_travel) = build_matrices(&nodes, truck_speed_factor);
        let num_products = demand.first().map_or(0, Vec::len);
        Instance {
            nodes,
            demand,
            service_time,
            mhc_travel,
            truck_travel,
            num_mhc,
            capacity,
            resupply_time,
            num_products,
            truck_speed_factor,
            seed: None,
        }
    }

    /// Number of customers (depot excluded).
    pub fn num_customers(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    /// Customer ids `1..=n`.
    pub fn customers(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.num_customers()
    }

    #[inline]
    pub fn t(&self, i: usize, j: usize) -> f64 {
        self.mhc_travel.get(i, j)
    }

    #[inline]
    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.truck_travel.get(i, j)
    }

    /// Sum of all product demands at `node`.
    #[inline]
    pub fn total_demand(&self, node: usize) -> f64 {
        self.demand[node].iter().sum()
    }

    pub fn to_document(&self) -> InstanceDocument {
        let first = self.service_time.get(1).copied().unwrap_or(0.0);
        let uniform = self.service_time[1..].iter().all(|s| *s == first);
        InstanceDocument {
            nodes: self.nodes.clone(),
            demand: self.demand.clone(),
            service_time: if uniform {
                ServiceTimes::Uniform(first)
            } else {
                ServiceTimes::PerNode(self.service_time.clone())
            },
            capacity: self.capacity,
            resupply_time: self.resupply_time,
            num_mhc: self.num_mhc,
            truck_speed_factor: self.truck_speed_factor,
            seed: self.seed,
        }
    }

    /// Rebuilds an instance from its document. Only shape errors are reported
    /// here; semantic checks belong to [`validate_instance`].
    pub fn from_document(doc: InstanceDocument) -> Result<Self> {
        let n = doc.nodes.len();
        if n < 2 {
            return Err(Error::InvalidInstance(
                "an instance needs a depot and at least one customer".into(),
            ));
        }
        if doc.demand.len() != n {
            return Err(Error::InvalidInstance(format!(
                "demand has {} rows for {} nodes",
                doc.demand.len(),
                n
            )));
        }
        let width = doc.demand[0].len();
        if width == 0 || doc.demand.iter().any(|row| row.len() != width) {
            return Err(Error::InvalidInstance(
                "demand rows must share one nonzero product count".into(),
            ));
        }
        let service_time = match doc.service_time {
            ServiceTimes::Uniform(s) => {
                let mut v = vec![s; n];
                v[0] = 0.0;
                v
            }
            ServiceTimes::PerNode(v) if v.len() == n => v,
            ServiceTimes::PerNode(v) => {
                return Err(Error::InvalidInstance(format!(
                    "service_time has {} entries for {} nodes",
                    v.len(),
                    n
                )))
            }
        };
        let mut inst = Instance::new(
            doc.nodes,
            doc.demand,
            service_time,
            doc.num_mhc,
            doc.capacity,
            doc.resupply_time,
            doc.truck_speed_factor,
        );
        inst.seed = doc.seed;
        Ok(inst)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }
}

/// Service times in a document: one constant or one value per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ServiceTimes {
    Uniform(f64),
    PerNode(Vec<f64>),
}

/// On-disk form of an [`Instance`]. Travel matrices are not stored; they are
/// rebuilt from the coordinates and `truck_speed_factor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub nodes: Vec<Node>,
    pub demand: Vec<Vec<f64>>,
    pub service_time: ServiceTimes,
    pub capacity: f64,
    pub resupply_time: f64,
    pub num_mhc: usize,
    pub truck_speed_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Parameters for [`generate_instance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub network_kind: NetworkKind,
    /// Number of customers to serve.
    pub n_nodes: usize,
    pub num_mhc: usize,
    pub num_products: usize,
    pub capacity: f64,
    pub demand_choices: Vec<u32>,
    pub service_time: f64,
    pub resupply_time: f64,
    /// Truck travel time is this factor times MHC travel time.
    pub truck_speed_factor: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            network_kind: NetworkKind::R,
            n_nodes: 30,
            num_mhc: 3,
            num_products: 2,
            capacity: 26.0,
            demand_choices: vec![4, 5],
            service_time: 20.0,
            resupply_time: 10.0,
            truck_speed_factor: 1.0,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    fn check(&self) -> Result<()> {
        if self.truck_speed_factor.is_nan() || self.truck_speed_factor <= 0.0 {
            return Err(Error::InvalidInstance("truck speed factor must be positive".into()));
        }
        if self.demand_choices.is_empty() {
            return Err(Error::InvalidInstance("demand_choices is empty".into()));
        }
        if self.num_products == 0 || self.num_mhc == 0 || self.n_nodes == 0 {
            return Err(Error::InvalidInstance(
                "products, fleet size and node count must all be positive".into(),
            ));
        }
        if self.num_mhc > self.n_nodes {
            return Err(Error::InvalidInstance(format!(
                "{} MHCs for {} customers would leave a route empty",
                self.num_mhc, self.n_nodes
            )));
        }
        let largest = *self.demand_choices.iter().max().unwrap() as f64;
        if self.capacity < largest {
            return Err(Error::InvalidInstance(format!(
                "capacity {} is below the largest single-node demand {}",
                self.capacity, largest
            )));
        }
        Ok(())
    }
}

/// Reads depot and customer coordinates from a Solomon VRPTW file.
///
/// Only the id, x and y columns of the CUSTOMER table are kept.
pub fn parse_solomon(text: &str) -> Result<Vec<Node>> {
    let mut lines = text.lines().enumerate();
    let mut found_header = false;
    for (_, line) in lines.by_ref() {
        if line.trim().eq_ignore_ascii_case("CUSTOMER") {
            found_header = true;
            break;
        }
    }
    if !found_header {
        return Err(Error::Parse {
            line: text.lines().count() + 1,
            message: "missing CUSTOMER section".into(),
        });
    }

    let mut nodes = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.to_ascii_uppercase().starts_with("CUST") {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 7 columns, found {}", fields.len()),
            });
        }
        let mut values = [0f64; 7];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("not a number: {field:?}"),
            })?;
        }
        if values[0] < 0.0 || values[0].fract() != 0.0 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("customer number {} is not a nonnegative integer", fields[0]),
            });
        }
        let id = values[0] as usize;
        if !seen.insert(id) {
            return Err(Error::DuplicateNode(id));
        }
        nodes.push(Node::new(id, values[1], values[2]));
    }

    if nodes.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count() + 1,
            message: "CUSTOMER table has no rows".into(),
        });
    }
    if nodes[0].id != 0 {
        return Err(Error::InvalidInstance("first customer row must be the depot (id 0)".into()));
    }
    if nodes.iter().enumerate().any(|(pos, n)| pos != n.id) {
        return Err(Error::InvalidInstance("customer ids must be contiguous 0..n in file order".into()));
    }
    Ok(nodes)
}

/// Euclidean MHC travel times and truck times scaled by `truck_speed_factor`.
pub fn build_matrices(nodes: &[Node], truck_speed_factor: f64) -> (TravelMatrix, TravelMatrix) {
    let t = TravelMatrix::from_fn(nodes.len(), |i, j| {
        if i == j {
            0.0
        } else {
            nodes[i].distance(&nodes[j])
        }
    });
    let r = t.scaled(truck_speed_factor);
    (t, r)
}

/// Draws `n_customers` customer locations plus a depot in the style of the
/// Solomon R, C and RC networks.
pub fn synthetic_coords(kind: NetworkKind, n_customers: usize, seed: u64) -> Vec<Node> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_C00D_u64);
    let mut nodes = Vec::with_capacity(n_customers + 1);
    let depot = match kind {
        NetworkKind::R => (35.0, 35.0),
        NetworkKind::C | NetworkKind::RC => (40.0, 50.0),
    };
    nodes.push(Node::new(0, depot.0, depot.1));

    let centers: Vec<(f64, f64)> = (0..(n_customers / 10).clamp(2, 10))
        .map(|_| (rng.gen_range(10.0..90.0), rng.gen_range(10.0..80.0)))
        .collect();
    for id in 1..=n_customers {
        let clustered = match kind {
            NetworkKind::R => false,
            NetworkKind::C => true,
            NetworkKind::RC => id % 2 == 0,
        };
        let (x, y) = if clustered {
            let (cx, cy) = *centers.choose(&mut rng).unwrap();
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            let radius = 8.0 * rng.gen::<f64>().sqrt();
            (cx + radius * angle.cos(), cy + radius * angle.sin())
        } else {
            (rng.gen_range(0.0..70.0), rng.gen_range(0.0..70.0))
        };
        nodes.push(Node::new(id, x.round(), y.round()));
    }
    nodes
}

/// Builds a full instance on the first `cfg.n_nodes` customers of `coords`.
///
/// Every customer demands one amount from `demand_choices` of one uniformly
/// drawn product. Output depends only on `(cfg, coords)`.
pub fn generate_instance(cfg: &GeneratorConfig, coords: &[Node]) -> Result<Instance> {
    cfg.check()?;
    if coords.len() < cfg.n_nodes + 1 {
        return Err(Error::InvalidInstance(format!(
            "{} customers requested but only {} available",
            cfg.n_nodes,
            coords.len().saturating_sub(1)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let nodes: Vec<Node> = coords[..=cfg.n_nodes]
        .iter()
        .enumerate()
        .map(|(id, n)| Node::new(id, n.x, n.y))
        .collect();

    let mut demand = vec![vec![0.0; cfg.num_products]; nodes.len()];
    for row in demand.iter_mut().skip(1) {
        let amount = *cfg.demand_choices.choose(&mut rng).unwrap();
        let product = rng.gen_range(0..cfg.num_products);
        row[product] = amount as f64;
    }
    let mut service_time = vec![cfg.service_time; nodes.len()];
    service_time[0] = 0.0;

    let mut inst = Instance::new(
        nodes,
        demand,
        service_time,
        cfg.num_mhc,
        cfg.capacity,
        cfg.resupply_time,
        cfg.truck_speed_factor,
    );
    inst.seed = Some(cfg.seed);

    let report = validate_instance(&inst);
    if !report.passed() {
        return Err(Error::InvalidInstance(report.violations.join("; ")));
    }
    Ok(inst)
}

/// Outcome of [`validate_instance`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub violations: Vec<String>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_matrix(name: &str, m: &TravelMatrix, n: usize, out: &mut Vec<String>) {
    if m.size() != n {
        out.push(format!("{name} matrix has size {} for {n} nodes", m.size()));
        return;
    }
    let mut symmetric = true;
    let mut diagonal = true;
    let mut nonneg = true;
    for i in 0..n {
        diagonal &= m.get(i, i).abs() <= EPS;
        for j in 0..n {
            let v = m.get(i, j);
            nonneg &= v >= 0.0 && v.is_finite();
            symmetric &= (v - m.get(j, i)).abs() <= EPS * (1.0 + v.abs());
        }
    }
    if !symmetric {
        out.push(format!("{name} matrix not symmetric"));
    }
    if !diagonal {
        out.push(format!("{name} matrix has a nonzero diagonal"));
    }
    if !nonneg {
        out.push(format!("{name} matrix has negative or non-finite entries"));
    }
}

/// Checks every [`Instance`] invariant and lists the ones that fail.
pub fn validate_instance(inst: &Instance) -> InstanceReport {
    let mut v = Vec::new();
    let n = inst.nodes.len();

    if n < 2 {
        v.push("instance has no customers".to_string());
    }
    if inst.nodes.iter().enumerate().any(|(pos, node)| node.id != pos) {
        v.push("node ids are not contiguous 0..n".to_string());
    }
    check_matrix("t", &inst.mhc_travel, n, &mut v);
    check_matrix("r", &inst.truck_travel, n, &mut v);

    if inst.num_mhc == 0 {
        v.push("fleet is empty".to_string());
    } else if inst.num_mhc > inst.num_customers() {
        v.push(format!(
            "num_mhc {} exceeds customer count {}",
            inst.num_mhc,
            inst.num_customers()
        ));
    }
    if inst.capacity.is_nan() || inst.capacity <= 0.0 {
        v.push("capacity must be positive".to_string());
    }
    if inst.resupply_time < 0.0 {
        v.push("resupply time is negative".to_string());
    }
    if inst.demand.len() != n || inst.service_time.len() != n {
        v.push("demand or service_time length does not match node count".to_string());
        return InstanceReport { violations: v };
    }
    if inst.num_products == 0 || inst.demand.iter().any(|row| row.len() != inst.num_products) {
        v.push("demand rows do not match the product count".to_string());
        return InstanceReport { violations: v };
    }
    if inst.demand[0].iter().any(|d| *d != 0.0) || inst.service_time[0] != 0.0 {
        v.push("depot must have zero demand and zero service time".to_string());
    }
    for (i, row) in inst.demand.iter().enumerate() {
        if row.iter().any(|d| *d < 0.0 || d.fract() != 0.0 || !d.is_finite()) {
            v.push(format!("node {i} has a negative or non-integral demand"));
        }
        let total: f64 = row.iter().sum();
        if total > inst.capacity + EPS {
            v.push(format!(
                "unservable node {i}: total demand {total} exceeds capacity {}",
                inst.capacity
            ));
        }
    }
    if inst.service_time.iter().any(|s| *s < 0.0) {
        v.push("negative service time".to_string());
    }
    InstanceReport { violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "C101\n\nVEHICLE\nNUMBER     CAPACITY\n  25         200\n\nCUSTOMER\nCUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME\n\n";

    #[test]
    fn depot_row_is_read() {
        let text = format!("{HEADER}    0      40         50          0          0       1236          0\n");
        let nodes = parse_solomon(&text).unwrap();
        assert_eq!(nodes, vec![Node::new(0, 40.0, 50.0)]);
    }

    #[test]
    fn full_table_row_count() {
        let mut text = HEADER.to_string();
        for id in 0..=100 {
            text.push_str(&format!("{id:5} {:8} {:8} 10 0 1000 90\n", id % 37, (id * 7) % 53));
        }
        let nodes = parse_solomon(&text).unwrap();
        assert_eq!(nodes.len(), 101);
        assert!(nodes.iter().enumerate().all(|(i, n)| n.id == i));
    }

    #[test]
    fn missing_customer_header() {
        let err = parse_solomon("C101\nVEHICLE\n 25 200\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn malformed_row_names_line() {
        let text = format!("{HEADER}    0 40 50 0 0 1236 0\n    1 45 oops 10 912 967 90\n");
        match parse_solomon(&text).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 11),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        let text = format!("{HEADER}0 40 50 0 0 1236 0\n1 45 68 10 912 967 90\n1 45 70 30 825 870 90\n");
        assert!(matches!(parse_solomon(&text), Err(Error::DuplicateNode(1))));
    }

    #[test]
    fn matrices_from_coordinates() {
        let nodes = [Node::new(0, 0.0, 0.0), Node::new(1, 3.0, 4.0)];
        let (t, r) = build_matrices(&nodes, 0.8);
        assert_eq!(t.get(0, 1), 5.0);
        assert_eq!(t.get(1, 0), 5.0);
        assert!((r.get(0, 1) - 4.0).abs() < 1e-12);
        assert_eq!(t.get(0, 0), 0.0);
        assert_eq!(t.get(1, 1), 0.0);
    }

    #[test]
    fn generated_demands_are_single_product() {
        let cfg = GeneratorConfig { seed: 42, ..Default::default() };
        let inst = generate_instance(&cfg, &synthetic_coords(NetworkKind::R, 30, 42)).unwrap();
        for i in inst.customers() {
            let nonzero: Vec<f64> = inst.demand[i].iter().copied().filter(|d| *d > 0.0).collect();
            assert_eq!(nonzero.len(), 1);
            assert!(nonzero[0] == 4.0 || nonzero[0] == 5.0);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GeneratorConfig { seed: 9, network_kind: NetworkKind::RC, ..Default::default() };
        let coords = synthetic_coords(cfg.network_kind, cfg.n_nodes, cfg.seed);
        let a = generate_instance(&cfg, &coords).unwrap().to_json().unwrap();
        let b = generate_instance(&cfg, &coords).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn capacity_below_demand_is_rejected() {
        let cfg = GeneratorConfig { capacity: 4.0, ..Default::default() };
        let err = generate_instance(&cfg, &synthetic_coords(NetworkKind::C, 30, 0)).unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)));
    }

    #[test]
    fn well_formed_instance_passes() {
        let inst = generate_instance(&GeneratorConfig::default(), &synthetic_coords(NetworkKind::C, 30, 1))
            .unwrap();
        assert!(validate_instance(&inst).passed());
    }

    #[test]
    fn asymmetric_matrix_flagged() {
        let mut inst = generate_instance(&GeneratorConfig::default(), &synthetic_coords(NetworkKind::R, 30, 1))
            .unwrap();
        inst.mhc_travel.set(1, 2, inst.t(1, 2) + 1.0);
        let report = validate_instance(&inst);
        assert!(report.violations.iter().any(|v| v.contains("t matrix not symmetric")));
    }

    #[test]
    fn unservable_node_flagged() {
        let mut inst = generate_instance(&GeneratorConfig::default(), &synthetic_coords(NetworkKind::R, 30, 1))
            .unwrap();
        inst.demand[3] = vec![15.0, 15.0];
        let report = validate_instance(&inst);
        assert!(report.violations.iter().any(|v| v.starts_with("unservable node 3")));
    }

    #[test]
    fn document_round_trip() {
        let cfg = GeneratorConfig { seed: 3, ..Default::default() };
        let inst = generate_instance(&cfg, &synthetic_coords(NetworkKind::R, 30, 3)).unwrap();
        let back = Instance::from_json(&inst.to_json().unwrap()).unwrap();
        assert_eq!(back.to_document(), inst.to_document());
        assert_eq!(back.mhc_travel, inst.mhc_travel);
    }
}
