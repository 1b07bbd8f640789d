//! Node-removal attacks.
//!
//! After growth, `N_a = round(eta * N0)` nodes are removed one at a time
//! (half-up rounding). Each removal draws a victim with probability
//! proportional to a kind-specific weight over the current survivors:
//!
//! * central: weight `k_i`, hubs die first
//! * peripheral: weight `1 / (k_i + 1)`, leaves die first
//! * general: weight 1, uniform
//!
//! Weights are recomputed after every removal, so an attack reacts to the
//! damage it has already done. [`RemovalSchedule::Batch`] instead freezes
//! the weights of the intact network and draws all victims up front.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::sample::{sample_targets, FenwickSampler};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AttackKind {
    Central,
    Peripheral,
    General,
    #[default]
    None,
}

impl AttackKind {
    pub const ALL: [AttackKind; 4] = [
        AttackKind::Central,
        AttackKind::Peripheral,
        AttackKind::General,
        AttackKind::None,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AttackKind::Central => "central",
            AttackKind::Peripheral => "peripheral",
            AttackKind::General => "general",
            AttackKind::None => "none",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "central" => Ok(AttackKind::Central),
            "peripheral" => Ok(AttackKind::Peripheral),
            "general" => Ok(AttackKind::General),
            "none" => Ok(AttackKind::None),
            other => Err(Error::Parameter(format!(
                "unknown attack kind {other:?} (expected central, peripheral, general or none)"
            ))),
        }
    }
}

/// An attack kind plus the fraction `eta` of the grown network to remove.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackSpec {
    kind: AttackKind,
    eta: f64,
}

impl AttackSpec {
    pub fn new(kind: AttackKind, eta: f64) -> Result<Self> {
        if !eta.is_finite() || !(0.0..1.0).contains(&eta) {
            return Err(Error::Parameter(format!("eta = {eta} outside [0, 1)")));
        }
        Ok(AttackSpec { kind, eta })
    }

    pub fn none() -> Self {
        AttackSpec {
            kind: AttackKind::None,
            eta: 0.0,
        }
    }

    pub fn kind(&self) -> AttackKind {
        self.kind
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Number of nodes removed from a network of `n0` nodes: `eta * n0`
    /// rounded half up. Kind `none` removes nothing.
    pub fn removal_count(&self, n0: usize) -> usize {
        if self.kind == AttackKind::None {
            return 0;
        }
        (self.eta * n0 as f64).round() as usize
    }
}

/// When victim weights are refreshed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RemovalSchedule {
    /// Recompute after every removal.
    #[default]
    Sequential,
    /// Compute once on the intact network, draw all victims, then remove.
    Batch,
}

/// Removal weights of the live nodes under `kind`, ascending id order.
///
/// A central attack on a graph whose live degrees are all zero has no mass
/// to work with and falls back to uniform weights.
pub fn removal_weights(g: &Graph, kind: AttackKind) -> Result<Vec<(NodeId, f64)>> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let weights: Vec<(NodeId, f64)> = match kind {
        AttackKind::Central => g
            .nodes()
            .map(|v| (v, g.degree(v).unwrap() as f64))
            .collect(),
        AttackKind::Peripheral => g
            .nodes()
            .map(|v| (v, 1.0 / (g.degree(v).unwrap() as f64 + 1.0)))
            .collect(),
        AttackKind::General => g.nodes().map(|v| (v, 1.0)).collect(),
        AttackKind::None => {
            return Err(Error::Parameter(
                "attack kind none has no removal weights".into(),
            ))
        }
    };
    if weights.iter().all(|&(_, w)| w == 0.0) {
        return Ok(g.nodes().map(|v| (v, 1.0)).collect());
    }
    Ok(weights)
}

/// Runs the attack with sequential weight recomputation.
pub fn apply_attack<R: Rng>(g: Graph, spec: &AttackSpec, rng: &mut R) -> Result<Graph> {
    apply_attack_with(g, spec, RemovalSchedule::Sequential, rng)
}

/// Runs the attack under the given schedule and returns the damaged graph.
///
/// Errors if the removal count would leave no survivors.
pub fn apply_attack_with<R: Rng>(
    mut g: Graph,
    spec: &AttackSpec,
    schedule: RemovalSchedule,
    rng: &mut R,
) -> Result<Graph> {
    let n0 = g.node_count();
    if n0 == 0 {
        return Err(Error::EmptyGraph);
    }
    let n_a = spec.removal_count(n0);
    if n_a == 0 {
        return Ok(g);
    }
    if n_a >= n0 {
        return Err(Error::Parameter(format!(
            "attack would remove {n_a} of {n0} nodes, leaving nothing to measure"
        )));
    }

    match schedule {
        RemovalSchedule::Batch => {
            let weights = removal_weights(&g, spec.kind)?;
            let victims = sample_targets(&weights, n_a, rng)?;
            for v in victims {
                g.remove_node(v).map_err(Error::Graph)?;
            }
        }
        RemovalSchedule::Sequential => {
            let weights = removal_weights(&g, spec.kind)?;
            let mut tree = FenwickSampler::new(g.id_bound());
            for (v, w) in weights {
                tree.set(v.index(), w);
            }
            for _ in 0..n_a {
                let idx = match tree.sample(rng) {
                    Some(i) => i,
                    None => {
                        // a central attack can grind the survivors down to
                        // isolated nodes; keep removing uniformly
                        for v in g.nodes() {
                            tree.set(v.index(), 1.0);
                        }
                        tree.sample(rng).expect("survivors remain")
                    }
                };
                let v = NodeId::from_index(idx);
                let neighbors: Vec<NodeId> = g.neighbors(v).map_err(Error::Graph)?.to_vec();
                g.remove_node(v).map_err(Error::Graph)?;
                tree.set(idx, 0.0);
                match spec.kind {
                    AttackKind::Central => {
                        for u in neighbors {
                            tree.set(u.index(), g.degree(u).unwrap() as f64);
                        }
                    }
                    AttackKind::Peripheral => {
                        for u in neighbors {
                            tree.set(u.index(), 1.0 / (g.degree(u).unwrap() as f64 + 1.0));
                        }
                    }
                    AttackKind::General | AttackKind::None => {}
                }
            }
        }
    }
    Ok(g)
}
