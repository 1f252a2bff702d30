//! Transport-channel lifecycle: the static column-pair configuration and the
//! per-stage dynamic planner that reshapes a backbone-and-branches chain
//! across consecutive entangling stages.
//!
//! A channel is a set of ancilla-occupied sites along which a single Rydberg
//! excitation hops. The backbone is a contiguous chain; branches are short
//! chains connecting individual gate endpoints to it.

mod dynamic_plan;
mod static_plan;

pub use dynamic_plan::{
    dt_enabled, find_branch, plan_dt_stage, select_anchor_column, two_leg_fallback,
    AnchorChoice, PlanContext, StagePlan,
};
pub use static_plan::{configure_static_channels, StaticTopology};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardware::{GeometrySpec, Site};
use crate::layout::AtomId;
use crate::optim::GridGraph;

/// Lattice node (admitted-column index, row) for an entanglement site.
pub(crate) fn site_to_node(site: Site, g: &GeometrySpec) -> Option<(u32, u32)> {
    g.lattice_col(site.col).map(|k| (k, site.row))
}

pub(crate) fn node_to_site(node: (u32, u32), g: &GeometrySpec) -> Site {
    Site::ent(g.col_at_lattice(node.0), node.1)
}

/// Planning lattice over the entanglement zone. Vertical steps cost twice a
/// horizontal step so that chains prefer running along rows.
pub(crate) fn build_grid<I: IntoIterator<Item = Site>>(g: &GeometrySpec, obstacles: I) -> GridGraph {
    let mut grid = GridGraph::open(g.usable_col_count(), g.ent_rows);
    grid.h_cost = 1.0;
    grid.v_cost = 2.0;
    for site in obstacles {
        if let Some(node) = site_to_node(site, g) {
            grid.obstacles.insert(node);
        }
    }
    grid
}

/// Same lattice with unit step costs, for distance thresholds in steps.
pub(crate) fn build_unit_grid<I: IntoIterator<Item = Site>>(
    g: &GeometrySpec,
    obstacles: I,
) -> GridGraph {
    let mut grid = build_grid(g, obstacles);
    grid.h_cost = 1.0;
    grid.v_cost = 1.0;
    grid
}

/// Role of a non-data (or not-yet-data) atom in the channel economy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaRole {
    /// Currently occupying an active chain site.
    Channel,
    /// Parked for cheap incorporation.
    Reserve,
    /// Data qubit relaying before its first logical gate.
    PreUse { release_stage: u32 },
}

/// Pool of flying ancillas and pre-use qubits with their storage homes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AncillaPool {
    roles: BTreeMap<AtomId, AncillaRole>,
    homes: BTreeMap<AtomId, Site>,
}

impl AncillaPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_flying(&mut self, atom: AtomId, home: Site) {
        self.roles.insert(atom, AncillaRole::Reserve);
        self.homes.insert(atom, home);
    }

    pub fn register_preuse(&mut self, qubit: AtomId, home: Site, release_stage: u32) {
        self.roles.insert(qubit, AncillaRole::PreUse { release_stage });
        self.homes.insert(qubit, home);
    }

    pub fn role(&self, atom: AtomId) -> Option<AncillaRole> {
        self.roles.get(&atom).copied()
    }

    pub fn set_role(&mut self, atom: AtomId, role: AncillaRole) {
        self.roles.insert(atom, role);
    }

    pub fn home(&self, atom: AtomId) -> Option<Site> {
        self.homes.get(&atom).copied()
    }

    /// Pre-use qubits due for withdrawal at this stage.
    pub fn release_due(&self, stage: u32) -> Vec<AtomId> {
        self.roles
            .iter()
            .filter_map(|(&atom, &role)| match role {
                AncillaRole::PreUse { release_stage } if release_stage <= stage => Some(atom),
                _ => None,
            })
            .collect()
    }

    pub fn withdraw(&mut self, atom: AtomId) {
        self.roles.remove(&atom);
    }

    /// Relay candidates usable at `stage`: every flying ancilla plus
    /// pre-use qubits not yet released.
    pub fn candidates(&self, stage: u32) -> Vec<AtomId> {
        self.roles
            .iter()
            .filter_map(|(&atom, &role)| match role {
                AncillaRole::PreUse { release_stage } if release_stage <= stage => None,
                _ => Some(atom),
            })
            .collect()
    }

    pub fn members(&self) -> impl Iterator<Item = (AtomId, AncillaRole)> + '_ {
        self.roles.iter().map(|(&a, &r)| (a, r))
    }
}

/// A transport channel: backbone chain, endpoint branches, bookkeeping of
/// which atoms staff it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DTChannel {
    /// Ordered chain; consecutive sites are lattice-adjacent.
    pub backbone: Vec<Site>,
    /// Endpoint qubit -> branch path (ending at the backbone attach site).
    pub branches: BTreeMap<u32, Vec<Site>>,
    pub anchor_col: u32,
    pub channel_ancilla: BTreeSet<AtomId>,
    pub reserve_ancilla: BTreeSet<AtomId>,
}

impl DTChannel {
    /// Backbone plus branch sites.
    pub fn chain_sites(&self) -> BTreeSet<Site> {
        let mut set: BTreeSet<Site> = self.backbone.iter().copied().collect();
        for branch in self.branches.values() {
            set.extend(branch.iter().copied());
        }
        set
    }

    pub fn check_invariants(&self, g: &GeometrySpec) -> Result<()> {
        for w in self.backbone.windows(2) {
            if !g.lattice_adjacent(w[0], w[1]) {
                return Err(Error::Invalid(format!(
                    "backbone break between {} and {}",
                    w[0], w[1]
                )));
            }
        }
        let chain: BTreeSet<Site> = self.backbone.iter().copied().collect();
        for (q, branch) in &self.branches {
            if branch.is_empty() {
                continue;
            }
            for w in branch.windows(2) {
                if !g.lattice_adjacent(w[0], w[1]) {
                    return Err(Error::Invalid(format!("branch of q{q} breaks at {}", w[1])));
                }
            }
            let attach = *branch.last().unwrap();
            let touches = chain.contains(&attach)
                || self.backbone.iter().any(|&b| g.lattice_adjacent(attach, b));
            if !touches {
                return Err(Error::Invalid(format!(
                    "branch of q{q} does not attach to the backbone"
                )));
            }
        }
        Ok(())
    }
}

/// Why a pair was classified (or demoted) the way it was.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairReason {
    /// Both endpoints already within reach of the chain.
    NearChain,
    /// Both endpoints connectable by short branches.
    CheapAlign,
    /// Alignment or execution costlier than direct shuttling.
    TooExpensive,
    /// No chain path or relay atoms available.
    Infeasible,
    /// Executed over an L-shaped direct chain.
    TwoLeg,
}

/// Partition of a stage's pair set into chain-executed and shuttled pairs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairClassification {
    pub dt_pairs: Vec<(u32, u32)>,
    pub aod_pairs: Vec<(u32, u32)>,
    pub reasons: BTreeMap<(u32, u32), PairReason>,
}

impl PairClassification {
    pub fn classify_dt(&mut self, pair: (u32, u32), reason: PairReason) {
        self.dt_pairs.push(pair);
        self.reasons.insert(pair, reason);
    }

    pub fn classify_aod(&mut self, pair: (u32, u32), reason: PairReason) {
        self.aod_pairs.push(pair);
        self.reasons.insert(pair, reason);
    }

    pub fn demote(&mut self, pair: (u32, u32), reason: PairReason) {
        self.dt_pairs.retain(|&p| p != pair);
        if !self.aod_pairs.contains(&pair) {
            self.aod_pairs.push(pair);
        }
        self.reasons.insert(pair, reason);
    }

    /// The two sets are disjoint and jointly cover `pairs`.
    pub fn is_partition_of(&self, pairs: &[(u32, u32)]) -> bool {
        let dt: BTreeSet<_> = self.dt_pairs.iter().collect();
        let aod: BTreeSet<_> = self.aod_pairs.iter().collect();
        if dt.intersection(&aod).next().is_some() {
            return false;
        }
        let all: BTreeSet<_> = pairs.iter().collect();
        let union: BTreeSet<_> = dt.union(&aod).copied().collect();
        all == union
    }
}

/// Symmetric pairing of admitted columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingMap {
    /// Involution over the evenly paired columns.
    pub pairs: BTreeMap<u32, u32>,
    /// Odd leftover column and the already-paired column it chains to.
    pub chained: Option<(u32, u32)>,
}

impl PairingMap {
    pub fn partner(&self, col: u32) -> Option<u32> {
        self.pairs.get(&col).copied()
    }
}

/// Pair adjacent admitted columns left to right. With an odd column count
/// the leftover chains onto the nearest already-paired column.
pub fn pairing_map(g: &GeometrySpec) -> Result<PairingMap> {
    let cols = g.usable_cols();
    if cols.len() < 2 {
        return Err(Error::Geometry(format!(
            "pairing needs at least 2 admitted columns, have {}",
            cols.len()
        )));
    }
    let mut pairs = BTreeMap::new();
    for chunk in cols.chunks(2) {
        if let [a, b] = *chunk {
            pairs.insert(a, b);
            pairs.insert(b, a);
        }
    }
    let chained = if cols.len() % 2 == 1 {
        let leftover = *cols.last().unwrap();
        let attach = cols[cols.len() - 2];
        Some((leftover, attach))
    } else {
        None
    };
    Ok(PairingMap { pairs, chained })
}
