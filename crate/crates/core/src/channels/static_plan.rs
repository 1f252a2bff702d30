//! One-shot channel configuration for the static flow.
//!
//! Every occupied column contributes a relay site on the row between its two
//! gate rows; the relay row forms one contiguous chain spanning all occupied
//! columns, grouped into per-column-pair channels with link sites filling
//! the gaps between groups. Each seated qubit is then adjacent to the chain
//! (or connected by a short branch when a chain site had to be skipped).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hardware::{GeometrySpec, Site, TuningParams};
use crate::layout::{best_free_storage_site, AtomId, MappingState};
use crate::optim::{grid_shortest_path, grid_shortest_path_to_set, GridGraph};

use super::{build_grid, node_to_site, pairing_map, site_to_node, DTChannel};

/// The static relay infrastructure and the ancilla logistics to build it.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticTopology {
    pub channels: Vec<DTChannel>,
    /// Chain sites between channel groups that keep the whole zone connected.
    pub link_sites: Vec<Site>,
    /// Every site that will hold a relay atom (channels, branches, links).
    pub relay_sites: BTreeSet<Site>,
    /// Relay atom id -> chain site it must occupy.
    pub ancilla_targets: BTreeMap<u32, Site>,
    /// Relay atom id -> storage site it starts from.
    pub ancilla_starts: BTreeMap<u32, Site>,
}

impl StaticTopology {
    pub fn required_ancillas(&self) -> u32 {
        self.ancilla_targets.len() as u32
    }

    /// Hop path for an entangling pair seated at `a` and `b`: the shortest
    /// chain walk restricted to relay sites. The hop count is the number of
    /// lattice edges walked.
    pub fn relay_path(&self, a: Site, b: Site, g: &GeometrySpec) -> Result<(Vec<Site>, u32)> {
        let allowed: BTreeSet<(u32, u32)> = self
            .relay_sites
            .iter()
            .filter_map(|&s| site_to_node(s, g))
            .collect();
        let src = site_to_node(a, g).ok_or(Error::Unreachable)?;
        let dst = site_to_node(b, g).ok_or(Error::Unreachable)?;
        let mut grid = GridGraph::open(g.usable_col_count(), g.ent_rows);
        for c in 0..grid.cols {
            for r in 0..grid.rows {
                let node = (c, r);
                if !allowed.contains(&node) && node != src && node != dst {
                    grid.obstacles.insert(node);
                }
            }
        }
        let (path, _) = grid_shortest_path(&grid, src, dst)?;
        let hops = (path.len() - 1) as u32;
        Ok((path.into_iter().map(|n| node_to_site(n, g)).collect(), hops))
    }
}

/// Plan the static relay chain for qubits seated at `targets`.
///
/// `mapping` holds the pre-migration storage occupancy; chain sites exclude
/// every qubit target, and storage start sites for the relay atoms are
/// chosen by the placement cost model over the remaining free sites.
pub fn configure_static_channels(
    targets: &BTreeMap<u32, Site>,
    g: &GeometrySpec,
    mapping: &MappingState,
    tuning: &TuningParams,
) -> Result<StaticTopology> {
    let occupied: BTreeSet<Site> = targets.values().copied().collect();
    let mut cols: Vec<u32> = occupied
        .iter()
        .filter_map(|s| g.lattice_col(s.col))
        .collect();
    cols.sort_unstable();
    cols.dedup();

    if cols.is_empty() {
        return Ok(StaticTopology {
            channels: Vec::new(),
            link_sites: Vec::new(),
            relay_sites: BTreeSet::new(),
            ancilla_targets: BTreeMap::new(),
            ancilla_starts: BTreeMap::new(),
        });
    }

    let relay_row = (g.ent_first_row + 1).min(g.ent_rows - 1);
    let k_min = cols[0];
    let k_max = *cols.last().unwrap();

    // Contiguous chain along the relay row, detouring around any site a
    // qubit will occupy.
    let grid = build_grid(g, occupied.iter().copied());
    let chain_nodes: Vec<(u32, u32)> = if k_min == k_max {
        let node = (k_min, relay_row);
        if grid.obstacles.contains(&node) {
            return Err(Error::Geometry(format!(
                "relay site {} is taken by a qubit",
                node_to_site(node, g)
            )));
        }
        vec![node]
    } else {
        let src = (k_min, relay_row);
        let dst = (k_max, relay_row);
        if grid.obstacles.contains(&src) || grid.obstacles.contains(&dst) {
            return Err(Error::Geometry("chain endpoint taken by a qubit".into()));
        }
        let (path, _) = grid_shortest_path(&grid, src, dst)
            .map_err(|_| Error::Geometry("no connected relay chain around seated qubits".into()))?;
        path
    };
    let chain_sites: Vec<Site> = chain_nodes.iter().map(|&n| node_to_site(n, g)).collect();
    let mut relay_sites: BTreeSet<Site> = chain_sites.iter().copied().collect();

    // Branch out to any qubit that ended up non-adjacent to the chain.
    let mut branches: BTreeMap<u32, Vec<Site>> = BTreeMap::new();
    for (&q, &site) in targets {
        let adjacent = relay_sites.iter().any(|&s| g.lattice_adjacent(site, s));
        if adjacent {
            continue;
        }
        let src = site_to_node(site, g).ok_or(Error::Unreachable)?;
        let mut branch_grid = build_grid(g, occupied.iter().copied().filter(|&s| s != site));
        branch_grid.obstacles.remove(&src);
        let chain_set: BTreeSet<(u32, u32)> = relay_sites
            .iter()
            .filter_map(|&s| site_to_node(s, g))
            .collect();
        let (path, _) = grid_shortest_path_to_set(&branch_grid, src, &chain_set)
            .map_err(|_| Error::Geometry(format!("qubit {q} cannot reach the relay chain")))?;
        let branch: Vec<Site> = path[1..].iter().map(|&n| node_to_site(n, g)).collect();
        relay_sites.extend(branch.iter().copied());
        branches.insert(q, branch);
    }

    // Group the chain into per-column-pair channels; leftover chain nodes
    // become link sites.
    let mut channels = Vec::new();
    let mut claimed = vec![false; chain_sites.len()];
    if cols.len() >= 2 {
        let pm = pairing_map(g)?;
        let mut grouped: BTreeSet<u32> = BTreeSet::new();
        for &col in g.usable_cols().iter() {
            let Some(partner) = pm.partner(col) else { continue };
            if grouped.contains(&col) || col > partner {
                continue;
            }
            let ka = g.lattice_col(col).unwrap();
            let kb = g.lattice_col(partner).unwrap();
            let (lo, hi) = (ka.min(kb), ka.max(kb));
            if !cols.iter().any(|&k| k >= lo && k <= hi) {
                continue;
            }
            grouped.insert(col);
            grouped.insert(partner);
            let first = chain_nodes.iter().position(|&(k, _)| k >= lo && k <= hi);
            let last = chain_nodes.iter().rposition(|&(k, _)| k >= lo && k <= hi);
            let (Some(first), Some(last)) = (first, last) else { continue };
            for flag in claimed.iter_mut().take(last + 1).skip(first) {
                *flag = true;
            }
            let backbone: Vec<Site> = chain_sites[first..=last].to_vec();
            let member_qubits: Vec<u32> = targets
                .iter()
                .filter(|(_, &s)| {
                    g.lattice_col(s.col).map(|k| k >= lo && k <= hi).unwrap_or(false)
                })
                .map(|(&q, _)| q)
                .collect();
            let channel_branches: BTreeMap<u32, Vec<Site>> = member_qubits
                .iter()
                .filter_map(|q| branches.get(q).map(|b| (*q, b.clone())))
                .collect();
            channels.push(DTChannel {
                backbone,
                branches: channel_branches,
                anchor_col: col,
                channel_ancilla: BTreeSet::new(),
                reserve_ancilla: BTreeSet::new(),
            });
        }
    } else {
        claimed[0] = true;
        channels.push(DTChannel {
            backbone: chain_sites.clone(),
            branches: branches.clone(),
            anchor_col: g.col_at_lattice(cols[0]),
            channel_ancilla: BTreeSet::new(),
            reserve_ancilla: BTreeSet::new(),
        });
    }
    let link_sites: Vec<Site> = chain_sites
        .iter()
        .zip(&claimed)
        .filter(|(_, &c)| !c)
        .map(|(&s, _)| s)
        .collect();

    // Connectivity: every seated qubit reaches every other through the chain.
    verify_connectivity(targets, &relay_sites, g)?;

    // Storage starting sites for the relay atoms, cheapest first in chain
    // order over the sites left free by the qubits.
    let mut free: BTreeSet<Site> = g
        .storage_sites()
        .into_iter()
        .filter(|&s| mapping.is_free(s))
        .collect();
    let mut ancilla_targets = BTreeMap::new();
    let mut ancilla_starts = BTreeMap::new();
    let ordered_sites: Vec<Site> = chain_sites
        .iter()
        .copied()
        .chain(branches.values().flatten().copied())
        .collect();
    let mut seen = BTreeSet::new();
    let mut next_id = 0u32;
    for site in ordered_sites {
        if !seen.insert(site) {
            continue;
        }
        let start = best_free_storage_site(site, &free, g, tuning).ok_or_else(|| {
            Error::Geometry(format!(
                "not enough free storage sites to stock the relay chain (need {})",
                relay_sites.len()
            ))
        })?;
        free.remove(&start);
        ancilla_targets.insert(next_id, site);
        ancilla_starts.insert(next_id, start);
        next_id += 1;
    }

    // Fill in staffing sets now that ids exist.
    let site_to_id: BTreeMap<Site, u32> =
        ancilla_targets.iter().map(|(&id, &s)| (s, id)).collect();
    for channel in &mut channels {
        for site in channel
            .backbone
            .iter()
            .chain(channel.branches.values().flatten())
        {
            if let Some(&id) = site_to_id.get(site) {
                channel.channel_ancilla.insert(AtomId::Ancilla(id));
            }
        }
    }

    Ok(StaticTopology {
        channels,
        link_sites,
        relay_sites,
        ancilla_targets,
        ancilla_starts,
    })
}

fn verify_connectivity(
    targets: &BTreeMap<u32, Site>,
    relay_sites: &BTreeSet<Site>,
    g: &GeometrySpec,
) -> Result<()> {
    if targets.len() < 2 {
        return Ok(());
    }
    let nodes: Vec<Site> = relay_sites
        .iter()
        .copied()
        .chain(targets.values().copied())
        .collect();
    let index: BTreeMap<Site, usize> = nodes.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut adj = vec![Vec::new(); nodes.len()];
    for (i, &a) in nodes.iter().enumerate() {
        for (j, &b) in nodes.iter().enumerate().skip(i + 1) {
            if g.lattice_adjacent(a, b) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let start = index[targets.values().next().unwrap()];
    let mut seen = vec![false; nodes.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    for (&q, site) in targets {
        if !seen[index[site]] {
            return Err(Error::Geometry(format!(
                "qubit {q} at {site} is disconnected from the relay chain"
            )));
        }
    }
    Ok(())
}
