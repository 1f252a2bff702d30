//! AOD move primitives, conflict detection, and parallel batch scheduling.
//!
//! A tweezer trajectory is modeled as a rectilinear polyline: a short lateral
//! jog off the source site (half the local column spacing), a vertical run to
//! the empty traffic lane between the zones, a horizontal run along the lane,
//! a vertical run to the destination row, and a jog onto the destination
//! site. The lateral offsets keep trajectories clear of parked atoms at the
//! default pitches; clearance is still checked explicitly so that custom
//! geometries and crowded scenes are caught.
//!
//! Batches of non-conflicting moves execute as Activate / Move / Deactivate
//! primitive triples whose durations add up to `aod_move_duration` of the
//! longest member. When every pending move is blocked (typically a cyclic
//! swap of destinations), one atom is diverted through a parking site:
//! Activate -> Park (hop to the parking row, release), then later
//! BigMove -> Park -> Deactivate completes the journey once the blocker has
//! moved. Move durations are computed from the straight-line site distance.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuit::PriorityTable;
use crate::error::{Error, Result};
use crate::hardware::{aod_flight_time, GeometrySpec, HardwareConfig, Site, Zone};
use crate::layout::{AtomId, MappingState};
use crate::optim::{greedy_mis, ConflictGraph};

/// One atom's requested relocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveVector {
    pub atom: AtomId,
    pub from: Site,
    pub to: Site,
    /// Straight-line distance in um.
    pub distance: f64,
}

impl MoveVector {
    pub fn new(atom: AtomId, from: Site, to: Site, g: &GeometrySpec) -> Self {
        assert_ne!(from, to, "move must change site");
        MoveVector { atom, from, to, distance: g.distance(from, to) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimKind {
    Activate,
    Move,
    Park,
    BigMove,
    Deactivate,
}

/// Per-atom displacement inside a primitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveStep {
    pub atom: AtomId,
    pub from: Site,
    pub to: Site,
}

/// A hardware movement primitive applied to a set of atoms at once.
///
/// Durations: Activate/Deactivate are trap transfers with zero displacement
/// (`t_xfer`); Move/BigMove carry the flight time of the longest member
/// (BigMove additionally includes the pickup out of the parking trap);
/// Park carries its hop flight plus the release transfer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovePrimitive {
    pub kind: PrimKind,
    pub steps: Vec<MoveStep>,
    pub duration: f64,
}

impl MovePrimitive {
    /// Trap pickups/drop-offs represented by this primitive.
    pub fn transfer_count(&self) -> usize {
        match self.kind {
            PrimKind::Move => 0,
            _ => self.steps.len(),
        }
    }
}

/// Rectilinear trajectory for one move, as physical waypoints.
pub fn move_path(from: Site, to: Site, g: &GeometrySpec) -> Vec<(f64, f64)> {
    let (x1, y1) = g.position(from);
    let (x2, y2) = g.position(to);
    let h1 = g.lane_offset(from.zone);
    let h2 = g.lane_offset(to.zone);
    let (o1, o2) = if x2 > x1 {
        (h1, -h2)
    } else if x2 < x1 {
        (-h1, h2)
    } else {
        (h1, h2)
    };
    let lane = g.gap_lane_y();
    let raw = [
        (x1, y1),
        (x1 + o1, y1),
        (x1 + o1, lane),
        (x2 + o2, lane),
        (x2 + o2, y2),
        (x2, y2),
    ];
    let mut path = Vec::with_capacity(raw.len());
    for p in raw {
        if path.last() != Some(&p) {
            path.push(p);
        }
    }
    path
}

fn seg_point_dist(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (ax, ay) = a;
    let (bx, by) = b;
    let (px, py) = p;
    let dx = bx - ax;
    let dy = by - ay;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return ((px - ax).powi(2) + (py - ay).powi(2)).sqrt();
    }
    let t = (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0);
    let cx = ax + t * dx;
    let cy = ay + t * dy;
    ((px - cx).powi(2) + (py - cy).powi(2)).sqrt()
}

/// Minimum distance from a polyline to a point.
pub fn path_point_distance(path: &[(f64, f64)], p: (f64, f64)) -> f64 {
    if path.len() == 1 {
        return seg_point_dist(path[0], path[0], p);
    }
    path.windows(2)
        .map(|w| seg_point_dist(w[0], w[1], p))
        .fold(f64::INFINITY, f64::min)
}

/// Atoms parked closer than `clearance` to the trajectory of `mv`.
/// Atoms in `exclude` and the moving atom itself are ignored.
pub fn stationary_conflicts(
    mv: &MoveVector,
    m: &MappingState,
    g: &GeometrySpec,
    clearance: f64,
    exclude: &BTreeSet<AtomId>,
) -> Vec<(AtomId, Site)> {
    let path = move_path(mv.from, mv.to, g);
    let mut out = Vec::new();
    for (atom, site) in m.atoms() {
        if atom == mv.atom || exclude.contains(&atom) {
            continue;
        }
        if path_point_distance(&path, g.position(site)) < clearance {
            out.push((atom, site));
        }
    }
    out
}

fn axis_order_violation(s1: f64, s2: f64, d1: f64, d2: f64) -> bool {
    let src = s1 - s2;
    let dst = d1 - d2;
    if src == 0.0 || dst == 0.0 {
        return (src == 0.0) != (dst == 0.0);
    }
    (src > 0.0) != (dst > 0.0)
}

/// Non-crossing constraint: two simultaneous moves must preserve their
/// relative order on both axes (a shared AOD cannot cross, merge, or split
/// its rows or columns).
pub fn crossing_conflict(a: &MoveVector, b: &MoveVector, g: &GeometrySpec) -> bool {
    let (sax, say) = g.position(a.from);
    let (dax, day) = g.position(a.to);
    let (sbx, sby) = g.position(b.from);
    let (dbx, dby) = g.position(b.to);
    axis_order_violation(sax, sbx, dax, dbx) || axis_order_violation(say, sby, day, dby)
}

/// Pairwise conflict graph over move vectors: site sharing, order
/// violations, and trajectory proximity to another move's endpoints.
pub fn build_conflict_graph(
    moves: &[MoveVector],
    g: &GeometrySpec,
    clearance: f64,
) -> ConflictGraph {
    let mut graph = ConflictGraph::new(moves.len());
    let paths: Vec<Vec<(f64, f64)>> =
        moves.iter().map(|mv| move_path(mv.from, mv.to, g)).collect();
    for i in 0..moves.len() {
        for j in i + 1..moves.len() {
            let (a, b) = (&moves[i], &moves[j]);
            let shared = a.to == b.to || a.from == b.to || a.to == b.from;
            let conflict = shared
                || crossing_conflict(a, b, g)
                || path_point_distance(&paths[i], g.position(b.from)) < clearance
                || path_point_distance(&paths[i], g.position(b.to)) < clearance
                || path_point_distance(&paths[j], g.position(a.from)) < clearance
                || path_point_distance(&paths[j], g.position(a.to)) < clearance;
            if conflict {
                graph.add_edge(i, j);
            }
        }
    }
    graph
}

/// Five-phase detour plan for one blocked move.
#[derive(Debug, Clone, PartialEq)]
pub struct StagedPlan {
    pub park_site: Site,
    /// Activate + Park: hop to the parking site and release.
    pub leg_a: Vec<MovePrimitive>,
    /// BigMove + Park + Deactivate: finish the journey later.
    pub leg_b: Vec<MovePrimitive>,
}

/// Plan a detour for `mv` through the nearest free storage parking site.
pub fn staged_fallback(
    mv: &MoveVector,
    m: &MappingState,
    hw: &HardwareConfig,
) -> Result<StagedPlan> {
    let g = &hw.geometry;
    let tp = &hw.timing;
    let (sx, sy) = g.position(mv.from);
    let mut candidates: Vec<Site> = g
        .storage_sites()
        .into_iter()
        .filter(|&s| s != mv.to && s != mv.from && m.is_free(s))
        .collect();
    candidates.sort_by(|&a, &b| {
        let (ax, ay) = g.position(a);
        let (bx, by) = g.position(b);
        let da = (ay - sy).abs();
        let db = (by - sy).abs();
        da.total_cmp(&db)
            .then((ax - sx).abs().total_cmp(&(bx - sx).abs()))
            .then(a.cmp(&b))
    });
    let exclude = BTreeSet::new();
    let park = candidates
        .into_iter()
        .find(|&p| {
            let hop = MoveVector::new(mv.atom, mv.from, p, g);
            stationary_conflicts(&hop, m, g, hw.tuning.clearance, &exclude).is_empty()
        })
        .ok_or_else(|| {
            Error::Routing(format!(
                "no free parking site for {} ({} -> {})",
                mv.atom, mv.from, mv.to
            ))
        })?;

    let hop1 = g.distance(mv.from, park);
    let hop2 = g.distance(park, mv.to);
    let leg_a = vec![
        MovePrimitive {
            kind: PrimKind::Activate,
            steps: vec![MoveStep { atom: mv.atom, from: mv.from, to: mv.from }],
            duration: tp.t_xfer,
        },
        MovePrimitive {
            kind: PrimKind::Park,
            steps: vec![MoveStep { atom: mv.atom, from: mv.from, to: park }],
            duration: aod_flight_time(hop1, tp) + tp.t_xfer,
        },
    ];
    let leg_b = vec![
        MovePrimitive {
            kind: PrimKind::BigMove,
            steps: vec![MoveStep { atom: mv.atom, from: park, to: mv.to }],
            duration: tp.t_xfer + aod_flight_time(hop2, tp),
        },
        MovePrimitive {
            kind: PrimKind::Park,
            steps: vec![MoveStep { atom: mv.atom, from: mv.to, to: mv.to }],
            duration: tp.t_xfer,
        },
        MovePrimitive {
            kind: PrimKind::Deactivate,
            steps: vec![MoveStep { atom: mv.atom, from: mv.to, to: mv.to }],
            duration: tp.t_xfer,
        },
    ];
    Ok(StagedPlan { park_site: park, leg_a, leg_b })
}

#[derive(Debug, Clone)]
struct Pending {
    mv: MoveVector,
    resumed: bool,
}

fn batch_primitives(members: &[&MoveVector], hw: &HardwareConfig) -> Vec<MovePrimitive> {
    let tp = &hw.timing;
    let pickups: Vec<MoveStep> = members
        .iter()
        .map(|mv| MoveStep { atom: mv.atom, from: mv.from, to: mv.from })
        .collect();
    let flights: Vec<MoveStep> = members
        .iter()
        .map(|mv| MoveStep { atom: mv.atom, from: mv.from, to: mv.to })
        .collect();
    let drops: Vec<MoveStep> = members
        .iter()
        .map(|mv| MoveStep { atom: mv.atom, from: mv.to, to: mv.to })
        .collect();
    let max_flight = members
        .iter()
        .map(|mv| aod_flight_time(mv.distance, tp))
        .fold(0.0, f64::max);
    vec![
        MovePrimitive { kind: PrimKind::Activate, steps: pickups, duration: tp.t_xfer },
        MovePrimitive { kind: PrimKind::Move, steps: flights, duration: max_flight },
        MovePrimitive { kind: PrimKind::Deactivate, steps: drops, duration: tp.t_xfer },
    ]
}

/// Schedule a set of moves into conflict-free parallel batches.
///
/// Repeatedly builds the conflict graph over the remaining moves, selects a
/// maximal independent set (weighted by qubit priority when provided),
/// filters it against current occupancy, emits one batch, and applies it to
/// the mapping. When nothing can run, the lowest-id blocked atom is diverted
/// through a parking site and its move resumes later.
pub fn schedule_moves(
    moves: Vec<MoveVector>,
    m: &mut MappingState,
    hw: &HardwareConfig,
    priorities: Option<&PriorityTable>,
) -> Result<Vec<MovePrimitive>> {
    let g = &hw.geometry;
    let clearance = hw.tuning.clearance;

    let mut seen = BTreeSet::new();
    for mv in &moves {
        if !seen.insert(mv.atom) {
            return Err(Error::Invalid(format!("atom {} moved twice in one pass", mv.atom)));
        }
        match m.site_of(mv.atom) {
            Some(site) if site == mv.from => {}
            Some(site) => {
                return Err(Error::Invalid(format!(
                    "move of {} starts at {} but atom is at {site}",
                    mv.atom, mv.from
                )))
            }
            None => return Err(Error::Invalid(format!("atom {} is not placed", mv.atom))),
        }
    }

    let mut pending: Vec<Pending> =
        moves.into_iter().map(|mv| Pending { mv, resumed: false }).collect();
    pending.sort_by_key(|p| p.mv.atom);
    let park_budget = 2 * pending.len() + 4;
    let mut parks = 0usize;
    let mut out = Vec::new();

    while !pending.is_empty() {
        // Finish a parked detour as soon as it is unblocked.
        let mut advanced = false;
        for i in 0..pending.len() {
            if !pending[i].resumed {
                continue;
            }
            let mv = pending[i].mv.clone();
            let exclude = BTreeSet::from([mv.atom]);
            if m.is_free(mv.to)
                && stationary_conflicts(&mv, m, g, clearance, &exclude).is_empty()
            {
                let plan = staged_resume(&mv, hw);
                out.extend(plan);
                m.relocate(mv.atom, mv.to)?;
                pending.remove(i);
                advanced = true;
                break;
            }
        }
        if advanced {
            continue;
        }

        let normal: Vec<MoveVector> = pending
            .iter()
            .filter(|p| !p.resumed)
            .map(|p| p.mv.clone())
            .collect();
        if !normal.is_empty() {
            let graph = build_conflict_graph(&normal, g, clearance);
            let weights: Option<Vec<f64>> = priorities.map(|pri| {
                normal
                    .iter()
                    .map(|mv| mv.atom.qubit().map(|q| pri.score(q)).unwrap_or(0.0))
                    .collect()
            });
            let mis = greedy_mis(&graph, weights.as_deref());
            let mut accepted: Vec<&MoveVector> = Vec::new();
            let mut airborne: BTreeSet<AtomId> = BTreeSet::new();
            for idx in mis {
                let mv = &normal[idx];
                if !m.is_free(mv.to) {
                    continue;
                }
                let mut exclude = airborne.clone();
                exclude.insert(mv.atom);
                if !stationary_conflicts(mv, m, g, clearance, &exclude).is_empty() {
                    continue;
                }
                airborne.insert(mv.atom);
                accepted.push(mv);
            }
            if !accepted.is_empty() {
                out.extend(batch_primitives(&accepted, hw));
                let done: BTreeSet<AtomId> = accepted.iter().map(|mv| mv.atom).collect();
                for mv in &accepted {
                    m.relocate(mv.atom, mv.to)?;
                }
                pending.retain(|p| !done.contains(&p.mv.atom));
                continue;
            }
        }

        // Deadlock: divert the lowest-id blocked atom through a parking site.
        let victim_idx = pending
            .iter()
            .position(|p| !p.resumed)
            .ok_or_else(|| Error::Routing("parked moves permanently blocked".into()))?;
        let victim = pending[victim_idx].mv.clone();
        if let Some(holder) = m.atom_at(victim.to) {
            let holder_moves = pending.iter().any(|p| p.mv.atom == holder);
            if !holder_moves {
                return Err(Error::Routing(format!(
                    "destination {} of {} is held by {} which never moves",
                    victim.to, victim.atom, holder
                )));
            }
        }
        parks += 1;
        if parks > park_budget {
            return Err(Error::Routing("parking budget exceeded".into()));
        }
        let plan = staged_fallback(&victim, m, hw)?;
        out.extend(plan.leg_a);
        m.relocate(victim.atom, plan.park_site)?;
        pending[victim_idx] = Pending {
            mv: MoveVector::new(victim.atom, plan.park_site, victim.to, g),
            resumed: true,
        };
    }
    Ok(out)
}

fn staged_resume(mv: &MoveVector, hw: &HardwareConfig) -> Vec<MovePrimitive> {
    let tp = &hw.timing;
    vec![
        MovePrimitive {
            kind: PrimKind::BigMove,
            steps: vec![MoveStep { atom: mv.atom, from: mv.from, to: mv.to }],
            duration: tp.t_xfer + aod_flight_time(mv.distance, tp),
        },
        MovePrimitive {
            kind: PrimKind::Park,
            steps: vec![MoveStep { atom: mv.atom, from: mv.to, to: mv.to }],
            duration: tp.t_xfer,
        },
        MovePrimitive {
            kind: PrimKind::Deactivate,
            steps: vec![MoveStep { atom: mv.atom, from: mv.to, to: mv.to }],
            duration: tp.t_xfer,
        },
    ]
}

/// Replay primitives against a mapping; used by tests and the validator.
pub fn apply_primitives(prims: &[MovePrimitive], m: &mut MappingState) -> Result<()> {
    for prim in prims {
        for step in &prim.steps {
            if step.from != step.to {
                m.relocate(step.atom, step.to)?;
            }
        }
    }
    Ok(())
}
