//! Legal-path planning on the tile grid.
//!
//! The planner searches the 4-connected grid with deterministic tie-breaking
//! (lexicographic (y, x) neighbour order, cost ties broken by insertion
//! order). Red signals are modelled as wait moves folded into the entry edge
//! of a governed crosswalk: entering on red costs one step plus two wait
//! steps per tick remaining until green. Waiting never helps anywhere else,
//! so plain coordinates are a sufficient state space.
//!
//! A set of [`TraversalRule`]s may be relaxed; the planner then permits moves
//! whose breaches fall inside the set and reports which rules the returned
//! path actually uses. This powers both the legitimacy check (is there a
//! minimal rule whose suspension unblocks escape?) and violating-route
//! construction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::geom::Coord;
use crate::world::{
    signal_state, Hazard, SignalState, StreetDirection, Tick, TileKind, TileMap, TraversalRule,
};
use crate::{Error, Result};

/// Two 5-second movement steps per 10-second tick.
pub const STEPS_PER_TICK: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanOutcome {
    /// Tile sequence including the start tile.
    pub tiles: Vec<Coord>,
    /// Total cost in 5-second steps, waits included.
    pub cost: u32,
    /// Traversal rules the path actually breaks.
    pub used_rules: BTreeSet<TraversalRule>,
    /// Wait stretches: (tile waited on, ticks waited) keyed by the index in
    /// `tiles` of the tile the agent waits on before moving.
    pub waits: Vec<(usize, u32)>,
}

impl PlanOutcome {
    pub fn is_empty(&self) -> bool {
        self.tiles.len() <= 1
    }
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    cost: u32,
    wait_ticks: u32,
    breach: Option<TraversalRule>,
    second_breach: Option<TraversalRule>,
}

/// Planner-side edge admission. Intentionally written separately from
/// `rulecheck::breaches`; the two are cross-checked by tests.
fn edge(
    map: &TileMap,
    hazards: &[Hazard],
    relaxed: &BTreeSet<TraversalRule>,
    from: Coord,
    to: Coord,
    tick: Tick,
) -> Option<Edge> {
    let to_kind = map.kind(to)?;
    if to_kind == TileKind::Blocked {
        return None;
    }
    if hazards.iter().any(|h| h.blocks(to, tick)) {
        return None;
    }
    let from_road = matches!(map.kind(from), Some(k) if k.is_road_family());
    let mut breach = None;
    let mut second = None;
    let mut wait_ticks = 0;

    match to_kind {
        TileKind::Building => {
            let public = map.building_at(to).map(|b| b.public).unwrap_or(false);
            if !public {
                if !relaxed.contains(&TraversalRule::PrivateBuilding) {
                    return None;
                }
                breach = Some(TraversalRule::PrivateBuilding);
            }
        }
        TileKind::Road => {
            if !from_road {
                if !relaxed.contains(&TraversalRule::Crosswalk) {
                    return None;
                }
                breach = Some(TraversalRule::Crosswalk);
            }
        }
        TileKind::Crosswalk => {
            if !from_road {
                if let Some(cw) = map.crosswalk_of(to) {
                    if let Some(sig_id) = &cw.signal {
                        if let Some(intersection) = map.intersection(sig_id) {
                            if signal_state(intersection, tick) == SignalState::Red {
                                if relaxed.contains(&TraversalRule::RedLight) {
                                    breach = Some(TraversalRule::RedLight);
                                } else {
                                    // Wait at the curb until the cycle turns.
                                    let cycle = intersection.signal_cycle;
                                    let phase =
                                        (tick + cycle.phase_offset) % cycle.period();
                                    wait_ticks = cycle.red_ticks - phase;
                                }
                            }
                        }
                    }
                }
            }
        }
        _ => {}
    }

    if to_kind.is_road_family() && from_road {
        if let Some(street) = map.street_of(to) {
            if let StreetDirection::OneWay(heading) = street.direction {
                let (ox, oy) = heading.opposite().delta();
                if (to.x - from.x, to.y - from.y) == (ox, oy) {
                    if !relaxed.contains(&TraversalRule::OneWay) {
                        return None;
                    }
                    if breach.is_some() {
                        second = Some(TraversalRule::OneWay);
                    } else {
                        breach = Some(TraversalRule::OneWay);
                    }
                }
            }
        }
    }

    Some(Edge {
        cost: 1 + wait_ticks * STEPS_PER_TICK,
        wait_ticks,
        breach,
        second_breach: second,
    })
}

#[derive(Debug, Clone)]
pub enum Goal {
    At(Coord),
    AnyOf(BTreeSet<Coord>),
}

impl Goal {
    fn reached(&self, c: Coord) -> bool {
        match self {
            Goal::At(t) => *t == c,
            Goal::AnyOf(s) => s.contains(&c),
        }
    }

    fn heuristic(&self, c: Coord) -> u32 {
        match self {
            Goal::At(t) => c.manhattan(*t),
            // Multi-target searches fall back to Dijkstra; the grid is small.
            Goal::AnyOf(_) => 0,
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
struct QueueEntry {
    f: u32,
    seq: u64,
    g: u32,
    coord: Coord,
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // Min-heap via reversed comparison; insertion order breaks cost ties.
        other
            .f
            .cmp(&self.f)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A*-optimal path from `from` to `goal` using only moves whose breaches lie
/// within `relaxed`. Returns `None` when no such path exists.
pub fn plan(
    map: &TileMap,
    hazards: &[Hazard],
    from: Coord,
    goal: &Goal,
    start_tick: Tick,
    relaxed: &BTreeSet<TraversalRule>,
) -> Option<PlanOutcome> {
    if !map.in_bounds(from) {
        return None;
    }
    let mut heap = alloc::collections::BinaryHeap::new();
    let mut best: BTreeMap<Coord, u32> = BTreeMap::new();
    let mut parent: BTreeMap<Coord, (Coord, Option<TraversalRule>, Option<TraversalRule>, u32)> =
        BTreeMap::new();
    let mut seq: u64 = 0;

    best.insert(from, 0);
    heap.push(QueueEntry { f: goal.heuristic(from), seq, g: 0, coord: from });

    let mut goal_hit: Option<Coord> = None;
    while let Some(QueueEntry { coord, g, .. }) = heap.pop() {
        if best.get(&coord).map_or(true, |&b| g > b) {
            continue; // stale entry
        }
        if goal.reached(coord) {
            goal_hit = Some(coord);
            break;
        }
        let tick = start_tick + g / STEPS_PER_TICK;
        for next in coord.neighbors4() {
            if !map.in_bounds(next) {
                continue;
            }
            let Some(e) = edge(map, hazards, relaxed, coord, next, tick) else {
                continue;
            };
            let ng = g + e.cost;
            if best.get(&next).map_or(true, |&old| ng < old) {
                best.insert(next, ng);
                parent.insert(next, (coord, e.breach, e.second_breach, e.wait_ticks));
                seq += 1;
                heap.push(QueueEntry {
                    f: ng + goal.heuristic(next),
                    seq,
                    g: ng,
                    coord: next,
                });
            }
        }
    }

    let end = goal_hit?;
    let mut tiles = alloc::vec![end];
    let mut used_rules = BTreeSet::new();
    let mut waits = Vec::new();
    let mut cur = end;
    while cur != from {
        let (prev, breach, second, wait_ticks) = parent[&cur];
        if let Some(b) = breach {
            used_rules.insert(b);
        }
        if let Some(b) = second {
            used_rules.insert(b);
        }
        if wait_ticks > 0 {
            waits.push((0usize, wait_ticks)); // index fixed up below
        }
        tiles.push(prev);
        cur = prev;
    }
    tiles.reverse();
    // Re-derive wait indices in forward order.
    let mut fixed_waits = Vec::new();
    if !waits.is_empty() {
        let mut g = 0u32;
        for (i, pair) in tiles.windows(2).enumerate() {
            let tick = start_tick + g / STEPS_PER_TICK;
            if let Some(e) = edge(map, hazards, relaxed, pair[0], pair[1], tick) {
                if e.wait_ticks > 0 {
                    fixed_waits.push((i, e.wait_ticks));
                }
                g += e.cost;
            }
        }
    }
    Some(PlanOutcome {
        tiles,
        cost: best[&end],
        used_rules,
        waits: fixed_waits,
    })
}

/// Shortest fully legal path between two walkable coordinates, waits at red
/// signals counted in the cost. `None` when the endpoints are legally
/// disconnected.
pub fn legal_shortest_path(
    map: &TileMap,
    hazards: &[Hazard],
    from: Coord,
    to: Coord,
    signals_at: Tick,
) -> Result<Option<PlanOutcome>> {
    for c in [from, to] {
        if !map.in_bounds(c) {
            return Err(Error::OutOfBounds { x: c.x, y: c.y });
        }
        if !map.walkable(c, hazards, signals_at) {
            return Err(Error::InvalidInput(alloc::format!(
                "endpoint ({}, {}) is not walkable",
                c.x, c.y
            )));
        }
    }
    Ok(plan(map, hazards, from, &Goal::At(to), signals_at, &BTreeSet::new()))
}

/// One candidate escape: the minimal relaxation set (by cost, then set size,
/// then rule order) whose suspension yields a path to a safe zone, plus the
/// cost of the fully legal alternative when one exists.
#[derive(Debug, Clone)]
pub struct EscapeChoice {
    pub rules: BTreeSet<TraversalRule>,
    pub plan: PlanOutcome,
    pub legal_cost: Option<u32>,
}

const ESCAPE_CANDIDATE_RULES: [TraversalRule; 3] = [
    TraversalRule::RedLight,
    TraversalRule::OneWay,
    TraversalRule::Crosswalk,
];

/// Searches every subset of the traffic traversal rules for the cheapest
/// route to a safe zone. Conduct rules (private buildings, cordons) are never
/// candidates here; proposing those is exactly what the pipeline must not do.
pub fn select_escape(
    map: &TileMap,
    hazards: &[Hazard],
    from: Coord,
    targets: &BTreeSet<Coord>,
    start_tick: Tick,
) -> Option<EscapeChoice> {
    if targets.is_empty() {
        return None;
    }
    let goal = Goal::AnyOf(targets.clone());
    let legal = plan(map, hazards, from, &goal, start_tick, &BTreeSet::new());
    let legal_cost = legal.as_ref().map(|p| p.cost);

    let mut best: Option<(u32, usize, Vec<TraversalRule>, PlanOutcome)> = None;
    for mask in 1u8..8 {
        let mut relaxed = BTreeSet::new();
        for (bit, rule) in ESCAPE_CANDIDATE_RULES.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                relaxed.insert(*rule);
            }
        }
        let Some(p) = plan(map, hazards, from, &goal, start_tick, &relaxed) else {
            continue;
        };
        if p.used_rules.is_empty() {
            continue; // the legal route; not a violation candidate
        }
        let key_rules: Vec<TraversalRule> = p.used_rules.iter().copied().collect();
        let key = (p.cost, p.used_rules.len(), key_rules.clone());
        let better = match &best {
            None => true,
            Some((c, n, r, _)) => key < (*c, *n, r.clone()),
        };
        if better {
            best = Some((p.cost, p.used_rules.len(), key_rules, p));
        }
    }
    best.map(|(_, _, _, p)| EscapeChoice {
        rules: p.used_rules.clone(),
        plan: p,
        legal_cost,
    })
}

/// Route to a safe zone with every rule suspended, traffic and conduct alike.
/// This is what verdict emulation falls back to when the legitimacy gate is
/// ablated: scoping discipline goes with the gate.
pub fn unscoped_escape(
    map: &TileMap,
    hazards: &[Hazard],
    from: Coord,
    targets: &BTreeSet<Coord>,
    start_tick: Tick,
) -> Option<PlanOutcome> {
    let relaxed: BTreeSet<TraversalRule> = [
        TraversalRule::RedLight,
        TraversalRule::OneWay,
        TraversalRule::Crosswalk,
        TraversalRule::Cordon,
        TraversalRule::PrivateBuilding,
    ]
    .into_iter()
    .collect();
    plan(map, hazards, from, &Goal::AnyOf(targets.clone()), start_tick, &relaxed)
}
