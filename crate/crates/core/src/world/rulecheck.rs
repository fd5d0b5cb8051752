//! Standalone move-legality checker. Replays single moves against world
//! state and reports every traversal rule the move breaks. This is kept
//! independent of the planner's edge generation on purpose: path legality and
//! the bounded-violation contract are both verified by running committed
//! moves back through this checker.

use alloc::vec::Vec;

use crate::geom::Coord;
use crate::world::{Hazard, SignalState, StreetDirection, Tick, TileKind, TileMap, TraversalRule};

/// Whether a move from `from` to `to` is physically possible at all
/// (adjacent, in bounds, not into flames or solid obstacles). Private
/// buildings are passable in the physical sense; entering one is a rule
/// breach, not a wall.
pub fn passable(map: &TileMap, hazards: &[Hazard], from: Coord, to: Coord, t: Tick) -> bool {
    if from.manhattan(to) != 1 {
        return false;
    }
    match map.kind(to) {
        None | Some(TileKind::Blocked) => return false,
        _ => {}
    }
    !hazards.iter().any(|h| h.blocks(to, t))
}

/// All traversal rules broken by stepping from `from` onto `to` at tick `t`.
/// An empty result on a passable move means the step is fully legal.
///
/// The conventions are:
/// - stepping onto a plain road tile from off the roadway is jaywalking
///   (`Crosswalk` breach), in any direction;
/// - stepping onto a governed crosswalk tile from off the roadway while its
///   signal is red breaks `RedLight`; on green, or at an unsignalized
///   crossing, it is legal;
/// - moves within the roadway against a one-way street's heading break
///   `OneWay`; perpendicular and with-heading moves do not;
/// - finishing a crossing or stepping off the roadway is always free;
/// - entering a non-public building breaks `PrivateBuilding`.
pub fn breaches(map: &TileMap, from: Coord, to: Coord, t: Tick) -> Vec<TraversalRule> {
    let mut out = Vec::new();
    let from_kind = map.kind(from);
    let to_kind = map.kind(to);
    let from_on_road = matches!(from_kind, Some(k) if k.is_road_family());

    match to_kind {
        Some(TileKind::Road) => {
            if !from_on_road {
                out.push(TraversalRule::Crosswalk);
            }
        }
        Some(TileKind::Crosswalk) => {
            if !from_on_road {
                if map.crosswalk_signal(to, t) == Some(SignalState::Red) {
                    out.push(TraversalRule::RedLight);
                }
            }
        }
        Some(TileKind::Building) => {
            if let Some(b) = map.building_at(to) {
                if !b.public {
                    out.push(TraversalRule::PrivateBuilding);
                }
            }
        }
        _ => {}
    }

    if matches!(to_kind, Some(k) if k.is_road_family()) && from_on_road {
        if let Some(street) = map.street_of(to) {
            if let StreetDirection::OneWay(heading) = street.direction {
                let (dx, dy) = (to.x - from.x, to.y - from.y);
                let (ox, oy) = heading.opposite().delta();
                if (dx, dy) == (ox, oy) {
                    out.push(TraversalRule::OneWay);
                }
            }
        }
    }

    out
}

/// Breaches of a whole tile path (consecutive coordinates), with the tick
/// advancing one tick per two steps, matching execution pacing of two
/// 5-second steps per tick.
pub fn path_breaches(
    map: &TileMap,
    tiles: &[Coord],
    start_tick: Tick,
) -> Vec<(usize, TraversalRule)> {
    let mut out = Vec::new();
    for (i, pair) in tiles.windows(2).enumerate() {
        let t = start_tick + (i as u32) / 2;
        for b in breaches(map, pair[0], pair[1], t) {
            out.push((i, b));
        }
    }
    out
}
