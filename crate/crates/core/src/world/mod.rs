//! World state: the tile grid, streets, signals, hazards, and raw
//! observation. The world is the only source of physical facts; everything an
//! agent later reasons about starts as a [`RawObservation`] produced here.

pub mod mapfile;
pub mod path;
pub mod rulecheck;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::{Coord, Heading};
use crate::{Error, Result};

/// Perceptual radius for situational cues, in tiles.
pub const CUE_RADIUS: u32 = 12;
/// Perceptual radius for authority figures, in tiles.
pub const AUTHORITY_RADIUS: u32 = 20;

pub type Tick = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TileKind {
    Road,
    Sidewalk,
    Crosswalk,
    Building,
    Park,
    Blocked,
}

impl TileKind {
    /// Road-family tiles form the roadway; crosswalks are road tiles with a
    /// marked crossing.
    pub fn is_road_family(self) -> bool {
        matches!(self, TileKind::Road | TileKind::Crosswalk)
    }
}

/// Traversal rules the grid itself can bind on a move. Config rules declare
/// which of these (if any) they correspond to.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum TraversalRule {
    RedLight,
    OneWay,
    Crosswalk,
    Cordon,
    PrivateBuilding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreetDirection {
    OneWay(Heading),
    Bidirectional,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Street {
    pub name: String,
    pub tiles: BTreeSet<Coord>,
    pub direction: StreetDirection,
    pub scoped_rules: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalCycle {
    pub red_ticks: u32,
    pub green_ticks: u32,
    pub phase_offset: u32,
}

impl SignalCycle {
    pub fn period(&self) -> u32 {
        self.red_ticks + self.green_ticks
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalState {
    Red,
    Green,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Intersection {
    pub id: String,
    pub position: Coord,
    pub signal_cycle: SignalCycle,
    pub effective_zone_radius: u32,
}

/// A marked crossing. `signal` names the governing intersection; `None`
/// means the crossing is unsignalized and may be used at any time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Crosswalk {
    pub tiles: Vec<Coord>,
    pub signal: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Building {
    pub name: String,
    pub public: bool,
    pub min: Coord,
    pub max: Coord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub min: Coord,
    pub max: Coord,
}

impl Region {
    pub fn contains(&self, c: Coord) -> bool {
        c.x >= self.min.x && c.x <= self.max.x && c.y >= self.min.y && c.y <= self.max.y
    }

    pub fn tiles(&self) -> impl Iterator<Item = Coord> + '_ {
        (self.min.y..=self.max.y)
            .flat_map(move |y| (self.min.x..=self.max.x).map(move |x| Coord::new(x, y)))
    }
}

/// Default hazard parameters: ignition severity and linear decay per tile of
/// Manhattan distance.
pub const DEFAULT_HAZARD_S0: u32 = 95;
pub const DEFAULT_HAZARD_ALPHA: u32 = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hazard {
    pub kind: String,
    pub ignition_tile: Coord,
    pub s0: u32,
    pub alpha_decay: u32,
    pub ignite_tick: Tick,
    pub extinguish_tick: Tick,
    /// Tiles within this Manhattan radius of the ignition point are
    /// physically impassable while the hazard is active. The radius ramps up
    /// one tile per tick after ignition, so an exit next to the ignition
    /// point stays usable for the first moments.
    pub block_radius: u32,
}

impl Hazard {
    pub fn active_at(&self, t: Tick) -> bool {
        t >= self.ignite_tick && t < self.extinguish_tick
    }

    pub fn block_radius_at(&self, t: Tick) -> Option<u32> {
        if !self.active_at(t) {
            return None;
        }
        Some(self.block_radius.min(t - self.ignite_tick))
    }

    pub fn blocks(&self, p: Coord, t: Tick) -> bool {
        match self.block_radius_at(t) {
            Some(r) => self.ignition_tile.manhattan(p) <= r,
            None => false,
        }
    }
}

/// Severity of a hazard as perceived at position `p` at tick `t`:
/// zero outside the active window, otherwise the ignition severity decayed
/// linearly with Manhattan distance.
pub fn hazard_severity_at(h: &Hazard, p: Coord, t: Tick) -> u32 {
    if !h.active_at(t) {
        return 0;
    }
    let d = h.ignition_tile.manhattan(p);
    h.s0.saturating_sub(h.alpha_decay.saturating_mul(d))
}

/// Signal state of an intersection at tick `t`: the first `red_ticks` of
/// each cycle are red.
pub fn signal_state(i: &Intersection, t: Tick) -> SignalState {
    let phase = (t + i.phase_offset()) % i.signal_cycle.period();
    if phase < i.signal_cycle.red_ticks {
        SignalState::Red
    } else {
        SignalState::Green
    }
}

impl Intersection {
    fn phase_offset(&self) -> u32 {
        self.signal_cycle.phase_offset
    }
}

/// True iff `p` lies within the intersection's effective zone, the radius in
/// which authority instructions issued there are binding.
pub fn in_effective_zone(i: &Intersection, p: Coord) -> bool {
    i.position.manhattan(p) <= i.effective_zone_radius
}

#[derive(Debug, Clone)]
pub struct TileMap {
    pub width: i32,
    pub height: i32,
    tiles: Vec<TileKind>,
    pub streets: Vec<Street>,
    pub intersections: Vec<Intersection>,
    pub crosswalks: Vec<Crosswalk>,
    pub safe_zones: Vec<Region>,
    pub buildings: Vec<Building>,
    street_index: BTreeMap<Coord, usize>,
    crosswalk_index: BTreeMap<Coord, usize>,
}

impl TileMap {
    pub fn new(
        width: i32,
        height: i32,
        tiles: Vec<TileKind>,
        streets: Vec<Street>,
        intersections: Vec<Intersection>,
        crosswalks: Vec<Crosswalk>,
        safe_zones: Vec<Region>,
        buildings: Vec<Building>,
    ) -> Result<Self> {
        if tiles.len() != (width as usize) * (height as usize) {
            return Err(Error::Config("tile grid size mismatch".into()));
        }
        let mut street_index = BTreeMap::new();
        for (i, s) in streets.iter().enumerate() {
            for &c in &s.tiles {
                if street_index.insert(c, i).is_some() {
                    return Err(Error::Config(alloc::format!(
                        "street tiles overlap at ({}, {})",
                        c.x, c.y
                    )));
                }
            }
        }
        let mut crosswalk_index = BTreeMap::new();
        for (i, cw) in crosswalks.iter().enumerate() {
            for &c in &cw.tiles {
                crosswalk_index.insert(c, i);
            }
        }
        let map = Self {
            width,
            height,
            tiles,
            streets,
            intersections,
            crosswalks,
            safe_zones,
            buildings,
            street_index,
            crosswalk_index,
        };
        map.check_invariants()?;
        Ok(map)
    }

    fn check_invariants(&self) -> Result<()> {
        for (i, cw) in self.crosswalks.iter().enumerate() {
            for &c in &cw.tiles {
                if self.kind(c) != Some(TileKind::Crosswalk) {
                    return Err(Error::Config(alloc::format!(
                        "crosswalk {i} tile ({}, {}) is not a crosswalk tile",
                        c.x, c.y
                    )));
                }
                let adjacent_road = c
                    .neighbors4()
                    .iter()
                    .chain(core::iter::once(&c))
                    .any(|n| matches!(self.kind(*n), Some(k) if k.is_road_family()));
                if !adjacent_road {
                    return Err(Error::Config(alloc::format!(
                        "crosswalk tile ({}, {}) not adjacent to road",
                        c.x, c.y
                    )));
                }
            }
            if let Some(sig) = &cw.signal {
                if !self.intersections.iter().any(|i| &i.id == sig) {
                    return Err(Error::Config(alloc::format!(
                        "crosswalk references unknown intersection {sig}"
                    )));
                }
            }
        }
        for i in &self.intersections {
            if i.signal_cycle.red_ticks == 0 || i.signal_cycle.green_ticks == 0 {
                return Err(Error::Config(alloc::format!(
                    "intersection {} has a degenerate signal cycle",
                    i.id
                )));
            }
            match self.kind(i.position) {
                Some(k) if k.is_road_family() => {}
                _ => {
                    return Err(Error::Config(alloc::format!(
                        "intersection {} not on a road tile",
                        i.id
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height
    }

    pub fn kind(&self, c: Coord) -> Option<TileKind> {
        if !self.in_bounds(c) {
            return None;
        }
        Some(self.tiles[(c.y * self.width + c.x) as usize])
    }

    pub fn street_of(&self, c: Coord) -> Option<&Street> {
        self.street_index.get(&c).map(|&i| &self.streets[i])
    }

    pub fn crosswalk_of(&self, c: Coord) -> Option<&Crosswalk> {
        self.crosswalk_index.get(&c).map(|&i| &self.crosswalks[i])
    }

    pub fn intersection(&self, id: &str) -> Option<&Intersection> {
        self.intersections.iter().find(|i| i.id == id)
    }

    pub fn building_at(&self, c: Coord) -> Option<&Building> {
        self.buildings
            .iter()
            .find(|b| c.x >= b.min.x && c.x <= b.max.x && c.y >= b.min.y && c.y <= b.max.y)
    }

    /// Base walkability from tile kind alone (ignores hazards): building
    /// tiles are walkable only when the building is designated public.
    pub fn kind_walkable(&self, c: Coord) -> bool {
        match self.kind(c) {
            Some(TileKind::Building) => self.building_at(c).map(|b| b.public).unwrap_or(false),
            Some(TileKind::Blocked) | None => false,
            Some(_) => true,
        }
    }

    pub fn walkable(&self, c: Coord, hazards: &[Hazard], t: Tick) -> bool {
        self.kind_walkable(c) && !hazards.iter().any(|h| h.blocks(c, t))
    }

    pub fn safe_zone_tiles(&self) -> Vec<Coord> {
        let mut out = Vec::new();
        for z in &self.safe_zones {
            for c in z.tiles() {
                if self.kind_walkable(c) {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Signal state governing a crosswalk tile, if any.
    pub fn crosswalk_signal(&self, c: Coord, t: Tick) -> Option<SignalState> {
        let cw = self.crosswalk_of(c)?;
        let sig = cw.signal.as_ref()?;
        self.intersection(sig).map(|i| signal_state(i, t))
    }
}

/// Manhattan distance between two in-bounds coordinates.
pub fn manhattan_distance(map: &TileMap, a: Coord, b: Coord) -> Result<u32> {
    for c in [a, b] {
        if !map.in_bounds(c) {
            return Err(Error::OutOfBounds { x: c.x, y: c.y });
        }
    }
    Ok(a.manhattan(b))
}

/// An authority instruction currently in force, as seen by observers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveInstruction {
    pub kind: InstructionKind,
    /// Intersection whose effective zone scopes the instruction.
    pub zone: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstructionKind {
    HoldBack,
    Pass,
    DirectionCorrection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VisibleAgent {
    pub id: String,
    pub position: Coord,
    pub behavior: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VisibleAuthority {
    pub id: String,
    pub position: Coord,
    pub instruction: Option<ActiveInstruction>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HazardReading {
    pub kind: String,
    pub distance: u32,
    pub severity: u32,
}

/// Raw environmental observation for one agent at one tick. Everything in it
/// is radius-filtered physical fact; interpretation happens downstream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawObservation {
    pub observer: String,
    pub tick: Tick,
    pub visible_agents: Vec<VisibleAgent>,
    pub visible_authorities: Vec<VisibleAuthority>,
    pub hazard_readings: Vec<HazardReading>,
    pub signal_states: Vec<(String, SignalState)>,
    pub current_tile_rules: Vec<String>,
}

/// Entities handed to [`observe`]; the scheduler assembles these from live
/// state each tick.
#[derive(Debug, Clone)]
pub struct SceneEntities {
    pub agents: Vec<VisibleAgent>,
    pub authorities: Vec<VisibleAuthority>,
}

/// Builds the raw observation for `observer` at tick `t`. Hazard readings are
/// limited to the cue radius and omit zero-severity readings; authorities
/// are limited to the authority radius.
pub fn observe(
    map: &TileMap,
    hazards: &[Hazard],
    scene: &SceneEntities,
    global_rules: &[String],
    observer: &str,
    position: Coord,
    t: Tick,
) -> RawObservation {
    let visible_agents = scene
        .agents
        .iter()
        .filter(|a| a.id != observer && position.manhattan(a.position) <= CUE_RADIUS)
        .cloned()
        .collect();
    let visible_authorities = scene
        .authorities
        .iter()
        .filter(|a| position.manhattan(a.position) <= AUTHORITY_RADIUS)
        .cloned()
        .collect();
    let mut hazard_readings = Vec::new();
    for h in hazards {
        let d = h.ignition_tile.manhattan(position);
        if d > CUE_RADIUS {
            continue;
        }
        let severity = hazard_severity_at(h, position, t);
        if severity > 0 {
            hazard_readings.push(HazardReading {
                kind: h.kind.clone(),
                distance: d,
                severity,
            });
        }
    }
    let signal_states = map
        .intersections
        .iter()
        .filter(|i| position.manhattan(i.position) <= CUE_RADIUS)
        .map(|i| (i.id.clone(), signal_state(i, t)))
        .collect();
    let mut current_tile_rules: Vec<String> = global_rules.to_vec();
    if let Some(street) = map.street_of(position) {
        for r in &street.scoped_rules {
            if !current_tile_rules.contains(r) {
                current_tile_rules.push(r.clone());
            }
        }
    }
    RawObservation {
        observer: observer.into(),
        tick: t,
        visible_agents,
        visible_authorities,
        hazard_readings,
        signal_states,
        current_tile_rules,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fire(ignite: Tick, extinguish: Tick) -> Hazard {
        Hazard {
            kind: "fire".into(),
            ignition_tile: Coord::new(10, 10),
            s0: DEFAULT_HAZARD_S0,
            alpha_decay: DEFAULT_HAZARD_ALPHA,
            ignite_tick: ignite,
            extinguish_tick: extinguish,
            block_radius: 2,
        }
    }

    #[test]
    fn severity_at_ignition() {
        let h = fire(50, 150);
        assert_eq!(hazard_severity_at(&h, Coord::new(10, 10), 60), 95);
    }

    #[test]
    fn severity_decays_linearly() {
        let h = fire(50, 150);
        assert_eq!(hazard_severity_at(&h, Coord::new(14, 10), 60), 75);
    }

    #[test]
    fn severity_clamps_at_zero() {
        let h = fire(50, 150);
        assert_eq!(hazard_severity_at(&h, Coord::new(10, 29), 60), 0);
    }

    #[test]
    fn severity_zero_before_ignition_and_after_extinguish() {
        let h = fire(50, 150);
        assert_eq!(hazard_severity_at(&h, Coord::new(10, 10), 49), 0);
        assert_eq!(hazard_severity_at(&h, Coord::new(10, 10), 150), 0);
    }

    #[test]
    fn block_radius_ramps() {
        let h = fire(50, 150);
        assert!(h.blocks(Coord::new(10, 10), 50));
        assert!(!h.blocks(Coord::new(11, 10), 50));
        assert!(h.blocks(Coord::new(11, 10), 51));
        assert!(h.blocks(Coord::new(12, 10), 52));
        assert!(!h.blocks(Coord::new(13, 10), 60));
    }

    fn signal(cycle: (u32, u32, u32)) -> Intersection {
        Intersection {
            id: "i".into(),
            position: Coord::new(0, 0),
            signal_cycle: SignalCycle {
                red_ticks: cycle.0,
                green_ticks: cycle.1,
                phase_offset: cycle.2,
            },
            effective_zone_radius: 12,
        }
    }

    #[test]
    fn signal_phase_start_is_red() {
        assert_eq!(signal_state(&signal((5, 5, 0)), 0), SignalState::Red);
    }

    #[test]
    fn signal_phase_boundary_is_green() {
        assert_eq!(signal_state(&signal((5, 5, 0)), 5), SignalState::Green);
    }

    #[test]
    fn signal_offset_arithmetic() {
        assert_eq!(signal_state(&signal((5, 5, 3)), 2), SignalState::Red);
    }

    #[test]
    fn effective_zone_boundary() {
        let i = signal((5, 5, 0));
        assert!(in_effective_zone(&i, Coord::new(6, 6)));
        assert!(in_effective_zone(&i, Coord::new(12, 0)));
        assert!(!in_effective_zone(&i, Coord::new(13, 0)));
    }

    #[test]
    fn perceptual_reach_matches_decay() {
        let h = fire(0, 100);
        // ceil(95 / 5) = 19 tiles: severity hits zero at exactly 19.
        assert!(hazard_severity_at(&h, Coord::new(10 + 18, 10), 10) > 0);
        assert_eq!(hazard_severity_at(&h, Coord::new(10 + 19, 10), 10), 0);
    }
}
