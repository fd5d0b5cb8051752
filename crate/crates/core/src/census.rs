//! Agent roster, rule databases, threshold elicitation, and scripted NPC
//! behavior. Everything here is immutable after load; the scheduler only
//! reads it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::Coord;
use crate::judgment::{self, JudgmentProvider, JudgmentRequest, ResponseBody};
use crate::world::{InstructionKind, Tick, TraversalRule};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleScope {
    Global,
    Street,
    Intersection,
}

/// One rule in the global set R. Declaration order matters: it is the
/// canonical ordering used for tie-breaks and display.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub description: String,
    #[serde(default = "default_scope")]
    pub scope: RuleScope,
    /// Scope target (street or intersection name) when not global.
    #[serde(default)]
    pub scope_target: Option<String>,
    /// The grid-level traversal rule this config rule binds, if any.
    #[serde(default)]
    pub binding: Option<TraversalRule>,
    /// Short label used in replay tables.
    pub label: String,
}

fn default_scope() -> RuleScope {
    RuleScope::Global
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Injunctive,
    Descriptive,
}

/// Structured personal-rule entry: context tag, content text, norm kind, and
/// the action/validity strengths the normative assessment reads.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleEntry {
    pub context: String,
    pub content: String,
    pub alpha_kind: NormKind,
    pub s_act: u32,
    pub s_val: u32,
}

impl RuleEntry {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("s_act", self.s_act), ("s_val", self.s_val)] {
            if !(1..=100).contains(&v) {
                return Err(Error::Config(alloc::format!(
                    "rule entry field {name} = {v} outside [1,100]"
                )));
            }
        }
        Ok(())
    }
}

pub type RuleDatabase = BTreeMap<String, RuleEntry>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Regulated,
    Authority,
    Confederate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgentDescription {
    pub id: String,
    pub name: String,
    pub occupation: String,
    /// Disposition text; drives threshold elicitation and persona shifts.
    pub persona: String,
    pub current_goal: String,
    #[serde(default)]
    pub rules: RuleDatabase,
    pub role: Role,
    /// Legitimacy acceptance threshold; regulated agents only.
    #[serde(default)]
    pub tau: Option<u32>,
    pub home_tile: Coord,
}

/// Keyword-scored disposition classes, calibrated so the shipped personas
/// elicit their published thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disposition {
    Cautious,
    Balanced,
    RiskTaking,
}

const DISPOSITION_KEYWORDS: &[(&str, i32)] = &[
    ("rule-respecting", 10),
    ("rule-following", 5),
    ("conscientious", 10),
    ("careful", 5),
    ("caution", 5),
    ("cautious", 5),
    ("safety", 5),
    ("binding", 5),
    ("professional", 5),
    ("defers", 5),
    ("civic", 5),
    ("strong", 5),
    ("quiet", 10),
    ("prefers", 5),
    ("balanced", 5),
    ("authority-respecting", 5),
    ("risk", -5),
    ("impulsive", -5),
    ("own judgment", -5),
    ("rule-skeptical", -10),
];

/// Score a persona: 50 plus a delta per keyword present (each counted once).
pub fn disposition_score(persona: &str) -> u32 {
    let text = persona.to_lowercase();
    let mut score = 50i32;
    for (kw, delta) in DISPOSITION_KEYWORDS {
        if text.contains(kw) {
            score += delta;
        }
    }
    score.clamp(20, 85) as u32
}

pub fn classify_disposition(persona: &str) -> Disposition {
    let s = disposition_score(persona);
    if s >= 60 {
        Disposition::Cautious
    } else if s <= 45 {
        Disposition::RiskTaking
    } else {
        Disposition::Balanced
    }
}

/// Band the elicitation prompt defines for each disposition class.
pub fn disposition_band(d: Disposition) -> (u32, u32) {
    match d {
        Disposition::Cautious => (60, 85),
        Disposition::Balanced => (45, 60),
        Disposition::RiskTaking => (20, 45),
    }
}

/// Elicits the legitimacy threshold for a regulated agent. Called once at
/// initialization; the result is cached for the whole run. A provider that
/// fails twice yields the mid-scale default 50, flagged as degraded.
pub fn elicit_threshold(
    agent: &AgentDescription,
    provider: &dyn JudgmentProvider,
) -> Result<(u32, bool)> {
    if agent.role != Role::Regulated {
        return Err(Error::InvalidInput(alloc::format!(
            "threshold elicitation is only defined for regulated agents, got {:?}",
            agent.role
        )));
    }
    let req = JudgmentRequest::Threshold {
        agent_name: agent.name.clone(),
        description: describe_agent(agent),
    };
    for _attempt in 0..2 {
        match provider.evaluate(&req) {
            Ok(j) => {
                if let ResponseBody::Threshold { threshold, .. } = j.body {
                    return Ok((threshold, false));
                }
            }
            Err(_) => {}
        }
    }
    Ok((50, true))
}

/// Flat agent-description text handed to providers.
pub fn describe_agent(a: &AgentDescription) -> String {
    alloc::format!(
        "{} ({}). Disposition: {} Current goal: {}",
        a.name, a.occupation, a.persona, a.current_goal
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NpcAction {
    MoveTo { target: Coord },
    Jaywalk { intersection: String },
    Instruct {
        instruction: InstructionKind,
        zone: String,
    },
    Idle,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NpcScript {
    pub npc_id: String,
    pub timeline: Vec<(Tick, NpcAction)>,
}

/// The action scheduled exactly at tick `t`, else `Idle`. NPCs never invoke
/// the judgment pipeline; persistence of instructions across ticks is the
/// scheduler's business.
pub fn npc_step(script: &NpcScript, t: Tick) -> NpcAction {
    script
        .timeline
        .iter()
        .find(|(tick, _)| *tick == t)
        .map(|(_, a)| a.clone())
        .unwrap_or(NpcAction::Idle)
}

/// The loaded cast of a run: global rules, regulated agents, scripted NPCs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Roster {
    pub rules: Vec<Rule>,
    pub agents: Vec<AgentDescription>,
    pub npcs: Vec<AgentDescription>,
    pub scripts: Vec<NpcScript>,
}

impl Roster {
    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Canonical index of a rule (declaration order).
    pub fn rule_index(&self, id: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.id == id)
    }

    pub fn rule_for_binding(&self, b: TraversalRule) -> Option<&Rule> {
        self.rules.iter().find(|r| r.binding == Some(b))
    }

    pub fn agent(&self, id: &str) -> Option<&AgentDescription> {
        self.agents.iter().find(|a| a.id == id)
    }

    pub fn global_rule_ids(&self) -> Vec<String> {
        self.rules
            .iter()
            .filter(|r| r.scope == RuleScope::Global)
            .map(|r| r.id.clone())
            .collect()
    }

    /// Validates ids, rule references, role constraints, and script shape.
    /// `thresholds_available` says whether a provider is on hand to elicit
    /// missing taus.
    pub fn validate(&self, thresholds_available: bool) -> Result<()> {
        let mut ids = BTreeSet::new();
        for r in &self.rules {
            if r.description.is_empty() {
                return Err(Error::Config(alloc::format!("rule {} has empty description", r.id)));
            }
            if !ids.insert(r.id.clone()) {
                return Err(Error::Config(alloc::format!("duplicate rule id {}", r.id)));
            }
        }
        let mut agent_ids = BTreeSet::new();
        for a in self.agents.iter().chain(self.npcs.iter()) {
            if !agent_ids.insert(a.id.clone()) {
                return Err(Error::Config(alloc::format!("duplicate agent id {}", a.id)));
            }
        }
        for a in &self.agents {
            if a.role != Role::Regulated {
                return Err(Error::Config(alloc::format!(
                    "agent {} in the regulated roster has role {:?}",
                    a.id, a.role
                )));
            }
            if a.tau.is_none() && !thresholds_available {
                return Err(Error::Config(alloc::format!(
                    "regulated agent {} has no threshold and no provider is configured",
                    a.id
                )));
            }
            if let Some(tau) = a.tau {
                if !(1..=100).contains(&tau) {
                    return Err(Error::Config(alloc::format!(
                        "agent {} threshold {tau} outside [1,100]",
                        a.id
                    )));
                }
            }
            for (rule_id, entry) in &a.rules {
                if self.rule(rule_id).is_none() {
                    return Err(Error::Config(alloc::format!(
                        "agent {} references unknown rule {rule_id}",
                        a.id
                    )));
                }
                entry.validate()?;
            }
        }
        for npc in &self.npcs {
            if npc.role == Role::Regulated {
                return Err(Error::Config(alloc::format!(
                    "npc {} must not be regulated",
                    npc.id
                )));
            }
        }
        for s in &self.scripts {
            let Some(npc) = self.npcs.iter().find(|n| n.id == s.npc_id) else {
                return Err(Error::Config(alloc::format!(
                    "script references unknown npc {}",
                    s.npc_id
                )));
            };
            let mut last: Option<Tick> = None;
            for (t, action) in &s.timeline {
                if let Some(prev) = last {
                    if *t <= prev {
                        return Err(Error::Config(alloc::format!(
                            "script {} timeline not strictly increasing at tick {t}",
                            s.npc_id
                        )));
                    }
                }
                last = Some(*t);
                match action {
                    NpcAction::Instruct { .. } if npc.role != Role::Authority => {
                        return Err(Error::Config(alloc::format!(
                            "npc {} may not instruct (not an authority)",
                            s.npc_id
                        )));
                    }
                    NpcAction::Jaywalk { .. } if npc.role != Role::Confederate => {
                        return Err(Error::Config(alloc::format!(
                            "npc {} may not jaywalk by script (not a confederate)",
                            s.npc_id
                        )));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Fills in missing thresholds by elicitation and returns the finished
/// roster. Elicited values are pure functions of the persona text under the
/// deterministic provider, so they are stable across seeds.
pub fn load_roster(
    mut roster: Roster,
    provider: Option<&dyn JudgmentProvider>,
) -> Result<Roster> {
    roster.validate(provider.is_some())?;
    for agent in &mut roster.agents {
        if agent.tau.is_none() {
            let p = provider.ok_or_else(|| {
                Error::Config("threshold elicitation requires a provider".to_string())
            })?;
            let (tau, _) = elicit_threshold(agent, p)?;
            agent.tau = Some(tau);
        }
    }
    Ok(roster)
}

pub use judgment::oracle::threshold_for_persona;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_persona_scores_midpoint() {
        assert_eq!(disposition_score(""), 50);
        assert_eq!(classify_disposition(""), Disposition::Balanced);
    }

    #[test]
    fn calibrated_personas() {
        let cases = [
            ("Careful, rule-following, defers to institutional authority", 65),
            ("Takes creative risks, trusts own judgment over rules", 40),
            ("Balanced and pragmatic, weighs costs and benefits", 55),
            ("Friendly and conscientious about local rules", 60),
            ("Slightly impulsive, willing to bend rules for momentum", 45),
            ("Professional caution, treats safety procedures as binding", 70),
            ("Strong rule-respecting, defers to civic norms", 75),
            ("Pragmatic, protective of customers", 50),
            ("Routine schedule, conscientious", 60),
            ("Routine schedule, prefers quiet environments", 65),
        ];
        for (persona, tau) in cases {
            assert_eq!(disposition_score(persona), tau, "persona: {persona}");
        }
    }

    #[test]
    fn npc_step_before_timeline_is_idle() {
        let script = NpcScript {
            npc_id: "J1".into(),
            timeline: alloc::vec![(31, NpcAction::Jaywalk { intersection: "main_oak".into() })],
        };
        assert_eq!(npc_step(&script, 5), NpcAction::Idle);
        assert_eq!(
            npc_step(&script, 31),
            NpcAction::Jaywalk { intersection: "main_oak".into() }
        );
    }
}
