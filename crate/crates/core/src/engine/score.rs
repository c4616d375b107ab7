use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CritterStatus, EngineError, Event, EventKind, GameConfig, GameState, Phase};

pub const MUTANT_TRAPPED: i64 = 100;
pub const HEALTHY_SAVED: i64 = 20;
pub const HEALTHY_TRAPPED: i64 = -50;
pub const MINE_OVER_BUDGET: i64 = -25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoreReport {
    pub healthy_saved: u32,
    pub healthy_trapped: u32,
    pub mutants_trapped: u32,
    pub mutants_escaped: u32,
    pub mines_used: u32,
    pub time_bonus: u32,
    pub total: u64,
}

/// Raw tallies a report is computed from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScoreRules {
    pub width: usize,
    pub height: usize,
    pub population: usize,
    pub mine_budget: u32,
}

impl ScoreRules {
    pub fn for_config(config: &GameConfig) -> Self {
        ScoreRules {
            width: config.board.width(),
            height: config.board.height(),
            population: config.population(),
            mine_budget: config.mine_budget,
        }
    }

    pub fn time_bonus(&self, final_tick: u64) -> u32 {
        let par = 2 * (self.width + self.height) as i64 + 2 * self.population as i64;
        (par - final_tick as i64).max(0) as u32
    }

    pub fn report(
        &self,
        healthy_saved: u32,
        healthy_trapped: u32,
        mutants_trapped: u32,
        mutants_escaped: u32,
        mines_used: u32,
        final_tick: u64,
    ) -> ScoreReport {
        let time_bonus = self.time_bonus(final_tick);
        let over = (mines_used as i64 - self.mine_budget as i64).max(0);
        let total = MUTANT_TRAPPED * mutants_trapped as i64
            + HEALTHY_SAVED * healthy_saved as i64
            + HEALTHY_TRAPPED * healthy_trapped as i64
            + MINE_OVER_BUDGET * over
            + time_bonus as i64;
        ScoreReport {
            healthy_saved,
            healthy_trapped,
            mutants_trapped,
            mutants_escaped,
            mines_used,
            time_bonus,
            total: total.max(0) as u64,
        }
    }
}

pub fn score(state: &GameState, config: &GameConfig) -> Result<ScoreReport, EngineError> {
    if state.phase != Phase::Finished {
        return Err(EngineError::GameNotFinished);
    }
    let mut tally = [0u32; 4];
    for c in &state.critters {
        let slot = match (c.kind.is_mutant(), &c.status) {
            (false, CritterStatus::Saved) => 0,
            (false, CritterStatus::Trapped { .. }) => 1,
            (true, CritterStatus::Trapped { .. }) => 2,
            (true, CritterStatus::Saved) => 3,
            (_, CritterStatus::Walking) => return Err(EngineError::GameNotFinished),
        };
        tally[slot] += 1;
    }
    Ok(ScoreRules::for_config(config).report(
        tally[0],
        tally[1],
        tally[2],
        tally[3],
        config.mines.len() as u32,
        state.tick,
    ))
}

/// Recomputes a report from nothing but an event log. Used to audit reports
/// against stored logs.
pub fn audit_events(events: &[Event], rules: &ScoreRules, mines_used: u32) -> Result<ScoreReport, EngineError> {
    let mut mutant: BTreeMap<u32, bool> = BTreeMap::new();
    let mut outcome: BTreeMap<u32, bool> = BTreeMap::new();
    let mut last = 0;
    for e in events {
        last = last.max(e.tick);
        match &e.kind {
            EventKind::Spawned { mutant: m, .. } => {
                mutant.insert(e.critter, m.is_some());
            }
            EventKind::Saved { .. } => {
                outcome.insert(e.critter, true);
            }
            EventKind::Trapped { .. } => {
                outcome.insert(e.critter, false);
            }
            _ => {}
        }
    }
    if mutant.len() != rules.population || outcome.len() != rules.population {
        return Err(EngineError::GameNotFinished);
    }
    let mut tally = [0u32; 4];
    for (id, is_mutant) in mutant {
        let saved = *outcome.get(&id).ok_or(EngineError::GameNotFinished)?;
        tally[match (is_mutant, saved) {
            (false, true) => 0,
            (false, false) => 1,
            (true, false) => 2,
            (true, true) => 3,
        }] += 1;
    }
    Ok(rules.report(tally[0], tally[1], tally[2], tally[3], mines_used, last))
}
