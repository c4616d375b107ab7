//! Levels: the authored unit of play, plus its on-disk store and the
//! leaderboard.

mod store;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{analyze, AnalysisError, AnalysisReport, Certificate, DEFAULT_ROUTE_CAP};
use crate::blocklang::{typecheck, CritterProgram, DecodeError};
use crate::board::{distance_field, Board};
use crate::engine::{run_to_completion, EngineError, GameConfig, GameState, Mine, ScoreReport};
use crate::mutation::{explain, make_mutant, DiffEntry, Mutant, MutantId, Mutation, MutationError};

pub use store::{
    write_atomic, GameRecord, Leaderboard, LeaderboardEntry, LevelStore, ScoreSubmission,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    Tutorial,
    Beginner,
    Advanced,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Tutorial, Category::Beginner, Category::Advanced];
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Level {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub id: String,
    pub name: String,
    pub category: Category,
    pub board: Board,
    pub cut: CritterProgram,
    /// Each mutant is a list of mutations applied together to the CUT.
    pub mutants: Vec<Vec<Mutation>>,
    /// Number of healthy critters.
    pub critters: u32,
    pub mine_budget: u32,
    pub difficulty: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelSummary {
    pub id: String,
    pub name: String,
    pub category: Category,
    pub difficulty: u8,
    pub critters: u32,
    pub mutants: usize,
    pub mine_budget: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryGroup {
    pub category: Category,
    pub levels: Vec<LevelSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantView {
    pub id: MutantId,
    pub diff: Vec<DiffEntry>,
}

/// A level together with the readable diff of each mutant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelDetail {
    pub level: Level,
    pub mutant_diffs: Vec<MutantView>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IssueCode {
    InvalidId,
    NoCritters,
    BadDifficulty,
    UnwalkableSpawn,
    UnwalkableTower,
    Unreachable,
    CutIllTyped,
    NoMutants,
    MutantInvalid,
    EquivalentMutant,
    Unsolvable,
    BudgetBelowMinimal,
    AnalysisSkipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub code: IssueCode,
    pub detail: String,
}

impl Issue {
    fn error(code: IssueCode, detail: impl Into<String>) -> Self {
        Issue {
            severity: Severity::Error,
            code,
            detail: detail.into(),
        }
    }

    fn warning(code: IssueCode, detail: impl Into<String>) -> Self {
        Issue {
            severity: Severity::Warning,
            code,
            detail: detail.into(),
        }
    }
}

pub fn has_errors(issues: &[Issue]) -> bool {
    issues.iter().any(|i| i.severity == Severity::Error)
}

#[derive(Debug, Error)]
pub enum LevelError {
    #[error("level {0:?} not found")]
    NotFound(String),
    #[error("unknown level {0:?}")]
    UnknownLevel(String),
    #[error("level failed validation")]
    ValidationFailed(Vec<Issue>),
    #[error("invalid id {0:?}")]
    InvalidId(String),
    #[error("invalid player name {0:?}")]
    InvalidPlayer(String),
    #[error("mutant {index} is invalid: {source}")]
    Mutant { index: usize, source: MutationError },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("submitted report does not match the server replay")]
    ReplayMismatch {
        claimed: Box<ScoreReport>,
        actual: Box<ScoreReport>,
    },
    #[error("storage failure: {0}")]
    Storage(#[from] std::io::Error),
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 64
        && id.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-' || b == b'_')
}

impl Level {
    pub fn from_json(doc: &str) -> Result<Level, DecodeError> {
        crate::blocklang::from_json(doc)
    }

    pub fn summary(&self) -> LevelSummary {
        LevelSummary {
            id: self.id.clone(),
            name: self.name.clone(),
            category: self.category,
            difficulty: self.difficulty,
            critters: self.critters,
            mutants: self.mutants.len(),
            mine_budget: self.mine_budget,
        }
    }

    pub fn build_mutants(&self) -> Result<Vec<Mutant>, LevelError> {
        let base = Arc::new(self.cut.clone());
        self.mutants
            .iter()
            .enumerate()
            .map(|(index, ms)| make_mutant(base.clone(), ms.clone()).map_err(|source| LevelError::Mutant { index, source }))
            .collect()
    }

    pub fn detail(&self) -> Result<LevelDetail, LevelError> {
        let mutant_diffs = self
            .build_mutants()?
            .iter()
            .map(|m| MutantView {
                id: m.id.clone(),
                diff: explain(m),
            })
            .collect();
        Ok(LevelDetail {
            level: self.clone(),
            mutant_diffs,
        })
    }

    pub fn game_config(&self, mines: Vec<Mine>, seed: u64) -> Result<GameConfig, LevelError> {
        Ok(GameConfig {
            board: self.board.clone(),
            cut: Arc::new(self.cut.clone()),
            mutants: self.build_mutants()?,
            n_healthy: self.critters,
            mine_budget: self.mine_budget,
            mines,
            seed,
        })
    }

    /// Runs one full game on this level.
    pub fn play(&self, mines: Vec<Mine>, seed: u64) -> Result<(GameState, ScoreReport), LevelError> {
        Ok(run_to_completion(self.game_config(mines, seed)?)?)
    }

    pub fn analyze(&self, cap: usize) -> Result<AnalysisReport, LevelError> {
        Ok(analyze(&self.board, &self.cut, &self.build_mutants()?, cap)?)
    }
}

/// Checks a level and reports everything wrong with it. Never fails.
pub fn validate(level: &Level) -> Vec<Issue> {
    use IssueCode::*;
    let mut issues = Vec::new();
    if !valid_id(&level.id) {
        issues.push(Issue::error(InvalidId, format!("{:?} must be 1-64 chars of [a-z0-9_-]", level.id)));
    }
    if level.critters < 1 {
        issues.push(Issue::error(NoCritters, "at least one critter is required"));
    }
    if !(1..=5).contains(&level.difficulty) {
        issues.push(Issue::error(BadDifficulty, format!("difficulty {} outside 1..=5", level.difficulty)));
    }

    let board = &level.board;
    let spawn_ok = board.is_walkable(board.spawn());
    let tower_ok = board.is_walkable(board.tower());
    if !spawn_ok {
        issues.push(Issue::error(UnwalkableSpawn, format!("spawn {} is not walkable", board.spawn())));
    }
    if !tower_ok {
        issues.push(Issue::error(UnwalkableTower, format!("tower {} is not walkable", board.tower())));
    }
    if spawn_ok && tower_ok && distance_field(board).get(board.spawn()).is_none() {
        issues.push(Issue::error(Unreachable, "no walkable route from spawn to tower"));
    }

    let type_errors = typecheck(&level.cut);
    for e in &type_errors {
        issues.push(Issue::error(CutIllTyped, e.to_string()));
    }

    if level.mutants.is_empty() {
        issues.push(Issue::error(NoMutants, "a level needs at least one mutant"));
    } else if type_errors.is_empty() {
        let base = Arc::new(level.cut.clone());
        for (i, ms) in level.mutants.iter().enumerate() {
            if let Err(e) = make_mutant(base.clone(), ms.clone()) {
                issues.push(Issue::error(MutantInvalid, format!("mutant {i}: {e}")));
            }
        }
    }

    if has_errors(&issues) {
        return issues;
    }
    match level.analyze(DEFAULT_ROUTE_CAP) {
        Ok(report) => {
            for id in &report.equivalent {
                issues.push(Issue::warning(EquivalentMutant, format!("mutant {id} behaves like the CUT on this board")));
            }
            match &report.minimal.certificate {
                Certificate::Unsolvable { missing } => {
                    let names: Vec<String> = missing.iter().map(|m| m.to_string()).collect();
                    issues.push(Issue::warning(
                        Unsolvable,
                        format!("no safe mine set traps {} on every route", names.join(", ")),
                    ));
                }
                _ if (level.mine_budget as usize) < report.minimal.mines.len() => {
                    issues.push(Issue::warning(
                        BudgetBelowMinimal,
                        format!(
                            "mine budget {} is below the minimal set size {}",
                            level.mine_budget,
                            report.minimal.mines.len()
                        ),
                    ));
                }
                _ => {}
            }
        }
        Err(e) => issues.push(Issue::warning(AnalysisSkipped, e.to_string())),
    }
    issues
}

const FIXTURES: [&str; 3] = [
    include_str!("../../fixtures/levels/tutorial-shirt.json"),
    include_str!("../../fixtures/levels/beginner-fork.json"),
    include_str!("../../fixtures/levels/advanced-coverage.json"),
];

/// The levels every fresh store starts with.
pub fn fixtures() -> Vec<Level> {
    FIXTURES
        .iter()
        .map(|doc| Level::from_json(doc).expect("bundled fixture parses"))
        .collect()
}

pub fn fixture(id: &str) -> Option<Level> {
    fixtures().into_iter().find(|l| l.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocklang::Texture;
    use crate::board::Pos;

    #[test]
    fn fixtures_are_clean() {
        for l in fixtures() {
            assert_eq!(validate(&l), vec![], "{}", l.id);
        }
    }

    #[test]
    fn fixture_minimal_sets() {
        let sizes: Vec<usize> = fixtures()
            .iter()
            .map(|l| l.analyze(DEFAULT_ROUTE_CAP).unwrap().minimal.mines.len())
            .collect();
        assert_eq!(sizes, vec![2, 2, 3]);
    }

    #[test]
    fn tower_on_water() {
        let mut l = fixture("tutorial-shirt").unwrap();
        l.board = l.board.with_texture(l.board.tower(), Texture::Water);
        let codes: Vec<IssueCode> = validate(&l).iter().map(|i| i.code).collect();
        assert!(codes.contains(&IssueCode::UnwalkableTower));
    }

    #[test]
    fn zero_mutants() {
        let mut l = fixture("tutorial-shirt").unwrap();
        l.mutants.clear();
        let issues = validate(&l);
        assert!(issues.iter().any(|i| i.code == IssueCode::NoMutants && i.severity == Severity::Error));
    }

    #[test]
    fn unreachable_tower() {
        let mut l = fixture("tutorial-shirt").unwrap();
        l.board = l.board.with_texture(Pos::new(8, 8), Texture::Wood);
        assert_eq!(validate(&l)[0].code, IssueCode::Unreachable);
    }

    #[test]
    fn small_budget_is_a_warning() {
        let mut l = fixture("beginner-fork").unwrap();
        l.mine_budget = 1;
        let issues = validate(&l);
        assert_eq!(issues.len(), 1);
        assert_eq!((issues[0].severity, issues[0].code), (Severity::Warning, IssueCode::BudgetBelowMinimal));
    }

    #[test]
    fn level_document_keys() {
        let doc = crate::blocklang::to_json(&fixture("tutorial-shirt").unwrap());
        for key in ["\"schemaVersion\":1", "\"mineBudget\":2", "\"critters\":5", "\"category\":\"TUTORIAL\""] {
            assert!(doc.contains(key), "{key}");
        }
        assert!(Level::from_json(&doc.replace("\"difficulty\"", "\"hardness\"")).is_err());
    }
}
