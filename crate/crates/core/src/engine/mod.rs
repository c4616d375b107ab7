//! Tick-stepped game simulation.
//!
//! Each tick, every walking critter (in id order) either spawns onto the
//! first tile of its route or advances one tile. On the tile it entered it
//! runs its loop body, then faces the mine on that tile if there is one. A
//! failing assert traps it; reaching the tower saves it.

mod score;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocklang::{
    eval_test, init_state, step_loop, typecheck, Attributes, CritterProgram, CritterState, NodePath, TestProgram,
    TestVerdict, TypeError,
};
use crate::board::{distance_field, random_route_in, Board, Pos, Route};
use crate::mutation::{Mutant, MutantId};

pub use score::{audit_events, score, ScoreReport, ScoreRules};

/// Ticks between consecutive spawns.
pub const SPAWN_INTERVAL: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mine {
    pub position: Pos,
    pub test: TestProgram,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum CritterKind {
    Healthy,
    Mutant { mutant: MutantId },
}

impl CritterKind {
    pub fn is_mutant(&self) -> bool {
        matches!(self, CritterKind::Mutant { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CritterStatus {
    Walking,
    Saved,
    Trapped { tile: Pos, mine: usize, assert: NodePath },
}

#[derive(Debug, Clone, Serialize)]
pub struct CritterInstance {
    /// Spawn slot; critters are processed in this order.
    pub id: u32,
    /// Index into the unshuffled population (healthy first, then mutants in
    /// config order). Route randomness is keyed on this.
    pub population_index: usize,
    pub kind: CritterKind,
    #[serde(skip)]
    pub program: Arc<CritterProgram>,
    pub state: CritterState,
    pub route: Route,
    /// `None` until spawned.
    pub route_index: Option<usize>,
    pub spawn_tick: u64,
    #[serde(flatten)]
    pub status: CritterStatus,
}

impl CritterInstance {
    pub fn position(&self) -> Option<Pos> {
        self.route_index.map(|i| self.route.tiles()[i])
    }
}

#[derive(Debug, Clone)]
pub struct GameConfig {
    pub board: Board,
    pub cut: Arc<CritterProgram>,
    pub mutants: Vec<Mutant>,
    pub n_healthy: u32,
    pub mine_budget: u32,
    pub mines: Vec<Mine>,
    pub seed: u64,
}

impl GameConfig {
    pub fn population(&self) -> usize {
        self.n_healthy as usize + self.mutants.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Spawned {
        /// `null` for healthy critters.
        mutant: Option<MutantId>,
        at: Pos,
        attributes: Attributes,
    },
    Moved {
        to: Pos,
        attributes: Attributes,
    },
    MineEvaluated {
        mine: usize,
        at: Pos,
        passed: bool,
    },
    Trapped {
        at: Pos,
        mine: usize,
        assert: NodePath,
    },
    Saved {
        at: Pos,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    pub critter: u32,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    Running,
    Finished,
}

#[derive(Debug, Clone, Serialize)]
pub struct GameState {
    pub tick: u64,
    pub critters: Vec<CritterInstance>,
    pub events: Vec<Event>,
    pub phase: Phase,
}

/// Mine placement problems, shared with request validation in the service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum MineIssue {
    #[error("mine {index} at {position} is outside the board")]
    OutOfBounds { index: usize, position: Pos },
    #[error("mine {index} at {position} is not on a walkable tile")]
    NotWalkable { index: usize, position: Pos },
    #[error("mine {index} shares tile {position} with mine {other}")]
    Duplicate { index: usize, other: usize, position: Pos },
    #[error("mine {index} has an ill-typed test")]
    IllTyped { index: usize, errors: Vec<TypeError> },
}

pub fn check_mines(board: &Board, mines: &[Mine]) -> Vec<MineIssue> {
    let mut issues = Vec::new();
    let mut seen: BTreeMap<Pos, usize> = BTreeMap::new();
    for (index, mine) in mines.iter().enumerate() {
        let position = mine.position;
        if !board.in_bounds(position) {
            issues.push(MineIssue::OutOfBounds { index, position });
        } else if !board.is_walkable(position) {
            issues.push(MineIssue::NotWalkable { index, position });
        }
        if let Some(&other) = seen.get(&position) {
            issues.push(MineIssue::Duplicate { index, other, position });
        } else {
            seen.insert(position, index);
        }
        let errors = typecheck(&mine.test);
        if !errors.is_empty() {
            issues.push(MineIssue::IllTyped { index, errors });
        }
    }
    issues
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid game config: {0}")]
    InvalidConfig(String),
    #[error("game is not running")]
    NotRunning,
    #[error("game is not finished")]
    GameNotFinished,
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Spawn order for a config: a seeded shuffle of population indices.
pub fn spawn_order(seed: u64, population: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population).collect();
    order.shuffle(&mut stream(seed, 0));
    order
}

/// The route critter `population_index` walks under `seed`.
pub fn route_for(board: &Board, seed: u64, population_index: usize) -> Option<Route> {
    let field = distance_field(board);
    random_route_in(board, &field, &mut stream(seed, population_index as u64 + 1)).ok()
}

/// A running simulation. Owns its config so ticking needs no borrows.
#[derive(Debug, Clone)]
pub struct Game {
    config: GameConfig,
    mines_by_tile: BTreeMap<Pos, usize>,
    state: GameState,
}

impl Game {
    pub fn new(config: GameConfig) -> Result<Game, EngineError> {
        let order = spawn_order(config.seed, config.population());
        Game::with_spawn_order(config, order)
    }

    /// Like [`Game::new`] but with an explicit spawn order (a permutation of
    /// population indices). Routes do not depend on the order.
    pub fn with_spawn_order(config: GameConfig, order: Vec<usize>) -> Result<Game, EngineError> {
        validate(&config)?;
        let population = config.population();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..population).collect::<Vec<_>>() {
            return Err(EngineError::InvalidConfig("spawn order is not a permutation of the population".into()));
        }

        let field = distance_field(&config.board);
        let mut critters = Vec::with_capacity(population);
        for (slot, &pi) in order.iter().enumerate() {
            let (kind, program) = if pi < config.n_healthy as usize {
                (CritterKind::Healthy, config.cut.clone())
            } else {
                let m = &config.mutants[pi - config.n_healthy as usize];
                (
                    CritterKind::Mutant { mutant: m.id.clone() },
                    Arc::new(m.program.clone()),
                )
            };
            let route = random_route_in(&config.board, &field, &mut stream(config.seed, pi as u64 + 1))
                .map_err(|e| EngineError::InvalidConfig(e.to_string()))?;
            critters.push(CritterInstance {
                id: slot as u32,
                population_index: pi,
                kind,
                program,
                state: CritterState::default(),
                route,
                route_index: None,
                spawn_tick: 1 + SPAWN_INTERVAL * slot as u64,
                status: CritterStatus::Walking,
            });
        }

        let mines_by_tile = config.mines.iter().enumerate().map(|(i, m)| (m.position, i)).collect();
        Ok(Game {
            config,
            mines_by_tile,
            state: GameState {
                tick: 0,
                critters,
                events: Vec::new(),
                phase: Phase::Running,
            },
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn into_state(self) -> GameState {
        self.state
    }

    pub fn is_finished(&self) -> bool {
        self.state.phase == Phase::Finished
    }

    pub fn tick(&mut self) -> Result<(), EngineError> {
        if self.state.phase == Phase::Finished {
            return Err(EngineError::NotRunning);
        }
        self.state.tick += 1;
        let now = self.state.tick;
        let GameState { critters, events, .. } = &mut self.state;
        for c in critters.iter_mut() {
            if c.status != CritterStatus::Walking {
                continue;
            }
            let index = match c.route_index {
                None if now < c.spawn_tick => continue,
                None => 0,
                Some(i) => i + 1,
            };
            c.route_index = Some(index);
            let at = c.route.tiles()[index];
            let input = self.config.board.tile_input(at).expect("routes stay on the board");
            let entered = if index == 0 { init_state(&c.program) } else { c.state.clone() };
            c.state = step_loop(&c.program, &entered, &input);
            let attributes = c.state.attributes();
            events.push(Event {
                tick: now,
                critter: c.id,
                kind: if index == 0 {
                    EventKind::Spawned {
                        mutant: match &c.kind {
                            CritterKind::Healthy => None,
                            CritterKind::Mutant { mutant } => Some(mutant.clone()),
                        },
                        at,
                        attributes,
                    }
                } else {
                    EventKind::Moved { to: at, attributes }
                },
            });

            if let Some(&mine) = self.mines_by_tile.get(&at) {
                let verdict = eval_test(&self.config.mines[mine].test, &c.state, &input);
                events.push(Event {
                    tick: now,
                    critter: c.id,
                    kind: EventKind::MineEvaluated {
                        mine,
                        at,
                        passed: verdict.passed(),
                    },
                });
                if let TestVerdict::Fail { assert } = verdict {
                    events.push(Event {
                        tick: now,
                        critter: c.id,
                        kind: EventKind::Trapped {
                            at,
                            mine,
                            assert: assert.clone(),
                        },
                    });
                    c.status = CritterStatus::Trapped { tile: at, mine, assert };
                    continue;
                }
            }

            if at == self.config.board.tower() {
                events.push(Event {
                    tick: now,
                    critter: c.id,
                    kind: EventKind::Saved { at },
                });
                c.status = CritterStatus::Saved;
            }
        }
        if critters.iter().all(|c| c.status != CritterStatus::Walking) {
            self.state.phase = Phase::Finished;
        }
        Ok(())
    }

    pub fn run(&mut self) {
        while !self.is_finished() {
            self.tick().expect("running game ticks");
        }
    }

    pub fn score(&self) -> Result<ScoreReport, EngineError> {
        score(&self.state, &self.config)
    }
}

fn validate(config: &GameConfig) -> Result<(), EngineError> {
    if config.n_healthy < 1 {
        return Err(EngineError::InvalidConfig("at least one healthy critter is required".into()));
    }
    if let Some(issue) = check_mines(&config.board, &config.mines).into_iter().next() {
        return Err(EngineError::InvalidConfig(issue.to_string()));
    }
    if !typecheck(config.cut.as_ref()).is_empty() {
        return Err(EngineError::InvalidConfig("critter program does not type-check".into()));
    }
    for m in &config.mutants {
        if !typecheck(&m.program).is_empty() {
            return Err(EngineError::InvalidConfig(format!("mutant {} does not type-check", m.id)));
        }
    }
    if distance_field(&config.board).get(config.board.spawn()).is_none() {
        return Err(EngineError::InvalidConfig("tower is unreachable from spawn".into()));
    }
    Ok(())
}

pub fn new_game(config: GameConfig) -> Result<Game, EngineError> {
    Game::new(config)
}

pub fn run_to_completion(config: GameConfig) -> Result<(GameState, ScoreReport), EngineError> {
    let mut game = Game::new(config)?;
    game.run();
    let report = game.score()?;
    Ok((game.into_state(), report))
}
