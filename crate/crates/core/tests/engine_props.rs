mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use code_critters::analysis::{equivalent_mutants, kill_matrix, Kill, DEFAULT_ROUTE_CAP};
use code_critters::blocklang::*;
use code_critters::board::Pos;
use code_critters::engine::*;
use code_critters::levels::{fixtures, Level};
use code_critters::mutation::*;
use proptest::prelude::*;

fn outcomes(state: &GameState) -> BTreeMap<usize, CritterStatus> {
    state.critters.iter().map(|c| (c.population_index, c.status.clone())).collect()
}

fn oracle_pool(level: &Level) -> Vec<Mine> {
    level.analyze(DEFAULT_ROUTE_CAP).unwrap().kill_matrix.mines
}

#[test]
fn fixture_logs_are_byte_identical() {
    for level in fixtures() {
        let mines = level.analyze(DEFAULT_ROUTE_CAP).unwrap().minimal.mines;
        for seed in 0..5 {
            let a = level.play(mines.clone(), seed).unwrap().0;
            let b = level.play(mines.clone(), seed).unwrap().0;
            assert_eq!(to_json(&a.events), to_json(&b.events), "{} seed {seed}", level.id);
        }
    }
}

#[test]
fn guaranteed_cells_hold_in_play() {
    for level in fixtures() {
        let report = level.analyze(DEFAULT_ROUTE_CAP).unwrap();
        let km = &report.kill_matrix;
        for (i, mine) in km.mines.iter().enumerate() {
            for seed in 0..5 {
                let (state, _) = level.play(vec![mine.clone()], seed).unwrap();
                for c in &state.critters {
                    let CritterKind::Mutant { mutant } = &c.kind else {
                        assert_eq!(c.status, CritterStatus::Saved, "oracle mine trapped a healthy critter");
                        continue;
                    };
                    let j = km.mutants.iter().position(|m| m == mutant).unwrap();
                    match km.get(i, j) {
                        Kill::Guaranteed => assert!(matches!(c.status, CritterStatus::Trapped { .. })),
                        Kill::Never => assert_eq!(c.status, CritterStatus::Saved),
                        Kill::Possible => {}
                    }
                }
            }
        }
    }
}

#[test]
fn equivalent_mutant_is_never_trapped_by_safe_mines() {
    // The fork CUT on the tutorial trail, which has no ice: dropping the ICE
    // disjunct cannot be observed.
    let mut level = common::tutorial();
    level.cut = common::beginner().cut;
    level.mutants = vec![vec![Mutation::new(
        MutationClass::Condition,
        NodePath::new(Section::Loop, [0, 0]),
        Edit::DropConjunct { side: Side::Right },
    )]];
    let mutants = common::mutants(&level);
    let eq = equivalent_mutants(&level.board, &level.cut, &mutants, DEFAULT_ROUTE_CAP).unwrap();
    assert_eq!(eq, vec![mutants[0].id.clone()]);
    let pool = oracle_pool(&level);
    for seed in 0..10 {
        let (_, report) = level.play(pool.clone(), seed).unwrap();
        assert_eq!((report.mutants_trapped, report.healthy_trapped), (0, 0));
    }
}

#[test]
fn dead_end_mine_changes_nothing() {
    let mut level = common::tutorial();
    level.board = level.board.with_texture(Pos::new(9, 6), Texture::Grass);
    let km = kill_matrix(&level.board, &common::mutants(&level), &[common::shirt_mine(9, 6, Color::Green)], 10).unwrap();
    assert!(km.cells[0].iter().all(|&k| k == Kill::Never));
    for seed in 0..20 {
        let base = common::prescribed_mines();
        let mut more = base.clone();
        more.push(common::shirt_mine(9, 6, Color::Green));
        let (a, ra) = level.play(base, seed).unwrap();
        let (b, rb) = level.play(more, seed).unwrap();
        assert_eq!(outcomes(&a), outcomes(&b));
        assert_eq!(rb.mines_used, ra.mines_used + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conservation(seed in any::<u64>(), level in 0usize..3, pick in proptest::collection::vec(any::<bool>(), 64)) {
        let level = &fixtures()[level];
        let pool = oracle_pool(level);
        let mines: Vec<Mine> = pool.into_iter().zip(pick).filter(|(_, k)| *k).map(|(m, _)| m).collect();
        let (state, r) = level.play(mines, seed).unwrap();
        prop_assert_eq!(state.phase, Phase::Finished);
        prop_assert_eq!(r.healthy_saved + r.healthy_trapped, level.critters);
        prop_assert_eq!((r.mutants_trapped + r.mutants_escaped) as usize, level.mutants.len());
        prop_assert_eq!(r.healthy_trapped, 0);
    }

    #[test]
    fn outcome_ignores_spawn_order(seed in any::<u64>(), level in 0usize..3, rot in 0usize..16) {
        let level = &fixtures()[level];
        let mines = level.analyze(DEFAULT_ROUTE_CAP).unwrap().minimal.mines;
        let config = level.game_config(mines, seed).unwrap();
        let n = config.population();
        let mut order = spawn_order(seed, n);
        let mut game = Game::new(config.clone()).unwrap();
        game.run();
        order.rotate_left(rot % n);
        order.reverse();
        let mut other = Game::with_spawn_order(config, order).unwrap();
        other.run();
        prop_assert_eq!(outcomes(game.state()), outcomes(other.state()));
    }

    #[test]
    fn audit_matches_score(seed in any::<u64>(), level in 0usize..3, pick in proptest::collection::vec(any::<bool>(), 64)) {
        let level = &fixtures()[level];
        let config = level.game_config(Vec::new(), seed).unwrap();
        let pool = oracle_pool(level);
        let mines: Vec<Mine> = pool.into_iter().zip(pick).filter(|(_, k)| *k).map(|(m, _)| m).collect();
        let used = mines.len() as u32;
        let (state, report) = level.play(mines, seed).unwrap();
        let audited = audit_events(&state.events, &ScoreRules::for_config(&config), used).unwrap();
        prop_assert_eq!(audited, report);
    }

    #[test]
    fn score_is_clamped_and_monotone(hs in 0u32..20, ht in 0u32..20, mt in 0u32..20, me in 0u32..20,
                                     budget in 0u32..10, used in 0u32..30, tick in 0u64..400) {
        let rules = ScoreRules { width: 16, height: 16, population: (hs + ht + mt + me) as usize, mine_budget: budget };
        let a = rules.report(hs, ht, mt, me, used, tick);
        let b = rules.report(hs, ht, mt, me, used + 1, tick);
        prop_assert!(b.total <= a.total);
        if used >= budget && a.total > 0 {
            prop_assert!(b.total < a.total);
        }
        let raw = 100 * mt as i64 + 20 * hs as i64 - 50 * ht as i64
            - 25 * (used as i64 - budget as i64).max(0) + a.time_bonus as i64;
        prop_assert_eq!(a.total as i64, raw.max(0));
    }
}

#[test]
fn game_rejects_ticks_after_finish() {
    let level = common::tutorial();
    let mut game = Game::new(level.game_config(vec![], 1).unwrap()).unwrap();
    assert_eq!(game.score(), Err(EngineError::GameNotFinished));
    game.run();
    assert_eq!(game.tick(), Err(EngineError::NotRunning));
}

#[test]
fn healthy_count_must_be_positive() {
    let level = common::tutorial();
    let mut config = level.game_config(vec![], 1).unwrap();
    config.n_healthy = 0;
    assert!(matches!(Game::new(config), Err(EngineError::InvalidConfig(_))));
}

#[test]
fn events_carry_post_loop_attributes() {
    let level = common::tutorial();
    let cut = Arc::new(level.cut.clone());
    let config = GameConfig {
        board: level.board.clone(),
        cut,
        mutants: vec![],
        n_healthy: 1,
        mine_budget: 0,
        mines: vec![],
        seed: 0,
    };
    let (state, _) = run_to_completion(config).unwrap();
    for e in &state.events {
        if let EventKind::Moved { to, attributes } = &e.kind {
            let dirt = level.board.texture(*to) == Some(Texture::Dirt);
            assert_eq!(attributes.shirt_color == Color::Blue, dirt, "{to}");
        }
    }
}
