//! Exhaustive, route-by-route reasoning about a level.
//!
//! Everything here works on the full enumeration of shortest routes, so a
//! result labelled GUARANTEED holds for whatever route the engine samples.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocklang::{
    eval_test, init_state, step_loop, Assert, Attr, CritterProgram, CritterState, Expr, TestProgram, Value,
};
use crate::board::{enumerate_routes, Board, BoardError, Pos, Route};
use crate::engine::Mine;
use crate::mutation::{Mutant, MutantId};

pub const DEFAULT_ROUTE_CAP: usize = 10_000;
/// Largest reduced candidate pool searched exactly.
pub const EXACT_POOL_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("more than {0} routes from spawn to tower")]
    RouteExplosion(usize),
    #[error("{0}")]
    Board(BoardError),
}

impl From<BoardError> for AnalysisError {
    fn from(e: BoardError) -> Self {
        match e {
            BoardError::RouteExplosion(cap) => AnalysisError::RouteExplosion(cap),
            other => AnalysisError::Board(other),
        }
    }
}

/// Post-loop state on each tile of `route`, in route order.
pub fn trace(board: &Board, program: &CritterProgram, route: &Route) -> Vec<CritterState> {
    let mut out = Vec::with_capacity(route.len());
    let mut state = init_state(program);
    for &p in route.tiles() {
        let input = board.tile_input(p).expect("route tile on board");
        state = step_loop(program, &state, &input);
        out.push(state.clone());
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateEnvelope {
    tiles: BTreeMap<Pos, BTreeSet<CritterState>>,
}

impl StateEnvelope {
    /// States seen at `p`; empty if no route visits it.
    pub fn get(&self, p: Pos) -> Option<&BTreeSet<CritterState>> {
        self.tiles.get(&p)
    }

    pub fn tiles(&self) -> impl Iterator<Item = (Pos, &BTreeSet<CritterState>)> {
        self.tiles.iter().map(|(p, s)| (*p, s))
    }
}

fn envelope_of(routes: &[Route], traces: &[Vec<CritterState>]) -> StateEnvelope {
    let mut tiles: BTreeMap<Pos, BTreeSet<CritterState>> = BTreeMap::new();
    for (route, states) in routes.iter().zip(traces) {
        for (&p, s) in route.tiles().iter().zip(states) {
            tiles.entry(p).or_default().insert(s.clone());
        }
    }
    StateEnvelope { tiles }
}

pub fn state_envelope(board: &Board, program: &CritterProgram, cap: usize) -> Result<StateEnvelope, AnalysisError> {
    let w = Workspace::new(board, cap)?;
    Ok(envelope_of(&w.routes, &w.traces(program)))
}

fn literal(v: Value) -> Expr {
    match v {
        Value::Int(n) => Expr::int(n),
        Value::Color(c) => Expr::color(c),
    }
}

fn oracle_at(envelope: &StateEnvelope, tile: Pos) -> Option<Mine> {
    let states = envelope.get(tile)?;
    let first = states.iter().next()?;
    let asserts: Vec<Assert> = Attr::ALL
        .iter()
        .filter(|&&a| states.iter().all(|s| s.attr(a) == first.attr(a)))
        .map(|&a| Assert::equals(a, literal(first.attr(a))))
        .collect();
    if asserts.is_empty() {
        return None;
    }
    Some(Mine {
        position: tile,
        test: TestProgram::asserting(asserts),
    })
}

/// A mine asserting every attribute the CUT holds constant at `tile`.
pub fn oracle_mine(board: &Board, cut: &CritterProgram, tile: Pos, cap: usize) -> Result<Option<Mine>, AnalysisError> {
    Ok(oracle_at(&state_envelope(board, cut, cap)?, tile))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Kill {
    Guaranteed,
    Possible,
    Never,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillMatrix {
    pub mines: Vec<Mine>,
    pub mutants: Vec<MutantId>,
    /// `cells[mine][mutant]`.
    pub cells: Vec<Vec<Kill>>,
}

impl KillMatrix {
    pub fn get(&self, mine: usize, mutant: usize) -> Kill {
        self.cells[mine][mutant]
    }
}

struct Workspace<'a> {
    board: &'a Board,
    routes: Vec<Route>,
}

impl<'a> Workspace<'a> {
    fn new(board: &'a Board, cap: usize) -> Result<Self, AnalysisError> {
        Ok(Workspace {
            board,
            routes: enumerate_routes(board, cap)?,
        })
    }

    fn traces(&self, program: &CritterProgram) -> Vec<Vec<CritterState>> {
        self.routes.iter().map(|r| trace(self.board, program, r)).collect()
    }

    /// Per route: does this mine alone trap a critter with these traces?
    fn trapped(&self, mine: &Mine, traces: &[Vec<CritterState>]) -> Vec<bool> {
        let input = self.board.tile_input(mine.position);
        self.routes
            .iter()
            .zip(traces)
            .map(|(route, states)| {
                match (route.tiles().iter().position(|&p| p == mine.position), input) {
                    (Some(i), Some(input)) => !eval_test(&mine.test, &states[i], &input).passed(),
                    _ => false,
                }
            })
            .collect()
    }

    fn oracle_pool(&self, cut: &CritterProgram) -> Vec<Mine> {
        let envelope = envelope_of(&self.routes, &self.traces(cut));
        self.board.walkable_positions().filter_map(|p| oracle_at(&envelope, p)).collect()
    }
}

fn classify(per_route: &[bool]) -> Kill {
    if !per_route.is_empty() && per_route.iter().all(|&k| k) {
        Kill::Guaranteed
    } else if per_route.iter().any(|&k| k) {
        Kill::Possible
    } else {
        Kill::Never
    }
}

pub fn kill_matrix(board: &Board, mutants: &[Mutant], mines: &[Mine], cap: usize) -> Result<KillMatrix, AnalysisError> {
    let w = Workspace::new(board, cap)?;
    Ok(kill_matrix_in(&w, mutants, mines))
}

fn kill_matrix_in(w: &Workspace, mutants: &[Mutant], mines: &[Mine]) -> KillMatrix {
    let traces: Vec<_> = mutants.iter().map(|m| w.traces(&m.program)).collect();
    KillMatrix {
        mines: mines.to_vec(),
        mutants: mutants.iter().map(|m| m.id.clone()).collect(),
        cells: mines
            .iter()
            .map(|mine| traces.iter().map(|t| classify(&w.trapped(mine, t))).collect())
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certificate {
    Exact,
    Heuristic,
    Unsolvable { missing: Vec<MutantId> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalSet {
    pub mines: Vec<Mine>,
    pub certificate: Certificate,
}

/// Fixed-width bitset over (mutant, route) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn has(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    fn union(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }

    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    fn count_new(&self, covered: &Bits) -> u32 {
        self.0.iter().zip(&covered.0).map(|(a, c)| (a & !c).count_ones()).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

/// Drops empty, duplicate and dominated candidates; keeps the earliest of
/// equals.
fn reduce(covers: &[Bits]) -> Vec<usize> {
    let mut keep = Vec::new();
    for (i, c) in covers.iter().enumerate() {
        if c.is_empty() {
            continue;
        }
        let dominated = covers.iter().enumerate().any(|(j, d)| {
            j != i && c.subset_of(d) && (c != d || j < i)
        });
        if !dominated {
            keep.push(i);
        }
    }
    keep
}

fn greedy(covers: &[Bits], pool: &[usize], target: &Bits) -> Vec<usize> {
    let mut covered = Bits::new(target.0.len() * 64);
    let mut chosen = Vec::new();
    while !target.subset_of(&covered) {
        let best = pool
            .iter()
            .copied()
            .filter(|i| !chosen.contains(i))
            .max_by_key(|&i| (covers[i].count_new(&covered), std::cmp::Reverse(i)));
        match best {
            Some(i) if covers[i].count_new(&covered) > 0 => {
                covered.union(&covers[i]);
                chosen.push(i);
            }
            _ => break,
        }
    }
    chosen
}

/// Exact cover search: branch on the candidates covering the first
/// uncovered element, prune at the best size found so far.
fn exact(covers: &[Bits], pool: &[usize], universe: usize) -> Vec<usize> {
    fn go(
        covers: &[Bits],
        pool: &[usize],
        universe: usize,
        covered: &Bits,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        let Some(e) = (0..universe).find(|&e| !covered.has(e)) else {
            if chosen.len() < best.len() {
                *best = chosen.clone();
            }
            return;
        };
        if chosen.len() + 1 >= best.len() {
            return;
        }
        for &i in pool.iter().filter(|&&i| covers[i].has(e)) {
            let mut next = covered.clone();
            next.union(&covers[i]);
            chosen.push(i);
            go(covers, pool, universe, &next, chosen, best);
            chosen.pop();
        }
    }
    let mut all = Bits::new(universe);
    (0..universe).for_each(|e| all.set(e));
    let mut best = greedy(covers, pool, &all);
    go(covers, pool, universe, &Bits::new(universe), &mut Vec::new(), &mut best);
    best.sort_unstable();
    best
}

pub fn minimal_mine_set(board: &Board, cut: &CritterProgram, mutants: &[Mutant], cap: usize) -> Result<MinimalSet, AnalysisError> {
    let w = Workspace::new(board, cap)?;
    let pool = w.oracle_pool(cut);
    Ok(minimal_in(&w, &pool, mutants))
}

fn minimal_in(w: &Workspace, pool: &[Mine], mutants: &[Mutant]) -> MinimalSet {
    let n_routes = w.routes.len();
    let universe = mutants.len() * n_routes;
    let traces: Vec<_> = mutants.iter().map(|m| w.traces(&m.program)).collect();
    let covers: Vec<Bits> = pool
        .iter()
        .map(|mine| {
            let mut b = Bits::new(universe);
            for (mi, t) in traces.iter().enumerate() {
                for (ri, hit) in w.trapped(mine, t).into_iter().enumerate() {
                    if hit {
                        b.set(mi * n_routes + ri);
                    }
                }
            }
            b
        })
        .collect();

    let mut reachable = Bits::new(universe);
    covers.iter().for_each(|c| reachable.union(c));
    let missing: Vec<MutantId> = mutants
        .iter()
        .enumerate()
        .filter(|(mi, _)| (0..n_routes).any(|ri| !reachable.has(mi * n_routes + ri)))
        .map(|(_, m)| m.id.clone())
        .collect();

    let reduced = reduce(&covers);
    let (chosen, certificate) = if !missing.is_empty() {
        (greedy(&covers, &reduced, &reachable), Certificate::Unsolvable { missing })
    } else if reduced.len() <= EXACT_POOL_LIMIT {
        (exact(&covers, &reduced, universe), Certificate::Exact)
    } else {
        (greedy(&covers, &reduced, &reachable), Certificate::Heuristic)
    };
    let mut chosen = chosen;
    chosen.sort_unstable();
    MinimalSet {
        mines: chosen.into_iter().map(|i| pool[i].clone()).collect(),
        certificate,
    }
}

/// Mutants whose observable attributes match the CUT's on every tile of every
/// route. No mine can tell them apart.
pub fn equivalent_mutants(board: &Board, cut: &CritterProgram, mutants: &[Mutant], cap: usize) -> Result<Vec<MutantId>, AnalysisError> {
    let w = Workspace::new(board, cap)?;
    Ok(equivalent_in(&w, cut, mutants))
}

fn observable(traces: &[Vec<CritterState>]) -> Vec<Vec<crate::blocklang::Attributes>> {
    traces.iter().map(|t| t.iter().map(CritterState::attributes).collect()).collect()
}

fn equivalent_in(w: &Workspace, cut: &CritterProgram, mutants: &[Mutant]) -> Vec<MutantId> {
    let reference = observable(&w.traces(cut));
    mutants
        .iter()
        .filter(|m| observable(&w.traces(&m.program)) == reference)
        .map(|m| m.id.clone())
        .collect()
}

pub fn suggested_difficulty(set: &MinimalSet) -> u8 {
    match (&set.certificate, set.mines.len()) {
        (Certificate::Unsolvable { .. }, _) => 5,
        (_, 0..=1) => 1,
        (_, 2) => 2,
        (_, 3) => 3,
        (_, 4..=5) => 4,
        _ => 5,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub routes: usize,
    pub kill_matrix: KillMatrix,
    pub minimal: MinimalSet,
    pub equivalent: Vec<MutantId>,
    pub suggested_difficulty: u8,
}

/// Full report: kill matrix over the oracle pool, minimal set, equivalents.
pub fn analyze(board: &Board, cut: &CritterProgram, mutants: &[Mutant], cap: usize) -> Result<AnalysisReport, AnalysisError> {
    let w = Workspace::new(board, cap)?;
    let pool = w.oracle_pool(cut);
    let minimal = minimal_in(&w, &pool, mutants);
    Ok(AnalysisReport {
        routes: w.routes.len(),
        kill_matrix: kill_matrix_in(&w, mutants, &pool),
        suggested_difficulty: suggested_difficulty(&minimal),
        equivalent: equivalent_in(&w, cut, mutants),
        minimal,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::blocklang::*;
    use crate::mutation::{make_mutant, Edit, Literal, Mutation, MutationClass};

    fn shirt_cut() -> Arc<CritterProgram> {
        Arc::new(CritterProgram::new(
            vec![Stmt::set_attr(Attr::ShirtColor, Expr::color(Color::Red))],
            vec![Stmt::if_then(
                BoolExpr::texture_is(Texture::Dirt),
                vec![Stmt::set_attr(Attr::ShirtColor, Expr::color(Color::Blue))],
            )],
        ))
    }

    fn init_green() -> Mutation {
        Mutation::new(
            MutationClass::Initialization,
            NodePath::new(Section::Init, [0, 0]),
            Edit::ReplaceValue {
                value: Literal::Color(Color::Green),
            },
        )
    }

    fn cond_ice() -> Mutation {
        Mutation::new(
            MutationClass::Condition,
            NodePath::new(Section::Loop, [0, 0]),
            Edit::ReplaceValue {
                value: Literal::Texture(Texture::Ice),
            },
        )
    }

    fn strip() -> Board {
        Board::from_rows(&["GDD"], Pos::new(1, 1), Pos::new(3, 1)).unwrap()
    }

    fn shirt(states: &BTreeSet<CritterState>) -> Vec<Color> {
        states.iter().map(|s| s.shirt_color).collect()
    }

    #[test]
    fn envelope_on_strip() {
        let e = state_envelope(&strip(), &shirt_cut(), 10).unwrap();
        assert_eq!(shirt(e.get(Pos::new(1, 1)).unwrap()), vec![Color::Red]);
        assert_eq!(shirt(e.get(Pos::new(2, 1)).unwrap()), vec![Color::Blue]);
    }

    #[test]
    fn empty_loop_envelope_is_init_state() {
        let p = CritterProgram::new(vec![Stmt::set_attr(Attr::Size, Expr::int(4))], vec![]);
        let e = state_envelope(&strip(), &p, 10).unwrap();
        let init = init_state(&p);
        assert!(e.tiles().all(|(_, s)| s.len() == 1 && s.contains(&init)));
    }

    #[test]
    fn route_dependent_size() {
        // size := size + x over the 2x2 board; both routes visit x=1,?,2.
        let p = CritterProgram::new(
            vec![],
            vec![Stmt::set_attr(
                Attr::Size,
                Expr::binop(ArithOp::Add, Expr::attr(Attr::Size), Expr::input(Input::X)),
            )],
        );
        let b = Board::from_rows(&["GG", "GG"], Pos::new(1, 1), Pos::new(2, 2)).unwrap();
        let e = state_envelope(&b, &p, 10).unwrap();
        // Oracle: route A (1,1)(2,1)(2,2) gives 1+1+2+2 = 6; route B (1,1)(1,2)(2,2) gives 1+1+1+2 = 5.
        let sizes: Vec<i64> = e.get(Pos::new(2, 2)).unwrap().iter().map(|s| s.size).collect();
        assert_eq!(sizes, vec![5, 6]);
        let mine = oracle_mine(&b, &p, Pos::new(2, 2), 10).unwrap().unwrap();
        assert!(mine.test.asserts.iter().all(|a| a.property != Attr::Size));
    }

    #[test]
    fn oracle_on_dirt_asserts_blue() {
        let mine = oracle_mine(&strip(), &shirt_cut(), Pos::new(2, 1), 10).unwrap().unwrap();
        assert_eq!(
            mine.test.asserts,
            vec![
                Assert::equals(Attr::ShirtColor, Expr::color(Color::Blue)),
                Assert::equals(Attr::HairColor, Expr::color(Color::Brown)),
                Assert::equals(Attr::Size, Expr::int(1)),
            ]
        );
    }

    #[test]
    fn oracle_off_route_is_none() {
        let b = Board::from_rows(&["GDD", "GGG"], Pos::new(1, 1), Pos::new(3, 1)).unwrap();
        assert_eq!(oracle_mine(&b, &shirt_cut(), Pos::new(2, 2), 10).unwrap(), None);
    }

    #[test]
    fn kill_cells() {
        let cut = shirt_cut();
        let two_edit = make_mutant(cut.clone(), vec![init_green(), cond_ice()]).unwrap();
        let ice_only = make_mutant(cut.clone(), vec![cond_ice()]).unwrap();
        let b = Board::from_rows(&["GGDD"], Pos::new(1, 1), Pos::new(4, 1)).unwrap();
        let dirt = oracle_mine(&b, &cut, Pos::new(3, 1), 10).unwrap().unwrap();
        let grass = oracle_mine(&b, &cut, Pos::new(2, 1), 10).unwrap().unwrap();
        let km = kill_matrix(&b, &[two_edit, ice_only], &[dirt, grass], 10).unwrap();
        assert_eq!(km.get(0, 0), Kill::Guaranteed);
        assert_eq!(km.get(0, 1), Kill::Guaranteed);
        assert_eq!(km.get(1, 0), Kill::Guaranteed);
        // An ICE-only condition never matters on grass.
        assert_eq!(km.get(1, 1), Kill::Never);
    }

    #[test]
    fn possible_on_one_branch() {
        // Two routes around the wood block: top via dirt, bottom via grass.
        let b = Board::from_rows(&["GDG", "GOG", "GGG"], Pos::new(1, 1), Pos::new(3, 3)).unwrap();
        let cut = shirt_cut();
        let m = make_mutant(cut.clone(), vec![cond_ice()]).unwrap();
        let dirt = oracle_mine(&b, &cut, Pos::new(2, 1), 10).unwrap().unwrap();
        let km = kill_matrix(&b, &[m], &[dirt], 10).unwrap();
        assert_eq!(km.get(0, 0), Kill::Possible);
    }

    #[test]
    fn dominating_mine_is_chosen_alone() {
        let cut = shirt_cut();
        let b = Board::from_rows(&["GGDD"], Pos::new(1, 1), Pos::new(4, 1)).unwrap();
        let two_edit = make_mutant(cut.clone(), vec![init_green(), cond_ice()]).unwrap();
        let set = minimal_mine_set(&b, &cut, &[two_edit], 10).unwrap();
        assert_eq!(set.certificate, Certificate::Exact);
        assert_eq!(set.mines.len(), 1);
    }

    #[test]
    fn two_mines_needed_for_separate_mutants() {
        let cut = shirt_cut();
        let b = Board::from_rows(&["GGDD"], Pos::new(1, 1), Pos::new(4, 1)).unwrap();
        let a = make_mutant(cut.clone(), vec![init_green()]).unwrap();
        let c = make_mutant(cut.clone(), vec![cond_ice()]).unwrap();
        let set = minimal_mine_set(&b, &cut, &[a, c], 10).unwrap();
        assert_eq!(set.certificate, Certificate::Exact);
        let textures: Vec<Texture> = set.mines.iter().map(|m| b.texture(m.position).unwrap()).collect();
        assert_eq!(textures, vec![Texture::Grass, Texture::Dirt]);
    }

    #[test]
    fn equivalent_mutant_is_unsolvable() {
        let cut = shirt_cut();
        let b = Board::from_rows(&["GGG"], Pos::new(1, 1), Pos::new(3, 1)).unwrap();
        let m = make_mutant(cut.clone(), vec![cond_ice()]).unwrap();
        assert_eq!(equivalent_mutants(&b, &cut, std::slice::from_ref(&m), 10).unwrap(), vec![m.id.clone()]);
        let set = minimal_mine_set(&b, &cut, std::slice::from_ref(&m), 10).unwrap();
        assert_eq!(set.certificate, Certificate::Unsolvable { missing: vec![m.id] });
    }

    #[test]
    fn exact_matches_subset_brute_force() {
        // Hand-built covers over 6 elements; optimum is {1, 3}.
        let mk = |els: &[usize]| {
            let mut b = Bits::new(6);
            els.iter().for_each(|&e| b.set(e));
            b
        };
        let covers = vec![mk(&[0, 1]), mk(&[0, 1, 2]), mk(&[2, 3]), mk(&[3, 4, 5]), mk(&[5])];
        let pool: Vec<usize> = (0..covers.len()).collect();
        let got = exact(&covers, &pool, 6);
        let mut brute = usize::MAX;
        for mask in 0u32..(1 << covers.len()) {
            let mut u = Bits::new(6);
            (0..covers.len()).filter(|i| mask & (1 << i) != 0).for_each(|i| u.union(&covers[i]));
            if (0..6).all(|e| u.has(e)) {
                brute = brute.min(mask.count_ones() as usize);
            }
        }
        assert_eq!(got.len(), brute);
        assert_eq!(got, vec![1, 3]);
    }

    #[test]
    fn explosion_is_reported() {
        let b = Board::from_rows(&["GGGG", "GGGG", "GGGG", "GGGG"], Pos::new(1, 1), Pos::new(4, 4)).unwrap();
        assert_eq!(state_envelope(&b, &shirt_cut(), 5), Err(AnalysisError::RouteExplosion(5)));
    }
}
