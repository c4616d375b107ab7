//! Board geometry, reachability and route generation.
//!
//! Routes always descend the BFS distance field towards the tower, so every
//! route has exactly `distance(spawn) + 1` tiles and the set of routes is
//! finite and enumerable.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocklang::{Texture, TileInput};

pub const DEFAULT_SIZE: usize = 16;
pub const MAX_SIZE: usize = 32;

/// 1-based tile coordinates. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct Pos {
    pub x: u32,
    pub y: u32,
}

impl Pos {
    pub const fn new(x: u32, y: u32) -> Self {
        Pos { x, y }
    }
}

impl From<(u32, u32)> for Pos {
    fn from((x, y): (u32, u32)) -> Self {
        Pos { x, y }
    }
}

impl From<Pos> for (u32, u32) {
    fn from(p: Pos) -> Self {
        (p.x, p.y)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("board dimensions {width}x{height} outside 1..={MAX_SIZE}")]
    Dimensions { width: usize, height: usize },
    #[error("expected {expected} tile rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row} has {found} tiles, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("unknown texture code {code:?} in row {row}")]
    TextureCode { row: usize, code: char },
    #[error("declared size {declared:?} does not match tile rows {actual:?}")]
    DeclaredSize {
        declared: (usize, usize),
        actual: (usize, usize),
    },
    #[error("{0} is outside the board")]
    OutOfBounds(Pos),
    #[error("spawn and tower are the same tile")]
    SpawnIsTower,
    #[error("no walkable route from spawn to tower")]
    NoRoute,
    #[error("more than {0} routes")]
    RouteExplosion(usize),
}

/// Wire shape: `{width, height, tiles: ["GGDW..", ...], spawn: [x,y], tower: [x,y]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoardDoc {
    width: usize,
    height: usize,
    tiles: Vec<String>,
    spawn: Pos,
    tower: Pos,
}

/// A rectangular grid of textured tiles with a spawn point and a tower.
///
/// Construction only enforces structure (dimensions, codes, coordinates in
/// bounds, spawn distinct from tower). Walkability of spawn and tower is a
/// level-validation concern so that editors can hold broken boards.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BoardDoc", into = "BoardDoc")]
pub struct Board {
    width: usize,
    height: usize,
    tiles: Vec<Texture>,
    spawn: Pos,
    tower: Pos,
}

impl TryFrom<BoardDoc> for Board {
    type Error = BoardError;

    fn try_from(doc: BoardDoc) -> Result<Self, Self::Error> {
        let rows: Vec<&str> = doc.tiles.iter().map(String::as_str).collect();
        let board = Board::from_rows(&rows, doc.spawn, doc.tower)?;
        if board.width != doc.width || board.height != doc.height {
            return Err(BoardError::DeclaredSize {
                declared: (doc.width, doc.height),
                actual: (board.width, board.height),
            });
        }
        Ok(board)
    }
}

impl From<Board> for BoardDoc {
    fn from(b: Board) -> Self {
        BoardDoc {
            width: b.width,
            height: b.height,
            tiles: b.rows(),
            spawn: b.spawn,
            tower: b.tower,
        }
    }
}

impl Board {
    pub fn new(width: usize, height: usize, tiles: Vec<Texture>, spawn: Pos, tower: Pos) -> Result<Self, BoardError> {
        if !(1..=MAX_SIZE).contains(&width) || !(1..=MAX_SIZE).contains(&height) {
            return Err(BoardError::Dimensions { width, height });
        }
        if tiles.len() != width * height {
            return Err(BoardError::RowCount {
                expected: height,
                found: tiles.len() / width,
            });
        }
        let board = Board {
            width,
            height,
            tiles,
            spawn,
            tower,
        };
        for p in [spawn, tower] {
            if !board.in_bounds(p) {
                return Err(BoardError::OutOfBounds(p));
            }
        }
        if spawn == tower {
            return Err(BoardError::SpawnIsTower);
        }
        Ok(board)
    }

    /// Builds a board from row strings (top row is `y = 1`).
    pub fn from_rows(rows: &[&str], spawn: Pos, tower: Pos) -> Result<Self, BoardError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        if !(1..=MAX_SIZE).contains(&width) || !(1..=MAX_SIZE).contains(&height) {
            return Err(BoardError::Dimensions { width, height });
        }
        let mut tiles = Vec::with_capacity(width * height);
        for (i, row) in rows.iter().enumerate() {
            let found = row.chars().count();
            if found != width {
                return Err(BoardError::RowLength {
                    row: i + 1,
                    expected: width,
                    found,
                });
            }
            for code in row.chars() {
                tiles.push(Texture::from_code(code).ok_or(BoardError::TextureCode { row: i + 1, code })?);
            }
        }
        Board::new(width, height, tiles, spawn, tower)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn spawn(&self) -> Pos {
        self.spawn
    }

    pub fn tower(&self) -> Pos {
        self.tower
    }

    pub fn rows(&self) -> Vec<String> {
        self.tiles
            .chunks(self.width)
            .map(|row| row.iter().map(|t| t.code()).collect())
            .collect()
    }

    pub fn in_bounds(&self, p: Pos) -> bool {
        (1..=self.width as u32).contains(&p.x) && (1..=self.height as u32).contains(&p.y)
    }

    fn index(&self, p: Pos) -> Option<usize> {
        self.in_bounds(p)
            .then(|| (p.y as usize - 1) * self.width + (p.x as usize - 1))
    }

    pub fn texture(&self, p: Pos) -> Option<Texture> {
        self.index(p).map(|i| self.tiles[i])
    }

    pub fn is_walkable(&self, p: Pos) -> bool {
        self.texture(p).is_some_and(walkable)
    }

    /// Input handed to a loop body or test when a critter is on `p`.
    pub fn tile_input(&self, p: Pos) -> Option<TileInput> {
        self.texture(p).map(|texture| TileInput {
            texture,
            x: p.x as i64,
            y: p.y as i64,
        })
    }

    /// All positions in row-major order.
    pub fn positions(&self) -> impl Iterator<Item = Pos> + '_ {
        (1..=self.height as u32).flat_map(move |y| (1..=self.width as u32).map(move |x| Pos::new(x, y)))
    }

    pub fn walkable_positions(&self) -> impl Iterator<Item = Pos> + '_ {
        self.positions().filter(|&p| self.is_walkable(p))
    }

    /// In-bounds 4-neighbors in the fixed order +x, -x, +y, -y.
    pub fn neighbors(&self, p: Pos) -> impl Iterator<Item = Pos> + '_ {
        let candidates = [
            Some(Pos::new(p.x + 1, p.y)),
            p.x.checked_sub(1).map(|x| Pos::new(x, p.y)),
            Some(Pos::new(p.x, p.y + 1)),
            p.y.checked_sub(1).map(|y| Pos::new(p.x, y)),
        ];
        candidates.into_iter().flatten().filter(|&q| self.in_bounds(q))
    }

    pub fn with_texture(&self, p: Pos, texture: Texture) -> Board {
        let mut b = self.clone();
        if let Some(i) = b.index(p) {
            b.tiles[i] = texture;
        }
        b
    }
}

pub fn walkable(t: Texture) -> bool {
    t.is_walkable()
}

/// BFS hop distance to the tower over walkable tiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    width: usize,
    dist: Vec<Option<u32>>,
}

impl DistanceField {
    pub fn get(&self, p: Pos) -> Option<u32> {
        if p.x == 0 || p.y == 0 || p.x as usize > self.width {
            return None;
        }
        let i = (p.y as usize - 1) * self.width + (p.x as usize - 1);
        self.dist.get(i).copied().flatten()
    }

    /// Row-major distances, `None` for unreachable tiles.
    pub fn as_slice(&self) -> &[Option<u32>] {
        &self.dist
    }
}

pub fn distance_field(board: &Board) -> DistanceField {
    let mut dist = vec![None; board.width * board.height];
    let mut queue = VecDeque::new();
    if board.is_walkable(board.tower) {
        dist[board.index(board.tower).unwrap()] = Some(0);
        queue.push_back(board.tower);
    }
    while let Some(p) = queue.pop_front() {
        let d = dist[board.index(p).unwrap()].unwrap();
        for q in board.neighbors(p) {
            let i = board.index(q).unwrap();
            if dist[i].is_none() && board.is_walkable(q) {
                dist[i] = Some(d + 1);
                queue.push_back(q);
            }
        }
    }
    DistanceField {
        width: board.width,
        dist,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Route(pub Vec<Pos>);

impl Route {
    pub fn tiles(&self) -> &[Pos] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: Pos) -> bool {
        self.0.contains(&p)
    }
}

fn descending<'a>(board: &'a Board, field: &'a DistanceField, p: Pos) -> impl Iterator<Item = Pos> + 'a {
    let d = field.get(p);
    board
        .neighbors(p)
        .filter(move |&q| matches!((d, field.get(q)), (Some(d), Some(e)) if e + 1 == d))
}

/// Samples a route by stepping to a uniformly chosen descending neighbor.
pub fn random_route<R: Rng + ?Sized>(board: &Board, rng: &mut R) -> Result<Route, BoardError> {
    random_route_in(board, &distance_field(board), rng)
}

/// As [`random_route`] with a precomputed distance field.
pub fn random_route_in<R: Rng + ?Sized>(
    board: &Board,
    field: &DistanceField,
    rng: &mut R,
) -> Result<Route, BoardError> {
    let mut p = board.spawn;
    if field.get(p).is_none() {
        return Err(BoardError::NoRoute);
    }
    let mut tiles = vec![p];
    let mut options = Vec::with_capacity(4);
    while p != board.tower {
        options.clear();
        options.extend(descending(board, field, p));
        p = options[rng.random_range(0..options.len())];
        tiles.push(p);
    }
    Ok(Route(tiles))
}

/// Number of descending routes, saturating.
pub fn count_routes(board: &Board, field: &DistanceField) -> u128 {
    let Some(start) = field.get(board.spawn) else {
        return 0;
    };
    // ways[p] = number of descending paths from p to the tower, filled by
    // increasing distance.
    let mut by_distance: Vec<Pos> = board.positions().filter(|&p| field.get(p).is_some_and(|d| d <= start)).collect();
    by_distance.sort_by_key(|&p| field.get(p));
    let mut ways = vec![0u128; board.width * board.height];
    for p in by_distance {
        let i = board.index(p).unwrap();
        ways[i] = if p == board.tower {
            1
        } else {
            descending(board, field, p)
                .map(|q| ways[board.index(q).unwrap()])
                .fold(0u128, u128::saturating_add)
        };
    }
    ways[board.index(board.spawn).unwrap()]
}

/// All descending routes in neighbor order (+x, -x, +y, -y at each branch).
pub fn enumerate_routes(board: &Board, cap: usize) -> Result<Vec<Route>, BoardError> {
    let field = distance_field(board);
    if field.get(board.spawn).is_none() {
        return Err(BoardError::NoRoute);
    }
    if count_routes(board, &field) > cap as u128 {
        return Err(BoardError::RouteExplosion(cap));
    }
    let mut out = Vec::new();
    let mut stack = vec![board.spawn];
    walk(board, &field, &mut stack, &mut out);
    Ok(out)
}

fn walk(board: &Board, field: &DistanceField, stack: &mut Vec<Pos>, out: &mut Vec<Route>) {
    let p = *stack.last().unwrap();
    if p == board.tower {
        out.push(Route(stack.clone()));
        return;
    }
    for q in descending(board, field, p) {
        stack.push(q);
        walk(board, field, stack, out);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn strip() -> Board {
        Board::from_rows(&["DDD"], Pos::new(1, 1), Pos::new(3, 1)).unwrap()
    }

    fn square() -> Board {
        Board::from_rows(&["GG", "GG"], Pos::new(1, 1), Pos::new(2, 2)).unwrap()
    }

    #[test]
    fn walkability() {
        assert!(walkable(Texture::Grass));
        assert!(!walkable(Texture::Water));
        assert!(walkable(Texture::Ice));
        assert!(walkable(Texture::Dirt));
        assert!(!walkable(Texture::Wood));
    }

    #[test]
    fn strip_distances() {
        let f = distance_field(&strip());
        assert_eq!(f.as_slice(), &[Some(2), Some(1), Some(0)]);
        let wet = Board::from_rows(&["DWD"], Pos::new(1, 1), Pos::new(3, 1)).unwrap();
        let f = distance_field(&wet);
        assert_eq!(f.as_slice(), &[None, None, Some(0)]);
        assert_eq!(random_route(&wet, &mut ChaCha8Rng::seed_from_u64(0)), Err(BoardError::NoRoute));
    }

    #[test]
    fn strip_route_is_unique() {
        let r = random_route(&strip(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(r.0, vec![Pos::new(1, 1), Pos::new(2, 1), Pos::new(3, 1)]);
        assert_eq!(enumerate_routes(&strip(), 10).unwrap(), vec![r]);
    }

    #[test]
    fn square_has_two_routes_in_neighbor_order() {
        let routes = enumerate_routes(&square(), 10).unwrap();
        assert_eq!(
            routes,
            vec![
                Route(vec![Pos::new(1, 1), Pos::new(2, 1), Pos::new(2, 2)]),
                Route(vec![Pos::new(1, 1), Pos::new(1, 2), Pos::new(2, 2)]),
            ]
        );
        assert_eq!(enumerate_routes(&square(), 1), Err(BoardError::RouteExplosion(1)));
    }

    #[test]
    fn same_seed_same_route() {
        let a = random_route(&square(), &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = random_route(&square(), &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn route_frequencies_are_balanced() {
        let routes = enumerate_routes(&square(), 10).unwrap();
        let field = distance_field(&square());
        let n = 10_000;
        let first = (0..n)
            .filter(|&seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                random_route_in(&square(), &field, &mut rng).unwrap() == routes[0]
            })
            .count();
        let p = first as f64 / n as f64;
        assert!((p - 0.5).abs() <= 0.05, "p = {p}");
    }

    #[test]
    fn open_field_route_count() {
        // Monotone lattice paths on a 4x4 grid: C(6,3) = 20.
        let b = Board::from_rows(&["GGGG"; 4], Pos::new(1, 1), Pos::new(4, 4)).unwrap();
        assert_eq!(count_routes(&b, &distance_field(&b)), 20);
        assert_eq!(enumerate_routes(&b, 100).unwrap().len(), 20);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            Board::from_rows(&["GG", "G"], Pos::new(1, 1), Pos::new(2, 1)),
            Err(BoardError::RowLength { row: 2, .. })
        ));
        assert!(matches!(
            Board::from_rows(&["GX"], Pos::new(1, 1), Pos::new(2, 1)),
            Err(BoardError::TextureCode { code: 'X', .. })
        ));
        assert_eq!(
            Board::from_rows(&["GG"], Pos::new(1, 1), Pos::new(1, 1)),
            Err(BoardError::SpawnIsTower)
        );
        assert_eq!(
            Board::from_rows(&["GG"], Pos::new(1, 1), Pos::new(3, 1)),
            Err(BoardError::OutOfBounds(Pos::new(3, 1)))
        );
        let wide = "G".repeat(33);
        assert!(matches!(
            Board::from_rows(&[&wide], Pos::new(1, 1), Pos::new(2, 1)),
            Err(BoardError::Dimensions { .. })
        ));
    }

    #[test]
    fn board_document() {
        let b = square();
        let doc = serde_json::to_string(&b).unwrap();
        assert_eq!(doc, r#"{"width":2,"height":2,"tiles":["GG","GG"],"spawn":[1,1],"tower":[2,2]}"#);
        assert_eq!(serde_json::from_str::<Board>(&doc).unwrap(), b);
        assert!(serde_json::from_str::<Board>(r#"{"width":3,"height":2,"tiles":["GG","GG"],"spawn":[1,1],"tower":[2,2]}"#).is_err());
    }
}
