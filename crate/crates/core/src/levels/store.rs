use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{fixtures, has_errors, valid_id, validate, Category, CategoryGroup, Level, LevelError};
use crate::blocklang::{from_json, to_json_pretty};
use crate::engine::{Mine, ScoreReport};

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Writes `bytes` to a sibling temp file, syncs it, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("doc");
    let tmp = dir.join(format!(
        ".{name}.{}.{}.tmp",
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LeaderboardEntry {
    pub player: String,
    pub score: u64,
    pub games_played: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GameRecord {
    pub player: String,
    pub game_id: String,
    pub level_id: String,
    pub seed: u64,
    pub mines: Vec<Mine>,
    pub report: ScoreReport,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leaderboard {
    pub entries: Vec<LeaderboardEntry>,
    pub games: Vec<GameRecord>,
}

impl Leaderboard {
    /// Highest score first, ties by name.
    pub fn sorted(mut self) -> Self {
        self.entries
            .sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.player.cmp(&b.player)));
        self
    }

    /// True when every entry equals the sum of its recorded games.
    pub fn audit(&self) -> bool {
        let mut sums: BTreeMap<&str, (u64, u32)> = BTreeMap::new();
        for g in &self.games {
            let s = sums.entry(&g.player).or_default();
            s.0 += g.report.total;
            s.1 += 1;
        }
        self.entries.len() == sums.len()
            && self
                .entries
                .iter()
                .all(|e| sums.get(e.player.as_str()) == Some(&(e.score, e.games_played)))
    }

    /// Best single game per player on one level, sorted like `sorted`.
    /// `games_played` counts that player's games on the level.
    pub fn level_bests(&self, level_id: &str) -> Vec<LeaderboardEntry> {
        let mut best: BTreeMap<&str, (u64, u32)> = BTreeMap::new();
        for g in self.games.iter().filter(|g| g.level_id == level_id) {
            let b = best.entry(&g.player).or_default();
            b.0 = b.0.max(g.report.total);
            b.1 += 1;
        }
        let entries = best
            .into_iter()
            .map(|(player, (score, games_played))| LeaderboardEntry {
                player: player.to_string(),
                score,
                games_played,
            })
            .collect();
        Leaderboard {
            entries,
            games: Vec::new(),
        }
        .sorted()
        .entries
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreSubmission {
    pub player: String,
    pub game_id: String,
    pub level_id: String,
    pub seed: u64,
    pub mines: Vec<Mine>,
    /// The report the submitter claims; checked against a fresh replay.
    pub claimed: ScoreReport,
}

/// File-backed store: `levels/<id>.json`, `leaderboard.json` and arbitrary
/// per-kind documents such as `games/<id>.json`.
#[derive(Debug)]
pub struct LevelStore {
    root: PathBuf,
    write: Mutex<()>,
}

impl LevelStore {
    /// Opens (creating if needed) a store. A store without a levels
    /// directory is seeded with the bundled fixtures.
    pub fn open(root: impl Into<PathBuf>) -> Result<LevelStore, LevelError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        let store = LevelStore {
            root,
            write: Mutex::new(()),
        };
        let levels = store.levels_dir();
        if !levels.exists() {
            fs::create_dir_all(&levels)?;
            for level in fixtures() {
                write_atomic(&store.level_path(&level.id), to_json_pretty(&level).as_bytes())?;
            }
        }
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn levels_dir(&self) -> PathBuf {
        self.root.join("levels")
    }

    fn level_path(&self, id: &str) -> PathBuf {
        self.levels_dir().join(format!("{id}.json"))
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, ()> {
        self.write.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn save(&self, level: &Level) -> Result<(), LevelError> {
        let issues = validate(level);
        if has_errors(&issues) {
            return Err(LevelError::ValidationFailed(issues));
        }
        let _guard = self.lock();
        write_atomic(&self.level_path(&level.id), to_json_pretty(level).as_bytes())?;
        Ok(())
    }

    pub fn load(&self, id: &str) -> Result<Level, LevelError> {
        if !valid_id(id) {
            return Err(LevelError::NotFound(id.to_string()));
        }
        match fs::read_to_string(self.level_path(id)) {
            Ok(doc) => Ok(Level::from_json(&doc)?),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(LevelError::NotFound(id.to_string())),
            Err(e) => Err(e.into()),
        }
    }

    pub fn delete(&self, id: &str) -> Result<(), LevelError> {
        if !valid_id(id) {
            return Err(LevelError::NotFound(id.to_string()));
        }
        let _guard = self.lock();
        match fs::remove_file(self.level_path(id)) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(LevelError::NotFound(id.to_string())),
            Err(e) => Err(e.into()),
        }
    }

    pub fn list(&self) -> Result<Vec<CategoryGroup>, LevelError> {
        let mut levels = Vec::new();
        for entry in fs::read_dir(self.levels_dir())? {
            let path = entry?.path();
            let Some(id) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".json"))
            else {
                continue;
            };
            if valid_id(id) {
                levels.push(self.load(id)?.summary());
            }
        }
        levels.sort_by(|a, b| (a.difficulty, &a.id).cmp(&(b.difficulty, &b.id)));
        Ok(Category::ALL
            .iter()
            .map(|&category| CategoryGroup {
                category,
                levels: levels.iter().filter(|l| l.category == category).cloned().collect(),
            })
            .collect())
    }

    fn leaderboard_path(&self) -> PathBuf {
        self.root.join("leaderboard.json")
    }

    fn read_leaderboard(&self) -> Result<Leaderboard, LevelError> {
        match fs::read_to_string(self.leaderboard_path()) {
            Ok(doc) => Ok(from_json(&doc)?),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Leaderboard::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn leaderboard(&self) -> Result<Leaderboard, LevelError> {
        Ok(self.read_leaderboard()?.sorted())
    }

    /// Re-runs the game from its level, mines and seed and credits the
    /// player with the replayed total. Resubmitting a game id is a no-op.
    pub fn submit_score(&self, s: &ScoreSubmission) -> Result<LeaderboardEntry, LevelError> {
        let player = s.player.trim();
        if player.is_empty() || player.chars().count() > 64 {
            return Err(LevelError::InvalidPlayer(s.player.clone()));
        }
        let level = match self.load(&s.level_id) {
            Err(LevelError::NotFound(id)) => return Err(LevelError::UnknownLevel(id)),
            other => other?,
        };
        let (_, actual) = level.play(s.mines.clone(), s.seed)?;
        if actual != s.claimed {
            return Err(LevelError::ReplayMismatch {
                claimed: Box::new(s.claimed),
                actual: Box::new(actual),
            });
        }

        let _guard = self.lock();
        let mut board = self.read_leaderboard()?;
        let seen = board.games.iter().any(|g| g.player == player && g.game_id == s.game_id);
        if !seen {
            board.games.push(GameRecord {
                player: player.to_string(),
                game_id: s.game_id.clone(),
                level_id: s.level_id.clone(),
                seed: s.seed,
                mines: s.mines.clone(),
                report: actual,
            });
            match board.entries.iter_mut().find(|e| e.player == player) {
                Some(e) => {
                    e.score += actual.total;
                    e.games_played += 1;
                }
                None => board.entries.push(LeaderboardEntry {
                    player: player.to_string(),
                    score: actual.total,
                    games_played: 1,
                }),
            }
            write_atomic(&self.leaderboard_path(), to_json_pretty(&board).as_bytes())?;
        }
        Ok(board
            .entries
            .into_iter()
            .find(|e| e.player == player)
            .expect("entry exists after submission"))
    }

    fn doc_path(&self, kind: &str, id: &str) -> Option<PathBuf> {
        (valid_id(kind) && valid_id(id)).then(|| self.root.join(kind).join(format!("{id}.json")))
    }

    /// Stores an auxiliary document, e.g. a finished game session.
    pub fn put_document<T: Serialize>(&self, kind: &str, id: &str, doc: &T) -> Result<(), LevelError> {
        let path = self.doc_path(kind, id).ok_or_else(|| LevelError::InvalidId(id.to_string()))?;
        let _guard = self.lock();
        fs::create_dir_all(path.parent().expect("kind directory"))?;
        write_atomic(&path, to_json_pretty(doc).as_bytes())?;
        Ok(())
    }

    pub fn get_document<T: DeserializeOwned>(&self, kind: &str, id: &str) -> Result<Option<T>, LevelError> {
        let Some(path) = self.doc_path(kind, id) else {
            return Ok(None);
        };
        match fs::read_to_string(path) {
            Ok(doc) => Ok(Some(from_json(&doc)?)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}
