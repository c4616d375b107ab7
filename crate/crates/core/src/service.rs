//! HTTP API over the level store and the engine.
//!
//! Games run to completion inside the request that creates them; the client
//! only ever replays the returned event log.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tower_http::services::ServeDir;

use crate::analysis::{AnalysisError, DEFAULT_ROUTE_CAP};
use crate::blocklang::{from_json, palette, to_json, DecodeError};
use crate::engine::{check_mines, EngineError, Event, Mine, ScoreReport};
use crate::levels::{validate, Issue, Level, LevelError, LevelStore, ScoreSubmission};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SessionStatus {
    Created,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GameSession {
    pub game_id: String,
    pub level_id: String,
    pub seed: u64,
    pub mines: Vec<Mine>,
    pub status: SessionStatus,
    pub events: Vec<Event>,
    pub report: Option<ScoreReport>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewGame {
    pub level_id: String,
    #[serde(default)]
    pub mines: Vec<Mine>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewScore {
    pub player: String,
    pub game_id: String,
    /// Optional report the client believes it earned; rejected if the
    /// server replay disagrees.
    pub report: Option<ScoreReport>,
}

/// Uniform error body: `{code, message, details}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub details: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            details: Value::Null,
        }
    }

    fn with(mut self, details: impl Serialize) -> Self {
        self.details = serde_json::to_value(details).unwrap_or(Value::Null);
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"code": self.code, "message": self.message, "details": self.details});
        (self.status, [(header::CONTENT_TYPE, "application/json")], body.to_string()).into_response()
    }
}

impl From<DecodeError> for ApiError {
    fn from(e: DecodeError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", e.to_string()).with(&e)
    }
}

impl From<LevelError> for ApiError {
    fn from(e: LevelError) -> Self {
        use StatusCode as S;
        let message = e.to_string();
        match e {
            LevelError::NotFound(_) => ApiError::new(S::NOT_FOUND, "NotFound", message),
            LevelError::UnknownLevel(_) => ApiError::new(S::NOT_FOUND, "UnknownLevel", message),
            LevelError::ValidationFailed(issues) => {
                ApiError::new(S::UNPROCESSABLE_ENTITY, "ValidationFailed", message).with(issues)
            }
            LevelError::InvalidId(_) => ApiError::new(S::UNPROCESSABLE_ENTITY, "InvalidId", message),
            LevelError::InvalidPlayer(_) => ApiError::new(S::UNPROCESSABLE_ENTITY, "InvalidPlayer", message),
            LevelError::Mutant { .. } => ApiError::new(S::UNPROCESSABLE_ENTITY, "MutantInvalid", message),
            LevelError::Engine(EngineError::InvalidConfig(_)) => {
                ApiError::new(S::UNPROCESSABLE_ENTITY, "InvalidConfig", message)
            }
            LevelError::Engine(_) => ApiError::new(S::INTERNAL_SERVER_ERROR, "EngineFailure", message),
            LevelError::Analysis(AnalysisError::RouteExplosion(cap)) => {
                ApiError::new(S::CONFLICT, "RouteExplosion", message).with(json!({"cap": cap}))
            }
            LevelError::Analysis(_) => ApiError::new(S::UNPROCESSABLE_ENTITY, "AnalysisFailed", message),
            LevelError::Decode(d) => d.into(),
            LevelError::ReplayMismatch { claimed, actual } => {
                ApiError::new(S::CONFLICT, "ReplayMismatch", message).with(json!({"claimed": claimed, "actual": actual}))
            }
            LevelError::Storage(_) => ApiError::new(S::INTERNAL_SERVER_ERROR, "StorageFailure", message),
        }
    }
}

type ApiResult = Result<Response, ApiError>;

fn json_response(status: StatusCode, body: &impl Serialize) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], to_json(body)).into_response()
}

/// Runs blocking store/engine work off the async executor.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?
}

#[derive(Clone)]
struct AppState {
    store: Arc<LevelStore>,
}

/// The game id is a digest of what determines the run, so the same request
/// always names the same game.
pub fn game_id(level: &Level, mines: &[Mine], seed: u64) -> String {
    let mut h = Sha256::new();
    h.update(to_json(level).as_bytes());
    h.update(b"\n");
    h.update(to_json(&mines).as_bytes());
    h.update(b"\n");
    h.update(seed.to_string().as_bytes());
    format!("g-{}", hex::encode(&h.finalize()[..8]))
}

/// Validates placement, runs the level and returns the finished session.
pub fn run_session(level: &Level, mines: Vec<Mine>, seed: u64) -> Result<GameSession, ApiError> {
    let issues = check_mines(&level.board, &mines);
    if !issues.is_empty() {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "MinePlacement",
            issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "),
        )
        .with(issues));
    }
    let (state, report) = level.play(mines.clone(), seed)?;
    Ok(GameSession {
        game_id: game_id(level, &mines, seed),
        level_id: level.id.clone(),
        seed,
        mines,
        status: SessionStatus::Finished,
        events: state.events,
        report: Some(report),
    })
}

async fn list_levels(State(s): State<AppState>) -> ApiResult {
    let groups = blocking(move || Ok(s.store.list()?)).await?;
    Ok(json_response(StatusCode::OK, &groups))
}

async fn get_level(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let detail = blocking(move || Ok(s.store.load(&id)?.detail()?)).await?;
    Ok(json_response(StatusCode::OK, &detail))
}

#[derive(Serialize)]
struct Saved {
    level: crate::levels::LevelSummary,
    issues: Vec<Issue>,
}

async fn post_level(State(s): State<AppState>, body: Bytes) -> ApiResult {
    let level: Level = from_json(&String::from_utf8_lossy(&body))?;
    let saved = blocking(move || {
        s.store.save(&level)?;
        Ok(Saved {
            level: level.summary(),
            issues: validate(&level),
        })
    })
    .await?;
    Ok(json_response(StatusCode::CREATED, &saved))
}

async fn level_analysis(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let report = blocking(move || Ok(s.store.load(&id)?.analyze(DEFAULT_ROUTE_CAP)?)).await?;
    Ok(json_response(StatusCode::OK, &report))
}

async fn post_game(State(s): State<AppState>, body: Bytes) -> ApiResult {
    let req: NewGame = from_json(&String::from_utf8_lossy(&body))?;
    let session = blocking(move || {
        let level = match s.store.load(&req.level_id) {
            Err(LevelError::NotFound(id)) => return Err(LevelError::UnknownLevel(id).into()),
            other => other?,
        };
        let seed = req.seed.unwrap_or_else(rand::random);
        let session = run_session(&level, req.mines, seed)?;
        s.store.put_document("games", &session.game_id, &session)?;
        Ok(session)
    })
    .await?;
    Ok(json_response(StatusCode::CREATED, &session))
}

async fn post_score(State(s): State<AppState>, body: Bytes) -> ApiResult {
    let req: NewScore = from_json(&String::from_utf8_lossy(&body))?;
    let entry = blocking(move || {
        let session: GameSession = s.store.get_document("games", &req.game_id)?.ok_or_else(|| {
            ApiError::new(StatusCode::NOT_FOUND, "UnknownGame", format!("game {:?} not found", req.game_id))
        })?;
        let claimed = req.report.or(session.report).ok_or_else(|| {
            ApiError::new(StatusCode::CONFLICT, "GameNotFinished", "game has no report")
        })?;
        Ok(s.store.submit_score(&ScoreSubmission {
            player: req.player,
            game_id: session.game_id,
            level_id: session.level_id,
            seed: session.seed,
            mines: session.mines,
            claimed,
        })?)
    })
    .await?;
    Ok(json_response(StatusCode::OK, &entry))
}

#[derive(Debug, Deserialize)]
struct LeaderboardQuery {
    level: Option<String>,
}

/// Global totals, or per-level bests with `?level=<id>`.
async fn leaderboard(State(s): State<AppState>, Query(q): Query<LeaderboardQuery>) -> ApiResult {
    let board = blocking(move || Ok(s.store.leaderboard()?)).await?;
    match q.level {
        Some(id) => Ok(json_response(StatusCode::OK, &board.level_bests(&id))),
        None => Ok(json_response(StatusCode::OK, &board.entries)),
    }
}

async fn get_palette() -> Response {
    json_response(StatusCode::OK, &palette())
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "NotFound", "no such route")
}

pub fn router(store: Arc<LevelStore>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/levels", get(list_levels).post(post_level))
        .route("/api/levels/{id}", get(get_level))
        .route("/api/levels/{id}/analysis", get(level_analysis))
        .route("/api/games", axum::routing::post(post_game))
        .route("/api/scores", axum::routing::post(post_score))
        .route("/api/leaderboard", get(leaderboard))
        .route("/api/palette", get(get_palette))
        .route("/api/{*rest}", axum::routing::any(not_found))
        .with_state(AppState { store });
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    }
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub data_dir: PathBuf,
    pub port: u16,
    pub static_dir: Option<PathBuf>,
}

/// Serves until ctrl-c.
pub async fn serve(config: ServeConfig) -> Result<(), LevelError> {
    let store = Arc::new(LevelStore::open(&config.data_dir)?);
    let app = router(store, config.static_dir);
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
