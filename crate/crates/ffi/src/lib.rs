//! C ABI over the Code Critters engine.
//!
//! Levels and games are opaque handles. Every fallible call returns a
//! [`CcStatus`]; on failure [`cc_last_error_message`] describes the error.
//! Strings handed out by this library are JSON and must be released with
//! [`cc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use code_critters::blocklang::{from_json, to_json};
use code_critters::engine::{EngineError, Game, Mine};
use code_critters::levels::{has_errors, validate, Level, LevelError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Decode = 3,
    InvalidLevel = 4,
    InvalidConfig = 5,
    Analysis = 6,
    NotRunning = 7,
    NotFinished = 8,
    Internal = 9,
    Panic = 10,
}

/// A decoded level.
pub struct CcLevel {
    level: Level,
}

/// A game in progress or finished.
pub struct CcGame {
    game: Game,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CcStatus, String);

impl From<LevelError> for Failure {
    fn from(e: LevelError) -> Self {
        let status = match &e {
            LevelError::Decode(_) => CcStatus::Decode,
            LevelError::ValidationFailed(_) | LevelError::Mutant { .. } | LevelError::InvalidId(_) => CcStatus::InvalidLevel,
            LevelError::Engine(e) => return e.clone().into(),
            LevelError::Analysis(_) => CcStatus::Analysis,
            _ => CcStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let status = match e {
            EngineError::InvalidConfig(_) => CcStatus::InvalidConfig,
            EngineError::NotRunning => CcStatus::NotRunning,
            EngineError::GameNotFinished => CcStatus::NotFinished,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside code_critters".into());
            CcStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CcStatus::NullArgument, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(CcStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn read_mines(p: *const c_char) -> Result<Vec<Mine>, Failure> {
    if p.is_null() {
        return Ok(Vec::new());
    }
    let doc = read_str(p, "mines_json")?;
    from_json(doc).map_err(|e| Failure(CcStatus::Decode, e.to_string()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let s = CString::new(s).map_err(|e| Failure(CcStatus::Internal, e.to_string()))?;
    *out = s.into_raw();
    Ok(())
}

unsafe fn level_ref<'a>(level: *const CcLevel) -> Result<&'a Level, Failure> {
    level.as_ref().map(|l| &l.level).ok_or_else(|| null("level"))
}

/// Message for the most recent failure on this thread, or null.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Decodes a level document. The level is not validated.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_level_from_json(json: *const c_char, out: *mut *mut CcLevel) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let level = Level::from_json(read_str(json, "json")?).map_err(LevelError::from)?;
        *out = Box::into_raw(Box::new(CcLevel { level }));
        Ok(())
    })
}

/// # Safety
/// `level` must come from [`cc_level_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cc_level_free(level: *mut CcLevel) {
    if !level.is_null() {
        drop(Box::from_raw(level));
    }
}

/// Writes the validation issues as a JSON array to `out`. Returns
/// `INVALID_LEVEL` when any issue is an error; `out` is written either way.
///
/// # Safety
/// `level` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_level_validate(level: *const CcLevel, out: *mut *mut c_char) -> CcStatus {
    guard(|| {
        let issues = validate(level_ref(level)?);
        write_string(out, to_json(&issues))?;
        if has_errors(&issues) {
            return Err(Failure(CcStatus::InvalidLevel, "level has validation errors".into()));
        }
        Ok(())
    })
}

/// Writes the analysis report as JSON to `out`.
///
/// # Safety
/// `level` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_level_analyze(level: *const CcLevel, route_cap: usize, out: *mut *mut c_char) -> CcStatus {
    guard(|| {
        let report = level_ref(level)?.analyze(route_cap)?;
        write_string(out, to_json(&report))
    })
}

/// Starts a game. `mines_json` may be null for no mines.
///
/// # Safety
/// `level` must be a live handle; `mines_json` null or NUL-terminated;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_game_new(
    level: *const CcLevel,
    mines_json: *const c_char,
    seed: u64,
    out: *mut *mut CcGame,
) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = level_ref(level)?.game_config(read_mines(mines_json)?, seed)?;
        let game = Game::new(config)?;
        *out = Box::into_raw(Box::new(CcGame { game }));
        Ok(())
    })
}

/// Advances one tick. Returns `NOT_RUNNING` once the game has finished.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_game_tick(game: *mut CcGame) -> CcStatus {
    guard(|| {
        let game = game.as_mut().ok_or_else(|| null("game"))?;
        Ok(game.game.tick()?)
    })
}

/// Runs until every critter is saved or trapped.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_game_run(game: *mut CcGame) -> CcStatus {
    guard(|| {
        let game = game.as_mut().ok_or_else(|| null("game"))?;
        game.game.run();
        Ok(())
    })
}

/// False for a null handle.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_game_is_finished(game: *const CcGame) -> bool {
    game.as_ref().is_some_and(|g| g.game.is_finished())
}

/// Writes the event log so far as a JSON array.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_game_events_json(game: *const CcGame, out: *mut *mut c_char) -> CcStatus {
    guard(|| {
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        write_string(out, to_json(&game.game.state().events))
    })
}

/// Writes the score report. Returns `NOT_FINISHED` while the game runs.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_game_score_json(game: *const CcGame, out: *mut *mut c_char) -> CcStatus {
    guard(|| {
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        write_string(out, to_json(&game.game.score()?))
    })
}

/// # Safety
/// `game` must come from [`cc_game_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cc_game_free(game: *mut CcGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Plays a whole game from JSON documents and writes the score report.
///
/// # Safety
/// `level_json` must be NUL-terminated; `mines_json` null or NUL-terminated;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_run_level(
    level_json: *const c_char,
    mines_json: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
) -> CcStatus {
    guard(|| {
        let level = Level::from_json(read_str(level_json, "level_json")?).map_err(LevelError::from)?;
        let (_, report) = level.play(read_mines(mines_json)?, seed)?;
        write_string(out, to_json(&report))
    })
}
