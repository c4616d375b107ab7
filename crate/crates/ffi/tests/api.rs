use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use code_critters_ffi::*;
use serde_json::Value;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(rel)
}

fn cstring(rel: &str) -> CString {
    CString::new(std::fs::read_to_string(fixture(rel)).unwrap()).unwrap()
}

unsafe fn take(s: *mut c_char) -> Value {
    let v = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
    cc_string_free(s);
    v
}

unsafe fn last_error() -> String {
    CStr::from_ptr(cc_last_error_message()).to_string_lossy().into_owned()
}

unsafe fn tutorial() -> *mut CcLevel {
    let mut level = ptr::null_mut();
    assert_eq!(cc_level_from_json(cstring("levels/tutorial-shirt.json").as_ptr(), &mut level), CcStatus::Ok);
    level
}

#[test]
fn step_through_a_game() {
    unsafe {
        let level = tutorial();
        let mines = cstring("mines/tutorial-shirt.json");
        let mut game = ptr::null_mut();
        assert_eq!(cc_game_new(level, mines.as_ptr(), 3, &mut game), CcStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(cc_game_score_json(game, &mut out), CcStatus::NotFinished);
        assert!(out.is_null());
        let mut ticks = 0;
        while !cc_game_is_finished(game) {
            assert_eq!(cc_game_tick(game), CcStatus::Ok);
            ticks += 1;
        }
        assert!(ticks > 0);
        assert_eq!(cc_game_tick(game), CcStatus::NotRunning);
        assert_eq!(cc_game_score_json(game, &mut out), CcStatus::Ok);
        let report = take(out);
        assert_eq!(report["mutants_trapped"], 3);
        assert_eq!(report["healthy_trapped"], 0);
        assert_eq!(cc_game_events_json(game, &mut out), CcStatus::Ok);
        assert_eq!(take(out)[0]["kind"], "spawned");
        cc_game_free(game);
        cc_level_free(level);
    }
}

#[test]
fn run_level_matches_stepping() {
    unsafe {
        let level_json = cstring("levels/beginner-fork.json");
        let mut out = ptr::null_mut();
        assert_eq!(cc_run_level(level_json.as_ptr(), ptr::null(), 9, &mut out), CcStatus::Ok);
        let direct = take(out);

        let mut level = ptr::null_mut();
        cc_level_from_json(level_json.as_ptr(), &mut level);
        let mut game = ptr::null_mut();
        assert_eq!(cc_game_new(level, ptr::null(), 9, &mut game), CcStatus::Ok);
        assert_eq!(cc_game_run(game), CcStatus::Ok);
        assert_eq!(cc_game_score_json(game, &mut out), CcStatus::Ok);
        assert_eq!(take(out), direct);
        assert_eq!(direct["mutants_escaped"], 3);
        cc_game_free(game);
        cc_level_free(level);
    }
}

#[test]
fn validate_and_analyze() {
    unsafe {
        let level = tutorial();
        let mut out = ptr::null_mut();
        assert_eq!(cc_level_validate(level, &mut out), CcStatus::Ok);
        assert!(take(out).as_array().unwrap().iter().all(|i| i["severity"] != "ERROR"));
        assert_eq!(cc_level_analyze(level, 10_000, &mut out), CcStatus::Ok);
        assert_eq!(take(out)["minimal"]["mines"].as_array().unwrap().len(), 2);
        assert_eq!(cc_level_analyze(level, 0, &mut out), CcStatus::Analysis);
        cc_level_free(level);

        let mut doc: Value = serde_json::from_str(cstring("levels/tutorial-shirt.json").to_str().unwrap()).unwrap();
        doc["mutants"] = Value::Array(vec![]);
        let doc = CString::new(doc.to_string()).unwrap();
        let mut level = ptr::null_mut();
        assert_eq!(cc_level_from_json(doc.as_ptr(), &mut level), CcStatus::Ok);
        assert_eq!(cc_level_validate(level, &mut out), CcStatus::InvalidLevel);
        assert_eq!(take(out)[0]["code"], "NoMutants");
        cc_level_free(level);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut level = ptr::null_mut();
        assert_eq!(cc_level_from_json(ptr::null(), &mut level), CcStatus::NullArgument);
        assert!(last_error().contains("null"));
        let bad = CString::new("{\"id\": 1}").unwrap();
        assert_eq!(cc_level_from_json(bad.as_ptr(), &mut level), CcStatus::Decode);
        assert!(level.is_null());
        let utf8 = CString::new(vec![0xff, 0xfe]).unwrap();
        assert_eq!(cc_level_from_json(utf8.as_ptr(), &mut level), CcStatus::InvalidUtf8);

        let level = tutorial();
        let wet = CString::new(
            r#"[{"position":[3,8],"test":{"asserts":[{"kind":"assert","property":"size","matcher":{"kind":"predicate","predicate":"ODD"}}]}}]"#,
        )
        .unwrap();
        let mut game = ptr::null_mut();
        assert_eq!(cc_game_new(level, wet.as_ptr(), 0, &mut game), CcStatus::InvalidConfig);
        assert!(game.is_null());
        assert!(!last_error().is_empty());
        let junk = CString::new("[1]").unwrap();
        assert_eq!(cc_game_new(level, junk.as_ptr(), 0, &mut game), CcStatus::Decode);
        assert_eq!(cc_game_tick(ptr::null_mut()), CcStatus::NullArgument);
        assert!(!cc_game_is_finished(ptr::null()));
        cc_level_free(level);
        cc_level_free(ptr::null_mut());
        cc_game_free(ptr::null_mut());
        cc_string_free(ptr::null_mut());
    }
}

#[test]
fn header_is_current() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/code_critters.h")).unwrap();
    for name in [
        "cc_level_from_json",
        "cc_level_validate",
        "cc_level_analyze",
        "cc_game_new",
        "cc_game_tick",
        "cc_game_run",
        "cc_game_is_finished",
        "cc_game_events_json",
        "cc_game_score_json",
        "cc_run_level",
        "cc_string_free",
        "cc_last_error_message",
        "typedef struct CcLevel CcLevel;",
        "CC_STATUS_NOT_RUNNING = 7",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles a small C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libcode_critters_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("smoke");
    let status = Command::new(cc)
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out)
        .arg(fixture("levels/tutorial-shirt.json"))
        .arg(fixture("mines/tutorial-shirt.json"))
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let report: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["mutants_trapped"], 3);
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}
