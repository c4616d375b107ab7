use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use code_critters::analysis::{AnalysisReport, Certificate, Kill, DEFAULT_ROUTE_CAP};
use code_critters::blocklang::{from_json, render, to_json_pretty};
use code_critters::engine::{Mine, ScoreReport};
use code_critters::levels::{has_errors, validate, Issue, Level, LevelError, Severity};
use code_critters::service::{run_session, serve, ServeConfig};

/// Exit status classes.
const EXIT_INVALID: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CONFIG: u8 = 4;
const EXIT_ANALYSIS: u8 = 5;

#[derive(Parser)]
#[command(name = "critters", version, about = "Code Critters level tools and game server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "DATA_DIR", default_value = "data")]
        data_dir: PathBuf,
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
        /// Directory of static UI assets to serve at `/`.
        #[arg(long, env = "STATIC_DIR")]
        static_dir: Option<PathBuf>,
    },
    /// Play a level once and print the score report.
    RunLevel {
        #[arg(long)]
        level: PathBuf,
        /// JSON array of mines.
        #[arg(long)]
        mines: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also print the event log (json format only).
        #[arg(long)]
        events: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the analysis report for a level.
    Analyze {
        #[arg(long)]
        level: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ROUTE_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a level; exits 2 if any issue is an error.
    Validate {
        #[arg(long)]
        level: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

struct Failure(u8, String);

impl From<LevelError> for Failure {
    fn from(e: LevelError) -> Self {
        let code = match e {
            LevelError::Analysis(_) => EXIT_ANALYSIS,
            LevelError::Decode(_) | LevelError::Storage(_) => EXIT_INPUT,
            _ => EXIT_CONFIG,
        };
        Failure(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn load_level(path: &Path) -> Result<Level, Failure> {
    Level::from_json(&read(path)?).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn score_text(r: &ScoreReport) -> String {
    format!(
        "healthy saved    {}\nhealthy trapped  {}\nmutants trapped  {}\nmutants escaped  {}\nmines used       {}\ntime bonus       {}\ntotal            {}\n",
        r.healthy_saved, r.healthy_trapped, r.mutants_trapped, r.mutants_escaped, r.mines_used, r.time_bonus, r.total
    )
}

fn analysis_text(level: &Level, r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "routes: {}", r.routes);
    let cert = match &r.minimal.certificate {
        Certificate::Exact => "exact".to_string(),
        Certificate::Heuristic => "heuristic".to_string(),
        Certificate::Unsolvable { missing } => format!(
            "unsolvable, missing {}",
            missing.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ")
        ),
    };
    let _ = writeln!(out, "minimal mine set: {} ({cert})", r.minimal.mines.len());
    for m in &r.minimal.mines {
        let texture = level.board.texture(m.position).map(|t| t.name()).unwrap_or("?");
        let asserts = render::test(&m.test).trim_end().replace('\n', "; ");
        let _ = writeln!(out, "  {} {texture}: {asserts}", m.position);
    }
    let eq: Vec<String> = r.equivalent.iter().map(|m| m.to_string()).collect();
    let _ = writeln!(out, "equivalent mutants: {}", if eq.is_empty() { "none".into() } else { eq.join(", ") });
    let _ = writeln!(out, "suggested difficulty: {}", r.suggested_difficulty);
    let _ = writeln!(out, "kill matrix (G guaranteed, p possible, . never):");
    for (i, mine) in r.kill_matrix.mines.iter().enumerate() {
        let row: String = r.kill_matrix.cells[i]
            .iter()
            .map(|k| match k {
                Kill::Guaranteed => 'G',
                Kill::Possible => 'p',
                Kill::Never => '.',
            })
            .collect();
        let _ = writeln!(out, "  {:>8} {row}", mine.position.to_string());
    }
    out
}

fn issues_text(issues: &[Issue]) -> String {
    if issues.is_empty() {
        return "ok\n".into();
    }
    issues
        .iter()
        .map(|i| {
            let severity = match i.severity {
                Severity::Error => "ERROR",
                Severity::Warning => "WARNING",
            };
            format!("{severity} {:?}: {}\n", i.code, i.detail)
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Serve {
            data_dir,
            port,
            static_dir,
        } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure(1, e.to_string()))?;
            eprintln!("serving {} on port {port}", data_dir.display());
            rt.block_on(serve(ServeConfig {
                data_dir,
                port,
                static_dir,
            }))?;
        }
        Command::RunLevel {
            level,
            mines,
            seed,
            events,
            format,
        } => {
            let level = load_level(&level)?;
            let mines: Vec<Mine> = match mines {
                Some(p) => from_json(&read(&p)?).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", p.display())))?,
                None => Vec::new(),
            };
            let session = run_session(&level, mines, seed).map_err(|e| Failure(EXIT_CONFIG, e.message))?;
            let report = session.report.expect("finished session has a report");
            match format {
                Format::Text => print!("{}", score_text(&report)),
                Format::Json if events => println!("{}", to_json_pretty(&session)),
                Format::Json => println!("{}", to_json_pretty(&report)),
            }
        }
        Command::Analyze { level, cap, format } => {
            let level = load_level(&level)?;
            let report = level.analyze(cap)?;
            match format {
                Format::Text => print!("{}", analysis_text(&level, &report)),
                Format::Json => println!("{}", to_json_pretty(&report)),
            }
        }
        Command::Validate { level, format } => {
            let level = load_level(&level)?;
            let issues = validate(&level);
            match format {
                Format::Text => print!("{}", issues_text(&issues)),
                Format::Json => println!("{}", to_json_pretty(&issues)),
            }
            if has_errors(&issues) {
                return Err(Failure(EXIT_INVALID, String::new()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            if !message.is_empty() {
                eprintln!("error: {message}");
            }
            ExitCode::from(code)
        }
    }
}
