use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;

use resilient_write::harness::{run_script, SessionScript};

/// Run a scripted agent session (JSON file) against a resilient-write
/// server in an isolated workspace, with optional fault injection.
#[derive(Parser)]
#[command(name = "rw-harness", version, about)]
struct Cli {
    /// Session script: {setup?, steps, faults?, expect_no_temp_residue?}.
    #[arg(long)]
    script: PathBuf,

    /// Server binary; defaults to RW_SERVER_BIN or a sibling
    /// "resilient-write" next to this executable.
    #[arg(long)]
    server: Option<PathBuf>,

    /// Workspace directory; a fresh temp directory when omitted.
    #[arg(long)]
    workspace: Option<PathBuf>,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();

    let script_text = std::fs::read_to_string(&cli.script)
        .with_context(|| format!("cannot read script {:?}", cli.script))?;
    let script: SessionScript =
        serde_json::from_str(&script_text).context("script is not a valid session script")?;

    let server = match cli.server {
        Some(server) => server,
        None => match std::env::var_os("RW_SERVER_BIN") {
            Some(path) => PathBuf::from(path),
            None => {
                let exe = std::env::current_exe().context("cannot locate this executable")?;
                exe.parent()
                    .map(|dir| dir.join("resilient-write"))
                    .filter(|candidate| candidate.exists())
                    .context("no --server given, RW_SERVER_BIN unset, and no sibling resilient-write binary")?
            }
        },
    };

    let temp;
    let workspace = match cli.workspace {
        Some(dir) => dir,
        None => {
            temp = tempfile::tempdir().context("cannot create temp workspace")?;
            temp.path().to_path_buf()
        }
    };

    let outcome = run_script(&server, &workspace, &script)?;
    for record in &outcome.transcript {
        let status = if !record.problems.is_empty() {
            "FAIL"
        } else if record.crashed {
            "KILLED"
        } else {
            "ok"
        };
        println!("step {:>2} {:<20} {}", record.index, record.tool, status);
        for problem in &record.problems {
            println!("        {problem}");
        }
    }
    println!("{}", if outcome.passed { "PASS" } else { "FAIL" });
    std::process::exit(if outcome.passed { 0 } else { 1 });
}
