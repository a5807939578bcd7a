use std::io::{stdin, stdout};
use std::path::PathBuf;

use clap::Parser;
use serde_json::Value;

use resilient_write::transport::{serve, ServerState};
use resilient_write::workspace::resolve_root;

/// Durable-write tool server for coding agents, speaking JSON-RPC 2.0 over
/// stdio (one message per line).
#[derive(Parser)]
#[command(name = "resilient-write", version, about)]
struct Cli {
    /// Workspace root; overrides RW_WORKSPACE and the working directory.
    #[arg(long)]
    workspace: Option<PathBuf>,

    /// Dispatch a single tool call and exit (for debugging):
    /// --once <tool> <json-args>
    #[arg(long, num_args = 2, value_names = ["TOOL", "JSON_ARGS"])]
    once: Option<Vec<String>>,
}

fn main() {
    let cli = Cli::parse();

    let env_value = std::env::var("RW_WORKSPACE").ok();
    let cwd = match std::env::current_dir() {
        Ok(cwd) => cwd,
        Err(e) => {
            eprintln!("resilient-write: cannot determine working directory: {e}");
            std::process::exit(2);
        }
    };
    let root = match resolve_root(env_value.as_deref(), &cwd, cli.workspace.as_deref()) {
        Ok(root) => root,
        Err(e) => {
            eprintln!("resilient-write: {e}");
            std::process::exit(2);
        }
    };
    let mut state = match ServerState::new(root) {
        Ok(state) => state,
        Err(e) => {
            eprintln!("resilient-write: startup failed: {e}");
            std::process::exit(2);
        }
    };

    if let Some(once) = cli.once {
        let tool = &once[0];
        let args: Value = match serde_json::from_str(&once[1]) {
            Ok(args) => args,
            Err(e) => {
                eprintln!("resilient-write: --once arguments are not valid JSON: {e}");
                std::process::exit(2);
            }
        };
        let value = state.dispatch(tool, args);
        println!("{}", serde_json::to_string_pretty(&value).expect("result serialises"));
        let ok = value.get("ok") == Some(&Value::Bool(true));
        std::process::exit(if ok { 0 } else { 1 });
    }

    let stdin = stdin();
    let stdout = stdout();
    if let Err(e) = serve(&mut state, stdin.lock(), stdout.lock()) {
        eprintln!("resilient-write: transport error: {e}");
        std::process::exit(1);
    }
}
