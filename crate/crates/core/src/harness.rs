//! Scripted-session integration harness.
//!
//! A [`SessionScript`] drives a real server process over its stdio
//! transport: optional workspace setup files, a sequence of tool calls with
//! subset-structural response expectations, per-step on-disk assertions,
//! and fault injection that kills the server at a named write phase
//! (`RW_TEST_CRASH_PHASE`). After any fault the harness restarts a clean
//! server, whose startup sweep must leave the workspace free of temp
//! residue.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};

use anyhow::Context;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::atomic::TEMP_INFIX;

#[derive(Debug, Clone, Deserialize)]
pub struct SessionScript {
    /// Files written into the workspace before the server starts.
    #[serde(default)]
    pub setup: Vec<SetupFile>,
    pub steps: Vec<ScriptStep>,
    #[serde(default)]
    pub faults: Vec<FaultSpec>,
    /// After all steps (and a recovery restart if any fault fired), the
    /// workspace must contain no `.rw-tmp-` files.
    #[serde(default)]
    pub expect_no_temp_residue: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SetupFile {
    pub path: String,
    pub content: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ScriptStep {
    pub tool: String,
    #[serde(default)]
    pub args: Value,
    /// Subset-structural match against the tool's structured result:
    /// every key in `expect` must be present and equal in the response;
    /// extra response fields are ignored. Arrays must match element-wise
    /// at equal length.
    #[serde(default)]
    pub expect: Option<Value>,
    #[serde(default)]
    pub expect_files: Vec<FileExpectation>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FileExpectation {
    pub path: String,
    #[serde(default)]
    pub equals: Option<String>,
    #[serde(default)]
    pub exists: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FaultSpec {
    /// 0-based index into `steps`.
    pub step_index: usize,
    /// pre_temp | post_temp | pre_rename | post_rename
    pub phase: String,
    /// Only "kill" is supported.
    pub action: String,
}

#[derive(Debug)]
pub struct StepRecord {
    pub index: usize,
    pub tool: String,
    pub crashed: bool,
    pub response: Option<Value>,
    pub problems: Vec<String>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub passed: bool,
    pub transcript: Vec<StepRecord>,
}

/// One live server process speaking newline-delimited JSON-RPC.
pub struct ServerProcess {
    child: Child,
    stdin: Option<std::process::ChildStdin>,
    stdout: BufReader<std::process::ChildStdout>,
    next_id: i64,
}

impl ServerProcess {
    pub fn spawn(server_bin: &Path, workspace: &Path, crash_phase: Option<&str>) -> anyhow::Result<ServerProcess> {
        match crash_phase {
            Some(phase) => Self::spawn_with_env(server_bin, workspace, &[("RW_TEST_CRASH_PHASE", phase)]),
            None => Self::spawn_with_env(server_bin, workspace, &[]),
        }
    }

    pub fn spawn_with_env(
        server_bin: &Path,
        workspace: &Path,
        env: &[(&str, &str)],
    ) -> anyhow::Result<ServerProcess> {
        let mut command = Command::new(server_bin);
        command
            .arg("--workspace")
            .arg(workspace)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .env_remove("RW_TEST_CRASH_PHASE")
            .env_remove("RW_TEST_PANIC_TOOL")
            .env_remove(crate::scratch::GATE_ENV_VAR);
        for (key, value) in env {
            command.env(key, value);
        }
        let mut child = command
            .spawn()
            .with_context(|| format!("failed to spawn server {server_bin:?}"))?;
        let stdin = child.stdin.take().context("server stdin unavailable")?;
        let stdout = BufReader::new(child.stdout.take().context("server stdout unavailable")?);
        let mut server = ServerProcess {
            child,
            stdin: Some(stdin),
            stdout,
            next_id: 1,
        };
        // Handshake; also how the journal learns the caller identity.
        let _ = server.request(
            "initialize",
            json!({
                "protocolVersion": "2025-06-18",
                "capabilities": {},
                "clientInfo": {"name": "rw-harness", "version": env!("CARGO_PKG_VERSION")},
            }),
        )?;
        Ok(server)
    }

    /// Send one request and read its response. `None` means the server
    /// went away (expected for fault steps).
    pub fn request(&mut self, method: &str, params: Value) -> anyhow::Result<Option<Value>> {
        let id = self.next_id;
        self.next_id += 1;
        let message = json!({"jsonrpc": "2.0", "id": id, "method": method, "params": params});
        let mut line = serde_json::to_vec(&message)?;
        line.push(b'\n');
        if let Some(stdin) = self.stdin.as_mut() {
            if stdin.write_all(&line).and_then(|_| stdin.flush()).is_err() {
                return Ok(None); // broken pipe: server crashed
            }
        }
        loop {
            let mut buf = String::new();
            let n = self.stdout.read_line(&mut buf)?;
            if n == 0 {
                return Ok(None); // EOF: server exited
            }
            if buf.trim().is_empty() {
                continue;
            }
            let value: Value = serde_json::from_str(&buf)
                .with_context(|| format!("server wrote a non-JSON line: {buf:?}"))?;
            if value.get("id") == Some(&json!(id)) {
                return Ok(Some(value));
            }
        }
    }

    /// Call a tool and return its structured result value.
    pub fn call_tool(&mut self, tool: &str, args: Value) -> anyhow::Result<Option<Value>> {
        let response = self.request("tools/call", json!({"name": tool, "arguments": args}))?;
        Ok(response.map(|r| {
            r.pointer("/result/structuredContent")
                .cloned()
                .unwrap_or_else(|| r.get("error").cloned().map(|e| json!({"rpc_error": e})).unwrap_or(Value::Null))
        }))
    }

    /// Close stdin (EOF) and wait; a clean server exits with status 0.
    pub fn shutdown(mut self) -> anyhow::Result<std::process::ExitStatus> {
        drop(self.stdin.take());
        Ok(self.child.wait()?)
    }

    pub fn wait_for_death(mut self) -> anyhow::Result<std::process::ExitStatus> {
        drop(self.stdin.take());
        Ok(self.child.wait()?)
    }
}

impl Drop for ServerProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub fn run_script(server_bin: &Path, workspace: &Path, script: &SessionScript) -> anyhow::Result<RunOutcome> {
    for file in &script.setup {
        let path = workspace.join(&file.path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, &file.content)?;
    }

    let mut transcript = Vec::new();
    let mut server: Option<ServerProcess> = None;
    let mut any_fault = false;

    for (index, step) in script.steps.iter().enumerate() {
        let fault = script.faults.iter().find(|f| f.step_index == index);
        let mut record = StepRecord {
            index,
            tool: step.tool.clone(),
            crashed: false,
            response: None,
            problems: Vec::new(),
        };

        if let Some(fault) = fault {
            if fault.action != "kill" {
                record.problems.push(format!("unsupported fault action {:?}", fault.action));
            }
            // A dedicated server carries the crash phase for this one step.
            if let Some(previous) = server.take() {
                previous.shutdown()?;
            }
            let mut crashing = ServerProcess::spawn(server_bin, workspace, Some(&fault.phase))?;
            match crashing.call_tool(&step.tool, step.args.clone())? {
                None => {
                    record.crashed = true;
                    let status = crashing.wait_for_death()?;
                    if status.success() {
                        record.problems.push("server exited cleanly where a crash was injected".into());
                    }
                    any_fault = true;
                }
                Some(response) => {
                    record
                        .problems
                        .push(format!("expected a crash at phase {:?} but got a response", fault.phase));
                    record.response = Some(response);
                }
            }
        } else {
            if server.is_none() {
                server = Some(ServerProcess::spawn(server_bin, workspace, None)?);
            }
            let live = server.as_mut().expect("just spawned");
            match live.call_tool(&step.tool, step.args.clone())? {
                None => {
                    record.problems.push("server exited unexpectedly".into());
                    server = None;
                }
                Some(response) => {
                    if let Some(expect) = &step.expect {
                        subset_match(expect, &response, "$", &mut record.problems);
                    }
                    record.response = Some(response);
                }
            }
        }

        for expectation in &step.expect_files {
            check_file(workspace, expectation, &mut record.problems);
        }
        transcript.push(record);
    }

    if let Some(live) = server.take() {
        let status = live.shutdown()?;
        if !status.success() {
            transcript.push(StepRecord {
                index: script.steps.len(),
                tool: "<shutdown>".into(),
                crashed: false,
                response: None,
                problems: vec![format!("server exited with {status} on EOF")],
            });
        }
    }

    if script.expect_no_temp_residue {
        if any_fault {
            // Recovery: a fresh server's startup sweep clears stale temps.
            let recovery = ServerProcess::spawn(server_bin, workspace, None)?;
            recovery.shutdown()?;
        }
        let leftovers = find_temp_files(workspace);
        if !leftovers.is_empty() {
            transcript.push(StepRecord {
                index: script.steps.len(),
                tool: "<residue-check>".into(),
                crashed: false,
                response: None,
                problems: vec![format!("temp residue remains: {leftovers:?}")],
            });
        }
    }

    let passed = transcript.iter().all(|r| r.problems.is_empty());
    Ok(RunOutcome { passed, transcript })
}

pub fn find_temp_files(root: &Path) -> Vec<PathBuf> {
    let mut found = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let Ok(entries) = std::fs::read_dir(&dir) else { continue };
        for entry in entries.flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if path
                .file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.contains(TEMP_INFIX))
                .unwrap_or(false)
            {
                found.push(path);
            }
        }
    }
    found
}

fn check_file(workspace: &Path, expectation: &FileExpectation, problems: &mut Vec<String>) {
    let path = workspace.join(&expectation.path);
    if let Some(exists) = expectation.exists {
        if path.exists() != exists {
            problems.push(format!(
                "file {:?}: expected exists={exists}, found exists={}",
                expectation.path,
                path.exists()
            ));
        }
    }
    if let Some(expected) = &expectation.equals {
        match std::fs::read_to_string(&path) {
            Ok(actual) if &actual == expected => {}
            Ok(actual) => problems.push(format!(
                "file {:?}: content mismatch (expected {expected:?}, found {actual:?})",
                expectation.path
            )),
            Err(e) => problems.push(format!("file {:?}: unreadable: {e}", expectation.path)),
        }
    }
}

/// Subset-structural match: every expected key/element must be present and
/// equal; extra fields in `actual` are ignored. Arrays require equal length
/// and element-wise subset matches.
pub fn subset_match(expected: &Value, actual: &Value, path: &str, problems: &mut Vec<String>) {
    match (expected, actual) {
        (Value::Object(exp), Value::Object(act)) => {
            for (key, exp_value) in exp {
                match act.get(key) {
                    Some(act_value) => subset_match(exp_value, act_value, &format!("{path}.{key}"), problems),
                    None => problems.push(format!("{path}.{key}: missing in response")),
                }
            }
        }
        (Value::Array(exp), Value::Array(act)) => {
            if exp.len() != act.len() {
                problems.push(format!("{path}: expected {} items, got {}", exp.len(), act.len()));
                return;
            }
            for (i, (e, a)) in exp.iter().zip(act.iter()).enumerate() {
                subset_match(e, a, &format!("{path}[{i}]"), problems);
            }
        }
        (exp, act) => {
            if exp != act {
                problems.push(format!("{path}: expected {exp}, got {act}"));
            }
        }
    }
}
