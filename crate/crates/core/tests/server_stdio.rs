//! Protocol-level tests against the real binary: spawn the server, write
//! raw newline-delimited JSON-RPC to its stdin, read its stdout.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};

use serde_json::{json, Value};

fn server_bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_resilient-write"))
}

struct RawServer {
    child: Child,
    stdin: std::process::ChildStdin,
    stdout: BufReader<std::process::ChildStdout>,
    _workspace: tempfile::TempDir,
}

impl RawServer {
    fn start() -> RawServer {
        let workspace = tempfile::tempdir().unwrap();
        let mut child = Command::new(server_bin())
            .arg("--workspace")
            .arg(workspace.path())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let stdin = child.stdin.take().unwrap();
        let stdout = BufReader::new(child.stdout.take().unwrap());
        RawServer {
            child,
            stdin,
            stdout,
            _workspace: workspace,
        }
    }

    fn send_line(&mut self, line: &str) {
        self.stdin.write_all(line.as_bytes()).unwrap();
        self.stdin.write_all(b"\n").unwrap();
        self.stdin.flush().unwrap();
    }

    fn read_response(&mut self) -> Value {
        let mut line = String::new();
        self.stdout.read_line(&mut line).unwrap();
        serde_json::from_str(&line).unwrap_or_else(|e| panic!("bad response line {line:?}: {e}"))
    }

    fn finish(mut self) -> std::process::ExitStatus {
        drop(self.stdin);
        let mut rest = String::new();
        let _ = self.stdout.read_to_string(&mut rest);
        self.child.wait().unwrap()
    }
}

#[test]
fn eof_terminates_cleanly_with_status_zero() {
    let mut server = RawServer::start();
    server.send_line(r#"{"jsonrpc":"2.0","id":1,"method":"ping"}"#);
    let response = server.read_response();
    assert_eq!(response["id"], json!(1));
    let status = server.finish();
    assert!(status.success(), "{status:?}");
}

#[test]
fn parse_error_gets_null_id_and_loop_continues() {
    let mut server = RawServer::start();
    server.send_line("{this is not json");
    let response = server.read_response();
    assert_eq!(response["error"]["code"], json!(-32700));
    assert_eq!(response["id"], Value::Null);
    server.send_line(r#"{"jsonrpc":"2.0","id":2,"method":"ping"}"#);
    assert_eq!(server.read_response()["id"], json!(2));
    assert!(server.finish().success());
}

#[test]
fn unknown_method_yields_method_not_found() {
    let mut server = RawServer::start();
    server.send_line(r#"{"jsonrpc":"2.0","id":9,"method":"no/such"}"#);
    let response = server.read_response();
    assert_eq!(response["error"]["code"], json!(-32601));
    assert!(server.finish().success());
}

#[test]
fn tools_list_advertises_sixteen_tools_with_schemas() {
    let mut server = RawServer::start();
    server.send_line(r#"{"jsonrpc":"2.0","id":1,"method":"tools/list"}"#);
    let response = server.read_response();
    let tools = response["result"]["tools"].as_array().unwrap();
    assert_eq!(tools.len(), 16);
    for tool in tools {
        let name = tool["name"].as_str().unwrap();
        assert!(name.starts_with("rw."), "{name}");
        assert_eq!(tool["inputSchema"]["type"], json!("object"), "{name}");
        assert!(!tool["description"].as_str().unwrap().is_empty());
    }
    // repeated calls return the identical catalog
    server.send_line(r#"{"jsonrpc":"2.0","id":2,"method":"tools/list"}"#);
    let again = server.read_response();
    assert_eq!(response["result"], again["result"]);
    assert!(server.finish().success());
}

#[test]
fn tools_call_empty_content_is_safe_verdict() {
    let mut server = RawServer::start();
    server.send_line(
        r#"{"jsonrpc":"2.0","id":4,"method":"tools/call","params":{"name":"rw.risk_score","arguments":{"content":""}}}"#,
    );
    let response = server.read_response();
    assert_eq!(response["result"]["isError"], json!(false));
    assert_eq!(response["result"]["structuredContent"]["verdict"], json!("safe"));
    // content block mirrors the structured value
    let text = response["result"]["content"][0]["text"].as_str().unwrap();
    let parsed: Value = serde_json::from_str(text).unwrap();
    assert_eq!(parsed, response["result"]["structuredContent"]);
    assert!(server.finish().success());
}

#[test]
fn envelope_failures_are_tool_results_not_rpc_errors() {
    let mut server = RawServer::start();
    server.send_line(
        r#"{"jsonrpc":"2.0","id":5,"method":"tools/call","params":{"name":"rw.safe_write","arguments":{"path":"../x","content":"a","mode":"create"}}}"#,
    );
    let response = server.read_response();
    assert!(response.get("error").is_none(), "failure travels as a result");
    assert_eq!(response["result"]["isError"], json!(true));
    assert_eq!(
        response["result"]["structuredContent"]["error"],
        json!("policy_violation")
    );
    assert!(server.finish().success());
}

#[test]
fn oversized_frame_is_rejected_and_loop_survives() {
    let mut server = RawServer::start();
    let huge = "x".repeat(9 * 1024 * 1024);
    server.send_line(&format!(
        r#"{{"jsonrpc":"2.0","id":1,"method":"tools/call","params":{{"name":"rw.risk_score","arguments":{{"content":"{huge}"}}}}}}"#
    ));
    let response = server.read_response();
    assert_eq!(response["error"]["code"], json!(-32600));
    assert!(response["error"]["message"].as_str().unwrap().contains("chunk"));
    server.send_line(r#"{"jsonrpc":"2.0","id":2,"method":"ping"}"#);
    assert_eq!(server.read_response()["id"], json!(2));
    assert!(server.finish().success());
}

#[test]
fn n_requests_get_n_responses_in_order() {
    let mut server = RawServer::start();
    for i in 1..=20 {
        let method = if i % 3 == 0 { "tools/list" } else { "ping" };
        server.send_line(&format!(r#"{{"jsonrpc":"2.0","id":{i},"method":"{method}"}}"#));
    }
    for i in 1..=20 {
        let response = server.read_response();
        assert_eq!(response["id"], json!(i));
    }
    assert!(server.finish().success());
}

#[test]
fn wrong_jsonrpc_version_is_invalid_request() {
    let mut server = RawServer::start();
    server.send_line(r#"{"jsonrpc":"1.0","id":1,"method":"ping"}"#);
    let response = server.read_response();
    assert_eq!(response["error"]["code"], json!(-32600));
    assert!(server.finish().success());
}

#[test]
fn once_mode_dispatches_and_prints_result() {
    let workspace = tempfile::tempdir().unwrap();
    let output = Command::new(server_bin())
        .arg("--workspace")
        .arg(workspace.path())
        .arg("--once")
        .arg("rw.validate")
        .arg(r#"{"content":"{}","format":"json"}"#)
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["ok"], json!(true));
    assert_eq!(value["valid"], json!(true));

    // failing dispatch exits nonzero
    let output = Command::new(server_bin())
        .arg("--workspace")
        .arg(workspace.path())
        .arg("--once")
        .arg("rw.scratch_get")
        .arg(format!(r#"{{"sha256":"{}"}}"#, "0".repeat(64)))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let value: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["ok"], json!(false));
}

#[test]
fn handler_panic_becomes_envelope_and_server_survives() {
    let workspace = tempfile::tempdir().unwrap();
    let mut child = Command::new(server_bin())
        .arg("--workspace")
        .arg(workspace.path())
        .env("RW_TEST_PANIC_TOOL", "rw.analytics")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    let mut stdout = BufReader::new(child.stdout.take().unwrap());
    let mut roundtrip = |line: &str| -> Value {
        stdin.write_all(line.as_bytes()).unwrap();
        stdin.write_all(b"\n").unwrap();
        stdin.flush().unwrap();
        let mut response = String::new();
        stdout.read_line(&mut response).unwrap();
        serde_json::from_str(&response).unwrap()
    };
    let panicked = roundtrip(
        r#"{"jsonrpc":"2.0","id":1,"method":"tools/call","params":{"name":"rw.analytics","arguments":{}}}"#,
    );
    let envelope = &panicked["result"]["structuredContent"];
    assert_eq!(envelope["ok"], json!(false));
    assert_eq!(envelope["error"], json!("policy_violation"));
    assert!(envelope["context"]["detail"].as_str().unwrap().contains("internal error"));
    // the process survived and other tools still work
    let healthy = roundtrip(
        r#"{"jsonrpc":"2.0","id":2,"method":"tools/call","params":{"name":"rw.risk_score","arguments":{"content":"x"}}}"#,
    );
    assert_eq!(healthy["result"]["structuredContent"]["ok"], json!(true));
    drop(stdin);
    let status = child.wait().unwrap();
    assert!(status.success());
}

#[test]
fn deny_listed_workspace_is_fatal_at_startup() {
    let output = Command::new(server_bin())
        .arg("--workspace")
        .arg("/tmp")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("deny-listed"), "{stderr}");
}

#[test]
fn env_workspace_is_used_when_no_flag() {
    let workspace = tempfile::tempdir().unwrap();
    let output = Command::new(server_bin())
        .env("RW_WORKSPACE", workspace.path())
        .arg("--once")
        .arg("rw.workspace_info")
        .arg("{}")
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["source"], json!("env"));
    let root = value["root"].as_str().unwrap();
    assert_eq!(
        std::path::Path::new(root),
        workspace.path().canonicalize().unwrap()
    );
}
