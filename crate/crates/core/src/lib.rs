//! Resilient Write: a durable-write tool server for coding agents.
//!
//! The server speaks JSON-RPC 2.0 over stdio (newline-delimited) and puts
//! six reliability layers between an agent and the filesystem:
//!
//! - [`risk`]: pre-flight risk scoring of draft content
//! - [`atomic`]: transactional writes (temp file, fsync, verify, rename)
//! - [`chunks`]: resumable chunked composition
//! - [`envelope`]: uniform typed error envelopes with retry budgets
//! - [`scratch`]: content-addressed out-of-band storage
//! - [`handoff`]: task-continuity envelopes with drift checks
//!
//! plus format validation ([`validate`]), journal analytics ([`journal`]),
//! and workspace containment ([`workspace`]). [`transport`] wires the
//! layers into the `rw.*` tool catalog.

pub mod atomic;
pub mod chunks;
pub mod docs;
pub mod envelope;
pub mod handoff;
pub mod harness;
pub mod journal;
pub mod risk;
pub mod schema;
pub mod scratch;
pub mod transport;
pub mod validate;
pub mod workspace;
pub mod yaml;

use journal::Journal;
use risk::RiskEngine;
use workspace::{Policy, WorkspaceRoot};

/// Borrowed view of server state handed to layer operations for the
/// duration of one tool call. The transport dispatches calls strictly
/// sequentially, so layers never see concurrent contexts.
pub struct ToolContext<'a> {
    pub root: &'a WorkspaceRoot,
    pub policy: &'a Policy,
    pub risk_engine: &'a RiskEngine,
    pub journal: &'a mut Journal,
    pub caller: &'a str,
    pub scratch_get_disabled: bool,
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::atomic::{safe_write, WriteMode, WriteReceipt, WriteRequest};
    use std::path::Path;

    /// Fresh temp workspace with default policy for unit tests.
    pub struct TestWorkspace {
        _dir: tempfile::TempDir,
        pub root: WorkspaceRoot,
        pub policy: Policy,
        pub journal: Journal,
        pub caller: String,
        pub scratch_get_disabled: bool,
    }

    impl TestWorkspace {
        pub fn new() -> Self {
            let dir = tempfile::tempdir().expect("temp workspace");
            let root =
                workspace::resolve_root(Some(dir.path().to_str().unwrap()), Path::new("/"), None)
                    .expect("temp root resolves");
            let journal = Journal::open(root.path()).expect("journal opens");
            TestWorkspace {
                _dir: dir,
                root,
                policy: Policy::default(),
                journal,
                caller: "test".to_string(),
                scratch_get_disabled: false,
            }
        }

        pub fn root_path(&self) -> &Path {
            self.root.path()
        }

        pub fn journal(&self) -> &Journal {
            &self.journal
        }

        pub fn with_ctx<T>(&mut self, f: impl FnOnce(&mut ToolContext) -> T) -> T {
            let engine = RiskEngine::new(&self.policy);
            let mut ctx = ToolContext {
                root: &self.root,
                policy: &self.policy,
                risk_engine: &engine,
                journal: &mut self.journal,
                caller: &self.caller,
                scratch_get_disabled: self.scratch_get_disabled,
            };
            f(&mut ctx)
        }

        pub fn write_tool(&mut self, path: &str, content: &[u8], mode: WriteMode) -> WriteReceipt {
            self.with_ctx(|ctx| {
                safe_write(
                    ctx,
                    WriteRequest {
                        path: path.to_string(),
                        content: content.to_vec(),
                        mode,
                        expected_prev_sha256: None,
                    },
                )
            })
            .expect("test write succeeds")
        }
    }
}
