//! C ABI for the resilient-write tool server.
//!
//! The surface is deliberately small: open a server handle bound to one
//! workspace, dispatch `(tool name, JSON arguments)` calls that return JSON
//! strings, list the tool catalog, and free what was returned. Tool
//! failures are *results* (typed error-envelope JSON with `"ok": false`),
//! not status codes; [`RwStatus`] covers only FFI-level misuse such as null
//! pointers, invalid UTF-8, or an unresolvable workspace.
//!
//! Every returned `char*` is allocated by this library and must be released
//! with [`rw_string_free`]. Handles are not thread-safe; callers must
//! serialise access to one handle, matching the server's own sequential
//! dispatch model.

use std::ffi::{c_char, CStr, CString};
use std::panic::AssertUnwindSafe;
use std::path::Path;

use resilient_write::transport::ServerState;
use resilient_write::workspace::resolve_root;

/// Status codes for FFI-level failures. Tool-level failures are JSON
/// error envelopes returned through the result string with RW_STATUS_OK.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    WorkspaceError = 3,
    InvalidJson = 4,
    Internal = 5,
}

/// Opaque server handle: one bound workspace, one policy, one journal,
/// one retry ledger.
pub struct RwServer {
    state: ServerState,
}

fn string_out(out: *mut *mut c_char, value: String) -> RwStatus {
    match CString::new(value) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            RwStatus::Ok
        }
        Err(_) => RwStatus::Internal,
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, RwStatus> {
    if ptr.is_null() {
        return Err(RwStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| RwStatus::InvalidUtf8)
}

/// Open a server bound to `workspace_path`. On success writes a handle to
/// `out_server` and returns RW_STATUS_OK. On failure, if `out_error` is
/// non-null it receives a message (free with [`rw_string_free`]).
///
/// # Safety
/// `workspace_path` must be a valid NUL-terminated string. `out_server`
/// must be a valid pointer. `out_error` may be null.
#[no_mangle]
pub unsafe extern "C" fn rw_server_open(
    workspace_path: *const c_char,
    out_server: *mut *mut RwServer,
    out_error: *mut *mut c_char,
) -> RwStatus {
    if out_server.is_null() {
        return RwStatus::NullArgument;
    }
    *out_server = std::ptr::null_mut();
    let path = match str_arg(workspace_path) {
        Ok(path) => path,
        Err(status) => return status,
    };
    let opened = std::panic::catch_unwind(|| {
        let cwd = std::env::current_dir().unwrap_or_else(|_| "/".into());
        let root = resolve_root(None, &cwd, Some(Path::new(path)))?;
        ServerState::new(root).map_err(|e| {
            resilient_write::workspace::RootError::Io {
                path: Path::new(path).to_path_buf(),
                source: e,
            }
        })
    });
    match opened {
        Ok(Ok(state)) => {
            *out_server = Box::into_raw(Box::new(RwServer { state }));
            RwStatus::Ok
        }
        Ok(Err(e)) => {
            if !out_error.is_null() {
                let _ = string_out(out_error, e.to_string());
            }
            RwStatus::WorkspaceError
        }
        Err(_) => RwStatus::Internal,
    }
}

/// Release a handle returned by [`rw_server_open`]. A null pointer is a
/// no-op.
///
/// # Safety
/// `server` must be a pointer from [`rw_server_open`] that has not already
/// been closed.
#[no_mangle]
pub unsafe extern "C" fn rw_server_close(server: *mut RwServer) {
    if !server.is_null() {
        drop(Box::from_raw(server));
    }
}

/// Dispatch one tool call. `args_json` must be a JSON object (or empty /
/// null for tools without arguments). On RW_STATUS_OK, `out_result_json`
/// receives the tool's JSON result; inspect its `ok` field, since failures
/// are typed error envelopes, not status codes.
///
/// # Safety
/// `server` must be a live handle; `tool_name` and `out_result_json` must
/// be valid pointers; `args_json` may be null.
#[no_mangle]
pub unsafe extern "C" fn rw_server_dispatch(
    server: *mut RwServer,
    tool_name: *const c_char,
    args_json: *const c_char,
    out_result_json: *mut *mut c_char,
) -> RwStatus {
    if server.is_null() || out_result_json.is_null() {
        return RwStatus::NullArgument;
    }
    *out_result_json = std::ptr::null_mut();
    let tool = match str_arg(tool_name) {
        Ok(tool) => tool,
        Err(status) => return status,
    };
    let args: serde_json::Value = if args_json.is_null() {
        serde_json::json!({})
    } else {
        let text = match str_arg(args_json) {
            Ok(text) => text,
            Err(status) => return status,
        };
        if text.trim().is_empty() {
            serde_json::json!({})
        } else {
            match serde_json::from_str(text) {
                Ok(value) => value,
                Err(_) => return RwStatus::InvalidJson,
            }
        }
    };
    let server = &mut *server;
    let outcome = std::panic::catch_unwind(AssertUnwindSafe(|| server.state.dispatch(tool, args)));
    match outcome {
        Ok(value) => string_out(out_result_json, value.to_string()),
        Err(_) => RwStatus::Internal,
    }
}

/// Write the tool catalog (a JSON array of descriptors with name,
/// description, and inputSchema) to `out_catalog_json`.
///
/// # Safety
/// `server` must be a live handle; `out_catalog_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rw_server_catalog(
    server: *mut RwServer,
    out_catalog_json: *mut *mut c_char,
) -> RwStatus {
    if server.is_null() || out_catalog_json.is_null() {
        return RwStatus::NullArgument;
    }
    let server = &*server;
    match serde_json::to_string(server.state.catalog()) {
        Ok(json) => string_out(out_catalog_json, json),
        Err(_) => RwStatus::Internal,
    }
}

/// Free a string returned by this library. A null pointer is a no-op.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn rw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn rw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    struct Handle(*mut RwServer);
    impl Drop for Handle {
        fn drop(&mut self) {
            unsafe { rw_server_close(self.0) };
        }
    }

    fn open(dir: &Path) -> Handle {
        let path = CString::new(dir.to_str().unwrap()).unwrap();
        let mut server: *mut RwServer = std::ptr::null_mut();
        let status = unsafe { rw_server_open(path.as_ptr(), &mut server, std::ptr::null_mut()) };
        assert_eq!(status, RwStatus::Ok);
        assert!(!server.is_null());
        Handle(server)
    }

    fn dispatch(handle: &Handle, tool: &str, args: &str) -> serde_json::Value {
        let tool = CString::new(tool).unwrap();
        let args = CString::new(args).unwrap();
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { rw_server_dispatch(handle.0, tool.as_ptr(), args.as_ptr(), &mut out) };
        assert_eq!(status, RwStatus::Ok);
        let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
        unsafe { rw_string_free(out) };
        serde_json::from_str(&text).unwrap()
    }

    #[test]
    fn open_dispatch_close_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let handle = open(dir.path());
        let value = dispatch(&handle, "rw.risk_score", r#"{"content": ""}"#);
        assert_eq!(value["ok"], serde_json::json!(true));
        assert_eq!(value["verdict"], serde_json::json!("safe"));

        let write = dispatch(
            &handle,
            "rw.safe_write",
            r#"{"path": "from_c.txt", "content": "via ffi", "mode": "create"}"#,
        );
        assert_eq!(write["ok"], serde_json::json!(true));
        assert_eq!(
            std::fs::read_to_string(dir.path().join("from_c.txt")).unwrap(),
            "via ffi"
        );
    }

    #[test]
    fn failures_are_envelopes_with_ok_status() {
        let dir = tempfile::tempdir().unwrap();
        let handle = open(dir.path());
        let value = dispatch(
            &handle,
            "rw.safe_write",
            r#"{"path": "../escape", "content": "x", "mode": "create"}"#,
        );
        assert_eq!(value["ok"], serde_json::json!(false));
        assert_eq!(value["error"], serde_json::json!("policy_violation"));
    }

    #[test]
    fn catalog_lists_sixteen_tools() {
        let dir = tempfile::tempdir().unwrap();
        let handle = open(dir.path());
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { rw_server_catalog(handle.0, &mut out) };
        assert_eq!(status, RwStatus::Ok);
        let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
        unsafe { rw_string_free(out) };
        let catalog: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(catalog.as_array().unwrap().len(), 16);
    }

    #[test]
    fn null_and_utf8_misuse_is_reported_by_status() {
        let dir = tempfile::tempdir().unwrap();
        let handle = open(dir.path());
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe {
            rw_server_dispatch(handle.0, std::ptr::null(), std::ptr::null(), &mut out)
        };
        assert_eq!(status, RwStatus::NullArgument);

        let bad = CString::new([0xFFu8, 0xFE, b'x'].to_vec()).unwrap();
        let status = unsafe { rw_server_dispatch(handle.0, bad.as_ptr(), std::ptr::null(), &mut out) };
        assert_eq!(status, RwStatus::InvalidUtf8);

        let tool = CString::new("rw.analytics").unwrap();
        let garbage = CString::new("{not json").unwrap();
        let status = unsafe { rw_server_dispatch(handle.0, tool.as_ptr(), garbage.as_ptr(), &mut out) };
        assert_eq!(status, RwStatus::InvalidJson);
    }

    #[test]
    fn deny_listed_workspace_reports_error_message() {
        let path = CString::new("/tmp").unwrap();
        let mut server: *mut RwServer = std::ptr::null_mut();
        let mut error: *mut c_char = std::ptr::null_mut();
        let status = unsafe { rw_server_open(path.as_ptr(), &mut server, &mut error) };
        assert_eq!(status, RwStatus::WorkspaceError);
        assert!(server.is_null());
        assert!(!error.is_null());
        let message = unsafe { CStr::from_ptr(error) }.to_str().unwrap().to_string();
        unsafe { rw_string_free(error) };
        assert!(message.contains("deny-listed"), "{message}");
    }

    #[test]
    fn version_is_a_static_string() {
        let version = unsafe { CStr::from_ptr(rw_version()) }.to_str().unwrap();
        assert_eq!(version, env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn generated_header_covers_the_surface() {
        let header_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/resilient_write.h");
        let header = std::fs::read_to_string(&header_path).expect("header generated at build time");
        for symbol in [
            "rw_server_open",
            "rw_server_close",
            "rw_server_dispatch",
            "rw_server_catalog",
            "rw_string_free",
            "rw_version",
            "RwServer",
            "RwStatus",
        ] {
            assert!(header.contains(symbol), "header lacks {symbol}");
        }
    }
}
