#ifndef RESILIENT_WRITE_H
#define RESILIENT_WRITE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes for FFI-level failures. Tool-level failures are JSON
// error envelopes returned through the result string with RW_STATUS_OK.
typedef enum RwStatus {
  RW_STATUS_OK = 0,
  RW_STATUS_NULL_ARGUMENT = 1,
  RW_STATUS_INVALID_UTF8 = 2,
  RW_STATUS_WORKSPACE_ERROR = 3,
  RW_STATUS_INVALID_JSON = 4,
  RW_STATUS_INTERNAL = 5,
} RwStatus;

// Opaque server handle: one bound workspace, one policy, one journal,
// one retry ledger.
typedef struct RwServer RwServer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Open a server bound to `workspace_path`. On success writes a handle to
// `out_server` and returns RW_STATUS_OK. On failure, if `out_error` is
// non-null it receives a message (free with [`rw_string_free`]).
//
// # Safety
// `workspace_path` must be a valid NUL-terminated string. `out_server`
// must be a valid pointer. `out_error` may be null.
enum RwStatus rw_server_open(const char *workspace_path,
                             struct RwServer **out_server,
                             char **out_error);

// Release a handle returned by [`rw_server_open`]. A null pointer is a
// no-op.
//
// # Safety
// `server` must be a pointer from [`rw_server_open`] that has not already
// been closed.
void rw_server_close(struct RwServer *server);

// Dispatch one tool call. `args_json` must be a JSON object (or empty /
// null for tools without arguments). On RW_STATUS_OK, `out_result_json`
// receives the tool's JSON result; inspect its `ok` field, since failures
// are typed error envelopes, not status codes.
//
// # Safety
// `server` must be a live handle; `tool_name` and `out_result_json` must
// be valid pointers; `args_json` may be null.
enum RwStatus rw_server_dispatch(struct RwServer *server,
                                 const char *tool_name,
                                 const char *args_json,
                                 char **out_result_json);

// Write the tool catalog (a JSON array of descriptors with name,
// description, and inputSchema) to `out_catalog_json`.
//
// # Safety
// `server` must be a live handle; `out_catalog_json` must be valid.
enum RwStatus rw_server_catalog(struct RwServer *server, char **out_catalog_json);

// Free a string returned by this library. A null pointer is a no-op.
//
// # Safety
// `s` must have been returned by this library and not freed before.
void rw_string_free(char *s);

// Library version as a static string; do not free.
const char *rw_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESILIENT_WRITE_H */
