//! The route table. The router and the OpenAPI document are both built
//! from it, so they cannot drift apart.

use std::sync::Arc;

use axum::routing::{delete, get, post, MethodRouter};
use serde_json::{json, Map, Value};

use crate::handlers;
use crate::AppState;

pub struct Route {
    pub method: &'static str,
    /// Path in OpenAPI template syntax, which axum also accepts.
    pub path: &'static str,
    pub operation_id: &'static str,
    pub summary: &'static str,
    /// Request body schema, if any.
    pub request: Option<&'static str>,
    pub success: (u16, Option<&'static str>),
    pub errors: &'static [u16],
    pub handler: fn() -> MethodRouter<Arc<AppState>>,
}

pub const ROUTES: &[Route] = &[
    Route {
        method: "post",
        path: "/sessions",
        operation_id: "createSession",
        summary: "Start a derivation from a term",
        request: Some("TermRequest"),
        success: (201, Some("SessionState")),
        errors: &[400],
        handler: || post(handlers::create_session),
    },
    Route {
        method: "get",
        path: "/sessions/{id}",
        operation_id: "getSession",
        summary: "Current term of a session",
        request: None,
        success: (200, Some("SessionState")),
        errors: &[404],
        handler: || get(handlers::get_session),
    },
    Route {
        method: "delete",
        path: "/sessions/{id}",
        operation_id: "deleteSession",
        summary: "Discard a session",
        request: None,
        success: (204, None),
        errors: &[404],
        handler: || delete(handlers::delete_session),
    },
    Route {
        method: "get",
        path: "/sessions/{id}/moves",
        operation_id: "listMoves",
        summary: "Applicable rewrites with previews, in a fixed order",
        request: None,
        success: (200, Some("MovesResponse")),
        errors: &[404],
        handler: || get(handlers::list_moves),
    },
    Route {
        method: "post",
        path: "/sessions/{id}/apply",
        operation_id: "applyMove",
        summary: "Apply a move by index into the move list of the given version",
        request: Some("ApplyRequest"),
        success: (200, Some("SessionState")),
        errors: &[400, 404, 409, 422],
        handler: || post(handlers::apply_move),
    },
    Route {
        method: "post",
        path: "/sessions/{id}/step",
        operation_id: "applyStep",
        summary: "Apply a named rule in a direction at a position",
        request: Some("StepRequest"),
        success: (200, Some("SessionState")),
        errors: &[400, 404, 422],
        handler: || post(handlers::apply_step),
    },
    Route {
        method: "post",
        path: "/sessions/{id}/undo",
        operation_id: "undo",
        summary: "Revert the last apply, step or normalize",
        request: None,
        success: (200, Some("SessionState")),
        errors: &[404, 409],
        handler: || post(handlers::undo),
    },
    Route {
        method: "post",
        path: "/sessions/{id}/normalize",
        operation_id: "normalize",
        summary: "Rewrite the current term to canonical form",
        request: Some("NormalizeRequest"),
        success: (200, Some("SessionState")),
        errors: &[400, 404, 422],
        handler: || post(handlers::normalize),
    },
    Route {
        method: "get",
        path: "/sessions/{id}/derivation",
        operation_id: "getDerivation",
        summary: "The steps taken so far as a derivation document",
        request: None,
        success: (200, Some("DerivationResponse")),
        errors: &[404],
        handler: || get(handlers::derivation),
    },
    Route {
        method: "post",
        path: "/render",
        operation_id: "render",
        summary: "Sort, canonical and Dirac renderings of a term",
        request: Some("TermRequest"),
        success: (200, Some("RenderResponse")),
        errors: &[400],
        handler: || post(handlers::render),
    },
    Route {
        method: "post",
        path: "/replay",
        operation_id: "replay",
        summary: "Replay a derivation document and check its expected result",
        request: Some("ReplayRequest"),
        success: (200, Some("ReplayResponse")),
        errors: &[400, 422],
        handler: || post(handlers::replay),
    },
    Route {
        method: "get",
        path: "/rules",
        operation_id: "listRules",
        summary: "Rules offered as moves",
        request: None,
        success: (200, Some("RuleList")),
        errors: &[],
        handler: || get(handlers::rules),
    },
    Route {
        method: "get",
        path: "/openapi.json",
        operation_id: "openapi",
        summary: "This document",
        request: None,
        success: (200, None),
        errors: &[],
        handler: || get(handlers::openapi),
    },
];

fn schema_ref(name: &str) -> Value {
    json!({ "$ref": format!("#/components/schemas/{name}") })
}

fn object(required: &[&str], properties: Value) -> Value {
    json!({ "type": "object", "required": required, "properties": properties })
}

fn schemas() -> Value {
    let string = json!({ "type": "string" });
    let int = json!({ "type": "integer", "minimum": 0 });
    let span = object(&["start", "end"], json!({ "start": int, "end": int }));
    let render_props = json!({
        "sort": { "type": "string", "example": "vector[a]" },
        "dirac": string,
        "canonical": string,
        "spans": { "type": "array", "items": schema_ref("DiracSpan") },
    });
    let mut state_props = render_props.as_object().unwrap().clone();
    for (k, v) in [
        ("sessionId", string.clone()),
        ("version", int.clone()),
        ("stepCount", int.clone()),
        ("canUndo", json!({ "type": "boolean" })),
        ("createdAt", json!({ "type": "integer", "description": "seconds since the Unix epoch" })),
        ("stepsTaken", int.clone()),
    ] {
        state_props.insert(k.to_string(), v);
    }
    let step = object(
        &["ruleId", "direction", "position"],
        json!({
            "ruleId": string,
            "direction": { "type": "string", "enum": ["fwd", "rev"] },
            "position": { "type": "string", "example": "2.1" },
        }),
    );
    json!({
        "TermRequest": object(&["term"], json!({ "term": string })),
        "DiracSpan": object(&["position", "start", "end"], json!({ "position": string, "start": int, "end": int })),
        "RenderResponse": object(&["sort", "dirac", "canonical", "spans"], render_props),
        "SessionState": object(
            &["sessionId", "version", "sort", "dirac", "canonical", "spans", "stepCount", "canUndo", "createdAt"],
            Value::Object(state_props),
        ),
        "MoveEntry": object(
            &["index", "ruleId", "direction", "position", "preview"],
            json!({
                "index": int,
                "ruleId": string,
                "direction": { "type": "string", "enum": ["fwd", "rev"] },
                "position": string,
                "preview": string,
            }),
        ),
        "MovesResponse": object(
            &["version", "moves"],
            json!({ "version": int, "moves": { "type": "array", "items": schema_ref("MoveEntry") } }),
        ),
        "ApplyRequest": object(&["index", "version"], json!({ "index": int, "version": int })),
        "StepRequest": step.clone(),
        "RewriteStep": step,
        "NormalizeRequest": object(&[], json!({ "maxSteps": { "type": "integer", "minimum": 1 } })),
        "DerivationResponse": object(
            &["text", "initial", "steps", "final"],
            json!({
                "text": string,
                "initial": string,
                "steps": { "type": "array", "items": schema_ref("RewriteStep") },
                "final": string,
            }),
        ),
        "ReplayRequest": object(&["text"], json!({ "text": string })),
        "ReplayResponse": object(
            &["verified", "stepCount", "final"],
            json!({ "verified": { "type": "boolean" }, "stepCount": int, "final": schema_ref("RenderResponse") }),
        ),
        "RuleList": {
            "type": "array",
            "items": object(
                &["id", "origin", "directions", "rule", "description"],
                json!({
                    "id": string,
                    "origin": { "type": "string", "enum": ["builtin", "user", "support", "optional"] },
                    "directions": { "type": "array", "items": { "type": "string", "enum": ["fwd", "rev"] } },
                    "rule": string,
                    "description": string,
                }),
            ),
        },
        "Error": object(
            &["error", "message"],
            json!({
                "error": {
                    "type": "string",
                    "description": "ParseError, SortError, NoMatch, StepLimitExceeded, ReplayError, StaleMoves, ...",
                },
                "message": string,
                "span": span,
                "stepIndex": int,
                "version": int,
            }),
        ),
    })
}

fn status_text(code: u16) -> &'static str {
    match code {
        200 => "OK",
        201 => "Created",
        204 => "No Content",
        400 => "Malformed request, term or derivation",
        404 => "Unknown session",
        409 => "Stale move list, move index out of range, or nothing to undo",
        422 => "Rule does not apply, step limit exceeded, or replay failed",
        _ => "",
    }
}

fn json_body(schema: Value) -> Value {
    json!({ "content": { "application/json": { "schema": schema } } })
}

/// OpenAPI 3 description of [`ROUTES`].
pub fn openapi_document() -> Value {
    let mut paths = Map::new();
    for r in ROUTES {
        let mut responses = Map::new();
        let (code, schema) = r.success;
        let mut ok = json!({ "description": status_text(code) });
        if let Some(s) = schema {
            ok.as_object_mut().unwrap().extend(json_body(schema_ref(s)).as_object().unwrap().clone());
        }
        responses.insert(code.to_string(), ok);
        for &e in r.errors {
            let mut v = json!({ "description": status_text(e) });
            v.as_object_mut().unwrap().extend(json_body(schema_ref("Error")).as_object().unwrap().clone());
            responses.insert(e.to_string(), v);
        }
        let mut op = json!({ "operationId": r.operation_id, "summary": r.summary, "responses": responses });
        if r.path.contains("{id}") {
            op["parameters"] = json!([{ "name": "id", "in": "path", "required": true, "schema": { "type": "string" } }]);
        }
        if let Some(req) = r.request {
            let mut body = json_body(schema_ref(req));
            body["required"] = json!(req != "NormalizeRequest");
            op["requestBody"] = body;
        }
        let item = paths.entry(r.path.to_string()).or_insert_with(|| json!({}));
        item[r.method] = op;
    }
    json!({
        "openapi": "3.0.3",
        "info": { "title": "qrewrite session service", "version": env!("CARGO_PKG_VERSION") },
        "paths": paths,
        "components": { "schemas": schemas() },
    })
}
