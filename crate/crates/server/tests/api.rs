use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use qrewrite::syntax::parse_derivation;
use qrewrite::{apply_rule, normalize, parse_term, render_canonical, render_dirac, standard_registry, NormalizeConfig};
use qrewrite_server::{router, AppState, ServerConfig, ROUTES};

fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

fn app_with(config: ServerConfig) -> (Router, Arc<AppState>) {
    let state = AppState::new(config);
    (router(state.clone()), state)
}

fn app() -> Router {
    app_with(ServerConfig::default()).0
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let builder = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => builder.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => builder.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn create(app: &Router, term: &str) -> Value {
    let (status, v) = call(app, "POST", "/sessions", Some(json!({ "term": term }))).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v
}

fn id(v: &Value) -> String {
    v["sessionId"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn create_reports_sort_and_renderings() {
    let app = app();
    let row1 = fixture("table1_row1.term");
    let v = create(&app, &row1).await;
    let t = parse_term(row1.trim()).unwrap();
    assert_eq!(v["sort"], "vector[a]");
    assert_eq!(v["canonical"], render_canonical(&t));
    assert_eq!(v["dirac"], render_dirac(&t));
    assert_eq!(v["version"], 0);
    assert_eq!(v["stepCount"], 0);
    assert!(!v["spans"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn malformed_and_ill_sorted_terms_are_rejected_with_spans() {
    let app = app();
    let (status, v) = call(&app, "POST", "/sessions", Some(json!({ "term": "plusV(V:x@a," }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::BAD_REQUEST, Some("ParseError")));
    assert!(v["span"]["start"].as_u64().unwrap() <= v["span"]["end"].as_u64().unwrap());

    let (status, v) = call(&app, "POST", "/sessions", Some(json!({ "term": "ip(V:x@a, V:y@b)" }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::BAD_REQUEST, Some("SortError")));
    assert_eq!(v["span"], json!({ "start": 0, "end": 16 }));

    let (status, v) = call(&app, "POST", "/sessions", Some(json!({ "nope": 1 }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::BAD_REQUEST, Some("BadRequest")));
}

#[tokio::test]
async fn table1_moves_apply_and_undo() {
    let app = app();
    let row1 = fixture("table1_row1.term");
    let sid = id(&create(&app, &row1).await);
    let (status, moves) = call(&app, "GET", &format!("/sessions/{sid}/moves"), None).await;
    assert_eq!(status, StatusCode::OK);
    let list = moves["moves"].as_array().unwrap();
    let first = list
        .iter()
        .find(|m| m["ruleId"] == "multiplyRightApply" && m["direction"] == "fwd" && m["position"] == "eps")
        .expect("first worked-example move offered");

    let doc = parse_derivation(&fixture("table1.deriv")).unwrap();
    let row2 = apply_rule(&doc.initial, &doc.steps[0], &standard_registry()).unwrap();
    assert_eq!(first["preview"], render_dirac(&row2));

    let req = json!({ "index": first["index"], "version": moves["version"] });
    let (status, after) = call(&app, "POST", &format!("/sessions/{sid}/apply"), Some(req.clone())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after["dirac"], render_dirac(&row2));
    assert_eq!(after["stepCount"], 1);

    let (status, v) = call(&app, "POST", &format!("/sessions/{sid}/apply"), Some(req)).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::CONFLICT, Some("StaleMoves")));
    assert_eq!(v["version"], after["version"]);

    let (status, undone) = call(&app, "POST", &format!("/sessions/{sid}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(undone["dirac"], render_dirac(&doc.initial));
    let (status, v) = call(&app, "POST", &format!("/sessions/{sid}/undo"), None).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::CONFLICT, Some("NothingToUndo")));

    let version = undone["version"].clone();
    let (status, v) =
        call(&app, "POST", &format!("/sessions/{sid}/apply"), Some(json!({ "index": 10_000, "version": version }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::CONFLICT, Some("MoveOutOfRange")));
}

#[tokio::test]
async fn every_listed_move_applies() {
    let app = app();
    let sid = id(&create(&app, &fixture("table1_row1.term")).await);
    let (_, moves) = call(&app, "GET", &format!("/sessions/{sid}/moves"), None).await;
    for m in moves["moves"].as_array().unwrap() {
        let (_, fresh) = call(&app, "GET", &format!("/sessions/{sid}/moves"), None).await;
        let req = json!({ "index": m["index"], "version": fresh["version"] });
        let (status, v) = call(&app, "POST", &format!("/sessions/{sid}/apply"), Some(req)).await;
        assert_eq!(status, StatusCode::OK, "{m}: {v}");
        assert_eq!(v["dirac"], m["preview"]);
        call(&app, "POST", &format!("/sessions/{sid}/undo"), None).await;
    }
}

#[tokio::test]
async fn constants_have_no_moves() {
    let app = app();
    let sid = id(&create(&app, "V:psi@a").await);
    let (_, v) = call(&app, "GET", &format!("/sessions/{sid}/moves"), None).await;
    assert_eq!(v["moves"], json!([]));
}

#[tokio::test]
async fn explicit_steps_replay_table1() {
    let app = app();
    let doc = parse_derivation(&fixture("table1.deriv")).unwrap();
    let sid = id(&create(&app, &render_canonical(&doc.initial)).await);
    let mut last = Value::Null;
    for s in &doc.steps {
        let req = json!({ "ruleId": s.rule_id, "direction": s.direction, "position": s.position });
        let (status, v) = call(&app, "POST", &format!("/sessions/{sid}/step"), Some(req)).await;
        assert_eq!(status, StatusCode::OK, "{s}: {v}");
        last = v;
    }
    assert_eq!(last["canonical"], render_canonical(doc.expect.as_ref().unwrap()));

    let bad = json!({ "ruleId": "applyProjector", "direction": "fwd", "position": "eps" });
    let (status, v) = call(&app, "POST", &format!("/sessions/{sid}/step"), Some(bad)).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("NoMatch")));
    let bad = json!({ "ruleId": "applyProjector", "direction": "sideways", "position": "eps" });
    let (status, _) = call(&app, "POST", &format!("/sessions/{sid}/step"), Some(bad)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn teleportation_session_normalizes_and_exports() {
    let app = app();
    let sid = id(&create(&app, &fixture("teleport.term")).await);
    let (status, v) = call(&app, "POST", &format!("/sessions/{sid}/normalize"), None).await;
    assert_eq!(status, StatusCode::OK, "{v}");

    let reg = standard_registry();
    let cfg = NormalizeConfig::default();
    let reference = parse_term(fixture("teleport_final.term").trim()).unwrap();
    let (expected, _) = normalize(&reference, &reg, &cfg).unwrap();
    assert_eq!(v["canonical"], render_canonical(&expected));
    let taken = v["stepsTaken"].as_u64().unwrap();
    assert_eq!(v["stepCount"].as_u64(), Some(taken));

    let (status, again) = call(&app, "POST", &format!("/sessions/{sid}/normalize"), None).await;
    assert_eq!((status, again["stepsTaken"].as_u64()), (StatusCode::OK, Some(0)));

    let (status, d) = call(&app, "GET", &format!("/sessions/{sid}/derivation"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(d["steps"].as_array().unwrap().len() as u64, taken);
    let text = d["text"].as_str().unwrap();

    let opts = qrewrite_cli::Options::default();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = qrewrite_cli::replay_derivation(text, &opts, &mut out, &mut err);
    assert_eq!(code, qrewrite_cli::Exit::Success, "{}", String::from_utf8_lossy(&err));
    assert!(String::from_utf8(out).unwrap().contains(&render_canonical(&expected)));

    let (status, r) = call(&app, "POST", "/replay", Some(json!({ "text": text }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!((r["verified"].as_bool(), &r["final"]["canonical"]), (Some(true), &v["canonical"]));
}

#[tokio::test]
async fn undo_reverts_a_whole_normalization() {
    let app = app();
    let sid = id(&create(&app, "plusV(V:z@a, plusV(V:y@a, V:x@a))").await);
    let (_, n) = call(&app, "POST", &format!("/sessions/{sid}/normalize"), None).await;
    assert!(n["stepsTaken"].as_u64().unwrap() > 1);
    let (_, u) = call(&app, "POST", &format!("/sessions/{sid}/undo"), None).await;
    assert_eq!(u["canonical"], "plusV(V:z@a, plusV(V:y@a, V:x@a))");
    assert_eq!(u["stepCount"], 0);
}

#[tokio::test]
async fn step_limit_is_reported() {
    let app = app();
    let sid = id(&create(&app, &fixture("teleport.term")).await);
    let (status, v) = call(&app, "POST", &format!("/sessions/{sid}/normalize"), Some(json!({ "maxSteps": 1 }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("StepLimitExceeded")));
    let (_, s) = call(&app, "GET", &format!("/sessions/{sid}"), None).await;
    assert_eq!(s["stepCount"], 0);
}

#[tokio::test]
async fn replay_endpoint_reports_failing_step() {
    let app = app();
    let text = fixture("table1.deriv").replace("multiplyRightApply fwd 2.2\n", "multiplyRightApply fwd 2.1\n");
    let (status, v) = call(&app, "POST", "/replay", Some(json!({ "text": text }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("ReplayError")));
    assert_eq!(v["stepIndex"], 2);
    let (status, v) = call(&app, "POST", "/replay", Some(json!({ "text": "junk" }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::BAD_REQUEST, Some("DerivationParseError")));
}

#[tokio::test]
async fn unknown_sessions_and_deletion() {
    let app = app();
    for (method, path) in [("GET", "/sessions/nope"), ("GET", "/sessions/nope/moves"), ("POST", "/sessions/nope/undo")] {
        let (status, v) = call(&app, method, path, None).await;
        assert_eq!((status, v["error"].as_str()), (StatusCode::NOT_FOUND, Some("SessionNotFound")));
    }
    let (status, _) =
        call(&app, "POST", "/sessions/nope/apply", Some(json!({ "index": 0, "version": 0 }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let sid = id(&create(&app, "V:x@a").await);
    assert_eq!(call(&app, "DELETE", &format!("/sessions/{sid}"), None).await.0, StatusCode::NO_CONTENT);
    assert_eq!(call(&app, "GET", &format!("/sessions/{sid}"), None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn idle_sessions_expire() {
    let config = ServerConfig { idle_timeout: Duration::from_millis(50), ..ServerConfig::default() };
    let (app, state) = app_with(config);
    let a = id(&create(&app, "V:x@a").await);
    let b = id(&create(&app, "V:y@a").await);
    tokio::time::sleep(Duration::from_millis(120)).await;
    assert_eq!(call(&app, "GET", &format!("/sessions/{a}"), None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(state.reap(), 1);
    assert!(state.is_empty());
    assert_eq!(call(&app, "GET", &format!("/sessions/{b}"), None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn render_and_rules() {
    let app = app();
    let (status, v) = call(&app, "POST", "/render", Some(json!({ "term": "tensorV(V:y@b, V:x@a)" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!((v["sort"].as_str(), v["dirac"].as_str()), (Some("vector[a*b]"), Some("|y⟩_b ⊗ |x⟩_a")));
    let (_, rules) = call(&app, "GET", "/rules", None).await;
    assert_eq!(rules.as_array().unwrap().len(), 41);
}

#[tokio::test]
async fn openapi_document_matches_the_router() {
    let app = app();
    let (status, doc) = call(&app, "GET", "/openapi.json", None).await;
    assert_eq!(status, StatusCode::OK);
    let schemas = doc["components"]["schemas"].as_object().unwrap();
    let text = doc.to_string();
    for name in text.split("#/components/schemas/").skip(1).map(|s| s.split('"').next().unwrap()) {
        assert!(schemas.contains_key(name), "undefined schema {name}");
    }
    for route in ROUTES {
        let op = &doc["paths"][route.path][route.method];
        assert_eq!(op["operationId"], route.operation_id);
        let uri = route.path.replace("{id}", "missing");
        let (status, v) = call(&app, &route.method.to_uppercase(), &uri, None).await;
        assert_ne!(status, StatusCode::METHOD_NOT_ALLOWED, "{} {}", route.method, route.path);
        assert_ne!(v["error"], "NoRoute", "{} {}", route.method, route.path);
    }
    let (status, v) = call(&app, "GET", "/nowhere", None).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::NOT_FOUND, Some("NoRoute")));
}
