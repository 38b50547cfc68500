use std::sync::{Arc, MutexGuard};
use std::time::Instant;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::Json;
use serde::{Deserialize, Serialize};

use qrewrite::rules::{apply_rule, RuleOrigin};
use qrewrite::strategy::{verify, VerifyError};
use qrewrite::syntax::{
    parse_derivation, parse_term_with_sort, render_derivation, render_dirac_annotated, render_rule, DiracSpan,
};
use qrewrite::{render_canonical, Direction, Position, RewriteStep, Session, Term};

use crate::error::ApiError;
use crate::openapi::openapi_document;
use crate::{AppState, SessionRecord};

type Shared = State<Arc<AppState>>;
type ApiResult<T> = Result<T, ApiError>;

#[derive(Clone, Debug, Deserialize)]
pub struct TermRequest {
    pub term: String,
}

pub type CreateRequest = TermRequest;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RenderResponse {
    pub sort: String,
    pub dirac: String,
    pub canonical: String,
    /// Where each subterm's rendering sits in `dirac`, in characters.
    pub spans: Vec<DiracSpan>,
}

impl RenderResponse {
    fn of(t: &Term) -> ApiResult<Self> {
        let sort = qrewrite::sort_of(t).map_err(|e| ApiError::bad_request(e.to_string()))?;
        let (dirac, spans) = render_dirac_annotated(t);
        Ok(RenderResponse { sort: sort.to_string(), dirac, canonical: render_canonical(t), spans })
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionState {
    pub session_id: String,
    /// Version of the current move list; required by `apply`.
    pub version: u64,
    #[serde(flatten)]
    pub term: RenderResponse,
    /// Steps recorded since the initial term.
    pub step_count: usize,
    pub can_undo: bool,
    pub created_at: u64,
    /// Steps taken by the request that produced this state, for `normalize`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_taken: Option<usize>,
}

impl SessionState {
    fn of(id: &str, r: &SessionRecord) -> ApiResult<Self> {
        let s = &r.session;
        Ok(SessionState {
            session_id: id.to_string(),
            version: s.version(),
            term: RenderResponse::of(s.current())?,
            step_count: s.steps().len(),
            can_undo: !s.history().is_empty(),
            created_at: r.created_at,
            steps_taken: None,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MoveEntry {
    pub index: usize,
    pub rule_id: String,
    pub direction: Direction,
    pub position: Position,
    /// Dirac rendering of the term the move would produce.
    pub preview: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MovesResponse {
    pub version: u64,
    pub moves: Vec<MoveEntry>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ApplyRequest {
    pub index: usize,
    pub version: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepRequest {
    pub rule_id: String,
    pub direction: String,
    pub position: String,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NormalizeRequest {
    pub max_steps: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DerivationResponse {
    /// The derivation file text accepted by `qrewrite replay`.
    pub text: String,
    pub initial: String,
    pub steps: Vec<RewriteStep>,
    #[serde(rename = "final")]
    pub final_term: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ReplayRequest {
    pub text: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReplayResponse {
    /// True when the document had an `expect:` line and it matched.
    pub verified: bool,
    pub step_count: usize,
    #[serde(rename = "final")]
    pub final_term: RenderResponse,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RuleEntry {
    pub id: String,
    pub origin: RuleOrigin,
    pub directions: Vec<Direction>,
    pub rule: String,
    pub description: String,
}

fn body<T>(req: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    Ok(req?.0)
}

fn parse(text: &str) -> ApiResult<Term> {
    Ok(parse_term_with_sort(text.trim())?.0)
}

/// Locks a session for the duration of one request.
fn lock(record: &crate::SharedRecord) -> MutexGuard<'_, SessionRecord> {
    let mut guard = record.lock().unwrap_or_else(|p| p.into_inner());
    guard.last_touched = Instant::now();
    guard
}

fn with_session<T>(
    state: &AppState,
    id: &str,
    f: impl FnOnce(&mut SessionRecord) -> ApiResult<T>,
) -> ApiResult<T> {
    let record = state.get(id).ok_or_else(|| ApiError::not_found(id))?;
    let mut guard = lock(&record);
    f(&mut guard)
}

pub async fn create_session(
    State(state): Shared,
    req: Result<Json<CreateRequest>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let term = parse(&body(req)?.term)?;
    let (id, record) = state.create(term);
    let guard = lock(&record);
    Ok((StatusCode::CREATED, Json(SessionState::of(&id, &guard)?)))
}

pub async fn get_session(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<SessionState>> {
    with_session(&state, &id, |r| SessionState::of(&id, r)).map(Json)
}

pub async fn delete_session(State(state): Shared, Path(id): Path<String>) -> ApiResult<StatusCode> {
    if state.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::not_found(&id))
    }
}

pub async fn list_moves(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<MovesResponse>> {
    with_session(&state, &id, |r| {
        let s: &Session = &r.session;
        let moves = s
            .moves()
            .iter()
            .enumerate()
            .map(|(index, m)| {
                let next = apply_rule(s.current(), m, s.registry())?;
                Ok(MoveEntry {
                    index,
                    rule_id: m.rule_id.clone(),
                    direction: m.direction,
                    position: m.position.clone(),
                    preview: qrewrite::render_dirac(&next),
                })
            })
            .collect::<ApiResult<_>>()?;
        Ok(Json(MovesResponse { version: s.version(), moves }))
    })
}

pub async fn apply_move(
    State(state): Shared,
    Path(id): Path<String>,
    req: Result<Json<ApplyRequest>, JsonRejection>,
) -> ApiResult<Json<SessionState>> {
    let req = body(req)?;
    with_session(&state, &id, |r| {
        r.session.apply_move(req.index, req.version)?;
        SessionState::of(&id, r).map(Json)
    })
}

pub async fn apply_step(
    State(state): Shared,
    Path(id): Path<String>,
    req: Result<Json<StepRequest>, JsonRejection>,
) -> ApiResult<Json<SessionState>> {
    let req = body(req)?;
    let direction: Direction = req.direction.parse().map_err(|e| ApiError::bad_request(format!("{e}")))?;
    let position: Position = req.position.parse().map_err(|e| ApiError::bad_request(format!("{e}")))?;
    with_session(&state, &id, |r| {
        r.session.apply_step(RewriteStep::new(req.rule_id, direction, position))?;
        SessionState::of(&id, r).map(Json)
    })
}

pub async fn undo(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<SessionState>> {
    with_session(&state, &id, |r| {
        r.session.undo()?;
        SessionState::of(&id, r).map(Json)
    })
}

pub async fn normalize(
    State(state): Shared,
    Path(id): Path<String>,
    req: Option<Json<NormalizeRequest>>,
) -> ApiResult<Json<SessionState>> {
    let req = req.map(|Json(r)| r).unwrap_or_default();
    let record = state.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let task = tokio::task::spawn_blocking(move || {
        let mut guard = lock(&record);
        let n = match req.max_steps {
            Some(limit) => guard.session.normalize_with(&state.config.normalize.clone().with_max_steps(limit)),
            None => guard.session.normalize(),
        }?;
        let mut out = SessionState::of(&id, &guard)?;
        out.steps_taken = Some(n);
        Ok(Json(out))
    });
    task.await.map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?
}

pub async fn derivation(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<DerivationResponse>> {
    with_session(&state, &id, |r| {
        let d = r.session.derivation();
        Ok(Json(DerivationResponse {
            text: render_derivation(&d.to_document()),
            initial: render_canonical(&d.initial),
            steps: d.steps,
            final_term: render_canonical(&d.final_term),
        }))
    })
}

pub async fn render(
    State(_): Shared,
    req: Result<Json<TermRequest>, JsonRejection>,
) -> ApiResult<Json<RenderResponse>> {
    RenderResponse::of(&parse(&body(req)?.term)?).map(Json)
}

pub async fn replay(
    State(state): Shared,
    req: Result<Json<ReplayRequest>, JsonRejection>,
) -> ApiResult<Json<ReplayResponse>> {
    let doc = parse_derivation(&body(req)?.text).map_err(|e| match e.term_error {
        Some(te) => ApiError::from(te),
        None => ApiError::new(StatusCode::BAD_REQUEST, "DerivationParseError", e.to_string()),
    })?;
    let end = verify(&doc, &state.config.registry).map_err(|e| match e {
        VerifyError::Replay(e) => ApiError::from(e),
        e @ VerifyError::Mismatch { .. } => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "Mismatch", e.to_string()),
    })?;
    Ok(Json(ReplayResponse {
        verified: doc.expect.is_some(),
        step_count: doc.steps.len(),
        final_term: RenderResponse::of(&end)?,
    }))
}

pub async fn rules(State(state): Shared) -> Json<Vec<RuleEntry>> {
    Json(
        state
            .config
            .registry
            .listed()
            .into_iter()
            .map(|r| RuleEntry {
                id: r.id().to_string(),
                origin: r.origin(),
                directions: r.directions().to_vec(),
                rule: render_rule(r),
                description: r.summary().to_string(),
            })
            .collect(),
    )
}

pub async fn openapi() -> Json<serde_json::Value> {
    Json(openapi_document())
}

pub async fn no_route() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "NoRoute", "no such endpoint")
}
