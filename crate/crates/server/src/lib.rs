//! JSON HTTP service for interactive derivations.
//!
//! Each session wraps a [`qrewrite::Session`]. Requests on one session are
//! serialized by a per-session lock; different sessions proceed in
//! parallel. Moves are applied by index into the last served move list
//! together with its version, so a client holding an outdated list gets
//! 409 instead of a rewrite at a shifted position.

mod error;
mod handlers;
mod openapi;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use axum::Router;

use qrewrite::{standard_registry, NormalizeConfig, Registry, Session, Term};

pub use error::ApiError;
pub use handlers::{
    ApplyRequest, CreateRequest, DerivationResponse, MoveEntry, MovesResponse, NormalizeRequest, RenderResponse,
    ReplayRequest, ReplayResponse, SessionState, StepRequest, TermRequest,
};
pub use openapi::{openapi_document, Route, ROUTES};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Clone, Debug)]
pub struct ServerConfig {
    pub registry: Registry,
    pub normalize: NormalizeConfig,
    /// Sessions untouched for this long are discarded.
    pub idle_timeout: Duration,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            registry: standard_registry(),
            normalize: NormalizeConfig::from_env(),
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
        }
    }
}

pub struct SessionRecord {
    pub session: Session,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub last_touched: Instant,
}

pub type SharedRecord = Arc<Mutex<SessionRecord>>;

pub struct AppState {
    pub config: ServerConfig,
    sessions: Mutex<HashMap<String, SharedRecord>>,
}

impl AppState {
    pub fn new(config: ServerConfig) -> Arc<Self> {
        Arc::new(AppState { config, sessions: Mutex::new(HashMap::new()) })
    }

    /// Registers a new session and returns its id.
    pub fn create(&self, term: Term) -> (String, SharedRecord) {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let record = Arc::new(Mutex::new(SessionRecord {
            session: Session::new(term, self.config.registry.clone(), self.config.normalize.clone()),
            created_at,
            last_touched: Instant::now(),
        }));
        self.sessions.lock().unwrap().insert(id.clone(), record.clone());
        (id, record)
    }

    /// Looks up a live session. Callers mark it as touched once they hold
    /// its lock.
    pub fn get(&self, id: &str) -> Option<SharedRecord> {
        let record = self.sessions.lock().unwrap().get(id)?.clone();
        let expired = match record.try_lock() {
            Ok(g) => g.last_touched.elapsed() > self.config.idle_timeout,
            Err(_) => false,
        };
        if expired {
            self.sessions.lock().unwrap().remove(id);
            return None;
        }
        Some(record)
    }

    pub fn remove(&self, id: &str) -> bool {
        self.sessions.lock().unwrap().remove(id).is_some()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops idle sessions. Returns how many were removed.
    pub fn reap(&self) -> usize {
        let timeout = self.config.idle_timeout;
        let mut sessions = self.sessions.lock().unwrap();
        let before = sessions.len();
        // A session busy with a long request is locked and therefore live.
        sessions.retain(|_, r| r.try_lock().map_or(true, |g| g.last_touched.elapsed() <= timeout));
        before - sessions.len()
    }
}

/// The HTTP application, built from [`ROUTES`].
pub fn router(state: Arc<AppState>) -> Router {
    ROUTES
        .iter()
        .fold(Router::new(), |r, route| r.route(route.path, (route.handler)()))
        .fallback(handlers::no_route)
        .with_state(state)
}

/// Periodically discards idle sessions.
pub fn spawn_reaper(state: Arc<AppState>) -> tokio::task::JoinHandle<()> {
    let period = (state.config.idle_timeout / 4).clamp(Duration::from_millis(100), Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            state.reap();
        }
    })
}
