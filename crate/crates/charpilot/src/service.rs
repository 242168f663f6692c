//! HTTP prediction service.
//!
//! ```text
//! GET  /healthz               -> {"status":"ok"}
//! POST /v1/predict            {history, top_k?}   -> {ranking, engine}
//! POST /v1/session/keystroke  {session_id, char}  -> {ranking, engine, history}
//! POST /v1/session/reset      {session_id}        -> {}
//! ```
//!
//! Sessions only keep the typed history; every keystroke re-runs the
//! engine on the full string, so a session ranking always equals the
//! one-shot ranking of the same history.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use charpilot_core::error::PredictError;
use charpilot_core::predictor::EngineSummary;
use charpilot_core::{Engine, EngineConfig, RankedChar};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;
use tower_http::services::ServeDir;

use crate::Error;

pub const BIND_ENV: &str = "CHARPILOT_BIND";
pub const ENGINE_ENV: &str = "CHARPILOT_ENGINE";

fn default_bind() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 8080))
}
fn default_timeout_ms() -> u64 {
    30_000
}
fn default_max_sessions() -> usize {
    1024
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_bind")]
    pub bind: SocketAddr,
    /// Engine configuration file.
    pub engine: PathBuf,
    #[serde(default = "default_timeout_ms")]
    pub request_timeout_ms: u64,
    #[serde(default = "default_max_sessions")]
    pub max_sessions: usize,
    /// Directory served at `/` (the browser demo), if any.
    #[serde(default)]
    pub static_dir: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(engine: PathBuf) -> Self {
        Self {
            bind: default_bind(),
            engine,
            request_timeout_ms: default_timeout_ms(),
            max_sessions: default_max_sessions(),
            static_dir: None,
        }
    }

    /// Reads a TOML file; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.engine = base.join(&cfg.engine);
        cfg.static_dir = cfg.static_dir.map(|d| base.join(d));
        Ok(cfg)
    }

    /// Applies `CHARPILOT_BIND` and `CHARPILOT_ENGINE` when set.
    pub fn apply_env(&mut self) -> Result<(), Error> {
        if let Ok(bind) = std::env::var(BIND_ENV) {
            self.bind = bind
                .parse()
                .map_err(|e| Error::Config(format!("{BIND_ENV}={bind:?}: {e}")))?;
        }
        if let Ok(engine) = std::env::var(ENGINE_ENV) {
            self.engine = engine.into();
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.request_timeout_ms == 0 {
            return Err(Error::Config("request timeout must be positive".into()));
        }
        if self.max_sessions == 0 {
            return Err(Error::Config("max_sessions must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictRequest {
    pub history: String,
    #[serde(default)]
    pub top_k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub ranking: Vec<RankedChar>,
    pub engine: EngineSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeystrokeRequest {
    pub session_id: String,
    pub char: String,
    #[serde(default)]
    pub top_k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeystrokeResponse {
    pub ranking: Vec<RankedChar>,
    pub engine: EngineSummary,
    /// The session's history after this keystroke.
    pub history: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResetRequest {
    pub session_id: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(serde_json::json!({ "error": self.message })),
        )
            .into_response()
    }
}

impl From<PredictError> for ApiError {
    fn from(e: PredictError) -> Self {
        let status = match &e {
            PredictError::OutOfAlphabet(_) => StatusCode::BAD_REQUEST,
            PredictError::Backend(_) => StatusCode::SERVICE_UNAVAILABLE,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            tracing::warn!(error = %e, "prediction failed");
        }
        ApiError::new(status, e.to_string())
    }
}

type Session = Arc<Mutex<String>>;

pub struct AppState {
    engine: Arc<Engine>,
    timeout: Duration,
    max_sessions: usize,
    sessions: std::sync::Mutex<HashMap<String, Session>>,
}

impl AppState {
    pub fn new(engine: Engine, timeout: Duration, max_sessions: usize) -> Arc<Self> {
        Arc::new(Self {
            engine: Arc::new(engine),
            timeout,
            max_sessions,
            sessions: Default::default(),
        })
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session table").len()
    }

    fn session(&self, id: &str) -> Result<Session, ApiError> {
        let mut table = self.sessions.lock().expect("session table");
        if let Some(s) = table.get(id) {
            return Ok(s.clone());
        }
        if table.len() >= self.max_sessions {
            return Err(ApiError::new(
                StatusCode::TOO_MANY_REQUESTS,
                format!("session limit of {} reached", self.max_sessions),
            ));
        }
        let s = Session::default();
        table.insert(id.to_string(), s.clone());
        Ok(s)
    }

    /// Lowercases and checks the alphabet, so that out-of-alphabet input is
    /// a client error rather than something silently dropped.
    fn clean(&self, text: &str) -> Result<String, ApiError> {
        let lowered = text.to_lowercase();
        match lowered
            .chars()
            .find(|&c| !self.engine.alphabet().contains(c))
        {
            Some(c) => Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                format!("{c:?} is outside the alphabet"),
            )),
            None => Ok(lowered),
        }
    }

    async fn rank(
        &self,
        history: String,
        top_k: Option<usize>,
    ) -> Result<Vec<RankedChar>, ApiError> {
        let engine = self.engine.clone();
        let job = tokio::task::spawn_blocking(move || engine.predict(&history));
        let mut ranking = match tokio::time::timeout(self.timeout, job).await {
            Err(_) => {
                return Err(ApiError::new(
                    StatusCode::SERVICE_UNAVAILABLE,
                    "prediction timed out",
                ))
            }
            Ok(Err(join)) => {
                return Err(ApiError::new(
                    StatusCode::INTERNAL_SERVER_ERROR,
                    join.to_string(),
                ))
            }
            Ok(Ok(r)) => r?,
        };
        if let Some(k) = top_k {
            ranking.truncate(k);
        }
        Ok(ranking)
    }
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn predict(
    State(state): State<Arc<AppState>>,
    Json(req): Json<PredictRequest>,
) -> Result<Json<PredictResponse>, ApiError> {
    let history = state.clean(&req.history)?;
    let ranking = state.rank(history, req.top_k).await?;
    Ok(Json(PredictResponse {
        ranking,
        engine: state.engine.summary(),
    }))
}

async fn keystroke(
    State(state): State<Arc<AppState>>,
    Json(req): Json<KeystrokeRequest>,
) -> Result<Json<KeystrokeResponse>, ApiError> {
    let typed = state.clean(&req.char)?;
    if typed.chars().count() != 1 {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "`char` must be a single character",
        ));
    }
    let session = state.session(&req.session_id)?;
    // one keystroke at a time per session
    let mut history = session.lock().await;
    let next = format!("{history}{typed}");
    let ranking = state.rank(next.clone(), req.top_k).await?;
    *history = next;
    Ok(Json(KeystrokeResponse {
        ranking,
        engine: state.engine.summary(),
        history: history.clone(),
    }))
}

async fn reset(
    State(state): State<Arc<AppState>>,
    Json(req): Json<ResetRequest>,
) -> Json<serde_json::Value> {
    state
        .sessions
        .lock()
        .expect("session table")
        .remove(&req.session_id);
    Json(serde_json::json!({}))
}

pub fn router(state: Arc<AppState>, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/healthz", get(healthz))
        .route("/v1/predict", post(predict))
        .route("/v1/session/keystroke", post(keystroke))
        .route("/v1/session/reset", post(reset))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Builds the engine and serves until ctrl-c.
pub async fn serve(cfg: ServiceConfig) -> Result<(), Error> {
    cfg.validate()?;
    let engine_path = cfg.engine.clone();
    let engine = tokio::task::spawn_blocking(move || {
        EngineConfig::load(&engine_path).and_then(|c| c.build())
    })
    .await
    .map_err(|e| Error::Config(e.to_string()))??;
    let state = AppState::new(
        engine,
        Duration::from_millis(cfg.request_timeout_ms),
        cfg.max_sessions,
    );
    let app = router(state, cfg.static_dir.as_deref());
    let listener = tokio::net::TcpListener::bind(cfg.bind).await?;
    tracing::info!(addr = %listener.local_addr()?, "prediction service listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
