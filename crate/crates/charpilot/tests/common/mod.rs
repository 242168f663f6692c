#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use charpilot::service::{self, AppState};
use charpilot_core::backend::LanguageModel;
use charpilot_core::{Engine, EngineConfig};
use http_body_util::BodyExt;
use tower::ServiceExt;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn engine(name: &str) -> Engine {
    EngineConfig::load(&data_dir().join("engines").join(name))
        .unwrap()
        .build()
        .unwrap()
}

pub fn app(engine: Engine, max_sessions: usize) -> Router {
    service::router(
        AppState::new(engine, Duration::from_secs(10), max_sessions),
        None,
    )
}

pub async fn call(
    app: &Router,
    method: &str,
    path: &str,
    body: serde_json::Value,
) -> (StatusCode, serde_json::Value) {
    let req = Request::builder()
        .method(method)
        .uri(path)
        .header("content-type", "application/json")
        .body(if method == "GET" {
            Body::empty()
        } else {
            Body::from(body.to_string())
        })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let json = serde_json::from_slice(&bytes).unwrap_or(serde_json::Value::Null);
    (status, json)
}

/// Serves `model` on an ephemeral port from a background runtime.
pub fn spawn_model_server(model: Arc<dyn LanguageModel>) -> SocketAddr {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, charpilot::backend_server::router(model))
                .await
                .unwrap();
        });
    });
    rx.recv().unwrap()
}
