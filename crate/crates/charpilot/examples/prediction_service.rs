// The HTTP prediction service driven in-process: a one-shot prediction,
// then the same text typed one keystroke at a time in a session.
//
// `cargo run -p charpilot --example prediction_service`

use std::error::Error;
use std::path::PathBuf;
use std::time::Duration;

use axum::body::Body;
use axum::http::Request;
use axum::Router;
use charpilot::service::{self, AppState};
use charpilot_core::EngineConfig;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn post(app: &Router, path: &str, body: Value) -> Result<Value, Box<dyn Error>> {
    let req = Request::post(path)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))?;
    let resp = app.clone().oneshot(req).await?;
    let bytes = resp.into_body().collect().await?.to_bytes();
    Ok(serde_json::from_slice(&bytes)?)
}

fn top(v: &Value, n: usize) -> String {
    v["ranking"]
        .as_array()
        .map(|r| {
            r.iter()
                .take(n)
                .filter_map(|c| c["char"].as_str())
                .collect()
        })
        .unwrap_or_default()
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/engines/word3.toml");
    let engine = EngineConfig::load(&cfg)?.build()?;
    let app = service::router(AppState::new(engine, Duration::from_secs(10), 16), None);

    tokio::runtime::Runtime::new()?.block_on(async {
        let text = "please bring my m";
        let one_shot = post(&app, "/v1/predict", json!({ "history": text, "top_k": 5 })).await?;
        println!("predict {text:?}: {:?}", top(&one_shot, 5));

        let mut last = Value::Null;
        for c in text.chars() {
            let body = json!({ "session_id": "demo", "char": c.to_string(), "top_k": 5 });
            last = post(&app, "/v1/session/keystroke", body).await?;
        }
        println!(
            "session {:?}: {:?}",
            last["history"].as_str().unwrap_or_default(),
            top(&last, 5)
        );
        assert_eq!(last["ranking"], one_shot["ranking"]);
        assert_eq!(top(&one_shot, 1), "e");
        post(&app, "/v1/session/reset", json!({ "session_id": "demo" })).await?;
        Ok(())
    })
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
