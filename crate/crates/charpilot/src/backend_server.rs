//! Serves any in-process [`LanguageModel`] over the model-server wire
//! protocol, so built-in n-gram models can stand in for external ones.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Request, State};
use axum::http::{HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use charpilot_core::backend::protocol::{
    ErrorResponse, InfoResponse, LogprobsRequest, LogprobsResponse, TokenizeRequest,
    TokenizeResponse, INFO_PATH, LOGPROBS_PATH, REQUEST_ID_HEADER, TOKENIZE_PATH, VOCAB_PATH,
};
use charpilot_core::backend::LanguageModel;

use crate::Error;

type Model = Arc<dyn LanguageModel>;

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (
        status,
        Json(ErrorResponse {
            error: message.into(),
        }),
    )
        .into_response()
}

async fn info(State(model): State<Model>) -> Json<InfoResponse> {
    let d = model.descriptor();
    Json(InfoResponse {
        kind: d.kind,
        vocab_size: d.vocab.len(),
        max_context: d.max_context,
        deterministic: d.deterministic,
    })
}

async fn vocab(State(model): State<Model>) -> String {
    model.descriptor().vocab.to_tsv()
}

async fn logprobs(State(model): State<Model>, Json(req): Json<LogprobsRequest>) -> Response {
    let size = model.descriptor().vocab.len();
    if let Some(bad) = req.context_ids.iter().find(|t| t.index() >= size) {
        return error(
            StatusCode::BAD_REQUEST,
            format!("token id {bad} is out of range"),
        );
    }
    let result = tokio::task::spawn_blocking(move || model.next_token_dist(&req.context_ids)).await;
    match result {
        Ok(Ok(dist)) => Json(LogprobsResponse {
            logprobs: dist.to_logprobs(),
        })
        .into_response(),
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn tokenize(State(model): State<Model>, Json(req): Json<TokenizeRequest>) -> Response {
    let vocab = &model.descriptor().vocab;
    match vocab.find_partial_suffix(&req.text) {
        Ok(split) => {
            let partial_suffix = split.pending(vocab.alphabet().boundary());
            Json(TokenizeResponse {
                ids: split.committed,
                partial_suffix,
            })
            .into_response()
        }
        Err(e) => error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
    }
}

async fn echo_request_id(req: Request, next: Next) -> Response {
    let id: Option<HeaderValue> = req.headers().get(REQUEST_ID_HEADER).cloned();
    let mut resp = next.run(req).await;
    if let Some(id) = id {
        resp.headers_mut().insert(REQUEST_ID_HEADER, id);
    }
    resp
}

pub fn router(model: Model) -> Router {
    Router::new()
        .route(INFO_PATH, get(info))
        .route(VOCAB_PATH, get(vocab))
        .route(LOGPROBS_PATH, post(logprobs))
        .route(TOKENIZE_PATH, post(tokenize))
        .layer(middleware::from_fn(echo_request_id))
        .with_state(model)
}

/// Serves `model` on `bind` until ctrl-c.
pub async fn serve(model: Model, bind: SocketAddr) -> Result<(), Error> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    tracing::info!(
        addr = %listener.local_addr()?,
        kind = model.descriptor().kind.as_str(),
        "model server listening"
    );
    axum::serve(listener, router(model))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
