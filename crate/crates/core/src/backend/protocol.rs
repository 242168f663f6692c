//! JSON bodies of the model-server wire protocol.
//!
//! | method | path           | request            | response                              |
//! |--------|----------------|--------------------|---------------------------------------|
//! | GET    | `/v1/info`     |                    | [`InfoResponse`]                      |
//! | POST   | `/v1/logprobs` | [`LogprobsRequest`]| [`LogprobsResponse`]                  |
//! | POST   | `/v1/tokenize` | [`TokenizeRequest`]| [`TokenizeResponse`] (optional route) |
//! | GET    | `/v1/vocab`    |                    | vocabulary TSV (optional route)       |
//!
//! Log-probabilities are natural logs; `null` encodes probability zero.
//! Every request carries [`REQUEST_ID_HEADER`], which servers echo back.

use serde::{Deserialize, Serialize};

use crate::backend::BackendKind;
use crate::vocab::TokenId;

pub const REQUEST_ID_HEADER: &str = "x-request-id";

pub const INFO_PATH: &str = "/v1/info";
pub const LOGPROBS_PATH: &str = "/v1/logprobs";
pub const TOKENIZE_PATH: &str = "/v1/tokenize";
pub const VOCAB_PATH: &str = "/v1/vocab";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoResponse {
    pub kind: BackendKind,
    pub vocab_size: usize,
    pub max_context: usize,
    pub deterministic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogprobsRequest {
    pub context_ids: Vec<TokenId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogprobsResponse {
    pub logprobs: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizeRequest {
    pub text: String,
}

/// `ids` are the committed tokens; `partial_suffix` is the text after them,
/// starting with the boundary character when the partial token is word-initial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizeResponse {
    pub ids: Vec<TokenId>,
    pub partial_suffix: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub error: String,
}
