//! Blocking client for external model servers.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::backend::protocol::{
    InfoResponse, LogprobsRequest, LogprobsResponse, TokenizeRequest, TokenizeResponse, INFO_PATH,
    LOGPROBS_PATH, REQUEST_ID_HEADER, TOKENIZE_PATH, VOCAB_PATH,
};
use crate::backend::{truncate_context, BackendDescriptor, LanguageModel, TokenDistribution};
use crate::error::BackendError;
use crate::vocab::{PartialSplit, TokenId, Vocabulary};

/// A backend living behind the HTTP wire protocol.
///
/// Safe to share across threads; each call is an independent request with
/// its own id and the agent-wide timeout.
pub struct RemoteBackend {
    agent: ureq::Agent,
    base: String,
    descriptor: BackendDescriptor,
    has_tokenizer: bool,
    next_id: AtomicU64,
}

impl std::fmt::Debug for RemoteBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteBackend")
            .field("base", &self.base)
            .field("kind", &self.descriptor.kind)
            .field("has_tokenizer", &self.has_tokenizer)
            .finish()
    }
}

impl RemoteBackend {
    /// Connects to `base_url`, reading `/v1/info`. Without a local `vocab`
    /// the vocabulary is fetched from `/v1/vocab`.
    pub fn connect(
        base_url: &str,
        vocab: Option<Vocabulary>,
        alphabet: &Alphabet,
        timeout: Duration,
    ) -> Result<Self, BackendError> {
        if timeout.is_zero() {
            return Err(BackendError::Invalid(
                "request timeout must be positive".into(),
            ));
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let mut client = Self {
            agent,
            base: base_url.trim_end_matches('/').to_string(),
            descriptor: BackendDescriptor::new(
                Arc::new(Vocabulary::characters(alphabet)),
                0,
                false,
            ),
            has_tokenizer: false,
            next_id: AtomicU64::new(1),
        };

        let info: InfoResponse = client.get_json(INFO_PATH)?;
        let vocab = match vocab {
            Some(v) => v,
            None => {
                let tsv = client.get_text(VOCAB_PATH)?;
                Vocabulary::parse_tsv(&tsv, info.kind.vocab_kind(), alphabet)?
            }
        };
        if vocab.len() != info.vocab_size {
            return Err(BackendError::Protocol(format!(
                "server reports {} tokens but the vocabulary has {}",
                info.vocab_size,
                vocab.len()
            )));
        }
        if vocab.kind() != info.kind.vocab_kind() {
            return Err(BackendError::Protocol(format!(
                "server is a {} backend but the vocabulary is {}",
                info.kind.as_str(),
                vocab.kind().as_str()
            )));
        }
        client.descriptor =
            BackendDescriptor::new(Arc::new(vocab), info.max_context, info.deterministic);
        client.has_tokenizer = client.probe_tokenizer()?;
        Ok(client)
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    pub fn has_tokenizer(&self) -> bool {
        self.has_tokenizer
    }

    fn probe_tokenizer(&self) -> Result<bool, BackendError> {
        let (status, _) = self.post_raw(
            TOKENIZE_PATH,
            &TokenizeRequest {
                text: String::new(),
            },
        )?;
        Ok(status != 404 && status != 405)
    }

    fn request_id(&self) -> String {
        self.next_id.fetch_add(1, Ordering::Relaxed).to_string()
    }

    fn get_text(&self, path: &str) -> Result<String, BackendError> {
        let id = self.request_id();
        let mut resp = self
            .agent
            .get(format!("{}{path}", self.base))
            .header(REQUEST_ID_HEADER, &id)
            .call()
            .map_err(transport)?;
        check(resp.status().as_u16(), path)?;
        check_echo(resp.headers(), &id)?;
        resp.body_mut().read_to_string().map_err(transport)
    }

    fn get_json<T: DeserializeOwned>(&self, path: &str) -> Result<T, BackendError> {
        let text = self.get_text(path)?;
        serde_json::from_str(&text).map_err(|e| BackendError::Protocol(format!("{path}: {e}")))
    }

    fn post_raw<B: Serialize>(&self, path: &str, body: &B) -> Result<(u16, String), BackendError> {
        let id = self.request_id();
        let mut resp = self
            .agent
            .post(format!("{}{path}", self.base))
            .header(REQUEST_ID_HEADER, &id)
            .send_json(body)
            .map_err(transport)?;
        let status = resp.status().as_u16();
        if (200..300).contains(&status) {
            check_echo(resp.headers(), &id)?;
        }
        let text = resp.body_mut().read_to_string().map_err(transport)?;
        Ok((status, text))
    }

    fn post_json<B: Serialize, T: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<T, BackendError> {
        let (status, text) = self.post_raw(path, body)?;
        check(status, path)?;
        serde_json::from_str(&text).map_err(|e| BackendError::Protocol(format!("{path}: {e}")))
    }
}

fn transport(e: ureq::Error) -> BackendError {
    let retryable = matches!(
        e,
        ureq::Error::Timeout(_)
            | ureq::Error::Io(_)
            | ureq::Error::ConnectionFailed
            | ureq::Error::HostNotFound
    );
    BackendError::Transport {
        message: e.to_string(),
        retryable,
    }
}

fn check(status: u16, path: &str) -> Result<(), BackendError> {
    match status {
        200..=299 => Ok(()),
        500..=599 | 429 => Err(BackendError::Transport {
            message: format!("{path} answered {status}"),
            retryable: true,
        }),
        _ => Err(BackendError::Protocol(format!("{path} answered {status}"))),
    }
}

fn check_echo(headers: &ureq::http::HeaderMap, id: &str) -> Result<(), BackendError> {
    match headers.get(REQUEST_ID_HEADER).and_then(|v| v.to_str().ok()) {
        Some(echo) if echo != id => Err(BackendError::Protocol(format!(
            "response for request {echo} arrived for request {id}"
        ))),
        _ => Ok(()),
    }
}

impl LanguageModel for RemoteBackend {
    fn descriptor(&self) -> &BackendDescriptor {
        &self.descriptor
    }

    fn next_token_dist(&self, context: &[TokenId]) -> Result<TokenDistribution, BackendError> {
        let context_ids = truncate_context(context, self.descriptor.max_context).to_vec();
        let resp: LogprobsResponse =
            self.post_json(LOGPROBS_PATH, &LogprobsRequest { context_ids })?;
        if resp.logprobs.len() != self.descriptor.vocab.len() {
            return Err(BackendError::Protocol(format!(
                "expected {} log-probabilities, got {}",
                self.descriptor.vocab.len(),
                resp.logprobs.len()
            )));
        }
        TokenDistribution::from_logprobs(&resp.logprobs)
    }

    fn split_history(&self, history: &str) -> Option<Result<PartialSplit, BackendError>> {
        if !self.has_tokenizer {
            return None;
        }
        let result = self
            .post_json::<_, TokenizeResponse>(
                TOKENIZE_PATH,
                &TokenizeRequest {
                    text: history.to_string(),
                },
            )
            .and_then(|r| {
                let vocab = &self.descriptor.vocab;
                if let Some(bad) = r.ids.iter().find(|id| id.index() >= vocab.len()) {
                    return Err(BackendError::Protocol(format!(
                        "tokenizer returned unknown id {bad}"
                    )));
                }
                Ok(PartialSplit::from_pending(
                    r.ids,
                    &r.partial_suffix,
                    history.is_empty(),
                    vocab.alphabet().boundary(),
                ))
            });
        Some(result)
    }
}
