use super::{ClassifierError, TokenScorer};
use crate::bridge::{BridgeError, ServiceAddress};
use crate::tokenization::DirtyToken;
use serde_json::json;

/// Scores tokens through `POST /classify-token`.
#[derive(Debug, Clone)]
pub struct RemoteScorer {
    endpoint: ServiceAddress,
}

impl RemoteScorer {
    pub fn new(endpoint: ServiceAddress) -> Self {
        RemoteScorer { endpoint }
    }
}

impl From<BridgeError> for ClassifierError {
    fn from(e: BridgeError) -> Self {
        match e {
            BridgeError::Unavailable(m) => ClassifierError::BridgeUnavailable(m),
            BridgeError::Protocol(m) => ClassifierError::BridgeProtocolError(m),
        }
    }
}

pub fn remote_score(endpoint: &ServiceAddress, token: &DirtyToken) -> Result<f64, ClassifierError> {
    let body = endpoint.post_json("/classify-token", &json!({ "token": token.raw }))?;
    let p = body
        .get("p_abbr")
        .and_then(|v| v.as_f64())
        .ok_or_else(|| ClassifierError::BridgeProtocolError(format!("missing numeric p_abbr in {body}")))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(ClassifierError::BridgeProtocolError(format!("p_abbr {p} outside [0, 1]")));
    }
    Ok(p)
}

impl TokenScorer for RemoteScorer {
    fn score(&self, token: &DirtyToken) -> Result<f64, ClassifierError> {
        remote_score(&self.endpoint, token)
    }
}
