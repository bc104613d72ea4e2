use super::{ExpansionError, FillCandidate, FillMaskProvider};
use crate::bridge::{BridgeError, ServiceAddress};
use serde_json::{json, Value};

/// Fill-mask provider backed by `POST /fill-mask`.
#[derive(Debug, Clone)]
pub struct HttpFillMask {
    endpoint: ServiceAddress,
}

impl HttpFillMask {
    pub fn new(endpoint: ServiceAddress) -> Self {
        HttpFillMask { endpoint }
    }
}

impl From<BridgeError> for ExpansionError {
    fn from(e: BridgeError) -> Self {
        match e {
            BridgeError::Unavailable(m) => ExpansionError::ProviderUnavailable(m),
            BridgeError::Protocol(m) => ExpansionError::ProviderProtocol(m),
        }
    }
}

fn parse_candidate(v: &Value) -> Option<FillCandidate> {
    let token = v.get("token")?.as_str()?;
    let score = v.get("score")?.as_f64()?;
    Some(FillCandidate::new(token, score))
}

impl FillMaskProvider for HttpFillMask {
    fn fill_mask(&self, tokens: &[String], mask_index: usize, top_k: usize) -> Result<Vec<FillCandidate>, ExpansionError> {
        let body = self.endpoint.post_json(
            "/fill-mask",
            &json!({ "tokens": tokens, "mask_index": mask_index, "top_k": top_k }),
        )?;
        let list = body
            .get("candidates")
            .and_then(Value::as_array)
            .ok_or_else(|| ExpansionError::ProviderProtocol(format!("missing candidates array in {body}")))?;
        list.iter()
            .map(|c| {
                parse_candidate(c)
                    .ok_or_else(|| ExpansionError::ProviderProtocol(format!("malformed candidate {c}")))
            })
            .collect()
    }
}
