//! Thin blocking client for the gateway's HTTP API.

use anyhow::{bail, Context, Result};
use serde_json::Value;

pub const DEFAULT_GATEWAY_URL: &str = "http://127.0.0.1:8470";

pub struct GatewayClient {
    base: String,
    agent: ureq::Agent,
}

impl GatewayClient {
    pub fn new(base: &str) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .build()
            .into();
        GatewayClient {
            base: base.trim_end_matches('/').to_string(),
            agent,
        }
    }

    fn finish(&self, what: &str, resp: Result<ureq::http::Response<ureq::Body>, ureq::Error>) -> Result<Value> {
        let mut resp = resp.with_context(|| format!("{what}: gateway unreachable at {}", self.base))?;
        let status = resp.status();
        let body: Value = resp
            .body_mut()
            .read_json()
            .with_context(|| format!("{what}: response is not JSON"))?;
        if !status.is_success() {
            bail!(
                "{what} failed ({}): {} {}",
                status.as_u16(),
                body["error"].as_str().unwrap_or("error"),
                body["detail"].as_str().unwrap_or("")
            );
        }
        Ok(body)
    }

    fn get(&self, path: &str) -> Result<Value> {
        let resp = self.agent.get(format!("{}{path}", self.base)).call();
        self.finish(path, resp)
    }

    fn post(&self, path: &str, body: Option<Value>) -> Result<Value> {
        let req = self.agent.post(format!("{}{path}", self.base));
        let resp = match body {
            Some(b) => req.send_json(&b),
            None => req.send_empty(),
        };
        self.finish(path, resp)
    }

    pub fn register(&self, name: &str, address: &str) -> Result<Value> {
        self.post("/handsets", Some(serde_json::json!({ "name": name, "address": address })))
    }

    pub fn send(&self, from: &str, to: &str, text: &str) -> Result<Value> {
        self.post(
            &format!("/handsets/{from}/send"),
            Some(serde_json::json!({ "to": to, "text": text })),
        )
    }

    pub fn inbox(&self, address: &str) -> Result<Value> {
        self.get(&format!("/handsets/{address}/inbox"))
    }

    pub fn read(&self, address: &str, id: usize) -> Result<Value> {
        self.post(&format!("/handsets/{address}/inbox/{id}/read"), None)
    }

    pub fn smsc(&self) -> Result<Value> {
        self.get("/smsc")
    }

    pub fn hlr(&self, address: &str, active: bool) -> Result<Value> {
        self.post(&format!("/hlr/{address}"), Some(serde_json::json!({ "active": active })))
    }

    pub fn events(&self, since: u64) -> Result<Value> {
        self.get(&format!("/events?since={since}"))
    }
}
