use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};

use aegis_core::sms::{FileInboxStore, InboxStore, MemoryInboxStore};
use aegis_core::{ModeKind, RandomnessProvider};
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::net::TcpListener;
use tower_http::cors::CorsLayer;

use crate::{Gateway, GatewayError, DEFAULT_PORT};

pub type SharedGateway = Arc<Mutex<Gateway>>;

#[derive(Debug, Clone)]
pub struct GatewayConfig {
    pub port: u16,
    /// Inbox directory. `None` keeps inboxes in memory.
    pub state_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub mode: ModeKind,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        GatewayConfig {
            port: DEFAULT_PORT,
            state_dir: None,
            seed: None,
            mode: ModeKind::Ecb,
        }
    }
}

impl GatewayConfig {
    /// Reads `GATEWAY_PORT` and `GATEWAY_STATE_DIR`.
    pub fn from_env() -> Result<Self, String> {
        let mut cfg = GatewayConfig::default();
        if let Ok(port) = std::env::var("GATEWAY_PORT") {
            cfg.port = port
                .parse()
                .map_err(|_| format!("GATEWAY_PORT={port:?} is not a port number"))?;
        }
        if let Some(dir) = std::env::var_os("GATEWAY_STATE_DIR") {
            cfg.state_dir = Some(dir.into());
        }
        Ok(cfg)
    }

    pub fn build(&self) -> Result<Gateway, GatewayError> {
        let store: Box<dyn InboxStore> = match &self.state_dir {
            Some(dir) => Box::new(FileInboxStore::open(dir)?),
            None => Box::new(MemoryInboxStore::new()),
        };
        Ok(Gateway::new(
            store,
            RandomnessProvider::from_seed(self.seed),
            self.mode,
        ))
    }
}

impl IntoResponse for GatewayError {
    fn into_response(self) -> Response {
        let status = match &self {
            GatewayError::AddressInUse(_) => StatusCode::CONFLICT,
            GatewayError::UnknownHandset(_) | GatewayError::UnknownMessage { .. } => {
                StatusCode::NOT_FOUND
            }
            GatewayError::DecryptFailed(_) => StatusCode::UNPROCESSABLE_ENTITY,
            GatewayError::Store(_) | GatewayError::Seal(_) => StatusCode::INTERNAL_SERVER_ERROR,
            GatewayError::BadAddress(_)
            | GatewayError::EmptyMessage
            | GatewayError::Transport(_)
            | GatewayError::BadRequest(_) => StatusCode::BAD_REQUEST,
        };
        let body = json!({ "error": self.code(), "detail": self.to_string() });
        (status, Json(body)).into_response()
    }
}

impl From<JsonRejection> for GatewayError {
    fn from(r: JsonRejection) -> Self {
        GatewayError::BadRequest(r.body_text())
    }
}

impl From<QueryRejection> for GatewayError {
    fn from(r: QueryRejection) -> Self {
        GatewayError::BadRequest(r.body_text())
    }
}

fn lock(gw: &SharedGateway) -> MutexGuard<'_, Gateway> {
    gw.lock().unwrap_or_else(|p| p.into_inner())
}

#[derive(Debug, Deserialize)]
pub struct RegisterBody {
    pub name: String,
    pub address: String,
}

#[derive(Debug, Deserialize)]
pub struct SendBody {
    pub to: String,
    pub text: String,
}

#[derive(Debug, Deserialize)]
pub struct HlrBody {
    pub active: bool,
}

#[derive(Debug, Deserialize)]
pub struct EventsQuery {
    #[serde(default)]
    pub since: u64,
}

type ApiResult = Result<Response, GatewayError>;

async fn register(State(gw): State<SharedGateway>, body: Result<Json<RegisterBody>, JsonRejection>) -> ApiResult {
    let Json(body) = body?;
    let d = lock(&gw).register_handset(&body.name, &body.address)?;
    Ok((StatusCode::CREATED, Json(d)).into_response())
}

async fn list_handsets(State(gw): State<SharedGateway>) -> ApiResult {
    Ok(Json(lock(&gw).handsets()).into_response())
}

async fn send(
    State(gw): State<SharedGateway>,
    Path(addr): Path<String>,
    body: Result<Json<SendBody>, JsonRejection>,
) -> ApiResult {
    let Json(body) = body?;
    let r = lock(&gw).api_send(&addr, &body.to, &body.text)?;
    Ok(Json(r).into_response())
}

async fn inbox(State(gw): State<SharedGateway>, Path(addr): Path<String>) -> ApiResult {
    Ok(Json(lock(&gw).api_inbox(&addr)?).into_response())
}

async fn read(State(gw): State<SharedGateway>, Path((addr, id)): Path<(String, usize)>) -> ApiResult {
    Ok(Json(lock(&gw).api_read(&addr, id)?).into_response())
}

async fn smsc(State(gw): State<SharedGateway>) -> ApiResult {
    Ok(Json(lock(&gw).api_smsc_dump()).into_response())
}

async fn hlr(
    State(gw): State<SharedGateway>,
    Path(addr): Path<String>,
    body: Result<Json<HlrBody>, JsonRejection>,
) -> ApiResult {
    let Json(body) = body?;
    Ok(Json(lock(&gw).api_hlr_set(&addr, body.active)?).into_response())
}

async fn events(State(gw): State<SharedGateway>, q: Result<Query<EventsQuery>, QueryRejection>) -> ApiResult {
    let Query(q) = q?;
    Ok(Json(lock(&gw).api_events(q.since)).into_response())
}

pub fn router(gw: SharedGateway) -> Router {
    Router::new()
        .route("/handsets", post(register).get(list_handsets))
        .route("/handsets/{addr}/send", post(send))
        .route("/handsets/{addr}/inbox", get(inbox))
        .route("/handsets/{addr}/inbox/{id}/read", post(read))
        .route("/smsc", get(smsc))
        .route("/hlr/{addr}", post(hlr))
        .route("/events", get(events))
        .layer(CorsLayer::permissive())
        .with_state(gw)
}

pub fn shared(gateway: Gateway) -> SharedGateway {
    Arc::new(Mutex::new(gateway))
}

/// Serves until the listener fails.
pub async fn serve(listener: TcpListener, gw: SharedGateway) -> std::io::Result<()> {
    let addr: Option<SocketAddr> = listener.local_addr().ok();
    if let Some(addr) = addr {
        log::info!("gateway listening on http://{addr}");
    }
    axum::serve(listener, router(gw)).await
}
