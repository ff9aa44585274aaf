//! HTTP/JSON API for browsing the strategy catalog and driving execution
//! sessions. Every session route answers with the full [`StateView`], and
//! every mutation is written to the session's event log before the
//! response is sent.

mod error;
mod store;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json_;

use roboto_core::catalog::{Catalog, CatalogEntry};
use roboto_core::engine::{EngineError, ExecutionState, HumanInput, StateView, Value};

pub use error::{ApiError, DiagnosticBody, ErrorBody};
pub use store::{Session, SessionMeta, SessionStore};

#[derive(Debug, Clone)]
pub struct Config {
    pub port: u16,
    pub catalog_dir: PathBuf,
    pub store_dir: PathBuf,
}

pub struct AppState {
    pub catalog: Catalog,
    pub store: SessionStore,
}

impl AppState {
    pub fn open(config: &Config) -> Result<Arc<Self>, String> {
        let catalog = Catalog::open(&config.catalog_dir).map_err(|e| format!("catalog: {e}"))?;
        let store = SessionStore::open(&config.store_dir).map_err(|e| format!("session store: {e}"))?;
        Ok(Arc::new(Self { catalog, store }))
    }
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Shared) -> Router {
    let v1 = Router::new()
        .route("/strategies", get(list_strategies).post(ingest_strategy))
        .route("/strategies/{id}", get(get_strategy))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/next", post(next))
        .route("/sessions/{id}/previous", post(previous))
        .route("/sessions/{id}/variables", post(set_variable))
        .route("/sessions/{id}/events", get(events));
    Router::new().nest("/v1", v1).with_state(state)
}

/// Binds `0.0.0.0:port` and serves until interrupted.
pub async fn serve(config: Config) -> Result<(), String> {
    let state = AppState::open(&config)?;
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| format!("cannot listen on {addr}: {e}"))?;
    tracing::info!(%addr, catalog = %config.catalog_dir.display(), store = %config.store_dir.display(), "serving");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| e.to_string())
}

fn body<T: DeserializeOwned + Default>(bytes: &Bytes) -> ApiResult<T> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

async fn list_strategies(State(app): State<Shared>) -> Json<Vec<CatalogEntry>> {
    Json(app.catalog.list())
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IngestRequest {
    text: Option<String>,
}

async fn ingest_strategy(State(app): State<Shared>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let req: IngestRequest = body(&bytes)?;
    let text = req.text.ok_or_else(|| ApiError::bad_request("missing field `text`"))?;
    let entry = app.catalog.ingest(&text)?;
    Ok((StatusCode::CREATED, Json(entry)))
}

#[derive(Serialize)]
struct StrategyWithText {
    entry: CatalogEntry,
    text: String,
}

async fn get_strategy(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<StrategyWithText>> {
    let (entry, text) = app.catalog.get(&id)?;
    Ok(Json(StrategyWithText { entry, text }))
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateRequest {
    entry_id: Option<String>,
    root_name: Option<String>,
    #[serde(default)]
    args: BTreeMap<String, Json_>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Created {
    session_id: String,
    state_view: StateView,
}

async fn create_session(State(app): State<Shared>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let req: CreateRequest = body(&bytes)?;
    let entry_id = req.entry_id.ok_or_else(|| ApiError::bad_request("missing field `entryId`"))?;
    let (entry, doc) = app.catalog.load_doc(&entry_id)?;
    let root = req.root_name.unwrap_or_else(|| entry.name.clone());
    let args = req
        .args
        .iter()
        .map(|(k, v)| Value::from_wire(v).map(|v| (k.clone(), v)))
        .collect::<Result<BTreeMap<_, _>, _>>()
        .map_err(|e| ApiError::bad_request(format!("args: {e}")))?;
    let state = ExecutionState::start(Arc::new(doc), &root, args).map_err(|e| ApiError::engine(e, None))?;
    let meta = SessionMeta {
        session_id: uuid::Uuid::new_v4().to_string(),
        entry_id: entry.id,
        created_at_ms: now_ms(),
    };
    let session_id = meta.session_id.clone();
    let handle = app.store.create(meta, state)?;
    let state_view = handle.lock().await.state.view();
    tracing::info!(session = %session_id, root = %root, "session created");
    Ok((StatusCode::CREATED, Json(Created { session_id, state_view })))
}

async fn get_session(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<StateView>> {
    let handle = app.store.get(&id, &app.catalog)?;
    let session = handle.lock().await;
    Ok(Json(session.state.view()))
}

/// Runs one engine operation under the session lock, after the optional
/// ordinal check, and persists the events it appended.
async fn mutate(
    app: &AppState,
    id: &str,
    expected_ordinal: Option<u64>,
    op: impl FnOnce(&mut ExecutionState) -> Result<(), EngineError>,
) -> ApiResult<Json<StateView>> {
    let handle = app.store.get(id, &app.catalog)?;
    let mut session = handle.lock().await;
    let actual = session.state.last_ordinal();
    if let Some(expected) = expected_ordinal {
        if expected != actual {
            return Err(ApiError::stale(expected, actual));
        }
    }
    let backup = session.state.clone();
    if let Err(e) = op(&mut session.state) {
        let location = session.state.current_location().cloned();
        return Err(ApiError::engine(e, location));
    }
    if let Err(e) = app.store.persist(&mut session) {
        session.state = backup;
        return Err(e);
    }
    Ok(Json(session.state.view()))
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct NextRequest {
    input: Option<Json_>,
    expected_ordinal: Option<u64>,
}

async fn next(State(app): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Json<StateView>> {
    let req: NextRequest = body(&bytes)?;
    let input = match &req.input {
        None | Some(Json_::Null) => None,
        Some(json) => Some(HumanInput::from_wire(json).map_err(ApiError::bad_request)?),
    };
    mutate(&app, &id, req.expected_ordinal, |s| s.next(input)).await
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct PreviousRequest {
    expected_ordinal: Option<u64>,
}

async fn previous(State(app): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Json<StateView>> {
    let req: PreviousRequest = body(&bytes)?;
    mutate(&app, &id, req.expected_ordinal, |s| s.previous()).await
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct VariableRequest {
    name: Option<String>,
    #[serde(default)]
    value: Json_,
    expected_ordinal: Option<u64>,
}

async fn set_variable(State(app): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Json<StateView>> {
    let req: VariableRequest = body(&bytes)?;
    let name = req.name.ok_or_else(|| ApiError::bad_request("missing field `name`"))?;
    let value = Value::from_wire(&req.value).map_err(ApiError::bad_request)?;
    mutate(&app, &id, req.expected_ordinal, |s| s.set_variable(&name, value)).await
}

async fn events(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Json_>> {
    let handle = app.store.get(&id, &app.catalog)?;
    let session = handle.lock().await;
    Ok(Json(serde_json::to_value(session.state.events()).expect("events serialize")))
}
