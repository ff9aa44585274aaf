//! In-process HTTP client for the service router and the service contract
//! checks built on it.

use std::path::Path;
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use serde_json::{json, Value as Json};
use tower::ServiceExt;

use roboto_service::{router, AppState, Config};

use crate::checks::CheckResult;

pub struct Client {
    pub app: Router,
}

impl Client {
    /// A service over fresh or existing catalog and store directories.
    pub fn open(root: &Path) -> Self {
        let config = Config {
            port: 0,
            catalog_dir: root.join("catalog"),
            store_dir: root.join("sessions"),
        };
        let state: Arc<AppState> = AppState::open(&config).expect("service state opens");
        Self { app: router(state) }
    }

    pub async fn call(&self, method: Method, uri: &str, body: Option<Json>) -> (StatusCode, Json) {
        let builder = Request::builder().method(method).uri(uri);
        let request = match body {
            Some(b) => builder
                .header("content-type", "application/json")
                .body(Body::from(b.to_string())),
            None => builder.body(Body::empty()),
        }
        .unwrap();
        let response = self.app.clone().oneshot(request).await.unwrap();
        let status = response.status();
        let bytes = to_bytes(response.into_body(), usize::MAX).await.unwrap();
        let json = if bytes.is_empty() {
            Json::Null
        } else {
            serde_json::from_slice(&bytes).unwrap_or_else(|_| Json::String(String::from_utf8_lossy(&bytes).into()))
        };
        (status, json)
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, Json) {
        self.call(Method::GET, uri, None).await
    }

    pub async fn post(&self, uri: &str, body: Json) -> (StatusCode, Json) {
        self.call(Method::POST, uri, Some(body)).await
    }

    pub async fn entry_id(&self, name: &str) -> String {
        let (_, list) = self.get("/v1/strategies").await;
        list.as_array()
            .unwrap()
            .iter()
            .find(|e| e["name"] == name)
            .map(|e| e["id"].as_str().unwrap().to_string())
            .expect("entry present")
    }

    /// Starts towerOfHanoi at `level`, returning the session id and view.
    pub async fn hanoi_session(&self, level: &str) -> (String, Json) {
        let entry = self.entry_id("towerOfHanoi").await;
        let (status, body) = self
            .post(
                "/v1/sessions",
                json!({
                    "entryId": entry,
                    "rootName": "towerOfHanoi",
                    "args": {"level": level, "source": "A", "target": "C", "auxiliary": "B"}
                }),
            )
            .await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        (body["sessionId"].as_str().unwrap().to_string(), body["stateView"].clone())
    }
}

fn expect(cond: bool, msg: impl FnOnce() -> String) -> CheckResult {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn has_keys(value: &Json, keys: &[&str]) -> bool {
    keys.iter().all(|k| value.get(k).is_some())
}

/// Checks a StateView body against the response schema.
pub fn state_view_schema(view: &Json) -> CheckResult {
    expect(
        has_keys(
            view,
            &[
                "root",
                "params",
                "introText",
                "statements",
                "currentStrategy",
                "currentLocation",
                "pendingInput",
                "visibleVariables",
                "responsibilitySteps",
                "canStepBack",
                "stackDepth",
                "status",
                "lastOrdinal",
            ],
        ),
        || format!("state view is missing fields: {view}"),
    )?;
    let statements = view["statements"].as_array().ok_or("statements is not an array")?;
    for s in statements {
        expect(has_keys(s, &["strategy", "location", "depth", "kind", "text", "comment", "current"]), || {
            format!("statement view missing fields: {s}")
        })?;
        expect(has_keys(&s["location"], &["file", "line", "column"]), || format!("bad location: {s}"))?;
    }
    let highlighted = statements.iter().filter(|s| s["current"] == true).count();
    let completed = view["status"]["kind"] == "Completed";
    expect(highlighted == usize::from(!completed), || {
        format!("{highlighted} highlighted statements with status {}", view["status"])
    })?;
    expect(view["canStepBack"].is_boolean(), || "canStepBack is not a boolean".into())?;
    for v in view["visibleVariables"].as_array().ok_or("visibleVariables is not an array")? {
        let value = &v["value"];
        let wire = value.is_null()
            || value.is_string()
            || value.as_array().is_some_and(|a| a.iter().all(Json::is_string));
        expect(v["name"].is_string() && wire, || format!("bad variable entry: {v}"))?;
    }
    if !view["pendingInput"].is_null() {
        expect(has_keys(&view["pendingInput"], &["kind", "prompt", "statementLocation"]), || {
            format!("bad pendingInput: {}", view["pendingInput"])
        })?;
    }
    Ok(())
}

/// The endpoint suite: creation, each mutation, error statuses, stale
/// ordinals, concurrent conflicting mutations and idempotent reads.
pub async fn service_contract() -> CheckResult {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let client = Client::open(dir.path());

    let (status, list) = client.get("/v1/strategies").await;
    expect(status == StatusCode::OK && list.as_array().map(Vec::len) == Some(4), || {
        format!("strategy list: {status} {list}")
    })?;

    let (id, view) = client.hanoi_session("2").await;
    state_view_schema(&view)?;
    expect(view["pendingInput"]["kind"] == "QueryAnswer", || format!("start pending {}", view["pendingInput"]))?;
    expect(view["currentLocation"]["line"] == 2, || format!("start location {}", view["currentLocation"]))?;
    let base = format!("/v1/sessions/{id}");

    let (status, err) = client.post(&format!("{base}/next"), json!({"input": {"decision": true}})).await;
    expect(status == StatusCode::BAD_REQUEST && err["code"] == "InputKindMismatch", || {
        format!("decision for a query: {status} {err}")
    })?;
    expect(err["message"].is_string() && err["location"]["line"] == 2, || format!("error body {err}"))?;

    let (status, err) = client.post(&format!("{base}/previous"), json!({})).await;
    expect(status == StatusCode::BAD_REQUEST && err["code"] == "AtStart", || format!("previous at start: {status} {err}"))?;

    let (status, view) = client
        .post(&format!("{base}/next"), json!({"input": {"answer": "1"}, "expectedOrdinal": 1}))
        .await;
    expect(status == StatusCode::OK, || format!("next: {status} {view}"))?;
    state_view_schema(&view)?;
    expect(view["pendingInput"]["kind"] == "ConditionDecision" && view["lastOrdinal"] == 2, || {
        format!("after answer: {view}")
    })?;

    let (status, err) = client
        .post(&format!("{base}/next"), json!({"input": {"decision": true}, "expectedOrdinal": 1}))
        .await;
    expect(status == StatusCode::CONFLICT, || format!("stale ordinal: {status} {err}"))?;
    let (_, after) = client.get(&base).await;
    expect(after == view, || "stale mutation changed the session".into())?;

    let (status, view) = client
        .post(&format!("{base}/variables"), json!({"name": "topDiscs", "value": "x, y", "expectedOrdinal": 2}))
        .await;
    expect(status == StatusCode::OK, || format!("set variable: {status} {view}"))?;
    let top = view["visibleVariables"].as_array().unwrap().iter().find(|v| v["name"] == "topDiscs").cloned();
    expect(top.map(|v| v["value"].clone()) == Some(json!(["x", "y"])), || format!("variables {}", view["visibleVariables"]))?;

    let (status, err) = client.post(&format!("{base}/variables"), json!({"name": "hidden", "value": null})).await;
    expect(status == StatusCode::BAD_REQUEST && err["code"] == "UnknownOrHiddenVariable", || {
        format!("hidden variable: {status} {err}")
    })?;

    let (status, view) = client.post(&format!("{base}/previous"), json!({"expectedOrdinal": 3})).await;
    expect(status == StatusCode::OK && view["canStepBack"] == false, || format!("previous: {status} {view}"))?;

    let (status, events) = client.get(&format!("{base}/events")).await;
    let events = events.as_array().cloned().unwrap_or_default();
    let ordinals: Vec<u64> = events.iter().filter_map(|e| e["ordinal"].as_u64()).collect();
    expect(status == StatusCode::OK && ordinals == [1, 2, 3, 4], || format!("event ordinals {ordinals:?}"))?;
    let types: Vec<&str> = events.iter().filter_map(|e| e["payload"]["type"].as_str()).collect();
    expect(
        types == ["startedWithArguments", "advancedWith", "variableEdited", "steppedBack"],
        || format!("event types {types:?}"),
    )?;

    let (a, b) = (client.get(&base).await, client.get(&base).await);
    expect(a == b, || "consecutive GETs differ".into())?;

    for uri in ["/v1/sessions/nope", "/v1/sessions/nope/events", "/v1/strategies/nope"] {
        let (status, err) = client.get(uri).await;
        expect(status == StatusCode::NOT_FOUND && err["code"] == "NotFound", || format!("{uri}: {status} {err}"))?;
    }
    let (status, err) = client.call(Method::POST, &format!("{base}/next"), None).await;
    expect(status == StatusCode::BAD_REQUEST && err["code"] == "MissingInput", || format!("empty next: {status} {err}"))?;
    let (status, err) = client.post(&format!("{base}/next"), json!({"input": {"decision": 1}})).await;
    expect(status == StatusCode::BAD_REQUEST && err["code"] == "BadRequest", || format!("malformed input: {status} {err}"))?;

    linearizable_next(&client, &id).await
}

/// Many clients race to advance with the same expected ordinal: exactly
/// one wins and the others get 409 without effect.
async fn linearizable_next(client: &Client, id: &str) -> CheckResult {
    let (_, view) = client.get(&format!("/v1/sessions/{id}")).await;
    let ordinal = view["lastOrdinal"].as_u64().unwrap();
    let uri = format!("/v1/sessions/{id}/next");
    let tasks: Vec<_> = (0..16)
        .map(|_| {
            let app = client.app.clone();
            let uri = uri.clone();
            tokio::spawn(async move {
                let c = Client { app };
                c.post(&uri, json!({"input": {"answer": "1"}, "expectedOrdinal": ordinal})).await.0
            })
        })
        .collect();
    let mut statuses = Vec::new();
    for t in tasks {
        statuses.push(t.await.map_err(|e| e.to_string())?);
    }
    let ok = statuses.iter().filter(|s| **s == StatusCode::OK).count();
    let conflicts = statuses.iter().filter(|s| **s == StatusCode::CONFLICT).count();
    expect(ok == 1 && conflicts == 15, || format!("race statuses {statuses:?}"))?;
    let (_, events) = client.get(&format!("/v1/sessions/{id}/events")).await;
    expect(events.as_array().map(Vec::len) == Some(ordinal as usize + 1), || {
        "racing mutations appended more than one event".into()
    })
}

/// Drives a session, drops the service, reopens it over the same
/// directories and compares the served views.
pub async fn crash_restart() -> CheckResult {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (id, before, events_before) = {
        let client = Client::open(dir.path());
        let (id, _) = client.hanoi_session("3").await;
        let base = format!("/v1/sessions/{id}");
        for body in [
            json!({"input": {"answer": "2"}}),
            json!({"input": {"decision": true}}),
            json!({}),
            json!({"input": {"answer": "1"}}),
        ] {
            let (status, view) = client.post(&format!("{base}/next"), body).await;
            expect(status == StatusCode::OK, || format!("drive: {status} {view}"))?;
        }
        client.post(&format!("{base}/variables"), json!({"name": "level", "value": ["p", "q"]})).await;
        client.post(&format!("{base}/previous"), json!({})).await;
        let (_, view) = client.get(&base).await;
        let (_, events) = client.get(&format!("{base}/events")).await;
        (id, view, events)
    };
    let client = Client::open(dir.path());
    let base = format!("/v1/sessions/{id}");
    let (status, after) = client.get(&base).await;
    expect(status == StatusCode::OK, || format!("restored session: {status} {after}"))?;
    expect(after == before, || format!("view differs after restart:\n{before}\n{after}"))?;
    let (_, events_after) = client.get(&format!("{base}/events")).await;
    expect(events_after == events_before, || "event log differs after restart".into())?;
    let (status, view) = client.post(&format!("{base}/next"), json!({"input": {"answer": "1"}})).await;
    expect(status == StatusCode::OK && view["stackDepth"] == 2, || format!("restored session steps: {status} {view}"))
}
