//! HTTP front end: `POST /graphql` and `GET /health`.

use std::net::{SocketAddr, TcpListener};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fedwalk_core::graphql::GraphQLRequest;
use serde_json::json;
use thiserror::Error;
use tokio::sync::oneshot;

use crate::Gateway;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("address {0} is already in use")]
    AddrInUse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn router(gateway: Arc<Gateway>) -> Router {
    Router::new().route("/graphql", post(graphql)).route("/health", get(health)).with_state(gateway)
}

async fn graphql(State(gw): State<Arc<Gateway>>, body: String) -> Response {
    let request: GraphQLRequest = match serde_json::from_str(&body) {
        Ok(r) => r,
        Err(e) => {
            return (StatusCode::BAD_REQUEST, Json(json!({"errors": [{"message": format!("bad request body: {e}")}]})))
                .into_response()
        }
    };
    let vars = request.variables.unwrap_or_default();
    let result = tokio::task::spawn_blocking(move || gw.execute(&request.query, &vars)).await;
    match result {
        Ok(merged) => Json(merged.to_json()).into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({"errors": [{"message": e.to_string()}]}))).into_response(),
    }
}

async fn health(State(gw): State<Arc<Gateway>>) -> Response {
    match tokio::task::spawn_blocking(move || gw.health()).await {
        Ok(report) => Json(json!(report)).into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

/// A gateway listening on a background thread; dropping it stops the server.
pub struct GatewayHandle {
    addr: SocketAddr,
    stop: Option<oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl GatewayHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn graphql_url(&self) -> String {
        format!("http://{}/graphql", self.addr)
    }

    pub fn health_url(&self) -> String {
        format!("http://{}/health", self.addr)
    }

    /// Blocks until the server stops on its own.
    pub fn wait(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop_now();
    }

    fn stop_now(&mut self) {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for GatewayHandle {
    fn drop(&mut self) {
        self.stop_now();
    }
}

/// Binds `listen` (e.g. `127.0.0.1:4000`, port 0 for any) and serves.
pub fn spawn(gateway: Arc<Gateway>, listen: &str) -> Result<GatewayHandle, ServeError> {
    let listener = TcpListener::bind(listen).map_err(|e| match e.kind() {
        std::io::ErrorKind::AddrInUse => ServeError::AddrInUse(listen.to_string()),
        _ => ServeError::Io(e),
    })?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let runtime = tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build()?;
    let (tx, rx) = oneshot::channel::<()>();
    let app = router(gateway);
    let thread = std::thread::Builder::new().name("gateway".into()).spawn(move || {
        runtime.block_on(async move {
            let Ok(listener) = tokio::net::TcpListener::from_std(listener) else { return };
            tokio::select! {
                _ = axum::serve(listener, app) => {}
                _ = rx => {}
            }
        });
        runtime.shutdown_timeout(Duration::from_millis(200));
    })?;
    Ok(GatewayHandle { addr, stop: Some(tx), thread: Some(thread) })
}
