//! HTTP front ends of the mocks. Each server owns a thread and a small
//! tokio runtime so it can be stopped on its own.

use std::collections::HashMap;
use std::net::{SocketAddr, TcpListener};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::thread::JoinHandle;
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fedwalk_core::graphql::{run_request, GraphQLRequest, Resolvers, Schema};
use fedwalk_core::store::{serve_statement_graph, StatementStore};
use serde_json::{json, Map, Value};
use thiserror::Error;
use tokio::sync::oneshot;

use crate::fixtures::{FixtureSet, OntologyClass};
use crate::gazetteer::{geonames_json, geonames_list, status_json, Gazetteer, STATUS_INVALID_PARAMETER, STATUS_NOT_FOUND};
use crate::metadata::{serve_metadata_graph, MetadataGraph};
use crate::registry::DoiRegistry;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error("cannot start server: {0}")]
    Io(#[from] std::io::Error),
}

/// A running server. Dropping the handle stops it.
#[derive(Debug)]
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn port(&self) -> u16 {
        self.addr.port()
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn graphql_url(&self) -> String {
        format!("http://{}/graphql", self.addr)
    }

    /// Stops accepting, drops open connections and waits for the thread.
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

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_now();
    }
}

/// Serves `router` on 127.0.0.1:`port`; port 0 picks a free one.
pub fn spawn_router(port: u16, router: Router) -> Result<ServerHandle, ServeError> {
    let listener = TcpListener::bind(("127.0.0.1", port)).map_err(|e| match e.kind() {
        std::io::ErrorKind::AddrInUse => ServeError::PortInUse(port),
        _ => ServeError::Io(e),
    })?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let runtime = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build()?;
    let (tx, rx) = oneshot::channel::<()>();
    let thread = std::thread::Builder::new().name(format!("mock-{}", addr.port())).spawn(move || {
        runtime.block_on(async move {
            let Ok(listener) = tokio::net::TcpListener::from_std(listener) else { return };
            tokio::select! {
                _ = axum::serve(listener, router) => {}
                _ = rx => {}
            }
        });
        runtime.shutdown_timeout(Duration::from_millis(200));
    })?;
    Ok(ServerHandle { addr, stop: Some(tx), thread: Some(thread) })
}

#[derive(Clone)]
struct GraphQLState {
    schema: Arc<Schema>,
    resolvers: Arc<Resolvers>,
}

async fn graphql(State(state): State<GraphQLState>, body: String) -> Response {
    let request: GraphQLRequest = match serde_json::from_str(&body) {
        Ok(r) => r,
        Err(e) => {
            return (StatusCode::BAD_REQUEST, Json(json!({"errors": [{"message": format!("bad request body: {e}")}]})))
                .into_response()
        }
    };
    let vars = request.variables.unwrap_or_default();
    let response = run_request(&state.schema, &state.resolvers, &request.query, &vars);
    Json(response.to_json()).into_response()
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

pub fn graphql_router(schema: Schema, resolvers: Resolvers) -> Router {
    let state = GraphQLState { schema: Arc::new(schema), resolvers: Arc::new(resolvers) };
    Router::new().route("/graphql", post(graphql)).route("/health", get(health)).with_state(state)
}

pub fn statement_router(store: Arc<StatementStore>) -> Router {
    let (schema, resolvers) = serve_statement_graph(store);
    graphql_router(schema, resolvers)
}

type Registry = Arc<Mutex<DoiRegistry>>;

fn registry_reply(result: Result<Value, crate::registry::Rejection>, created: bool) -> Response {
    match result {
        Ok(v) => (if created { StatusCode::CREATED } else { StatusCode::OK }, Json(v)).into_response(),
        Err(r) => {
            let status = StatusCode::from_u16(r.status()).unwrap_or(StatusCode::BAD_REQUEST);
            (status, Json(r.to_json())).into_response()
        }
    }
}

async fn create_doi(State(reg): State<Registry>, Query(q): Query<HashMap<String, String>>, body: String) -> Response {
    let result = reg.lock().expect("registry lock").create(&body, q.get("url").map(String::as_str), q.get("event").map(String::as_str));
    registry_reply(result, true)
}

async fn update_doi(
    State(reg): State<Registry>,
    Path(doi): Path<String>,
    Query(q): Query<HashMap<String, String>>,
    body: String,
) -> Response {
    let result =
        reg.lock().expect("registry lock").update(&doi, &body, q.get("url").map(String::as_str), q.get("event").map(String::as_str));
    registry_reply(result, false)
}

async fn get_doi(State(reg): State<Registry>, Path(doi): Path<String>) -> Response {
    registry_reply(reg.lock().expect("registry lock").get(&doi), false)
}

/// Metadata graph GraphQL plus the DOI registry that feeds it.
pub fn metadata_router(graph: Arc<RwLock<MetadataGraph>>) -> Router {
    let (schema, resolvers) = serve_metadata_graph(graph.clone());
    let registry: Registry = Arc::new(Mutex::new(DoiRegistry::new(graph)));
    let dois = Router::new()
        .route("/dois", post(create_doi))
        .route("/dois/{*doi}", get(get_doi).put(update_doi))
        .with_state(registry);
    graphql_router(schema, resolvers).merge(dois)
}

fn id_param(q: &HashMap<String, String>) -> Option<u64> {
    q.get("geonameId").and_then(|v| v.trim().parse().ok())
}

async fn children(State(g): State<Arc<Gazetteer>>, Query(q): Query<HashMap<String, String>>) -> Json<Value> {
    let Some(id) = id_param(&q) else {
        return Json(status_json("invalid geonameId", STATUS_INVALID_PARAMETER));
    };
    Json(match g.children(id) {
        Some(kids) => geonames_list(&kids),
        None => status_json("the geonameId does not exist", STATUS_NOT_FOUND),
    })
}

async fn search_places(State(g): State<Arc<Gazetteer>>, Query(q): Query<HashMap<String, String>>) -> Json<Value> {
    let text = ["name_startsWith", "name", "q"].iter().find_map(|k| q.get(*k)).map(String::as_str).unwrap_or("");
    if text.trim().is_empty() {
        return Json(status_json("missing search text", STATUS_INVALID_PARAMETER));
    }
    let max = q.get("maxRows").and_then(|m| m.parse::<usize>().ok()).unwrap_or(100);
    Json(geonames_list(&g.search(text, max)))
}

async fn get_place(State(g): State<Arc<Gazetteer>>, Query(q): Query<HashMap<String, String>>) -> Json<Value> {
    let Some(id) = id_param(&q) else {
        return Json(status_json("invalid geonameId", STATUS_INVALID_PARAMETER));
    };
    Json(match g.get(id) {
        Some(r) => geonames_json(r),
        None => status_json("the geonameId does not exist", STATUS_NOT_FOUND),
    })
}

pub fn gazetteer_router(gazetteer: Arc<Gazetteer>) -> Router {
    Router::new()
        .route("/childrenJSON", get(children))
        .route("/searchJSON", get(search_places))
        .route("/getJSON", get(get_place))
        .route("/health", get(health))
        .with_state(gazetteer)
}

async fn ontology_search(State(classes): State<Arc<Vec<OntologyClass>>>, Query(q): Query<HashMap<String, String>>) -> Json<Value> {
    let text = q.get("q").map(String::as_str).unwrap_or("");
    Json(crate::ontology::search_json(&crate::ontology::search(&classes, text)))
}

pub fn ontology_router(classes: Arc<Vec<OntologyClass>>) -> Router {
    Router::new().route("/search", get(ontology_search)).route("/health", get(health)).with_state(classes)
}

/// Ports of the four mocks; 0 picks a free port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MockPorts {
    pub statement: u16,
    pub metadata: u16,
    pub gazetteer: u16,
    pub ontology: u16,
}

impl MockPorts {
    pub fn ephemeral() -> MockPorts {
        MockPorts::default()
    }

    /// `a,b,c,d` in the order statement, metadata, gazetteer, ontology.
    pub fn parse(text: &str) -> Result<MockPorts, String> {
        let ports: Vec<u16> = text
            .split(',')
            .map(|p| p.trim().parse::<u16>().map_err(|e| format!("bad port `{p}`: {e}")))
            .collect::<Result<_, _>>()?;
        match ports[..] {
            [statement, metadata, gazetteer, ontology] => Ok(MockPorts { statement, metadata, gazetteer, ontology }),
            _ => Err(format!("expected 4 ports, found {}", ports.len())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockService {
    Statement,
    Metadata,
    Gazetteer,
    Ontology,
}

/// The four running mocks. Stopped services stay stopped.
#[derive(Debug)]
pub struct MockInfra {
    statement: Option<ServerHandle>,
    metadata: Option<ServerHandle>,
    gazetteer: Option<ServerHandle>,
    ontology: Option<ServerHandle>,
    addrs: [SocketAddr; 4],
}

impl MockInfra {
    fn slot(&mut self, s: MockService) -> &mut Option<ServerHandle> {
        match s {
            MockService::Statement => &mut self.statement,
            MockService::Metadata => &mut self.metadata,
            MockService::Gazetteer => &mut self.gazetteer,
            MockService::Ontology => &mut self.ontology,
        }
    }

    pub fn addr(&self, s: MockService) -> SocketAddr {
        self.addrs[s as usize]
    }

    pub fn base_url(&self, s: MockService) -> String {
        format!("http://{}", self.addr(s))
    }

    pub fn graphql_url(&self, s: MockService) -> String {
        format!("http://{}/graphql", self.addr(s))
    }

    /// Gateway configuration text pointing every source at these mocks.
    pub fn gateway_config(&self) -> String {
        let graphql = |s| self.graphql_url(s);
        format!(
            "gateway.listen = 127.0.0.1:0\n\
             source.METADATA_GRAPH.endpoint = {}\n\
             source.METADATA_GRAPH.kind = graphql\n\
             source.STATEMENT_GRAPH.endpoint = {}\n\
             source.STATEMENT_GRAPH.kind = graphql\n\
             source.GAZETTEER.endpoint = {}\n\
             source.GAZETTEER.kind = rest\n\
             link.Work.comparison = key:comparisonDoi, source:STATEMENT_GRAPH, root:comparisonByDoi\n\
             link.Study.location = key:locationGeonameId, source:GAZETTEER, root:places\n\
             registry.endpoint = {}\n\
             ontology.endpoint = {}\n",
            graphql(MockService::Metadata),
            graphql(MockService::Statement),
            self.base_url(MockService::Gazetteer),
            self.base_url(MockService::Metadata),
            self.base_url(MockService::Ontology),
        )
    }

    pub fn stop(&mut self, s: MockService) {
        if let Some(h) = self.slot(s).take() {
            h.shutdown();
        }
    }

    pub fn is_running(&self, s: MockService) -> bool {
        match s {
            MockService::Statement => self.statement.is_some(),
            MockService::Metadata => self.metadata.is_some(),
            MockService::Gazetteer => self.gazetteer.is_some(),
            MockService::Ontology => self.ontology.is_some(),
        }
    }

    pub fn shutdown(mut self) {
        for s in [MockService::Statement, MockService::Metadata, MockService::Gazetteer, MockService::Ontology] {
            self.stop(s);
        }
    }
}

pub fn serve_all(fixtures: &FixtureSet, ports: MockPorts) -> Result<MockInfra, ServeError> {
    let statement = spawn_router(ports.statement, statement_router(Arc::new(fixtures.statements.clone())))?;
    let graph = Arc::new(RwLock::new(MetadataGraph::new(&fixtures.works)));
    let metadata = spawn_router(ports.metadata, metadata_router(graph))?;
    let gazetteer = spawn_router(ports.gazetteer, gazetteer_router(Arc::new(Gazetteer::new(fixtures.gazetteer.clone()))))?;
    let ontology = spawn_router(ports.ontology, ontology_router(Arc::new(fixtures.ontology.clone())))?;
    let addrs = [statement.addr(), metadata.addr(), gazetteer.addr(), ontology.addr()];
    Ok(MockInfra {
        statement: Some(statement),
        metadata: Some(metadata),
        gazetteer: Some(gazetteer),
        ontology: Some(ontology),
        addrs,
    })
}

/// A server answering every request with `status`, counting hits. Used to
/// exercise retry budgets.
pub fn spawn_status_server(status: u16) -> Result<(ServerHandle, Arc<AtomicUsize>), ServeError> {
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    let code = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let router = Router::new().fallback(move || {
        let counter = counter.clone();
        async move {
            counter.fetch_add(1, Ordering::SeqCst);
            (code, Json(Value::Object(Map::new())))
        }
    });
    Ok((spawn_router(0, router)?, hits))
}
