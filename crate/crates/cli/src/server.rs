//! Read-only HTTP API over a snapshot taken at startup.
//!
//! | route              | response |
//! |--------------------|----------|
//! | `GET /api/model`   | the visual model, same bytes as `skoo viz --format json` |
//! | `GET /api/classes` | the class hierarchy as a tree |
//! | `GET /api/node/{id}` | `{"nodes": [..], "edges": [..]}`: the node first, then its neighbors, plus every incident edge |
//! | `GET /api/search?q=` | nodes whose label contains `q`, ignoring case, sorted by id |
//! | `GET /` and other paths | the viewer bundle from `--assets` |

use std::collections::{BTreeMap, BTreeSet};
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde::Serialize;
use skoo::reasoner::subsumption_closure;
use skoo::visual::{class_hierarchy_tree, to_json, VisEdge, VisNode, VisualModel};
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

use crate::{build_model, CliError, PipelineConfig};

const PLACEHOLDER_INDEX: &str = "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>skoo</title></head>\n<body><p>No viewer bundle installed. Start with <code>--assets DIR</code>, or use the JSON API under <a href=\"/api/model\">/api/model</a>.</p></body></html>\n";

/// Everything the service answers from. Built once, never mutated.
#[derive(Debug)]
pub struct Snapshot {
    model: VisualModel,
    model_json: String,
    classes_json: String,
}

impl Snapshot {
    pub fn load(config: &PipelineConfig) -> Result<Self, CliError> {
        let (graph, model) = build_model(config)?;
        let closure = subsumption_closure(&graph);
        let classes = class_hierarchy_tree(&graph, &closure);
        Ok(Snapshot {
            model_json: to_json(&model)?,
            classes_json: serde_json::to_string(&classes).expect("tree serializes"),
            model,
        })
    }

    pub fn model(&self) -> &VisualModel {
        &self.model
    }
}

#[derive(Serialize)]
struct Neighborhood<'a> {
    nodes: Vec<&'a VisNode>,
    edges: Vec<&'a VisEdge>,
}

fn json(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn model(State(s): State<Arc<Snapshot>>) -> Response {
    json(s.model_json.clone())
}

async fn classes(State(s): State<Arc<Snapshot>>) -> Response {
    json(s.classes_json.clone())
}

async fn node(State(s): State<Arc<Snapshot>>, Path(id): Path<String>) -> Response {
    let Some(center) = s.model.node(&id) else {
        return (StatusCode::NOT_FOUND, format!("no node {id:?}\n")).into_response();
    };
    let edges: Vec<&VisEdge> = s
        .model
        .edges
        .iter()
        .filter(|e| e.from == id || e.to == id)
        .collect();
    let neighbor_ids: BTreeSet<&str> = edges
        .iter()
        .flat_map(|e| [e.from.as_str(), e.to.as_str()])
        .filter(|n| *n != id)
        .collect();
    let mut nodes = vec![center];
    nodes.extend(neighbor_ids.into_iter().filter_map(|n| s.model.node(n)));
    json(serde_json::to_string(&Neighborhood { nodes, edges }).expect("nodes serialize"))
}

async fn search(
    State(s): State<Arc<Snapshot>>,
    Query(params): Query<BTreeMap<String, String>>,
) -> Response {
    let Some(q) = params.get("q") else {
        return (StatusCode::BAD_REQUEST, "missing query parameter q\n").into_response();
    };
    let q = q.to_lowercase();
    let hits: Vec<&VisNode> = s
        .model
        .nodes
        .iter()
        .filter(|n| n.label.to_lowercase().contains(&q))
        .collect();
    json(serde_json::to_string(&hits).expect("nodes serialize"))
}

async fn placeholder_index() -> Html<&'static str> {
    Html(PLACEHOLDER_INDEX)
}

/// Routes for `snapshot`, serving static files from `assets` when given.
pub fn router(snapshot: Arc<Snapshot>, assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/model", get(model))
        .route("/api/classes", get(classes))
        .route("/api/node/{id}", get(node))
        .route("/api/search", get(search))
        .route("/api/{*rest}", get(|| async { StatusCode::NOT_FOUND }))
        .with_state(snapshot);
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api
            .route("/", get(placeholder_index))
            .fallback(|| async { StatusCode::NOT_FOUND }),
    }
}

/// Serves until the process is interrupted.
pub async fn serve(listener: TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Binds 127.0.0.1:`port` and serves; prints the address to standard error.
pub fn serve_blocking(
    snapshot: Snapshot,
    port: u16,
    assets: Option<PathBuf>,
) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: PathBuf::from(format!("127.0.0.1:{port}")),
        source,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(io)?;
    runtime.block_on(async {
        let listener = TcpListener::bind(SocketAddr::from((Ipv4Addr::LOCALHOST, port)))
            .await
            .map_err(io)?;
        let addr = listener.local_addr().map_err(io)?;
        eprintln!("listening on http://{addr}");
        serve(listener, router(Arc::new(snapshot), assets))
            .await
            .map_err(io)
    })
}
