//! Read-only HTTP service over one taxonomy.
//!
//! | route | body | response |
//! |-------|------|----------|
//! | `GET /healthz` | | `{"status":"ok"}` |
//! | `GET /taxonomy` | | taxonomy document |
//! | `GET /languages?q=<prefix>` | | `[{name, path}]` |
//! | `POST /lq` | `{portfolio, policy?}` | `{score, breakdown:[{node, depth, lambda}]}` |
//! | `POST /whatif` | `{portfolio, add:{language, proficiency}, policy?}` | `{base, new, gain}` |
//! | `POST /suggest` | `{portfolio, top_k, policy?}` | `[{language, gain}]` |
//! | `POST /matrix` | `{rho, r?}` | `{score}` |
//! | `POST /optimize` | `{problem}` | bundle solution |
//!
//! Scores are rounded to four decimals. Every failure is a 4xx with body
//! `{"error": {"kind": ..., "message": ..., "name"?: ...}}`.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::matrix::{matrix_lq, MatrixError, PairCorrelation};
use crate::measure::{self, ExponentPolicy, MeasureError};
use crate::optimize::{optimize_bundle, BundleProblem, BundleSolution, OptimizeError};
use crate::taxonomy::{Portfolio, TaxonomyError, TaxonomyTree};
use crate::round4;

#[derive(Debug, Clone)]
pub struct ApiConfig {
    pub listen_port: u16,
    pub taxonomy_path: PathBuf,
    pub default_policy: ExponentPolicy,
    /// Origins allowed to call the service from a browser. Empty disables CORS.
    pub allowed_origins: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot load taxonomy {path}: {source}")]
    Taxonomy { path: PathBuf, source: TaxonomyError },
    #[error("invalid allowed origin `{0}`")]
    Origin(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub struct AppState {
    pub tree: TaxonomyTree,
    pub default_policy: ExponentPolicy,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
    name: Option<String>,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, kind: "bad_request", message: message.into(), name: None }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut error = json!({ "kind": self.kind, "message": self.message });
        if let Some(name) = self.name {
            error["name"] = json!(name);
        }
        (self.status, Json(json!({ "error": error }))).into_response()
    }
}

impl From<TaxonomyError> for ApiError {
    fn from(e: TaxonomyError) -> Self {
        let (kind, name) = match &e {
            TaxonomyError::UnknownLanguage(n) => ("unknown_language", Some(n.clone())),
            TaxonomyError::NotALanguage(n) => ("not_a_language", Some(n.clone())),
            TaxonomyError::ProficiencyOutOfRange { language, .. } => {
                ("proficiency_out_of_range", Some(language.clone()))
            }
            TaxonomyError::TaxonomyMismatch => ("taxonomy_mismatch", None),
            _ => ("invalid_input", None),
        };
        ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, kind, message: e.to_string(), name }
    }
}

impl From<MeasureError> for ApiError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Taxonomy(t) => t.into(),
            MeasureError::InvalidPolicy(_) => unprocessable("invalid_policy", e),
            MeasureError::TooDeep(_) => unprocessable("too_deep", e),
        }
    }
}

impl From<MatrixError> for ApiError {
    fn from(e: MatrixError) -> Self {
        unprocessable("invalid_correlation", e)
    }
}

impl From<OptimizeError> for ApiError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Measure(m) => m.into(),
            other => unprocessable("invalid_problem", other),
        }
    }
}

fn unprocessable(kind: &'static str, e: impl std::fmt::Display) -> ApiError {
    ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, kind, message: e.to_string(), name: None }
}

/// Parses a JSON body ourselves so malformed input gets the standard error body.
fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(e.to_string()))
}

fn policy_or_default(state: &AppState, policy: Option<&str>) -> Result<ExponentPolicy, ApiError> {
    match policy {
        None => Ok(state.default_policy),
        Some(p) => Ok(p.parse::<ExponentPolicy>()?),
    }
}

#[derive(Debug, Deserialize)]
pub struct LqRequest {
    pub portfolio: Portfolio,
    pub policy: Option<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct BreakdownEntry {
    pub node: String,
    pub depth: u32,
    pub lambda: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct LqResponse {
    pub score: f64,
    pub breakdown: Vec<BreakdownEntry>,
}

#[derive(Debug, Deserialize)]
pub struct Addition {
    pub language: String,
    #[serde(default = "fluent")]
    pub proficiency: f64,
}

fn fluent() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
pub struct WhatIfRequest {
    pub portfolio: Portfolio,
    pub add: Addition,
    pub policy: Option<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct WhatIfResponse {
    pub base: f64,
    pub new: f64,
    pub gain: f64,
}

#[derive(Debug, Deserialize)]
pub struct SuggestRequest {
    pub portfolio: Portfolio,
    pub top_k: usize,
    pub policy: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct OptimizeRequest {
    pub problem: BundleProblem,
}

#[derive(Debug, Deserialize)]
pub struct LanguagesQuery {
    pub q: Option<String>,
}

async fn healthz() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

async fn taxonomy(State(state): State<Arc<AppState>>) -> impl IntoResponse {
    Json(state.tree.to_document())
}

async fn languages(
    State(state): State<Arc<AppState>>,
    Query(query): Query<LanguagesQuery>,
) -> impl IntoResponse {
    Json(state.tree.list_languages(query.q.as_deref()))
}

async fn post_lq(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<LqResponse>, ApiError> {
    let req: LqRequest = parse(&body)?;
    let policy = policy_or_default(&state, req.policy.as_deref())?;
    let breakdown = measure::lq(&state.tree, &req.portfolio, &policy)?;
    Ok(Json(LqResponse {
        score: round4(breakdown.score),
        breakdown: breakdown
            .rows(&state.tree)
            .into_iter()
            .map(|r| BreakdownEntry { node: r.node, depth: r.depth, lambda: round4(r.lambda) })
            .collect(),
    }))
}

async fn post_whatif(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Json<WhatIfResponse>, ApiError> {
    let req: WhatIfRequest = parse(&body)?;
    let policy = policy_or_default(&state, req.policy.as_deref())?;
    let (base, new) =
        measure::what_if(&state.tree, &req.portfolio, &req.add.language, req.add.proficiency, &policy)?;
    Ok(Json(WhatIfResponse { base: round4(base), new: round4(new), gain: round4(new - base) }))
}

async fn post_suggest(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Json<Vec<measure::Suggestion>>, ApiError> {
    let req: SuggestRequest = parse(&body)?;
    if req.top_k == 0 {
        return Err(ApiError::bad_request("top_k must be at least 1"));
    }
    let policy = policy_or_default(&state, req.policy.as_deref())?;
    let mut out = measure::suggest_next(&state.tree, &req.portfolio, req.top_k, &policy)?;
    for s in &mut out {
        s.gain = round4(s.gain);
    }
    Ok(Json(out))
}

async fn post_matrix(body: Bytes) -> Result<Json<serde_json::Value>, ApiError> {
    let corr: PairCorrelation = parse(&body)?;
    Ok(Json(json!({ "score": round4(matrix_lq(&corr)?) })))
}

async fn post_optimize(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Json<BundleSolution>, ApiError> {
    let req: OptimizeRequest = parse(&body)?;
    let mut solution = optimize_bundle(&state.tree, &req.problem)?;
    solution.total_cost = round4(solution.total_cost);
    solution.per_member_cost.iter_mut().for_each(|c| *c = round4(*c));
    Ok(Json(solution))
}

async fn not_found() -> ApiError {
    ApiError { status: StatusCode::NOT_FOUND, kind: "not_found", message: "no such route".into(), name: None }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/taxonomy", get(taxonomy))
        .route("/languages", get(languages))
        .route("/lq", post(post_lq))
        .route("/whatif", post(post_whatif))
        .route("/suggest", post(post_suggest))
        .route("/matrix", post(post_matrix))
        .route("/optimize", post(post_optimize))
        .fallback(not_found)
        .with_state(state)
}

fn cors(origins: &[String]) -> Result<CorsLayer, ServeError> {
    let origins = origins
        .iter()
        .map(|o| HeaderValue::from_str(o).map_err(|_| ServeError::Origin(o.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CorsLayer::new()
        .allow_origin(AllowOrigin::list(origins))
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([axum::http::header::CONTENT_TYPE]))
}

/// Router with the configured CORS allow-list applied.
pub fn app(state: Arc<AppState>, allowed_origins: &[String]) -> Result<Router, ServeError> {
    let router = router(state);
    if allowed_origins.is_empty() {
        return Ok(router);
    }
    Ok(router.layer(cors(allowed_origins)?))
}

pub fn load_state(config: &ApiConfig) -> Result<AppState, ServeError> {
    let file = std::fs::File::open(&config.taxonomy_path).map_err(|e| ServeError::Taxonomy {
        path: config.taxonomy_path.clone(),
        source: e.into(),
    })?;
    let tree = TaxonomyTree::load(std::io::BufReader::new(file))
        .map_err(|source| ServeError::Taxonomy { path: config.taxonomy_path.clone(), source })?;
    Ok(AppState { tree, default_policy: config.default_policy })
}

/// Serves on an already-bound listener until `shutdown` resolves.
pub async fn serve_on(
    listener: TcpListener,
    router: Router,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router).with_graceful_shutdown(shutdown).await
}

/// Loads the taxonomy, binds the port and serves until Ctrl-C.
pub async fn serve(config: ApiConfig) -> Result<(), ServeError> {
    let state = Arc::new(load_state(&config)?);
    let app = app(state, &config.allowed_origins)?;
    let addr = SocketAddr::from(([0, 0, 0, 0], config.listen_port));
    let listener = TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    serve_on(listener, app, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await?;
    Ok(())
}
