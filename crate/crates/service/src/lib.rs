//! Stateless HTTP facade over `qcoord-core`.
//!
//! Every handler is a pure function of its request. The client keeps the
//! current amplitudes and passes the previous coordinates back in for gauge
//! continuity.

use std::net::SocketAddr;

use axum::body::Bytes;
use axum::extract::Query;
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::Value;

use qcoord_core::dynamics::{parse_gate_list, trajectory_from};
use qcoord_core::io::{
    build_coordinate_set, from_json_value, named_states, parse_state_spec, render_figure, to_json, RenderOptions,
};
use qcoord_core::verify::verify_state;
use qcoord_core::{make_state, Error, StateVector};

pub const DEFAULT_PORT: u16 = 8787;
pub const PORT_ENV: &str = "QCOORD_PORT";

/// Amplitudes in a request body may deviate from unit norm by this much.
const NORM_SLACK: f64 = 1e-9;

const INDEX_HTML: &str = include_str!("../static/index.html");

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: ErrorDetail,
}

#[derive(Debug, Serialize)]
struct ErrorDetail {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    expected: Vec<String>,
}

/// A failed request: status plus JSON detail.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    detail: Box<ErrorDetail>,
}

impl ApiError {
    fn bad_request(kind: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            detail: Box::new(ErrorDetail {
                kind,
                message: message.into(),
                field: None,
                line: None,
                column: None,
                position: None,
                expected: Vec::new(),
            }),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (status, kind) = match &e {
            Error::Parse(_) => (StatusCode::BAD_REQUEST, "parse"),
            Error::UnknownName(_) => (StatusCode::BAD_REQUEST, "unknown_name"),
            Error::Schema { .. } => (StatusCode::BAD_REQUEST, "schema"),
            Error::BadSubsystem(_) => (StatusCode::BAD_REQUEST, "bad_subsystem"),
            Error::DimensionMismatch(_) => (StatusCode::BAD_REQUEST, "dimension_mismatch"),
            Error::ZeroVector => (StatusCode::BAD_REQUEST, "zero_vector"),
            _ => (StatusCode::UNPROCESSABLE_ENTITY, "numeric"),
        };
        let mut err = ApiError::bad_request(kind, message);
        err.status = status;
        match e {
            Error::Parse(p) => {
                err.detail.line = Some(p.line);
                err.detail.column = Some(p.column);
                err.detail.position = Some(p.position);
                err.detail.expected = p.expected;
            }
            Error::Schema { field, .. } => err.detail.field = Some(field),
            _ => {}
        }
        err
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::to_string(&ErrorBody { error: *self.detail }).expect("error body serializes");
        (self.status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

fn json_response(text: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("coordinate documents are valid JSON")
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| {
        let mut err = ApiError::bad_request("body", format!("malformed request body: {e}"));
        err.detail.line = Some(e.line());
        err.detail.column = Some(e.column());
        err
    })
}

fn amplitude_list(field: &str, values: &[Value]) -> ApiResult<Vec<Complex64>> {
    values
        .iter()
        .map(|v| match v {
            Value::Number(n) => n.as_f64().map(|x| Complex64::new(x, 0.0)),
            Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
                (Some(re), Some(im)) => Some(Complex64::new(re, im)),
                _ => None,
            },
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| {
            ApiError::from(Error::Schema {
                field: field.to_string(),
                message: "expected numbers or [re, im] pairs".into(),
            })
        })
}

fn state_from_amplitudes(field: &str, values: &[Value]) -> ApiResult<StateVector> {
    let amps = amplitude_list(field, values)?;
    let n = amps.len().trailing_zeros() as usize;
    if amps.len() < 2 || !amps.len().is_power_of_two() {
        return Err(Error::Schema {
            field: field.to_string(),
            message: format!("{} amplitudes is not 2^n", amps.len()),
        }
        .into());
    }
    Ok(make_state(&amps, n)?)
}

fn amplitudes_out(state: &StateVector) -> Vec<[f64; 2]> {
    state.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyzeRequest {
    state_spec: Option<String>,
    amplitudes: Option<Vec<Value>>,
}

#[derive(Debug, Serialize)]
struct AnalyzeResponse {
    state: Vec<[f64; 2]>,
    coordinates: Box<RawValue>,
    residuals: serde_json::Map<String, Value>,
}

/// Body of `POST /api/analyze` for a request body; shared with tests.
pub fn analyze(body: &[u8]) -> ApiResult<String> {
    let req: AnalyzeRequest = parse_body(body)?;
    let state = match (req.state_spec, req.amplitudes) {
        (Some(spec), None) => parse_state_spec(&spec)?,
        (None, Some(amps)) => state_from_amplitudes("amplitudes", &amps)?,
        _ => {
            return Err(ApiError::bad_request(
                "body",
                "give exactly one of `state_spec` or `amplitudes`",
            ))
        }
    };
    let coords = build_coordinate_set(&state)?;
    let mut residuals = serde_json::Map::new();
    if state.num_qubits() >= 2 {
        let report = verify_state(&state)?;
        if let Some(worst) = report.worst().filter(|r| !r.passed()) {
            return Err(Error::Numeric(format!(
                "{} residual {:.3e} exceeds {:.0e}",
                worst.name, worst.value, worst.tolerance
            ))
            .into());
        }
        for r in report.residuals {
            residuals.insert(r.name.to_string(), Value::from(r.value));
        }
    }
    let resp = AnalyzeResponse {
        state: amplitudes_out(&state),
        coordinates: raw(to_json(&coords)),
        residuals,
    };
    Ok(serde_json::to_string(&resp).expect("response serializes"))
}

fn default_steps() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApplyRequest {
    state: Vec<Value>,
    #[serde(default)]
    gates: String,
    #[serde(default = "default_steps")]
    steps_per_gate: usize,
    prev_coordinates: Option<Value>,
}

#[derive(Debug, Serialize)]
struct PointOut {
    step_index: usize,
    state: Vec<[f64; 2]>,
    coordinates: Box<RawValue>,
}

#[derive(Debug, Serialize)]
struct ApplyResponse {
    trajectory: Vec<PointOut>,
}

/// Body of `POST /api/apply`.
pub fn apply(body: &[u8]) -> ApiResult<String> {
    let req: ApplyRequest = parse_body(body)?;
    let amps = amplitude_list("state", &req.state)?;
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_SLACK {
        return Err(Error::Schema {
            field: "state".into(),
            message: format!("amplitudes have norm {norm}, expected 1"),
        }
        .into());
    }
    let state = state_from_amplitudes("state", &req.state)?;
    let gates = parse_gate_list(&req.gates)?;
    let prev = req.prev_coordinates.as_ref().map(from_json_value).transpose()?;
    let points = trajectory_from(&state, &gates, req.steps_per_gate, prev.as_ref())?;
    let resp = ApplyResponse {
        trajectory: points
            .iter()
            .map(|p| PointOut {
                step_index: p.step_index,
                state: amplitudes_out(&p.state),
                coordinates: raw(to_json(&p.coords)),
            })
            .collect(),
    };
    Ok(serde_json::to_string(&resp).expect("response serializes"))
}

#[derive(Debug, Serialize)]
struct NamedOut {
    name: &'static str,
    params: &'static [&'static str],
    description: &'static str,
}

/// Body of `GET /api/named`.
pub fn named() -> String {
    let list: Vec<NamedOut> = named_states()
        .iter()
        .map(|n| NamedOut {
            name: n.name,
            params: n.params,
            description: n.description,
        })
        .collect();
    serde_json::to_string(&serde_json::json!({ "named": list })).expect("listing serializes")
}

/// The figure for a state spec, as served by `GET /render.svg?spec=...`.
pub fn render_spec(spec: &str) -> ApiResult<String> {
    let state = parse_state_spec(spec)?;
    Ok(render_figure(&build_coordinate_set(&state)?, &RenderOptions::default()))
}

#[derive(Debug, Deserialize)]
struct RenderQuery {
    spec: Option<String>,
}

async fn analyze_handler(body: Bytes) -> ApiResult<Response> {
    analyze(&body).map(json_response)
}

async fn apply_handler(body: Bytes) -> ApiResult<Response> {
    apply(&body).map(json_response)
}

async fn named_handler() -> Response {
    json_response(named())
}

async fn render_handler(Query(q): Query<RenderQuery>) -> ApiResult<Response> {
    let spec = q
        .spec
        .ok_or_else(|| ApiError::bad_request("query", "missing `spec` query parameter"))?;
    let svg = render_spec(&spec)?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

async fn index_handler() -> Html<&'static str> {
    Html(INDEX_HTML)
}

pub fn router() -> Router {
    Router::new()
        .route("/", get(index_handler))
        .route("/api/analyze", post(analyze_handler))
        .route("/api/apply", post(apply_handler))
        .route("/api/named", get(named_handler))
        .route("/render.svg", get(render_handler))
}

/// Port from the environment, else [`DEFAULT_PORT`].
pub fn port_from_env() -> u16 {
    std::env::var(PORT_ENV)
        .ok()
        .and_then(|p| p.parse().ok())
        .unwrap_or(DEFAULT_PORT)
}

/// Serve on loopback until the task is cancelled.
pub async fn serve(port: u16) -> std::io::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}
