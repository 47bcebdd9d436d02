use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use qcoord_core::io::{build_coordinate_set, parse_state_spec, render_figure, to_json, RenderOptions};
use qcoord_service::router;

async fn call(req: Request<Body>) -> (StatusCode, String) {
    let resp = router().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn post(path: &str, body: &str) -> (StatusCode, String) {
    let req = Request::post(path)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    call(req).await
}

async fn get(path: &str) -> (StatusCode, String) {
    call(Request::get(path).body(Body::empty()).unwrap()).await
}

fn coordinates_text(body: &str) -> String {
    #[derive(serde::Deserialize)]
    struct Resp<'a> {
        #[serde(borrow)]
        coordinates: &'a serde_json::value::RawValue,
    }
    let r: Resp = serde_json::from_str(body).unwrap();
    r.coordinates.get().to_string()
}

#[tokio::test]
async fn analyze_ghz() {
    let (status, body) = post("/api/analyze", r#"{"state_spec":"ghz"}"#).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let v: Value = serde_json::from_str(&body).unwrap();
    let c123 = &v["coordinates"]["concurrences"]["c123"];
    assert!((c123[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(c123[1].as_f64().unwrap().abs() < 1e-12);
    assert!(v["residuals"]["tangle"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["state"].as_array().unwrap().len(), 8);
}

#[tokio::test]
async fn analyze_amplitudes_product() {
    let (status, body) = post("/api/analyze", r#"{"amplitudes":[1,0,0,0]}"#).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let v: Value = serde_json::from_str(&body).unwrap();
    let c = &v["coordinates"]["concurrences"]["c"];
    assert_eq!(c[0].as_f64().unwrap(), 0.0);
    assert_eq!(c[1].as_f64().unwrap(), 0.0);
}

#[tokio::test]
async fn analyze_coordinates_match_library_bytes() {
    let (_, body) = post("/api/analyze", r#"{"state_spec":"w-gsd"}"#).await;
    let want = to_json(&build_coordinate_set(&parse_state_spec("w-gsd").unwrap()).unwrap());
    assert_eq!(coordinates_text(&body), want);
}

#[tokio::test]
async fn analyze_errors() {
    let (status, body) = post("/api/analyze", r#"{"state_spec": "#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
    let (status, body) = post("/api/analyze", r#"{"state_spec":"(|0> + |1>"}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["error"]["kind"], "parse");
    assert_eq!(v["error"]["position"], 10);
    let (status, _) = post("/api/analyze", r#"{"state_spec":"nonsense"}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = post("/api/analyze", r#"{"amplitudes":[0,0]}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = post("/api/analyze", r#"{"state_spec":"ghz","amplitudes":[1,0]}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn apply_bell_circuit() {
    let body = r#"{"state":[[1,0],[0,0],[0,0],[0,0]],"gates":"H@1, CNOT@1:2","steps_per_gate":4}"#;
    let (status, body) = post("/api/apply", body).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let v: Value = serde_json::from_str(&body).unwrap();
    let traj = v["trajectory"].as_array().unwrap();
    assert_eq!(traj.len(), 9);
    let c = &traj[8]["coordinates"]["concurrences"]["c"];
    assert!((c[0].as_f64().unwrap() - 1.0).abs() < 1e-10, "{c}");
    assert!(c[1].as_f64().unwrap().abs() < 1e-10);
    let c0 = &traj[0]["coordinates"]["concurrences"]["c"];
    assert_eq!(c0[0].as_f64().unwrap(), 0.0);
}

#[tokio::test]
async fn apply_local_gate_keeps_tangle() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let body = format!(r#"{{"state":[{h},0,0,0,0,0,0,{h}],"gates":"RZ(0.5)@1"}}"#);
    let (status, body) = post("/api/apply", &body).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let v: Value = serde_json::from_str(&body).unwrap();
    let traj = v["trajectory"].as_array().unwrap();
    assert_eq!(traj.len(), 2);
    let modulus = |p: &Value| {
        let c = &p["coordinates"]["concurrences"]["c123"];
        c[0].as_f64().unwrap().hypot(c[1].as_f64().unwrap())
    };
    assert!((modulus(&traj[0]) - modulus(&traj[1])).abs() < 1e-8);
}

#[tokio::test]
async fn apply_with_prev_coordinates() {
    let (_, first) = post(
        "/api/apply",
        r#"{"state":[0.7071067811865476,0,0,0.7071067811865476],"gates":""}"#,
    )
    .await;
    let v: Value = serde_json::from_str(&first).unwrap();
    let prev = v["trajectory"][0]["coordinates"].to_string();
    let body = format!(
        r#"{{"state":[0.7071067811865476,0,0,0.7071067811865476],"gates":"RY(0.1)@2","prev_coordinates":{prev}}}"#
    );
    let (status, body) = post("/api/apply", &body).await;
    assert_eq!(status, StatusCode::OK, "{body}");
}

#[tokio::test]
async fn apply_errors() {
    let (status, body) = post("/api/apply", r#"{"state":[1,0,0,0],"gates":"FOO@1"}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body.contains("FOO"), "{body}");
    let (status, _) = post("/api/apply", r#"{"state":[1,1,0,0],"gates":"H@1"}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = post("/api/apply", r#"{"state":[1,0,0,0],"gates":"H@3"}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, body) = post(
        "/api/apply",
        r#"{"state":[1,0,0,0],"gates":"H@1","prev_coordinates":{"num_qubits":2}}"#,
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body.contains("schema"), "{body}");
}

#[tokio::test]
async fn named_listing() {
    let (status, body) = get("/api/named").await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_str(&body).unwrap();
    let names: Vec<&str> = v["named"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| n["name"].as_str().unwrap())
        .collect();
    for want in ["ghz", "w", "w-gsd", "bell"] {
        assert!(names.contains(&want));
    }
}

#[tokio::test]
async fn render_svg() {
    let (status, body) = get("/render.svg?spec=ghz").await;
    assert_eq!(status, StatusCode::OK);
    let want = render_figure(
        &build_coordinate_set(&parse_state_spec("ghz").unwrap()).unwrap(),
        &RenderOptions::default(),
    );
    assert_eq!(body, want);
    let (status, _) = get("/render.svg?spec=nonsense").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = get("/render.svg").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn index_and_unknown_routes() {
    let (status, body) = get("/").await;
    assert_eq!(status, StatusCode::OK);
    assert!(body.contains("<html"));
    let (status, _) = get("/nope").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn responses_are_stateless() {
    let bodies = [
        r#"{"state_spec":"w"}"#,
        r#"{"state_spec":"bell(1.0)"}"#,
        r#"{"state_spec":"general3"}"#,
    ];
    let mut first = Vec::new();
    for b in bodies {
        first.push(post("/api/analyze", b).await.1);
    }
    for (i, b) in bodies.iter().enumerate().rev() {
        assert_eq!(post("/api/analyze", b).await.1, first[i]);
    }
}
