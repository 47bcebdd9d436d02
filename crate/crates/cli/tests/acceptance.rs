//! Exit criteria. Prints one line per criterion and exits nonzero if any fails.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::{Command, ExitCode};

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tower::ServiceExt;

use qcoord_core::dynamics::{trajectory, Gate, GateKind};
use qcoord_core::io::{build_coordinate_set, named_state, CoordinateSet};
use qcoord_core::oracles::{pure2_concurrence_oracle, three_tangle, wootters_mixed_concurrence};
use qcoord_core::sampling::{haar_state, haar_unitary};
use qcoord_core::su2::angle_diff;
use qcoord_core::{
    apply_unitary, assemble2, assemble3, complex_concurrence2, complex_concurrences3, fidelity, gsd_candidates,
    gsd_decompose, invert_candidates, invert_coordinates, partial_trace, schmidt_decompose, to_alpha_form,
    ComplexConcurrenceSet, ComplexScalar, GsdBranch, StateVector,
};

type Criterion = fn() -> Outcome;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn grid32() -> impl Iterator<Item = f64> {
    (0..32).map(|k| -PI + TAU * k as f64 / 32.0)
}

fn max_bloch_norm(cs: &CoordinateSet) -> f64 {
    cs.bloch.iter().map(|b| b.norm()).fold(0.0, f64::max)
}

fn concurrences(state: &StateVector) -> ComplexConcurrenceSet {
    complex_concurrences3(&gsd_decompose(state).unwrap())
}

fn local(state: &StateVector, qubit: usize, r: &mut ChaCha8Rng) -> StateVector {
    apply_unitary(state, &[qubit], &haar_unitary(2, r)).unwrap()
}

fn two_qubit_round_trip() -> Outcome {
    let mut r = rng(101);
    let worst = (0..1000)
        .map(|_| {
            let s = haar_state(2, &mut r);
            1.0 - fidelity(&assemble2(&schmidt_decompose(&s).unwrap()), &s).unwrap()
        })
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-10,
        format!("max infidelity {worst:.3e} over 1000 states (tol 1e-10)"),
    )
}

fn two_qubit_oracle() -> Outcome {
    let mut r = rng(102);
    let worst = (0..1000)
        .map(|_| {
            let s = haar_state(2, &mut r);
            let c = complex_concurrence2(&schmidt_decompose(&s).unwrap()).modulus();
            (c - pure2_concurrence_oracle(&s).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-10,
        format!("max |C| diff {worst:.3e} over 1000 states (tol 1e-10)"),
    )
}

fn bell_family() -> Outcome {
    let (mut dc, mut db) = (0.0f64, 0.0f64);
    for a in grid32() {
        let cs = build_coordinate_set(&named_state("bell", &[a]).unwrap()).unwrap();
        let c = cs.two_q.unwrap().concurrence;
        dc = dc.max((c - ComplexScalar::from_polar(1.0, a)).norm());
        db = db.max(max_bloch_norm(&cs));
    }
    outcome(
        dc <= 1e-10 && db <= 1e-10,
        format!("max |C - e^(ia)| {dc:.3e}, max Bloch norm {db:.3e} over 32 angles (tol 1e-10)"),
    )
}

fn three_qubit_round_trip() -> Outcome {
    let mut r = rng(104);
    let mut worst = 0.0f64;
    let mut roots = [0usize; 2];
    for _ in 0..1000 {
        let s = haar_state(3, &mut r);
        worst = worst.max(1.0 - fidelity(&assemble3(&gsd_decompose(&s).unwrap()), &s).unwrap());
        for g in gsd_candidates(&s).unwrap() {
            if let GsdBranch::Root(i) = g.branch {
                roots[i.min(1)] += 1;
            }
            worst = worst.max(1.0 - fidelity(&assemble3(&to_alpha_form(&g).unwrap()), &s).unwrap());
        }
    }
    outcome(
        worst <= 1e-9 && roots.iter().all(|&n| n > 0),
        format!(
            "max infidelity {worst:.3e} over 1000 states (tol 1e-9), roots exercised {} / {}",
            roots[0], roots[1]
        ),
    )
}

fn pairwise_oracle() -> Outcome {
    let mut r = rng(105);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let s = haar_state(3, &mut r);
        let cc = concurrences(&s);
        for (c, keep) in [(cc.c12, [1, 2]), (cc.c13, [1, 3]), (cc.c23, [2, 3])] {
            let w = wootters_mixed_concurrence(&partial_trace(&s, &keep).unwrap()).unwrap();
            worst = worst.max((c.norm() - w).abs());
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max diff {worst:.3e} over 500 states (tol 1e-8)"),
    )
}

fn tangle_oracle() -> Outcome {
    let mut r = rng(106);
    let worst = (0..500)
        .map(|_| {
            let s = haar_state(3, &mut r);
            (concurrences(&s).c123.norm() - three_tangle(&s).unwrap().sqrt()).abs()
        })
        .fold(0.0, f64::max);
    let ghz = concurrences(&named_state("ghz", &[]).unwrap()).c123.norm();
    let w = concurrences(&named_state("w", &[]).unwrap()).c123.norm();
    outcome(
        worst <= 1e-8 && (ghz - 1.0).abs() <= 1e-10 && w <= 1e-10,
        format!("max diff {worst:.3e} over 500 states (tol 1e-8); |c123| GHZ {ghz:.12}, W {w:.3e} (tol 1e-10)"),
    )
}

fn reference_values() -> Outcome {
    let (mut dc, mut dp, mut db) = (0.0f64, 0.0f64, 0.0f64);
    for a in grid32() {
        let cs = build_coordinate_set(&named_state("ghz", &[a]).unwrap()).unwrap();
        let cc = cs.three_q.unwrap().concurrences;
        dc = dc.max((cc.c123 - ComplexScalar::from_polar(1.0, a)).norm());
        dp = dp.max(cc.c12.norm().max(cc.c13.norm()).max(cc.c23.norm()));
        db = db.max(max_bloch_norm(&cs));
    }
    let w = concurrences(&named_state("w-gsd", &[]).unwrap());
    let two_thirds = ComplexScalar::new(2.0 / 3.0, 0.0);
    let dw = [w.c12, w.c13, w.c23]
        .iter()
        .map(|c| (c - two_thirds).norm())
        .fold(0.0, f64::max);
    let passed = dc <= 1e-10 && dp <= 1e-10 && db <= 1e-10 && dw <= 1e-9 && w.c123.norm() <= 1e-9;
    outcome(
        passed,
        format!(
            "GHZ(a): |c123 - e^(ia)| {dc:.3e}, pairwise {dp:.3e}, Bloch {db:.3e} (tol 1e-10); \
             W form: |c_jk - 2/3| {dw:.3e}, |c123| {:.3e} (tol 1e-9)",
            w.c123.norm()
        ),
    )
}

fn invariance() -> Outcome {
    let mut r = rng(108);
    let (mut dm, mut dz) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let s = haar_state(3, &mut r);
        let base = concurrences(&s);
        let mut moved = s.clone();
        for q in 1..=3 {
            moved = local(&moved, q, &mut r);
        }
        let after = concurrences(&moved);
        for (a, b) in base.as_array().iter().zip(after.as_array()) {
            dm = dm.max((a.norm() - b.norm()).abs());
        }
        dz = dz.max((concurrences(&local(&s, 3, &mut r)).c12 - base.c12).norm());
        dz = dz.max((concurrences(&local(&s, 2, &mut r)).c13 - base.c13).norm());
        dz = dz.max((concurrences(&local(&s, 1, &mut r)).c23 - base.c23).norm());

        let s2 = haar_state(2, &mut r);
        let c = complex_concurrence2(&schmidt_decompose(&s2).unwrap()).modulus();
        let moved2 = local(&local(&s2, 1, &mut r), 2, &mut r);
        dm = dm.max((complex_concurrence2(&schmidt_decompose(&moved2).unwrap()).modulus() - c).abs());
    }
    outcome(
        dm <= 1e-8 && dz <= 1e-8,
        format!("moduli {dm:.3e}, complex pair values {dz:.3e} over 200 pairs (tol 1e-8)"),
    )
}

fn monogamy() -> Outcome {
    let mut r = rng(109);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let s = haar_state(3, &mut r);
        let cc = concurrences(&s);
        let (c12, c13, c23, c123) = (cc.c12.norm(), cc.c13.norm(), cc.c23.norm(), cc.c123.norm());
        for (a, b, q) in [(c12, c13, 1), (c12, c23, 2), (c13, c23, 3)] {
            let det = partial_trace(&s, &[q]).unwrap().determinant();
            worst = worst.max((a * a + b * b + c123 * c123 - 4.0 * det).abs());
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max residual {worst:.3e} over 500 states x 3 qubits (tol 1e-8)"),
    )
}

fn inverse() -> Outcome {
    let mut r = rng(110);
    let (mut failures, mut worst, mut best_of_all) = (0, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let s = haar_state(3, &mut r);
        let x = gsd_decompose(&s).unwrap();
        let cc = complex_concurrences3(&x);
        let loss = match invert_coordinates(&cc, &x.frames) {
            Ok(y) => 1.0 - fidelity(&assemble3(&y), &s).unwrap(),
            Err(_) => 1.0,
        };
        if loss > 1e-6 {
            failures += 1;
        }
        worst = worst.max(loss);
        let best = invert_candidates(&cc, &x.frames)
            .unwrap_or_default()
            .iter()
            .map(|y| 1.0 - fidelity(&assemble3(y), &s).unwrap())
            .fold(1.0, f64::min);
        best_of_all = best_of_all.max(best);
    }
    outcome(
        failures == 0,
        format!(
            "{failures}/200 below fidelity 1-1e-6, worst infidelity {worst:.3e}; \
             best over all preimages {best_of_all:.3e}"
        ),
    )
}

fn continuity() -> Outcome {
    let sweep = 2.0;
    let ghz = named_state("ghz", &[]).unwrap();
    let t = trajectory(&ghz, &[Gate::new(GateKind::Phase, vec![sweep], vec![3]).unwrap()], 64).unwrap();
    let step = sweep / 64.0;
    let mut dphase = 0.0f64;
    let mut djump = 0.0f64;
    for w in t.windows(2) {
        let a = w[0].coords.three_q.unwrap().concurrences.c123.arg();
        let b = w[1].coords.three_q.unwrap().concurrences.c123.arg();
        dphase = dphase.max((angle_diff(b, a) - step).abs());
        djump = djump.max(w[0].coords.distance(&w[1].coords));
    }
    let ghz_ok = t.len() == 65 && dphase <= 1e-6 && djump <= 2.0 * step;

    // frame 1 of the canonical representative passes through a pole mid-sweep
    let bell = named_state("bell", &[]).unwrap();
    let start = apply_unitary(
        &bell,
        &[2],
        &Gate::new(GateKind::Ry, vec![-0.5], vec![2]).unwrap().matrix(),
    )
    .unwrap();
    let (selected, canonical) = crossing(&start, Gate::new(GateKind::Ry, vec![1.0], vec![2]).unwrap(), 64);
    let bound = 2.0 / 64.0;
    let bell_ok = selected <= bound && canonical > bound;

    let (rz_selected, rz_canonical) = crossing(&start, Gate::new(GateKind::Rz, vec![1.0], vec![2]).unwrap(), 64);
    outcome(
        ghz_ok && bell_ok,
        format!(
            "GHZ phase: |d arg - step| {dphase:.3e} (tol 1e-6), max step {djump:.4} (bound {:.4}); \
             Bell crossing RY: selected {selected:.4}, canonical {canonical:.4} (bound {bound:.4}); \
             RZ: selected {rz_selected:.4}, canonical {rz_canonical:.4}",
            2.0 * step
        ),
    )
}

fn crossing(start: &StateVector, gate: Gate, steps: usize) -> (f64, f64) {
    let t = trajectory(start, &[gate], steps).unwrap();
    let canonical: Vec<CoordinateSet> = t.iter().map(|p| build_coordinate_set(&p.state).unwrap()).collect();
    let selected = t
        .windows(2)
        .map(|w| w[0].coords.distance(&w[1].coords))
        .fold(0.0, f64::max);
    let canon = canonical.windows(2).map(|w| w[0].distance(&w[1])).fold(0.0, f64::max);
    (selected, canon)
}

fn http_analyze(rt: &tokio::runtime::Runtime, spec: &str) -> String {
    let body = serde_json::json!({ "state_spec": spec }).to_string();
    let req = Request::post("/api/analyze")
        .header("content-type", "application/json")
        .body(Body::from(body))
        .unwrap();
    let bytes = rt.block_on(async {
        let resp = qcoord_service::router().oneshot(req).await.unwrap();
        resp.into_body().collect().await.unwrap().to_bytes()
    });
    #[derive(serde::Deserialize)]
    struct Resp<'a> {
        #[serde(borrow)]
        coordinates: &'a serde_json::value::RawValue,
    }
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let resp: Resp = serde_json::from_str(&text).unwrap();
    resp.coordinates.get().to_string()
}

fn qcoord(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_qcoord")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "qcoord {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn svg_bytes(args: &[&str], out: &Path) -> Vec<u8> {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--svg", out.to_str().unwrap()]);
    qcoord(&full);
    std::fs::read(out).unwrap()
}

fn interface_determinism() -> Outcome {
    let rt = tokio::runtime::Runtime::new().unwrap();
    let specs = [
        "ghz",
        "w-gsd",
        "bell(0.3)",
        "general3",
        "(|00> + i|11>)/sqrt(2)",
        "[0.6, 0, 0, 0.8i]",
    ];
    let mut mismatched = Vec::new();
    for spec in specs {
        let mut cli = qcoord(&["analyze", spec, "--json"]);
        if cli.last() == Some(&b'\n') {
            cli.pop();
        }
        if cli != http_analyze(&rt, spec).into_bytes() {
            mismatched.push(spec);
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let coords = dir.path().join("coords.json");
    std::fs::write(&coords, qcoord(&["analyze", "w-gsd", "--json"])).unwrap();
    let c = coords.to_str().unwrap();
    let a = svg_bytes(&["render", c], &dir.path().join("a.svg"));
    let b = svg_bytes(&["render", c], &dir.path().join("b.svg"));
    let g1 = svg_bytes(&["analyze", "ghz"], &dir.path().join("g1.svg"));
    let g2 = svg_bytes(&["analyze", "ghz"], &dir.path().join("g2.svg"));
    let svg_ok = a == b && g1 == g2 && !a.is_empty();
    outcome(
        mismatched.is_empty() && svg_ok,
        format!(
            "JSON identical for {}/{} specs{}; SVG repeat runs identical: {svg_ok}",
            specs.len() - mismatched.len(),
            specs.len(),
            if mismatched.is_empty() {
                String::new()
            } else {
                format!(" (differs: {mismatched:?})")
            }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 12] = [
        ("two-qubit round trip", two_qubit_round_trip),
        ("two-qubit concurrence oracle", two_qubit_oracle),
        ("Bell family", bell_family),
        ("three-qubit round trip", three_qubit_round_trip),
        ("pairwise Wootters oracle", pairwise_oracle),
        ("three-tangle oracle", tangle_oracle),
        ("GHZ and W reference values", reference_values),
        ("local-unitary invariance", invariance),
        ("monogamy identity", monogamy),
        ("inverse reconstruction", inverse),
        ("trajectory continuity", continuity),
        ("interface determinism", interface_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<30} {}  {}",
            i + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
