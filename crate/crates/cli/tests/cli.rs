use std::process::{Command, Output};

use qcoord_core::io::{build_coordinate_set, from_json, parse_state_spec, render_figure, to_json, RenderOptions};

fn qcoord(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcoord")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_json_is_the_library_document() {
    let o = qcoord(&["analyze", "ghz(0.25)", "--json"]);
    assert!(o.status.success());
    let want = to_json(&build_coordinate_set(&parse_state_spec("ghz(0.25)").unwrap()).unwrap());
    assert_eq!(stdout(&o), format!("{want}\n"));
    from_json(&want).unwrap();
}

#[test]
fn analyze_summary_lists_concurrences() {
    let o = qcoord(&["analyze", "w-gsd"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for label in ["c12 ", "c13 ", "c23 ", "c123"] {
        assert!(text.contains(label), "{text}");
    }
    assert!(text.contains("|c12|=0.6666666667"));
    assert!(!text.contains("-0.000000"));
    let o = qcoord(&["analyze", "bell(1.5707963267948966)"]);
    assert!(
        stdout(&o).contains("c     +0.0000000000+1.0000000000i"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn svg_output_and_render_agree() {
    let dir = tempfile::tempdir().unwrap();
    let direct = dir.path().join("direct.svg");
    let coords = dir.path().join("w.json");
    let via = dir.path().join("via.svg");
    assert!(qcoord(&["analyze", "w-gsd", "--svg", direct.to_str().unwrap()])
        .status
        .success());
    std::fs::write(&coords, qcoord(&["analyze", "w-gsd", "--json"]).stdout).unwrap();
    assert!(
        qcoord(&["render", coords.to_str().unwrap(), "--svg", via.to_str().unwrap()])
            .status
            .success()
    );
    let a = std::fs::read_to_string(&direct).unwrap();
    assert_eq!(a, std::fs::read_to_string(&via).unwrap());
    let want = render_figure(
        &build_coordinate_set(&parse_state_spec("w-gsd").unwrap()).unwrap(),
        &RenderOptions::default(),
    );
    assert_eq!(a, want);
    assert!(a.contains("data-members=\"c12 c13 c23\""));
}

#[test]
fn named_list() {
    let o = qcoord(&["named", "--list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert!(names.contains(&"ghz(alpha)"));
    assert!(names.contains(&"w-gsd"));
    assert!(names.contains(&"bell(alpha)"));
}

#[test]
fn verify_prints_residuals() {
    let o = qcoord(&["verify", "general3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().all(|l| l.ends_with("ok")));
    let o = qcoord(&["verify", "(|00> + i|11>)/sqrt(2)"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn apply_prints_every_step() {
    let o = qcoord(&["apply", "|00>", "--gates", "H@1, CNOT@1:2", "--steps", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[6].contains("c=+1.00000000+0.00000000i"), "{}", lines[6]);
    let o = qcoord(&["apply", "ghz", "--gates", ""]);
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn parse_errors_exit_2() {
    for args in [
        vec!["analyze", "(|0> + |1>"],
        vec!["analyze", "nonsense"],
        vec!["analyze", "|0000>"],
        vec!["verify", "zero"],
        vec!["apply", "|00>", "--gates", "FOO@1"],
        vec!["apply", "|00>", "--gates", "H@3"],
        vec!["render", "/nonexistent/coords.json", "--svg", "/tmp/x.svg"],
        vec!["frobnicate"],
    ] {
        let o = qcoord(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = qcoord(&["apply", "|00>", "--gates", "H@1, FOO@2"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FOO"));
}

#[test]
fn truncated_document_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let full = to_json(&build_coordinate_set(&parse_state_spec("ghz").unwrap()).unwrap());
    std::fs::write(&path, &full[..full.len() / 2]).unwrap();
    let o = qcoord(&[
        "render",
        path.to_str().unwrap(),
        "--svg",
        dir.path().join("o.svg").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn inconsistent_document_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let full = to_json(&build_coordinate_set(&parse_state_spec("ghz").unwrap()).unwrap());
    std::fs::write(&path, full.replacen("\"num_qubits\": 3", "\"num_qubits\": 2", 1)).unwrap();
    let o = qcoord(&[
        "render",
        path.to_str().unwrap(),
        "--svg",
        dir.path().join("o.svg").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn serve_answers_on_loopback() {
    use std::io::{Read, Write};
    use std::net::{TcpListener, TcpStream};
    use std::time::{Duration, Instant};

    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_qcoord"))
        .args(["serve", "--port", &port.to_string()])
        .stderr(std::process::Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(10);
    let mut stream = loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(s) => break s,
            Err(_) if Instant::now() < deadline => std::thread::sleep(Duration::from_millis(50)),
            Err(e) => panic!("{e}"),
        }
    };
    write!(
        stream,
        "GET /api/named HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n"
    )
    .unwrap();
    let mut resp = String::new();
    stream.read_to_string(&mut resp).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains("\"w-gsd\""));
}
