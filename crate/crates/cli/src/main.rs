use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcoord_core::dynamics::{parse_gate_list, trajectory};
use qcoord_core::io::{
    build_coordinate_set, format_state, from_json, named_states, parse_state_spec, render_figure, to_json,
    CoordinateSet, RenderOptions,
};
use qcoord_core::verify::verify_state;
use qcoord_core::Error;

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qcoord",
    version,
    about = "Local and nonlocal coordinates of 2- and 3-qubit pure states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose a state and print its coordinates.
    Analyze {
        spec: String,
        /// Print the coordinate document as JSON.
        #[arg(long, conflicts_with = "svg")]
        json: bool,
        /// Write the figure to this file.
        #[arg(long, value_name = "OUT")]
        svg: Option<PathBuf>,
    },
    /// Render a coordinate document to SVG.
    Render {
        coords: PathBuf,
        #[arg(long, value_name = "OUT")]
        svg: PathBuf,
    },
    /// List the named states.
    Named {
        #[arg(long)]
        list: bool,
    },
    /// Cross-check a decomposition against the oracles.
    Verify { spec: String },
    /// Apply a gate list and print the trajectory.
    Apply {
        spec: String,
        #[arg(long)]
        gates: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Run the HTTP service on loopback.
    Serve {
        #[arg(long)]
        port: Option<u16>,
    },
}

enum Failure {
    Input(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::UnknownName(_)
            | Error::Schema { .. }
            | Error::BadSubsystem(_)
            | Error::DimensionMismatch(_)
            | Error::ZeroVector => Failure::Input(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

/// Fixed-point with sign, never printing `-0.000`.
fn signed(x: f64, prec: usize) -> String {
    let s = format!("{x:+.prec$}");
    if s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        format!("+{}", &s[1..])
    } else {
        s
    }
}

fn summary(cs: &CoordinateSet) -> String {
    let mut out = String::new();
    for (k, (b, f)) in cs.bloch.iter().zip(&cs.frames).enumerate() {
        out.push_str(&format!(
            "qubit {}  bloch ({}, {}, {})  frame phi={} theta={:.6}\n",
            k + 1,
            signed(b.x, 6),
            signed(b.y, 6),
            signed(b.z, 6),
            signed(f.phi, 6),
            f.theta
        ));
    }
    if let Some(p) = &cs.two_q {
        out.push_str(&format!(
            "lambda  {:.10} {:.10}\nalpha   {}\n",
            p.lambda0,
            p.lambda1,
            signed(p.alpha, 10)
        ));
    }
    if let Some(p) = &cs.three_q {
        let l: Vec<String> = p.lambda.iter().map(|x| format!("{x:.10}")).collect();
        let a: Vec<String> = p.alpha.iter().map(|&x| signed(x, 10)).collect();
        out.push_str(&format!("lambda  {}\nalpha   {}\n", l.join(" "), a.join(" ")));
    }
    for (label, c) in cs.labeled_concurrences() {
        out.push_str(&format!(
            "{label:<5} {}{}i  |{label}|={:.10}  arg={}\n",
            signed(c.re, 10),
            signed(c.im, 10),
            c.norm(),
            signed(c.arg(), 10)
        ));
    }
    for note in &cs.gauge_notes {
        out.push_str(&format!("note    {note}\n"));
    }
    out
}

fn write_svg(path: &Path, cs: &CoordinateSet) -> CliResult {
    fs::write(path, render_figure(cs, &RenderOptions::default())).map_err(|e| io_failure(path, e))
}

fn analyze(spec: &str, json: bool, svg: Option<&Path>) -> CliResult {
    let cs = build_coordinate_set(&parse_state_spec(spec)?)?;
    if json {
        println!("{}", to_json(&cs));
    } else if let Some(path) = svg {
        write_svg(path, &cs)?;
    } else {
        print!("{}", summary(&cs));
    }
    Ok(())
}

fn render(coords: &Path, svg: &Path) -> CliResult {
    let text = fs::read_to_string(coords).map_err(|e| io_failure(coords, e))?;
    write_svg(svg, &from_json(&text)?)
}

fn named() -> CliResult {
    for n in named_states() {
        let name = if n.params.is_empty() {
            n.name.to_string()
        } else {
            format!("{}({})", n.name, n.params.join(", "))
        };
        println!("{name:<16} {}", n.description);
    }
    Ok(())
}

fn verify(spec: &str) -> CliResult {
    let report = verify_state(&parse_state_spec(spec)?)?;
    print!("{report}");
    match report.worst().filter(|r| !r.passed()) {
        Some(r) => Err(Failure::Numeric(format!(
            "{} residual {:.3e} above {:.0e}",
            r.name, r.value, r.tolerance
        ))),
        None => Ok(()),
    }
}

fn apply(spec: &str, gates: &str, steps: usize) -> CliResult {
    let state = parse_state_spec(spec)?;
    let gates = parse_gate_list(gates)?;
    for p in trajectory(&state, &gates, steps)? {
        let cs: Vec<String> = p
            .coords
            .labeled_concurrences()
            .iter()
            .map(|(l, c)| format!("{l}={}{}i", signed(c.re, 8), signed(c.im, 8)))
            .collect();
        println!("{:>4}  {}  {}", p.step_index, cs.join("  "), format_state(&p.state));
    }
    Ok(())
}

fn serve(port: Option<u16>) -> CliResult {
    let port = port.unwrap_or_else(qcoord_service::port_from_env);
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Input(e.to_string()))?;
    eprintln!("listening on http://127.0.0.1:{port}");
    rt.block_on(qcoord_service::serve(port))
        .map_err(|e| Failure::Input(format!("port {port}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { spec, json, svg } => analyze(spec, *json, svg.as_deref()),
        Command::Render { coords, svg } => render(coords, svg),
        Command::Named { .. } => named(),
        Command::Verify { spec } => verify(spec),
        Command::Apply { spec, gates, steps } => apply(spec, gates, *steps),
        Command::Serve { port } => serve(*port),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes() {
        assert!(matches!(Failure::from(Error::ZeroVector), Failure::Input(_)));
        assert!(matches!(
            Failure::from(Error::UnknownName("x".into())),
            Failure::Input(_)
        ));
        assert!(matches!(Failure::from(Error::Numeric("x".into())), Failure::Numeric(_)));
        assert!(matches!(
            Failure::from(Error::Unrealizable("x".into())),
            Failure::Numeric(_)
        ));
    }

    #[test]
    fn signed_zero() {
        assert_eq!(signed(-1e-12, 6), "+0.000000");
        assert_eq!(signed(-0.5, 2), "-0.50");
        assert_eq!(signed(0.5, 2), "+0.50");
    }
}
