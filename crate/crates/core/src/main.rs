use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qteich::classical::{penner_word, triangle_word, PennerPoint, TrianglePoint};
use qteich::qdilog::{self, Grid, QDilogParams};
use qteich::triangulation::{MoveWord, TriangulationJson};
use qteich::verify::{run_suite, Options, Suite};
use qteich::{DecoratedTriangulation, Error};

#[derive(Parser)]
#[command(
    name = "qteich",
    version,
    about = "Decorated triangulations, their coordinates and quantum dilogarithms"
)]
struct Cli {
    /// Directory for reports when --out is not given.
    #[arg(long, env = "QTEICH_OUT_DIR", global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Standard decorated triangulation of the surface of genus g with s punctures.
    Surface {
        #[arg(long, short)]
        genus: u32,
        #[arg(long, short)]
        punctures: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a move word to a triangulation and, optionally, a coordinate point.
    Moves {
        /// Triangulation JSON.
        #[arg(long)]
        triangulation: PathBuf,
        /// JSON array of moves.
        #[arg(long)]
        word: PathBuf,
        /// JSON object with `penner` (edge) and/or `triangle` coordinates.
        #[arg(long)]
        point: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and write its JSON report.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        genus: Option<u32>,
        #[arg(long)]
        punctures: Option<u32>,
        /// Root of unity orders for the compact representation.
        #[arg(long = "N", value_delimiter = ',', default_values_t = [2usize, 3, 5])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        hbar: Vec<f64>,
        #[arg(long, default_value = "-5:5:0.25", allow_hyphen_values = true)]
        grid: Grid,
        /// Include wall-clock runtime (makes the report non-reproducible).
        #[arg(long)]
        runtime: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Non-compact quantum dilogarithm.
    Qdilog {
        #[command(subcommand)]
        command: QdilogCommand,
    },
}

#[derive(Subcommand)]
enum QdilogCommand {
    /// Evaluate psi at one point; prints JSON.
    Eval {
        #[arg(long)]
        hbar: f64,
        /// `RE,IM`
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Tabulate psi and the functional equation residual on a grid (CSV).
    Verify {
        #[arg(long)]
        hbar: f64,
        #[arg(long, default_value = "-5:5:0.25", allow_hyphen_values = true)]
        grid: Grid,
        #[arg(long)]
        delta: Option<f64>,
        /// Residual bound for the exit status.
        #[arg(long, default_value_t = 1e-8)]
        bound: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Classical,
    QuantumCompact,
    Qdilog,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Classical => Suite::Classical,
            SuiteArg::QuantumCompact => Suite::QuantumCompact,
            SuiteArg::Qdilog => Suite::Qdilog,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Default, Serialize, Deserialize)]
struct PointFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    penner: Option<PennerPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    triangle: Option<TrianglePoint>,
}

#[derive(Serialize)]
struct MovesOutput {
    triangulation: TriangulationJson,
    #[serde(flatten)]
    point: PointFile,
}

type CliResult<T> = std::result::Result<T, String>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes to `out`, else to `dir/default_name`, else to stdout.
fn emit(text: &str, out: Option<&Path>, dir: Option<&Path>, default_name: &str) -> CliResult<()> {
    let target = out
        .map(Path::to_path_buf)
        .or_else(|| dir.map(|d| d.join(default_name)));
    match target {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| format!("{}: {e}", parent.display()))?;
            }
            fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn params(hbar: f64, delta: Option<f64>, tol: Option<f64>) -> QDilogParams {
    let mut p = QDilogParams::new(hbar);
    if let Some(d) = delta {
        p.delta = d;
    }
    if let Some(t) = tol {
        p.tol = t;
    }
    p
}

fn parse_complex(s: &str) -> CliResult<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    let [re, im] = parts[..] else {
        return Err(format!("expected RE,IM, got {s:?}"));
    };
    let f = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok(Complex64::new(f(re)?, f(im)?))
}

fn run(cli: Cli) -> CliResult<bool> {
    let dir = cli.out_dir.as_deref();
    let err = |e: Error| e.to_string();
    match cli.command {
        Command::Surface {
            genus,
            punctures,
            out,
        } => {
            let d = DecoratedTriangulation::new_surface(genus, punctures).map_err(err)?;
            let name = format!("surface-{genus}-{punctures}.json");
            emit(&json(&d.to_json()), out.as_deref(), dir, &name)?;
            Ok(true)
        }
        Command::Moves {
            triangulation,
            word,
            point,
            out,
        } => {
            let d = DecoratedTriangulation::from_json_str(&read(&triangulation)?).map_err(err)?;
            let w: MoveWord = parse(&word)?;
            let pt: PointFile = match &point {
                Some(p) => parse(p)?,
                None => PointFile::default(),
            };
            let end = qteich::triangulation::apply_word(&d, &w).map_err(err)?;
            let penner = pt
                .penner
                .map(|p| penner_word(&d, &p, &w).map(|r| r.1))
                .transpose()
                .map_err(err)?;
            let triangle = pt
                .triangle
                .map(|k| triangle_word(&d, &k, &w).map(|r| r.1))
                .transpose()
                .map_err(err)?;
            let result = MovesOutput {
                triangulation: end.to_json(),
                point: PointFile { penner, triangle },
            };
            emit(&json(&result), out.as_deref(), dir, "moves.json")?;
            Ok(true)
        }
        Command::Verify {
            suite,
            genus,
            punctures,
            n,
            seed,
            hbar,
            grid,
            runtime,
            out,
        } => {
            let surface = match (genus, punctures) {
                (Some(g), Some(s)) => Some((g, s)),
                (None, None) => None,
                _ => return Err("--genus and --punctures go together".into()),
            };
            let mut opts = Options {
                seed,
                surface,
                n_values: n,
                grid,
                runtime,
                ..Options::default()
            };
            if !hbar.is_empty() {
                opts.hbars = hbar;
            }
            let suite: Suite = suite.into();
            let report = run_suite(suite, &opts);
            let name = format!("verify-{}.json", suite.name());
            emit(&json(&report), out.as_deref(), dir, &name)?;
            for p in report.properties.iter().filter(|p| !p.passed()) {
                eprintln!("FAIL [{}] {}", p.criterion, p.name);
            }
            Ok(report.passed)
        }
        Command::Qdilog { command } => match command {
            QdilogCommand::Eval {
                hbar,
                z,
                delta,
                tol,
            } => {
                let p = params(hbar, delta, tol);
                let z = parse_complex(&z)?;
                let e = qdilog::psi_eval_detailed(z, &p).map_err(err)?;
                let v = serde_json::json!({
                    "z": [z.re, z.im],
                    "psi": [e.value.re, e.value.im],
                    "abs": e.value.norm(),
                    "params": p,
                    "truncation": e.truncation,
                    "nodes": e.nodes,
                });
                emit(&json(&v), None, None, "")?;
                Ok(true)
            }
            QdilogCommand::Verify {
                hbar,
                grid,
                delta,
                bound,
                out,
            } => {
                let p = params(hbar, delta, None);
                let rows = qdilog::tabulate(&grid, &p).map_err(err)?;
                let mut buf = Vec::new();
                qdilog::write_csv(&rows, &mut buf).map_err(err)?;
                let text = String::from_utf8(buf).map_err(|e| e.to_string())?;
                emit(&text, out.as_deref(), dir, &format!("qdilog-{hbar}.csv"))?;
                let ok = rows
                    .iter()
                    .all(|r| r.residual <= bound && (r.abs - 1.0).abs() <= bound);
                if !ok {
                    eprintln!("residual or unitarity deviation above {bound}");
                }
                Ok(ok)
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
