//! `gmx`: cycle counting, model extraction, bounds, transformation replay,
//! verification and BER simulation for graphical models of binary codes.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmx_core::bounds::model_bounds;
use gmx_core::cycles::{census, census_matrix};
use gmx_core::extract::{alg1_reduce_tanner, alg3_extract_gtg, alg4_extract_gm, replay_matrix, visible_labels};
use gmx_core::gf2::alist::{read_alist, write_alist};
use gmx_core::gmf::{read_gmf, write_gmf, GMF_VERSION};
use gmx_core::model::{tanner_graph, DEFAULT_DIM_CAP};
use gmx_core::report::{census_rows, degree_row, CensusRow, DegreeRow, PUBLISHED_DEGREES};
use gmx_core::sim::{ber_sim_with, to_csv, SimOptions, StopRule};
use gmx_core::transform::{replay, ExtractionTrace, TRACE_VERSION};
use gmx_core::{fixtures, BinaryMatrix, GeneralizedExtension, GraphicalModel, LinearCode};

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (gmf 1, trace 1, alist, ext-meta 1, ber csv 1)"
);

#[derive(Parser, Debug)]
#[command(name = "gmx", version = VERSION, about = "Graphical models of binary linear block codes")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Largest behavior dimension enumerated or reduced.
    #[arg(long, global = true, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
    /// Log level (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Girth and short cycle counts as one CSV row.
    CountCycles {
        /// Model (.gmf), parity-check matrix (.alist) or fixture:NAME.
        #[arg(long = "in")]
        input: String,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Run an extraction heuristic on a parity-check matrix.
    Extract(ExtractArgs),
    /// Tree-inducing cut-set bound report.
    Bounds {
        #[arg(long = "in")]
        input: String,
        /// Assumed lower bound on the minimal tree complexity.
        #[arg(long)]
        t_lower: Option<usize>,
        /// Cycle budget r for the root threshold.
        #[arg(long)]
        r: Option<usize>,
    },
    /// Monte Carlo bit error rate of the model's flooding decoder.
    Sim {
        #[arg(long = "in")]
        input: String,
        /// `start:step:stop`, a comma list, or one value; `inf` disables noise.
        #[arg(long)]
        snr: String,
        #[arg(long, default_value_t = 50)]
        iters: usize,
        #[arg(long, default_value_t = 100)]
        min_errors: u64,
        /// Bit budget per point; accepts forms like `1e8`.
        #[arg(long, default_value = "1e7")]
        max_bits: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a trace to a model or matrix.
    Transform {
        #[arg(long = "in")]
        input: String,
        /// Trace file to replay.
        #[arg(long)]
        replay: PathBuf,
        /// Ext-meta of a matrix input that already has partial parities.
        #[arg(long)]
        ext_meta: Option<PathBuf>,
        /// Ext-meta written for a matrix output.
        #[arg(long)]
        ext_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a model realizes the null space of a parity-check matrix.
    Verify {
        #[arg(long)]
        model: String,
        #[arg(long)]
        code: String,
    },
    /// Extension degrees of alg 3 against the published values.
    Table1 {
        /// Fixture name; all published codes when omitted.
        #[arg(long)]
        code: Option<String>,
    },
    /// Short cycle counts of every extracted model against the published values.
    Table3 {
        #[arg(long, default_value = "ebch32_21")]
        code: String,
    },
    /// List built-in codes.
    Fixtures,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(value_enum)]
    kind: ExtractKind,
    /// Parity-check matrix (.alist) or fixture:NAME.
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Partial-parity subsets, one per line (gtg only).
    #[arg(long)]
    ext_meta: Option<PathBuf>,
    /// Complexity bound m* (gm only).
    #[arg(long, default_value_t = 2)]
    max_m: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExtractKind {
    Tg,
    Gtg,
    Gm,
}

enum Failure {
    Usage(String),
    Data(String),
    Cap(String),
}

impl From<gmx_core::Error> for Failure {
    fn from(e: gmx_core::Error) -> Self {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn read_text(path: &Path) -> Out<String> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Out<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

enum Input {
    Matrix(BinaryMatrix),
    Model(GraphicalModel),
}

fn load(spec: &str) -> Out<Input> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        return Ok(Input::Matrix(fixtures::fixture(name)?.h));
    }
    let text = read_text(Path::new(spec))?;
    if spec.ends_with(".gmf") {
        Ok(Input::Model(read_gmf(&text)?))
    } else if spec.ends_with(".alist") {
        Ok(Input::Matrix(read_alist(&text)?))
    } else {
        Err(Failure::Usage(format!("{spec}: expected .gmf, .alist or fixture:NAME")))
    }
}

fn load_matrix(spec: &str) -> Out<BinaryMatrix> {
    match load(spec)? {
        Input::Matrix(h) => Ok(h),
        Input::Model(_) => Err(Failure::Usage(format!("{spec}: a parity-check matrix is required"))),
    }
}

fn load_model(spec: &str) -> Out<GraphicalModel> {
    match load(spec)? {
        Input::Model(gm) => Ok(gm),
        Input::Matrix(h) => Ok(tanner_graph(&h, None)?),
    }
}

fn base_code(h: &BinaryMatrix) -> Out<LinearCode> {
    Ok(LinearCode::from_parity_check(visible_labels(h.cols()), h)?)
}

/// Expand an SNR argument into points.
fn parse_snr(s: &str) -> Out<Vec<f64>> {
    let num = |t: &str| -> Out<f64> {
        match t.trim() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            x => x.parse::<f64>().map_err(|_| Failure::Usage(format!("bad SNR value {x:?}"))),
        }
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if !(step > 0.0 && b >= a && a.is_finite() && b.is_finite()) {
                return Err(Failure::Usage(format!("bad SNR range {s:?}")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9).collect())
        }
        [one] => one.split(',').map(num).collect(),
        _ => Err(Failure::Usage(format!("bad SNR argument {s:?}"))),
    }
}

fn parse_count(s: &str) -> Out<u64> {
    let v: f64 = s.parse().map_err(|_| Failure::Usage(format!("bad count {s:?}")))?;
    if !(v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64) {
        return Err(Failure::Usage(format!("bad count {s:?}")));
    }
    Ok(v as u64)
}

fn extract(a: &ExtractArgs) -> Out<()> {
    let h = load_matrix(&a.input)?;
    let trace = match a.kind {
        ExtractKind::Tg => {
            let (h1, t) = alg1_reduce_tanner(&h)?;
            emit(a.out.as_deref(), &write_alist(&h1))?;
            t
        }
        ExtractKind::Gtg => {
            let (hx, ext, t) = alg3_extract_gtg(&h)?;
            emit(a.out.as_deref(), &write_alist(&hx))?;
            match &a.ext_meta {
                Some(p) => emit(Some(p), &ext.write_meta())?,
                None => eprintln!("degree={}", ext.degree()),
            }
            t
        }
        ExtractKind::Gm => {
            let tg = tanner_graph(&h, None)?;
            let (gm, t) = alg4_extract_gm(&tg, a.max_m)?;
            emit(a.out.as_deref(), &write_gmf(&gm))?;
            t
        }
    };
    if let Some(p) = &a.trace {
        emit(Some(p), &trace.to_text())?;
    }
    Ok(())
}

fn transform(input: &str, trace: &Path, ext_meta: Option<&Path>, ext_out: Option<&Path>, out: Option<&Path>) -> Out<()> {
    let t = ExtractionTrace::parse(&read_text(trace)?)?;
    match load(input)? {
        Input::Model(gm) => emit(out, &write_gmf(&replay(&gm, &t)?)),
        Input::Matrix(h) => {
            let ext = match ext_meta {
                Some(p) => {
                    // The matrix already carries the parities; the base code
                    // is its projection onto the leading columns.
                    let text = read_text(p)?;
                    let g = text.lines().filter(|l| !l.split('#').next().unwrap_or("").trim().is_empty()).count();
                    let n = h.cols().checked_sub(g).ok_or_else(|| Failure::Data("more parities than columns".into()))?;
                    let base = base_code(&h)?.project_indices(&(0..n).collect::<Vec<_>>());
                    GeneralizedExtension::read_meta(base.relabel(visible_labels(n))?, &text)?
                }
                None => GeneralizedExtension::new(base_code(&h)?),
            };
            let (h2, e2) = replay_matrix(&h, &ext, &t)?;
            if let Some(p) = ext_out {
                emit(Some(p), &e2.write_meta())?;
            }
            emit(out, &write_alist(&h2))
        }
    }
}

fn table1(code: Option<&str>) -> Out<String> {
    let names: Vec<&str> = match code {
        Some(c) => vec![c],
        None => PUBLISHED_DEGREES.iter().map(|r| r.0).collect(),
    };
    let rows: Vec<DegreeRow> = names.into_iter().map(degree_row).collect::<Result<_, _>>()?;
    let mut s = format!("{}\n", DegreeRow::HEADER);
    for r in rows {
        s.push_str(&r.csv());
        s.push('\n');
    }
    Ok(s)
}

fn table3(code: &str) -> Out<String> {
    let mut s = format!("{}\n", CensusRow::HEADER);
    for r in census_rows(code)? {
        s.push_str(&r.csv());
        s.push('\n');
    }
    Ok(s)
}

fn run(cli: Cli) -> Out<()> {
    let cap = cli.dim_cap;
    match cli.cmd {
        Command::CountCycles { input, max_len } => {
            let c = match load(&input)? {
                Input::Matrix(h) => census_matrix(&h, max_len)?,
                Input::Model(gm) => census(&gm, max_len)?,
            };
            println!("{}", c.csv_row());
        }
        Command::Extract(a) => extract(&a)?,
        Command::Bounds { input, t_lower, r } => {
            let mut rep = model_bounds(&load_model(&input)?, t_lower)?;
            if let Some(r) = r {
                rep = rep.with_root(r);
            }
            print!("{rep}");
        }
        Command::Sim {
            input,
            snr,
            iters,
            min_errors,
            max_bits,
            out,
        } => {
            let gm = load_model(&input)?;
            let stop = StopRule {
                min_bit_errors: min_errors,
                max_bits: parse_count(&max_bits)?,
            };
            let opts = SimOptions {
                workers: cli.workers,
                code: None,
            };
            let recs = ber_sim_with(&gm, &parse_snr(&snr)?, stop, iters, cli.seed, &opts)?;
            emit(out.as_deref(), &to_csv(&recs))?;
        }
        Command::Transform {
            input,
            replay,
            ext_meta,
            ext_out,
            out,
        } => transform(&input, &replay, ext_meta.as_deref(), ext_out.as_deref(), out.as_deref())?,
        Command::Verify { model, code } => {
            let gm = load_model(&model)?;
            let h = load_matrix(&code)?;
            let c = gm.realized_code(cap)?;
            let want = LinearCode::from_parity_check(c.labels().to_vec(), &h).map_err(Failure::from)?;
            if c == want {
                println!("realized code matches");
            } else {
                println!("realized code differs: model [{},{}], matrix [{},{}]", c.n(), c.k(), want.n(), want.k());
                return Err(Failure::Data("realized code differs".into()));
            }
        }
        Command::Table1 { code } => print!("{}", table1(code.as_deref())?),
        Command::Table3 { code } => print!("{}", table3(&code)?),
        Command::Fixtures => {
            for name in fixtures::FIXTURE_NAMES {
                let f = fixtures::fixture(name)?;
                println!("{name}: {}", f.notes);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let _ = env_logger::Builder::new().parse_filters(&cli.log_level).try_init();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    log::debug!("gmf {GMF_VERSION}, trace {TRACE_VERSION}");
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("cap exceeded: {m}");
            ExitCode::from(3)
        }
    }
}
