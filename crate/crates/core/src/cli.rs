//! Command-line front end. Every subcommand takes `--seed`, `--threads` and
//! `--out` (CSV goes to stdout when `--out` is absent). Exit codes: 0 on
//! success, 2 for malformed input, 3 for violated preconditions.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::entropy::{
    choi_relation_residual, clifford_entropy_of, h2_upper_bound, shannon_clifford_entropy, EntropyKind,
    DEFAULT_CLIFFORD_TOL,
};
use crate::error::Error;
use crate::experiments::{
    exact_sqrt, predicted_sic_purity, sic_fiducial_search, sic_subsystem_purity, subadditivity_violation_rate,
    tcount_bound_experiment, DEFAULT_WORD_LENGTH, RATIO_SLACK,
};
use crate::haar::{analytic_avg_h2, mc_avg_h2, HaarAverageVariant};
use crate::matrix::{MatrixFile, UnitaryMatrix};
use crate::optimize::{maximize_h2, DEFAULT_MAX_ITERS, DEFAULT_RESTARTS};
use crate::phase_space::{DisplacementTable, QuditSystem};
use crate::report::{real, CsvTable};
use crate::rng::RngStream;
use crate::ChiDistribution;

const TOOL: &str = concat!("cliffent ", env!("CARGO_PKG_VERSION"));

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cliffent", version, about = "Clifford entropy numerics and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Master seed for all random draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clifford entropy of a unitary (or stabilizer entropy of a state) read from JSON.
    Entropy {
        /// Unitary in the `{"d": .., "entries": [[re, im], ..]}` format.
        #[arg(long, conflicts_with = "state", required_unless_present = "state")]
        matrix: Option<PathBuf>,
        /// State vector in the same format (`d` entries).
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Phase-space group as `d_L,n`; single qudit when omitted.
        #[arg(long, value_parser = parse_qudits)]
        qudits: Option<(usize, usize)>,
        /// Tolerance for the Clifford verdict.
        #[arg(long, default_value_t = DEFAULT_CLIFFORD_TOL)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo Haar average of H_2 against the closed form.
    HaarAvg {
        /// Dimension, list (`2,3`) or inclusive range (`2..9`).
        #[arg(long, value_parser = parse_dims, required_unless_present = "qudits")]
        d: Option<Dims>,
        /// Multi-qudit group `d_L,n` instead of a single qudit.
        #[arg(long, value_parser = parse_qudits, conflicts_with = "d")]
        qudits: Option<(usize, usize)>,
        #[arg(long, default_value_t = 25_000)]
        samples: usize,
        /// Also report the multiqubit group for powers of two above 2.
        #[arg(long)]
        with_qubits: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Numerically maximize H_2 over U(d).
    Maximize {
        #[arg(long, value_parser = parse_dims)]
        d: Dims,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        /// Write the best unitary as JSON (suffixed with `_d<d>` for sweeps).
        #[arg(long)]
        save_unitary: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Frequency of H_2(UV) >= H_2(U) + H_2(V) over Haar pairs.
    Subadd {
        #[arg(long, value_parser = parse_dims)]
        d: Dims,
        #[arg(long, default_value_t = 25_000)]
        pairs: usize,
        #[arg(long, default_value_t = 25)]
        reps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// T-count lower bound on random doped Clifford circuits.
    Tcount {
        #[arg(long, value_parser = parse_dims, required_unless_present = "qudits")]
        d: Option<Dims>,
        #[arg(long, value_parser = parse_qudits, conflicts_with = "d")]
        qudits: Option<(usize, usize)>,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1000)]
        circuits: usize,
        #[arg(long, default_value_t = DEFAULT_WORD_LENGTH)]
        word_length: usize,
        #[command(flatten)]
        common: Common,
    },
    /// SIC fiducial search and subsystem purity of the resulting SIC.
    Sic {
        #[arg(long, value_parser = parse_dims)]
        dim: Dims,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Entropy { common, .. }
            | Command::HaarAvg { common, .. }
            | Command::Maximize { common, .. }
            | Command::Subadd { common, .. }
            | Command::Tcount { common, .. }
            | Command::Sic { common, .. } => common,
        }
    }
}

#[derive(Debug, Clone)]
struct Dims(Vec<usize>);

fn parse_dims(s: &str) -> Result<Dims, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    let dims = if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (parse(lo)?, parse(hi.trim_start_matches('='))?);
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        (lo..=hi).collect()
    } else {
        s.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
    };
    if dims.is_empty() {
        return Err("no dimensions given".into());
    }
    Ok(Dims(dims))
}

fn parse_qudits(s: &str) -> Result<(usize, usize), String> {
    let (dl, n) = s.split_once(',').ok_or("expected `d_L,n`")?;
    let dl = dl.trim().parse().map_err(|e| format!("d_L: {e}"))?;
    let n = n.trim().parse().map_err(|e| format!("n: {e}"))?;
    Ok((dl, n))
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Precondition(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Precondition(_) => EXIT_PRECONDITION,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Precondition(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Format(_) => Failure::Input(e.to_string()),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.command.common().threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker pool: {e}");
            return EXIT_IO;
        }
    };
    match pool.install(|| dispatch(&cli.command, stdout, stderr)) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(cmd: &Command, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> Outcome {
    match cmd {
        Command::Entropy {
            matrix,
            state,
            alpha,
            qudits,
            tol,
            common,
        } => match (matrix, state) {
            (Some(path), _) => entropy_of_unitary(path, *alpha, *qudits, *tol, common, stdout),
            (None, Some(path)) => entropy_of_state(path, *alpha, *qudits, common, stdout),
            (None, None) => Err(Failure::Input("one of --matrix or --state is required".into())),
        },
        Command::HaarAvg {
            d,
            qudits,
            samples,
            with_qubits,
            common,
        } => haar_avg(d.as_ref().map(|x| x.0.as_slice()), *qudits, *samples, *with_qubits, common, stdout),
        Command::Maximize {
            d,
            restarts,
            max_iters,
            save_unitary,
            common,
        } => maximize(&d.0, *restarts, *max_iters, save_unitary.as_deref(), common, stdout),
        Command::Subadd { d, pairs, reps, common } => subadd(&d.0, *pairs, *reps, common, stdout),
        Command::Tcount {
            d,
            qudits,
            t,
            circuits,
            word_length,
            common,
        } => tcount(d.as_ref().map(|x| x.0.as_slice()), *qudits, *t, *circuits, *word_length, common, stdout),
        Command::Sic { dim, restarts, common } => sic(&dim.0, *restarts, common, stdout, stderr),
    }
}

fn read_matrix_file(path: &Path) -> Result<MatrixFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(MatrixFile::parse(&text)?)
}

fn system_for(d: usize, qudits: Option<(usize, usize)>) -> Result<QuditSystem, Failure> {
    let sys = match qudits {
        Some((dl, n)) => QuditSystem::new(dl, n)?,
        None => QuditSystem::single(d)?,
    };
    if sys.dim() != d {
        return Err(Failure::Precondition(format!(
            "--qudits gives dimension {} but the input has d = {d}",
            sys.dim()
        )));
    }
    Ok(sys)
}

fn emit(table: &CsvTable, common: &Common, stdout: &mut (dyn Write + Send)) -> Outcome {
    let bytes = table.to_bytes();
    match &common.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(&bytes).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn print(stdout: &mut (dyn Write + Send), line: String) -> Outcome {
    writeln!(stdout, "{line}").map_err(|e| Failure::Io(e.to_string()))
}

fn entropy_of_unitary(
    path: &Path,
    alpha: f64,
    qudits: Option<(usize, usize)>,
    tol: f64,
    common: &Common,
    stdout: &mut (dyn Write + Send),
) -> Outcome {
    let file = read_matrix_file(path)?;
    let m = file.to_matrix()?;
    let u = UnitaryMatrix::new(m)?;
    let sys = system_for(u.dim(), qudits)?;
    let g = DisplacementTable::new(&sys).char_matrix(&u)?;
    let clifford = g.is_permutation(tol);
    let verdict = if clifford { "clifford" } else { "non-clifford" };
    let (value, residual) = if alpha == 1.0 {
        (shannon_clifford_entropy(&sys, &u)?, None)
    } else {
        (clifford_entropy_of(&g, alpha)?, Some(choi_relation_residual(&sys, &u, alpha)?))
    };
    let mut table = CsvTable::new(
        format!("{TOOL} entropy matrix={} alpha={alpha} group={:?}", path.display(), sys.local_dims()),
        &["d", "alpha", "H_alpha", "verdict", "choi_residual"],
    );
    table.push(vec![
        sys.dim().to_string(),
        real(alpha),
        real(value),
        verdict.into(),
        residual.map(real).unwrap_or_default(),
    ]);
    if common.out.is_some() {
        emit(&table, common, stdout)?;
    }
    print(stdout, format!("H_{alpha} = {value:.12}"))?;
    print(stdout, format!("verdict: {verdict}"))?;
    if let Some(r) = residual {
        print(stdout, format!("choi_residual = {r:.3e}"))?;
    }
    Ok(())
}

fn entropy_of_state(
    path: &Path,
    alpha: f64,
    qudits: Option<(usize, usize)>,
    common: &Common,
    stdout: &mut (dyn Write + Send),
) -> Outcome {
    let psi = read_matrix_file(path)?.to_state()?;
    let sys = system_for(psi.len(), qudits)?;
    let chi = ChiDistribution::new(&DisplacementTable::new(&sys), &psi)?;
    let renyi = chi.entropy(alpha, EntropyKind::Renyi)?;
    let lin = chi.entropy(alpha, EntropyKind::TsallisLin)?;
    let mut table = CsvTable::new(
        format!("{TOOL} entropy state={} alpha={alpha} group={:?}", path.display(), sys.local_dims()),
        &["d", "alpha", "M_alpha", "M_lin"],
    );
    table.push(vec![sys.dim().to_string(), real(alpha), real(renyi), real(lin)]);
    if common.out.is_some() {
        emit(&table, common, stdout)?;
    }
    print(stdout, format!("M_{alpha} = {renyi:.12}"))?;
    print(stdout, format!("M_lin = {lin:.12}"))
}

fn join(dims: &[usize]) -> String {
    dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
}

fn group_config(dims: Option<&[usize]>, qudits: Option<(usize, usize)>) -> String {
    match qudits {
        Some((dl, n)) => format!("qudits={dl},{n}"),
        None => format!("d={}", join(dims.unwrap_or_default())),
    }
}

fn parity_variant(d: usize) -> HaarAverageVariant {
    if d % 2 == 1 {
        HaarAverageVariant::OddD
    } else {
        HaarAverageVariant::EvenD
    }
}

fn haar_avg(
    dims: Option<&[usize]>,
    qudits: Option<(usize, usize)>,
    samples: usize,
    with_qubits: bool,
    common: &Common,
    stdout: &mut (dyn Write + Send),
) -> Outcome {
    let mut table = CsvTable::new(
        format!(
            "{TOOL} haar-avg {} samples={samples} with_qubits={with_qubits} seed={}",
            group_config(dims, qudits),
            common.seed
        ),
        &["d", "variant", "n_samples", "seed", "mc_mean", "mc_stderr", "analytic"],
    );
    let root = RngStream::new(common.seed);
    let mut jobs: Vec<(QuditSystem, HaarAverageVariant)> = Vec::new();
    if let Some((dl, n)) = qudits {
        let sys = QuditSystem::new(dl, n)?;
        let variant = if n == 1 {
            parity_variant(dl)
        } else {
            HaarAverageVariant::for_system(&sys).ok_or_else(|| {
                Failure::Precondition(format!("no closed-form Haar average for the group of {n} qudits with d_L = {dl}"))
            })?
        };
        jobs.push((sys, variant));
    } else {
        for &d in dims.unwrap_or_default() {
            jobs.push((QuditSystem::single(d)?, parity_variant(d)));
            if with_qubits && d > 2 && d.is_power_of_two() {
                jobs.push((QuditSystem::new(2, d.trailing_zeros() as usize)?, HaarAverageVariant::Qubits));
            }
        }
    }
    for (sys, variant) in jobs {
        let d = sys.dim();
        let stream = root.fork(d as u64).fork(variant as u64);
        let est = mc_avg_h2(&sys, samples, &stream)?;
        let analytic = analytic_avg_h2(d, variant)?;
        table.push(vec![
            d.to_string(),
            variant.name().into(),
            samples.to_string(),
            common.seed.to_string(),
            real(est.mean),
            real(est.std_error),
            real(analytic),
        ]);
    }
    emit(&table, common, stdout)
}

fn with_dim_suffix(path: &Path, d: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_d{d}.{}", ext.to_string_lossy()),
        None => format!("{stem}_d{d}"),
    };
    path.with_file_name(name)
}

fn maximize(
    dims: &[usize],
    restarts: usize,
    max_iters: usize,
    save: Option<&Path>,
    common: &Common,
    stdout: &mut (dyn Write + Send),
) -> Outcome {
    let mut table = CsvTable::new(
        format!(
            "{TOOL} maximize d={} restarts={restarts} max_iters={max_iters} seed={}",
            join(dims),
            common.seed
        ),
        &["d", "restarts", "seed", "best_H2", "bound", "analytic_avg", "gap_to_bound"],
    );
    let root = RngStream::new(common.seed);
    for &d in dims {
        let sys = QuditSystem::single(d)?;
        let result = maximize_h2(&sys, restarts, max_iters, &root.fork(d as u64))?;
        let bound = h2_upper_bound(d);
        table.push(vec![
            d.to_string(),
            restarts.to_string(),
            common.seed.to_string(),
            real(result.best_value),
            real(bound),
            real(analytic_avg_h2(d, parity_variant(d))?),
            real(bound - result.best_value),
        ]);
        if let Some(path) = save {
            let target = if dims.len() > 1 { with_dim_suffix(path, d) } else { path.to_path_buf() };
            std::fs::write(&target, MatrixFile::from_matrix(result.best.matrix()).to_json())
                .map_err(|e| Failure::Io(format!("cannot write {}: {e}", target.display())))?;
        }
    }
    emit(&table, common, stdout)
}

fn subadd(dims: &[usize], pairs: usize, reps: usize, common: &Common, stdout: &mut (dyn Write + Send)) -> Outcome {
    let mut table = CsvTable::new(
        format!("{TOOL} subadd d={} pairs={pairs} reps={reps} seed={}", join(dims), common.seed),
        &["d", "rep", "n_pairs", "seed", "violations", "frequency"],
    );
    let root = RngStream::new(common.seed);
    for &d in dims {
        let sys = QuditSystem::single(d)?;
        let report = subadditivity_violation_rate(&sys, pairs, reps, &root.fork(d as u64))?;
        for (rep, (&v, &f)) in report.violations.iter().zip(&report.frequencies).enumerate() {
            table.push(vec![
                d.to_string(),
                rep.to_string(),
                pairs.to_string(),
                common.seed.to_string(),
                v.to_string(),
                real(f),
            ]);
        }
    }
    emit(&table, common, stdout)
}

#[allow(clippy::too_many_arguments)]
fn tcount(
    dims: Option<&[usize]>,
    qudits: Option<(usize, usize)>,
    t: usize,
    circuits: usize,
    word_length: usize,
    common: &Common,
    stdout: &mut (dyn Write + Send),
) -> Outcome {
    let mut table = CsvTable::new(
        format!(
            "{TOOL} tcount {} t={t} circuits={circuits} word_length={word_length} seed={}",
            group_config(dims, qudits),
            common.seed
        ),
        &["d", "t", "circuit_index", "H2_U", "H2_T", "ratio", "bound_holds"],
    );
    let systems = match qudits {
        Some((dl, n)) => vec![QuditSystem::new(dl, n)?],
        None => dims
            .unwrap_or_default()
            .iter()
            .map(|&d| QuditSystem::single(d))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let root = RngStream::new(common.seed);
    for sys in systems {
        let report = tcount_bound_experiment(&sys, t, circuits, word_length, &root.fork(sys.dim() as u64))?;
        for (i, (&h, &r)) in report.h2_u.iter().zip(&report.ratios).enumerate() {
            table.push(vec![
                sys.dim().to_string(),
                t.to_string(),
                i.to_string(),
                real(h),
                real(report.h2_t),
                real(r),
                (r <= t as f64 + RATIO_SLACK).to_string(),
            ]);
        }
    }
    emit(&table, common, stdout)
}

fn sic(dims: &[usize], restarts: usize, common: &Common, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> Outcome {
    let mut table = CsvTable::new(
        format!("{TOOL} sic dim={} restarts={restarts} seed={}", join(dims), common.seed),
        &[
            "dim",
            "restarts",
            "seed",
            "frame_potential",
            "max_overlap_dev",
            "avg_purity",
            "predicted_purity",
        ],
    );
    let root = RngStream::new(common.seed);
    for &dim in dims {
        let fid = sic_fiducial_search(dim, restarts, &root.fork(dim as u64))?;
        if !fid.accepted {
            let _ = writeln!(
                stderr,
                "warning: no SIC fiducial found in dimension {dim} after {restarts} restarts (best deviation {:.3e})",
                fid.max_overlap_deviation
            );
        }
        let (purity, predicted) = match exact_sqrt(dim) {
            Some(d) if fid.accepted => (real(sic_subsystem_purity(&fid, d)?), real(predicted_sic_purity(d))),
            _ => (String::new(), String::new()),
        };
        table.push(vec![
            dim.to_string(),
            restarts.to_string(),
            common.seed.to_string(),
            real(fid.frame_potential),
            real(fid.max_overlap_deviation),
            purity,
            predicted,
        ]);
    }
    emit(&table, common, stdout)
}
