use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nsfaid::code::{find_pipeline_row_order, parse_alist, DegreeDistribution, QcCode, TannerGraph};
use nsfaid::de::{default_mu_grid, DeOptions, DensityEvolution, ThresholdResult};
use nsfaid::framing::{count_framings, enumerate, FramingFunction, FramingSet};
use nsfaid::kernel::{Decoder, KernelConfig};
use nsfaid::schedule::{
    check_pipeline, naive_vnu_mapping, optimize_vnu_mapping, throughput, Architecture, VnuMapping,
};
use nsfaid::search::{
    best_per_lambda, build_best_uniform_sets, evaluate_ensemble, memory_reduction, search_regular,
    unconstrained_count, weight_for_bits, IrregularSpace,
};
use nsfaid::sim::{check_monotone, run, CodewordMode, SimPlan};

/// Non-surjective finite alphabet LDPC decoders: thresholds, search,
/// simulation and architecture analysis.
#[derive(Parser)]
#[command(name = "nsfaid", version)]
struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for CSV/JSON outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Density-evolution threshold of one kernel.
    DeThreshold(DeThresholdArgs),
    /// Rank every regular framing of one weight.
    SearchRegular(SearchRegularArgs),
    /// Best-uniform sets, constrained irregular count and ensemble table.
    SearchIrregular(SearchIrregularArgs),
    /// Monte-Carlo BER/FER over BI-AWGN.
    Simulate(SimulateArgs),
    /// Pipeline check, VN-to-VNU mapping and throughput.
    AnalyzeSchedule(AnalyzeScheduleArgs),
    /// Count or list framing functions.
    EnumerateFramings(EnumerateArgs),
}

#[derive(Args)]
struct EnsembleArgs {
    /// `dv,dc` for a regular ensemble, or `wimax`.
    #[arg(long, conflicts_with = "code")]
    dist: Option<String>,
    /// Base matrix (`.bm`) or alist file; its degree distribution is used.
    #[arg(long)]
    code: Option<PathBuf>,
}

#[derive(Args)]
struct DeThresholdArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Kernel config (TOML or JSON).
    #[arg(long, conflicts_with = "lut")]
    kernel: Option<PathBuf>,
    /// One LUT literal for every degree, e.g. `[0,1,1,3,3,3,7,7]`.
    #[arg(long)]
    lut: Option<String>,
    /// Gain factor; optimized over the default grid when absent.
    #[arg(long)]
    mu: Option<f64>,
    /// Target error probability (0 means 1e-10 with 2000 iterations).
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
}

#[derive(Args)]
struct SearchRegularArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 4)]
    q: u32,
    /// Framing bit-length; the weight is `2^(w-1)`.
    #[arg(long, conflicts_with = "weight")]
    w: Option<u32>,
    /// Framing weight `W` (number of distinct LUT values).
    #[arg(long)]
    weight: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Rows printed from the ranked list.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Args)]
struct SearchIrregularArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 4)]
    q: u32,
    /// Cutoffs as `w=dB`, comma separated.
    #[arg(long, default_value = "2=5,3=3")]
    cutoffs: String,
    #[arg(long, default_value_t = 1e-6)]
    eta: f64,
    /// Report counts only; no DE on irregular candidates.
    #[arg(long)]
    count_only: bool,
    /// Evaluate every constrained candidate (hours to days).
    #[arg(long, conflicts_with = "count_only")]
    long_run: bool,
    /// DE evaluations allowed without `--long-run`.
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    kernel: PathBuf,
    /// `start:step:stop` or a comma list, in dB.
    #[arg(long)]
    snr: String,
    #[arg(long, default_value_t = 100)]
    min_frame_errors: u64,
    #[arg(long, default_value_t = 10_000_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Codeword::AllZero)]
    codeword: Codeword,
}

#[derive(Clone, Copy, ValueEnum)]
enum Codeword {
    AllZero,
    Random,
}

#[derive(Args)]
struct AnalyzeScheduleArgs {
    /// Base matrix file.
    #[arg(long)]
    code: PathBuf,
    /// Kernel config supplying per-degree framings (default: min-sum).
    #[arg(long)]
    kernel: Option<PathBuf>,
    /// Comma-separated base-row order; `auto` searches for a pipelinable one.
    #[arg(long)]
    row_order: Option<String>,
    #[arg(long, default_value_t = 1)]
    rows_per_layer: usize,
    /// Clock frequency in MHz for the throughput estimate.
    #[arg(long, default_value_t = 200)]
    f_mhz: u64,
    #[arg(long, default_value_t = 20)]
    iters: u64,
    #[arg(long, value_enum, default_value_t = Arch::Pipelined)]
    arch: Arch,
}

#[derive(Clone, Copy, ValueEnum)]
enum Arch {
    Pipelined,
    FullLayer,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, default_value_t = 4)]
    q: u32,
    #[arg(long, conflicts_with = "weight")]
    w: Option<u32>,
    #[arg(long)]
    weight: Option<usize>,
    #[arg(long)]
    count_only: bool,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<nsfaid::Error> for Failure {
    fn from(e: nsfaid::Error) -> Self {
        use nsfaid::Error as E;
        match e {
            E::Parse { .. }
            | E::EntryOutOfRange { .. }
            | E::Alphabet(_)
            | E::Lut(_)
            | E::Offset { .. }
            | E::LayerSize { .. }
            | E::LayerOverlap { .. }
            | E::ScheduleMismatch(_)
            | E::Plan(_)
            | E::Config(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let out = Output::new(cli.out.clone());
    let result = match &cli.command {
        Command::DeThreshold(a) => de_threshold(a, &out),
        Command::SearchRegular(a) => search_regular_cmd(a, &out),
        Command::SearchIrregular(a) => search_irregular_cmd(a, &out),
        Command::Simulate(a) => simulate(a, cli.threads.unwrap_or(0), &out),
        Command::AnalyzeSchedule(a) => analyze_schedule(a, &out),
        Command::EnumerateFramings(a) => enumerate_framings(a, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn new(dir: Option<PathBuf>) -> Self {
        Output { dir }
    }

    fn path(&self, name: &str) -> std::result::Result<Option<PathBuf>, Failure> {
        match &self.dir {
            None => Ok(None),
            Some(d) => {
                fs::create_dir_all(d).map_err(runtime)?;
                Ok(Some(d.join(name)))
            }
        }
    }

    fn csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Outcome {
        if let Some(p) = self.path(name)? {
            let mut w = csv::Writer::from_path(&p).map_err(runtime)?;
            for r in rows {
                w.serialize(r).map_err(runtime)?;
            }
            w.flush().map_err(runtime)?;
        }
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Outcome {
        if let Some(p) = self.path(name)? {
            let text = serde_json::to_string_pretty(value).map_err(runtime)?;
            fs::write(p, text + "\n").map_err(runtime)?;
        }
        Ok(())
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

enum LoadedCode {
    Qc(QcCode),
    Graph(TannerGraph),
}

impl LoadedCode {
    fn distribution(&self) -> DegreeDistribution {
        match self {
            LoadedCode::Qc(c) => c.degree_distribution(),
            LoadedCode::Graph(g) => g.degree_distribution(),
        }
    }
}

fn load_code(path: &Path) -> std::result::Result<LoadedCode, Failure> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "alist") {
        Ok(LoadedCode::Graph(parse_alist(&text)?))
    } else {
        Ok(LoadedCode::Qc(QcCode::parse(&text)?))
    }
}

fn load_kernel(path: &Path) -> std::result::Result<KernelConfig, Failure> {
    Ok(KernelConfig::parse(&read(path)?)?)
}

fn ensemble(a: &EnsembleArgs) -> std::result::Result<DegreeDistribution, Failure> {
    if let Some(p) = &a.code {
        return Ok(load_code(p)?.distribution());
    }
    let spec = a.dist.as_deref().unwrap_or("3,6");
    if spec.eq_ignore_ascii_case("wimax") {
        return Ok(DegreeDistribution::wimax_half_rate());
    }
    let parts: Vec<usize> = spec
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Failure::Invalid(format!("--dist {spec:?}: expected `dv,dc` or `wimax`")))?;
    match parts[..] {
        [dv, dc] if dv >= 2 && dc >= 2 => Ok(DegreeDistribution::regular(dv, dc)),
        _ => Err(Failure::Invalid(format!(
            "--dist {spec:?}: expected `dv,dc` or `wimax`"
        ))),
    }
}

fn eta_options(eta: f64) -> std::result::Result<DeOptions, Failure> {
    if !(0.0..0.5).contains(&eta) {
        return Err(Failure::Invalid(format!("--eta {eta} outside [0, 0.5)")));
    }
    Ok(DeOptions::for_eta(eta))
}

fn bits_to_weight(
    q: u32,
    w: Option<u32>,
    weight: Option<usize>,
) -> std::result::Result<usize, Failure> {
    if !(2..=8).contains(&q) {
        return Err(Failure::Invalid(format!("--q {q} outside [2, 8]")));
    }
    let max_w = 1usize << (q - 1);
    let weight = match (w, weight) {
        (Some(w), _) if (1..=q).contains(&w) => weight_for_bits(w),
        (Some(w), _) => return Err(Failure::Invalid(format!("--w {w} outside [1, {q}]"))),
        (None, Some(wt)) => wt,
        (None, None) => return Err(Failure::Invalid("give --w or --weight".into())),
    };
    if weight == 0 || weight > max_w {
        return Err(Failure::Invalid(format!(
            "weight {weight} outside [1, {max_w}]"
        )));
    }
    Ok(weight)
}

#[derive(Serialize)]
struct ThresholdRow {
    kernel: String,
    mu: f64,
    eta: f64,
    threshold_db: f64,
    iterations: usize,
}

fn de_threshold(a: &DeThresholdArgs, out: &Output) -> Outcome {
    let dist = ensemble(&a.ensemble)?;
    let opts = eta_options(a.eta)?;
    let (framings, cfg_mu) = match (&a.kernel, &a.lut) {
        (Some(p), _) => {
            let cfg = load_kernel(p)?;
            (cfg.framings()?, Some(cfg.mu))
        }
        (None, Some(lut)) => {
            let f: FramingFunction = lut.parse()?;
            (FramingSet::Uniform(f), None)
        }
        (None, None) => (FramingSet::Uniform(FramingFunction::identity(7)), None),
    };
    framings.check_covers(dist.vn_degrees())?;
    let de = DensityEvolution::new(&dist, &framings)?;
    let result: ThresholdResult = match a.mu.or(cfg_mu) {
        Some(mu) => de.eta_threshold(mu, &opts)?,
        None => de.optimize_mu(&default_mu_grid(), &opts)?,
    };
    let label = match &framings {
        FramingSet::Uniform(f) => f.to_string(),
        FramingSet::PerDegree(m) => m
            .iter()
            .map(|(d, f)| format!("{d}:{f}"))
            .collect::<Vec<_>>()
            .join(" "),
    };
    println!(
        "{label}  threshold {:.3} dB (mu = {:.1}, eta = {}, {} iterations)",
        result.snr_db, result.mu_opt, a.eta, result.iterations_to_converge
    );
    if let (FramingSet::PerDegree(_), Some(p)) = (&framings, &a.kernel) {
        let q = load_kernel(p)?.q;
        let m = memory_reduction(&framings, &dist, q);
        println!(
            "memory vs {q}-bit MS: VN {:.2}%, CN uncompressed {:.2}%, CN compressed {:.2}%",
            m.vn_pct, m.cn_uncompressed_pct, m.cn_compressed_pct
        );
    }
    out.csv(
        "thresholds.csv",
        &[ThresholdRow {
            kernel: label,
            mu: result.mu_opt,
            eta: a.eta,
            threshold_db: result.snr_db,
            iterations: result.iterations_to_converge,
        }],
    )
}

#[derive(Serialize)]
struct RankRow {
    rank: usize,
    lut: String,
    lambda: i32,
    threshold_db: Option<f64>,
    mu: Option<f64>,
}

fn search_regular_cmd(a: &SearchRegularArgs, out: &Output) -> Outcome {
    let dist = ensemble(&a.ensemble)?;
    if !dist.is_regular() {
        return Err(Failure::Invalid(
            "search-regular needs a regular ensemble".into(),
        ));
    }
    let weight = bits_to_weight(a.q, a.w, a.weight)?;
    let opts = eta_options(a.eta)?;
    let max = (1i32 << (a.q - 1)) - 1;
    let ranked = search_regular(&dist, max, weight, &opts, &default_mu_grid())?;
    let rows: Vec<RankRow> = ranked
        .iter()
        .enumerate()
        .map(|(i, r)| RankRow {
            rank: i + 1,
            lut: r.framing.to_string(),
            lambda: r.framing.lambda(),
            threshold_db: r.threshold.as_ref().map(|t| t.snr_db),
            mu: r.threshold.as_ref().map(|t| t.mu_opt),
        })
        .collect();
    println!(
        "{} framings of weight {weight} on [-{max}, {max}]",
        rows.len()
    );
    for r in rows.iter().take(a.top) {
        println!(
            "{:>5}  {:<28} {}",
            r.rank,
            r.lut,
            fmt_threshold(r.threshold_db, r.mu)
        );
    }
    println!("best per |F(0)|:");
    for (lambda, r) in best_per_lambda(&ranked) {
        let t = r.threshold.as_ref();
        println!(
            "  {lambda}  {:<28} {}",
            r.framing.to_string(),
            fmt_threshold(t.map(|t| t.snr_db), t.map(|t| t.mu_opt))
        );
    }
    out.csv("search_regular.csv", &rows)?;
    out.json("search_regular.json", &rows)
}

fn fmt_threshold(t: Option<f64>, mu: Option<f64>) -> String {
    match (t, mu) {
        (Some(t), Some(mu)) => format!("{t:.3} dB (mu = {mu:.1})"),
        _ => "no threshold".into(),
    }
}

fn parse_cutoffs(s: &str) -> std::result::Result<BTreeMap<u32, f64>, Failure> {
    let bad = || Failure::Invalid(format!("--cutoffs {s:?}: expected `w=dB,...`"));
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (w, db) = p.split_once('=').ok_or_else(bad)?;
            Ok((
                w.trim().parse().map_err(|_| bad())?,
                db.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

#[derive(Serialize)]
struct CountReport {
    u_sizes: BTreeMap<u32, usize>,
    constrained: u64,
    unconstrained: String,
}

fn search_irregular_cmd(a: &SearchIrregularArgs, out: &Output) -> Outcome {
    let dist = ensemble(&a.ensemble)?;
    let opts = eta_options(a.eta)?;
    let cutoffs = parse_cutoffs(&a.cutoffs)?;
    if !(2..=8).contains(&a.q) {
        return Err(Failure::Invalid(format!("--q {} outside [2, 8]", a.q)));
    }
    let max = (1i32 << (a.q - 1)) - 1;
    let bit_lengths: Vec<u32> = (2..=a.q).collect();
    let degrees: Vec<usize> = dist.vn_degrees().collect();
    let grid = default_mu_grid();
    let sets = build_best_uniform_sets(&dist, max, &bit_lengths, &cutoffs, &opts, &grid)?;
    let space = IrregularSpace::new(&sets, &degrees);
    let report = CountReport {
        u_sizes: sets.iter().map(|(&w, s)| (w, s.len())).collect(),
        constrained: space.count(),
        unconstrained: unconstrained_count(max, &bit_lengths, degrees.len()).to_string(),
    };
    for (w, n) in &report.u_sizes {
        let cut = cutoffs
            .get(w)
            .map_or("all".to_string(), |c| format!("<= {c} dB"));
        println!("|U(w={w})| = {n} ({cut})");
    }
    println!("constrained irregular candidates: {}", report.constrained);
    println!("unconstrained product: {}", report.unconstrained);
    out.json("irregular_counts.json", &report)?;
    if a.count_only {
        return Ok(());
    }
    let ms = FramingSet::Uniform(FramingFunction::identity(max));
    let ms_threshold = DensityEvolution::new(&dist, &ms)?.optimize_mu(&grid, &opts)?;
    let budget = (!a.long_run).then_some(a.budget);
    let table = evaluate_ensemble(
        space.iter(),
        &dist,
        a.q,
        &opts,
        &grid,
        ms_threshold.snr_db,
        budget,
    )?;
    println!(
        "evaluated {} candidates{}",
        table.evaluated,
        if table.partial {
            " (budget exhausted; partial table)"
        } else {
            ""
        }
    );
    println!("ensemble  threshold        gain     VN      CN-u    CN-c    LUTs");
    for r in &table.rows {
        let luts: Vec<String> = r.luts.iter().map(|(d, l)| format!("{d}:{l}")).collect();
        println!(
            "{:<9} {:.3} ({:.1})  {:+.3}  {:6.2}  {:6.2}  {:6.2}  {}",
            r.w_profile,
            r.threshold_db,
            r.mu,
            r.gain_vs_ms_db,
            r.mem_vn,
            r.mem_cn_u,
            r.mem_cn_c,
            luts.join(" ")
        );
    }
    #[derive(Serialize)]
    struct CsvRow<'a> {
        w_profile: &'a str,
        luts: String,
        threshold_db: f64,
        mu: f64,
        gain_vs_ms_db: f64,
        mem_vn: f64,
        mem_cn_u: f64,
        mem_cn_c: f64,
    }
    let csv_rows: Vec<CsvRow> = table
        .rows
        .iter()
        .map(|r| CsvRow {
            w_profile: &r.w_profile,
            luts: r
                .luts
                .iter()
                .map(|(d, l)| format!("{d}:{l}"))
                .collect::<Vec<_>>()
                .join(" "),
            threshold_db: r.threshold_db,
            mu: r.mu,
            gain_vs_ms_db: r.gain_vs_ms_db,
            mem_vn: r.mem_vn,
            mem_cn_u: r.mem_cn_u,
            mem_cn_c: r.mem_cn_c,
        })
        .collect();
    out.csv("tradeoff.csv", &csv_rows)?;
    out.json("tradeoff.json", &table)
}

fn parse_snrs(s: &str) -> std::result::Result<Vec<f64>, Failure> {
    let bad = || {
        Failure::Invalid(format!(
            "--snr {s:?}: expected `start:step:stop` or a comma list"
        ))
    };
    let nums = |parts: &[&str]| -> std::result::Result<Vec<f64>, Failure> {
        parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => nums(&s.split(',').collect::<Vec<_>>()),
        3 => {
            let v = nums(&parts)?;
            let (start, step, stop) = (v[0], v[1], v[2]);
            if !(step > 0.0) || stop < start {
                return Err(bad());
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n)
                .map(|i| ((start + i as f64 * step) * 1e6).round() / 1e6)
                .collect())
        }
        _ => Err(bad()),
    }
}

fn simulate(a: &SimulateArgs, threads: usize, out: &Output) -> Outcome {
    let code = load_code(&a.code)?;
    let cfg = load_kernel(&a.kernel)?;
    let decoder = match &code {
        LoadedCode::Qc(c) => Decoder::for_qc(c, cfg.to_spec(Some(c))?)?,
        LoadedCode::Graph(g) => Decoder::new(g.clone(), cfg.to_spec(None)?)?,
    };
    let mut plan = SimPlan::new(parse_snrs(&a.snr)?);
    plan.min_frame_errors = a.min_frame_errors;
    plan.max_frames = a.max_frames;
    plan.seed = a.seed;
    plan.threads = threads;
    plan.codeword = match a.codeword {
        Codeword::AllZero => CodewordMode::AllZero,
        Codeword::Random => CodewordMode::Random,
    };
    plan.validate()?;
    let points = run(&decoder, &plan)?;
    println!("snr_db    frames      bit_err   frame_err  ber        fer        avg_iters");
    for p in &points {
        println!(
            "{:<8.3}  {:<10}  {:<8}  {:<9}  {:<9.3e}  {:<9.3e}  {:.2}",
            p.snr_db, p.frames, p.bit_errors, p.frame_errors, p.ber, p.fer, p.avg_iters
        );
    }
    out.csv("ber.csv", &points)?;
    check_monotone(&points, decoder.graph().n(), 5.0).map_err(runtime)
}

#[derive(Serialize)]
struct ScheduleReport {
    row_order: Vec<usize>,
    rows_per_layer: usize,
    pipeline_ok: bool,
    violations: Vec<nsfaid::code::PipelineViolation>,
    mapping: Option<VnuMapping>,
    naive_cost: Option<(usize, usize)>,
    optimized_cost: Option<(usize, usize)>,
}

#[derive(Serialize)]
struct ThroughputRow {
    n: u64,
    f_max_mhz: u64,
    layers: u64,
    n_iter: u64,
    delta: u64,
    throughput_mbps: u64,
}

fn analyze_schedule(a: &AnalyzeScheduleArgs, out: &Output) -> Outcome {
    let code = match load_code(&a.code)? {
        LoadedCode::Qc(c) => c,
        LoadedCode::Graph(_) => {
            return Err(Failure::Invalid(
                "analyze-schedule needs a QC base matrix".into(),
            ))
        }
    };
    let order: Vec<usize> = match a.row_order.as_deref() {
        None => (0..code.rows()).collect(),
        Some("auto") => find_pipeline_row_order(&code).map_err(runtime)?,
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Failure::Invalid(format!("--row-order {s:?}")))?,
    };
    let framings = match &a.kernel {
        Some(p) => load_kernel(p)?.framings()?,
        None => FramingSet::Uniform(FramingFunction::identity(7)),
    };
    let pipe = check_pipeline(&code, &order, a.rows_per_layer)?;
    println!(
        "row order {:?}, {} rows per layer: pipeline {}",
        order,
        a.rows_per_layer,
        if pipe.ok { "ok" } else { "violated" }
    );
    for v in &pipe.violations {
        println!(
            "  layers {} -> {} share column {}",
            v.layer, v.next_layer, v.col
        );
    }
    let (mapping, naive_cost, optimized_cost) = if a.rows_per_layer == 1 {
        let naive = naive_vnu_mapping(&code, &order, &framings)?;
        let best = optimize_vnu_mapping(&code, &order, &framings)?;
        print_mapping(&best, &order);
        let costs = (naive.cost(), best.cost());
        (Some(best), Some(costs.0), Some(costs.1))
    } else {
        (None, None, None)
    };
    let layers = (code.rows() / a.rows_per_layer.max(1)) as u64;
    let arch = match a.arch {
        Arch::Pipelined => Architecture::Pipelined,
        Arch::FullLayer => Architecture::FullLayer,
    };
    let t = throughput(code.n() as u64, a.f_mhz * 1_000_000, layers, a.iters, arch);
    println!(
        "throughput: N = {}, f = {} MHz, L = {}, n_iter = {}, delta = {} -> {} Mbps",
        t.n,
        a.f_mhz,
        t.layers,
        t.n_iter,
        t.delta,
        t.mbps()
    );
    out.json(
        "schedule.json",
        &ScheduleReport {
            row_order: order,
            rows_per_layer: a.rows_per_layer,
            pipeline_ok: pipe.ok,
            violations: pipe.violations,
            mapping,
            naive_cost,
            optimized_cost,
        },
    )?;
    out.csv(
        "throughput.csv",
        &[ThroughputRow {
            n: t.n,
            f_max_mhz: a.f_mhz,
            layers: t.layers,
            n_iter: t.n_iter,
            delta: t.delta,
            throughput_mbps: t.mbps(),
        }],
    )
}

fn print_mapping(m: &VnuMapping, order: &[usize]) {
    let width = m.slot_functions.len();
    print!("layer(row) ");
    for s in 0..width {
        print!("{:>5}", format!("V{}", s + 1));
    }
    println!();
    for (row, slots) in order.iter().zip(&m.slots) {
        print!("{:<11}", format!("L({row})"));
        for c in slots {
            match c {
                Some(c) => print!("{c:>5}"),
                None => print!("{:>5}", "-"),
            }
        }
        println!();
    }
    print!("{:<11}", "functions");
    for s in &m.slot_functions {
        print!("{:>5}", s.len());
    }
    println!();
    let (multi, total) = m.cost();
    println!("multi-function slots: {multi}, framing-function instances: {total}");
}

#[derive(Serialize)]
struct FramingRow {
    lut: String,
    lambda: i32,
    weight: usize,
    bits: u32,
}

fn enumerate_framings(a: &EnumerateArgs, out: &Output) -> Outcome {
    let weight = bits_to_weight(a.q, a.w, a.weight)?;
    let max = (1i32 << (a.q - 1)) - 1;
    let count = count_framings(max, weight);
    println!("{count}");
    if a.count_only {
        return Ok(());
    }
    let rows: Vec<FramingRow> = enumerate(max, weight)
        .into_iter()
        .map(|f| FramingRow {
            lut: f.to_string(),
            lambda: f.lambda(),
            weight: f.weight(),
            bits: f.bits(),
        })
        .collect();
    if out.dir.is_none() {
        for r in &rows {
            println!("{}", r.lut);
        }
    }
    out.csv("framings.csv", &rows)
}
