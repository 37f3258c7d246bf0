mod render;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use kpgalois::cache::{self, CacheStatus};
use kpgalois::float::FloatModularData;
use kpgalois::fusion::verlinde_table;
use kpgalois::galois_action::{build_action_table, galois_group_elements, normalize_ell};
use kpgalois::invariants::{self, Invariant};
use kpgalois::modular_data::{conformal_weight, enumerate_weights, t_exponent, AffineWeight};
use kpgalois::relations::{RelationReport, Verifier};
use kpgalois::{Error, FiniteWeight, ModularData, SimpleAlgebra};

use render::{labels, Format, Output};

/// Exact modular data, fusion rules, link invariants and Galois relations
/// for affine Kac-Moody algebras.
#[derive(Parser)]
#[command(name = "kpgalois", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Simple algebra, e.g. A2, G2, E6.
    #[arg(long)]
    algebra: String,
    /// Level k.
    #[arg(long)]
    level: u32,
    #[arg(long, value_enum, default_value_t = Backend::Exact)]
    backend: Backend,
    /// Galois elements: `all`, or a comma-separated list of integers coprime to N.
    #[arg(long, default_value = "all")]
    ell: String,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Directory for cached modular data.
    #[arg(long, env = "KPGALOIS_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long)]
    no_cache: bool,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Parallel unknots in S^3.
    Unknots,
    /// Verlinde dimension on S^1 x (genus h surface).
    Verlinde,
    /// Chain of linked unknots.
    Chain,
    /// Unknots linked around a central one.
    Keychain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Relation {
    #[value(name = "5a")]
    R5a,
    #[value(name = "5b")]
    R5b,
    #[value(name = "5c")]
    R5c,
    #[value(name = "5d")]
    R5d,
    #[value(name = "5e")]
    R5e,
    #[value(name = "6a")]
    R6a,
    #[value(name = "6b")]
    R6b,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// List P_+^k.
    Weights(Common),
    /// Print the S matrix.
    Smatrix(Common),
    /// Print the diagonal of the T matrix.
    Tmatrix(Common),
    /// Print every fusion coefficient N_{lambda,mu}^nu.
    Fusion(Common),
    /// Print the Galois permutation and signs.
    Galois {
        #[command(flatten)]
        common: Common,
        /// Keep one representative per distinct action on S.
        #[arg(long)]
        dedup: bool,
    },
    /// Evaluate a closed-form link invariant.
    Invariant {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: Kind,
        /// A weight argument as Dynkin labels, e.g. `1,0`; repeat for more.
        #[arg(long = "weight")]
        weights: Vec<String>,
        /// Central weight of a key chain.
        #[arg(long)]
        center: Option<String>,
        /// Genus for the Verlinde dimension.
        #[arg(long, default_value_t = 0)]
        genus: u32,
    },
    /// Check Galois relations exactly; exits 1 if any instance fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Relation::All)]
        relation: Relation,
        /// Largest genus in the Verlinde-dimension relation.
        #[arg(long, default_value_t = 2)]
        genus_max: u32,
        /// Largest number of weight arguments in the invariant relations.
        #[arg(long, default_value_t = 3)]
        points_max: usize,
    },
}

/// A problem with the invocation rather than with the mathematics.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn is_usage(e: &anyhow::Error) -> bool {
    if e.is::<UsageError>() {
        return true;
    }
    matches!(
        e.downcast_ref::<Error>(),
        Some(
            Error::InvalidAlgebra { .. }
                | Error::Parse(_)
                | Error::ExactBound { .. }
                | Error::FloatBound { .. }
                | Error::UnknownWeight(_)
                | Error::NotGaloisElement { .. }
                | Error::DimensionMismatch { .. }
                | Error::NotDominant(_)
        )
    )
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Weights(c) | Command::Smatrix(c) | Command::Tmatrix(c) | Command::Fusion(c) => c,
        Command::Galois { common, .. }
        | Command::Invariant { common, .. }
        | Command::Verify { common, .. } => common,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let c = common(&cli.command).clone();
    if let Some(j) = c.jobs {
        if j == 0 {
            return Err(usage("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let alg = Arc::new(SimpleAlgebra::parse(&c.algebra)?);
    let mut code = ExitCode::SUCCESS;
    let output = match &cli.command {
        Command::Weights(_) => cmd_weights(&alg, c.level),
        Command::Smatrix(_) => match load(&c, &alg)? {
            Data::Exact(md) => exact_smatrix(&md),
            Data::Float(fd) => float_smatrix(&fd),
        },
        Command::Tmatrix(_) => match load(&c, &alg)? {
            Data::Exact(md) => exact_tmatrix(&md)?,
            Data::Float(fd) => float_tmatrix(&fd),
        },
        Command::Fusion(_) => match load(&c, &alg)? {
            Data::Exact(md) => {
                let t = verlinde_table(&md)?;
                fusion_output(&alg.name(), c.level, md.weights(), |a, b, n| t.get(a, b, n))
            }
            Data::Float(fd) => {
                let t = fd.verlinde_table()?;
                fusion_output(&alg.name(), c.level, &fd.weights, |a, b, n| t[a][b][n])
            }
        },
        Command::Galois { dedup, .. } => {
            let md = require_exact(load(&c, &alg)?, "galois")?;
            cmd_galois(&md, &c.ell, *dedup)?
        }
        Command::Invariant {
            kind,
            weights,
            center,
            genus,
            ..
        } => {
            let ws = weights
                .iter()
                .map(|s| parse_weight(s, alg.rank()))
                .collect::<Result<Vec<_>>>()?;
            let center = center.as_deref().map(|s| parse_weight(s, alg.rank())).transpose()?;
            cmd_invariant(load(&c, &alg)?, *kind, &ws, center.as_ref(), *genus)?
        }
        Command::Verify {
            relation,
            genus_max,
            points_max,
            ..
        } => {
            let md = require_exact(load(&c, &alg)?, "verify")?;
            let (out, all_passed) = cmd_verify(&md, &c.ell, *relation, *genus_max, *points_max)?;
            if !all_passed {
                code = ExitCode::from(1);
            }
            out
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let written = output.write(c.format, &mut lock).and_then(|_| Ok(lock.flush()?));
    match written {
        Err(e) if is_broken_pipe(&e) => Ok(code),
        other => other.map(|_| code),
    }
}

enum Data {
    Exact(Box<ModularData>),
    Float(FloatModularData),
}

fn require_exact(d: Data, what: &str) -> Result<ModularData> {
    match d {
        Data::Exact(md) => Ok(*md),
        Data::Float(_) => Err(usage(format!("`{what}` needs --backend exact"))),
    }
}

fn default_cache_dir() -> Option<PathBuf> {
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("kpgalois"))
}

fn load(c: &Common, alg: &Arc<SimpleAlgebra>) -> Result<Data> {
    if c.backend == Backend::Float {
        return Ok(Data::Float(FloatModularData::build(alg, c.level)?));
    }
    let dir = if c.no_cache {
        None
    } else {
        c.cache_dir.clone().or_else(default_cache_dir)
    };
    let Some(dir) = dir else {
        return Ok(Data::Exact(Box::new(ModularData::build(alg.clone(), c.level)?)));
    };
    let (md, status) = cache::load_or_build(&dir, alg.clone(), c.level)?;
    if let CacheStatus::Rebuilt(why) = status {
        eprintln!("warning: rebuilt cached modular data ({why})");
    }
    Ok(Data::Exact(Box::new(md)))
}

fn parse_weight(s: &str, rank: usize) -> Result<FiniteWeight> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| usage(format!("cannot read weight `{s}`; expected Dynkin labels like 1,0")))?;
    if v.len() != rank {
        return Err(usage(format!("weight `{s}` has {} labels, expected {rank}", v.len())));
    }
    Ok(FiniteWeight(v))
}

fn select_ells(md: &ModularData, arg: &str) -> Result<Vec<i64>> {
    if arg.trim() == "all" {
        return Ok(galois_group_elements(md, false));
    }
    arg.split(',')
        .map(|s| {
            let ell: i64 = s
                .trim()
                .parse()
                .map_err(|_| usage(format!("cannot read Galois element `{s}`")))?;
            Ok(normalize_ell(ell, md.order())?)
        })
        .collect()
}

fn cmd_weights(alg: &SimpleAlgebra, k: u32) -> Output {
    let ws = enumerate_weights(alg, k);
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for (i, w) in ws.iter().enumerate() {
        let h = conformal_weight(alg, k, &w.labels);
        let dim = alg.weyl_dimension(&w.labels);
        rows.push(vec![
            i.to_string(),
            labels(&w.labels.0),
            w.zeroth_label(alg).to_string(),
            dim.to_string(),
            h.to_string(),
        ]);
        items.push(json!({
            "index": i,
            "labels": w.labels.0,
            "zeroth_label": w.zeroth_label(alg),
            "dimension": dim.to_string(),
            "conformal_weight": h.to_string(),
        }));
    }
    Output {
        title: Some(format!("P_+^{k} for {} ({} weights)", alg.name(), ws.len())),
        headers: vec!["index", "labels", "lambda_0", "dimension", "conformal_weight"],
        rows,
        json: json!({ "algebra": alg.name(), "level": k, "weights": items }),
        footer: vec![],
    }
}

fn complex_cells(z: Complex64) -> [String; 2] {
    // adding 0.0 turns -0.0 into 0.0
    [format!("{:.15}", z.re + 0.0), format!("{:.15}", z.im + 0.0)]
}

fn weight_labels(ws: &[AffineWeight]) -> Vec<Vec<i64>> {
    ws.iter().map(|w| w.labels.0.clone()).collect()
}

fn exact_smatrix(md: &ModularData) -> Output {
    let n = md.len();
    let mut rows = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let x = md.s_entry(a, b);
            let [re, im] = complex_cells(x.embed());
            rows.push(vec![
                labels(&md.weights()[a].labels.0),
                labels(&md.weights()[b].labels.0),
                x.to_string(),
                re,
                im,
            ]);
        }
    }
    Output {
        title: Some(format!(
            "S for {} at level {} in Q(z), z = exp(2 pi i/{})",
            md.algebra().name(),
            md.level(),
            md.order()
        )),
        headers: vec!["lambda", "mu", "exact", "re", "im"],
        rows,
        json: json!({
            "algebra": md.algebra().name(),
            "level": md.level(),
            "N": md.order(),
            "weights": weight_labels(md.weights()),
            "S": md.s(),
        }),
        footer: vec![],
    }
}

fn float_smatrix(fd: &FloatModularData) -> Output {
    let n = fd.weights.len();
    let mut rows = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let [re, im] = complex_cells(fd.s[a][b]);
            rows.push(vec![labels(&fd.weights[a].labels.0), labels(&fd.weights[b].labels.0), re, im]);
        }
    }
    let s: Vec<Vec<[f64; 2]>> = fd
        .s
        .iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect();
    Output {
        title: Some(format!("S for {} at level {} (float)", fd.algebra, fd.level)),
        headers: vec!["lambda", "mu", "re", "im"],
        rows,
        json: json!({
            "algebra": fd.algebra,
            "level": fd.level,
            "weights": weight_labels(&fd.weights),
            "S": s,
        }),
        footer: vec![],
    }
}

fn exact_tmatrix(md: &ModularData) -> Result<Output> {
    let mut rows = Vec::new();
    let mut exps = Vec::new();
    for (i, w) in md.weights().iter().enumerate() {
        let e = t_exponent(md.algebra(), md.level(), md.order(), &w.labels)?.rem_euclid(md.order() as i64);
        let [re, im] = complex_cells(md.t()[i].embed());
        rows.push(vec![labels(&w.labels.0), e.to_string(), re, im]);
        exps.push(e);
    }
    Ok(Output {
        title: Some(format!(
            "T for {} at level {}: T = z^e, z = exp(2 pi i/{})",
            md.algebra().name(),
            md.level(),
            md.order()
        )),
        headers: vec!["lambda", "e", "re", "im"],
        rows,
        json: json!({
            "algebra": md.algebra().name(),
            "level": md.level(),
            "N": md.order(),
            "weights": weight_labels(md.weights()),
            "exponents": exps,
            "T": md.t(),
        }),
        footer: vec![],
    })
}

fn float_tmatrix(fd: &FloatModularData) -> Output {
    let rows = fd
        .weights
        .iter()
        .zip(&fd.t)
        .map(|(w, z)| {
            let [re, im] = complex_cells(*z);
            vec![labels(&w.labels.0), re, im]
        })
        .collect();
    let t: Vec<[f64; 2]> = fd.t.iter().map(|z| [z.re, z.im]).collect();
    Output {
        title: Some(format!("T for {} at level {} (float)", fd.algebra, fd.level)),
        headers: vec!["lambda", "re", "im"],
        rows,
        json: json!({ "algebra": fd.algebra, "level": fd.level, "weights": weight_labels(&fd.weights), "T": t }),
        footer: vec![],
    }
}

fn fusion_output(alg: &str, k: u32, ws: &[AffineWeight], get: impl Fn(usize, usize, usize) -> u64) -> Output {
    let n = ws.len();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v = get(a, b, c);
                rows.push(vec![
                    labels(&ws[a].labels.0),
                    labels(&ws[b].labels.0),
                    labels(&ws[c].labels.0),
                    v.to_string(),
                ]);
                entries.push(json!({
                    "lambda": ws[a].labels.0,
                    "mu": ws[b].labels.0,
                    "nu": ws[c].labels.0,
                    "N": v,
                }));
            }
        }
    }
    Output {
        title: Some(format!("fusion coefficients N_(lambda,mu)^nu for {alg} at level {k}")),
        headers: vec!["lambda", "mu", "nu", "N"],
        rows,
        json: json!({ "algebra": alg, "level": k, "entries": entries }),
        footer: vec![],
    }
}

fn cmd_galois(md: &ModularData, ell: &str, dedup: bool) -> Result<Output> {
    let ells = if ell.trim() == "all" && dedup {
        galois_group_elements(md, true)
    } else {
        select_ells(md, ell)?
    };
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for l in ells {
        let a = build_action_table(md, l)?;
        let mut table = Vec::new();
        for (i, w) in md.weights().iter().enumerate() {
            let image = &md.weights()[a.perm[i]].labels.0;
            rows.push(vec![
                a.ell.to_string(),
                labels(&w.labels.0),
                labels(image),
                a.signs[i].to_string(),
                a.fold_signs[i].to_string(),
            ]);
            table.push(json!({
                "lambda": w.labels.0,
                "sigma_lambda": image,
                "epsilon": a.signs[i],
                "parity": a.fold_signs[i],
            }));
        }
        items.push(json!({ "ell": a.ell, "eta": a.eta, "action": table }));
    }
    Ok(Output {
        title: Some(format!(
            "Galois action for {} at level {} (N = {}); epsilon = eta * parity",
            md.algebra().name(),
            md.level(),
            md.order()
        )),
        headers: vec!["ell", "lambda", "sigma_lambda", "epsilon", "parity"],
        rows,
        json: json!({ "algebra": md.algebra().name(), "level": md.level(), "N": md.order(), "elements": items }),
        footer: vec![],
    })
}

fn float_invariant(fd: &FloatModularData, inv: &Invariant) -> Result<Complex64> {
    let s = &fd.s;
    let r = |a: usize, b: usize| s[a][b] / s[0][b];
    Ok(match inv {
        Invariant::ParallelUnknots { weights } => weights.iter().fold(s[0][0], |acc, &l| acc * r(l, 0)),
        Invariant::VerlindeDimension { genus, weights } => (0..s.len())
            .map(|mu| {
                let g = s[0][mu].powi(2 * (1 - *genus as i32));
                weights.iter().fold(g, |acc, &l| acc * r(l, mu))
            })
            .sum(),
        Invariant::Chain { weights } => {
            let first = *weights.first().ok_or_else(|| usage("a chain needs at least one --weight"))?;
            weights.windows(2).fold(s[0][first], |acc, w| acc * r(w[1], w[0]))
        }
        Invariant::Keychain { center, weights } => {
            weights.iter().fold(s[0][*center], |acc, &l| acc * r(l, *center))
        }
    })
}

fn cmd_invariant(
    data: Data,
    kind: Kind,
    ws: &[FiniteWeight],
    center: Option<&FiniteWeight>,
    genus: u32,
) -> Result<Output> {
    let (all, name, level): (&[AffineWeight], String, u32) = match &data {
        Data::Exact(md) => (md.weights(), md.algebra().name(), md.level()),
        Data::Float(fd) => (&fd.weights, fd.algebra.clone(), fd.level),
    };
    let index = |w: &FiniteWeight| {
        all.iter()
            .position(|a| &a.labels == w)
            .ok_or_else(|| usage(format!("{w} is not in P_+^{level}")))
    };
    let idx = ws.iter().map(index).collect::<Result<Vec<_>>>()?;
    let inv = match kind {
        Kind::Unknots => Invariant::ParallelUnknots { weights: idx },
        Kind::Verlinde => Invariant::VerlindeDimension { genus, weights: idx },
        Kind::Chain => {
            if idx.is_empty() {
                return Err(usage("a chain needs at least one --weight"));
            }
            Invariant::Chain { weights: idx }
        }
        Kind::Keychain => {
            let c = center.ok_or_else(|| usage("a key chain needs --center"))?;
            Invariant::Keychain {
                center: index(c)?,
                weights: idx,
            }
        }
    };
    let args: Vec<Vec<i64>> = ws.iter().map(|w| w.0.clone()).collect();
    let (exact, z) = match &data {
        Data::Exact(md) => {
            let v = invariants::evaluate(md, &inv)?;
            (Some(v.exact.clone()), v.approx())
        }
        Data::Float(fd) => (None, float_invariant(fd, &inv)?),
    };
    let [re, im] = complex_cells(z);
    let exact_cell = exact.as_ref().map_or_else(|| "-".to_string(), |x| x.to_string());
    Ok(Output {
        title: Some(format!("{kind:?} invariant for {name} at level {level}")),
        headers: vec!["invariant", "exact", "re", "im"],
        rows: vec![vec![format!("{inv}"), exact_cell, re, im]],
        json: json!({
            "algebra": name,
            "level": level,
            "invariant": inv,
            "weights": args,
            "center": center.map(|c| c.0.clone()),
            "exact": exact,
            "re": z.re,
            "im": z.im,
        }),
        footer: vec![],
    })
}

fn cmd_verify(
    md: &ModularData,
    ell: &str,
    relation: Relation,
    genus_max: u32,
    points_max: usize,
) -> Result<(Output, bool)> {
    let ells = select_ells(md, ell)?;
    let v = Verifier::new(md)?;
    let mut reports: Vec<RelationReport> = Vec::new();
    let want = |r: Relation| relation == Relation::All || relation == r;
    for &l in &ells {
        if want(Relation::R5a) {
            reports.push(v.verify_5a(l)?);
        }
        if want(Relation::R5b) {
            reports.push(v.verify_5b(l)?);
        }
        if want(Relation::R5c) {
            reports.push(v.verify_5c(l, genus_max, points_max)?);
        }
        // The chain and key-chain relations share one pass over the tuples.
        if want(Relation::R5d) || (relation == Relation::R5e) {
            reports.push(v.verify_5d_5e(l, points_max)?);
        }
        if want(Relation::R6a) {
            reports.push(v.verify_6a(l)?);
        }
        if want(Relation::R6b) {
            reports.push(v.verify_6b(l)?);
        }
    }
    if reports.is_empty() {
        bail!(anyhow!("no relation selected"));
    }
    let all_passed = reports.iter().all(RelationReport::passed);
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.relation.clone(),
                r.params.ell.to_string(),
                r.tested.to_string(),
                r.skipped_boundary.to_string(),
                r.failure_count.to_string(),
                if r.passed() { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let mut footer = Vec::new();
    for r in reports.iter().filter(|r| !r.passed()) {
        for w in &r.failures {
            let ws: Vec<String> = w.weights.iter().map(|x| labels(x)).collect();
            footer.push(format!("{} ell={} at {}: {}", r.relation, r.params.ell, ws.join(" "), w.detail));
        }
    }
    let total: std::time::Duration = reports.iter().map(|r| r.wall_time).sum();
    footer.push(format!(
        "{} reports, {} failing, {:.2}s",
        reports.len(),
        reports.iter().filter(|r| !r.passed()).count(),
        total.as_secs_f64()
    ));
    let out = Output {
        title: Some(format!(
            "Galois relations for {} at level {} (N = {})",
            md.algebra().name(),
            md.level(),
            md.order()
        )),
        headers: vec!["relation", "ell", "tested", "skipped_boundary", "failures", "verdict"],
        rows,
        json: serde_json::to_value(&reports)?,
        footer,
    };
    Ok((out, all_passed))
}
