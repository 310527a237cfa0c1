//! `granulum`: command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed (report still printed), 2 input
//! or usage error.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use granulum::grif::{
    check_inclusion_theorem, check_semiring, form_theorems, grif_value, monotonicity_check, FormTau, GrifKind,
};
use granulum::inverse::{consistency_filter, enumerate_models, observations_from_json, Generator, UniverseSpec};
use granulum::norms::{
    check_snorm_axioms, check_tnorm_axioms, derive_snorm, norm_eval, residual_implication, Negation, NormKind,
    NormTriple, TNorm,
};
use granulum::pilot::{generate_dataset, generate_scenario, run_scenario, Measure, Ranking, Scenario};
use granulum::rational::{format_rational, grid, parse_rational, UnitRational};
use granulum::rif::{eval_rif, profile_inclusion_fn, InclusionFn};
use granulum::spaces::{
    approximation_table, check_admissibility, check_ggs_axioms, AbstractGgs, AdmissibilityOptions,
    AxiomMode, SetHgos,
};
use granulum::tables::{equivalence_from_table, successor_neighborhoods, BinaryRelationSpace, CoverSpace, InformationTable};
use granulum::{Error, Report, Result, Subset, SCHEMA};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "granulum", version, about = "Granular rough-set computation with exact rationals")]
struct Cli {
    /// Aligned text tables instead of JSON where a tabular view exists.
    #[arg(long, global = true)]
    table: bool,
    /// Worker threads for enumeration; output does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Granulation from a relation, a cover or an information table.
    Granules(GranulesArgs),
    /// Lower and upper approximations.
    Approx(ApproxArgs),
    /// Rough inclusion values and axiom profiles.
    Riff(RiffArgs),
    /// Granular rough inclusion matrices and their theorems.
    Grif(GrifArgs),
    /// Axiom and admissibility checks.
    Check(CheckArgs),
    /// Granulations consistent with observations, one JSON line each.
    Inverse(InverseArgs),
    /// Decision-support pilot.
    #[command(subcommand)]
    Pilot(PilotCommand),
    /// t-norms, s-norms and residual implication.
    Norms(NormsArgs),
}

#[derive(Args)]
struct GranulesArgs {
    /// Relation JSON `{"universe":[...],"pairs":[[x,y],...]}`.
    #[arg(long, conflicts_with_all = ["cover", "csv"])]
    relation: Option<PathBuf>,
    /// Cover JSON `{"universe":[...],"blocks":[[...],...]}`.
    #[arg(long, conflicts_with = "csv")]
    cover: Option<PathBuf>,
    /// Information table CSV; granules are the classes of `--attrs`.
    #[arg(long, requires = "attrs")]
    csv: Option<PathBuf>,
    /// Comma-separated attribute ids.
    #[arg(long)]
    attrs: Option<String>,
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long)]
    space: PathBuf,
    /// Comma-separated labels; omit for the whole approximation table.
    #[arg(long)]
    x: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FnName {
    K0,
    K1,
    K2,
    Kst,
}

#[derive(Args)]
struct TauArgs {
    /// Inclusion function.
    #[arg(long = "fn", alias = "tau", value_enum, default_value = "k0")]
    func: FnName,
    /// Base of `kst`.
    #[arg(long, value_enum, default_value = "k0")]
    base: FnName,
    /// Lower threshold of `kst`.
    #[arg(long)]
    s: Option<String>,
    /// Upper threshold of `kst`.
    #[arg(long)]
    t: Option<String>,
}

impl TauArgs {
    fn build(&self) -> Result<InclusionFn> {
        let simple = |f: FnName| match f {
            FnName::K0 => Ok(InclusionFn::K0),
            FnName::K1 => Ok(InclusionFn::K1),
            FnName::K2 => Ok(InclusionFn::K2),
            FnName::Kst => Err(Error::input("kst cannot be its own base")),
        };
        match self.func {
            FnName::Kst => {
                let need = |v: &Option<String>, n: &str| {
                    v.as_deref().ok_or_else(|| Error::input(format!("kst needs --{n}"))).and_then(parse_rational)
                };
                InclusionFn::kst(simple(self.base)?, need(&self.s, "s")?, need(&self.t, "t")?)
            }
            f => simple(f),
        }
    }
}

#[derive(Args)]
struct RiffArgs {
    #[arg(long)]
    space: PathBuf,
    #[command(flatten)]
    tau: TauArgs,
    /// Emit the axiom profile.
    #[arg(long)]
    profile: bool,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GrifCheck {
    Inclusion,
    Forms,
    FormsK1,
    Monotonicity,
    Semiring,
}

#[derive(Args)]
struct GrifArgs {
    #[arg(long)]
    space: Option<PathBuf>,
    #[command(flatten)]
    tau: TauArgs,
    /// basic | cobasic | zeta | one-certain | two-certain.
    #[arg(long, default_value = "zeta")]
    kind: String,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    /// Run a theorem check instead of evaluating one matrix.
    #[arg(long, value_enum)]
    check: Option<GrifCheck>,
    #[command(flatten)]
    norms: NormChoice,
    /// Grid denominator for `--check semiring`.
    #[arg(long, default_value_t = 2)]
    grid: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ggs,
    Gs,
    PreGgs,
    PreGs,
}

#[derive(Args)]
struct CheckArgs {
    /// Abstract space JSON.
    #[arg(long, conflicts_with = "space")]
    ggs: Option<PathBuf>,
    /// Set HGOS JSON.
    #[arg(long)]
    space: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "ggs")]
    mode: ModeArg,
    /// Also run WRA, LS and FU.
    #[arg(long)]
    admissibility: bool,
    /// Quantify FU over pairs `(g, g)` as well.
    #[arg(long)]
    fu_equal_pairs: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenArg {
    Relations,
    Pool,
}

#[derive(Args)]
struct InverseArgs {
    #[arg(long)]
    obs: PathBuf,
    /// Known universe, comma-separated.
    #[arg(long, conflicts_with = "bound")]
    universe: Option<String>,
    /// Search every universe of size 1..=k.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, value_enum, default_value = "relations")]
    gen: GenArg,
    /// Candidate granules for `--gen pool`, as `a,b;c` (`;` between granules).
    #[arg(long)]
    pool: Option<String>,
    #[arg(long, default_value_t = 3)]
    max_blocks: usize,
    #[command(flatten)]
    tau: TauArgs,
}

#[derive(Subcommand)]
enum PilotCommand {
    /// Synthetic dataset, or a scenario over it.
    Gen(PilotGenArgs),
    /// Replay a scenario as a JSON-lines decision log.
    Run(PilotRunArgs),
}

#[derive(Args)]
struct PilotGenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    q: usize,
    #[arg(long)]
    l: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit a scenario over the dataset instead of the dataset.
    #[arg(long)]
    scenario: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Grif,
    Rif,
}

#[derive(Args)]
struct PilotRunArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "grif")]
    measure: MeasureArg,
    #[command(flatten)]
    tau: TauArgs,
    /// Choose actions from stdin at steps 7 and 12.
    #[arg(long)]
    interactive: bool,
}

#[derive(Args)]
struct NormChoice {
    /// min | product | luk.
    #[arg(long, default_value = "min")]
    tnorm: String,
    /// max | prob | luk | derived.
    #[arg(long, default_value = "max")]
    snorm: String,
}

impl NormChoice {
    fn build(&self) -> Result<NormTriple> {
        let t: TNorm = self.tnorm.parse()?;
        let s = if self.snorm == "derived" { derive_snorm(t.clone(), Negation::Standard)? } else { self.snorm.parse()? };
        NormTriple::new(t, s, Negation::Standard)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormOp {
    T,
    S,
    Implication,
    Axioms,
}

#[derive(Args)]
struct NormsArgs {
    #[command(flatten)]
    norms: NormChoice,
    #[arg(long, value_enum, default_value = "t")]
    op: NormOp,
    /// Comma-separated rationals in [0, 1].
    #[arg(long, default_value = "")]
    args: String,
    /// Grid denominator for `--op axioms`.
    #[arg(long, default_value_t = 4)]
    grid: i64,
}

/// What a command produced.
enum Output {
    Doc(Value),
    Lines(Vec<Value>),
    Text(String),
}

struct Outcome {
    out: Output,
    failed: bool,
}

impl Outcome {
    fn ok(out: Output) -> Outcome {
        Outcome { out, failed: false }
    }
}

fn tagged(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), json!(SCHEMA));
        v
    } else {
        json!({"schema": SCHEMA, "value": v})
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<SetHgos> {
    SetHgos::from_json(&read(path)?)
}

fn labels(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

fn subset_arg(s: &SetHgos, arg: &Option<String>, name: &str) -> Result<Subset> {
    let raw = arg.as_deref().ok_or_else(|| Error::input(format!("--{name} is required")))?;
    s.universe().subset(&labels(raw))
}

/// Columns padded to their widest cell.
fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<width$}", width = w[i]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = vec![line(header.to_vec())];
    out.push(w.iter().map(|n| "-".repeat(*n)).collect::<Vec<_>>().join("  "));
    out.extend(rows.iter().map(|r| line(r.iter().map(String::as_str).collect())));
    out.join("\n")
}

fn report_outcome(report: &Report, table: bool, extra: Value) -> Outcome {
    let failed = !report.all_ok();
    let out = if table {
        let rows: Vec<Vec<String>> = report
            .checks
            .iter()
            .map(|c| {
                vec![
                    c.name.clone(),
                    serde_json::to_value(c.status).unwrap().as_str().unwrap_or_default().to_string(),
                    c.witness.as_ref().map(|w| w.join(" | ")).unwrap_or_default(),
                    c.note.clone().unwrap_or_default(),
                ]
            })
            .collect();
        Output::Text(text_table(&["check", "status", "witness", "note"], &rows))
    } else {
        let mut v = json!({"ok": !failed, "checks": report.checks});
        if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
            m.extend(e);
        }
        Output::Doc(v)
    };
    Outcome { out, failed }
}

fn granules(a: &GranulesArgs, table: bool) -> Result<Outcome> {
    let (universe, family, cover) = if let Some(p) = &a.relation {
        let rel = BinaryRelationSpace::from_json(&read(p)?)?;
        let n = successor_neighborhoods(&rel);
        (rel.universe.clone(), n.family(), n.cover)
    } else if let Some(p) = &a.cover {
        let c = CoverSpace::from_json(&read(p)?)?;
        let covered = c.blocks.iter().fold(Subset::EMPTY, |m, b| m.union(*b)) == c.universe.full();
        (c.universe.clone(), c.blocks.clone(), covered)
    } else if let Some(p) = &a.csv {
        let t = InformationTable::from_csv_str(&read(p)?)?;
        let rel = equivalence_from_table(&t, &labels(a.attrs.as_deref().unwrap_or_default()))?;
        let n = successor_neighborhoods(&rel);
        (rel.universe.clone(), n.family(), n.cover)
    } else {
        return Err(Error::input("one of --relation, --cover or --csv is required"));
    };
    let names: Vec<Vec<String>> = family.iter().map(|g| universe.names(*g)).collect();
    if table {
        let rows = names.iter().enumerate().map(|(i, g)| vec![(i + 1).to_string(), g.join(",")]).collect::<Vec<_>>();
        return Ok(Outcome::ok(Output::Text(text_table(&["#", "granule"], &rows))));
    }
    Ok(Outcome::ok(Output::Doc(json!({"universe": universe.labels(), "granules": names, "cover": cover}))))
}

fn approx(a: &ApproxArgs, table: bool) -> Result<Outcome> {
    let s = load_space(&a.space)?;
    let u = s.universe();
    if let Some(x) = &a.x {
        let x = u.subset(&labels(x))?;
        let (lo, hi) = (s.lower_set(x), s.upper_set(x));
        if table {
            return Ok(Outcome::ok(Output::Text(text_table(
                &["set", "lower", "upper"],
                &[vec![u.show(x), u.show(lo), u.show(hi)]],
            ))));
        }
        return Ok(Outcome::ok(Output::Doc(json!({"lower": u.names(lo), "upper": u.names(hi)}))));
    }
    let rows = approximation_table(&s);
    if table {
        let body: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![r.members.iter().map(|m| u.show(*m)).collect::<Vec<_>>().join(" "), u.show(r.lower), u.show(r.upper)]
            })
            .collect();
        return Ok(Outcome::ok(Output::Text(text_table(&["members", "lower", "upper"], &body))));
    }
    Ok(Outcome::ok(Output::Doc(json!({"rows": granulum::spaces::approximation_table_json(&s)}))))
}

fn riff(a: &RiffArgs, table: bool) -> Result<Outcome> {
    let s = load_space(&a.space)?;
    let tau = a.tau.build()?;
    if a.profile {
        let p = profile_inclusion_fn(&tau, &s)?;
        if table {
            // A profile is a description, not a verdict.
            let mut o = report_outcome(&p.report, true, Value::Null);
            o.failed = false;
            return Ok(o);
        }
        return Ok(Outcome::ok(Output::Doc(serde_json::to_value(&p).expect("profile serializes"))));
    }
    let (x, y) = (subset_arg(&s, &a.a, "a")?, subset_arg(&s, &a.b, "b")?);
    let v = eval_rif(&tau, &s, x, y)?;
    Ok(Outcome::ok(Output::Doc(json!({"value": format_rational(&v.get())}))))
}

fn grif(a: &GrifArgs, table: bool) -> Result<Outcome> {
    let tau = a.tau.build()?;
    if let Some(GrifCheck::Semiring) = a.check {
        if a.grid < 1 {
            return Err(Error::input("--grid must be positive"));
        }
        let r = check_semiring(&a.norms.build()?, &grid(a.grid))?;
        return Ok(report_outcome(&r, table, json!({"theorem": "semiring"})));
    }
    let s = load_space(a.space.as_deref().ok_or_else(|| Error::input("--space is required"))?)?;
    if let Some(c) = a.check {
        let (name, r) = match c {
            GrifCheck::Inclusion => ("inclusion", check_inclusion_theorem(&s, &tau)?),
            GrifCheck::Forms => ("forms", form_theorems(&s, FormTau::K0)?),
            GrifCheck::FormsK1 => ("forms-k1", form_theorems(&s, FormTau::K1)?),
            GrifCheck::Monotonicity => ("monotonicity", monotonicity_check(&s)?),
            GrifCheck::Semiring => unreachable!("handled above"),
        };
        return Ok(report_outcome(&r, table, json!({"theorem": name})));
    }
    let kind = GrifKind::parse(&a.kind, tau)?;
    let v = grif_value(&s, &kind, subset_arg(&s, &a.a, "a")?, subset_arg(&s, &a.b, "b")?)?;
    if table {
        if let Some(m) = v.matrix() {
            let f = |r| format_rational(&r);
            let rows = vec![
                vec!["l".to_string(), f(m.ll), f(m.lu)],
                vec!["u".to_string(), f(m.ul), f(m.uu)],
            ];
            return Ok(Outcome::ok(Output::Text(text_table(&["", "l", "u"], &rows))));
        }
    }
    Ok(Outcome::ok(Output::Doc(v.to_json_value())))
}

fn check(a: &CheckArgs, table: bool) -> Result<Outcome> {
    let mode = match a.mode {
        ModeArg::Ggs => AxiomMode::Ggs,
        ModeArg::Gs => AxiomMode::Gs,
        ModeArg::PreGgs => AxiomMode::PreGgs,
        ModeArg::PreGs => AxiomMode::PreGs,
    };
    let opts = AdmissibilityOptions { fu_include_equal_pairs: a.fu_equal_pairs };
    let mut r = Report::new();
    let mut extend = |x: Report| r.checks.extend(x.checks);
    if let Some(p) = &a.ggs {
        let g = AbstractGgs::from_json(&read(p)?)?;
        extend(check_ggs_axioms(&g, mode));
        if a.admissibility {
            extend(check_admissibility(&g, opts));
        }
    } else if let Some(p) = &a.space {
        let s = load_space(p)?;
        extend(check_ggs_axioms(&s, mode));
        if a.admissibility {
            extend(check_admissibility(&s, opts));
        }
    } else {
        return Err(Error::input("one of --ggs or --space is required"));
    }
    Ok(report_outcome(&r, table, json!({})))
}

fn inverse(a: &InverseArgs) -> Result<Outcome> {
    let obs = observations_from_json(&read(&a.obs)?)?;
    let spec = match (&a.universe, a.bound) {
        (Some(u), _) => UniverseSpec::Known(granulum::Universe::new(labels(u))?),
        (None, Some(k)) => UniverseSpec::Bound(k),
        (None, None) => return Err(Error::input("one of --universe or --bound is required")),
    };
    let generator = match a.gen {
        GenArg::Relations => Generator::Relations,
        GenArg::Pool => {
            let UniverseSpec::Known(u) = &spec else {
                return Err(Error::input("--gen pool needs --universe"));
            };
            let raw = a.pool.as_deref().ok_or_else(|| Error::input("--gen pool needs --pool"))?;
            let pool = raw.split(';').map(|g| u.subset(&labels(g))).collect::<Result<Vec<_>>>()?;
            Generator::Pool { pool, max_blocks: a.max_blocks }
        }
    };
    let models = enumerate_models(&spec, &generator)?;
    let kept = consistency_filter(&models, &obs, &a.tau.build()?)?;
    Ok(Outcome::ok(Output::Lines(kept.iter().map(|m| m.to_json_value()).collect())))
}

fn pilot(c: &PilotCommand) -> Result<Outcome> {
    match c {
        PilotCommand::Gen(a) => {
            let (ds, _) = generate_dataset(a.n, a.r, a.q, a.l, a.seed)?;
            if a.scenario {
                return Ok(Outcome::ok(Output::Doc(generate_scenario(&ds, a.seed)?.to_json_value())));
            }
            let report = granulum::pilot::check_dataset(&ds)?;
            let mut v = ds.to_json_value();
            v["checks"] = json!(report.checks);
            Ok(Outcome { out: Output::Doc(v), failed: !report.all_ok() })
        }
        PilotCommand::Run(a) => {
            let sc = Scenario::from_json(&read(&a.scenario)?)?;
            let tau = a.tau.build()?;
            let measure = match a.measure {
                MeasureArg::Grif => Measure::Grif(tau),
                MeasureArg::Rif => Measure::Rif(tau),
            };
            let stdin = io::stdin();
            let mut lines = stdin.lock().lines();
            let mut choose = |step: usize, r: &Ranking| -> usize {
                if !a.interactive {
                    return 0;
                }
                let mut err = io::stderr();
                let _ = writeln!(err, "step {step}: suggested actions");
                for (i, x) in r.ranked.iter().enumerate() {
                    let _ = writeln!(err, "  [{i}] {}", x.name);
                }
                let _ = write!(err, "choice (default 0): ");
                let _ = err.flush();
                match lines.next() {
                    Some(Ok(l)) => l.trim().parse().ok().filter(|k| *k < r.ranked.len()).unwrap_or(0),
                    _ => 0,
                }
            };
            let log = run_scenario(&sc, &measure, &mut choose)?;
            let lines: Vec<Value> = log
                .to_json_lines()
                .iter()
                .map(|l| serde_json::from_str(l).expect("log lines are json"))
                .collect();
            Ok(Outcome { out: Output::Lines(lines), failed: !log.improvement.status.is_ok() })
        }
    }
}

fn norms(a: &NormsArgs, table: bool) -> Result<Outcome> {
    let nt = a.norms.build()?;
    if let NormOp::Axioms = a.op {
        if a.grid < 1 {
            return Err(Error::input("--grid must be positive"));
        }
        let g = grid(a.grid);
        let mut r = Report::new();
        for c in check_tnorm_axioms(&nt.tnorm, &g)?.checks {
            r.push(granulum::Check { name: format!("t-norm {}", c.name), ..c });
        }
        for c in check_snorm_axioms(&nt.snorm, &g)?.checks {
            r.push(granulum::Check { name: format!("s-norm {}", c.name), ..c });
        }
        return Ok(report_outcome(&r, table, json!({"tnorm": nt.tnorm.to_string(), "snorm": nt.snorm.to_string()})));
    }
    let args: Vec<UnitRational> = labels(&a.args).iter().map(|x| x.parse()).collect::<Result<_>>()?;
    let v = match a.op {
        NormOp::T => norm_eval(&nt, NormKind::T, &args)?,
        NormOp::S => norm_eval(&nt, NormKind::S, &args)?,
        NormOp::Implication => match args[..] {
            [x, y] => residual_implication(&nt.tnorm, x, y)?,
            _ => return Err(Error::input("implication takes exactly two arguments")),
        },
        NormOp::Axioms => unreachable!("handled above"),
    };
    Ok(Outcome::ok(Output::Doc(json!({"value": format_rational(&v.get())}))))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Granules(a) => granules(a, cli.table),
        Command::Approx(a) => approx(a, cli.table),
        Command::Riff(a) => riff(a, cli.table),
        Command::Grif(a) => grif(a, cli.table),
        Command::Check(a) => check(a, cli.table),
        Command::Inverse(a) => inverse(a),
        Command::Pilot(c) => pilot(c),
        Command::Norms(a) => norms(a, cli.table),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Input(_) => "input",
        Error::Precondition(_) => "precondition",
        Error::Unsupported(_) => "unsupported",
        Error::Bound(_) => "bound",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("--workers must be positive");
            return ExitCode::from(2);
        }
        #[cfg(feature = "parallel")]
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match dispatch(&cli) {
        Ok(o) => {
            let res = match o.out {
                Output::Doc(v) => writeln!(out, "{}", tagged(v)),
                Output::Lines(vs) => vs.into_iter().try_for_each(|v| writeln!(out, "{}", tagged(v))),
                Output::Text(t) => writeln!(out, "{t}"),
            };
            if res.is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(u8::from(o.failed))
        }
        Err(e) => {
            let _ = writeln!(out, "{}", tagged(json!({"error": {"kind": error_kind(&e), "message": e.to_string()}})));
            ExitCode::from(2)
        }
    }
}
