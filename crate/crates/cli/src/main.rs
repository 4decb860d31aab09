//! `extcat`: build or load a category window and run the analyses.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use extcat::derived::{build_window, render_dot};
use extcat::fixtures::{self, Fixture};
use extcat::groth::{self, MonoidEq};
use extcat::model::validate_model;
use extcat::strat::{self, StratSystem};
use extcat::table::{load_model, save_model, Mode};
use extcat::{CategoryModel, Error, IndecId, Obj};

#[derive(Parser)]
#[command(name = "extcat", version, about = "Stratifying systems and Jordan-Hölder analysis on finite category windows")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Load or build a model, validate it, write it and its AR-quiver DOT.
    Model(ModelArgs),
    /// Stratifying-system checks, construction and multiplicities.
    Strat(StratArgs),
    /// Grothendieck monoid presentation and word problem.
    Monoid(MonoidArgs),
    /// Grothendieck group.
    K0(Source),
    /// Simples, composition series verdicts and the three-way check.
    Jh(Source),
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    General,
    Exact,
}

#[derive(Args, Clone)]
struct Source {
    /// Bundled fixture: ex5_1, ex5_2, ex5_3, win4, modA2, modA4.
    #[arg(long, group = "src")]
    fixture: Option<String>,
    /// Model interchange file.
    #[arg(long, group = "src")]
    file: Option<PathBuf>,
    /// Derived window of A_n: `n=4` or `n=4,shifts=0..1`.
    #[arg(long, group = "src")]
    build: Option<String>,
    /// Override the mode declared by a model file.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Field characteristic for derived windows.
    #[arg(long = "char", env = "EXTCAT_CHAR", default_value_t = 2)]
    characteristic: u32,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    src: Source,
    /// Write the AR-quiver rendering here (`-` for stdout).
    #[arg(long)]
    dot: Option<String>,
    /// Write the model interchange file here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `filtered`, or a comma-separated list of names to shade.
    #[arg(long)]
    highlight: Option<String>,
}

#[derive(Args)]
struct StratArgs {
    #[command(flatten)]
    src: Source,
    /// Φ as comma-separated names (defaults to the fixture's Φ).
    #[arg(long)]
    phi: Option<String>,
    /// Build the minimal projective system.
    #[arg(long)]
    construct: bool,
    /// Check a given system, `Q=Q1,Q2,...`.
    #[arg(long)]
    check: Option<String>,
    /// Multiplicities of `M=<object>` by the matrix method.
    #[arg(long)]
    multiplicities: Option<String>,
}

#[derive(Args)]
struct MonoidArgs {
    #[command(flatten)]
    src: Source,
    /// Decide `[X] = [Y]`.
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    equal: Option<Vec<String>>,
    /// Vector-norm bound for rewrite searches.
    #[arg(long, default_value_t = groth::DEFAULT_NORM_BOUND)]
    bound: u32,
}

enum Failure {
    Lib(Error),
    Config(String),
    Disagree,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Schema(_)
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::UnknownIndec(_)
        | Error::UnsupportedCharacteristic(_) => 2,
        Error::Validation(_) => 3,
        Error::AnnotationMissing(_) => 4,
        Error::Consistency(_) => 5,
        _ => 1,
    }
}

struct Loaded {
    fixture: Option<Fixture>,
    model: CategoryModel,
}

impl Loaded {
    /// Model that Φ and Q refer to.
    fn ambient(&self) -> &CategoryModel {
        self.fixture
            .as_ref()
            .and_then(|f| f.strat.as_ref())
            .map_or(&self.model, |s| &s.ambient)
    }
}

fn parse_build(spec: &str, p: u32) -> Res<CategoryModel> {
    let mut n = None;
    let (mut lo, mut hi) = (0, 0);
    for part in spec.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("bad --build item {part:?}")))?;
        let bad = || Failure::Config(format!("bad --build value {part:?}"));
        match k.trim() {
            "n" => n = Some(v.trim().parse::<usize>().map_err(|_| bad())?),
            "shifts" => {
                let (a, b) = v.split_once("..").ok_or_else(bad)?;
                lo = a.trim().parse().map_err(|_| bad())?;
                hi = b.trim().parse().map_err(|_| bad())?;
            }
            _ => return Err(bad()),
        }
    }
    let n = n.ok_or_else(|| Failure::Config("--build needs n=<vertices>".into()))?;
    if n == 0 || n > 12 || lo > hi {
        return Err(Failure::Config(format!("unsupported window {spec:?}")));
    }
    Ok(build_window(n, lo..=hi, &format!("A{n}"), p)?)
}

fn load(src: &Source) -> Res<Loaded> {
    let mode = src.mode.map(|m| match m {
        ModeArg::General => Mode::General,
        ModeArg::Exact => Mode::Exact,
    });
    if let Some(name) = &src.fixture {
        let f = fixtures::fixture(name, src.characteristic)?;
        return Ok(Loaded {
            model: f.model.clone(),
            fixture: Some(f),
        });
    }
    if let Some(path) = &src.file {
        return Ok(Loaded {
            fixture: None,
            model: load_model(path, mode)?,
        });
    }
    if let Some(spec) = &src.build {
        return Ok(Loaded {
            fixture: None,
            model: parse_build(spec, src.characteristic)?,
        });
    }
    Err(Failure::Config(
        "one of --fixture, --file or --build is required".into(),
    ))
}

fn names(m: &CategoryModel, ids: &[IndecId]) -> Vec<String> {
    ids.iter().map(|&i| m.name(i).to_string()).collect()
}

fn parse_ids(m: &CategoryModel, list: &str) -> Res<Vec<IndecId>> {
    Ok(list
        .split(',')
        .map(|s| m.id_of(s.trim()))
        .collect::<extcat::Result<_>>()?)
}

fn phi_of(l: &Loaded, given: Option<&str>) -> Res<Vec<IndecId>> {
    match (given, l.fixture.as_ref().and_then(|f| f.strat.as_ref())) {
        (Some(s), _) => parse_ids(l.ambient(), s),
        (None, Some(sd)) => Ok(sd.phi.clone()),
        (None, None) => Err(Failure::Config("--phi is required for this model".into())),
    }
}

fn strip_key<'a>(arg: &'a str, key: &str) -> Res<&'a str> {
    arg.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Failure::Config(format!("expected {key}=..., got {arg:?}")))
}

fn cmd_model(a: &ModelArgs) -> Res<Value> {
    let l = load(&a.src)?;
    let report = validate_model(&l.model);
    if !report.is_ok() {
        return Err(Error::Validation(report.violations).into());
    }
    let drawn = l.fixture.as_ref().map_or(&l.model, |f| f.drawn());
    let highlight: BTreeSet<IndecId> = match a.highlight.as_deref() {
        None => BTreeSet::new(),
        Some("filtered") => {
            let sd = l
                .fixture
                .as_ref()
                .and_then(|f| f.strat.as_ref())
                .ok_or_else(|| Failure::Config("--highlight filtered needs a fixture with Φ".into()))?;
            strat::filtered_closure(&sd.phi, &sd.ambient, strat::DEFAULT_CLOSURE_MULT)?
                .indecs
                .into_iter()
                .collect()
        }
        Some(list) => parse_ids(drawn, list)?.into_iter().collect(),
    };
    let dot = render_dot(drawn, &highlight);
    if let Some(path) = &a.dot {
        if path == "-" {
            use std::io::Write;
            let _ = std::io::stdout().lock().write_all(dot.as_bytes());
        } else {
            std::fs::write(path, &dot).map_err(Error::from)?;
        }
    }
    if let Some(path) = &a.out {
        save_model(&l.model, path)?;
    }
    let hl: Vec<IndecId> = highlight.into_iter().collect();
    Ok(json!({
        "label": l.model.meta().label,
        "indecs": l.model.names(),
        "exact_mode": l.model.meta().exact_mode,
        "characteristic": l.model.meta().characteristic,
        "display": names(drawn, &drawn.display()),
        "highlight": names(drawn, &hl),
        "vertices": drawn.display().len(),
        "valid": true,
    }))
}

fn cmd_strat(a: &StratArgs) -> Res<Value> {
    let l = load(&a.src)?;
    let amb = l.ambient().clone();
    let phi = phi_of(&l, a.phi.as_deref())?;
    let q = match &a.check {
        Some(arg) => Some(
            strip_key(arg, "Q")?
                .split(',')
                .map(|s| amb.parse_obj(s.trim()))
                .collect::<extcat::Result<Vec<Obj>>>()?,
        ),
        None => None,
    };
    if q.as_ref().is_some_and(|q| q.len() != phi.len()) {
        return Err(Failure::Config("Q must have one entry per Φ_i".into()));
    }
    let construct = a.construct || a.multiplicities.is_some();
    let (report, sys) = strat::strat_report(&phi, q, construct, &amb)?;
    let mut out = serde_json::to_value(&report).expect("report serialises");
    // JH verdict of F(Φ) itself, next to the left-exactness hypothesis
    let closure = strat::filtered_closure(&phi, &amb, strat::DEFAULT_CLOSURE_MULT)?;
    let sub = extcat::model::restrict(&amb, &closure.indecs, "F(Φ)");
    let (jh, length) = groth::jh_and_length_verdict(&sub, groth::DEFAULT_WINDOW_MULT)?;
    out["jh"] = serde_json::to_value(jh).expect("tri");
    out["length"] = serde_json::to_value(length).expect("tri");
    if let Some(arg) = &a.multiplicities {
        let m = amb.parse_obj(strip_key(arg, "M")?)?;
        let sys: StratSystem = match sys {
            Some(s) => s,
            None => strat::build_projective_system(&phi, &amb)?,
        };
        let mult = strat::multiplicities(&m, &sys, &amb)?;
        let fs = strat::enumerate_filtrations(&m, &phi, &amb, strat::default_cap(&m))?;
        let counts: BTreeSet<Vec<u32>> = fs
            .filtrations
            .iter()
            .map(|f| strat::factor_vector(f, &phi))
            .collect();
        out["multiplicities"] = json!({
            "M": amb.fmt_obj(&m),
            "m": mult,
            "filtration_counts": counts,
            "truncated": fs.truncated,
        });
    }
    Ok(out)
}

fn cmd_monoid(a: &MonoidArgs) -> Res<Value> {
    let l = load(&a.src)?;
    let m = &l.model;
    let p = groth::monoid_presentation(m, groth::DEFAULT_ENDS_MULT)?;
    let sim = groth::simples(m)?;
    let (reduced, witness) = groth::is_reduced(&p);
    let atoms = groth::atoms(&p, a.bound);
    let mut out = json!({
        "generators": names(m, &p.generators),
        "relations": (0..p.relations.len()).map(|r| p.fmt_relation(r, m)).collect::<Vec<_>>(),
        "reduced": reduced,
        "reduced_witness": witness.map(|r| p.fmt_relation(r, m)),
        "atoms": names(m, &atoms.atoms),
        "atoms_truncated": atoms.truncated,
        "free": groth::monoid_free_on_simples(&p, &sim, a.bound),
    });
    if let Some(xy) = &a.equal {
        let x = p.vector(&m.parse_obj(&xy[0])?);
        let y = p.vector(&m.parse_obj(&xy[1])?);
        let r = groth::monoid_equal(&p, &x, &y, a.bound);
        let mut v = json!({ "x": xy[0], "y": xy[1] });
        match r {
            MonoidEq::Equal { chain } => {
                v["result"] = json!("equal");
                v["chain"] = chain
                    .iter()
                    .map(|s| {
                        json!({
                            "relation": p.fmt_relation(s.relation, m),
                            "forward": s.forward,
                            "result": m.fmt_obj(&Obj::from_counts(&s.result)),
                        })
                    })
                    .collect();
            }
            MonoidEq::NotEqual => v["result"] = json!("not_equal"),
            MonoidEq::Unknown => v["result"] = json!("unknown"),
        }
        out["equal"] = v;
    }
    Ok(out)
}

fn cmd_k0(src: &Source) -> Res<Value> {
    let l = load(src)?;
    let m = &l.model;
    let p = groth::monoid_presentation(m, groth::DEFAULT_ENDS_MULT)?;
    let sim = groth::simples(m)?;
    let k = groth::k0(&p, &sim, m);
    Ok(json!({
        "generators": p.ngens(),
        "rank": k.free_rank,
        "invariant_factors": k.invariant_factors,
        "torsion": k.torsion(),
        "basis_flag": k.basis_flag,
        "simple_images": k.simple_images,
    }))
}

fn cmd_jh(src: &Source) -> Res<Value> {
    let l = load(src)?;
    let r = groth::groth_report(&l.model)?;
    let v = serde_json::to_value(&r).expect("report serialises");
    if !r.agree {
        emit(&v);
        return Err(Failure::Disagree);
    }
    Ok(v)
}

/// Pretty JSON on stdout; a closed pipe is not an error.
fn emit(v: &Value) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match &cli.cmd {
        Cmd::Model(a) => cmd_model(a),
        Cmd::Strat(a) => cmd_strat(a),
        Cmd::Monoid(a) => cmd_monoid(a),
        Cmd::K0(s) => cmd_k0(s),
        Cmd::Jh(s) => cmd_jh(s),
    };
    match res {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Disagree) => {
            eprintln!("error: the three Jordan-Hölder verdicts disagree");
            ExitCode::from(5)
        }
    }
}
