//! Batch front end: load inputs, run any module's checks and
//! constructions, emit JSON/DOT/text reports.
//!
//! Exit codes: 0 all checks pass; 1 a property or witness failed (the
//! report names it); 2 input or schema error; 3 a size cap was
//! exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use unsharp_core::algebra::{
    self, algebra_from_json, enumerate_subalgebras, satisfies_all, sub_e_poset, AlgebraError,
    Equation, FiniteAlgebra,
};
use unsharp_core::contexts::{
    apply_hom, context_join, context_meet, context_of, fragment_build, Context, ContextError,
    Fragment, JoinResult, StarHom,
};
use unsharp_core::dasein::{section_at, value_interval, Character, DaseinError};
use unsharp_core::interval::{
    sup_bounded_lifted, sup_directed_lifted, IntervalError, IrBot, RatInterval,
};
use unsharp_core::matrix::{ComplexMatrix, MatrixError};
use unsharp_core::partitions::{non_continuity_witness, NatPartition, PartitionError};
use unsharp_core::poset::{FinitePoset, PosetError, PosetJson};
use unsharp_core::rat::Rat;
use unsharp_core::suite;

#[derive(Parser)]
#[command(
    name = "unsharp",
    version,
    about = "Order-theoretic toolkit for unsharp values"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Relative tolerance for matrix workflows (exact modules ignore it)
    #[arg(long, global = true, default_value = "1/1000000000")]
    tol: String,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for the randomized suites, echoed in every report
    #[arg(long, global = true, default_value_t = suite::DEFAULT_SEED)]
    seed: u64,
    /// Element cap for exhaustive poset reports
    #[arg(long, global = true, default_value_t = unsharp_core::poset::DEFAULT_REPORT_CAP)]
    cap_poset: usize,
    /// Valuation cap per equation check
    #[arg(long, global = true, default_value_t = algebra::DEFAULT_VALUATION_CAP)]
    cap_valuations: u64,
    /// Matrix dimension cap
    #[arg(long, global = true, default_value_t = unsharp_core::matrix::MAX_DIM_FLOAT)]
    cap_dim: usize,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-poset checks
    Poset {
        #[command(subcommand)]
        cmd: PosetCmd,
    },
    /// Interval-domain evaluation
    Ir {
        #[command(subcommand)]
        cmd: IrCmd,
    },
    /// Subalgebra lattices of finite algebras
    Subalg {
        #[command(subcommand)]
        cmd: SubalgCmd,
    },
    /// Matrix-algebra contexts
    Contexts {
        #[command(subcommand)]
        cmd: ContextsCmd,
    },
    /// Daseinisation: unsharp values and sections
    Dasein {
        #[command(subcommand)]
        cmd: DaseinCmd,
    },
    /// Non-continuity witnesses
    Witness {
        #[command(subcommand)]
        cmd: WitnessCmd,
    },
    /// Property batteries
    Suite {
        #[command(subcommand)]
        cmd: SuiteCmd,
    },
}

#[derive(Subcommand)]
enum PosetCmd {
    /// Validate a poset file and print its domain report
    Check { file: PathBuf },
}

#[derive(Subcommand)]
enum IrCmd {
    /// Evaluate one interval operation on inline JSON arguments
    Eval {
        /// leq | way-below | sup-directed | sup-bounded | meet | scott-member | embed
        op: String,
        /// intervals as {"lo":..,"hi":..} or {"bot":true}; embed takes a rational
        args: Vec<String>,
    },
}

#[derive(Subcommand)]
enum SubalgCmd {
    /// Enumerate the subalgebra poset (optionally modulo equations)
    Enumerate {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        equations: Option<PathBuf>,
    },
    /// Check closure and equation satisfaction for one subset
    Check {
        #[arg(long)]
        algebra: PathBuf,
        /// comma-separated carrier indices
        #[arg(long)]
        subset: String,
        #[arg(long)]
        equations: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ContextsCmd {
    /// Build a fragment from lists of commuting Hermitian generators
    Build {
        /// JSON: {"contexts": [[matrix, ...], ...]}
        #[arg(long)]
        ops: PathBuf,
        #[arg(long)]
        meets: bool,
        #[arg(long)]
        bottom: bool,
    },
    /// Meet of two contexts
    Meet {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Join of two contexts (Incompatible is a value, not an error)
    Join {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Image of a context under a verified homomorphism
    Functor {
        #[arg(long)]
        hom: PathBuf,
        #[arg(long)]
        context: PathBuf,
    },
}

#[derive(Subcommand)]
enum DaseinCmd {
    /// Interval table for one operator at one character
    Value {
        #[arg(long)]
        matrix: PathBuf,
        /// fragment JSON (from `contexts build`)
        #[arg(long)]
        contexts: PathBuf,
        /// character as LABEL:CELL, e.g. V03:1
        #[arg(long)]
        character: String,
    },
    /// Emit the full section beneath the character's context
    Section {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        contexts: PathBuf,
        #[arg(long)]
        character: String,
    },
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// The four-part non-continuity certificate
    Sec6 {
        #[arg(long, default_value_t = 128)]
        bound: u64,
        /// candidate atom descriptor JSON (defaults to the even/odd split)
        #[arg(long)]
        atom: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Run the full property battery
    All,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn cap(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<PosetError> for Failure {
    fn from(e: PosetError) -> Failure {
        match e {
            PosetError::SizeCapExceeded { .. } => Failure::cap(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Failure {
        match e {
            AlgebraError::SizeCapExceeded { .. } => Failure::cap(e.to_string()),
            AlgebraError::Poset(p) => p.into(),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<MatrixError> for Failure {
    fn from(e: MatrixError) -> Failure {
        match e {
            MatrixError::DimCapExceeded { .. } => Failure::cap(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<ContextError> for Failure {
    fn from(e: ContextError) -> Failure {
        match e {
            ContextError::Matrix(m) => m.into(),
            ContextError::Poset(p) => p.into(),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<DaseinError> for Failure {
    fn from(e: DaseinError) -> Failure {
        match e {
            DaseinError::Matrix(m) => m.into(),
            DaseinError::Context(c) => c.into(),
            DaseinError::Poset(p) => p.into(),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<IntervalError> for Failure {
    fn from(e: IntervalError) -> Failure {
        Failure::input(e.to_string())
    }
}

impl From<PartitionError> for Failure {
    fn from(e: PartitionError) -> Failure {
        match e {
            PartitionError::WindowTooLarge(_) | PartitionError::TooManyCells { .. } => {
                Failure::cap(e.to_string())
            }
            _ => Failure::input(e.to_string()),
        }
    }
}

struct Outcome {
    body: String,
    /// false turns exit 0 into exit 1: a check or witness failed
    passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let written = match &cli.run.out {
                Some(path) => fs::write(path, &outcome.body)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{}", outcome.body);
                    Ok(())
                }
            };
            if let Err(message) = written {
                eprintln!("error: {message}");
                return ExitCode::from(2);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_json(path: &PathBuf) -> Result<Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("bad JSON in {}: {e}", path.display())))
}

fn parse_tol(cfg: &RunConfig) -> Result<f64, Failure> {
    let rat = Rat::parse(&cfg.tol).map_err(|e| Failure::input(e.to_string()))?;
    let tol = rat.to_f64();
    if !(tol > 0.0) {
        return Err(Failure::input("tolerance must be positive"));
    }
    Ok(tol)
}

fn check_dim(dim: usize, cfg: &RunConfig) -> Result<(), Failure> {
    if dim > cfg.cap_dim {
        return Err(Failure::cap(format!(
            "dimension {dim} exceeds cap {}",
            cfg.cap_dim
        )));
    }
    Ok(())
}

/// Text reports carry the seed line; single-value outputs skip it and
/// rely on the JSON form.
fn with_seed(cfg: &RunConfig, text: String) -> String {
    format!("{text}seed: {}\n", cfg.seed)
}

fn render(
    cfg: &RunConfig,
    report: Value,
    text: String,
    dot: Option<String>,
) -> Result<Outcome, Failure> {
    let body = match cfg.format {
        Format::Json => format!("{:#}\n", report),
        Format::Text => text,
        Format::Dot => dot.ok_or_else(|| Failure::input("no DOT form for this command"))?,
    };
    Ok(Outcome { body, passed: true })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = &cli.run;
    match &cli.command {
        Command::Poset {
            cmd: PosetCmd::Check { file },
        } => {
            let raw: PosetJson = serde_json::from_value(read_json(file)?)
                .map_err(|e| Failure::input(format!("bad poset JSON: {e}")))?;
            let poset = FinitePoset::from_json(&raw)?;
            let report = poset.domain_report(cfg.cap_poset)?;
            let mut text = format!("poset with {} elements\n", poset.len());
            for (flag, value) in [
                ("dcpo", report.is_dcpo),
                ("continuous", report.is_continuous),
                ("algebraic", report.is_algebraic),
                ("bounded complete", report.is_bounded_complete),
                (
                    "finitely bounded complete",
                    report.is_finitely_bounded_complete,
                ),
                ("almost bounded complete", report.is_almost_bounded_complete),
                ("complete lattice", report.is_complete_lattice),
                ("L-domain", report.is_l_domain),
            ] {
                text.push_str(&format!("  {flag}: {value}\n"));
            }
            text.push_str(&format!(
                "  compact elements: {}\n",
                report
                    .compact_elements
                    .iter()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
            let json = json!({"command": "poset check", "seed": cfg.seed, "report": report});
            let text = with_seed(cfg, text);
            render(cfg, json, text, Some(poset.to_dot("poset", None)))
        }

        Command::Ir {
            cmd: IrCmd::Eval { op, args },
        } => ir_eval(cfg, op, args),

        Command::Subalg { cmd } => subalg(cfg, cmd),

        Command::Contexts { cmd } => contexts(cfg, cmd),

        Command::Dasein { cmd } => dasein(cfg, cmd),

        Command::Witness {
            cmd: WitnessCmd::Sec6 { bound, atom },
        } => {
            if *bound < 2 {
                return Err(Failure::input("the witness needs --bound at least 2"));
            }
            let atom = match atom {
                Some(path) => {
                    let p: NatPartition = serde_json::from_value(read_json(path)?)
                        .map_err(|e| Failure::input(format!("bad descriptor JSON: {e}")))?;
                    p.validate()?;
                    p
                }
                None => NatPartition::ve(),
            };
            let cert = non_continuity_witness(*bound, &atom)?;
            let json = json!({"command": "witness sec6", "seed": cfg.seed, "certificate": cert});
            let passed = cert.passed();
            let text = with_seed(cfg, cert.render_text());
            let mut outcome = render(cfg, json, text, None)?;
            outcome.passed = passed;
            Ok(outcome)
        }

        Command::Suite { cmd: SuiteCmd::All } => {
            let report = suite::run_all(cfg.seed);
            let passed = report.all_passed();
            let mut outcome = render(cfg, report.render_json(), report.render_text(), None)?;
            outcome.passed = passed;
            Ok(outcome)
        }
    }
}

fn parse_irbot(arg: &str) -> Result<IrBot, Failure> {
    serde_json::from_str(arg).map_err(|e| Failure::input(format!("bad interval {arg:?}: {e}")))
}

fn ir_eval(cfg: &RunConfig, op: &str, args: &[String]) -> Result<Outcome, Failure> {
    let need = |n: usize| -> Result<(), Failure> {
        if args.len() != n {
            return Err(Failure::input(format!("{op} expects {n} argument(s)")));
        }
        Ok(())
    };
    let result: Value = match op {
        "leq" => {
            need(2)?;
            json!(parse_irbot(&args[0])?.leq(&parse_irbot(&args[1])?))
        }
        "way-below" => {
            need(2)?;
            json!(parse_irbot(&args[0])?.way_below(&parse_irbot(&args[1])?))
        }
        "meet" => {
            need(2)?;
            json!(parse_irbot(&args[0])?.meet(&parse_irbot(&args[1])?))
        }
        "sup-directed" => {
            let family = args
                .iter()
                .map(|a| parse_irbot(a))
                .collect::<Result<Vec<_>, _>>()?;
            json!(sup_directed_lifted(&family)?)
        }
        "sup-bounded" => {
            let family = args
                .iter()
                .map(|a| parse_irbot(a))
                .collect::<Result<Vec<_>, _>>()?;
            json!(sup_bounded_lifted(&family)?)
        }
        "scott-member" => {
            need(2)?;
            let t: RatInterval = serde_json::from_str(&args[0])
                .map_err(|e| Failure::input(format!("bad interval: {e}")))?;
            let witness: RatInterval = serde_json::from_str(&args[1])
                .map_err(|e| Failure::input(format!("bad interval: {e}")))?;
            json!(t.in_scott_basic(&witness))
        }
        "embed" => {
            need(1)?;
            let q =
                Rat::parse(args[0].trim_matches('"')).map_err(|e| Failure::input(e.to_string()))?;
            json!(unsharp_core::interval::embed_real(q))
        }
        other => return Err(Failure::input(format!("unknown interval op {other:?}"))),
    };
    let json = json!({"command": format!("ir eval {op}"), "seed": cfg.seed, "result": result});
    let text = format!("{result}\n");
    render(cfg, json, text, None)
}

fn load_equations(
    algebra: &FiniteAlgebra,
    path: &Option<PathBuf>,
) -> Result<Vec<Equation>, Failure> {
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    let value = read_json(path)?;
    let items = match &value {
        Value::Array(items) => items.clone(),
        other => vec![other.clone()],
    };
    items
        .iter()
        .map(|v| Equation::from_json(v, algebra.signature()).map_err(Failure::from))
        .collect()
}

fn subalg(cfg: &RunConfig, cmd: &SubalgCmd) -> Result<Outcome, Failure> {
    match cmd {
        SubalgCmd::Enumerate { algebra, equations } => {
            let alg = algebra_from_json(&read_json(algebra)?)?;
            let eqs = load_equations(&alg, equations)?;
            let lattice = if eqs.is_empty() {
                enumerate_subalgebras(&alg)?
            } else {
                sub_e_poset(&alg, &eqs, cfg.cap_valuations)?
            };
            let report = lattice.poset.domain_report(cfg.cap_poset).ok();
            let members: Vec<Value> = lattice
                .sets
                .iter()
                .map(|&m| {
                    let elements: Vec<usize> = (0..alg.carrier_size())
                        .filter(|i| m & (1 << i) != 0)
                        .collect();
                    json!({"label": lattice.label_of(m), "elements": elements})
                })
                .collect();
            let mut text = format!("{} subalgebras\n", lattice.sets.len());
            for m in &members {
                text.push_str(&format!(
                    "  {}: {}\n",
                    m["label"].as_str().unwrap_or("?"),
                    m["elements"]
                ));
            }
            if let Some(r) = &report {
                text.push_str(&format!(
                    "  complete lattice: {}, algebraic: {}, bounded complete: {}\n",
                    r.is_complete_lattice, r.is_algebraic, r.is_bounded_complete
                ));
            }
            let json = json!({
                "command": "subalg enumerate",
                "seed": cfg.seed,
                "subalgebras": members,
                "poset": serde_json::to_value(lattice.poset.to_json()).unwrap(),
                "report": report,
            });
            let dot = lattice.poset.to_dot("subalgebras", None);
            render(cfg, json, with_seed(cfg, text), Some(dot))
        }
        SubalgCmd::Check {
            algebra,
            subset,
            equations,
        } => {
            let alg = algebra_from_json(&read_json(algebra)?)?;
            let eqs = load_equations(&alg, equations)?;
            let mut mask = 0u64;
            for piece in subset.split(',').filter(|s| !s.trim().is_empty()) {
                let idx: usize = piece
                    .trim()
                    .parse()
                    .map_err(|_| Failure::input(format!("bad carrier index {piece:?}")))?;
                if idx >= alg.carrier_size() {
                    return Err(Failure::input(format!("index {idx} out of carrier")));
                }
                mask |= 1 << idx;
            }
            let closed = alg.is_closed(mask);
            let closure = alg.generate(mask);
            let satisfied = satisfies_all(&alg, mask, &eqs, cfg.cap_valuations)?;
            let closure_elements: Vec<usize> = (0..alg.carrier_size())
                .filter(|i| closure & (1 << i) != 0)
                .collect();
            let json = json!({
                "command": "subalg check",
                "seed": cfg.seed,
                "closed": closed,
                "generated": closure_elements,
                "satisfies_equations": satisfied,
            });
            let text = format!(
                "closed: {closed}\ngenerated: {closure_elements:?}\nsatisfies equations: {satisfied}\n"
            );
            render(cfg, json, with_seed(cfg, text), None)
        }
    }
}

fn load_context(cfg: &RunConfig, path: &PathBuf, tol: f64) -> Result<Context, Failure> {
    let value = read_json(path)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Failure::input("context file must be an object"))?;
    if obj.contains_key("cells") {
        let ctx = Context::from_json(&value, tol)?;
        check_dim(ctx.dim(), cfg)?;
        Ok(ctx)
    } else if let Some(ops) = obj.get("ops").and_then(Value::as_array) {
        let matrices = ops
            .iter()
            .map(ComplexMatrix::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(m) = matrices.first() {
            check_dim(m.dim(), cfg)?;
        }
        Ok(context_of(&matrices, tol)?)
    } else {
        Err(Failure::input("context file needs \"cells\" or \"ops\""))
    }
}

fn context_report(cfg: &RunConfig, command: &str, ctx: &Context) -> Result<Outcome, Failure> {
    let json = json!({"command": command, "seed": cfg.seed, "context": ctx.to_json()});
    let text = with_seed(cfg, format!("{}\n", ctx.describe()));
    render(cfg, json, text, None)
}

fn contexts(cfg: &RunConfig, cmd: &ContextsCmd) -> Result<Outcome, Failure> {
    let tol = parse_tol(cfg)?;
    match cmd {
        ContextsCmd::Build { ops, meets, bottom } => {
            let value = read_json(ops)?;
            let lists = value
                .get("contexts")
                .and_then(Value::as_array)
                .ok_or_else(|| Failure::input("expected {\"contexts\": [[matrix, ...], ...]}"))?;
            let mut built = Vec::new();
            for list in lists {
                let generators = list
                    .as_array()
                    .ok_or_else(|| Failure::input("each context is a list of matrices"))?
                    .iter()
                    .map(ComplexMatrix::from_json)
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(m) = generators.first() {
                    check_dim(m.dim(), cfg)?;
                }
                built.push(context_of(&generators, tol)?);
            }
            let fragment = fragment_build(&built, *meets, *bottom, tol)?;
            let mut text = format!("fragment with {} contexts\n", fragment.poset.len());
            for (label, ctx) in fragment.labels() {
                text.push_str(&format!("  {label}: {}\n", ctx.describe()));
            }
            let json = json!({"command": "contexts build", "seed": cfg.seed,
                "fragment": fragment.to_json()});
            let dot = fragment.to_dot("fragment");
            render(cfg, json, with_seed(cfg, text), Some(dot))
        }
        ContextsCmd::Meet { a, b } => {
            let ca = load_context(cfg, a, tol)?;
            let cb = load_context(cfg, b, tol)?;
            let m = context_meet(&ca, &cb, tol)?;
            context_report(cfg, "contexts meet", &m)
        }
        ContextsCmd::Join { a, b } => {
            let ca = load_context(cfg, a, tol)?;
            let cb = load_context(cfg, b, tol)?;
            match context_join(&ca, &cb, tol)? {
                JoinResult::Joined(j) => context_report(cfg, "contexts join", &j),
                JoinResult::Incompatible => {
                    let json = json!({"command": "contexts join", "seed": cfg.seed,
                        "result": "incompatible"});
                    render(
                        cfg,
                        json,
                        with_seed(cfg, "incompatible\n".to_string()),
                        None,
                    )
                }
            }
        }
        ContextsCmd::Functor { hom, context } => {
            let hom = StarHom::from_json(&read_json(hom)?, tol)?;
            check_dim(hom.source_dim().max(hom.target_dim()), cfg)?;
            let ctx = load_context(cfg, context, tol)?;
            let image = apply_hom(&hom, &ctx, tol)?;
            context_report(cfg, "contexts functor", &image)
        }
    }
}

fn parse_character(spec: &str) -> Result<(String, usize), Failure> {
    let (label, cell) = spec
        .split_once(':')
        .ok_or_else(|| Failure::input("character must be LABEL:CELL, e.g. V03:1"))?;
    let cell: usize = cell
        .parse()
        .map_err(|_| Failure::input(format!("bad cell index {cell:?}")))?;
    Ok((label.to_string(), cell))
}

fn load_fragment(cfg: &RunConfig, path: &PathBuf, tol: f64) -> Result<Fragment, Failure> {
    let mut value = read_json(path)?;
    // accept the report wrapper emitted by `contexts build --format json`
    if let Some(inner) = value.get("fragment") {
        value = inner.clone();
    }
    let obj = value
        .as_object()
        .ok_or_else(|| Failure::input("fragment file must be an object"))?;
    if obj.contains_key("labels") {
        let fragment = Fragment::from_json(&value, tol)?;
        if let Some((_, c)) = fragment.labels().next() {
            check_dim(c.dim(), cfg)?;
        }
        Ok(fragment)
    } else if let Some(lists) = obj.get("contexts").and_then(Value::as_array) {
        let mut built = Vec::new();
        for list in lists {
            let ctx_value = list.clone();
            let ctx = if ctx_value.get("cells").is_some() {
                Context::from_json(&ctx_value, tol)?
            } else {
                let generators = ctx_value
                    .as_array()
                    .ok_or_else(|| Failure::input("each context is a matrix list or {cells}"))?
                    .iter()
                    .map(ComplexMatrix::from_json)
                    .collect::<Result<Vec<_>, _>>()?;
                context_of(&generators, tol)?
            };
            check_dim(ctx.dim(), cfg)?;
            built.push(ctx);
        }
        let meets = obj.get("meets").and_then(Value::as_bool).unwrap_or(true);
        let bottom = obj.get("bottom").and_then(Value::as_bool).unwrap_or(true);
        Ok(fragment_build(&built, meets, bottom, tol)?)
    } else {
        Err(Failure::input(
            "fragment file needs \"labels\" or \"contexts\"",
        ))
    }
}

fn dasein(cfg: &RunConfig, cmd: &DaseinCmd) -> Result<Outcome, Failure> {
    let tol = parse_tol(cfg)?;
    let (matrix_path, contexts_path, character, want_section) = match cmd {
        DaseinCmd::Value {
            matrix,
            contexts,
            character,
        } => (matrix, contexts, character, false),
        DaseinCmd::Section {
            matrix,
            contexts,
            character,
        } => (matrix, contexts, character, true),
    };
    let a = ComplexMatrix::from_json(&read_json(matrix_path)?)?;
    check_dim(a.dim(), cfg)?;
    let fragment = load_fragment(cfg, contexts_path, tol)?;
    let (top_label, cell) = parse_character(character)?;
    let top = fragment
        .context(&top_label)
        .ok_or_else(|| Failure::input(format!("no context labelled {top_label:?}")))?;
    let chi = Character { cell };

    if !want_section {
        // one interval per context beneath the character's own
        let section = section_at(&a, &fragment, &top_label, chi, tol)?;
        let single = value_interval(&a, top, chi, tol)?;
        let mut text = format!("value at {top_label}:{cell} = {single}\n");
        let mut rows = Vec::new();
        for (label, iv) in section.intervals() {
            text.push_str(&format!("  {label:>6}  [{}, {}]\n", iv.lo(), iv.hi()));
            rows.push(json!({"label": label, "lo": iv.lo(), "hi": iv.hi()}));
        }
        let json = json!({"command": "dasein value", "seed": cfg.seed,
            "character": character, "interval": single, "table": rows});
        render(cfg, json, with_seed(cfg, text), None)
    } else {
        let section = section_at(&a, &fragment, &top_label, chi, tol)?;
        let json = json!({"command": "dasein section", "seed": cfg.seed,
            "character": character, "section": section.to_json()});
        let mut text = format!("section beneath {top_label} at cell {cell}\n");
        for (label, iv) in section.intervals() {
            text.push_str(&format!("  {label:>6}  [{}, {}]\n", iv.lo(), iv.hi()));
        }
        render(cfg, json, with_seed(cfg, text), None)
    }
}
