// Negated comparisons make NaN residuals fail checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod literal;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use subprod::classify::{classify, Classification};
use subprod::embed::{
    build_representation, decide_embeddable, extended_probe_type1, liebscher_probe, verify_representation, ProbeTable,
};
use subprod::morphisms::{decompose_automorphism, make_automorphism, verify_automorphism, Word};
use subprod::num::{Mat2, Time, Tolerance};
use subprod::rational::{build_tower, refine_spec};
use subprod::system::{generate_canonical, load_system, scramble, FiniteGridSystem, SystemSpec};
use subprod::Error;

#[derive(Parser)]
#[command(name = "subprod", version, about = "Two-dimensional subproduct systems: build, classify, restrict, refine, embed")]
struct Cli {
    /// Structural tolerance (eps_structural).
    #[arg(long, global = true, value_name = "EPS")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a canonical grid system.
    Generate(GenerateArgs),
    /// Check isometry and associativity of a system file.
    Validate { file: PathBuf },
    /// Recover type, parameters and a canonical basis.
    Classify {
        file: PathBuf,
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
    },
    /// Keep the maps on multiples of M grid steps.
    Restrict {
        #[arg(long)]
        m: u64,
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Type of a system whose restriction to multiples of M is the given spec.
    Refine {
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 0)]
        root: u64,
        spec: PathBuf,
    },
    /// Factorial refinement tower with denominators 1!, ..., depth!.
    Tower {
        #[arg(long)]
        depth: u64,
        /// Horizon in unit time.
        #[arg(long)]
        horizon: u64,
        /// Root choices for levels 2..=depth, comma separated.
        #[arg(long, default_value = "")]
        roots: String,
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Automorphisms: realize, verify and decompose.
    Auto {
        #[command(subcommand)]
        action: AutoCommand,
    },
    /// Continuity probe on [0, 1] as CSV (t_num, t_den, re, im).
    Probe {
        file: PathBuf,
        /// Vector of E_1 as "re,im;re,im".
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Word-kernel probe of the two-unit vector on [0, 1/2] as CSV.
    ProbeExtended {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        den: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide embeddability into the type I1 Fock system.
    EmbedCheck { spec: PathBuf },
    /// Build the Fock-space embedding on the grid 1/den.
    Represent {
        spec: PathBuf,
        #[arg(long)]
        den: u64,
        /// Horizon in grid steps (defaults to den).
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "type", value_enum)]
    kind: Option<Kind>,
    /// Inner-product parameter of E1/E2.
    #[arg(long)]
    a: Option<f64>,
    /// Discrete E3 parameter as "re+imi".
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Rational E3 modulus.
    #[arg(long)]
    c: Option<f64>,
    /// Rational E3 frequency.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Rational E3 root choices, comma separated.
    #[arg(long)]
    roots: Option<String>,
    /// Read the spec from a JSON file instead.
    #[arg(long, conflicts_with_all = ["kind", "a", "lambda", "c", "b", "roots"])]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    den: u64,
    #[arg(long)]
    horizon: u64,
    /// Conjugate by a seeded random unitary family.
    #[arg(long)]
    scramble: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    E1,
    E2,
    E3,
    E4,
    E5,
}

#[derive(Subcommand)]
enum AutoCommand {
    /// Realize a generator word on the classified system.
    Make {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long)]
        swap: bool,
        #[arg(long, allow_hyphen_values = true)]
        extra: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diagram residual of a unitary family.
    Verify { file: PathBuf, thetas: PathBuf },
    /// Recover the generator word of an automorphism.
    Decompose { file: PathBuf, thetas: PathBuf },
}

/// A failed run: usage problems exit 1, everything else 2.
enum Failure {
    Usage(String),
    Domain(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(diagnostic(&e))
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn diagnostic(e: &Error) -> Value {
    let mut d = json!({ "code": e.code(), "message": e.to_string() });
    let extra = match e {
        Error::NotIsometric { s, t, residual } => json!({ "s": s, "t": t, "residual": residual }),
        Error::MissingMap { s, t } => json!({ "s": s, "t": t }),
        Error::NotAssociative { r, s, t, residual } => json!({ "r": r, "s": s, "t": t, "residual": residual }),
        Error::Inconsistent { residual, .. }
        | Error::NotAnAutomorphism { residual }
        | Error::DecompositionFailed { residual }
        | Error::InvalidBasis { residual } => json!({ "residual": residual }),
        _ => json!({}),
    };
    if let (Some(d), Value::Object(extra)) = (d.as_object_mut(), extra) {
        d.extend(extra);
    }
    d
}

/// One grid index and its matrix in a thetas file.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaEntry {
    t: u64,
    matrix: Mat2,
}

type Run = Result<(), Failure>;

fn require_file(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("input file {} does not exist", path.display())))
    }
}

fn require_out(path: &Option<PathBuf>) -> Result<(), Failure> {
    if let Some(parent) = path.as_ref().and_then(|p| p.parent()).filter(|p| !p.as_os_str().is_empty()) {
        if !parent.is_dir() {
            return Err(usage(format!("output directory {} does not exist", parent.display())));
        }
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Run {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::from(Error::from(e))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("output serialises") + "\n"
}

fn read_spec(path: &Path) -> Result<SystemSpec, Failure> {
    require_file(path)?;
    let text = fs::read_to_string(path).map_err(Error::from)?;
    let spec: SystemSpec = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

fn read_system(path: &Path, tol: &Tolerance) -> Result<FiniteGridSystem, Failure> {
    require_file(path)?;
    Ok(load_system(path, tol)?)
}

fn read_thetas(path: &Path, sys: &FiniteGridSystem) -> Result<Vec<Mat2>, Failure> {
    require_file(path)?;
    let text = fs::read_to_string(path).map_err(Error::from)?;
    let mut entries: Vec<ThetaEntry> = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    entries.sort_by_key(|e| e.t);
    let times: Vec<u64> = entries.iter().map(|e| e.t).collect();
    if times != (1..=sys.horizon()).collect::<Vec<_>>() {
        return Err(Error::Schema(format!("thetas must cover grid indices 1..={} exactly once", sys.horizon())).into());
    }
    Ok(entries.into_iter().map(|e| e.matrix).collect())
}

fn spec_from_flags(g: &GenerateArgs) -> Result<SystemSpec, Failure> {
    if let Some(path) = &g.spec {
        return read_spec(path);
    }
    let kind = g.kind.ok_or_else(|| usage("either --type or --spec is required"))?;
    let need_a = || g.a.ok_or_else(|| usage("--a is required for e1 and e2"));
    let spec = match kind {
        Kind::E1 => SystemSpec::E1 { a: need_a()? },
        Kind::E2 => SystemSpec::E2 { a: need_a()? },
        Kind::E3 => match (&g.lambda, g.c) {
            (Some(l), None) => SystemSpec::e3(literal::parse_complex(l).map_err(usage)?),
            (None, Some(c)) => {
                let roots = g.roots.as_deref().map(literal::parse_list).transpose().map_err(usage)?.unwrap_or_default();
                SystemSpec::e3_rational(c, g.b.unwrap_or(0.0), roots)
            }
            _ => return Err(usage("e3 needs exactly one of --lambda or --c")),
        },
        Kind::E4 => SystemSpec::E4,
        Kind::E5 => SystemSpec::E5,
    };
    spec.validate()?;
    Ok(spec)
}

fn generate(g: &GenerateArgs) -> Run {
    require_out(&g.out)?;
    let spec = spec_from_flags(g)?;
    let (mut sys, _) = generate_canonical(&spec, g.den, g.horizon)?;
    if let Some(seed) = g.scramble {
        sys = scramble(&sys, seed)?.0;
    }
    emit(&g.out, &(sys.to_json_string() + "\n"))
}

/// `re+imi` with negative zeros dropped.
fn show(z: subprod::C64) -> String {
    let part = |x: f64| {
        let x = x + 0.0;
        if x != 0.0 && x.abs() < 1e-4 { format!("{x:e}") } else { x.to_string() }
    };
    let im = part(z.im);
    let sign = if im.starts_with('-') { "" } else { "+" };
    format!("{}{sign}{im}i", part(z.re))
}

fn classification_text(c: &Classification) -> String {
    let mut s = format!("type: {}\nspec: {}\n", c.spec.type_tag(), c.spec);
    if let Some(a) = c.raw_a {
        s += &format!("raw_a: {a:e}\nsmall_a_threshold: {:e}\n", c.small_a_threshold);
    }
    if let Some(r) = &c.rational {
        s += &format!("rational_c: {}\n", r.c);
    }
    s += &format!("residual: {:e}\ndiscriminant_margin: {:e}\n", c.residual, c.discriminant_margin);
    for j in 1..=c.basis.horizon() {
        let (x, y) = (c.basis.x(j), c.basis.y(j));
        s += &format!("{j}: x = ({}, {})  y = ({}, {})\n", show(x.0[0]), show(x.0[1]), show(y.0[0]), show(y.0[1]));
    }
    s
}

fn probe_csv(table: &ProbeTable, out: &Option<PathBuf>) -> Run {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| usage(format!("csv: {e}"));
    w.write_record(["t_num", "t_den", "re", "im"]).map_err(fail)?;
    for p in &table.points {
        w.write_record([p.k.to_string(), table.denominator.to_string(), p.value.re.to_string(), p.value.im.to_string()])
            .map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| usage(format!("csv: {e}")))?;
    emit(out, &String::from_utf8(bytes).expect("csv is utf-8"))
}

fn auto(action: &AutoCommand, tol: &Tolerance) -> Run {
    match action {
        AutoCommand::Make { file, c, swap, extra, out } => {
            require_out(out)?;
            let sys = read_system(file, tol)?;
            let class = classify(&sys, tol)?;
            let auto = make_automorphism(&class, Word { c: *c, swap: *swap, extra: *extra })?;
            let entries: Vec<ThetaEntry> =
                auto.thetas.iter().enumerate().map(|(i, m)| ThetaEntry { t: i as u64 + 1, matrix: *m }).collect();
            emit(out, &pretty(&entries))
        }
        AutoCommand::Verify { file, thetas } => {
            let sys = read_system(file, tol)?;
            let thetas = read_thetas(thetas, &sys)?;
            let unitarity = thetas.iter().map(Mat2::unitarity_residual).fold(0.0, f64::max);
            let residual = verify_automorphism(&sys, &thetas)?;
            if !(residual.max(unitarity) <= tol.eps_structural) {
                return Err(Error::NotAnAutomorphism { residual: residual.max(unitarity) }.into());
            }
            emit(&None, &pretty(&json!({ "automorphism": true, "diagram_residual": residual, "unitarity_residual": unitarity })))
        }
        AutoCommand::Decompose { file, thetas } => {
            let sys = read_system(file, tol)?;
            let thetas = read_thetas(thetas, &sys)?;
            let class = classify(&sys, tol)?;
            let word = decompose_automorphism(&sys, &class, &thetas, tol)?;
            emit(&None, &pretty(&json!({ "type": class.spec.type_tag(), "word": word })))
        }
    }
}

fn represent(spec: &Path, den: u64, horizon: Option<u64>, verify: bool, tol: &Tolerance) -> Run {
    let spec = read_spec(spec)?;
    let horizon = horizon.unwrap_or(den);
    let rep = build_representation(&spec, den, horizon)?;
    let mut isometry: f64 = 0.0;
    for j in 1..=horizon {
        isometry = isometry.max(rep.isometry_residual(j)?);
    }
    let mut report = json!({
        "construction": rep.construction,
        "denominator": den,
        "horizon": horizon,
        "isometry_residual": isometry,
    });
    if verify {
        let mut diagram: f64 = 0.0;
        for s in 1..horizon {
            for t in 1..=horizon - s {
                diagram = diagram.max(verify_representation(&rep, &rep.system, Time::new(s, den)?, Time::new(t, den)?)?);
            }
        }
        report["diagram_residual"] = json!(diagram);
        if !(diagram.max(isometry) <= tol.eps_structural) {
            return Err(Failure::Domain(json!({
                "code": "representation_mismatch",
                "message": "embedding diagram does not commute within tolerance",
                "residual": diagram.max(isometry),
            })));
        }
    }
    emit(&None, &pretty(&report))
}

fn run(cli: Cli) -> Run {
    let tol = match cli.tol {
        Some(eps) => Tolerance::with_structural(eps).map_err(|e| usage(e.to_string()))?,
        None => Tolerance::default(),
    };
    match &cli.command {
        Command::Generate(g) => generate(g),
        Command::Validate { file } => {
            let sys = read_system(file, &tol)?;
            let report = sys.validate(&tol)?;
            emit(&None, &pretty(&json!({ "valid": true, "isometry_residual": report.isometry_residual, "associativity_residual": report.associativity_residual })))
        }
        Command::Classify { file, text, .. } => {
            let sys = read_system(file, &tol)?;
            let class = classify(&sys, &tol)?;
            if *text {
                emit(&None, &classification_text(&class))
            } else {
                let mut v = serde_json::to_value(&class).expect("classification serialises");
                v["type"] = json!(class.spec.type_tag());
                emit(&None, &pretty(&v))
            }
        }
        Command::Restrict { m, file, out } => {
            require_out(out)?;
            if *m == 0 {
                return Err(usage("--m must be positive"));
            }
            let sys = read_system(file, &tol)?;
            emit(out, &(sys.restrict(*m)?.to_json_string() + "\n"))
        }
        Command::Refine { m, root, spec } => {
            let spec = read_spec(spec)?;
            if *m == 0 {
                return Err(usage("--m must be positive"));
            }
            emit(&None, &pretty(&refine_spec(&spec, *m, *root)?))
        }
        Command::Tower { depth, horizon, roots, spec, out } => {
            require_out(out)?;
            let roots = literal::parse_list(roots).map_err(usage)?;
            let spec = read_spec(spec)?;
            let tower = build_tower(&spec, *depth, &roots, *horizon)?;
            emit(out, &pretty(&tower.to_json_value()))
        }
        Command::Auto { action } => auto(action, &tol),
        Command::Probe { file, h, out } => {
            require_out(out)?;
            let h = literal::parse_vector(h).map_err(usage)?;
            let sys = read_system(file, &tol)?;
            probe_csv(&liebscher_probe(&sys, &h)?, out)
        }
        Command::ProbeExtended { a, den, out } => {
            require_out(out)?;
            probe_csv(&extended_probe_type1(*a, *den)?, out)
        }
        Command::EmbedCheck { spec } => {
            let spec = read_spec(spec)?;
            let verdict = decide_embeddable(&spec, None)?;
            emit(&None, &pretty(&json!({ "spec": spec, "verdict": verdict })))
        }
        Command::Represent { spec, den, horizon, verify } => represent(spec, *den, *horizon, *verify, &tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("{}", json!({ "code": "usage", "message": msg }));
            ExitCode::from(1)
        }
        Err(Failure::Domain(d)) => {
            eprintln!("{d}");
            ExitCode::from(2)
        }
    }
}
