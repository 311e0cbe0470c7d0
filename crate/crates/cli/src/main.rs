use clap::{Parser, Subcommand, ValueEnum};
use holant_core::algebra::AlgebraicNumber as An;
use holant_core::classify::{
    dichotomy_binary_eq, dichotomy_plcsp, dichotomy_plcsp2, dichotomy_plholant_set, hypergraph_verdict, ClassifyError,
    SetVerdict,
};
use holant_core::grid::{
    gate_signature, holographic_transform_bipartite, orthogonal_transform, two_stretch, GridError, PlanarGrid, DEFAULT_CAP,
};
use holant_core::identities;
use holant_core::sigcalc::{transform, transform_row, SymmetricSignature, Transform2x2};
use holant_core::solvers::{evaluate, fkt_count_pm, hypergraph_pm, Method, PlanarHypergraph, SolveError, WeightedPlanarGraph};
use serde::Deserialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "holant", version, about = "Exact planar Holant evaluation and classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a signature set (or a grid's signatures) under a framework
    Classify {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "plholant")]
        framework: Framework,
    },
    /// Exact Holant value of a closed grid
    Eval {
        input: PathBuf,
        #[arg(long, default_value = "auto", value_parser = parse_method)]
        method: Method,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Signature of a grid with dangling edges
    Gate {
        input: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Apply a 2x2 transform to a signature or a grid
    Transform {
        input: PathBuf,
        #[arg(long, value_parser = parse_matrix)]
        matrix: Transform2x2,
        /// For a signature: act on the row side, f T^(x)n
        #[arg(long)]
        row: bool,
    },
    /// Perfect matchings of a weighted planar graph
    Pm { input: PathBuf },
    /// Perfect matchings of a hypergraph with planar incidence graph
    Hpm {
        input: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Run the built-in identity suite
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Framework {
    Plcsp,
    Plcsp2,
    Plholant,
    BinaryEq,
    Hpm,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: SolveError| e.to_string())
}

fn parse_matrix(s: &str) -> Result<Transform2x2, String> {
    let rows: Vec<Vec<&str>> = s.split(';').map(|r| r.split(',').map(str::trim).collect()).collect();
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(format!("expected \"a,b;c,d\", got {s:?}"));
    }
    let p = |x: &str| An::parse(x).map_err(|e| format!("{x:?}: {e}"));
    Ok(Transform2x2::new(p(rows[0][0])?, p(rows[0][1])?, p(rows[1][0])?, p(rows[1][1])?))
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: 2, kind: "input", message: message.to_string() }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let (code, kind) = match &e {
            _ if e.is_too_large() => (1, "too-large"),
            SolveError::Gcd(_) => (1, "hard"),
            SolveError::Parse(_) => (2, "parse"),
            _ => (2, "validation"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        SolveError::from(e).into()
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        Failure { code: 2, kind: "validation", message: e.to_string() }
    }
}

fn cap(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(c) = flag {
        return Ok(c);
    }
    match std::env::var("HOLANT_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::input(format!("HOLANT_CAP={v:?} is not a number"))),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Failure { code: 2, kind: "parse", message: format!("{}: {e}", path.display()) })
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure { code: 2, kind: "parse", message: format!("{what}: {e}") })
}

fn is_grid(v: &Value) -> bool {
    v.get("vertices").is_some() && v.get("edges").is_some()
}

fn grid(v: Value) -> Result<PlanarGrid, Failure> {
    Ok(PlanarGrid::from_json(&v.to_string())?)
}

fn signatures(v: &Value) -> Result<Vec<SymmetricSignature>, Failure> {
    let list = match v {
        Value::Array(_) => v.clone(),
        _ => v.get("signatures").cloned().ok_or_else(|| Failure::input("expected a list of signatures or {\"signatures\": [...]}"))?,
    };
    let sigs: Vec<SymmetricSignature> = from_value(list, "signatures")?;
    if sigs.iter().any(|s| s.entries.is_empty()) {
        return Err(Failure::input("a signature needs at least one entry"));
    }
    Ok(sigs)
}

fn classify(input: &Path, framework: Framework) -> Result<Value, Failure> {
    let v = read_json(input)?;
    let verdict: SetVerdict = match framework {
        Framework::Hpm => {
            let sizes: Vec<usize> = match v.get("hyperedges") {
                Some(_) => from_value::<PlanarHypergraph>(v, "hypergraph")?.sizes(),
                None => from_value(v.get("sizes").cloned().unwrap_or(v), "sizes")?,
            };
            hypergraph_verdict(&sizes)?
        }
        Framework::BinaryEq => {
            let sigs = signatures(&v)?;
            let [f] = &sigs[..] else { return Err(Failure::input("binary-eq takes exactly one binary signature")) };
            if f.arity() != 2 {
                return Err(Failure::input("binary-eq takes a binary signature"));
            }
            let arities: Vec<usize> =
                from_value(v.get("arities").cloned().ok_or_else(|| Failure::input("binary-eq needs \"arities\""))?, "arities")?;
            dichotomy_binary_eq([&f.entries[0], &f.entries[1], &f.entries[2]], &arities)?
        }
        _ => {
            let sigs = if is_grid(&v) { grid(v)?.symmetric_signature_set()? } else { signatures(&v)? };
            if sigs.is_empty() {
                return Err(ClassifyError::Empty.into());
            }
            match framework {
                Framework::Plcsp => dichotomy_plcsp(&sigs),
                Framework::Plcsp2 => dichotomy_plcsp2(&sigs),
                _ => dichotomy_plholant_set(&sigs),
            }
        }
    };
    Ok(serde_json::to_value(verdict).expect("verdict serializes"))
}

fn eval(input: &Path, method: Method, cap: usize) -> Result<Value, Failure> {
    let g = grid(read_json(input)?)?;
    Ok(serde_json::to_value(evaluate(&g, method, cap)?).expect("evaluation serializes"))
}

fn gate(input: &Path, cap: usize) -> Result<Value, Failure> {
    let g = grid(read_json(input)?)?;
    let s = gate_signature(&g, cap)?;
    Ok(json!({ "arity": s.general.arity, "symmetric": s.symmetric, "general": s.general.entries }))
}

fn transform_cmd(input: &Path, t: &Transform2x2, row: bool) -> Result<Value, Failure> {
    let v = read_json(input)?;
    if !is_grid(&v) {
        let sigs = signatures(&v)?;
        let out: Vec<SymmetricSignature> = sigs.iter().map(|f| if row { transform_row(f, t) } else { transform(t, f) }).collect();
        return Ok(json!({ "signatures": out }));
    }
    let g = grid(v)?;
    if !t.is_invertible() {
        return Err(GridError::Singular.into());
    }
    let (out, how) = if !g.side.is_empty() {
        (holographic_transform_bipartite(&g, t)?, "bipartite")
    } else if t.is_orthogonal() {
        (orthogonal_transform(&g, t)?, "orthogonal")
    } else {
        (holographic_transform_bipartite(&two_stretch(&g), t)?, "stretched")
    };
    Ok(json!({ "mode": how, "grid": out }))
}

fn pm(input: &Path) -> Result<Value, Failure> {
    let g = WeightedPlanarGraph::from_json(&read(input)?)?;
    Ok(json!({ "value": fkt_count_pm(&g)?, "method": "fkt" }))
}

fn hpm(input: &Path, cap: usize) -> Result<Value, Failure> {
    let h = PlanarHypergraph::from_json(&read(input)?)?;
    Ok(serde_json::to_value(hypergraph_pm(&h, cap)?).expect("result serializes"))
}

fn verify() -> (Value, bool) {
    let checks = identities::run_all();
    let failed = checks.iter().filter(|c| !c.passed).count();
    (json!({ "passed": checks.len() - failed, "failed": failed, "checks": checks }), failed == 0)
}

fn run(cli: Cli) -> Result<(Value, bool), Failure> {
    let ok = |v| Ok((v, true));
    match cli.command {
        Command::Classify { input, framework } => ok(classify(&input, framework)?),
        Command::Eval { input, method, cap: c } => ok(eval(&input, method, cap(c)?)?),
        Command::Gate { input, cap: c } => ok(gate(&input, cap(c)?)?),
        Command::Transform { input, matrix, row } => ok(transform_cmd(&input, &matrix, row)?),
        Command::Pm { input } => ok(pm(&input)?),
        Command::Hpm { input, cap: c } => ok(hpm(&input, cap(c)?)?),
        Command::Verify => Ok(verify()),
    }
}

fn emit(v: &Value) {
    // a closed pipe is not an error worth reporting
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(v).expect("json"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let lines: Vec<&str> = text.trim().trim_start_matches("error: ").lines().map(str::trim).take_while(|l| !l.starts_with("Usage:")).collect();
            let message = lines.into_iter().filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ");
            emit(&json!({ "error": { "kind": "usage", "message": message } }));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok((v, passed)) => {
            emit(&v);
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            emit(&json!({ "error": { "kind": f.kind, "message": f.message } }));
            ExitCode::from(f.code)
        }
    }
}
