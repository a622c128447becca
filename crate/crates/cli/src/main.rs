//! `freeqg`: tables, moments, norms, rapid-decay constants and convergence
//! sweeps for the free orthogonal and free unitary quantum groups.

mod check;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use freeqg_core::interval::Bracket;
use freeqg_core::ncpoly::{lp_norm_with, NcPolynomial};
use freeqg_core::pairings::parse_pattern;
use freeqg_core::qnum::{dim_irrep, DEFAULT_PRECISION_BITS, GUARD_BITS};
use freeqg_core::rapid_decay::{
    dn_constant_with_precision, dn_uniform_upper_bound, rational_from_f64, select_p, selector_value, Truncation,
};
use freeqg_core::sweep::{run_converge_with, OutputFormat, SweepConfig};
use freeqg_core::weingarten::{GeneratorWord, Model, Weingarten, DEFAULT_KMAX};
use freeqg_core::Error;

use output::{Format, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    #[value(name = "o+")]
    Orthogonal,
    #[value(name = "u+")]
    Unitary,
    #[value(name = "limit")]
    Limit,
}

#[derive(Parser, Debug)]
#[command(name = "freeqg", version, about = "Exact integrals and norm bounds for O_N^+ and U_N^+")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Quantum group model; `limit` evaluates in the free (semi)circular limit
    #[arg(long, global = true, value_enum, default_value = "o+")]
    model: ModelArg,

    /// Dimensions, comma separated
    #[arg(long = "N", global = true, value_delimiter = ',')]
    n: Vec<u32>,

    /// Even exponents, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    p: Vec<u32>,

    /// Largest moment length for which Weingarten tables are built
    #[arg(long, global = true, default_value_t = DEFAULT_KMAX)]
    kmax: usize,

    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Working precision in bits for real-valued output
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions [k+1]_q of the irreducible representations
    Dim {
        /// Largest k, or an inclusive range `a:b`
        #[arg(long, default_value = "0:6")]
        k: String,
    },
    /// Gram matrix N^loops(p,q) over the NC pairings of k points
    Gram {
        #[arg(long)]
        k: usize,
        /// Color pattern such as `1*1*` (unitary model)
        #[arg(long)]
        pattern: Option<String>,
    },
    /// Exact Weingarten matrix (inverse Gram matrix)
    Wg {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        pattern: Option<String>,
    },
    /// Haar state of a single word, e.g. `x[1,1]*x[1,2]`
    Moment { word: String },
    /// L^p norms of a polynomial in the normalized generators sqrt(N) u_ij
    Lp { polynomial: String },
    /// Scanned and rigorous bounds for the rapid-decay constant D_N
    Dn {
        #[arg(long, default_value_t = 64)]
        r_max: u32,
        #[arg(long, default_value_t = 32)]
        side_max: u32,
    },
    /// Smallest p = 4m making the L^p norm a (1+eps)-approximation of the sup norm
    Selectp {
        #[arg(long)]
        degree: u32,
        #[arg(long, allow_negative_numbers = true)]
        epsilon: f64,
    },
    /// L^p norms across N against the free limit and the RD bound
    Converge { polynomial: String },
    /// Runs the invariant suite
    Check,
}

/// Process exit status.
#[derive(Debug)]
enum Failure {
    Config(String),
    Resource(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Resource(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Resource(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Resource { .. } => Failure::Resource(e.to_string()),
            Error::Singular { .. } | Error::SolverDiverged { .. } => Failure::Invariant(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn core_model(model: ModelArg, text: &str) -> Model {
    match model {
        ModelArg::Orthogonal => Model::Orthogonal,
        ModelArg::Unitary => Model::Unitary,
        ModelArg::Limit if text.contains('v') => Model::Unitary,
        ModelArg::Limit => Model::Orthogonal,
    }
}

fn single_n(cli: &Cli) -> Result<u32, Failure> {
    match cli.n.as_slice() {
        [n] => Ok(*n),
        [] => Err(Failure::Config("--N is required".into())),
        _ => Err(Failure::Config("this command takes a single --N".into())),
    }
}

fn parse_k_range(text: &str) -> Result<(u32, u32), Failure> {
    let bad = || Failure::Config(format!("invalid k range {text:?}"));
    match text.split_once(':') {
        Some((a, b)) => {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok((a, b))
        }
        None => Ok((0, text.trim().parse().map_err(|_| bad())?)),
    }
}

fn config_json(cli: &Cli, extra: serde_json::Value) -> serde_json::Value {
    let mut base = json!({
        "model": cli.model.to_possible_value().map(|v| v.get_name().to_string()),
        "N": cli.n,
        "p": cli.p,
        "kmax": cli.kmax,
    });
    if let (Some(obj), Some(extra)) = (base.as_object_mut(), extra.as_object()) {
        for (k, v) in extra {
            obj.insert(k.clone(), v.clone());
        }
    }
    base
}

fn pattern_arg(cli: &Cli, pattern: &Option<String>) -> Result<Option<Vec<freeqg_core::Color>>, Failure> {
    match (pattern, cli.model) {
        (Some(p), _) => Ok(Some(parse_pattern(p)?)),
        (None, ModelArg::Unitary) => Err(Failure::Config("the unitary model needs --pattern".into())),
        (None, _) => Ok(None),
    }
}

fn cmd_dim(cli: &Cli, k: &str) -> CmdResult {
    let n = single_n(cli)?;
    let (lo, hi) = parse_k_range(k)?;
    let mut table = Table::new(&["k", "dim"]);
    for k in lo..=hi {
        table.push(vec![k.to_string(), dim_irrep(k, n)?.to_string()]);
    }
    table.emit(cli, config_json(cli, json!({ "k": [lo, hi] })))
}

fn cmd_gram(cli: &Cli, k: usize, pattern: &Option<String>) -> CmdResult {
    let n = single_n(cli)?;
    let pattern = pattern_arg(cli, pattern)?;
    let g = freeqg_core::gram_matrix(k, n, pattern.as_deref())?;
    let basis: Vec<String> = g.basis().iter().map(|p| p.to_string()).collect();
    let mut table = Table::new(&["row", "col", "pairing_row", "pairing_col", "loops", "entry"]);
    for i in 0..g.dim() {
        for j in 0..g.dim() {
            table.push(vec![
                i.to_string(),
                j.to_string(),
                basis[i].clone(),
                basis[j].clone(),
                g.loops(i, j).to_string(),
                g.entry(i, j).to_string(),
            ]);
        }
    }
    table.emit(cli, config_json(cli, json!({ "k": k, "pattern": pattern.map(|p| p.iter().map(|c| c.to_string()).collect::<String>()) })))
}

fn cmd_wg(cli: &Cli, engine: &Weingarten, k: usize, pattern: &Option<String>) -> CmdResult {
    let n = single_n(cli)?;
    let pattern = pattern_arg(cli, pattern)?;
    let t = engine.table(k, n, pattern.as_deref())?;
    if !t.verify_inverse() {
        return Err(Failure::Invariant(format!("Wg * G != I at k={k}, N={n}")));
    }
    let mut table = Table::new(&["row", "col", "value"]);
    for i in 0..t.dim() {
        for j in 0..t.dim() {
            table.push(vec![i.to_string(), j.to_string(), t.entry(i, j).to_string()]);
        }
    }
    table.emit(cli, config_json(cli, json!({ "k": k })))
}

fn single_word(text: &str, model: Model) -> Result<GeneratorWord, Failure> {
    let poly = NcPolynomial::parse(text, model)?;
    let mut terms = poly.terms();
    match (terms.next(), terms.next()) {
        (Some((letters, coef)), None) if *coef == freeqg_core::GaussRational::one() => {
            Ok(GeneratorWord::new(letters.to_vec(), model)?)
        }
        _ => Err(Failure::Config(format!("{text:?} is not a single word"))),
    }
}

fn cmd_moment(cli: &Cli, engine: &Weingarten, text: &str) -> CmdResult {
    let model = core_model(cli.model, text);
    let word = single_word(text, model)?;
    let mut table = Table::new(&["N", "word", "moment"]);
    if cli.model == ModelArg::Limit {
        let count = match model {
            Model::Orthogonal => freeqg_core::freelimit::semicircular_moment(word.letters()),
            Model::Unitary => freeqg_core::freelimit::circular_moment(word.letters()),
        };
        table.push(vec!["inf".into(), word.to_string(), count.to_string()]);
    } else {
        if cli.n.is_empty() {
            return Err(Failure::Config("--N is required".into()));
        }
        for &n in &cli.n {
            table.push(vec![n.to_string(), word.to_string(), engine.haar_moment(&word, n)?.to_string()]);
        }
    }
    table.emit(cli, config_json(cli, json!({ "word": text })))
}

fn cmd_lp(cli: &Cli, engine: &Weingarten, text: &str) -> CmdResult {
    let model = core_model(cli.model, text);
    let poly = NcPolynomial::parse(text, model)?;
    if cli.p.is_empty() {
        return Err(Failure::Config("--p is required".into()));
    }
    let bits = cli.precision_bits + GUARD_BITS;
    let dims: Vec<Option<u32>> = if cli.model == ModelArg::Limit {
        vec![None]
    } else if cli.n.is_empty() {
        return Err(Failure::Config("--N is required".into()));
    } else {
        cli.n.iter().map(|&n| Some(n)).collect()
    };
    let mut table = Table::new(&["N", "p", "moment", "lp"]);
    for n in dims {
        let target = match n {
            Some(n) => poly.scaled_generators(n),
            None => poly.clone(),
        };
        for &p in &cli.p {
            let v = lp_norm_with(engine, &target, p, n, bits)?;
            table.push(vec![
                n.map_or("inf".into(), |n| n.to_string()),
                p.to_string(),
                v.moment.to_string(),
                output::real(&v.value),
            ]);
        }
    }
    table.emit(cli, config_json(cli, json!({ "polynomial": text })))
}

fn cmd_dn(cli: &Cli, r_max: u32, side_max: u32) -> CmdResult {
    if cli.n.is_empty() {
        return Err(Failure::Config("--N is required".into()));
    }
    let truncation = Truncation { r_max, side_max };
    let mut table = Table::new(&["N", "scanned_max", "rigorous_upper", "tail_error", "argmax"]);
    for &n in &cli.n {
        let b = dn_constant_with_precision(n, truncation, cli.precision_bits)?;
        if !(b.value.upper() <= b.rigorous_upper.lower()) {
            return Err(Failure::Invariant(format!("scanned D_{n} exceeds its rigorous bound")));
        }
        let bits = b.value.bits();
        table.push(vec![
            n.to_string(),
            output::real(&b.value),
            output::real(&Bracket::from_ratio(&b.upper(), bits)),
            output::real(&Bracket::from_ratio(&b.tail_error, bits)),
            b.argmax.to_string(),
        ]);
    }
    table.emit(cli, config_json(cli, json!({ "r_max": r_max, "side_max": side_max })))
}

fn cmd_selectp(cli: &Cli, degree: u32, epsilon: f64) -> CmdResult {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Failure::Config(format!("epsilon = {epsilon} must be positive")));
    }
    let eps = rational_from_f64(epsilon)?;
    let d_star = dn_uniform_upper_bound()?;
    let (m, p) = select_p(degree, &eps, &d_star)?;
    let value = selector_value(degree, &d_star, m, cli.precision_bits + GUARD_BITS);
    let mut table = Table::new(&["degree", "epsilon", "m", "p", "bound", "d_star"]);
    table.push(vec![
        degree.to_string(),
        epsilon.to_string(),
        m.to_string(),
        p.to_string(),
        output::real(&value),
        output::real(&Bracket::from_ratio(&d_star, value.bits())),
    ]);
    table.emit(cli, config_json(cli, json!({ "degree": degree, "epsilon": epsilon })))
}

fn cmd_converge(cli: &Cli, engine: &Weingarten, text: &str) -> CmdResult {
    let model = match cli.model {
        ModelArg::Limit => return Err(Failure::Config("converge compares finite N against the limit; use o+ or u+".into())),
        m => core_model(m, text),
    };
    let config = SweepConfig {
        polynomial: text.to_string(),
        model,
        n_list: cli.n.clone(),
        p: cli.p.clone(),
        kmax: cli.kmax,
        precision_bits: cli.precision_bits,
        format: match cli.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
    };
    let result = run_converge_with(engine, &config)?;
    output::write(cli.out.as_deref(), &result.render())?;
    if !result.rd_consistent() {
        return Err(Failure::Invariant("an L^p value exceeds its RD bound".into()));
    }
    if result.resource_errors() > 0 {
        return Err(Failure::Resource(format!(
            "{} rows exceed kmax = {}; rerun with a larger --kmax",
            result.resource_errors(),
            cli.kmax
        )));
    }
    if let Some(e) = result.first_error() {
        return Err(e.clone().into());
    }
    Ok(())
}

fn run(cli: &Cli) -> CmdResult {
    let engine = Weingarten::new(cli.kmax);
    match &cli.command {
        Command::Dim { k } => cmd_dim(cli, k),
        Command::Gram { k, pattern } => cmd_gram(cli, *k, pattern),
        Command::Wg { k, pattern } => cmd_wg(cli, &engine, *k, pattern),
        Command::Moment { word } => cmd_moment(cli, &engine, word),
        Command::Lp { polynomial } => cmd_lp(cli, &engine, polynomial),
        Command::Dn { r_max, side_max } => cmd_dn(cli, *r_max, *side_max),
        Command::Selectp { degree, epsilon } => cmd_selectp(cli, *degree, *epsilon),
        Command::Converge { polynomial } => cmd_converge(cli, &engine, polynomial),
        Command::Check => check::run(cli.out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("freeqg: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
