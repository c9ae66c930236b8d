//! Front end for the polarization-module engine: job configuration, the
//! run modes behind each subcommand, and the fixture verifier.

pub mod coeff;
pub mod fixtures;
pub mod verify;

use std::fmt::Write as _;

use polmod::closure::{orbit, with_threads, ClosureError};
use polmod::exceptions::{exception_equation, is_n_exception, ExceptionError};
use polmod::frobenius::{report_json, sym_json, FrobeniusError};
use polmod::symfunc::schur_to_h;
use polmod::{
    classify, frobenius_series, hilbert_series, oracle_series, polarization_module, ClassTag, FrobeniusSeries,
    Generator, GeneratorFamily, GradedSpan, OracleKind, Poly, Q,
};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Frobenius,
    Hilbert,
    Basis,
    Classify,
    Exceptions,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Largest `n` accepted for the Vandermonde generator without `allow_large`.
pub const VANDERMONDE_MAX_N: usize = 4;

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub mode: Mode,
    pub n: usize,
    pub ell: usize,
    pub generators: Vec<Generator>,
    /// Projective points for `classify` and `exceptions`.
    pub points: Vec<Vec<Q>>,
    /// Fixture selector for `verify`.
    pub selector: String,
    pub format: Format,
    pub full_mu: bool,
    /// Worker threads for the closure; 0 leaves the default.
    pub threads: usize,
    pub allow_large: bool,
}

impl JobConfig {
    pub fn new(mode: Mode, n: usize, ell: usize) -> Self {
        JobConfig {
            mode,
            n,
            ell,
            generators: Vec::new(),
            points: Vec::new(),
            selector: "all".into(),
            format: Format::Text,
            full_mu: false,
            threads: 0,
            allow_large: false,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let needs_size = !matches!(self.mode, Mode::Verify);
        if needs_size && (self.n == 0 || self.ell == 0) {
            return Err(CliError::Usage("n and ell must be at least 1".into()));
        }
        let needs_gens = matches!(self.mode, Mode::Frobenius | Mode::Hilbert | Mode::Basis);
        if needs_gens && self.generators.is_empty() {
            return Err(CliError::Usage("at least one --gen is required".into()));
        }
        if self.mode == Mode::Classify && self.points.is_empty() {
            return Err(CliError::Usage("classify needs at least one --point".into()));
        }
        if !self.allow_large
            && self.n > VANDERMONDE_MAX_N
            && self.generators.iter().any(|g| matches!(g, Generator::Vandermonde))
        {
            return Err(CliError::Usage(format!(
                "vandermonde is limited to n <= {VANDERMONDE_MAX_N}; pass --allow-large to go further"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    /// The verifier found mismatches; the payload is the full report.
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Consistency(_) | CliError::Mismatch(_) => 2,
        }
    }
}

impl From<FrobeniusError> for CliError {
    fn from(e: FrobeniusError) -> Self {
        CliError::Consistency(e.to_string())
    }
}

impl From<ExceptionError> for CliError {
    fn from(e: ExceptionError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ClosureError> for CliError {
    fn from(e: ClosureError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Parse `a,b` or `a,b,c` with rational entries such as `-3/2`.
pub fn parse_point(text: &str) -> Result<Vec<Q>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<Q>().map_err(|_| CliError::Usage(format!("bad coordinate '{t}' in point '{text}'"))))
        .collect()
}

/// The module generated by the union of the generators: expressions
/// contribute their orbits, named families are taken as given.
pub fn build_module(gens: &[Generator], ell: usize, n: usize, threads: usize) -> Result<GradedSpan, CliError> {
    let any_family = gens.iter().any(|g| matches!(g, Generator::Family(..)));
    let mut polys: Vec<Poly> = Vec::new();
    for g in gens {
        let ps = g.polys(ell, n).map_err(|e| CliError::Usage(format!("{g}: {e}")))?;
        if any_family && !matches!(g, Generator::Family(..)) {
            polys.extend(ps.iter().flat_map(|p| orbit(p, n)));
        } else {
            polys.extend(ps);
        }
    }
    polys.retain(|p| !p.is_zero());
    if polys.is_empty() {
        return Err(CliError::Usage("the generators vanish for this n".into()));
    }
    let family = if any_family { GeneratorFamily::verbatim(polys) } else { GeneratorFamily::orbit(polys) };
    Ok(with_threads(threads, || polarization_module(&family, ell, n))?)
}

/// `ℓ` to use: the configured one, or with `full_mu` enough rows to see every `μ`.
pub fn effective_ell(cfg: &JobConfig) -> Result<usize, CliError> {
    if !cfg.full_mu {
        return Ok(cfg.ell);
    }
    let mut d = 0;
    for g in &cfg.generators {
        for p in g.polys(cfg.ell, cfg.n).map_err(|e| CliError::Usage(format!("{g}: {e}")))? {
            d = d.max(p.total_degree() as usize);
        }
    }
    Ok(d.min(cfg.n).max(cfg.ell).max(1))
}

fn gen_strings(gens: &[Generator]) -> Vec<String> {
    gens.iter().map(ToString::to_string).collect()
}

fn q_json(q: &Q) -> Value {
    if q.is_integer() {
        if let Ok(v) = i64::try_from(q.to_integer()) {
            return json!(v);
        }
    }
    json!(polmod::polyring::fmt_q(q))
}

fn render(cfg: &JobConfig, text: String, value: Value) -> String {
    match cfg.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
    }
}

/// Run one job and return what should go to standard output.
pub fn run(cfg: &JobConfig) -> Result<String, CliError> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Frobenius | Mode::Hilbert | Mode::Basis => run_module(cfg),
        Mode::Classify => run_classify(cfg),
        Mode::Exceptions => run_exceptions(cfg),
        Mode::Verify => verify::run(&cfg.selector, cfg.format, cfg.threads),
    }
}

fn run_module(cfg: &JobConfig) -> Result<String, CliError> {
    let ell = effective_ell(cfg)?;
    let module = build_module(&cfg.generators, ell, cfg.n, cfg.threads)?;
    let gens = gen_strings(&cfg.generators);
    let mut text = String::new();
    let _ = writeln!(text, "n = {}, ell = {}", cfg.n, ell);
    let _ = writeln!(text, "generators: {}", gens.join(", "));
    match cfg.mode {
        Mode::Basis => {
            for (d, c) in module.components() {
                let _ = writeln!(text, "degree {d}: dimension {}", c.dim());
                for b in c.canonical_basis() {
                    let _ = writeln!(text, "  {b}");
                }
            }
            let _ = writeln!(text, "dimension: {}", module.dimension());
            Ok(render(cfg, text, module.to_json()))
        }
        Mode::Hilbert => {
            let h = hilbert_series(&module)?;
            let hh = schur_to_h(&h).map_err(|e| CliError::Consistency(e.to_string()))?;
            let _ = writeln!(text, "hilbert: {h}");
            let _ = writeln!(text, "hilbert (h basis): {hh}");
            let _ = writeln!(text, "dimension: {}", module.dimension());
            let value = json!({
                "n": cfg.n,
                "ell": ell,
                "generators": gens,
                "hilbert": sym_json(&h),
                "hilbert_h_basis": sym_json(&hh),
                "dimension": module.dimension(),
            });
            Ok(render(cfg, text, value))
        }
        _ => {
            let series = frobenius_series(&module)?;
            check_dimension(&series, &module)?;
            let _ = writeln!(text, "frobenius: {}", series.pretty());
            let _ = writeln!(text, "frobenius (h basis): {}", series.pretty_h());
            let _ = writeln!(text, "dimension: {}", module.dimension());
            let value = report_json(&gens, &module, &series)?;
            Ok(render(cfg, text, value))
        }
    }
}

/// The series must account for every basis vector.
pub(crate) fn check_dimension(series: &FrobeniusSeries, module: &GradedSpan) -> Result<(), CliError> {
    let total = series.total_dimension();
    if total != module.dimension().into() {
        return Err(CliError::Consistency(format!(
            "series accounts for dimension {total} but the module has {}",
            module.dimension()
        )));
    }
    Ok(())
}

fn oracle_for(degree: usize, tag: ClassTag) -> OracleKind {
    if degree == 2 {
        OracleKind::Degree2(tag)
    } else {
        OracleKind::Degree3(tag)
    }
}

fn run_classify(cfg: &JobConfig) -> Result<String, CliError> {
    let mut text = String::new();
    let mut rows = Vec::new();
    for p in &cfg.points {
        let degree = p.len();
        let tag = classify(degree, p, cfg.n)?;
        let expected = oracle_series(oracle_for(degree, tag), cfg.n)?.truncate(cfg.ell);
        let coords: Vec<String> = p.iter().map(polmod::polyring::fmt_q).collect();
        let _ = writeln!(text, "[{}] n={}: {}  {}", coords.join(":"), cfg.n, tag, expected.pretty());
        let mut row = json!({
            "abc": p.iter().map(q_json).collect::<Vec<_>>(),
            "degree": degree,
            "class": tag,
            "frobenius": expected.to_json_terms(),
        });
        if degree == 3 {
            row["exception"] = json!(tag == ClassTag::P3);
        }
        rows.push(row);
    }
    Ok(render(cfg, text, json!({"n": cfg.n, "ell": cfg.ell, "points": rows})))
}

fn run_exceptions(cfg: &JobConfig) -> Result<String, CliError> {
    let n = cfg.n;
    let (lhs, rhs) = if n >= 3 {
        let eq = exception_equation(n)?;
        (eq.lhs(), eq.rhs())
    } else if n == 2 {
        ("b".to_string(), "0".to_string())
    } else {
        return Err(CliError::Usage("exceptions needs n >= 2".into()));
    };
    let mut text = format!("n = {n}: {lhs}={rhs}\n");
    let mut rows = Vec::new();
    for p in &cfg.points {
        if p.len() != 3 {
            return Err(CliError::Usage("exception points have three coordinates".into()));
        }
        let tag = classify(3, p, n)?;
        let exc = is_n_exception(&p[0], &p[1], &p[2], n)? && tag == ClassTag::P3;
        let coords: Vec<String> = p.iter().map(polmod::polyring::fmt_q).collect();
        let _ = writeln!(text, "[{}]: exception={exc} class={tag}", coords.join(":"));
        rows.push(json!({"abc": p.iter().map(q_json).collect::<Vec<_>>(), "exception": exc, "class": tag}));
    }
    let value = json!({"n": n, "equation": {"lhs": lhs, "rhs": rhs}, "points": rows});
    Ok(render(cfg, text, value))
}
