//! Command-line front end: loads `.monad.json` documents, runs the
//! certifiers and writes `.cert.json` certificates.

pub mod document;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use linmonad::algebra::parse_rational;
use linmonad::cohomology::sum_cohomology;
use linmonad::monad::{SamplingOptions, SheafKind};
use linmonad::picard::chern_of_monad;
use linmonad::stability::{
    certify_asymptotic, certify_limit_semistable, certify_stable, StabilityError, StabilityOptions,
};
use linmonad::{Certificate, DivisorSpec, LineBundleSum, Monad, MonadError, MultiDegree, SpaceDescriptor, Verdict};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use thiserror::Error;

pub use document::{DocumentError, MonadDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Stability(StabilityError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Replay(_) | StabilityError::Json(_) => Self::Internal(e.to_string()),
            other => Self::Stability(other),
        }
    }
}

impl From<MonadError> for CliError {
    fn from(e: MonadError) -> Self {
        Self::Document(DocumentError::Monad(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Internal(_) | Self::Write { .. } => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "linmonad", version, about = "Exact invariants and stability certificates for linear monads")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Parameter values, `name=v` (or `name=v1,v2,...` for sweep).
    #[arg(long = "param", value_name = "NAME=VALUES")]
    pub params: Vec<String>,
    /// Enable Monte Carlo sampling of degeneration loci.
    #[arg(long)]
    pub mc: bool,
    /// Sampling seed; any sampling flag implies --mc.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample points per prime (default 1000000).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Comma-separated primes.
    #[arg(long, value_name = "P,Q")]
    pub primes: Option<String>,
    /// Zero-hit confidence threshold, as a rational or decimal.
    #[arg(long)]
    pub confidence: Option<String>,
    /// Sampling threads; results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct DivisorArgs {
    /// Divisor polydegree `d1[,d2]`; defaults to the anticanonical class.
    #[arg(long, allow_hyphen_values = true)]
    pub divisor: Option<String>,
    /// Assert that the divisor is cyclic with Picard group generated by O(1).
    #[arg(long)]
    pub assume_cyclic: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the monad conditions.
    Validate {
        /// A `.monad.json` document.
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Chern data, degrees and normalization of K and E.
    Invariants {
        /// A `.monad.json` document.
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Cohomology of a line bundle, or of a twisted monad term.
    Cohomology {
        file: Option<String>,
        /// Space in short form, e.g. `P:3` or `PxP:2,1`.
        #[arg(long)]
        space: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        degree: String,
        /// Monad term to twist (`M0`, `M1`, `M2`) when a file is given.
        #[arg(long, default_value = "M1")]
        term: String,
        #[command(flatten)]
        common: Common,
    },
    /// Locally free, reflexive or torsion-free.
    Classify {
        /// A `.monad.json` document.
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Certify slope stability of E.
    Stability {
        /// A `.monad.json` document.
        file: String,
        /// Also write the certificate to this file.
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Certify stability of the restriction of E to a divisor.
    Asymptotic {
        /// A `.monad.json` document.
        file: String,
        /// Also write the certificate to this file.
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        divisor: DivisorArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Certify semistability of the restriction of a degenerate limit.
    Limit {
        /// A `.monad.json` document.
        file: String,
        /// Also write the certificate to this file.
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        divisor: DivisorArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run every certifier over a parameter grid.
    Sweep {
        /// A `.monad.json` document.
        file: String,
        #[command(flatten)]
        divisor: DivisorArgs,
        #[command(flatten)]
        common: Common,
    },
}

/// Output of one subcommand: the text to print and the exit code.
struct Report {
    json: Value,
    human: String,
    code: i32,
}

fn parse_params(common: &Common, allow_lists: bool) -> Result<Vec<(String, Vec<String>)>, CliError> {
    let mut out = Vec::new();
    for p in &common.params {
        let (name, values) = p
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--param `{p}` is not NAME=VALUE")))?;
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
        if values.len() != 1 && !allow_lists {
            return Err(CliError::Usage(format!("--param {name} takes one value here")));
        }
        out.push((name.trim().to_string(), values));
    }
    Ok(out)
}

fn single_params(common: &Common) -> Result<BTreeMap<String, String>, CliError> {
    Ok(parse_params(common, false)?
        .into_iter()
        .map(|(k, mut v)| (k, v.remove(0)))
        .collect())
}

pub fn sampling(common: &Common) -> Result<Option<SamplingOptions>, CliError> {
    let any = common.mc
        || common.seed.is_some()
        || common.samples.is_some()
        || common.primes.is_some()
        || common.confidence.is_some()
        || common.workers.is_some();
    if !any {
        return Ok(None);
    }
    let mut o = SamplingOptions::default();
    if let Some(s) = common.seed {
        o.seed = s;
    }
    if let Some(n) = common.samples {
        o.samples = n;
    }
    if let Some(w) = common.workers {
        o.workers = w.max(1);
    }
    if let Some(p) = &common.primes {
        o.primes = p
            .split(',')
            .map(|s| s.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("--primes `{p}` is not a list of integers")))?;
    }
    if let Some(c) = &common.confidence {
        let q = parse_rational(c).ok_or_else(|| CliError::Usage(format!("--confidence `{c}` is not a rational")))?;
        o.confidence = q
            .to_f64()
            .ok_or_else(|| CliError::Usage(format!("--confidence `{c}` is out of range")))?;
    }
    Ok(Some(o))
}

fn divisor(space: &SpaceDescriptor, args: &DivisorArgs) -> Result<DivisorSpec, CliError> {
    let degree = match &args.divisor {
        Some(t) => document::parse_degree(t).ok_or_else(|| CliError::Usage(format!("--divisor `{t}` is not d1[,d2]")))?,
        None => space
            .anticanonical()
            .ok_or_else(|| CliError::Usage(format!("no default divisor on {space}; pass --divisor")))?,
    };
    Ok(DivisorSpec::new(degree, args.assume_cyclic))
}

fn options(common: &Common) -> Result<StabilityOptions, CliError> {
    Ok(StabilityOptions {
        sampling: sampling(common)?,
        ..StabilityOptions::default()
    })
}

fn load(file: &str, common: &Common) -> Result<(MonadDocument, Monad), CliError> {
    let doc = MonadDocument::load(file)?;
    let monad = doc.monad(&single_params(common)?)?;
    Ok((doc, monad))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Writes the certificate as pretty JSON with a trailing newline.
pub fn emit_certificate(c: &Certificate, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, c.to_json()).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn certificate_text(c: &Certificate, indent: &str) -> String {
    let mut s = format!("{indent}kind: {}\n{indent}verdict: {}\n", c.kind, c.verdict);
    if let Some(f) = &c.failure {
        s += &format!("{indent}failure: {f}\n");
    }
    if !c.assumptions.is_empty() {
        s += &format!("{indent}assumptions:\n");
        for a in &c.assumptions {
            s += &format!("{indent}  - {a}\n");
        }
    }
    s += &format!("{indent}steps:\n");
    for (i, step) in c.steps.iter().enumerate() {
        s += &format!("{indent}  {:>2}. {} ({})\n", i + 1, step.operation, step.anchor);
    }
    if let Some(seed) = c.seed {
        s += &format!("{indent}seed: {seed}\n");
    }
    for a in &c.attached {
        s += &format!("{indent}attached:\n{}", certificate_text(a, &format!("{indent}  ")));
    }
    s
}

fn certificate_report(c: Certificate, out: Option<&String>) -> Result<Report, CliError> {
    if let Some(p) = out {
        emit_certificate(&c, Path::new(p))?;
    }
    let code = if c.verdict == Verdict::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    Ok(Report {
        human: certificate_text(&c, ""),
        json: serde_json::to_value(&c).map_err(|e| CliError::Internal(e.to_string()))?,
        code,
    })
}

fn validate(file: &str, common: &Common) -> Result<Report, CliError> {
    let (_, m) = load(file, common)?;
    let r = m.validate();
    let verdict = if r.passes() { "valid" } else { "invalid" };
    let mut human = format!(
        "space: {}\nM0: {}\nM1: {}\nM2: {}\nhomogeneous: {}\ncomplex: {}\nalpha injective: {}\nbeta surjective: {}\n",
        m.space(),
        m.terms()[0],
        m.terms()[1],
        m.terms()[2],
        yes(r.homogeneous),
        yes(r.complex),
        yes(r.alpha_injective),
        yes(r.beta_surjective)
    );
    for f in &r.failures {
        human += &format!("failure: {f}\n");
    }
    human += &format!("verdict: {verdict}\n");
    Ok(Report {
        json: json!({ "verdict": verdict, "report": r }),
        human,
        code: if r.passes() { EXIT_OK } else { EXIT_INCONCLUSIVE },
    })
}

fn invariants(file: &str, common: &Common) -> Result<Report, CliError> {
    let doc = MonadDocument::load(file)?;
    let space = doc.descriptor()?;
    let terms = doc.term_sums()?;
    let l = space.picard_rank();
    let [r0, r1, r2] = [&terms[0], &terms[1], &terms[2]].map(|t| t.rank() as i64);
    let dets = [&terms[0], &terms[1], &terms[2]].map(|t| t.det(l));
    let k_det = &dets[1] - &dets[2];
    let e_det = &k_det - &dets[0];
    let chern = if space.has_coordinates() {
        let m = doc.monad(&single_params(common)?)?;
        Some(chern_of_monad(&m).map_err(MonadError::from)?)
    } else {
        None
    };
    let pol = space.polarization();
    let summary = |rank: i64, det: MultiDegree| pol.summary(rank, det).map_err(MonadError::from);
    let k = summary(r1 - r2, k_det)?;
    let e = summary(r1 - r0 - r2, e_det)?;
    let norm = if e.rank > 0 {
        let (k_e, n) = pol.slope_and_normalize(&e).map_err(MonadError::from)?;
        Some(json!({ "k": k_e, "normalized": n }))
    } else {
        None
    };
    let mut human = format!("space: {space}\nweights: {:?}\n", space.weights());
    let fmt_summary = |name: &str, s: &linmonad::BundleSummary| {
        let slope = s.slope.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        format!("{name}: rank {}, det {}, degree {}, slope {}\n", s.rank, s.det, s.degree, slope)
    };
    human += &fmt_summary("K", &k);
    human += &fmt_summary("E", &e);
    if let Some(c) = &chern {
        human += &format!("c(K): c1 {:?}, c2 {:?}\n", c.kernel.c1, c.kernel.c2);
        human += &format!("c(E): c1 {:?}, c2 {:?}\n", c.cohomology.c1, c.cohomology.c2);
    }
    if norm.is_some() {
        let (k_e, normalized) = pol.slope_and_normalize(&e).map_err(MonadError::from)?;
        human += &format!("normalization: k = {k_e}, normalized degree {}\n", normalized.degree);
    }
    human += "verdict: ok\n";
    Ok(Report {
        json: json!({ "verdict": "ok", "space": space, "chern": chern, "kernel": k, "cohomology": e, "normalization": norm }),
        human,
        code: EXIT_OK,
    })
}

fn cohomology(
    file: Option<&String>,
    space_arg: Option<&String>,
    degree: &str,
    term: &str,
    common: &Common,
) -> Result<Report, CliError> {
    let twist = document::parse_degree(degree).ok_or_else(|| CliError::Usage(format!("--degree `{degree}` is not d1[,d2]")))?;
    let (space, sum, label) = match (file, space_arg) {
        (Some(f), None) => {
            let doc = MonadDocument::load(f)?;
            let _ = single_params(common)?;
            let idx = match term {
                "M0" => 0,
                "M1" => 1,
                "M2" => 2,
                other => return Err(CliError::Usage(format!("unknown term `{other}`"))),
            };
            let sums = doc.term_sums()?;
            (doc.descriptor()?, sums[idx].clone(), format!("{term}{twist}"))
        }
        (None, Some(s)) => {
            let space = document::SpaceBlock::parse_short(s)?.descriptor()?;
            let sum = LineBundleSum::single(MultiDegree::zero(twist.len()), 1);
            (space, sum, format!("O{twist}"))
        }
        _ => return Err(CliError::Usage("give either a monad file or --space".into())),
    };
    if twist.len() != space.picard_rank() {
        return Err(CliError::Usage(format!("--degree needs {} entries on {space}", space.picard_rank())));
    }
    let h = sum_cohomology(&space, &sum, &twist).map_err(MonadError::from)?;
    let mut human = format!("space: {space}\nbundle: {label}\n");
    for (p, v) in h.0.iter().enumerate() {
        human += &format!("h^{p} = {v}\n");
    }
    human += &format!("euler characteristic: {}\nverdict: ok\n", h.euler());
    Ok(Report {
        json: json!({ "verdict": "ok", "space": space, "bundle": label, "h": h, "euler": h.euler() }),
        human,
        code: EXIT_OK,
    })
}

fn classify(file: &str, common: &Common) -> Result<Report, CliError> {
    let (_, m) = load(file, common)?;
    let opts = sampling(common)?;
    match m.classify(opts.as_ref()) {
        Ok(c) => {
            let mut human = format!(
                "alpha locus: {} ({:?})\nbeta locus: {} ({:?})\n",
                c.alpha_locus.codim, c.alpha_locus.method, c.beta_locus.codim, c.beta_locus.method
            );
            if let Some(e) = &c.alpha_locus.exact {
                if !e.equations.is_empty() {
                    human += &format!("alpha locus equations: {}\n", e.equations.join(", "));
                }
            }
            for (name, r) in [("alpha", &c.alpha_locus), ("beta", &c.beta_locus)] {
                if let Some(mc) = &r.monte_carlo {
                    for run in &mc.runs {
                        human += &format!(
                            "{name} sampling: q = {}, {} samples, {} hits, estimate {}\n",
                            run.prime, run.samples, run.hits, run.estimate
                        );
                    }
                }
            }
            if let Some(o) = &opts {
                human += &format!("seed: {}\n", o.seed);
            }
            human += &format!("verdict: {}\n", c.class);
            let code = if c.class == SheafKind::None {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            };
            Ok(Report {
                json: json!({ "verdict": c.class, "class": c, "seed": opts.as_ref().map(|o| o.seed) }),
                human,
                code,
            })
        }
        Err(e @ (MonadError::Inconclusive(_) | MonadError::BetaNotSurjective(_) | MonadError::Invalid(_))) => {
            let verdict = match e {
                MonadError::BetaNotSurjective(_) => "beta_not_surjective",
                MonadError::Invalid(_) => "invalid",
                _ => "inconclusive",
            };
            Ok(Report {
                human: format!("failure: {e}\nverdict: {verdict}\n"),
                json: json!({ "verdict": verdict, "error": e.to_string() }),
                code: EXIT_INCONCLUSIVE,
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn cell(c: &Option<Certificate>) -> String {
    c.as_ref().map_or_else(|| "-".to_string(), |c| c.verdict.to_string())
}

fn sweep(file: &str, div: &DivisorArgs, common: &Common) -> Result<Report, CliError> {
    let doc = MonadDocument::load(file)?;
    let params = parse_params(common, true)?;
    let [(name, values)] = <[_; 1]>::try_from(params)
        .map_err(|_| CliError::Usage("sweep takes exactly one --param NAME=V1,V2,...".into()))?;
    let space = doc.descriptor()?;
    let d = divisor(&space, div)?;
    let opts = options(common)?;
    let mut rows = Vec::new();
    let mut all_certified = true;
    for v in &values {
        let m = doc.monad(&BTreeMap::from([(name.clone(), v.clone())]))?;
        let class = match m.classify(opts.sampling.as_ref()) {
            Ok(c) => c.class.to_string(),
            Err(MonadError::Inconclusive(_)) => "inconclusive".to_string(),
            Err(MonadError::BetaNotSurjective(_)) => "beta_not_surjective".to_string(),
            Err(MonadError::Invalid(_)) => "invalid".to_string(),
            Err(e) => return Err(e.into()),
        };
        let locally_free = class == "locally_free";
        let reflexive = locally_free || class == "reflexive" || class == "inconclusive";
        let stable = if reflexive { Some(certify_stable(&m, &opts)?) } else { None };
        let asymptotic = if locally_free {
            Some(certify_asymptotic(&m, &d, &opts)?)
        } else {
            None
        };
        let limit = if space == (SpaceDescriptor::Projective { n: 3 }) && class != "invalid" {
            Some(certify_limit_semistable(&m, &d, &opts)?)
        } else {
            None
        };
        let certified = [&stable, &asymptotic, &limit]
            .iter()
            .any(|c| c.as_ref().is_some_and(|c| c.verdict != Verdict::Inconclusive));
        all_certified &= certified;
        rows.push((v.clone(), class, stable, asymptotic, limit));
    }
    let header = [name.as_str(), "class", "stable", "asymptotic", "limit"];
    let table: Vec<[String; 5]> = rows
        .iter()
        .map(|(v, c, s, a, l)| [v.clone(), c.clone(), cell(s), cell(a), cell(l)])
        .collect();
    let widths: Vec<usize> = (0..5)
        .map(|i| table.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<&str>| {
        let s: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        s.join("  ").trim_end().to_string() + "\n"
    };
    let mut human = format!("divisor: {}\n", d.degree);
    human += &line(header.to_vec());
    for r in &table {
        human += &line(r.iter().map(String::as_str).collect());
    }
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|(v, c, s, a, l)| {
            json!({
                "value": v,
                "class": c,
                "stable": s.as_ref().map(|c| c.verdict),
                "asymptotic": a.as_ref().map(|c| c.verdict),
                "limit": l.as_ref().map(|c| c.verdict),
            })
        })
        .collect();
    let verdict = if all_certified { "certified" } else { "inconclusive" };
    human += &format!("verdict: {verdict}\n");
    Ok(Report {
        json: json!({ "verdict": verdict, "parameter": name, "divisor": d.degree, "rows": json_rows }),
        human,
        code: if all_certified { EXIT_OK } else { EXIT_INCONCLUSIVE },
    })
}

fn dispatch(cmd: &Command) -> Result<(Report, bool), CliError> {
    Ok(match cmd {
        Command::Validate { file, common } => (validate(file, common)?, common.json),
        Command::Invariants { file, common } => (invariants(file, common)?, common.json),
        Command::Cohomology {
            file,
            space,
            degree,
            term,
            common,
        } => (cohomology(file.as_ref(), space.as_ref(), degree, term, common)?, common.json),
        Command::Classify { file, common } => (classify(file, common)?, common.json),
        Command::Stability { file, out, common } => {
            let (_, m) = load(file, common)?;
            (certificate_report(certify_stable(&m, &options(common)?)?, out.as_ref())?, common.json)
        }
        Command::Asymptotic {
            file,
            out,
            divisor: div,
            common,
        } => {
            let (_, m) = load(file, common)?;
            let d = divisor(m.space(), div)?;
            (certificate_report(certify_asymptotic(&m, &d, &options(common)?)?, out.as_ref())?, common.json)
        }
        Command::Limit {
            file,
            out,
            divisor: div,
            common,
        } => {
            let (_, m) = load(file, common)?;
            let d = divisor(m.space(), div)?;
            (
                certificate_report(certify_limit_semistable(&m, &d, &options(common)?)?, out.as_ref())?,
                common.json,
            )
        }
        Command::Sweep {
            file,
            divisor: div,
            common,
        } => (sweep(file, div, common)?, common.json),
    })
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok((report, as_json)) => {
            let text = if as_json {
                let mut s = serde_json::to_string_pretty(&report.json).expect("report serializes");
                s.push('\n');
                s
            } else {
                report.human
            };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_INTERNAL;
            }
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
