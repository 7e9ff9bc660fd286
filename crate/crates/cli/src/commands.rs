use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use depoisson::depoissonize::certify;
use depoisson::polyfam::{charlier_poly, ramanujan_b, rho_poly, stirling2, tau_poly};
use depoisson::ramanujan::{
    inverse_findiff_at_integer, inverse_findiff_general_r, ramanujan_derivative_form, ramanujan_findiff_real,
};
use depoisson::verify::{all_suites, bound_suite, identity_suite, VerifyConfig};
use depoisson::{Error, SequenceProvider, Theorem};

use crate::config::{Command, Direction, ExpandArgs, Family, Form, PolyvalArgs, RunConfig, Suite, VerifyArgs};
use crate::output::{write_csv, write_flat, Row, TermRow};

/// Exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_VIOLATION: u8 = 2;
pub const EXIT_USAGE: u8 = 3;
pub const EXIT_OVERFLOW: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Overflow(String),
    #[error(transparent)]
    Failure(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Overflow(_) => EXIT_OVERFLOW,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::WindowOverflow { .. } | Error::Overflow(_) => CliError::Overflow(e.to_string()),
            Error::Io(io) => CliError::Failure(io.into()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// What a successful run found: bound violations from `expand`, failed
/// checks from `verify`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }
}

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match &cfg.command {
        Command::Polyval(p) => polyval(p, out).map(|_| Outcome::default()),
        Command::Expand(e) => expand(e, cfg.tol, out),
        Command::Verify(v) => verify(v, cfg.tol, out),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Failure(e.into())
}

fn index(v: i64, what: &str) -> Result<usize, CliError> {
    usize::try_from(v).map_err(|_| usage(format!("{what} must be nonnegative, got {v}")))
}

pub fn polyval(p: &PolyvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let arity = match p.family {
        Family::Stirling | Family::Rb => 2,
        _ => 1,
    };
    if p.indices.len() != arity {
        return Err(usage(format!("{:?} takes {arity} index argument(s), got {}", p.family, p.indices.len())));
    }
    if p.lambda.is_some() && p.family != Family::Charlier {
        return Err(usage("--lambda only applies to charlier"));
    }
    if p.x.is_some() && arity == 2 {
        return Err(usage("--x only applies to polynomial families"));
    }
    let poly = match p.family {
        Family::Stirling => {
            let (j, s) = (index(p.indices[0], "j")?, index(p.indices[1], "s")?);
            return writeln!(out, "{}", stirling2(j, s)).map_err(io);
        }
        Family::Rb => return writeln!(out, "{}", ramanujan_b(p.indices[0], p.indices[1])).map_err(io),
        Family::Tau => tau_poly(index(p.indices[0], "m")?),
        Family::Rho => rho_poly(index(p.indices[0], "j")?),
        Family::Charlier => {
            let lambda = p.lambda.as_ref().ok_or_else(|| usage("charlier needs --lambda"))?;
            charlier_poly(&lambda.0, index(p.indices[0], "m")?)?
        }
    };
    match &p.x {
        Some(x) => writeln!(out, "{}", poly.eval(&x.0)),
        None => {
            let coeffs: Vec<String> = poly.coeffs().iter().map(|c| c.to_string()).collect();
            writeln!(out, "poly={poly}\ncoeffs={}", if coeffs.is_empty() { "0".into() } else { coeffs.join(",") })
        }
    }
    .map_err(io)
}

/// Grid point in row-major order.
#[derive(Clone, Copy, Debug)]
struct Point {
    n: Option<usize>,
    order: usize,
    r: Option<f64>,
}

fn points(e: &ExpandArgs) -> Result<Vec<Point>, CliError> {
    let orders = &e.order.0;
    let centers =
        |n: usize| -> Vec<f64> { e.r.iter().copied().chain(e.r_scale.iter().map(|s| s * n as f64)).collect() };
    let mut pts = Vec::new();
    match e.direction {
        Direction::Depoissonize | Direction::Inverse => {
            let ns = e.n.as_ref().ok_or_else(|| usage("--n is required"))?;
            for &n in &ns.0 {
                for &order in orders {
                    let rs = centers(n);
                    if rs.is_empty() {
                        pts.push(Point { n: Some(n), order, r: None });
                    }
                    pts.extend(rs.into_iter().map(|r| Point { n: Some(n), order, r: Some(r) }));
                }
            }
        }
        Direction::Ramanujan => {
            if e.n.is_some() || !e.r_scale.is_empty() {
                return Err(usage("ramanujan takes centers from --r only"));
            }
            if e.r.is_empty() {
                return Err(usage("ramanujan needs --r"));
            }
            for &order in orders {
                pts.extend(e.r.iter().map(|&r| Point { n: None, order, r: Some(r) }));
            }
        }
    }
    if e.direction != Direction::Depoissonize && e.theorem.is_some() {
        return Err(usage("--theorem only applies to depoissonize"));
    }
    if e.direction != Direction::Ramanujan && e.form != Form::Findiff {
        return Err(usage("--form only applies to ramanujan"));
    }
    if let Some(r) = pts.iter().filter_map(|p| p.r).find(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(usage(format!("centers must be positive and finite, got {r}")));
    }
    Ok(pts)
}

fn depoissonize_row(seq: &dyn SequenceProvider, p: Point, theorem: Option<Theorem>) -> Result<Row, Error> {
    let n = p.n.expect("depoissonize points carry n");
    let r = p.r.unwrap_or(n as f64);
    let theorem = theorem.unwrap_or(if p.r.is_some() { Theorem::GeneralR } else { Theorem::AtN });
    let cert = certify(seq, n, p.order, r, theorem)?;
    let a_n = seq.term_ext(n)?;
    Ok(Row {
        n: Some(n),
        order: p.order,
        r,
        theorem: Some(cert.theorem),
        partial_sum: cert.partial_sum,
        certified_bound: Some(cert.bound),
        oracle_value: Some(a_n),
        actual_error: Some(cert.error_against(a_n)),
        terms: cert
            .components
            .iter()
            .map(|c| TermRow { index: c.m, value: c.derivative, poly: c.poly_value, term: c.term })
            .collect(),
    })
}

fn inverse_row(seq: &dyn SequenceProvider, p: Point, form: Form) -> Result<Row, Error> {
    let rep = match (p.n, p.r) {
        (Some(n), None) => inverse_findiff_at_integer(seq, n, p.order)?,
        (Some(n), Some(r)) => inverse_findiff_general_r(seq, n, p.order, r)?,
        (None, Some(r)) if form == Form::Findiff => ramanujan_findiff_real(seq, r, p.order)?,
        (None, Some(r)) => ramanujan_derivative_form(seq, r, p.order)?,
        (None, None) => unreachable!("points always carry n or R"),
    };
    Ok(Row {
        n: rep.n,
        order: rep.order,
        r: rep.r,
        theorem: None,
        partial_sum: rep.partial_sum,
        certified_bound: rep.certified_bound,
        oracle_value: rep.oracle_value,
        actual_error: rep.actual_error(),
        terms: rep
            .terms
            .iter()
            .map(|t| TermRow { index: t.s, value: t.difference, poly: t.poly_value, term: t.term })
            .collect(),
    })
}

/// Evaluates `f` at every point on a pool of scoped threads; results come
/// back in input order.
fn par_map<T: Send>(pts: &[Point], f: impl Fn(Point) -> T + Sync) -> Vec<T> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(pts.len()).max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..pts.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= pts.len() {
                    break;
                }
                let v = f(pts[i]);
                slots.lock().expect("no worker panicked")[i] = Some(v);
            });
        }
    });
    slots.into_inner().expect("no worker panicked").into_iter().map(|v| v.expect("every slot filled")).collect()
}

pub fn expand(e: &ExpandArgs, tol: Option<f64>, out: &mut dyn Write) -> Result<Outcome, CliError> {
    if let Some(t) = tol.filter(|t| !(t.is_finite() && *t >= -1.0)) {
        return Err(usage(format!("expand tolerance must be a finite number >= -1, got {t}")));
    }
    let pts = points(e)?;
    let reach = pts
        .iter()
        .map(|p| p.n.unwrap_or(0) as f64 + p.order as f64)
        .chain(pts.iter().filter_map(|p| p.r))
        .fold(0.0, f64::max);
    let seq = e.seq.build(reach)?;
    let rows = par_map(&pts, |p| match e.direction {
        Direction::Depoissonize => depoissonize_row(seq.as_ref(), p, e.theorem),
        _ => inverse_row(seq.as_ref(), p, e.form),
    });
    let rows: Vec<Row> = rows.into_iter().collect::<Result<_, _>>()?;

    let slack = 1.0 + tol.unwrap_or(0.0);
    let failures = rows
        .iter()
        .filter(|row| matches!((row.actual_error, row.certified_bound), (Some(err), Some(b)) if err > b * slack))
        .map(|row| format!("bound violated at {}", row.label()))
        .collect();

    let mut file;
    let sink: &mut dyn Write = match &e.output {
        Some(path) => {
            file = std::fs::File::create(path).map_err(|err| {
                CliError::Failure(anyhow::Error::new(err).context(format!("creating {}", path.display())))
            })?;
            &mut file
        }
        None => out,
    };
    match e.format {
        crate::config::Format::Csv => write_csv(sink, &rows)?,
        crate::config::Format::Flat => write_flat(sink, &rows).map_err(io)?,
    }
    Ok(Outcome { failures })
}

pub fn verify(v: &VerifyArgs, tol: Option<f64>, out: &mut dyn Write) -> Result<Outcome, CliError> {
    if v.max_n < 8 {
        return Err(usage("--max-n must be at least 8"));
    }
    if let Some(t) = tol.filter(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(usage(format!("verify tolerance must be positive, got {t}")));
    }
    let cfg = VerifyConfig { max_order: v.max_order, max_n: v.max_n, tol };
    let checks = match v.suite {
        Suite::Identities => identity_suite(&cfg)?,
        Suite::Bounds => bound_suite(&cfg)?,
        Suite::All => all_suites(&cfg)?,
    };
    let mut failures = Vec::new();
    for c in &checks {
        writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail).map_err(io)?;
        if !c.passed {
            failures.push(c.name.clone());
        }
    }
    let suite = clap::ValueEnum::to_possible_value(&v.suite).expect("named").get_name().to_string();
    writeln!(
        out,
        "summary suite={suite} checks={} passed={} failed={}",
        checks.len(),
        checks.len() - failures.len(),
        failures.len()
    )
    .map_err(io)?;
    Ok(Outcome { failures })
}
