use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use depoisson::{parse_rational, Rational, Theorem};

use crate::spec::SequenceSpec;

/// Environment variable read when `--tol` is absent.
pub const TOL_ENV: &str = "DEPOISSON_TOL";

#[derive(Parser, Clone, Debug, PartialEq)]
#[command(name = "depoisson", version, about = "Depoissonization expansions with certified error bounds")]
pub struct RunConfig {
    /// Tolerance override. For `expand`, the relative slack allowed when
    /// comparing actual errors with certified bounds (at least -1, default
    /// 0); for `verify`, the floating tolerance of the numerical checks.
    #[arg(long, global = true, env = TOL_ENV)]
    pub tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, PartialEq)]
pub enum Command {
    /// Print coefficients or values of τ, ρ, Charlier, Stirling or b_{kn}.
    Polyval(PolyvalArgs),
    /// Run an expansion over a grid and emit one row per point.
    Expand(ExpandArgs),
    /// Run the identity and bound suites.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Tau,
    Rho,
    Charlier,
    Stirling,
    Rb,
}

#[derive(Args, Clone, Debug, PartialEq)]
pub struct PolyvalArgs {
    pub family: Family,
    /// m for tau and charlier, j for rho, `j s` for stirling, `k n` for rb.
    #[arg(required = true, allow_negative_numbers = true)]
    pub indices: Vec<i64>,
    /// Evaluate at this exact rational instead of printing coefficients.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<Exact>,
    /// Charlier parameter λ.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<Exact>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// A_n from derivatives of f.
    Depoissonize,
    /// f(n) or f(R) from differences of A_n.
    Inverse,
    /// f(R) from differences or derivatives of a real extension.
    Ramanujan,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Findiff,
    Derivative,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Flat,
}

#[derive(Args, Clone, Debug, PartialEq)]
pub struct ExpandArgs {
    pub direction: Direction,
    /// trie, geom:w/q[,..], expmix:w/c[,..] or file:PATH.
    #[arg(long)]
    pub seq: SequenceSpec,
    /// Indices n, e.g. `64`, `8,16,32` or `2..10`.
    #[arg(long)]
    pub n: Option<Grid>,
    /// Orders N, same syntax as `--n`.
    #[arg(long = "order", default_value = "0")]
    pub order: Grid,
    /// Centers R, comma separated.
    #[arg(long = "r", value_delimiter = ',')]
    pub r: Vec<f64>,
    /// Centers as multiples of n, comma separated.
    #[arg(long = "r-scale", value_delimiter = ',')]
    pub r_scale: Vec<f64>,
    /// Bound used by `depoissonize`: at-n, general-R, monotone-at-n or
    /// monotone-general-R. Defaults to at-n without centers and general-R
    /// with them.
    #[arg(long)]
    pub theorem: Option<Theorem>,
    /// Expansion form used by `ramanujan`.
    #[arg(long, value_enum, default_value_t = Form::Findiff)]
    pub form: Form,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write rows here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Bounds,
    All,
}

#[derive(Args, Clone, Debug, PartialEq)]
pub struct VerifyArgs {
    pub suite: Suite,
    #[arg(long, default_value_t = 12)]
    pub max_order: usize,
    /// Largest n of the bound grid, which runs over powers of two from 8.
    #[arg(long, default_value_t = 512)]
    pub max_n: usize,
}

/// An exact rational argument; prints as `p/q` or `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Exact(pub Rational);

impl FromStr for Exact {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_rational(s).map(Exact).ok_or_else(|| format!("`{s}` is not an exact rational"))
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Nonnegative integers given as a comma list of values and inclusive
/// ranges `a..b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid(pub Vec<usize>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a nonnegative integer"));
            match part.split_once("..") {
                Some((a, b)) => {
                    let (a, b) = (num(a)?, num(b)?);
                    if a > b {
                        return Err(format!("empty range `{part}`"));
                    }
                    out.extend(a..=b);
                }
                None => out.push(num(part)?),
            }
        }
        Ok(Grid(out))
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&s.join(","))
    }
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

impl RunConfig {
    /// Arguments (without the program name) that parse back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let mut a: Vec<String> = Vec::new();
        if let Some(t) = self.tol {
            a.push(format!("--tol={t}"));
        }
        match &self.command {
            Command::Polyval(p) => {
                a.push("polyval".into());
                a.push(value_name(&p.family));
                a.extend(p.indices.iter().map(i64::to_string));
                if let Some(x) = &p.x {
                    a.push(format!("--x={x}"));
                }
                if let Some(l) = &p.lambda {
                    a.push(format!("--lambda={l}"));
                }
            }
            Command::Expand(e) => {
                a.push("expand".into());
                a.push(value_name(&e.direction));
                a.push(format!("--seq={}", e.seq));
                if let Some(n) = &e.n {
                    a.push(format!("--n={n}"));
                }
                a.push(format!("--order={}", e.order));
                if !e.r.is_empty() {
                    a.push(format!("--r={}", join_f64(&e.r)));
                }
                if !e.r_scale.is_empty() {
                    a.push(format!("--r-scale={}", join_f64(&e.r_scale)));
                }
                if let Some(t) = e.theorem {
                    a.push(format!("--theorem={t}"));
                }
                a.push(format!("--form={}", value_name(&e.form)));
                a.push(format!("--format={}", value_name(&e.format)));
                if let Some(o) = &e.output {
                    a.push(format!("--output={}", o.display()));
                }
            }
            Command::Verify(v) => {
                a.push("verify".into());
                a.push(value_name(&v.suite));
                a.push(format!("--max-order={}", v.max_order));
                a.push(format!("--max-n={}", v.max_n));
            }
        }
        a
    }
}
