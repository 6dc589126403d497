//! Command-line front end for `cmcusps`.
//!
//! [`run`] parses arguments and returns the exit status together with the
//! text destined for stdout and stderr, so the binary is a thin wrapper and
//! tests can drive the whole surface in-process.
//!
//! Exit statuses: 0 success, 1 oracle disagreement, 2 invalid request,
//! 3 unsupported field (`D = -3` or `D = -4`).

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use cmcusps::arith::factorize;
use cmcusps::counts::{self, Term};
use cmcusps::oracles::{analytic_class_number, enumerate_walks, gamma0_orbit_oracle};
use cmcusps::volcano::{count_walks_dp, rk, rk_prime_closed, to_dot};
use cmcusps::{
    ClosedForm, CountReport, Error, ImaginaryQuadraticField, SplittingSymbol, TruncatedVolcano,
    WalkQuery,
};
use num_bigint::BigUint;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "cmcusps",
    version,
    about = "Exact orbit counts on P^1 for products of CM elliptic curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; defaults to `dot` for `volcano` and `text` otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Also run the brute-force oracle, where one exists, and compare.
    #[arg(long, global = true)]
    pub oracle: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orbit count N(E, E') for CM curves of conductors c and c'.
    Count {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
        #[arg(long)]
        cond: u64,
        #[arg(long)]
        cond2: u64,
    },
    /// Orbit count of GL_2(O_f) on P^1(K).
    Gl2 {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
        #[arg(long)]
        cond: u64,
    },
    /// Cusp count of Gamma_0(N), determinant -1 allowed.
    Gamma0 { n: u64 },
    /// r_K(a, b, N) with --disc, or r_K(p^a, p^b, p^c) with --prime/--symbol.
    Rk {
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["prime", "symbol"])]
        disc: Option<i64>,
        #[arg(long, requires = "symbol")]
        prime: Option<u64>,
        #[arg(long, allow_negative_numbers = true, requires = "prime")]
        symbol: Option<i64>,
        #[arg(long, value_enum, default_value_t = Method::Dp)]
        method: Method,
        a: u64,
        b: u64,
        n: u64,
    },
    /// Class number of a fundamental discriminant.
    ClassNumber {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
    },
    /// Export a truncated isogeny volcano.
    Volcano {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_negative_numbers = true)]
        symbol: i64,
        #[arg(long)]
        depth: u32,
    },
    /// Grid of N(E, E') over 1 <= c, c' <= max.
    Table {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
        #[arg(long)]
        max: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Closed,
    Dp,
    Enumerate,
}

/// Exit status plus captured output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl std::fmt::Display) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedField(_) => Outcome::fail(3, e),
            _ => Outcome::fail(2, e),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(&cli),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                Outcome::ok(e.to_string())
            }
            _ => {
                let rendered = e.to_string();
                let line = rendered.lines().next().unwrap_or("invalid arguments");
                Outcome::fail(2, line.trim_start_matches("error: "))
            }
        },
    }
}

pub fn dispatch(cli: &Cli) -> Outcome {
    let is_volcano = matches!(cli.command, Command::Volcano { .. });
    let format = cli.format.unwrap_or(if is_volcano {
        Format::Dot
    } else {
        Format::Text
    });
    if format == Format::Dot && !is_volcano {
        return Outcome::fail(2, "--format dot is only valid for the volcano command");
    }
    match execute(&cli.command, format, cli.oracle) {
        Ok(out) => out,
        Err(e) => e.into(),
    }
}

fn execute(command: &Command, format: Format, oracle: bool) -> Result<Outcome, Error> {
    match *command {
        Command::Count { disc, cond, cond2 } => {
            let field = ImaginaryQuadraticField::new(disc)?;
            Ok(render_report(
                &counts::count_cm_pair(&field, cond, cond2)?,
                format,
            ))
        }
        Command::Gl2 { disc, cond } => {
            let field = ImaginaryQuadraticField::new(disc)?;
            Ok(render_report(
                &counts::count_gl2_order(&field, cond)?,
                format,
            ))
        }
        Command::Gamma0 { n } => {
            let report = counts::count_gamma0_cusps(n)?;
            if oracle {
                let brute = BigUint::from(gamma0_orbit_oracle(n)?);
                Ok(render_comparison(report.total(), &brute, format))
            } else {
                Ok(render_report(&report, format))
            }
        }
        Command::Rk {
            disc,
            prime,
            symbol,
            method,
            a,
            b,
            n,
        } => rk_command(disc, prime, symbol, method, [a, b, n], format, oracle),
        Command::ClassNumber { disc } => {
            let field = ImaginaryQuadraticField::new(disc)?;
            let h = BigUint::from(field.class_number());
            if oracle {
                let terms = 200_000u64.max(200 * disc.unsigned_abs());
                let estimate = analytic_class_number(disc, terms)?.round() as u64;
                return Ok(render_comparison(&h, &BigUint::from(estimate), format));
            }
            Ok(Outcome::ok(match format {
                Format::Json => format!("{{\"discriminant\":{disc},\"class_number\":{h}}}\n"),
                Format::Csv => format!("discriminant,class_number\n{disc},{h}\n"),
                _ => format!("{h}\n"),
            }))
        }
        Command::Volcano {
            prime,
            symbol,
            depth,
        } => {
            let chi = SplittingSymbol::try_from(symbol)?;
            let g = TruncatedVolcano::build(prime, chi, depth)?;
            Ok(Outcome::ok(render_volcano(&g, format)))
        }
        Command::Table { disc, max } => {
            let field = ImaginaryQuadraticField::new(disc)?;
            let grid = counts::count_table(&field, max)?;
            Ok(Outcome::ok(render_table(disc, &grid, format)))
        }
    }
}

/// Per-prime queries `(p, chi, a_p, b_p, n_p)` for an rk request.
fn local_queries(
    disc: Option<i64>,
    prime: Option<u64>,
    symbol: Option<i64>,
    args: [u64; 3],
) -> Result<Vec<WalkQuery>, Error> {
    match (disc, prime, symbol) {
        (_, Some(p), Some(s)) => {
            if !cmcusps::arith::is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let chi = SplittingSymbol::try_from(s)?;
            let [a, b, c] = args.map(|x| x as u32);
            Ok(vec![WalkQuery::new(p, chi, a, b, c)])
        }
        (Some(d), _, _) => {
            let field = ImaginaryQuadraticField::new(d)?;
            let names = ["a", "b", "N"];
            let facts = args
                .iter()
                .zip(names)
                .map(|(&x, name)| factorize(x).map_err(|_| Error::Zero(name)))
                .collect::<Result<Vec<_>, _>>()?;
            let mut primes: Vec<u64> = facts.iter().flat_map(|f| f.primes()).collect();
            primes.sort_unstable();
            primes.dedup();
            primes
                .into_iter()
                .map(|p| {
                    Ok(WalkQuery::new(
                        p,
                        field.chi(p)?,
                        facts[0].exponent(p),
                        facts[1].exponent(p),
                        facts[2].exponent(p),
                    ))
                })
                .collect()
        }
        _ => unreachable!("checked by rk_command"),
    }
}

fn enumerate_local(q: &WalkQuery) -> Result<BigUint, Error> {
    let g = TruncatedVolcano::build(q.p, q.chi, q.a.max(q.b) + q.c)?;
    Ok(BigUint::from(enumerate_walks(&g, q.a, q.b, q.c)?))
}

const MAX_LOCAL_EXPONENT: u64 = 10_000;

fn rk_command(
    disc: Option<i64>,
    prime: Option<u64>,
    symbol: Option<i64>,
    method: Method,
    args: [u64; 3],
    format: Format,
    oracle: bool,
) -> Result<Outcome, Error> {
    if disc.is_none() && prime.is_none() {
        return Ok(Outcome::fail(
            2,
            "rk needs either --disc or --prime with --symbol",
        ));
    }
    if prime.is_some() && args.iter().any(|&x| x > MAX_LOCAL_EXPONENT) {
        return Ok(Outcome::fail(
            2,
            format!("prime-local levels and length must be at most {MAX_LOCAL_EXPONENT}"),
        ));
    }
    let queries = local_queries(disc, prime, symbol, args)?;
    let value = match method {
        Method::Dp => Some(match disc {
            Some(d) => rk(&ImaginaryQuadraticField::new(d)?, args[0], args[1], args[2])?,
            None => queries.iter().map(count_walks_dp).product(),
        }),
        Method::Enumerate => Some(
            queries
                .iter()
                .map(enumerate_local)
                .product::<Result<BigUint, Error>>()?,
        ),
        Method::Closed => queries
            .iter()
            .map(|q| match rk_prime_closed(q) {
                ClosedForm::Value(v) => Some(v),
                ClosedForm::NotCovered => None,
            })
            .product(),
    };
    let Some(value) = value else {
        return Ok(Outcome::ok(match format {
            Format::Json => "{\"value\":\"NOT_COVERED\"}\n".to_string(),
            Format::Csv => "value\nNOT_COVERED\n".to_string(),
            _ => "NOT_COVERED\n".to_string(),
        }));
    };
    if oracle {
        let brute = queries
            .iter()
            .map(enumerate_local)
            .product::<Result<BigUint, Error>>()?;
        return Ok(render_comparison(&value, &brute, format));
    }
    Ok(Outcome::ok(match format {
        Format::Json => format!("{{\"value\":{value}}}\n"),
        Format::Csv => format!("value\n{value}\n"),
        _ => format!("{value}\n"),
    }))
}

fn render_report<T: Term + Serialize>(report: &CountReport<T>, format: Format) -> Outcome {
    Outcome::ok(match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
        _ => format!("{}\n", report.total()),
    })
}

/// Formula value next to the oracle's; exit 1 when they differ.
fn render_comparison(value: &BigUint, oracle: &BigUint, format: Format) -> Outcome {
    let agree = value == oracle;
    let stdout = match format {
        Format::Json => format!("{{\"value\":{value},\"oracle\":{oracle},\"agree\":{agree}}}\n"),
        Format::Csv => format!("value,oracle,agree\n{value},{oracle},{agree}\n"),
        _ => format!("{value}\noracle: {oracle}\n"),
    };
    Outcome {
        code: if agree { 0 } else { 1 },
        stdout,
        stderr: if agree {
            String::new()
        } else {
            "oracle disagrees with formula\n".to_string()
        },
    }
}

fn render_volcano(g: &TruncatedVolcano, format: Format) -> String {
    let levels: Vec<String> = (0..=g.depth())
        .map(|k| g.level_size(k).to_string())
        .collect();
    match format {
        Format::Dot => to_dot(g),
        Format::Json => format!(
            "{{\"p\":{},\"chi\":{},\"depth\":{},\"levels\":[{}],\"edges\":{}}}\n",
            g.p(),
            g.chi(),
            g.depth(),
            levels.join(","),
            g.edges().len()
        ),
        Format::Csv => {
            let mut out = String::from("level,vertices\n");
            for (k, n) in levels.iter().enumerate() {
                let _ = writeln!(out, "{k},{n}");
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "p={} chi={} depth={} edges={}\n",
                g.p(),
                g.chi(),
                g.depth(),
                g.edges().len()
            );
            for (k, n) in levels.iter().enumerate() {
                let _ = writeln!(out, "level {k}: {n} vertices");
            }
            out
        }
    }
}

fn render_table(disc: i64, grid: &[Vec<BigUint>], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["c", "c_prime", "total"])
                .expect("write to Vec");
            for (i, row) in grid.iter().enumerate() {
                for (j, total) in row.iter().enumerate() {
                    w.write_record([(i + 1).to_string(), (j + 1).to_string(), total.to_string()])
                        .expect("write to Vec");
                }
            }
            String::from_utf8(w.into_inner().expect("flush to Vec")).expect("ascii")
        }
        Format::Json => {
            let rows: Vec<String> = grid
                .iter()
                .map(|row| {
                    format!(
                        "[{}]",
                        row.iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                })
                .collect();
            format!(
                "{{\"discriminant\":{disc},\"max\":{},\"totals\":[{}]}}\n",
                grid.len(),
                rows.join(",")
            )
        }
        _ => {
            let cells: Vec<Vec<String>> = grid
                .iter()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect();
            let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
            let mut out = String::new();
            for row in cells {
                let line: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
            out
        }
    }
}
