//! Command-line front end. Every subcommand is a thin adapter over the library.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{parse_rational, RationalFunction};
use crate::hilbert::{assemble_series, degree_contribution, orbifold_contribution, split_series, DeltaVector};
use crate::quiver::{delta_lattice, euler_phi, residual_system, ResidualQuiver};
use crate::reconstruct::{
    analyze_series_with, count_bound_with, degree_bounds, enumerate_reduced_baskets_with, fmt_rational,
    BoundsJson, DegreeBoundsConfig, EnumerationConfig, ReportJson, DEFAULT_MAX_MU,
};
use crate::singularity::{Basket, Classification, Singularity};

#[derive(Parser, Debug)]
#[command(name = "orbibasket", version, about = "Baskets of cyclic quotient singularities on orbifold del Pezzo surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Append the first N series coefficients.
    #[arg(long, global = true, value_name = "N")]
    pub terms: Option<usize>,
    /// Print δ-vectors with their leading and trailing zeros.
    #[arg(long, global = true)]
    pub full_delta: bool,
    /// Worker threads for enumeration.
    #[arg(long, global = true, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Lower bound for the Euler number of the smooth locus.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub nmin: u64,
    /// Largest reduced basket the enumeration will build.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_MAX_MU)]
    pub max_mu: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// δ-vector, Q and degree contribution of one singularity.
    Contrib { singularity: String },
    /// Hilbert series of a basket at a given degree.
    Series {
        basket: String,
        #[arg(allow_hyphen_values = true)]
        k2: String,
    },
    /// Residue and T-singularity pieces.
    Residue { singularity: String },
    /// Residual quiver at a local index.
    Quiver { ell: u64 },
    /// Rank of the δ-lattice against φ(ℓ)/2.
    DeltaRank { ell: u64 },
    /// Reduced baskets with a given δ-vector sum.
    Reduce {
        ell: u64,
        delta: String,
    },
    /// Feasibility of a Hilbert series.
    Analyze { series: String },
    /// Degree bounds for a residual basket.
    Bounds { basket: String },
    /// Bound on the number of singularities; parts are `ell:(d1,...)`.
    CountBound {
        ell_star: u64,
        #[arg(required = true)]
        parts: Vec<String>,
    },
    /// Lattice-rank sweep and the local index 5 examples.
    Selftest {
        #[arg(long, default_value_t = 34)]
        max_ell: u64,
    },
}

/// Parses `argv`, runs the command, and returns the exit status.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = if e.use_stderr() { e.render().to_string() } else { e.to_string() };
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, out).and_then(|code| out.flush().map(|_| code).map_err(io)) {
        Ok(code) => code,
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: output: {e}");
            1
        }
    }
}

fn config(cli: &Cli) -> EnumerationConfig {
    EnumerationConfig {
        max_mu: cli.max_mu,
        jobs: cli.jobs.map(|j| j as usize),
        ..Default::default()
    }
}

enum Failure {
    Domain(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn io(e: std::io::Error) -> Failure {
    Failure::Io(e)
}

fn json_line<T: Serialize>(out: &mut dyn Write, v: &T) -> Out<()> {
    let s = serde_json::to_string(v).map_err(|e| io(e.into()))?;
    writeln!(out, "{s}").map_err(io)
}

/// `(d1,...,dk)` or `d1,...,dk`, abbreviated or full.
pub fn parse_delta(ell: u64, s: &str) -> Result<DeltaVector> {
    let t = s.trim();
    let t = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(t);
    let mut v = Vec::new();
    if !t.trim().is_empty() {
        for x in t.split(',') {
            v.push(x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad delta entry {x:?}")))?);
        }
    }
    let abbrev = ell.saturating_sub(2) as usize;
    if ell >= 2 && v.len() == ell as usize && v.len() != abbrev {
        if v[0] != 0 || v[v.len() - 1] != 0 {
            return Err(Error::Parse(format!("full delta-vector {s:?} must start and end with 0")));
        }
        v = v[1..v.len() - 1].to_vec();
    }
    DeltaVector::new(ell, v)
}

fn rational(s: &str) -> Result<crate::exactalg::Rational> {
    parse_rational(s).ok_or_else(|| Error::Parse(format!("expected p/q, got {s:?}")))
}

fn basket_str(b: &Basket) -> String {
    if b.is_empty() {
        "{}".to_string()
    } else {
        b.to_string()
    }
}

fn class_name(c: &Classification) -> String {
    match c {
        Classification::Smooth => "smooth".into(),
        Classification::TSingularity { d, n, c } => format!("T-singularity d={d} n={n} c={c}"),
        Classification::Residual => "residual".into(),
        Classification::ResidualIndecomposable => "residual indecomposable".into(),
        Classification::Composite => "composite".into(),
    }
}

fn terms(out: &mut dyn Write, h: &RationalFunction, n: Option<usize>) -> Out<()> {
    if let Some(n) = n {
        let c = h.series(n).ok_or_else(|| Error::NotASurfaceSeries("no power series at t = 0".into()))?;
        let c: Vec<String> = c.iter().map(fmt_rational).collect();
        writeln!(out, "terms {}", c.join(", ")).map_err(io)?;
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ContribJson {
    singularity: String,
    classification: String,
    local_index: u64,
    delta: Vec<i64>,
    q: String,
    degree: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct QuiverJson {
    local_index: u64,
    vertices: Vec<String>,
    successor: Vec<usize>,
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Out<i32> {
    let full = cli.full_delta;
    match &cli.command {
        Command::Contrib { singularity } => {
            let s: Singularity = singularity.parse()?;
            let d = orbifold_contribution(&s);
            let a = degree_contribution(&s);
            if cli.json {
                return json_line(out, &ContribJson {
                    singularity: s.to_string(),
                    classification: class_name(&s.classify()),
                    local_index: s.local_index(),
                    delta: if full { d.full() } else { d.entries().to_vec() },
                    q: d.q_string(),
                    degree: fmt_rational(&a),
                })
                .map(|_| 0);
            }
            writeln!(out, "singularity {s}").map_err(io)?;
            writeln!(out, "class {}", class_name(&s.classify())).map_err(io)?;
            writeln!(out, "local index {}", s.local_index()).map_err(io)?;
            writeln!(out, "delta {}", d.format(full)).map_err(io)?;
            writeln!(out, "Q {}", d.q_string()).map_err(io)?;
            writeln!(out, "A {}", fmt_rational(&a)).map_err(io)?;
            terms(out, &d.q_series(), cli.terms)?;
        }
        Command::Series { basket, k2 } => {
            let b: Basket = basket.parse()?;
            let k2 = rational(k2)?;
            let h = assemble_series(&b, &k2);
            if cli.json {
                return json_line(out, &ReportJson {
                    k_squared: Some(fmt_rational(&h.k2)),
                    parts: Some(h.parts.iter().map(|(l, d)| (l.to_string(), d.entries().to_vec())).collect()),
                    ..Default::default()
                })
                .map(|_| 0);
            }
            writeln!(out, "H {}", h.series).map_err(io)?;
            writeln!(out, "K^2 {}", fmt_rational(&h.k2)).map_err(io)?;
            for (l, d) in &h.parts {
                writeln!(out, "part {l} {}", d.format(full)).map_err(io)?;
            }
            terms(out, &h.series, cli.terms)?;
        }
        Command::Residue { singularity } => {
            let s: Singularity = singularity.parse()?;
            let r = s.residue();
            let res = r.residue.map(|x| x.to_string()).unwrap_or_else(|| "smooth".into());
            writeln!(out, "residue {res}").map_err(io)?;
            for t in &r.t_parts {
                writeln!(out, "T {t}").map_err(io)?;
            }
        }
        Command::Quiver { ell } => {
            let q = ResidualQuiver::new(*ell)?;
            let names: Vec<String> = q.vertices().iter().map(|v| v.to_string()).collect();
            if cli.json {
                return json_line(out, &QuiverJson {
                    local_index: *ell,
                    vertices: names,
                    successor: (0..q.len()).map(|i| q.successor(i)).collect(),
                })
                .map(|_| 0);
            }
            writeln!(out, "{} ->", names.join(" -> ")).map_err(io)?;
        }
        Command::DeltaRank { ell } => {
            let rank = delta_lattice(*ell).rank as u64;
            let half = euler_phi(*ell) / 2;
            let ok = rank == half;
            writeln!(out, "rank={rank} phi/2={half} {}", if ok { "OK" } else { "MISMATCH" }).map_err(io)?;
            return Ok(if ok { 0 } else { 1 });
        }
        Command::Reduce { ell, delta } => {
            let d = parse_delta(*ell, delta)?;
            let body = enumerate_reduced_baskets_with(*ell, &d, &config(cli))?;
            if cli.json {
                return json_line(out, &body.json()).map(|_| 0);
            }
            if !body.realizable {
                writeln!(out, "NOT_REALIZABLE").map_err(io)?;
                return Ok(0);
            }
            writeln!(out, "{} reduced baskets", body.baskets.len()).map_err(io)?;
            let sys = if *ell >= 3 { Some(residual_system(*ell)?) } else { None };
            for (b, rk) in body.baskets.iter().zip(&body.rk2) {
                let coords = match &sys {
                    Some(sys) => match sys.coordinates(b)? {
                        Some(x) => format!("({}) ", x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")),
                        None => String::new(),
                    },
                    None => String::new(),
                };
                writeln!(out, "{coords}{} RK^2={}", basket_str(b), fmt_rational(rk)).map_err(io)?;
            }
        }
        Command::Analyze { series } => {
            let h = RationalFunction::parse(series)?;
            let rep = analyze_series_with(&h, &config(cli))?;
            if cli.json {
                return json_line(out, &rep.json()).map(|_| 0);
            }
            writeln!(out, "K^2 {}", fmt_rational(&rep.k2)).map_err(io)?;
            for (l, d) in &rep.parts {
                writeln!(out, "part {l} {}", d.format(full)).map_err(io)?;
            }
            for c in &rep.choices {
                writeln!(
                    out,
                    "choice {} RK^2={} IK^2={} {}",
                    basket_str(&c.basket),
                    fmt_rational(&c.rk2),
                    fmt_rational(&c.ik2),
                    c.verdict
                )
                .map_err(io)?;
            }
            if rep.toric_impossible {
                writeln!(out, "toric impossible").map_err(io)?;
            }
            writeln!(out, "verdict {}", rep.verdict).map_err(io)?;
            terms(out, &h, cli.terms)?;
        }
        Command::Bounds { basket } => {
            let b: Basket = basket.parse()?;
            let (m, big_m) = degree_bounds(&b, DegreeBoundsConfig { n_min: cli.nmin })?;
            if cli.json {
                return json_line(out, &ReportJson {
                    bounds: Some(BoundsJson { m: fmt_rational(&m), big_m: fmt_rational(&big_m) }),
                    ..Default::default()
                })
                .map(|_| 0);
            }
            writeln!(out, "m={} M={}", fmt_rational(&m), fmt_rational(&big_m)).map_err(io)?;
        }
        Command::CountBound { ell_star, parts } => {
            let mut q = BTreeMap::new();
            for p in parts {
                let (l, d) = p
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("expected ell:(d1,...), got {p:?}")))?;
                let l: u64 = l.trim().parse().map_err(|_| Error::Parse(format!("bad local index {l:?}")))?;
                let d = parse_delta(l, d)?;
                if q.insert(l, d).is_some() {
                    return Err(Error::Parse(format!("local index {l} given twice")).into());
                }
            }
            let n = count_bound_with(&q, *ell_star, &config(cli))?;
            writeln!(out, "N={n}").map_err(io)?;
        }
        Command::Selftest { max_ell } => return selftest(*max_ell, &config(cli), out),
    }
    Ok(0)
}

fn check(out: &mut dyn Write, ok: bool, what: &str) -> Out<bool> {
    writeln!(out, "{} {what}", if ok { "PASS" } else { "FAIL" }).map_err(io)?;
    Ok(ok)
}

fn selftest(max_ell: u64, cfg: &EnumerationConfig, out: &mut dyn Write) -> Out<i32> {
    let mut all = true;
    let mut bad = Vec::new();
    for ell in 3..=max_ell {
        if delta_lattice(ell).rank as u64 != euler_phi(ell) / 2 {
            bad.push(ell);
        }
    }
    all &= check(out, bad.is_empty(), &format!("lattice rank = phi/2 for 3 <= ell <= {max_ell} {bad:?}"))?;

    let sys = residual_system(5)?;
    let got: Vec<String> = (0..sys.dim()).map(|i| sys.positive(i).delta.to_string()).collect();
    let want = ["(1,-2,1)", "(2,1,2)", "(3,4,3)", "(1,3,1)"];
    all &= check(out, got == want, &format!("ell=5 positive residual deltas {}", got.join(" ")))?;

    let q = ResidualQuiver::new(5)?;
    let names: Vec<String> = q.vertices().iter().map(|v| v.to_string()).collect();
    all &= check(
        out,
        names == ["1/5(1,1)", "1/5(1,2)", "1/10(1,1)", "1/5(1,3)"],
        &format!("ell=5 quiver {}", names.join(" -> ")),
    )?;

    let body = enumerate_reduced_baskets_with(5, &DeltaVector::new(5, vec![2, 1, 2])?, cfg)?;
    let mut coords: Vec<Vec<i64>> = body.vectors.iter().map(|v| v.coords.clone()).collect();
    coords.sort();
    let mut want = vec![vec![1, 0, 0, 1], vec![1, -1, 1, 0], vec![0, 0, 1, -1], vec![0, 1, 0, 0]];
    want.sort();
    let rk_ok = body.rk2.iter().all(|r| fmt_rational(r) == "-8/5");
    all &= check(out, coords == want && rk_ok, &format!("ell=5 delta (2,1,2): {} baskets, RK^2 = -8/5", coords.len()))?;

    let body = enumerate_reduced_baskets_with(5, &DeltaVector::new(5, vec![8, -1, 8])?, cfg)?;
    let n = body.baskets.len();
    all &= check(out, n == 18, &format!("ell=5 delta (8,-1,8): {n} baskets (expected 18)"))?;

    let mut parts = BTreeMap::new();
    parts.insert(5, DeltaVector::new(5, vec![2, 1, 2])?);
    let n = count_bound_with(&parts, 5, cfg)?;
    all &= check(out, n == 82, &format!("count bound at ell*=5: {n} (expected 82)"))?;

    let h = RationalFunction::parse("(1+11*t+t^2)/(1-t)^3")?;
    let rep = analyze_series_with(&h, cfg)?;
    all &= check(out, rep.verdict.to_string() == "NO_SURFACE", &format!("K^2 = 13 smooth series: {}", rep.verdict))?;

    let h = assemble_series(&"1/5(1,1), 1/5(1,3)".parse()?, &rational("-8/5")?).series;
    let back = split_series(&h)?;
    all &= check(out, back.k2 == rational("-8/5")?, "series round trip")?;

    Ok(if all { 0 } else { 1 })
}
