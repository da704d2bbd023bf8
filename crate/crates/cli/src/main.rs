//! Command-line front end: orbit classification, parameter-disk
//! exploration, critical-radius tables, Newton polygons, witness
//! construction, and the built-in verification suites.
//!
//! Exit codes are part of the contract: `classify` exits 0 (bounded),
//! 1 (escaping), or 2 (unknown); `verify` exits 0 only when every check
//! passes; usage and parse errors always exit 64.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use padicmandel::{
    all_pass, classify_parameter, emit, explore, is_prime, known_radius, pcf_witness,
    render_report, run_suite, tree_stats, verify_pcf_witness, BallRadius, ClassifyOptions,
    EmitFormat, ExploreOptions, NewtonPolygon, PadicBall, PadicScalar, PcbVerdict,
    PolynomialFamily, SUITE_NAMES,
};

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "padicmandel",
    version,
    about = "Exact p-adic orbit classification and parameter-space exploration"
)]
struct Cli {
    /// Significant digits carried by truncated arithmetic.
    #[arg(
        long,
        global = true,
        env = "PADIC_PRECISION",
        default_value_t = 128,
        value_parser = clap::value_parser!(u32).range(1..)
    )]
    precision: u32,

    /// Iteration budget for orbit classification.
    #[arg(
        long,
        global = true,
        default_value_t = 200,
        value_parser = clap::value_parser!(u64).range(1..)
    )]
    max_iter: u64,

    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether one member of a parameterized family is
    /// post-critically bounded.
    Classify {
        /// Family name (currently: cubic2).
        #[arg(long, default_value = "cubic2")]
        family: String,
        /// Parameter literal: "a/b", "c+O(p^e)", or "p^v*u+O(p^e)".
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Color a parameter disk as a subdivision tree (black = all
    /// bounded, white = none bounded).
    Explore {
        /// Family name (currently: cubic2).
        #[arg(long, default_value = "cubic2")]
        family: String,
        /// Exact rational center of the parameter disk.
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        /// The disk has radius p^s for this integer s.
        #[arg(long, allow_negative_numbers = true)]
        radius_exp: i64,
        /// Levels of subdivision below the root.
        #[arg(long, default_value_t = 10)]
        depth: u32,
        /// Output format: ascii, dot, or json.
        #[arg(long, default_value = "ascii")]
        format: String,
    },
    /// Known values of the critical radius r(d, p).
    Radius {
        /// Degree for a single lookup.
        #[arg(long)]
        d: Option<u64>,
        /// Prime for a single lookup.
        #[arg(long)]
        p: Option<u64>,
        /// Print a table over degree and prime ranges instead.
        #[arg(long)]
        table: bool,
        /// Largest degree row in the table.
        #[arg(long, default_value_t = 12)]
        dmax: u64,
        /// Largest prime column in the table.
        #[arg(long, default_value_t = 11)]
        pmax: u64,
    },
    /// Construct the extremal post-critically finite witness for (d, p)
    /// and verify its defining identities symbolically.
    Witness {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        p: u64,
    },
    /// Newton polygon report for a polynomial given by its coefficients.
    Newton {
        /// Prime for the valuation.
        #[arg(long)]
        p: u64,
        /// Comma-separated coefficients c_0,...,c_d (constant term first),
        /// each in the scalar literal format.
        #[arg(allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Run a built-in verification suite and report each check.
    Verify {
        /// One of: newton, disk, pto1, radius, witness, bdry, all.
        #[arg(long)]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Some(n) = cli.threads {
        // A second build_global in-process is impossible here; ignore the
        // error to stay robust if a future embedding initializes rayon.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global();
    }

    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, String> {
    let opts = ClassifyOptions { max_iter: cli.max_iter, precision: cli.precision };
    match &cli.command {
        Command::Classify { family, t } => cmd_classify(family, t, opts),
        Command::Explore { family, center, radius_exp, depth, format } => {
            cmd_explore(family, center, *radius_exp, *depth, format, &opts)
        }
        Command::Radius { d, p, table, dmax, pmax } => cmd_radius(*d, *p, *table, *dmax, *pmax),
        Command::Witness { d, p } => cmd_witness(*d, *p),
        Command::Newton { p, coeffs } => cmd_newton(*p, coeffs),
        Command::Verify { suite } => cmd_verify(suite),
    }
}

fn family_by_name(name: &str) -> Result<PolynomialFamily, String> {
    PolynomialFamily::by_name(name)
        .ok_or_else(|| format!("unknown family '{name}' (available: cubic2)"))
}

fn cmd_classify(family: &str, t: &str, opts: ClassifyOptions) -> Result<u8, String> {
    let family = family_by_name(family)?;
    let t = PadicScalar::parse(t, family.prime()).map_err(|e| e.to_string())?;
    let answer = classify_parameter(&family, &t, &opts).map_err(|e| e.to_string())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&answer.to_json()).expect("report serialization")
    );
    Ok(match answer.verdict {
        PcbVerdict::Pcb => 0,
        PcbVerdict::NotPcb => 1,
        PcbVerdict::Unknown => 2,
    })
}

fn cmd_explore(
    family: &str,
    center: &str,
    radius_exp: i64,
    depth: u32,
    format: &str,
    opts: &ClassifyOptions,
) -> Result<u8, String> {
    let family = family_by_name(family)?;
    let format: EmitFormat = format.parse().map_err(|e: padicmandel::Error| e.to_string())?;
    let center = PadicScalar::parse(center, family.prime()).map_err(|e| e.to_string())?;
    if center.as_exact().is_none() {
        return Err("disk center must be an exact rational".to_string());
    }
    let root = PadicBall::new(center, BallRadius::integer(radius_exp));
    let explore_opts = ExploreOptions {
        precision: opts.precision,
        point_max_iter: opts.max_iter,
        ..ExploreOptions::default()
    };
    let tree = explore(&family, &root, depth, &explore_opts);
    print!("{}", emit(&tree, format));
    let stats = tree_stats(&tree);
    eprintln!(
        "{}",
        serde_json::to_string(&stats).expect("stats serialization")
    );
    Ok(0)
}

fn cmd_radius(
    d: Option<u64>,
    p: Option<u64>,
    table: bool,
    dmax: u64,
    pmax: u64,
) -> Result<u8, String> {
    if table {
        if dmax < 2 || pmax < 2 {
            return Err("the table needs --dmax >= 2 and --pmax >= 2".to_string());
        }
        print!("{}", radius_table(dmax, pmax));
        return Ok(0);
    }
    let (Some(d), Some(p)) = (d, p) else {
        return Err("provide --d and --p for a single value, or --table".to_string());
    };
    if d < 2 {
        return Err(format!("degree must be at least 2, got {d}"));
    }
    if !is_prime(p) {
        return Err(format!("{p} is not prime"));
    }
    let answer = known_radius(d, p);
    println!("r({d},{p}) = {answer}");
    println!(
        "{}",
        serde_json::to_string(&answer.to_json()).expect("radius serialization")
    );
    Ok(0)
}

fn radius_table(dmax: u64, pmax: u64) -> String {
    let primes: Vec<u64> = (2..=pmax).filter(|&p| is_prime(p)).collect();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec![String::from("d\\p")];
    header.extend(primes.iter().map(|p| format!("p={p}")));
    rows.push(header);
    for d in 2..=dmax {
        let mut row = vec![format!("d={d}")];
        for &p in &primes {
            let ans = known_radius(d, p);
            row.push(format!("{}[{}]", ans.cell(), ans.tag()));
        }
        rows.push(row);
    }
    let columns = rows[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{cell:<width$}", width = widths[j]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn cmd_witness(d: u64, p: u64) -> Result<u8, String> {
    if !is_prime(p) {
        return Err(format!("{p} is not prime"));
    }
    let witness = pcf_witness(d, p).map_err(|e| e.to_string())?;
    println!("witness for (d, p) = ({d}, {p}): f(z) = {}", witness.shape);
    println!("alpha^{} = {}", d - 1, witness.c);
    println!("v(alpha) = {}", witness.v_alpha);
    println!(
        "{}",
        serde_json::to_string(&witness.to_json()).expect("witness serialization")
    );
    let checks = verify_pcf_witness(d, p).map_err(|e| e.to_string())?;
    println!("f(alpha) = 0: {}", verdict_word(checks.f_of_alpha_is_zero));
    println!(
        "inner critical point maps to alpha: {}",
        verdict_word(checks.f_of_inner_critical_is_alpha)
    );
    println!("critical set is {{0, alpha, inner}}: {}", verdict_word(checks.critical_set_correct));
    Ok(if checks.all() { 0 } else { 1 })
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "verified"
    } else {
        "FAILED"
    }
}

fn cmd_newton(p: u64, coeffs: &str) -> Result<u8, String> {
    if !is_prime(p) {
        return Err(format!("{p} is not prime"));
    }
    let coeffs: Vec<PadicScalar> = coeffs
        .split(',')
        .map(|part| PadicScalar::parse(part, p))
        .collect::<padicmandel::Result<_>>()
        .map_err(|e| e.to_string())?;
    if coeffs.len() < 2 {
        return Err("need at least two coefficients (a constant and a leading term)".to_string());
    }
    let polygon = NewtonPolygon::from_coeffs(p, &coeffs).map_err(|e| e.to_string())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&polygon.to_json()).expect("polygon serialization")
    );
    Ok(0)
}

fn cmd_verify(suite: &str) -> Result<u8, String> {
    let names: Vec<&str> = if suite == "all" {
        SUITE_NAMES.to_vec()
    } else {
        vec![suite]
    };
    let mut ok = true;
    for name in names {
        let checks = run_suite(name).map_err(|e| e.to_string())?;
        print!("{}", render_report(name, &checks));
        ok &= all_pass(&checks);
    }
    Ok(if ok { 0 } else { 1 })
}
