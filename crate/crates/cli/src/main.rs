use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use g2q::cluster::{match_msystem, run_columns, ColumnPlan, Mode};
use g2q::fm::{validate_character, Caps, QCharCache};
use g2q::minaff::{
    classify_dominant, irreducibility_witnesses, label_character, restrict_label, verify_equation_within, verify_m_system,
    EquationInstance, Family, ModuleLabel,
};
use g2q::{parse_monomial, Error, Monomial};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "g2q", version, about = "q-characters, the M-system and cluster mutations for quantum affine G2")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Maximal FM depth (number of A⁻¹ factors below the head).
    #[arg(long, env = "G2Q_MAX_DEPTH", default_value_t = 200, global = true)]
    max_depth: usize,
    /// Maximal number of terms of one q-character.
    #[arg(long, env = "G2Q_MAX_TERMS", default_value_t = 5_000_000, global = true)]
    max_terms: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// q-character of a simple module with a dominant highest monomial.
    Qchar(QcharArgs),
    /// Verify M-system, dual M-system or restricted m-system equations.
    Verify(VerifyArgs),
    /// Dominant monomials of both sides of an M-system equation.
    Classify(EquationArgs),
    /// Witnesses that the first right summand has no extra composition factors.
    Witnesses(EquationArgs),
    /// Replay column mutations on the truncated G2 seed.
    Mutate(MutateArgs),
    /// Restriction of a minimal affinization to U_q(g).
    Restrict(RestrictArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Module label, `T:k,l,s` or `Td:k,l,s`.
    #[arg(long)]
    label: Option<String>,
    /// Dominant monomial such as "1_{-7} 2_0".
    #[arg(long)]
    monomial: Option<String>,
}

#[derive(Args)]
struct QcharArgs {
    #[command(flatten)]
    source: Source,
    /// Only print the number of terms and the consistency checks.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct EquationArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    family: u8,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    l: u32,
    /// Spectral shift; defaults to the normalization of the worked examples.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<i32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum System {
    Msystem,
    Dual,
    Mrestrict,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    system: System,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    family: u8,
    #[arg(long, required_unless_present = "sweep")]
    k: Option<u32>,
    #[arg(long, required_unless_present = "sweep")]
    l: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<i32>,
    /// Every valid (k, l) with k ≤ KMAX and l ≤ LMAX.
    #[arg(long, num_args = 2, value_names = ["KMAX", "LMAX"], conflicts_with_all = ["k", "l"])]
    sweep: Option<Vec<u32>>,
    /// Compare only the cheapest weights, up to this many term pairs.
    #[arg(long)]
    budget: Option<f64>,
}

#[derive(Args)]
struct MutateArgs {
    /// Comma-separated columns, e.g. C1,C1,C2.
    #[arg(long)]
    plan: String,
    #[arg(long)]
    rows: u32,
    #[arg(long, default_value = "value")]
    mode: String,
}

#[derive(Args)]
struct RestrictArgs {
    #[arg(long)]
    label: String,
}

struct Outcome {
    pass: bool,
    json: Value,
    text: String,
}

fn family(n: u8) -> Family {
    if n == 1 {
        Family::Eq1
    } else {
        Family::Eq2
    }
}

fn instance(f: u8, k: u32, l: u32, s: Option<i32>, dual: bool) -> g2q::Result<EquationInstance> {
    let f = family(f);
    EquationInstance::new(f, k, l, s.unwrap_or_else(|| EquationInstance::example_shift(f, k, l)), dual)
}

fn head_of(source: &Source) -> g2q::Result<(Monomial, Option<ModuleLabel>)> {
    match (&source.label, &source.monomial) {
        (Some(l), _) => {
            let label: ModuleLabel = l.parse()?;
            Ok((label.highest_monomial(), Some(label)))
        }
        (None, Some(m)) => Ok((parse_monomial(m)?, None)),
        (None, None) => unreachable!("clap enforces one source"),
    }
}

fn qchar(args: &QcharArgs, cache: &QCharCache) -> g2q::Result<Outcome> {
    let (head, label) = head_of(&args.source)?;
    let chi = match label {
        Some(l) => label_character(l, cache)?,
        None => cache.get(&head)?,
    };
    let v = validate_character(&chi);
    let mut json = json!({
        "head": head,
        "terms": chi.len(),
        "validation": v,
    });
    let mut text = format!("head {head}\nterms {}\nchecks {}\n", chi.len(), if v.passed() { "ok" } else { "FAILED" });
    if !args.summary {
        json["character"] = chi.to_json();
        let mut terms = chi.sorted_terms();
        terms.sort_by(|a, b| b.0.term_order(a.0));
        for (m, c) in terms {
            text.push_str(&format!("{c} {m}\n"));
        }
    }
    Ok(Outcome { pass: v.passed(), json, text })
}

fn instances(args: &VerifyArgs) -> g2q::Result<Vec<EquationInstance>> {
    let dual = args.system == System::Dual;
    match &args.sweep {
        Some(bounds) => {
            let (kmax, lmax) = (bounds[0], bounds[1]);
            let mut out = Vec::new();
            for k in 1..=kmax {
                for l in 1..=lmax {
                    if let Ok(eq) = instance(args.family, k, l, args.s, dual) {
                        out.push(eq);
                    }
                }
            }
            if out.is_empty() {
                return Err(Error::InvalidParameters("the sweep contains no valid instance".into()));
            }
            Ok(out)
        }
        None => Ok(vec![instance(args.family, args.k.expect("clap"), args.l.expect("clap"), args.s, dual)?]),
    }
}

fn verify(args: &VerifyArgs, cache: &QCharCache) -> g2q::Result<Outcome> {
    let eqs = instances(args)?;
    let results: Vec<g2q::Result<(bool, Value, String)>> = eqs
        .par_iter()
        .map(|&eq| match args.system {
            System::Msystem | System::Dual => {
                let r = verify_equation_within(eq, cache, args.budget)?;
                let scope = if r.weights_skipped > 0 {
                    format!(" on {} of {} weights", r.weights_checked, r.weights_checked + r.weights_skipped)
                } else {
                    String::new()
                };
                let text = format!(
                    "{eq}: {}{scope} (lhs {} terms, rhs {} terms)",
                    if r.pass { "holds" } else { "FAILS" },
                    r.lhs_terms,
                    r.rhs_terms
                );
                Ok((r.pass, serde_json::to_value(&r)?, text))
            }
            System::Mrestrict => {
                let r = verify_m_system(eq, cache)?;
                let text = format!(
                    "{eq}: restricted identity {} (dimension {} = {})",
                    if r.pass { "holds" } else { "FAILS" },
                    r.lhs_dimension,
                    r.rhs_dimension
                );
                Ok((r.pass, serde_json::to_value(&r)?, text))
            }
        })
        .collect();
    let mut pass = true;
    let mut reports = Vec::new();
    let mut text = String::new();
    for r in results {
        let (p, v, t) = r?;
        pass &= p;
        reports.push(v);
        text.push_str(&t);
        text.push('\n');
    }
    let json = if reports.len() == 1 && args.sweep.is_none() { reports.remove(0) } else { json!({"pass": pass, "reports": reports}) };
    Ok(Outcome { pass, json, text })
}

fn classify(args: &EquationArgs, cache: &QCharCache) -> g2q::Result<Outcome> {
    let eq = instance(args.family, args.k, args.l, args.s, false)?;
    let r = classify_dominant(eq, cache)?;
    let list = |v: &[g2q::minaff::DominantTerm]| v.iter().map(|d| format!("{}*{}", d.coefficient, d.monomial)).collect::<Vec<_>>().join(", ");
    let mut text = format!("{eq}\n  lhs:  {}\n  rhs1: {}\n  rhs2: {}\n", list(&r.lhs), list(&r.rhs1), list(&r.rhs2));
    text.push_str(&format!("  closed forms {}\n", if r.matches { "match" } else { "DO NOT match" }));
    if eq.family == Family::Eq1 && !r.shift_free_form_agrees {
        text.push_str(&format!(
            "  note: the shift-free exponent form differs at this s{}\n",
            if r.shift_free_form_dominant { "" } else { " and is not dominant" }
        ));
    }
    Ok(Outcome { pass: r.matches, json: json!({"equation": eq, "dominant": r}), text })
}

fn witnesses(args: &EquationArgs, cache: &QCharCache) -> g2q::Result<Outcome> {
    let eq = instance(args.family, args.k, args.l, args.s, false)?;
    let ws = irreducibility_witnesses(eq, cache)?;
    let pass = ws.iter().all(|w| w.pass);
    let mut text = format!("{eq}: {} witnesses\n", ws.len());
    for w in &ws {
        text.push_str(&format!(
            "  r={} n={} rhs1 coefficient {} lhs coefficient {} reachable {} {}\n",
            w.r,
            w.monomial,
            w.rhs1_coefficient,
            w.lhs_coefficient,
            w.reachable,
            if w.pass { "ok" } else { "FAILED" }
        ));
    }
    Ok(Outcome { pass, json: json!({"equation": eq, "pass": pass, "witnesses": ws}), text })
}

fn mutate(args: &MutateArgs, cache: &QCharCache) -> g2q::Result<Outcome> {
    let mode: Mode = args.mode.parse()?;
    let plan = ColumnPlan::parse(&args.plan, args.rows)?;
    let (trace, _) = run_columns(&plan, mode, cache)?;
    let report = match_msystem(&trace);
    let pass = trace.pass() && report.bijection;
    let mut text = String::new();
    for r in &trace.records {
        text.push_str(&format!(
            "{:>3} {} sweep {} row {} at {}: {} via {} ({} terms){}\n",
            r.step,
            r.column,
            r.sweep,
            r.row,
            r.vertex,
            r.produced_label.map_or("?".to_string(), |l| l.to_string()),
            r.equation.map_or("no M-system equation".to_string(), |e| e.to_string()),
            r.terms,
            if r.pass() { "" } else { " FAILED" }
        ));
    }
    text.push_str(&format!(
        "{} relations, {} matched, bijection {}\n",
        report.relations,
        report.matched.len(),
        report.bijection
    ));
    Ok(Outcome { pass, json: json!({"pass": pass, "trace": trace, "match": report}), text })
}

fn restrict(args: &RestrictArgs, cache: &QCharCache) -> g2q::Result<Outcome> {
    let label: ModuleLabel = args.label.parse()?;
    let w = restrict_label(label, cache)?;
    let mut text = format!("{label}: dimension {}, {} weights\n", w.dimension(), w.len());
    for ((a, b), c) in w.iter() {
        text.push_str(&format!("  {c} [{a},{b}]\n"));
    }
    Ok(Outcome { pass: true, json: json!({"label": label, "dimension": w.dimension().to_string(), "weights": w}), text })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded(_) => EXIT_CAP,
        Error::Syntax { .. } | Error::InvalidParameters(_) | Error::UnknownNode(_) | Error::NotDominant(_) | Error::Json(_) => {
            EXIT_USAGE
        }
        _ => EXIT_FAIL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache = QCharCache::new(Caps { max_depth: cli.max_depth, max_terms: cli.max_terms });
    let outcome = match &cli.command {
        Command::Qchar(a) => qchar(a, &cache),
        Command::Verify(a) => verify(a, &cache),
        Command::Classify(a) => classify(a, &cache),
        Command::Witnesses(a) => witnesses(a, &cache),
        Command::Mutate(a) => mutate(a, &cache),
        Command::Restrict(a) => restrict(a, &cache),
    };
    match outcome {
        Ok(o) => {
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&o.json).expect("serializable") + "\n",
                Format::Text => o.text,
            };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
