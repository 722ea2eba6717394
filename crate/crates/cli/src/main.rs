//! `qmzv`: command-line front end for the exact q-zeta algebra.
//!
//! Exit codes: 0 on success, 1 when a verification subcommand finds a
//! failing case, 2 on usage or input errors.

mod config;
mod expr;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map as JsonMap, Value};

use config::{BetaSource, Config};
use qmzv_core::analysis::{
    find_relations, formal_limit, numeric_limit_check, reverify_relations,
    verify_derivation_formula, verify_product_formula, verify_tau_invariance, CheckReport,
};
use qmzv_core::bimould::{
    check_product_symmetry, check_swap_invariance, check_tau_invariance, load_mould, CoeffRing,
    MouldData, ProductSymmetry, SymmetryReport, TruncBimould,
};
use qmzv_core::eisenstein::{BetaTable, EisensteinContext, EisensteinParams};
use qmzv_core::qseries::QSeries;
use qmzv_core::quasishuffle::{engine, ProductId};
use qmzv_core::regmaps::{phi_sharp, phi_sharp_inv, reg, tau_b};
use qmzv_core::words::{parse_word, LinComb, Word};

#[derive(Parser)]
#[command(name = "qmzv", version, about = "Exact balanced multiple q-zeta computations")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Config file path (default: ./qmzv.toml when present).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProductKind {
    /// Plain shuffle: no letters merge.
    Shuffle,
    /// Stuffle on the one-index alphabet: indices add.
    StuffleY,
    /// Stuffle on the two-index alphabet: both indices add.
    StuffleYbi,
    /// Balanced quasi-shuffle on the b alphabet.
    Balanced,
}

impl From<ProductKind> for ProductId {
    fn from(k: ProductKind) -> ProductId {
        match k {
            ProductKind::Shuffle => ProductId::Shuffle,
            ProductKind::StuffleY => ProductId::StuffleY,
            ProductKind::StuffleYbi => ProductId::StuffleYbi,
            ProductKind::Balanced => ProductId::Balanced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    /// Two-index alphabet to b alphabet.
    Fwd,
    /// b alphabet to two-index alphabet.
    Bwd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Predicate {
    /// Stuffle product symmetry (block recursion, own Y variable).
    Symmetril,
    /// Balanced product symmetry (block recursion, merged Y variables).
    BSymmetril,
    /// Invariance under the swap substitution.
    Swap,
    /// Invariance under the tau substitution.
    Tau,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Tau,
    Product,
    Derivation,
    Symmetry,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Multiply two words in a quasi-shuffle algebra.
    Mul {
        #[arg(long, value_enum, default_value_t = ProductKind::Balanced)]
        product: ProductKind,
        u: String,
        v: String,
    },
    /// Rewrite leading divergent letters into convergent combinations.
    Reg { word: String },
    /// Apply the block-reversing involution to a b-alphabet word.
    Tau { word: String },
    /// Exponential alphabet change between the two-index and b alphabets.
    Phi {
        #[arg(long, value_enum, default_value_t = Dir::Fwd)]
        dir: Dir,
        word: String,
    },
    /// Evaluate a q-expansion oracle expression, e.g. "zq(2;t)".
    Qexp {
        #[arg(long)]
        order: Option<usize>,
        expr: String,
    },
    /// q-expansion of a balanced multiple q-zeta value, e.g. "2,0,3".
    Zq {
        #[arg(long)]
        order: Option<usize>,
        /// JSON file with a depth-two constant table to use instead of
        /// solving for one.
        #[arg(long)]
        beta: Option<PathBuf>,
        index: String,
    },
    /// Check a symmetry predicate on a JSON mould file.
    Check {
        #[arg(long, value_enum)]
        predicate: Predicate,
        /// Restrict the check to depths up to this bound.
        #[arg(long)]
        depth: Option<usize>,
        /// Per-variable degree cap for the compared monomials.
        #[arg(long)]
        degree: Option<u16>,
        file: PathBuf,
    },
    /// Run verification suites over a freshly built context.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Largest word weight the sweeps cover.
        #[arg(long, default_value_t = 6)]
        maxwt: u32,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        /// Per-variable degree cap for the symmetry suite.
        #[arg(long)]
        degree: Option<u16>,
    },
    /// Find exact linear relations among q-zeta values of one weight.
    Relations {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        maxdep: Option<u32>,
        #[arg(long)]
        order: Option<usize>,
        /// Skip the confirmation pass at doubled order.
        #[arg(long)]
        no_reverify: bool,
    },
    /// Formal scaled limit of a q-zeta value at q -> 1, with an optional
    /// floating-point extrapolation against a target value.
    Limit {
        word: String,
        #[arg(long)]
        numeric: bool,
        /// Reference value for the numeric extrapolation (required with
        /// --numeric; the comparison is advisory and never fails the run).
        #[arg(long)]
        target: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        #[arg(long)]
        order: Option<usize>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let cfg = Config::load(cli.config.as_deref())?;
    let fmt = cli.format;
    match cli.command {
        Command::Mul { product, u, v } => {
            let u = parse_word(&u)?;
            let v = parse_word(&v)?;
            let result = engine().product(product.into(), &u, &v)?;
            print_lincomb(&result, fmt);
            Ok(0)
        }
        Command::Reg { word } => {
            let w = parse_word(&word)?;
            print_lincomb(&reg(&w)?, fmt);
            Ok(0)
        }
        Command::Tau { word } => {
            let w = parse_word(&word)?;
            let image = tau_b(&w)?;
            match fmt {
                Format::Text => println!("{image}"),
                Format::Json => println!("{}", json!(image.to_string())),
            }
            Ok(0)
        }
        Command::Phi { dir, word } => {
            let w = parse_word(&word)?;
            let result = match dir {
                Dir::Fwd => phi_sharp(&w)?,
                Dir::Bwd => phi_sharp_inv(&w)?,
            };
            print_lincomb(&result, fmt);
            Ok(0)
        }
        Command::Qexp { order, expr } => {
            let order = order.unwrap_or(cfg.default_order);
            let series = expr::eval(&expr, order)?;
            print_series(&series, fmt);
            Ok(0)
        }
        Command::Zq { order, beta, index } => {
            let word = parse_zq_index(&index)?;
            let order = order.unwrap_or(cfg.default_order);
            let ctx = build_context(&word, order, beta.as_deref(), &cfg)?;
            let series = ctx.zeta_q_word(&word)?;
            print_series(&series, fmt);
            Ok(0)
        }
        Command::Check {
            predicate,
            depth,
            degree,
            file,
        } => {
            let mould = load_mould(&file)?;
            let report = match mould {
                MouldData::Rational(m) => check_mould(&m, predicate, depth, degree)?,
                MouldData::Series(m) => check_mould(&m, predicate, depth, degree)?,
            };
            let row = Row::from_symmetry(&report);
            print_rows(std::slice::from_ref(&row), fmt);
            Ok(if row.passed { 0 } else { 1 })
        }
        Command::Verify {
            suite,
            maxwt,
            order,
            depth,
            degree,
        } => {
            let order = order.unwrap_or(cfg.default_order);
            let depth = depth.unwrap_or(cfg.default_depth);
            let degree = degree.unwrap_or(cfg.default_degree);
            let rows = run_suites(suite, maxwt, order, depth, degree, &cfg)?;
            print_rows(&rows, fmt);
            Ok(if rows.iter().all(|r| r.passed) { 0 } else { 1 })
        }
        Command::Relations {
            weight,
            maxdep,
            order,
            no_reverify,
        } => {
            let order = order.unwrap_or(cfg.default_order);
            let maxdep = maxdep.unwrap_or(cfg.default_depth as u32);
            let depth = (maxdep as usize).clamp(1, 2);
            let params = EisensteinParams::new(depth, weight.max(2), order);
            let ctx = build_from_source(params, None, &cfg)?;
            let mut report = find_relations(&ctx, weight, maxdep)?;
            if !no_reverify && !report.relations.is_empty() {
                let params2 = EisensteinParams::new(depth, weight.max(2), 2 * order);
                let ctx2 = build_from_source(params2, None, &cfg)?;
                reverify_relations(&mut report, &ctx2)?;
            }
            match fmt {
                Format::Text => {
                    let names: Vec<String> =
                        report.basis.iter().map(|w| w.to_string()).collect();
                    println!("basis: {}", names.join(", "));
                    println!(
                        "relations (verified to q^{}): {}",
                        report.verified_order,
                        report.relations.len()
                    );
                    for rel in &report.relations {
                        println!("  {rel}");
                    }
                }
                Format::Json => {
                    let rels: Vec<Value> =
                        report.relations.iter().map(lincomb_json).collect();
                    println!(
                        "{}",
                        json!({
                            "weight": report.weight,
                            "depth_max": report.depth_max,
                            "verified_order": report.verified_order,
                            "basis": report.basis.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                            "relations": rels,
                        })
                    );
                }
            }
            Ok(0)
        }
        Command::Limit {
            word,
            numeric,
            target,
            tolerance,
            order,
        } => {
            let w = parse_zq_index(&word)?;
            let pairs = formal_limit(&w)?;
            let numeric_report = if numeric {
                let Some(target) = target else {
                    bail!("--numeric needs --target <value>");
                };
                let order = order.unwrap_or(cfg.default_order);
                let ctx = build_context(&w, order, None, &cfg)?;
                let series = ctx.zeta_q_word(&w)?;
                Some(numeric_limit_check(&series, w.weight(), target, tolerance))
            } else {
                None
            };
            match fmt {
                Format::Text => {
                    if pairs.is_empty() {
                        println!("0");
                    } else {
                        let terms: Vec<String> = pairs
                            .iter()
                            .map(|(x, y)| format!("zeta_sh({x}) * zeta_st({y})"))
                            .collect();
                        println!("{}", terms.join(" + "));
                    }
                    if let Some(n) = &numeric_report {
                        println!(
                            "advisory: extrapolated {:.6} vs target {:.6} (relative error {:.2e}, tolerance {:.2e}): {}",
                            n.extrapolated,
                            n.target,
                            n.relative_error,
                            tolerance,
                            if n.within_tolerance { "within tolerance" } else { "outside tolerance" }
                        );
                    }
                }
                Format::Json => {
                    let formal: Vec<Value> = pairs
                        .iter()
                        .map(|(x, y)| json!({"x": x.to_string(), "y": y.to_string()}))
                        .collect();
                    let mut top = JsonMap::new();
                    top.insert("formal".into(), Value::Array(formal));
                    if let Some(n) = &numeric_report {
                        top.insert(
                            "numeric".into(),
                            json!({
                                "target": n.target,
                                "extrapolated": n.extrapolated,
                                "relative_error": n.relative_error,
                                "within_tolerance": n.within_tolerance,
                            }),
                        );
                    }
                    println!("{}", Value::Object(top));
                }
            }
            Ok(0)
        }
    }
}

/// Accept `"2,0,3"`, `"z(2,0,3)"`, and the spelled-out `"b2 b0 b3"`.
fn parse_zq_index(s: &str) -> Result<Word> {
    let t = s.trim();
    if !t.is_empty()
        && t.chars()
            .all(|c| c.is_ascii_digit() || c == ',' || c.is_whitespace())
    {
        return Ok(parse_word(&format!("z({t})"))?);
    }
    Ok(parse_word(t)?)
}

/// Build a context sized for one word, honoring `--beta` and the config's
/// beta source.
fn build_context(
    word: &Word,
    order: usize,
    beta_flag: Option<&std::path::Path>,
    cfg: &Config,
) -> Result<EisensteinContext> {
    let depth = (word.depth().max(1)) as usize;
    let params = EisensteinParams::new(depth, word.weight().max(2), order);
    build_from_source(params, beta_flag, cfg)
}

fn build_from_source(
    params: EisensteinParams,
    beta_flag: Option<&std::path::Path>,
    cfg: &Config,
) -> Result<EisensteinContext> {
    let beta_path = beta_flag.or(match &cfg.beta_source {
        BetaSource::Builtin => None,
        BetaSource::Path(p) => Some(p.as_path()),
    });
    let ctx = match beta_path {
        None => EisensteinContext::build(params)?,
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading beta table {}", p.display()))?;
            let v: Value = serde_json::from_str(&text)
                .with_context(|| format!("parsing beta table {}", p.display()))?;
            let table = BetaTable::from_json(&v)?;
            EisensteinContext::build_with_beta(params, table)?
        }
    };
    Ok(ctx)
}

/// Common render row for verification outputs.
struct Row {
    name: String,
    passed: bool,
    cases: usize,
    failures: Vec<String>,
}

impl Row {
    fn from_symmetry(r: &SymmetryReport) -> Row {
        Row {
            name: r.name.clone(),
            passed: r.passed,
            cases: r.compared,
            failures: r.failures.clone(),
        }
    }

    fn from_check(r: &CheckReport) -> Row {
        Row {
            name: r.name.clone(),
            passed: r.passed,
            cases: r.cases,
            failures: r.failures.clone(),
        }
    }
}

fn check_mould<R: CoeffRing>(
    m: &TruncBimould<R>,
    predicate: Predicate,
    depth: Option<usize>,
    degree: Option<u16>,
) -> Result<SymmetryReport> {
    let truncated;
    let m = match depth {
        Some(d) if d < m.depth_bound() => {
            truncated = truncate_depth(m, d);
            &truncated
        }
        _ => m,
    };
    let report = match predicate {
        Predicate::Symmetril => check_product_symmetry(m, ProductSymmetry::Stuffle, degree)?,
        Predicate::BSymmetril => check_product_symmetry(m, ProductSymmetry::Balanced, degree)?,
        Predicate::Swap => check_swap_invariance(m, degree),
        Predicate::Tau => check_tau_invariance(m, degree),
    };
    Ok(report)
}

fn truncate_depth<R: CoeffRing>(m: &TruncBimould<R>, depth: usize) -> TruncBimould<R> {
    let mut out = TruncBimould::<R>::zero(depth, m.weight_bound());
    for d in 0..=depth {
        for (mono, c) in m.part(d).iter() {
            out.add_term(d, mono.clone(), c.clone());
        }
    }
    out
}

fn run_suites(
    suite: Suite,
    maxwt: u32,
    order: usize,
    depth: usize,
    degree: u16,
    cfg: &Config,
) -> Result<Vec<Row>> {
    // The derivation sweep needs weight room for its raised indices.
    let params = EisensteinParams::new(depth, maxwt + 2, order);
    let ctx = build_from_source(params, None, cfg)?;
    let mut rows = Vec::new();
    let want = |s: Suite| suite == Suite::All || suite == s;
    if want(Suite::Tau) {
        rows.push(Row::from_check(&verify_tau_invariance(&ctx, maxwt)?));
    }
    if want(Suite::Product) {
        rows.push(Row::from_check(&verify_product_formula(&ctx, maxwt, 1)?));
    }
    if want(Suite::Derivation) {
        rows.push(Row::from_check(&verify_derivation_formula(&ctx, maxwt)?));
    }
    if want(Suite::Symmetry) {
        let cap = Some(degree);
        let mut eis = check_product_symmetry(&ctx.eisenstein, ProductSymmetry::Stuffle, cap)?;
        eis.name = "stuffle symmetry of the Eisenstein bimould".into();
        rows.push(Row::from_symmetry(&eis));
        let mut sw = check_swap_invariance(&ctx.eisenstein, cap);
        sw.name = "swap invariance of the Eisenstein bimould".into();
        rows.push(Row::from_symmetry(&sw));
        let mut bal = check_product_symmetry(&ctx.balanced, ProductSymmetry::Balanced, cap)?;
        bal.name = "balanced symmetry of the q-zeta bimould".into();
        rows.push(Row::from_symmetry(&bal));
        let mut tau = check_tau_invariance(&ctx.balanced, cap);
        tau.name = "tau invariance of the q-zeta bimould".into();
        rows.push(Row::from_symmetry(&tau));
    }
    Ok(rows)
}

fn print_rows(rows: &[Row], fmt: Format) {
    match fmt {
        Format::Text => {
            for r in rows {
                if r.passed {
                    println!("[PASS] {} ({} cases)", r.name, r.cases);
                } else {
                    let sample = r.failures.iter().take(3).cloned().collect::<Vec<_>>();
                    println!(
                        "[FAIL] {} ({} cases): {}",
                        r.name,
                        r.cases,
                        sample.join("; ")
                    );
                }
            }
        }
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "passed": r.passed,
                        "cases": r.cases,
                        "failures": r.failures,
                    })
                })
                .collect();
            println!("{}", Value::Array(arr));
        }
    }
}

fn lincomb_json(lc: &LinComb) -> Value {
    let mut map = JsonMap::new();
    for (w, c) in lc.iter() {
        map.insert(w.to_string(), json!(c.to_string()));
    }
    Value::Object(map)
}

fn print_lincomb(lc: &LinComb, fmt: Format) {
    match fmt {
        Format::Text => println!("{lc}"),
        Format::Json => println!("{}", lincomb_json(lc)),
    }
}

fn print_series(s: &QSeries, fmt: Format) {
    match fmt {
        Format::Text => println!("{s}"),
        Format::Json => {
            let arr: Vec<Value> = s.coeffs().iter().map(|c| json!(c.to_string())).collect();
            println!("{}", Value::Array(arr));
        }
    }
}
