//! The `workbench` command line.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 I/O or
//! parse error. `WORKBENCH_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::json;
use workbench_core::congruence::{
    congruence_log, gen_sl, gen_sp, in_sp_lie, is_level, is_symplectic, lie_rank_certificate, sl_lie_rank, sl_lift_check,
    sl_level_generators, sp_level_generators, SymplecticContext,
};
use workbench_core::fimod::{self, builtin, generated_in_degree, validate, BuiltinKind, FIModulePresentation};
use workbench_core::johnson::{
    certificate_lower_bound, certificate_symplectic, ia_commutator_sampler, ia_weight, ia_weight_zassenhaus, make_generator,
    tau_hat, tau_with_cap, GeneratorSpec,
};
use workbench_core::magnus::{expand, is_prime, lcs_weight, zassenhaus_weight};
use workbench_core::words::{Endomorphism, FreeWord};

use crate::error::CliError;
use crate::fiformat::{self, subset_key};
use crate::report::Report;
use crate::suite::{cell_rng, run_suite, stab_table, SuiteName, SuiteParams};
use crate::text::{parse_endomorphism, parse_word};

#[derive(Parser, Debug)]
#[command(name = "workbench", version, about = "Exact free-group, Johnson, congruence and FI-module computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report as JSON to this path instead of text on stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Record wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Free-group word and endomorphism arithmetic.
    Words(WordsArgs),
    /// Truncated Magnus expansions and filtration weights.
    Magnus(MagnusArgs),
    /// Johnson homomorphisms and lower-bound certificates.
    Johnson(JohnsonArgs),
    /// Level-p generators of SL_n(Z) and Sp_2g(Z).
    Congruence(CongruenceArgs),
    /// FI-module validation and central stabilization.
    Fimod(FimodArgs),
    /// Verification suites.
    Suite(SuiteArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum WordsAction {
    Reduce,
    Multiply,
    Invert,
    Commutator,
    Apply,
    Abelianize,
}

#[derive(Args, Debug)]
struct EndoSource {
    /// Endomorphism file (`x<k> -> <word>` lines).
    #[arg(long, value_name = "PATH")]
    endo: Option<PathBuf>,
    /// Generator such as `c(1,2)`, `m(1,2,3)`, `E(1,2,5)`, `B(1,3)`, `N1`;
    /// repeated generators are composed left to right.
    #[arg(long = "gen", value_name = "SPEC")]
    gens: Vec<String>,
    /// Rank of the free group.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct WordsArgs {
    action: WordsAction,
    /// Word in the text grammar, e.g. `x2^-1 x1 x2`; repeat for binary actions.
    #[arg(long = "word", value_name = "WORD", allow_hyphen_values = true)]
    words: Vec<String>,
    #[command(flatten)]
    endo: EndoSource,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MagnusAction {
    Expand,
    Weight,
    Zweight,
}

#[derive(Args, Debug)]
struct MagnusArgs {
    action: MagnusAction,
    #[arg(long, allow_hyphen_values = true)]
    word: String,
    #[arg(long)]
    n: Option<usize>,
    /// Degree cap of the truncation.
    #[arg(long, default_value_t = 4)]
    cap: usize,
    /// Largest accepted cap.
    #[arg(long, default_value_t = 8)]
    max_cap: usize,
    /// Prime for `zweight`, or coefficients mod p for `expand`.
    #[arg(long)]
    p: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum JohnsonAction {
    Tau,
    Tauhat,
    Weight,
    Certify,
    Sample,
}

#[derive(Args, Debug)]
struct JohnsonArgs {
    action: JohnsonAction,
    #[command(flatten)]
    endo: EndoSource,
    #[arg(long)]
    k: Option<usize>,
    /// Zassenhaus weight mod p for `weight`.
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    cap: Option<usize>,
    /// Genus for the symplectic certificate.
    #[arg(long)]
    g: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Group {
    Sl,
    Sp,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CongruenceAction {
    Gens,
    Check,
    Rank,
}

#[derive(Args, Debug)]
struct CongruenceArgs {
    action: CongruenceAction,
    #[arg(long, value_enum, default_value_t = Group::Sp)]
    group: Group,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    p: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FimodAction {
    Validate,
    Stab,
    Gendeg,
    Stabstart,
    Export,
}

#[derive(Args, Debug)]
struct FimodArgs {
    action: FimodAction,
    /// FI-module JSON document.
    #[arg(long = "in", value_name = "PATH", conflicts_with = "builtin")]
    input: Option<PathBuf>,
    /// `constant`, `standard`, `exterior(m)` or `tensor_wedge(k)`.
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long = "N", value_name = "N")]
    big_n: Option<usize>,
    /// Destination of `export`.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Lowerbound,
    Levelp,
    Fistab,
    All,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    name: SuiteArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    kmax: usize,
    #[arg(long, default_value_t = 4)]
    gmax: usize,
    /// Largest rank for the SL lift checks.
    #[arg(long, default_value_t = 5)]
    nmax: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    primes: Vec<u64>,
    #[arg(long = "N", value_name = "N", default_value_t = 6)]
    big_n: usize,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("missing --{}", flag)))
}

fn prime(p: u64) -> Result<u64, CliError> {
    if is_prime(p) {
        Ok(p)
    } else {
        Err(usage(format!("{} is not prime", p)))
    }
}

fn load_endo(src: &EndoSource) -> Result<Endomorphism, CliError> {
    match (&src.endo, src.gens.is_empty()) {
        (Some(path), true) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e)))?;
            let e = parse_endomorphism(&text)?;
            if let Some(n) = src.n {
                if n != e.rank() {
                    return Err(usage(format!("--n {} does not match the file's rank {}", n, e.rank())));
                }
            }
            Ok(e)
        }
        (None, false) => {
            let n = need(src.n, "n")?;
            let mut acc = Endomorphism::identity(n);
            for g in &src.gens {
                let spec: GeneratorSpec = g.parse().map_err(|e: workbench_core::Error| usage(e.to_string()))?;
                acc = acc.compose(&make_generator(spec, n).map_err(|e| usage(e.to_string()))?)?;
            }
            Ok(acc)
        }
        (Some(_), false) => Err(usage("give either --endo or --gen, not both")),
        (None, true) => Err(usage("missing --endo or --gen")),
    }
}

fn words_cmd(a: &WordsArgs) -> Result<Report, CliError> {
    let mut r = Report::new(format!("words {:?}", a.action).to_lowercase());
    let ws: Vec<FreeWord> = a.words.iter().map(|w| parse_word(w, a.endo.n)).collect::<Result<_, _>>()?;
    let arity = |k: usize| -> Result<(), CliError> {
        if ws.len() == k {
            Ok(())
        } else {
            Err(usage(format!("expected {} --word value(s), got {}", k, ws.len())))
        }
    };
    for (i, w) in a.words.iter().enumerate() {
        r.param(&format!("word{}", i + 1), w.as_str());
    }
    match a.action {
        WordsAction::Reduce => {
            arity(1)?;
            r.line(ws[0].to_string());
        }
        WordsAction::Invert => {
            arity(1)?;
            r.line(ws[0].invert().to_string());
        }
        WordsAction::Multiply | WordsAction::Commutator => {
            arity(2)?;
            let (u, v) = lift_pair(&ws[0], &ws[1])?;
            let out = match a.action {
                WordsAction::Multiply => u.multiply(&v)?,
                _ => u.commutator(&v)?,
            };
            r.line(out.to_string());
        }
        WordsAction::Apply => {
            arity(1)?;
            let e = load_endo(&a.endo)?;
            let w = parse_word(&a.words[0], Some(e.rank()))?;
            r.line(e.apply(&w)?.to_string());
        }
        WordsAction::Abelianize => {
            arity(0)?;
            let e = load_endo(&a.endo)?;
            r.lines(&e.abelianize().to_string());
            r.param("automorphism", e.is_automorphism());
        }
    }
    Ok(r)
}

/// Re-reads both words at their common rank.
fn lift_pair(u: &FreeWord, v: &FreeWord) -> Result<(FreeWord, FreeWord), CliError> {
    let n = u.rank().max(v.rank());
    Ok((parse_word(&u.to_string(), Some(n))?, parse_word(&v.to_string(), Some(n))?))
}

fn magnus_cmd(a: &MagnusArgs) -> Result<Report, CliError> {
    if a.cap == 0 || a.cap > a.max_cap {
        return Err(usage(format!("--cap must be in 1..={} (raise with --max-cap)", a.max_cap)));
    }
    let w = parse_word(&a.word, a.n)?;
    let mut r = Report::new(format!("magnus {:?}", a.action).to_lowercase());
    r.param("word", a.word.as_str()).param("cap", a.cap);
    match a.action {
        MagnusAction::Expand => {
            let p = match a.p {
                Some(p) => prime(p)?,
                None => 0,
            };
            r.param("modulus", p);
            r.lines(&expand(&w, a.cap, p)?.to_string());
        }
        MagnusAction::Weight => {
            r.line(format!("weight: {}", lcs_weight(&w, a.cap)?));
        }
        MagnusAction::Zweight => {
            let p = prime(need(a.p, "p")?)?;
            r.param("p", p);
            r.line(format!("weight: {}", zassenhaus_weight(&w, p, a.cap)?));
        }
    }
    Ok(r)
}

fn johnson_cmd(a: &JohnsonArgs) -> Result<Report, CliError> {
    let mut r = Report::new(format!("johnson {:?}", a.action).to_lowercase());
    match a.action {
        JohnsonAction::Tau | JohnsonAction::Tauhat => {
            let phi = load_endo(&a.endo)?;
            let k = need(a.k, "k")?;
            let cap = a.cap.unwrap_or(k + 2);
            r.param("n", phi.rank()).param("k", k).param("cap", cap).param("lie_basis", "lyndon");
            let t = tau_with_cap(&phi, k, cap)?;
            if matches!(a.action, JohnsonAction::Tau) {
                r.lines(&t.to_string());
            } else {
                for (i, h) in tau_hat(&phi, k)?.iter().enumerate() {
                    r.line(format!("x{}:", i + 1));
                    r.lines(&h.to_string());
                }
            }
        }
        JohnsonAction::Weight => {
            let phi = load_endo(&a.endo)?;
            let cap = a.cap.unwrap_or(4);
            r.param("n", phi.rank()).param("cap", cap);
            let w = match a.p {
                Some(p) => {
                    r.param("p", p);
                    ia_weight_zassenhaus(&phi, prime(p)?, cap)?
                }
                None => ia_weight(&phi, cap)?,
            };
            r.line(format!("ia_weight: {}", w));
        }
        JohnsonAction::Certify => {
            let k = need(a.k, "k")?;
            let c = match a.g {
                Some(g) => {
                    r.param("g", g).param("k", k);
                    certificate_symplectic(g, k)?
                }
                None => {
                    let n = a.endo.n.unwrap_or(k + 1);
                    r.param("n", n).param("k", k);
                    certificate_lower_bound(n, k)?
                }
            };
            let witness = json!({"contraction": c.contraction.to_string(), "expected": c.expected.to_string()});
            for (name, ok) in &c.checks {
                r.check(format!("certificate.{}", name), *ok, witness.clone());
            }
            r.line("lambda =");
            r.lines(&c.lambda.to_string());
            r.line(format!("contraction = {}", c.contraction));
        }
        JohnsonAction::Sample => {
            let n = need(a.endo.n, "n")?;
            let k = need(a.k, "k")?;
            r.param("n", n).param("k", k).param("seed", a.seed).param("samples", a.samples);
            let idx: Vec<usize> = (1..=n).collect();
            let mut rng = cell_rng(a.seed, 0);
            for s in 0..a.samples {
                let depth = k + rng.gen_range(0..2);
                let phi = ia_commutator_sampler(n, &idx, depth, &mut rng)?;
                let zero = tau_with_cap(&phi, k, k + 2)?.is_zero();
                let w = ia_weight(&phi, k + 2)?;
                r.check(
                    format!("kernel.sample={:04}", s),
                    zero == w.at_least(k + 1),
                    json!({"seed": a.seed, "sample": s, "depth": depth, "phi": phi.to_string(), "tau_zero": zero, "ia_weight": w.to_string()}),
                );
            }
        }
    }
    Ok(r)
}

fn congruence_cmd(a: &CongruenceArgs) -> Result<Report, CliError> {
    let p = prime(a.p)?;
    let mut r = Report::new(format!("congruence {:?}", a.action).to_lowercase());
    r.param("group", format!("{:?}", a.group).to_lowercase()).param("p", p);
    match a.group {
        Group::Sl => {
            let n = need(a.n, "n")?;
            if n < 2 {
                return Err(usage("--n must be at least 2"));
            }
            r.param("n", n);
            match a.action {
                CongruenceAction::Gens => {
                    for k in sl_level_generators(n, p as i64) {
                        r.line(format!("{}:", k));
                        r.lines(&gen_sl(k, n)?.to_string());
                    }
                }
                CongruenceAction::Check => {
                    for k in sl_level_generators(n, p as i64) {
                        let m = gen_sl(k, n)?;
                        let det = m.determinant()?;
                        r.check(format!("{}.level", k), is_level(&m, p), json!({"n": n, "p": p}));
                        r.check(format!("{}.determinant_one", k), det == 1.into(), json!({"n": n, "determinant": det.to_string()}));
                    }
                    let lifts = sl_lift_check(n, p)?;
                    for e in &lifts.entries {
                        r.check(
                            format!("lift.{}", e.name),
                            e.passed(),
                            json!({"n": n, "p": p, "abelianization_matches": e.abelianization_matches, "level": e.level}),
                        );
                    }
                }
                CongruenceAction::Rank => {
                    let (rank, dep) = sl_lie_rank(n, p)?;
                    r.line(format!("rank: {}", rank));
                    r.check("rank_is_dimension", rank == n * n - 1, json!({"n": n, "p": p, "rank": rank, "expected": n * n - 1, "dependent": dep}));
                }
            }
        }
        Group::Sp => {
            let g = need(a.g, "g")?;
            if g < 1 {
                return Err(usage("--g must be at least 1"));
            }
            r.param("g", g);
            let ctx = SymplecticContext::new(g);
            match a.action {
                CongruenceAction::Gens => {
                    for k in sp_level_generators(g, p as i64) {
                        r.line(format!("{}:", k));
                        r.lines(&gen_sp(k, g)?.to_string());
                    }
                }
                CongruenceAction::Check => {
                    for k in sp_level_generators(g, p as i64) {
                        let m = gen_sp(k, g)?;
                        let log = congruence_log(&m, p)?;
                        r.check(format!("{}.symplectic", k), is_symplectic(&m, &ctx)?, json!({"g": g, "p": p}));
                        r.check(format!("{}.level", k), is_level(&m, p), json!({"g": g, "p": p}));
                        r.check(format!("{}.log_in_sp", k), in_sp_lie(&log, &ctx, p)?, json!({"g": g, "p": p}));
                    }
                }
                CongruenceAction::Rank => {
                    let c = lie_rank_certificate(g, p)?;
                    r.line(format!("rank: {}", c.rank));
                    r.check(
                        "rank_is_dimension",
                        c.passed(),
                        json!({"g": g, "p": p, "rank": c.rank, "expected": c.expected, "dependent": c.dependent, "all_in_sp_lie": c.all_in_sp_lie}),
                    );
                }
            }
        }
    }
    Ok(r)
}

fn load_module(a: &FimodArgs, r: &mut Report) -> Result<FIModulePresentation, CliError> {
    match (&a.input, &a.builtin) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e)))?;
            let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {}", path.display(), e)))?;
            let m = fiformat::from_json(&v)?;
            r.param("input", path.display().to_string()).param("N", m.ambient());
            Ok(m)
        }
        (None, Some(name)) => {
            let kind: BuiltinKind = name.parse().map_err(|e: workbench_core::Error| usage(e.to_string()))?;
            let n = need(a.big_n, "N")?;
            r.param("builtin", kind.to_string()).param("N", n);
            builtin(kind, n).map_err(|e| usage(e.to_string()))
        }
        _ => Err(usage("give exactly one of --in or --builtin")),
    }
}

fn fimod_cmd(a: &FimodArgs) -> Result<Report, CliError> {
    let mut r = Report::new(format!("fimod {:?}", a.action).to_lowercase());
    let m = load_module(a, &mut r)?;
    let n = m.ambient();
    match a.action {
        FimodAction::Validate => {
            for c in validate(&m)?.checks {
                r.check(c.name, c.passed, json!({"first_violation": c.detail}));
            }
        }
        FimodAction::Stab | FimodAction::Stabstart => {
            let table = stab_table(&m)?;
            if matches!(a.action, FimodAction::Stab) {
                r.line("J\tStab\tW_J\tonto\tiso");
                for row in &table.rows {
                    r.line(format!("{{{}}}\t{}\t{}\t{}\t{}", subset_key(row.j), row.stab, row.target, row.surjective, row.iso));
                }
                for row in &table.rows {
                    r.check(format!("well_defined.{{{}}}", subset_key(row.j)), row.well_defined, json!({"J": subset_key(row.j)}));
                }
            } else {
                for size in 1..=n {
                    let all = table.rows.iter().filter(|x| fimod::size(x.j) == size).all(|x| x.iso);
                    r.line(format!("|J| = {}: {}", size, if all { "iso" } else { "not iso" }));
                }
                let start = table.stability_start(n);
                match start {
                    Some(s) => r.line(format!("stability_start: {} (iso for {} < |J| <= {})", s, s, n)),
                    None => r.line(format!("stability_start: none within N = {}", n)),
                };
                r.check("stability_start_found", start.is_some(), json!({"N": n, "stability_start": start}));
            }
        }
        FimodAction::Gendeg => {
            let d = generation_degree_parallel(&m)?;
            r.line(format!("generation_degree: {}", d));
        }
        FimodAction::Export => {
            let out = need(a.out.clone(), "out")?;
            let mut s = serde_json::to_string_pretty(&fiformat::to_json(&m)?).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            std::fs::write(&out, s).map_err(|e| CliError::Io(format!("{}: {}", out.display(), e)))?;
            r.line(format!("wrote {}", out.display()));
        }
    }
    Ok(r)
}

fn generation_degree_parallel(m: &FIModulePresentation) -> Result<usize, CliError> {
    use rayon::prelude::*;
    let n = m.ambient();
    let js: Vec<u32> = fimod::all_subsets(n).collect();
    for a in 0..=n {
        let ok = js
            .par_iter()
            .map(|&j| generated_in_degree(m, j, a))
            .collect::<Result<Vec<bool>, _>>()?
            .into_iter()
            .all(|x| x);
        if ok {
            return Ok(a);
        }
    }
    Ok(n)
}

fn suite_cmd(a: &SuiteArgs) -> Result<Report, CliError> {
    for &p in &a.primes {
        prime(p)?;
    }
    if a.kmax == 0 || a.gmax < 2 || a.nmax < 2 || a.big_n > 8 {
        return Err(usage("need --kmax >= 1, --gmax >= 2, --nmax >= 2 and --N <= 8"));
    }
    let name = match a.name {
        SuiteArg::Lowerbound => SuiteName::LowerBound,
        SuiteArg::Levelp => SuiteName::LevelP,
        SuiteArg::Fistab => SuiteName::FiStab,
        SuiteArg::All => SuiteName::All,
    };
    let p = SuiteParams { seed: a.seed, kmax: a.kmax, gmax: a.gmax, nmax: a.nmax, primes: a.primes.clone(), fi_n: a.big_n };
    Ok(run_suite(name, &p))
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let r = match &cli.command {
        Command::Words(a) => words_cmd(a)?,
        Command::Magnus(a) => magnus_cmd(a)?,
        Command::Johnson(a) => johnson_cmd(a)?,
        Command::Congruence(a) => congruence_cmd(a)?,
        Command::Fimod(a) => fimod_cmd(a)?,
        Command::Suite(a) => suite_cmd(a)?,
    };
    Ok(r.finish())
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("WORKBENCH_THREADS") {
        let t: usize = v.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| usage(format!("WORKBENCH_THREADS={:?} is not a positive integer", v)))?;
        b = b.num_threads(t);
    }
    b.build().map_err(|e| usage(e.to_string()))
}

/// Parses `argv` (including the program name), runs the command and writes
/// the report. Returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let _ = write!(stderr, "{}", e.render());
            return 2;
        }
    };
    let start = Instant::now();
    let result = thread_pool().and_then(|pool| pool.install(|| dispatch(&cli)));
    let mut report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "workbench: {}", e);
            return e.exit_code();
        }
    };
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    let written = match &cli.json {
        Some(path) => std::fs::write(path, report.to_json()).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e))),
        None => stdout.write_all(report.to_text().as_bytes()).map_err(CliError::from),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "workbench: {}", e);
        return e.exit_code();
    }
    if report.passed() {
        0
    } else {
        1
    }
}
