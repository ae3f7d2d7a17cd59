//! Verification suites.
//!
//! Each block returns check records; sampled blocks aggregate one record per
//! parameter cell and carry the seed, the cell's stream number and the
//! first failing input. Cells draw from `ChaCha8Rng::seed_from_u64(seed)`
//! switched to a per-cell stream, so results do not depend on scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use workbench_core::congruence::{lie_rank_certificate, sl_lie_rank, sl_lift_check};
use workbench_core::fimod::{
    self, augmentation, builtin, central_stabilization, doubled_cover, generation_degree, isomorphism_extension,
    stability_start_of, validate, BuiltinKind, FIModulePresentation, Subset,
};
use workbench_core::freelie::{lyndon_words, pbw_images_independent, pp, random_lie_element, witt_dimension, BasisContext};
use workbench_core::johnson::{certificate_lower_bound, ia_commutator_sampler, ia_weight, inner_consistency, tau};
use workbench_core::words::{FreeWord, Letter};

use crate::error::CliError;
use crate::fiformat::subset_key;
use crate::report::{CheckRecord, Report};

/// Reproducible generator for one parameter cell.
pub fn cell_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    LowerBound,
    LevelP,
    FiStab,
    All,
}

#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub seed: u64,
    pub kmax: usize,
    pub gmax: usize,
    pub nmax: usize,
    pub primes: Vec<u64>,
    pub fi_n: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { seed: 0, kmax: 6, gmax: 4, nmax: 5, primes: vec![2, 3, 5], fi_n: 6 }
    }
}

/// Samples per block in the lower-bound suite.
pub const KERNEL_SAMPLES: usize = 240;
pub const SPLITTING_SAMPLES: usize = 120;
pub const INNER_SAMPLES: usize = 60;
pub const PP_SAMPLES: usize = 135;

fn record(name: String, failure: Option<Value>, mut witness: Value) -> CheckRecord {
    if let Some(f) = &failure {
        witness["first_failure"] = f.clone();
    }
    CheckRecord::new(name, failure.is_none(), witness)
}

fn core_failure(e: workbench_core::Error) -> Value {
    json!({"error": e.to_string()})
}

/// Lower-bound certificates for `n = k + 1`, `k = 1..=kmax`.
pub fn certificates(kmax: usize) -> Vec<CheckRecord> {
    (1..=kmax)
        .into_par_iter()
        .map(|k| {
            let name = format!("lowerbound.certificate.k={}", k);
            match certificate_lower_bound(k + 1, k) {
                Ok(c) => {
                    let failed: Vec<&str> = c.checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
                    let w = json!({
                        "n": k + 1,
                        "k": k,
                        "contraction": c.contraction.to_string(),
                        "expected": c.expected.to_string(),
                        "failed_steps": failed,
                    });
                    CheckRecord::new(name, c.passed(), w)
                }
                Err(e) => CheckRecord::new(name, false, json!({"n": k + 1, "k": k, "error": e.to_string()})),
            }
        })
        .collect()
}

/// `τ_k(φ) = 0 ⟺ ia_weight(φ) ≥ k + 1` on iterated commutators of depth
/// `k` or `k + 1`, for `n ≤ 5`, `k ≤ 3`.
pub fn kernel_property(seed: u64, samples: usize) -> Vec<CheckRecord> {
    let cells: Vec<(usize, usize)> = (2..=5).flat_map(|n| (1..=3).map(move |k| (n, k))).collect();
    let per = samples.div_ceil(cells.len());
    let results: Vec<(CheckRecord, usize, usize)> = cells
        .par_iter()
        .enumerate()
        .map(|(c, &(n, k))| {
            let stream = 100 + c as u64;
            let mut rng = cell_rng(seed, stream);
            let idx: Vec<usize> = (1..=n).collect();
            let (mut zero, mut nonzero, mut failure) = (0, 0, None);
            for s in 0..per {
                let depth = k + rng.gen_range(0..2);
                let outcome = ia_commutator_sampler(n, &idx, depth, &mut rng).and_then(|phi| {
                    let t = tau(&phi, k)?;
                    let w = ia_weight(&phi, k + 2)?;
                    Ok((phi, t.is_zero(), w))
                });
                match outcome {
                    Ok((phi, is_zero, w)) => {
                        if is_zero {
                            zero += 1;
                        } else {
                            nonzero += 1;
                        }
                        if is_zero != w.at_least(k + 1) && failure.is_none() {
                            failure = Some(json!({"sample": s, "depth": depth, "phi": phi.to_string(), "tau_zero": is_zero, "ia_weight": w.to_string()}));
                        }
                    }
                    Err(e) => {
                        failure.get_or_insert_with(|| core_failure(e));
                    }
                }
            }
            let w = json!({"seed": seed, "stream": stream, "n": n, "k": k, "samples": per, "tau_zero": zero, "tau_nonzero": nonzero});
            (record(format!("lowerbound.kernel.n={},k={}", n, k), failure, w), zero, nonzero)
        })
        .collect();
    let (zero, nonzero) = results.iter().fold((0, 0), |a, r| (a.0 + r.1, a.1 + r.2));
    let mut out: Vec<CheckRecord> = results.into_iter().map(|r| r.0).collect();
    out.push(CheckRecord::new(
        "lowerbound.kernel.both_directions_exercised",
        zero > 0 && nonzero > 0,
        json!({"seed": seed, "tau_zero": zero, "tau_nonzero": nonzero}),
    ));
    out
}

/// `τ̂_k(φ) = 0` for `φ` supported on `|I| = r < k`, `k ≤ 4`, `n = 5`.
pub fn splitting_vanishing(seed: u64, samples: usize) -> Vec<CheckRecord> {
    let n = 5;
    let cells: Vec<(usize, usize)> = (3..=4).flat_map(|k| (2..k).map(move |r| (k, r))).collect();
    let per = samples.div_ceil(cells.len());
    cells
        .par_iter()
        .enumerate()
        .map(|(c, &(k, r))| {
            let stream = 200 + c as u64;
            let mut rng = cell_rng(seed, stream);
            let all: Vec<usize> = (1..=n).collect();
            let (mut nontrivial, mut failure) = (0, None);
            for s in 0..per {
                let mut idx: Vec<usize> = all.choose_multiple(&mut rng, r).copied().collect();
                idx.sort_unstable();
                let outcome = ia_commutator_sampler(n, &idx, k, &mut rng)
                    .and_then(|phi| {
                        let t = tau(&phi, k)?;
                        Ok((t.is_zero(), t.hat()?, phi))
                    });
                match outcome {
                    Ok((tau_zero, hats, phi)) => {
                        if !tau_zero {
                            nontrivial += 1;
                        }
                        if let Some(i) = hats.iter().position(|h| !h.is_zero()) {
                            failure.get_or_insert_with(|| json!({"sample": s, "support": idx, "phi": phi.to_string(), "component": i + 1}));
                        }
                    }
                    Err(e) => {
                        failure.get_or_insert_with(|| core_failure(e));
                    }
                }
            }
            let w = json!({"seed": seed, "stream": stream, "n": n, "k": k, "r": r, "samples": per, "tau_nonzero": nontrivial});
            record(format!("lowerbound.splitting.k={},r={}", k, r), failure, w)
        })
        .collect()
}

fn random_word<R: Rng>(n: usize, rng: &mut R) -> FreeWord {
    loop {
        let len = rng.gen_range(1..=3);
        let letters = (0..len).map(|_| Letter::new(rng.gen_range(1..=n), rng.gen_bool(0.5)));
        let w = FreeWord::reduce(letters, n).expect("indices in range");
        if !w.is_empty() {
            return w;
        }
    }
}

/// A left-normed commutator of `k` random words, so an element of `γ_k`.
pub fn random_gamma_element<R: Rng>(n: usize, k: usize, rng: &mut R) -> FreeWord {
    let mut w = random_word(n, rng);
    for _ in 1..k {
        w = w.commutator(&random_word(n, rng)).expect("equal ranks");
    }
    w
}

/// `τ_k(conj w)` is the inner derivation of the class of `w ∈ γ_k`.
pub fn inner_sweep(seed: u64, samples: usize) -> Vec<CheckRecord> {
    let cells: Vec<(usize, usize)> = (2..=4).flat_map(|n| (1..=4).map(move |k| (n, k))).collect();
    let per = samples.div_ceil(cells.len());
    cells
        .par_iter()
        .enumerate()
        .map(|(c, &(n, k))| {
            let stream = 300 + c as u64;
            let mut rng = cell_rng(seed, stream);
            let mut failure = None;
            for s in 0..per {
                let w = random_gamma_element(n, k, &mut rng);
                match inner_consistency(&w, k) {
                    Ok(true) => {}
                    Ok(false) => {
                        failure.get_or_insert_with(|| json!({"sample": s, "word": w.to_string()}));
                    }
                    Err(e) => {
                        failure.get_or_insert_with(|| json!({"sample": s, "word": w.to_string(), "error": e.to_string()}));
                    }
                }
            }
            let w = json!({"seed": seed, "stream": stream, "n": n, "k": k, "samples": per});
            record(format!("lowerbound.inner.n={},k={}", n, k), failure, w)
        })
        .collect()
}

/// `PP(μ_1)(μ_2) = [μ_1, μ_2]` for random `μ_i` in the span of the `a_i`.
pub fn pp_sweep(seed: u64, samples: usize) -> Vec<CheckRecord> {
    let cells: Vec<(usize, usize, usize)> =
        (2..=4).flat_map(|g| (1..=5).flat_map(move |d1| (1..=6 - d1).map(move |d2| (g, d1, d2)))).collect();
    let per = samples.div_ceil(cells.len());
    cells
        .par_iter()
        .enumerate()
        .map(|(c, &(g, d1, d2))| {
            let stream = 400 + c as u64;
            let mut rng = cell_rng(seed, stream);
            let ctx = BasisContext::symplectic(g);
            let letters: Vec<u16> = (1..=g as u16).collect();
            let mut failure = None;
            for s in 0..per {
                let outcome = (|| {
                    let m1 = random_lie_element(&ctx, &letters, d1, &mut rng)?;
                    let m2 = random_lie_element(&ctx, &letters, d2, &mut rng)?;
                    let ok = pp(&m1)?.apply(&m2)? == m1.bracket(&m2)?;
                    Ok::<_, workbench_core::Error>((ok, m1, m2))
                })();
                match outcome {
                    Ok((true, _, _)) => {}
                    Ok((false, m1, m2)) => {
                        failure.get_or_insert_with(|| json!({"sample": s, "mu1": m1.to_string(), "mu2": m2.to_string()}));
                    }
                    Err(e) => {
                        failure.get_or_insert_with(|| core_failure(e));
                    }
                }
            }
            let w = json!({"seed": seed, "stream": stream, "g": g, "deg1": d1, "deg2": d2, "samples": per});
            record(format!("lowerbound.pp.g={},d={}+{}", g, d1, d2), failure, w)
        })
        .collect()
}

/// Lyndon counts against the necklace formula, and PBW independence.
pub fn witt_sweep(nmax: usize, kmax: usize) -> Vec<CheckRecord> {
    let cells: Vec<(usize, usize)> = (1..=nmax).flat_map(|n| (1..=kmax).map(move |k| (n, k))).collect();
    cells
        .par_iter()
        .map(|&(n, k)| {
            let count = lyndon_words(n, k).len();
            let formula = witt_dimension(n, k);
            let indep = pbw_images_independent(n, k);
            let ok = count == formula && matches!(indep, Ok(true));
            let w = json!({"n": n, "k": k, "lyndon_words": count, "necklace": formula, "pbw_independent": indep.ok()});
            CheckRecord::new(format!("lowerbound.witt.n={},k={}", n, k), ok, w)
        })
        .collect()
}

/// Rank of the level-`p` generators in `sp_2g(Z/p)`.
pub fn lie_ranks(gs: &[usize], primes: &[u64]) -> Vec<CheckRecord> {
    let cells: Vec<(usize, u64)> = gs.iter().flat_map(|&g| primes.iter().map(move |&p| (g, p))).collect();
    cells
        .par_iter()
        .map(|&(g, p)| {
            let name = format!("levelp.sp_rank.g={},p={}", g, p);
            match lie_rank_certificate(g, p) {
                Ok(c) => {
                    let w = json!({"g": g, "p": p, "rank": c.rank, "expected": c.expected, "dependent": c.dependent, "all_in_sp_lie": c.all_in_sp_lie});
                    CheckRecord::new(name, c.passed(), w)
                }
                Err(e) => CheckRecord::new(name, false, json!({"g": g, "p": p, "error": e.to_string()})),
            }
        })
        .collect()
}

/// Lifts of the `SL_n(Z, p)` generators, and their rank in `sl_n(Z/p)`.
pub fn lifts(ns: &[usize], primes: &[u64]) -> Vec<CheckRecord> {
    let cells: Vec<(usize, u64)> = ns.iter().flat_map(|&n| primes.iter().map(move |&p| (n, p))).collect();
    cells
        .par_iter()
        .flat_map_iter(|&(n, p)| {
            let lift = match sl_lift_check(n, p) {
                Ok(r) => {
                    let bad: Vec<&str> = r.entries.iter().filter(|e| !e.passed()).map(|e| e.name.as_str()).collect();
                    CheckRecord::new(format!("levelp.lift.n={},p={}", n, p), r.passed(), json!({"n": n, "p": p, "generators": r.entries.len(), "mismatched": bad}))
                }
                Err(e) => CheckRecord::new(format!("levelp.lift.n={},p={}", n, p), false, json!({"n": n, "p": p, "error": e.to_string()})),
            };
            let rank = match sl_lie_rank(n, p) {
                Ok((rank, dep)) => CheckRecord::new(
                    format!("levelp.sl_rank.n={},p={}", n, p),
                    rank == n * n - 1,
                    json!({"n": n, "p": p, "rank": rank, "expected": n * n - 1, "dependent": dep}),
                ),
                Err(e) => CheckRecord::new(format!("levelp.sl_rank.n={},p={}", n, p), false, json!({"n": n, "p": p, "error": e.to_string()})),
            };
            [lift, rank]
        })
        .collect()
}

/// Builtin modules swept by the FI suite.
pub const FI_BUILTINS: [BuiltinKind; 6] = [
    BuiltinKind::Constant,
    BuiltinKind::Standard,
    BuiltinKind::Exterior(2),
    BuiltinKind::Exterior(3),
    BuiltinKind::TensorWedge(1),
    BuiltinKind::TensorWedge(2),
];

/// Per-subset stabilization outcomes over all nonempty `J`, in mask order.
pub struct StabTable {
    pub rows: Vec<StabRow>,
}

pub struct StabRow {
    pub j: Subset,
    pub well_defined: bool,
    pub surjective: bool,
    pub iso: bool,
    pub stab: String,
    pub target: String,
}

pub fn stab_table(m: &FIModulePresentation) -> Result<StabTable, CliError> {
    let js: Vec<Subset> = fimod::all_subsets(m.ambient()).filter(|&j| j != 0).collect();
    let rows = js
        .par_iter()
        .map(|&j| {
            let r = central_stabilization(m, j)?;
            Ok(StabRow {
                j,
                well_defined: r.well_defined,
                surjective: r.surjective,
                iso: r.iso,
                stab: r.stab_invariants.to_string(),
                target: r.target_invariants.to_string(),
            })
        })
        .collect::<Result<Vec<_>, workbench_core::Error>>()?;
    Ok(StabTable { rows })
}

impl StabTable {
    pub fn stability_start(&self, n: usize) -> Option<usize> {
        let t: Vec<(Subset, bool)> = self.rows.iter().map(|r| (r.j, r.iso)).collect();
        stability_start_of(n, &t)
    }
}

fn subset_list(js: impl Iterator<Item = Subset>) -> Value {
    json!(js.map(|j| format!("{{{}}}", subset_key(j))).collect::<Vec<_>>())
}

/// Validation, `ψ ∘ η = 0`, surjectivity above the generation degree and a
/// finite stability start for one builtin.
pub fn fi_block(kind: BuiltinKind, n: usize) -> Vec<CheckRecord> {
    let prefix = format!("fistab.{}", kind);
    let fail = |what: &str, e: String| vec![CheckRecord::new(format!("{}.{}", prefix, what), false, json!({"N": n, "error": e}))];
    let m = match builtin(kind, n) {
        Ok(m) => m,
        Err(e) => return fail("build", e.to_string()),
    };
    let mut out = Vec::new();
    match validate(&m) {
        Ok(r) => {
            let v = r.first_violation().map(|c| json!({"check": c.name, "at": c.detail}));
            out.push(record(format!("{}.validate", prefix), v, json!({"N": n})));
        }
        Err(e) => out.extend(fail("validate", e.to_string())),
    }
    let gen = match generation_degree(&m) {
        Ok(g) => g,
        Err(e) => return fail("generation_degree", e.to_string()),
    };
    let table = match stab_table(&m) {
        Ok(t) => t,
        Err(e) => return fail("stab", e.to_string()),
    };
    let ill = table.rows.iter().filter(|r| !r.well_defined).map(|r| r.j);
    let ill = subset_list(ill);
    out.push(CheckRecord::new(format!("{}.psi_eta_zero", prefix), ill.as_array().is_some_and(Vec::is_empty), json!({"N": n, "violations": ill})));
    let not_onto = subset_list(table.rows.iter().filter(|r| fimod::size(r.j) > gen && !r.surjective).map(|r| r.j));
    out.push(CheckRecord::new(
        format!("{}.surjective_above_generation", prefix),
        not_onto.as_array().is_some_and(Vec::is_empty),
        json!({"N": n, "generation_degree": gen, "violations": not_onto}),
    ));
    let start = table.stability_start(n);
    let non_iso = subset_list(table.rows.iter().filter(|r| !r.iso).map(|r| r.j));
    out.push(CheckRecord::new(
        format!("{}.stability_start_finite", prefix),
        start.is_some(),
        json!({"N": n, "generation_degree": gen, "stability_start": start, "non_iso": non_iso}),
    ));
    out
}

/// The isomorphism-extension scenario on the fold map of a doubled module,
/// plus the augmentation as a control whose hypotheses fail.
pub fn fi_extension(n: usize) -> Vec<CheckRecord> {
    let n = n.min(5);
    let kinds = [BuiltinKind::Constant, BuiltinKind::Standard, BuiltinKind::Exterior(2)];
    let mut out: Vec<CheckRecord> = kinds
        .par_iter()
        .map(|&kind| {
            let name = format!("fistab.extension.{}", kind);
            let run = || -> Result<(bool, Value), workbench_core::Error> {
                let w = builtin(kind, n)?;
                let (v, f) = doubled_cover(&w)?;
                let table: Vec<(Subset, bool)> = fimod::all_subsets(n)
                    .filter(|&j| j != 0)
                    .map(|j| Ok((j, central_stabilization(&w, j)?.iso)))
                    .collect::<Result<_, workbench_core::Error>>()?;
                let e = stability_start_of(n, &table).unwrap_or(n);
                let r = isomorphism_extension(&v, &w, &f, e)?;
                let mut squares = true;
                for j in fimod::all_subsets(n).filter(|&j| j != 0) {
                    squares &= f.stab_square_commutes(&v, &w, j)?;
                }
                let failed: Vec<&str> = r.hypotheses.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                let ok = r.hypotheses_hold() && r.conclusion.passed && squares;
                Ok((ok, json!({"N": n, "e": e, "failed_hypotheses": failed, "conclusion": r.conclusion.passed, "naturality": squares})))
            };
            match run() {
                Ok((ok, w)) => CheckRecord::new(name, ok, w),
                Err(e) => CheckRecord::new(name, false, json!({"N": n, "error": e.to_string()})),
            }
        })
        .collect();
    let control = (|| -> Result<(bool, Value), workbench_core::Error> {
        let (v, w, f) = augmentation(n)?;
        let natural = f.check(&v, &w)?.iter().all(|c| c.passed);
        let r = isomorphism_extension(&v, &w, &f, 1)?;
        let ok = natural && !r.hypotheses_hold() && !r.conclusion.passed;
        Ok((ok, json!({"N": n, "natural": natural, "hypotheses_hold": r.hypotheses_hold(), "conclusion": r.conclusion.passed})))
    })();
    out.push(match control {
        Ok((ok, w)) => CheckRecord::new("fistab.extension.control_augmentation", ok, w),
        Err(e) => CheckRecord::new("fistab.extension.control_augmentation", false, json!({"error": e.to_string()})),
    });
    out
}

fn lowerbound_checks(p: &SuiteParams) -> Vec<CheckRecord> {
    let blocks: Vec<Box<dyn Fn() -> Vec<CheckRecord> + Send + Sync>> = vec![
        Box::new(|| certificates(p.kmax)),
        Box::new(|| kernel_property(p.seed, KERNEL_SAMPLES)),
        Box::new(|| splitting_vanishing(p.seed, SPLITTING_SAMPLES)),
        Box::new(|| inner_sweep(p.seed, INNER_SAMPLES)),
        Box::new(|| pp_sweep(p.seed, PP_SAMPLES)),
        Box::new(|| witt_sweep(3, 6)),
    ];
    blocks.par_iter().flat_map_iter(|b| b()).collect()
}

fn levelp_checks(p: &SuiteParams) -> Vec<CheckRecord> {
    let gs: Vec<usize> = (2..=p.gmax).collect();
    let ns: Vec<usize> = (3..=p.nmax).collect();
    let (mut a, b) = rayon::join(|| lie_ranks(&gs, &p.primes), || lifts(&ns, &p.primes));
    a.extend(b);
    a
}

fn fistab_checks(p: &SuiteParams) -> Vec<CheckRecord> {
    let (mut a, b) = rayon::join(
        || FI_BUILTINS.par_iter().flat_map_iter(|&k| fi_block(k, p.fi_n)).collect::<Vec<_>>(),
        || fi_extension(p.fi_n),
    );
    a.extend(b);
    a
}

pub fn run_suite(name: SuiteName, p: &SuiteParams) -> Report {
    let label = match name {
        SuiteName::LowerBound => "lowerbound",
        SuiteName::LevelP => "levelp",
        SuiteName::FiStab => "fistab",
        SuiteName::All => "all",
    };
    let mut r = Report::new(format!("suite {}", label));
    r.param("seed", p.seed);
    let primes: Vec<Value> = p.primes.iter().map(|&x| json!(x)).collect();
    match name {
        SuiteName::LowerBound => {
            r.param("kmax", p.kmax);
            r.extend(lowerbound_checks(p));
        }
        SuiteName::LevelP => {
            r.param("gmax", p.gmax).param("nmax", p.nmax).param("primes", primes);
            r.extend(levelp_checks(p));
        }
        SuiteName::FiStab => {
            r.param("N", p.fi_n);
            r.extend(fistab_checks(p));
        }
        SuiteName::All => {
            r.param("kmax", p.kmax).param("gmax", p.gmax).param("nmax", p.nmax).param("primes", primes).param("N", p.fi_n);
            let (a, (b, c)) = rayon::join(|| lowerbound_checks(p), || rayon::join(|| levelp_checks(p), || fistab_checks(p)));
            r.extend(a).extend(b).extend(c);
        }
    }
    r.finish()
}
