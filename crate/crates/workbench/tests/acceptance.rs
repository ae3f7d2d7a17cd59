//! Acceptance criteria, one line each. Every comparison is exact; the only
//! tolerances are the wall-clock limits below.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use serde_json::Value;
use workbench::report::CheckRecord;
use workbench::suite::{
    certificates, fi_block, fi_extension, inner_sweep, kernel_property, lie_ranks, lifts, pp_sweep, run_suite,
    splitting_vanishing, witt_sweep, SuiteName, SuiteParams, FI_BUILTINS, INNER_SAMPLES, KERNEL_SAMPLES, PP_SAMPLES,
    SPLITTING_SAMPLES,
};

const SEED: u64 = 7;
const CERTIFICATE_LIMIT: Duration = Duration::from_secs(60);
const KERNEL_LIMIT: Duration = Duration::from_secs(300);
const RANK_LIMIT: Duration = Duration::from_secs(10);
const STABILITY_LIMIT: Duration = Duration::from_secs(120);
const FI_N: usize = 6;

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn failures(checks: &[CheckRecord]) -> Vec<String> {
    checks.iter().filter(|c| !c.passed()).map(|c| format!("{} {}", c.name, c.witness)).collect()
}

fn total_samples(checks: &[CheckRecord]) -> u64 {
    checks.iter().filter_map(|c| c.witness["samples"].as_u64()).sum()
}

fn with_suffix<'a>(checks: &'a [CheckRecord], suffix: &str) -> Vec<&'a CheckRecord> {
    checks.iter().filter(|c| c.name.ends_with(suffix)).collect()
}

fn lyndon_brute_force(n: usize, k: usize) -> usize {
    (0..n.pow(k as u32))
        .filter(|&code| {
            let w: Vec<usize> = (0..k).map(|i| code / n.pow(i as u32) % n).collect();
            (1..k).all(|r| w < w[r..].iter().chain(&w[..r]).copied().collect::<Vec<_>>())
        })
        .count()
}

fn certificate_criterion() -> Outcome {
    let (checks, t) = timed(|| certificates(6));
    let mut bad = failures(&checks);
    for k in 1..=6 {
        let expected = format!("1 * {}", (2..=k + 1).map(|i| format!("e{}", i)).collect::<Vec<_>>().join("∧"));
        let c = checks.iter().find(|c| c.name == format!("lowerbound.certificate.k={}", k));
        if c.map(|c| c.witness["contraction"] != expected.as_str()).unwrap_or(true) {
            bad.push(format!("k={} contraction differs from {}", k, expected));
        }
    }
    Outcome {
        id: 1,
        title: "lower-bound certificates k=1..6 give +a2^..^a(k+1)",
        passed: bad.is_empty() && t < CERTIFICATE_LIMIT,
        detail: format!("{:.2} s (limit {} s) {:?}", t.as_secs_f64(), CERTIFICATE_LIMIT.as_secs(), bad),
    }
}

fn kernel_criterion() -> Outcome {
    let (checks, t) = timed(|| kernel_property(SEED, KERNEL_SAMPLES));
    let n = total_samples(&checks);
    let bad = failures(&checks);
    Outcome {
        id: 2,
        title: "tau_k(phi)=0 iff ia_weight>=k+1 (n<=5, k<=3)",
        passed: bad.is_empty() && n >= 200 && t < KERNEL_LIMIT,
        detail: format!("{} samples, {:.2} s (limit {} s) {:?}", n, t.as_secs_f64(), KERNEL_LIMIT.as_secs(), bad),
    }
}

fn splitting_criterion() -> Outcome {
    let checks = splitting_vanishing(SEED, SPLITTING_SAMPLES);
    let n = total_samples(&checks);
    let shapes_ok = checks.iter().all(|c| c.witness["r"].as_u64() < c.witness["k"].as_u64() && c.witness["k"].as_u64() <= Some(4));
    let bad = failures(&checks);
    Outcome {
        id: 3,
        title: "tau-hat vanishes on the splitting for |I|=r<k, k<=4",
        passed: bad.is_empty() && n >= 100 && shapes_ok,
        detail: format!("{} samples {:?}", n, bad),
    }
}

fn inner_criterion() -> Outcome {
    let checks = inner_sweep(SEED, INNER_SAMPLES);
    let n = total_samples(&checks);
    let bad = failures(&checks);
    Outcome {
        id: 4,
        title: "tau_k(conj w) is the inner derivation of [w] (k<=4, n<=4)",
        passed: bad.is_empty() && n >= 50,
        detail: format!("{} samples {:?}", n, bad),
    }
}

fn pp_criterion() -> Outcome {
    let checks = pp_sweep(SEED, PP_SAMPLES);
    let n = total_samples(&checks);
    let in_range = checks.iter().all(|c| {
        let w = &c.witness;
        w["g"].as_u64() <= Some(4) && w["deg1"].as_u64().unwrap_or(99) + w["deg2"].as_u64().unwrap_or(99) <= 6
    });
    let bad = failures(&checks);
    Outcome {
        id: 5,
        title: "PP(mu1)(mu2)=[mu1,mu2] on isotropic pairs (deg sum<=6, g<=4)",
        passed: bad.is_empty() && n >= 100 && in_range,
        detail: format!("{} pairs {:?}", n, bad),
    }
}

fn rank_criterion() -> Outcome {
    let (checks, t) = timed(|| lie_ranks(&[2, 3, 4], &[2, 3, 5]));
    let mut bad = failures(&checks);
    for c in &checks {
        let g = c.witness["g"].as_u64().unwrap_or(0);
        if c.witness["rank"].as_u64() != Some(2 * g * g + g) {
            bad.push(format!("{} rank {}", c.name, c.witness["rank"]));
        }
    }
    Outcome {
        id: 6,
        title: "lie_rank = 2g^2+g for g in {2,3,4}, p in {2,3,5}",
        passed: bad.is_empty() && checks.len() == 9 && t < RANK_LIMIT,
        detail: format!("{} cells, {:.2} s (limit {} s) {:?}", checks.len(), t.as_secs_f64(), RANK_LIMIT.as_secs(), bad),
    }
}

fn lift_criterion() -> Outcome {
    let checks = lifts(&[3, 4, 5], &[2, 3, 5]);
    let lift_checks = checks.iter().filter(|c| c.name.starts_with("levelp.lift.")).count();
    let bad = failures(&checks);
    Outcome {
        id: 7,
        title: "lifted generators reduce to E, B, N1 (n in {3,4,5}, p in {2,3,5})",
        passed: bad.is_empty() && lift_checks == 9,
        detail: format!("{} cells {:?}", lift_checks, bad),
    }
}

fn fi_criteria() -> (Outcome, Outcome) {
    let (blocks, t) = timed(|| FI_BUILTINS.iter().flat_map(|&k| fi_block(k, FI_N)).collect::<Vec<_>>());
    let extension = fi_extension(FI_N);
    let soundness: Vec<CheckRecord> = blocks
        .iter()
        .filter(|c| c.name.ends_with(".validate") || c.name.ends_with(".psi_eta_zero") || c.name.ends_with(".surjective_above_generation"))
        .cloned()
        .chain(extension.iter().cloned())
        .collect();
    let mut bad = failures(&soundness);
    let psi_eta = with_suffix(&blocks, ".psi_eta_zero").len();
    if psi_eta != FI_BUILTINS.len() {
        bad.push(format!("{} of {} builtins checked", psi_eta, FI_BUILTINS.len()));
    }
    let stability = with_suffix(&blocks, ".stability_start_finite");
    let bad_stab: Vec<String> = stability.iter().filter(|c| !c.passed()).map(|c| format!("{} {}", c.name, c.witness)).collect();
    let starts: Vec<String> = stability.iter().map(|c| format!("{}={}", c.name.split('.').nth(1).unwrap_or("?"), c.witness["stability_start"])).collect();
    (
        Outcome {
            id: 8,
            title: "FI engine: psi.eta=0, Stab->W_J onto above generation degree, extension scenario",
            passed: bad.is_empty(),
            detail: format!("{} builtins at N={}, {} extension checks {:?}", psi_eta, FI_N, extension.len(), bad),
        },
        Outcome {
            id: 9,
            title: "every builtin reports a finite stability_start within N<=6",
            passed: bad_stab.is_empty() && stability.len() == FI_BUILTINS.len() && t < STABILITY_LIMIT,
            detail: format!("{}, {:.2} s (limit {} s) {:?}", starts.join(" "), t.as_secs_f64(), STABILITY_LIMIT.as_secs(), bad_stab),
        },
    )
}

fn witt_criterion() -> Outcome {
    let checks = witt_sweep(3, 6);
    let mut bad = failures(&checks);
    for c in &checks {
        let (n, k) = (c.witness["n"].as_u64().unwrap_or(0) as usize, c.witness["k"].as_u64().unwrap_or(0) as usize);
        if c.witness["lyndon_words"].as_u64() != Some(lyndon_brute_force(n, k) as u64) {
            bad.push(format!("{} disagrees with brute force", c.name));
        }
    }
    Outcome {
        id: 10,
        title: "Witt dimensions and independent PBW images (n<=3, k<=6)",
        passed: bad.is_empty() && checks.len() == 18,
        detail: format!("{} cells {:?}", checks.len(), bad),
    }
}

fn determinism_criterion() -> Outcome {
    let params = SuiteParams { seed: SEED, ..SuiteParams::default() };
    let a = run_suite(SuiteName::All, &params).to_json();
    let b = run_suite(SuiteName::All, &params).to_json();
    let status: Value = serde_json::from_str(&a).map(|v: Value| v["status"].clone()).unwrap_or(Value::Null);
    Outcome {
        id: 11,
        title: "suite all --seed 7 reports are byte-identical",
        passed: a == b,
        detail: format!("{} bytes, suite status {}", a.len(), status),
    }
}

fn main() -> ExitCode {
    let mut outcomes = vec![
        certificate_criterion(),
        kernel_criterion(),
        splitting_criterion(),
        inner_criterion(),
        pp_criterion(),
        rank_criterion(),
        lift_criterion(),
    ];
    let (fi, stab) = fi_criteria();
    outcomes.push(fi);
    outcomes.push(stab);
    outcomes.push(witt_criterion());
    outcomes.push(determinism_criterion());
    for o in &outcomes {
        println!("{} [{:>2}] {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.title, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} of {} criteria pass", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
