//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_FAILURES` are still evaluated in full and
//! reported as FAIL; they do not fail the run unless they start passing.

use std::process::ExitCode;
use std::time::Instant;

use mcsp_core::census::count_unique;
use mcsp_core::configurations::{
    build_inequalities, is_unique, nonadjacency_violations, output_configurations, Configuration, ConstraintSystem,
    NonUniqueReason, UniquenessVerdict,
};
use mcsp_core::estimator::{confidence_single, estimate, gamma_half_factorial, markov_test, percent};
use mcsp_core::family::{gen_instance, subset_from_mask, verify_family};
use mcsp_core::feasibility::strict_feasible;
use mcsp_core::reductions::verify_equivalence;
use num_bigint::BigUint;
use num_rational::BigRational;

/// Table 1's one-decimal column cannot be produced by one rendering rule;
/// truncation (the documented convention) misses n = 11 and n = 13.
const EXPECTED_FAILURES: &[&str] = &["8"];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

/// Every unique verdict seen by any criterion, re-verified for criterion 9.
#[derive(Default)]
struct WitnessLedger {
    seen: usize,
    bad: Vec<String>,
}

impl WitnessLedger {
    fn record(&mut self, p: &Configuration, v: &UniquenessVerdict) {
        if !v.unique {
            return;
        }
        self.seen += 1;
        let Some(w) = v.witness.as_ref() else {
            self.bad.push(format!("{p}: no witness"));
            return;
        };
        let mut system = ConstraintSystem::new(p.n());
        for i in 1..=p.n() {
            system.extend(build_inequalities(p, i).unwrap()).unwrap();
        }
        if !system.is_satisfied_by(w) {
            self.bad.push(format!("{p}: witness violates a strict inequality"));
        }
        let round_trip = v.witness_sequence().map(|s| output_configurations(&s).unwrap());
        if round_trip != Some(vec![p.clone()]) {
            self.bad.push(format!("{p}: witness does not reproduce exactly {{P}}"));
        }
    }
}

fn criterion_1() -> Outcome {
    let table = [1u64, 2, 4, 12, 36, 148, 586, 2790, 13338, 71562];
    let mut got = Vec::new();
    for n in 1..=10 {
        got.push(count_unique(n, 1).unwrap().unique_count);
    }
    outcome(got == table, format!("U(1..10) = {got:?}"))
}

fn criterion_2() -> Outcome {
    let r = verify_equivalence(200, 40, 2024).unwrap();
    let max_arity = r.trials.iter().map(|t| t.conv_arity).max().unwrap_or(0);
    outcome(
        r.all_passed() && r.trials.len() == 200,
        format!("{}/{} trials exact, largest arity {max_arity}", r.passed, r.trials.len()),
    )
}

fn criterion_3(ledger: &mut WitnessLedger) -> Outcome {
    let mut ok = true;
    let mut counts = Vec::new();
    for n in 5..=12usize {
        let r = verify_family(n).unwrap();
        let expected = 1usize << (n - 3);
        ok &= r.all_passed() && r.instances == expected && r.distinct_configurations == expected;
        counts.push(r.distinct_configurations);
        for mask in 0..expected as u64 {
            let inst = gen_instance(n, &subset_from_mask(n, mask)).unwrap();
            ledger.record(&inst.configuration, &is_unique(&inst.configuration).unwrap());
        }
    }
    outcome(ok, format!("distinct unique instances for n = 5..12: {counts:?}"))
}

fn criterion_4(ledger: &mut WitnessLedger) -> Outcome {
    let mut adjacent = 0usize;
    let mut exceptions = Vec::new();
    let mut counts_ok = true;
    for n in 1..=7usize {
        let mut brute = 0u64;
        for p in Configuration::all(n) {
            let v = is_unique(&p).unwrap();
            ledger.record(&p, &v);
            brute += v.unique as u64;
            if p.nonadjacency_violations().is_empty() {
                continue;
            }
            adjacent += 1;
            let mut system = ConstraintSystem::new(n);
            for i in 1..=n {
                system.extend(build_inequalities(&p, i).unwrap()).unwrap();
            }
            if strict_feasible(&system, n).unwrap().is_feasible() {
                exceptions.push(p.to_string());
            }
        }
        if n <= 6 {
            counts_ok &= count_unique(n, 1).unwrap().unique_count == brute;
        }
    }
    outcome(
        exceptions.is_empty() && counts_ok,
        format!(
            "{adjacent} adjacent configurations (n <= 7), {} LP-feasible; census equals brute force for n <= 6: {counts_ok}",
            exceptions.len()
        ),
    )
}

fn criterion_5(ledger: &mut WitnessLedger) -> Outcome {
    let check = |s: &str| {
        let p: Configuration = s.parse().unwrap();
        let v = is_unique(&p).unwrap();
        (p, v)
    };
    let (_, a) = check("1,2,1");
    let (_, b) = check("2,4,2,1,2,1");
    let (p, d) = check("5,5,1,3,2,1");
    ledger.record(&p, &d);
    let c = nonadjacency_violations(&[5, 1, 3, 4, 1]);

    let a_ok = !a.unique && a.reason == Some(NonUniqueReason::Adjacency);
    let b_ok = !b.unique && b.reason == Some(NonUniqueReason::InfeasibleLp) && b.adjacent_pairs.is_empty();
    let c_ok = c == vec![(2, 3)];
    let d_ok = d.unique && d.witness.is_some();
    outcome(
        a_ok && b_ok && c_ok && d_ok,
        format!(
            "(1,2,1) not unique: {a_ok}; (2,4,2,1,2,1) LP-infeasible without adjacency: {b_ok}; \
             (5,1,3,4,1) pairs {c:?}; (5,5,1,3,2,1) unique with witness {:?}",
            d.witness.as_ref().map(|w| w.iter().map(|v| v.to_string()).collect::<Vec<_>>())
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, u) in [(5usize, 36i64), (6, 148)] {
        let est = estimate(n, 20000, 606).unwrap();
        let within = est.within_standard_errors(&BigRational::from_integer(u.into()), 3);
        let report = markov_test(&est.samples, n).unwrap();
        ok &= within;
        parts.push(format!(
            "n={n}: mean {:.3} (se {}) vs U={u}: {within}",
            est.mean.numer().to_string().parse::<f64>().unwrap() / est.mean.denom().to_string().parse::<f64>().unwrap(),
            report.standard_error
        ));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let got: Vec<String> = [6048u64, 439296]
        .iter()
        .map(|&c| percent(&confidence_single(&BigUint::from(c)).unwrap()))
        .collect();
    outcome(
        got == ["99.98346560846560", "99.99977236305360"],
        format!("c=6048 -> {}%, c=439296 -> {}%", got[0], got[1]),
    )
}

fn criterion_8() -> Outcome {
    let table = [
        "0.8", "1.0", "1.3", "2.0", "3.3", "6.0", "11.6", "24.0", "52.3", "120.0", "287.9", "720.0", "1871.3", "5040.0",
    ];
    let mut mismatches = Vec::new();
    for (n, expected) in (1..=14u64).zip(table) {
        let got = gamma_half_factorial(n).truncated(1);
        if got != expected {
            mismatches.push(format!("n={n}: {got} vs {expected}"));
        }
    }
    let detail = if mismatches.is_empty() {
        "all 14 truncated values match".to_string()
    } else {
        format!("mismatches under truncation: {}", mismatches.join(", "))
    };
    outcome(mismatches.is_empty(), detail)
}

fn criterion_9(ledger: &WitnessLedger) -> Outcome {
    outcome(
        ledger.seen > 0 && ledger.bad.is_empty(),
        format!("{} unique verdicts re-verified, {} bad {:?}", ledger.seen, ledger.bad.len(), ledger.bad),
    )
}

fn criterion_large_n() -> Outcome {
    let n = 20;
    let est = estimate(n, 1000, 20).unwrap();
    let report = markov_test(&est.samples, n).unwrap();
    let products = est.samples.iter().all(|s| s.product_matches());
    let mut completed = 0usize;
    let mut paths_ok = true;
    for p in est.samples.iter().filter_map(|s| s.path.as_ref()) {
        completed += 1;
        paths_ok &= is_unique(p).unwrap().unique;
    }
    let b = gamma_half_factorial(n as u64);
    let b = b.as_integer().expect("n even").clone();
    let max = est.samples.iter().map(|s| s.x_value.clone()).max().unwrap();
    let c_ok = report.c_n == &max / &b && report.max == max;
    outcome(
        products && paths_ok && c_ok && completed > 0,
        format!(
            "{completed}/1000 completed paths unique: {paths_ok}; X = prod b_i: {products}; c_n = {} = floor(max/B): {c_ok}",
            report.c_n
        ),
    )
}

fn main() -> ExitCode {
    let mut ledger = WitnessLedger::default();
    let mut unexpected = 0;
    let mut report = |id: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let expected_fail = EXPECTED_FAILURES.contains(&id);
        let status = if o.ok { "PASS" } else { "FAIL" };
        let note = match (o.ok, expected_fail) {
            (false, true) => " (expected failure)",
            (true, true) => " (unexpected pass)",
            _ => "",
        };
        if o.ok == expected_fail {
            unexpected += 1;
        }
        println!("criterion {id}: {status}{note} [{:.1}s] {}", t.elapsed().as_secs_f64(), o.detail);
    };
    report("1", &mut criterion_1);
    report("2", &mut criterion_2);
    report("3", &mut || criterion_3(&mut ledger));
    report("4", &mut || criterion_4(&mut ledger));
    report("5", &mut || criterion_5(&mut ledger));
    report("6", &mut criterion_6);
    report("7", &mut criterion_7);
    report("8", &mut criterion_8);
    report("9", &mut || criterion_9(&ledger));
    report("n=20", &mut criterion_large_n);
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criterion result(s) differ from expectations");
        ExitCode::FAILURE
    }
}
