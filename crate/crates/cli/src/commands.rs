use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use mcsp_core::census::{run_census, CensusOptions, Progress};
use mcsp_core::configurations::{is_unique_with, output_configurations, Configuration};
use mcsp_core::estimator::{estimate, markov_test};
use mcsp_core::family::{gen_instance, verify_family};
use mcsp_core::feasibility::Route;
use mcsp_core::kernels::{maxplus_conv, mcsp_naive, minplus_conv, window_maximizers, Sequence};
use mcsp_core::reductions::{conv_to_mcsp, decode_conv, mcsp_to_conv, recover_maxima, verify_equivalence};
use serde_json::{json, Value};

use crate::args::*;
use crate::manifest::RunManifest;

#[derive(Debug)]
pub enum Failure {
    Io(String),
    Runtime(String),
}

impl From<mcsp_core::Error> for Failure {
    fn from(e: mcsp_core::Error) -> Self {
        match e {
            mcsp_core::Error::Checkpoint(_) => Failure::Io(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

/// A finished command: the JSON report and its CSV and text renderings.
pub struct Outcome {
    pub report: Value,
    pub csv: String,
    pub text: String,
    /// False when a verification the command ran did not pass.
    pub ok: bool,
}

fn read_sequence(path: &Path, manifest: &mut RunManifest) -> Result<Sequence, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    manifest.record_input(path, &bytes);
    let text = String::from_utf8(bytes).map_err(|_| Failure::Runtime(format!("{} is not UTF-8", path.display())))?;
    Sequence::parse_text(&text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn pool(shards: usize) -> Result<rayon::ThreadPool, Failure> {
    if shards == 0 {
        return Err(Failure::Runtime("--shards must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(shards)
        .build()
        .map_err(|e| Failure::Runtime(format!("thread pool: {e}")))
}

pub fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Estimate(a) => Some(a.seed),
        Command::Reduce(ReduceArgs { action: ReduceAction::Verify(a) }) => Some(a.seed),
        _ => None,
    }
}

pub fn run(cmd: &Command, manifest: &mut RunManifest) -> Result<Outcome, Failure> {
    match cmd {
        Command::Mcsp(a) => mcsp(a, manifest),
        Command::Conv(a) => conv(a, manifest),
        Command::Reduce(r) => match &r.action {
            ReduceAction::Conv2mcsp(a) => reduce_conv2mcsp(a, manifest),
            ReduceAction::Mcsp2conv(a) => reduce_mcsp2conv(a, manifest),
            ReduceAction::Verify(a) => reduce_verify(a),
        },
        Command::Unique(a) => unique(a),
        Command::Census(a) => census(a),
        Command::Estimate(a) => estimate_cmd(a),
        Command::Family(a) => family(a),
    }
}

fn mcsp(args: &McspArgs, manifest: &mut RunManifest) -> Result<Outcome, Failure> {
    let a = read_sequence(&args.input, manifest)?;
    let profile = mcsp_naive(&a);
    let maximizers = window_maximizers(&a);
    let mut csv = String::from("length,maximum,position\n");
    let mut text = format!("n = {}\nlength  maximum  position  all maximizers\n", a.len());
    for len in 1..=a.len() {
        let (m, p) = (profile.maximum(len), profile.position(len));
        writeln!(csv, "{len},{m},{p}").unwrap();
        writeln!(text, "{len:>6}  {m:>7}  {p:>8}  {:?}", maximizers[len - 1]).unwrap();
    }
    Ok(Outcome {
        report: json!({ "n": a.len(), "maxima": to_value(&profile)["maxima"], "positions": profile.positions, "maximizers": maximizers }),
        csv,
        text,
        ok: true,
    })
}

fn conv(args: &ConvArgs, manifest: &mut RunManifest) -> Result<Outcome, Failure> {
    let x = read_sequence(&args.x, manifest)?;
    let y = read_sequence(&args.y, manifest)?;
    let z = if args.max { maxplus_conv(&x, &y)? } else { minplus_conv(&x, &y)? };
    let kind = if args.max { "max-plus" } else { "min-plus" };
    let mut csv = String::from("k,z\n");
    let mut text = format!("{kind} convolution, n = {}\n", x.len() - 1);
    for (k, v) in z.z.iter().enumerate() {
        writeln!(csv, "{k},{v}").unwrap();
        writeln!(text, "z_{k} = {v}").unwrap();
    }
    Ok(Outcome { report: json!({ "kind": kind, "n": x.len() - 1, "z": to_value(&z)["z"] }), csv, text, ok: true })
}

fn reduce_conv2mcsp(args: &ConvPairArgs, manifest: &mut RunManifest) -> Result<Outcome, Failure> {
    let x = read_sequence(&args.x, manifest)?;
    let y = read_sequence(&args.y, manifest)?;
    let inst = conv_to_mcsp(&x, &y)?;
    let decoded = decode_conv(&inst, &mcsp_naive(&inst.a))?;
    let direct = minplus_conv(&x, &y)?;
    let agrees = decoded == direct;
    let mut csv = String::from("index,a\n");
    for (i, v) in inst.a.iter().enumerate() {
        writeln!(csv, "{},{v}", i + 1).unwrap();
    }
    let text = format!(
        "n = {}\nS = {}\na = ({})\ndecoded z = ({})\nmatches direct convolution: {agrees}\n",
        inst.n,
        inst.big_constant,
        join(inst.a.as_slice()),
        join(&decoded.z),
    );
    Ok(Outcome {
        report: json!({ "instance": to_value(&inst), "decoded": to_value(&decoded)["z"], "matches_direct": agrees }),
        csv,
        text,
        ok: agrees,
    })
}

fn reduce_mcsp2conv(args: &McspArgs, manifest: &mut RunManifest) -> Result<Outcome, Failure> {
    let a = read_sequence(&args.input, manifest)?;
    let inst = mcsp_to_conv(&a);
    let z = minplus_conv(&inst.x, &inst.y)?;
    let recovered = recover_maxima(&inst, &z)?;
    let agrees = recovered == mcsp_naive(&a).maxima;
    let mut csv = String::from("index,x,y\n");
    for (i, (x, y)) in inst.x.iter().zip(inst.y.iter()).enumerate() {
        writeln!(csv, "{i},{x},{y}").unwrap();
    }
    let text = format!(
        "n = {}\nx = ({})\ny = ({})\nrecovered maxima = ({})\nmatches direct MCSP: {agrees}\n",
        inst.n,
        join(inst.x.as_slice()),
        join(inst.y.as_slice()),
        join(&recovered),
    );
    let recovered_json: Vec<String> = recovered.iter().map(|v| v.to_string()).collect();
    Ok(Outcome {
        report: json!({ "instance": to_value(&inst), "recovered_maxima": recovered_json, "matches_direct": agrees }),
        csv,
        text,
        ok: agrees,
    })
}

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn reduce_verify(args: &VerifyArgs) -> Result<Outcome, Failure> {
    let report = pool(args.shards)?.install(|| verify_equivalence(args.trials, args.max_n, args.seed))?;
    let mut csv = String::from("trial,conv_arity,mcsp_len,conv_to_mcsp_ok,mcsp_to_conv_ok\n");
    for t in &report.trials {
        writeln!(csv, "{},{},{},{},{}", t.trial, t.conv_arity, t.mcsp_len, t.conv_to_mcsp_ok, t.mcsp_to_conv_ok).unwrap();
    }
    let text = format!(
        "trials: {}\npassed: {}\nfailed: {}\nseed: {}\nmax arity: {}\n",
        report.trials.len(),
        report.passed,
        report.failed,
        report.seed,
        report.max_n
    );
    Ok(Outcome { report: to_value(&report), csv, text, ok: report.all_passed() })
}

fn unique(args: &UniqueArgs) -> Result<Outcome, Failure> {
    let p: Configuration = args.config.parse().map_err(|e: mcsp_core::Error| Failure::Runtime(e.to_string()))?;
    let route = match args.route {
        RouteArg::Alternative => Route::Alternative,
        RouteArg::Primal => Route::Primal,
    };
    let verdict = is_unique_with(&p, route)?;
    let round_trip = match verdict.witness_sequence() {
        Some(w) => Some(output_configurations(&w)? == vec![p.clone()]),
        None => None,
    };
    let witness: Vec<String> = verdict.witness.iter().flatten().map(|v| v.to_string()).collect();
    let reason = to_value(&verdict.reason);
    let csv = format!(
        "configuration,unique,reason,witness\n\"{p}\",{},{},\"{}\"\n",
        verdict.unique,
        reason.as_str().unwrap_or(""),
        witness.join(" ")
    );
    let mut text = format!("configuration: ({p})\nunique: {}\n", verdict.unique);
    if let Some(r) = reason.as_str() {
        writeln!(text, "reason: {r}").unwrap();
    }
    if !verdict.adjacent_pairs.is_empty() {
        writeln!(text, "adjacent pairs (i, j): {:?}", verdict.adjacent_pairs).unwrap();
    }
    if !witness.is_empty() {
        writeln!(text, "witness: ({})", witness.join(", ")).unwrap();
        writeln!(text, "witness reproduces exactly this configuration: {}", round_trip.unwrap_or(false)).unwrap();
    }
    let mut report = to_value(&verdict);
    report["configuration"] = to_value(&p);
    report["witness_round_trip"] = to_value(&round_trip);
    Ok(Outcome { report, csv, text, ok: round_trip != Some(false) })
}

fn census(args: &CensusArgs) -> Result<Outcome, Failure> {
    let opts = CensusOptions {
        shards: args.shards,
        checkpoint: args.checkpoint.clone(),
        checkpoint_interval: Duration::from_secs(args.checkpoint_interval),
        ..CensusOptions::default()
    };
    let show = args.progress;
    let r = run_census(args.n, &opts, |p: &Progress| {
        if show {
            eprintln!("census n={}: {}/{} units, {} unique so far", args.n, p.completed_units, p.total_units, p.running_count);
        }
    })?;
    let csv = format!("n,U(n),gamma(n/2+1),ratio\n{},{},{},{}\n", r.n, r.unique_count, r.gamma, r.ratio);
    let text = format!(
        "n  U(n)  (n/2)!  ratio\n{}  {}  {}  {}x\n\nnodes visited: {}\nLP calls: {}\nadjacency prunes: {}\nLP prunes: {}\nwork units: {} ({} resumed)\nelapsed: {} ms\n",
        r.n, r.unique_count, r.gamma, r.ratio, r.nodes_visited, r.lp_calls, r.adjacency_prunes, r.lp_prunes, r.work_units, r.resumed_units, r.elapsed_ms
    );
    Ok(Outcome { report: to_value(&r), csv, text, ok: true })
}

fn estimate_cmd(args: &EstimateArgs) -> Result<Outcome, Failure> {
    let est = pool(args.shards)?.install(|| estimate(args.n, args.samples, args.seed))?;
    let test = markov_test(&est.samples, args.n)?;
    let products_ok = est.samples.iter().all(|s| s.product_matches());
    let paths_ok = if args.verify_paths {
        let mut ok = true;
        for p in est.samples.iter().filter_map(|s| s.path.as_ref()) {
            ok &= mcsp_core::configurations::is_unique(p)?.unique;
        }
        Some(ok)
    } else {
        None
    };
    let opt = |s: &Option<String>| s.clone().unwrap_or_default();
    let csv = format!(
        "n,c_n,confidence_single,confidence_joint_bound\n{},{},{},{}\n",
        test.n,
        test.c_n,
        opt(&test.confidence_single_percent),
        opt(&test.confidence_joint_bound_percent)
    );
    let text = format!(
        "n = {}, k = {}, seed = {}\nmean X = {} (standard error {})\nmax X = {}\ndead paths: {}\nnull hypothesis: {} with (n/2)! = {}\nc_n = {}\nsingle-sample Markov confidence (Table 2 figure): {}%\nk-sample joint bound: {}%\nrejected: {}\n",
        test.n,
        test.k,
        args.seed,
        est.mean,
        test.standard_error,
        test.max,
        test.dead_paths,
        test.null_hypothesis,
        test.null_bound,
        test.c_n,
        test.confidence_single_percent.as_deref().unwrap_or("n/a"),
        test.confidence_joint_bound_percent.as_deref().unwrap_or("n/a"),
        test.rejected,
    );
    let mut report = json!({
        "n": est.n,
        "k": est.k,
        "seed": est.seed,
        "test": to_value(&test),
        "checks": { "products_match": products_ok, "paths_unique": paths_ok },
    });
    if args.include_samples {
        report["samples"] = to_value(&est.samples);
    }
    Ok(Outcome { report, csv, text, ok: products_ok && paths_ok != Some(false) })
}

fn parse_subset(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::Runtime(format!("bad subset element {t:?}"))))
        .collect()
}

fn family(args: &FamilyArgs) -> Result<Outcome, Failure> {
    if let Some(s) = &args.subset {
        let inst = gen_instance(args.n, &parse_subset(s)?)?;
        let mut csv = String::from("index,a,p\n");
        for i in 1..=inst.n {
            writeln!(csv, "{i},{},{}", inst.sequence.as_slice()[i - 1], inst.configuration.position(i)).unwrap();
        }
        let text = format!(
            "n = {}\nS = {:?}\nA = ({})\nP = ({})\n",
            inst.n,
            inst.subset,
            join(inst.sequence.as_slice()),
            inst.configuration
        );
        return Ok(Outcome { report: to_value(&inst), csv, text, ok: true });
    }
    let r = pool(args.shards)?.install(|| verify_family(args.n))?;
    let csv = format!(
        "n,instances,passed,distinct_configurations\n{},{},{},{}\n",
        r.n, r.instances, r.passed, r.distinct_configurations
    );
    let mut text = format!(
        "n = {}\ninstances: {}\npassed: {}\ndistinct configurations: {}\n",
        r.n, r.instances, r.passed, r.distinct_configurations
    );
    for f in &r.failures {
        writeln!(text, "FAILED S = {:?}: {:?}", f.subset, f).unwrap();
    }
    Ok(Outcome { report: to_value(&r), csv, text, ok: r.all_passed() })
}
