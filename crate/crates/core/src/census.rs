//! Pruned backtracking over the configuration tree, counting unique
//! configurations.
//!
//! Lengths are fixed in ascending order. A branch `p_i = j` survives when it
//! is not adjacent to any earlier maximum window and `Q(P,1) ∪ … ∪ Q(P,i)`
//! stays strictly feasible. Every leaf at depth `n` is one unique
//! configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configurations::{length_constraints, prefix_system, Configuration, PartialConfiguration};
use crate::error::{invalid, Error, Result};
use crate::feasibility::rows_strictly_feasible;
use crate::gamma::gamma_half_factorial;

pub const CHECKPOINT_VERSION: u32 = 1;

/// Whether fixing `p_i = j` makes the window of length `i` touch the maximum
/// window of some already fixed length `k`.
fn adjacent_to_prefix(prefix: &[usize], i: usize, j: usize) -> bool {
    prefix.iter().enumerate().any(|(idx, &pk)| {
        let k = idx + 1;
        pk + k == j || j + i == pk
    })
}

/// Algorithm-1 gate for one branch: adjacency first, then the exact LP on
/// `Q(P,1) ∪ … ∪ Q(P,i)` with `p_i = j`.
pub fn is_feasible_extension(prefix: &PartialConfiguration, i: usize, j: usize) -> Result<bool> {
    let n = prefix.n();
    if i != prefix.frontier() {
        return Err(invalid(format!(
            "extension at length {i} but lengths 1..{} are fixed",
            prefix.frontier() - 1
        )));
    }
    if i > n || j < 1 || j > n - i + 1 {
        return Err(invalid(format!("p_{i} = {j} out of range for n = {n}")));
    }
    if adjacent_to_prefix(prefix.fixed(), i, j) {
        return Ok(false);
    }
    let mut full = prefix.fixed().to_vec();
    full.push(j);
    let system = prefix_system(n, &full);
    let rows: Vec<&[i8]> = system.rows().iter().map(|r| r.coeffs.as_slice()).collect();
    rows_strictly_feasible(&rows, n)
}

/// Counters for one region of the tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub unique_count: u64,
    pub nodes_visited: u64,
    pub lp_calls: u64,
    pub adjacency_prunes: u64,
    pub lp_prunes: u64,
}

impl SearchStats {
    fn absorb(&mut self, other: &SearchStats) {
        self.unique_count += other.unique_count;
        self.nodes_visited += other.nodes_visited;
        self.lp_calls += other.lp_calls;
        self.adjacency_prunes += other.adjacency_prunes;
        self.lp_prunes += other.lp_prunes;
    }
}

/// DFS state: the fixed prefix and the rows of its strict system.
pub(crate) struct Walker {
    n: usize,
    precheck: bool,
    prefix: Vec<usize>,
    rows: Vec<Vec<i8>>,
    marks: Vec<usize>,
    pub(crate) stats: SearchStats,
}

impl Walker {
    pub(crate) fn new(n: usize, precheck: bool) -> Self {
        Self { n, precheck, prefix: Vec::with_capacity(n), rows: Vec::new(), marks: Vec::new(), stats: SearchStats::default() }
    }

    pub(crate) fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    /// Tries `p_i = j` for the next length; pushes it when feasible. Assumes
    /// the current prefix is itself feasible.
    pub(crate) fn try_push(&mut self, j: usize) -> Result<bool> {
        let i = self.prefix.len() + 1;
        self.stats.nodes_visited += 1;
        if self.precheck && adjacent_to_prefix(&self.prefix, i, j) {
            self.stats.adjacency_prunes += 1;
            return Ok(false);
        }
        self.marks.push(self.rows.len());
        // Q(P, n) is empty, so the last level never changes the system.
        if i < self.n {
            self.rows.extend(length_constraints(self.n, i, j).map(|c| c.coeffs));
            self.stats.lp_calls += 1;
            let rows: Vec<&[i8]> = self.rows.iter().map(Vec::as_slice).collect();
            if !rows_strictly_feasible(&rows, self.n)? {
                self.stats.lp_prunes += 1;
                let mark = self.marks.pop().expect("mark just pushed");
                self.rows.truncate(mark);
                return Ok(false);
            }
        }
        self.prefix.push(j);
        Ok(true)
    }

    pub(crate) fn pop(&mut self) {
        if self.prefix.pop().is_some() {
            let mark = self.marks.pop().expect("one mark per fixed length");
            self.rows.truncate(mark);
        }
    }

    /// Every `j` that passes the gate at the next level.
    pub(crate) fn feasible_extensions(&mut self) -> Result<Vec<usize>> {
        let i = self.prefix.len() + 1;
        let mut out = Vec::new();
        for j in 1..=self.n + 1 - i {
            if self.try_push(j)? {
                out.push(j);
                self.pop();
            }
        }
        Ok(out)
    }

    fn count_below(&mut self, sink: &mut Option<&mut Vec<Configuration>>) -> Result<()> {
        if self.prefix.len() == self.n {
            self.stats.unique_count += 1;
            if let Some(out) = sink.as_deref_mut() {
                out.push(Configuration::new(self.prefix.clone())?);
            }
            return Ok(());
        }
        let i = self.prefix.len() + 1;
        for j in 1..=self.n + 1 - i {
            if self.try_push(j)? {
                self.count_below(sink)?;
                self.pop();
            }
        }
        Ok(())
    }

    /// Moves to `prefix`, which must be feasible level by level.
    fn descend(&mut self, prefix: &[usize]) -> Result<()> {
        for &j in prefix {
            if !self.try_push(j)? {
                return Err(Error::Checkpoint(format!("work unit {prefix:?} is not a feasible prefix")));
            }
        }
        self.stats = SearchStats::default();
        Ok(())
    }
}

/// Feasible prefixes of length `depth` in lexicographic order, with the
/// cost of finding them.
fn work_units(n: usize, depth: usize, precheck: bool) -> Result<(Vec<Vec<usize>>, SearchStats)> {
    fn rec(w: &mut Walker, depth: usize, out: &mut Vec<Vec<usize>>) -> Result<()> {
        if w.prefix.len() == depth {
            out.push(w.prefix.clone());
            return Ok(());
        }
        let i = w.prefix.len() + 1;
        for j in 1..=w.n + 1 - i {
            if w.try_push(j)? {
                rec(w, depth, out)?;
                w.pop();
            }
        }
        Ok(())
    }
    let mut w = Walker::new(n, precheck);
    let mut out = Vec::new();
    rec(&mut w, depth, &mut out)?;
    Ok((out, w.stats))
}

fn run_unit(n: usize, precheck: bool, prefix: &[usize]) -> Result<SearchStats> {
    let mut w = Walker::new(n, precheck);
    w.descend(prefix)?;
    w.count_below(&mut None)?;
    Ok(w.stats)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkUnit {
    pub prefix: Vec<usize>,
    pub stats: Option<SearchStats>,
}

/// Resumable snapshot of a census run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub n: usize,
    pub adjacency_precheck: bool,
    pub units: Vec<WorkUnit>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Checkpoint(format!("cannot read {}: {e}", path.display())))?;
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| Error::Checkpoint(format!("malformed checkpoint {}: {e}", path.display())))?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported checkpoint version {}", cp.version)));
        }
        Ok(cp)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))?;
        fs::write(&tmp, text)
            .and_then(|_| fs::rename(&tmp, path))
            .map_err(|e| Error::Checkpoint(format!("cannot write {}: {e}", path.display())))
    }

    pub fn completed(&self) -> usize {
        self.units.iter().filter(|u| u.stats.is_some()).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Progress {
    pub completed_units: usize,
    pub total_units: usize,
    pub running_count: u64,
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub shards: usize,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_interval: Duration,
    /// Disabling this leaves every cut to the LP.
    pub adjacency_precheck: bool,
    /// Tree depth of a work unit; `None` picks two levels (one for tiny n).
    pub unit_depth: Option<usize>,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            shards: 1,
            checkpoint: None,
            checkpoint_interval: Duration::from_secs(30),
            adjacency_precheck: true,
            unit_depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub n: usize,
    pub unique_count: u64,
    pub nodes_visited: u64,
    pub lp_calls: u64,
    pub adjacency_prunes: u64,
    pub lp_prunes: u64,
    pub work_units: usize,
    pub resumed_units: usize,
    pub shards: usize,
    pub elapsed_ms: u64,
    /// `Γ(n/2+1)` cut to `gamma_precision` decimals.
    pub gamma: String,
    pub gamma_precision: usize,
    /// `U(n) / Γ(n/2+1)` cut to `ratio_precision` decimals.
    pub ratio: String,
    pub ratio_precision: usize,
}

pub const GAMMA_PRECISION: usize = 1;
pub const RATIO_PRECISION: usize = 2;

/// `U(n)` with default options.
pub fn count_unique(n: usize, shards: usize) -> Result<CensusReport> {
    let opts = CensusOptions { shards, ..CensusOptions::default() };
    run_census(n, &opts, |_| {})
}

pub fn run_census(n: usize, opts: &CensusOptions, progress: impl Fn(&Progress) + Sync) -> Result<CensusReport> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if opts.shards == 0 {
        return Err(invalid("shards must be at least 1"));
    }
    let started = Instant::now();
    let depth = opts.unit_depth.unwrap_or(if n >= 4 { 2 } else { 1 }).clamp(1, n);
    let (prefixes, root_stats) = work_units(n, depth, opts.adjacency_precheck)?;

    let fresh = Checkpoint {
        version: CHECKPOINT_VERSION,
        n,
        adjacency_precheck: opts.adjacency_precheck,
        units: prefixes.into_iter().map(|prefix| WorkUnit { prefix, stats: None }).collect(),
    };
    let state = match &opts.checkpoint {
        Some(path) if path.exists() => {
            let cp = Checkpoint::load(path)?;
            let same_units = cp.units.iter().map(|u| &u.prefix).eq(fresh.units.iter().map(|u| &u.prefix));
            if cp.n != n || cp.adjacency_precheck != opts.adjacency_precheck || !same_units {
                return Err(Error::Checkpoint(format!(
                    "{} belongs to a different census run",
                    path.display()
                )));
            }
            cp
        }
        _ => fresh,
    };
    let resumed_units = state.completed();
    let total_units = state.units.len();
    let pending: Vec<usize> = (0..total_units).filter(|&k| state.units[k].stats.is_none()).collect();

    let shared = Mutex::new((state, Instant::now()));
    let record = |k: usize, stats: SearchStats| -> Result<()> {
        let mut guard = shared.lock().expect("census state lock");
        let (cp, last_save) = &mut *guard;
        cp.units[k].stats = Some(stats);
        let snapshot = Progress {
            completed_units: cp.completed(),
            total_units,
            running_count: cp.units.iter().filter_map(|u| u.stats).map(|s| s.unique_count).sum(),
        };
        if let Some(path) = &opts.checkpoint {
            if last_save.elapsed() >= opts.checkpoint_interval {
                cp.save(path)?;
                *last_save = Instant::now();
            }
        }
        drop(guard);
        progress(&snapshot);
        Ok(())
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.shards)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let precheck = opts.adjacency_precheck;
    pool.install(|| {
        pending.par_iter().try_for_each(|&k| {
            let prefix = shared.lock().expect("census state lock").0.units[k].prefix.clone();
            let stats = run_unit(n, precheck, &prefix)?;
            record(k, stats)
        })
    })?;

    let (state, _) = shared.into_inner().expect("census state lock");
    if let Some(path) = &opts.checkpoint {
        state.save(path)?;
    }
    let mut total = root_stats;
    for unit in &state.units {
        total.absorb(&unit.stats.expect("every unit completed"));
    }
    let gamma = gamma_half_factorial(n as u64);
    Ok(CensusReport {
        n,
        unique_count: total.unique_count,
        nodes_visited: total.nodes_visited,
        lp_calls: total.lp_calls,
        adjacency_prunes: total.adjacency_prunes,
        lp_prunes: total.lp_prunes,
        work_units: total_units,
        resumed_units,
        shards: opts.shards,
        elapsed_ms: started.elapsed().as_millis() as u64,
        gamma: gamma.truncated(GAMMA_PRECISION),
        gamma_precision: GAMMA_PRECISION,
        ratio: gamma.ratio_truncated(&BigUint::from(total.unique_count), RATIO_PRECISION),
        ratio_precision: RATIO_PRECISION,
    })
}

/// Every unique configuration of size `n`, in lexicographic order.
pub fn unique_configurations(n: usize, adjacency_precheck: bool) -> Result<Vec<Configuration>> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut w = Walker::new(n, adjacency_precheck);
    let mut out = Vec::new();
    w.count_below(&mut Some(&mut out))?;
    Ok(out)
}

/// `⌈log₃ k⌉`: the height any ternary decision tree needs to separate `k`
/// outcomes.
pub fn lower_bound_from_count(k: &BigUint) -> Result<u32> {
    if k == &BigUint::from(0u32) {
        return Err(invalid("count must be at least 1"));
    }
    let mut power = BigUint::from(1u32);
    let mut h = 0u32;
    while &power < k {
        power *= 3u32;
        h += 1;
    }
    Ok(h)
}
