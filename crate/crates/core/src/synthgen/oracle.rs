//! Posterior `P(task | register codes, gold history)` derived from a
//! generator config.
//!
//! Three ways to get it:
//! - a full table by forward enumeration of the generative process, when the
//!   reachable state space is small;
//! - per query, by the same forward recursion restricted to states that can
//!   still reach the queried register (exact, no table);
//! - a table counted from a large generated sample.
//!
//! Table lookups back off from the full key to (task-independent acts,
//! history), then to history alone, then to the task prior. A query with
//! zero probability under the generator falls back to the prior.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::Mutex;

use crate::classifiers::{TaskDistribution, TaskScorer};
use crate::encoder::{FeatureSet, Layout, TaskHistory};
use crate::error::{Error, Result};
use crate::register::{initial_register, UserRegister};
use crate::rng::SeededRng;

use super::{Compiled, GeneratorConfig, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    /// Full table; fails with `StateSpaceTooLarge` past `state_limit`
    /// live states or table keys.
    Exact { state_limit: usize },
    /// Exact posterior computed on demand for each queried state.
    PerQuery,
    /// Table counted from at least `turns` generated user turns.
    MonteCarlo { turns: usize, seed: u64 },
    /// Full table when it fits, per-query otherwise.
    Auto { state_limit: usize },
}

impl Default for OracleMethod {
    fn default() -> Self {
        OracleMethod::Auto { state_limit: 1_000_000 }
    }
}

/// How the posterior is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleSource {
    Exact,
    PerQuery,
    MonteCarlo { turns: usize },
}

type Table = BTreeMap<Vec<u8>, Vec<f64>>;

#[derive(Debug, Clone, PartialEq)]
enum Backend {
    /// Full keys, then (ti-acts, history), then history.
    Tables([Table; 3]),
    Query {
        cfg: Box<Compiled>,
        survival: Vec<f64>,
        cache: QueryCache,
    },
}

/// Memoised per-query results. Not part of the oracle's identity.
#[derive(Default)]
struct QueryCache(Mutex<HashMap<Vec<u8>, Vec<f64>>>);

impl QueryCache {
    fn get_or_compute(&self, key: Vec<u8>, compute: impl FnOnce() -> Vec<f64>) -> Vec<f64> {
        if let Some(hit) = self.0.lock().expect("cache lock").get(&key) {
            return hit.clone();
        }
        let row = compute();
        self.0.lock().expect("cache lock").insert(key, row.clone());
        row
    }
}

impl Clone for QueryCache {
    fn clone(&self) -> Self {
        QueryCache(Mutex::new(self.0.lock().expect("cache lock").clone()))
    }
}

impl PartialEq for QueryCache {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl std::fmt::Debug for QueryCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "QueryCache({} entries)", self.0.lock().expect("cache lock").len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesOracle {
    layout: Layout,
    source: OracleSource,
    num_slots: usize,
    num_frames: usize,
    backend: Backend,
    prior: Vec<f64>,
}

/// Row-major key: slot codes, ti-act codes, frame codes, history
/// (task + 1, 0 for none).
fn full_key(register: &UserRegister, history: &TaskHistory) -> Vec<u8> {
    register
        .slots
        .iter()
        .chain(&register.ti_acts)
        .chain(&register.frames)
        .map(|c| c.value())
        .chain(history.window().iter().map(|h| h.map_or(0, |t| t as u8 + 1)))
        .collect()
}

fn add(table: &mut Table, key: Vec<u8>, label: usize, n: usize, w: f64) {
    table.entry(key).or_insert_with(|| vec![0.0; n])[label] += w;
}

fn normalised(row: &[f64]) -> Vec<f64> {
    let total: f64 = row.iter().sum();
    row.iter().map(|w| w / total).collect()
}

impl BayesOracle {
    fn from_counts(cfg: &Compiled, history: usize, source: OracleSource, full: Table) -> Self {
        let n = cfg.schema.num_tasks();
        let s = cfg.schema.slots().len();
        let f = cfg.schema.frames().len();
        let mut ti_hist = Table::new();
        let mut hist = Table::new();
        let mut prior = vec![0.0; n];
        for (key, row) in &full {
            let h = &key[s + 3 + f..];
            let k1: Vec<u8> = key[s..s + 3].iter().chain(h).copied().collect();
            for (label, &w) in row.iter().enumerate() {
                if w > 0.0 {
                    add(&mut ti_hist, k1.clone(), label, n, w);
                    add(&mut hist, h.to_vec(), label, n, w);
                    prior[label] += w;
                }
            }
        }
        BayesOracle {
            layout: Layout::new(&cfg.schema, history, FeatureSet::Full),
            source,
            num_slots: s,
            num_frames: f,
            backend: Backend::Tables([full, ti_hist, hist]),
            prior,
        }
    }

    fn per_query(cfg: &Compiled, history: usize) -> Self {
        BayesOracle {
            layout: Layout::new(&cfg.schema, history, FeatureSet::Full),
            source: OracleSource::PerQuery,
            num_slots: cfg.schema.slots().len(),
            num_frames: cfg.schema.frames().len(),
            prior: label_marginal(cfg),
            backend: Backend::Query {
                cfg: Box::new(cfg.clone()),
                survival: cfg.survival(),
                cache: QueryCache::default(),
            },
        }
    }

    pub fn source(&self) -> OracleSource {
        self.source
    }

    /// Distinct full keys with positive mass (0 for the per-query oracle).
    pub fn num_keys(&self) -> usize {
        match &self.backend {
            Backend::Tables(t) => t[0].len(),
            Backend::Query { .. } => 0,
        }
    }

    /// Expected number of user turns per label, normalised.
    pub fn prior(&self) -> Vec<f64> {
        normalised(&self.prior)
    }

    /// Normalised posterior for one state.
    pub fn posterior(&self, register: &UserRegister, history: &TaskHistory) -> Vec<f64> {
        match &self.backend {
            Backend::Tables(tables) => {
                let key = full_key(register, history);
                let (s, f) = (self.num_slots, self.num_frames);
                let h = &key[s + 3 + f..];
                let k1: Vec<u8> = key[s..s + 3].iter().chain(h).copied().collect();
                let row = tables[0]
                    .get(&key)
                    .or_else(|| tables[1].get(&k1))
                    .or_else(|| tables[2].get(h))
                    .unwrap_or(&self.prior);
                normalised(row)
            }
            Backend::Query { cfg, survival, cache } => {
                let row = cache.get_or_compute(full_key(register, history), || {
                    query_mass(cfg, survival, register, history)
                });
                if row.iter().sum::<f64>() > 0.0 {
                    normalised(&row)
                } else {
                    normalised(&self.prior)
                }
            }
        }
    }

    /// Every full-key row, normalised, in key order. Keys are printed as
    /// `slots|tiacts|frames|history` digit strings. Empty for the
    /// per-query oracle.
    pub fn table_rows(&self) -> Vec<(String, Vec<f64>)> {
        let Backend::Tables(tables) = &self.backend else {
            return Vec::new();
        };
        let (s, f) = (self.num_slots, self.num_frames);
        tables[0]
            .iter()
            .map(|(key, row)| {
                let digits = |b: &[u8]| b.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("");
                let hist = key[s + 3 + f..]
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let name = format!(
                    "{}|{}|{}|{}",
                    digits(&key[..s]),
                    digits(&key[s..s + 3]),
                    digits(&key[s + 3..s + 3 + f]),
                    hist
                );
                (name, normalised(row))
            })
            .collect()
    }
}

impl TaskScorer for BayesOracle {
    fn layout(&self) -> &Layout {
        &self.layout
    }

    fn score(&self, register: &UserRegister, history: &TaskHistory) -> Result<TaskDistribution> {
        if register.slots.len() != self.num_slots || register.frames.len() != self.num_frames {
            return Err(Error::invalid("register does not match the oracle's schema"));
        }
        if history.width() != self.layout.history {
            return Err(Error::LayoutMismatch {
                expected: format!("history {}", self.layout.history),
                actual: format!("history {}", history.width()),
            });
        }
        Ok(TaskDistribution::new(self.posterior(register, history)))
    }
}

/// Every (probability, carried codes, ti-act codes) outcome of one pattern
/// applied to `carried` (slot codes then frame codes).
fn pattern_outcomes(cfg: &Compiled, carried: &[u8], pattern: &Pattern) -> Vec<(f64, Vec<u8>, [u8; 3])> {
    let s = cfg.schema.slots().len();
    let lp = cfg.confidence.low_prob;
    let noise = cfg.slot_noise;
    let codes = [(1u8, 1.0 - lp), (2u8, lp)];

    let mut outs: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    outs.insert(carried.to_vec(), 1.0);
    let apply = |outs: &mut BTreeMap<Vec<u8>, f64>, branches: &[(usize, f64)]| {
        let mut next = BTreeMap::new();
        for (state, &p) in outs.iter() {
            for &(pos, pb) in branches {
                if pb == 0.0 {
                    continue;
                }
                if pos == usize::MAX {
                    *next.entry(state.clone()).or_insert(0.0) += p * pb;
                    continue;
                }
                for &(code, pc) in &codes {
                    if pc > 0.0 {
                        let mut st = state.clone();
                        st[pos] = code;
                        *next.entry(st).or_insert(0.0) += p * pb * pc;
                    }
                }
            }
        }
        *outs = next;
    };
    for &slot in &pattern.slots {
        // (position, probability); usize::MAX marks a dropped mention.
        let mut branches = vec![(slot, 1.0 - noise)];
        if noise > 0.0 {
            branches.push((usize::MAX, noise / 2.0));
            let targets = &cfg.confusions[slot];
            let each = noise / 2.0 / targets.len() as f64;
            branches.extend(targets.iter().map(|&o| (o, each)));
        }
        apply(&mut outs, &branches);
    }
    for &frame in &pattern.frames {
        apply(&mut outs, &[(s + frame, 1.0)]);
    }

    let mut ti: BTreeMap<[u8; 3], f64> = BTreeMap::new();
    ti.insert([0; 3], 1.0);
    for &a in &pattern.tiacts {
        let mut next = BTreeMap::new();
        for (state, &p) in &ti {
            for &(code, pc) in &codes {
                if pc > 0.0 {
                    let mut st = *state;
                    st[a] = code;
                    *next.entry(st).or_insert(0.0) += p * pc;
                }
            }
        }
        ti = next;
    }

    let mut result = Vec::with_capacity(outs.len() * ti.len());
    for (carried, p) in &outs {
        for (t, q) in &ti {
            result.push((p * q, carried.clone(), *t));
        }
    }
    result
}

const NO_TASK: u8 = u8::MAX;

/// One user turn from a state: calls `f(label, hidden, probability,
/// carried codes, ti-act codes)` for every outcome.
fn step(
    cfg: &Compiled,
    first: bool,
    carried: &[u8],
    hidden: u8,
    mut f: impl FnMut(usize, usize, f64, Vec<u8>, [u8; 3]),
) {
    let r = cfg.out_of_task_rate;
    let dist = if first { &cfg.start } else { &cfg.transition[hidden as usize] };
    for (h2, &q) in dist.iter().enumerate() {
        if q == 0.0 {
            continue;
        }
        for (oot, po) in [(false, 1.0 - r), (true, r)] {
            if po == 0.0 || (oot && cfg.out_of_task.is_none()) {
                continue;
            }
            let (label, patterns) = match (oot, cfg.out_of_task) {
                (true, Some(o)) => (o, &cfg.out_of_task_patterns),
                _ => (h2, &cfg.emission[h2]),
            };
            let total_w: f64 = patterns.iter().map(|pt| pt.weight).sum();
            for pattern in patterns.iter().filter(|pt| pt.weight > 0.0) {
                let base = q * po * pattern.weight / total_w;
                for (pe, codes, ti) in pattern_outcomes(cfg, carried, pattern) {
                    f(label, h2, base * pe, codes, ti);
                }
            }
        }
    }
}

fn exact(cfg: &Compiled, history: usize, state_limit: usize) -> Result<BayesOracle> {
    let n = cfg.schema.num_tasks();
    let s = cfg.schema.slots().len();
    let f = cfg.schema.frames().len();
    // State: carried codes (slots, frames), history bytes, hidden task.
    let mut states: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    states.insert(vec![0; s + f + history].into_iter().chain([NO_TASK]).collect(), 1.0);
    let mut table = Table::new();

    for (t, &reach) in cfg.survival().iter().enumerate() {
        let mut next: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        let mut too_large = false;
        for (state, &p) in &states {
            let carried = &state[..s + f];
            let hist = &state[s + f..s + f + history];
            let hidden = state[s + f + history];
            step(cfg, t == 0, carried, hidden, |label, h2, pr, codes, ti| {
                let mass = p * pr;
                let key: Vec<u8> = codes[..s]
                    .iter()
                    .chain(&ti)
                    .chain(&codes[s..])
                    .chain(hist)
                    .copied()
                    .collect();
                add(&mut table, key, label, n, reach * mass);
                let mut st = codes;
                if history > 0 {
                    st.extend_from_slice(&hist[1..]);
                    st.push(label as u8 + 1);
                }
                st.push(h2 as u8);
                *next.entry(st).or_insert(0.0) += mass;
                too_large |= next.len() > state_limit || table.len() > state_limit;
            });
            if too_large {
                return Err(Error::StateSpaceTooLarge { limit: state_limit });
            }
        }
        states = next;
    }
    Ok(BayesOracle::from_counts(cfg, history, OracleSource::Exact, table))
}

/// Length of the longest prefix of `labels` that ends the sequence
/// `labels[..matched]` followed by `next`.
fn advance(labels: &[u8], matched: usize, next: u8) -> usize {
    let mut seq = labels[..matched].to_vec();
    seq.push(next);
    (0..=labels.len().min(seq.len()))
        .rev()
        .find(|&j| seq.ends_with(&labels[..j]))
        .unwrap_or(0)
}

/// Distribution of the set of positions one pattern writes (slots, then
/// frames, as bits). Outcomes touching a position outside `allowed` are
/// dropped.
fn write_sets(cfg: &Compiled, pattern: &Pattern, allowed: u128) -> Vec<(f64, u128)> {
    let s = cfg.schema.slots().len();
    let noise = cfg.slot_noise;
    let mut outs: BTreeMap<u128, f64> = BTreeMap::new();
    outs.insert(0, 1.0);
    let mut apply = |branches: &[(usize, f64)]| {
        let mut next = BTreeMap::new();
        for (&bits, &p) in &outs {
            for &(pos, pb) in branches {
                if pb == 0.0 {
                    continue;
                }
                let set = if pos == usize::MAX { bits } else { bits | 1u128 << pos };
                if set & !allowed == 0 {
                    *next.entry(set).or_insert(0.0) += p * pb;
                }
            }
        }
        outs = next;
    };
    for &slot in &pattern.slots {
        let mut branches = vec![(slot, 1.0 - noise)];
        if noise > 0.0 {
            branches.push((usize::MAX, noise / 2.0));
            let targets = &cfg.confusions[slot];
            let each = noise / 2.0 / targets.len() as f64;
            branches.extend(targets.iter().map(|&o| (o, each)));
        }
        apply(&branches);
    }
    for &frame in &pattern.frames {
        apply(&[(s + frame, 1.0)]);
    }
    outs.into_iter().map(|(bits, p)| (p, bits)).collect()
}

fn code_probability(code: u8, low_prob: f64) -> f64 {
    match code {
        1 => 1.0 - low_prob,
        2 => low_prob,
        _ => 0.0,
    }
}

/// Probability that a turn emitted with `pattern` shows exactly `target`
/// as its task-independent act codes.
fn ti_probability(pattern: &Pattern, target: [u8; 3], low_prob: f64) -> f64 {
    (0..3)
        .map(|a| {
            if pattern.tiacts.contains(&a) {
                code_probability(target[a], low_prob)
            } else if target[a] == 0 {
                1.0
            } else {
                0.0
            }
        })
        .product()
}

/// A pattern prepared for one query: its probability within the task, its
/// write-set distribution and the chance of matching the queried ti-acts.
struct Prepared {
    weight: f64,
    writes: Vec<(f64, u128)>,
    ti: f64,
}

fn prepare(cfg: &Compiled, patterns: &[Pattern], allowed: u128, ti_target: [u8; 3]) -> Vec<Prepared> {
    let total: f64 = patterns.iter().map(|p| p.weight).sum();
    patterns
        .iter()
        .filter(|p| p.weight > 0.0)
        .map(|p| Prepared {
            weight: p.weight / total,
            writes: write_sets(cfg, p, allowed),
            ti: ti_probability(p, ti_target, cfg.confidence.low_prob),
        })
        .collect()
}

/// Unnormalised `sum_t P(turn t exists, label, register, history)` for one
/// queried state.
///
/// Every mention draws a fresh confidence, so given which positions were
/// ever written the final codes are independent per position. The forward
/// state therefore keeps only the written set, pruned to positions known
/// in the query since codes never return to unknown. The history window is
/// tracked as the length of the matched prefix of its label sequence.
fn query_mass(cfg: &Compiled, survival: &[f64], register: &UserRegister, history: &TaskHistory) -> Vec<f64> {
    let n = cfg.schema.num_tasks();
    let mut out = vec![0.0; n];
    let codes: Vec<u8> = register.slots.iter().chain(&register.frames).map(|c| c.value()).collect();
    let ti_target = register.ti_acts.map(|c| c.value());
    let lp = cfg.confidence.low_prob;
    let code_factor: f64 = codes.iter().filter(|&&c| c != 0).map(|&c| code_probability(c, lp)).product();
    let target = codes
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .fold(0u128, |m, (i, _)| m | 1u128 << i);
    let window = history.window();
    let empty = window.iter().take_while(|h| h.is_none()).count();
    let Some(labels) = window[empty..]
        .iter()
        .map(|h| h.filter(|&t| t < n).map(|t| t as u8))
        .collect::<Option<Vec<u8>>>()
    else {
        return out;
    };
    if code_factor == 0.0 {
        return out;
    }
    let k = labels.len();
    // A window with empty cells only occurs at turn k.
    let fixed = (empty > 0).then_some(k);

    let emission: Vec<Vec<Prepared>> = cfg.emission.iter().map(|p| prepare(cfg, p, target, ti_target)).collect();
    let oot = prepare(cfg, &cfg.out_of_task_patterns, target, ti_target);
    let r = cfg.out_of_task_rate;

    // Sparse transition rows; row `n` is the start distribution.
    let rows: Vec<Vec<(usize, f64)>> = cfg
        .transition
        .iter()
        .chain([&cfg.start])
        .map(|row| row.iter().copied().enumerate().filter(|&(_, q)| q > 0.0).collect())
        .collect();
    let pack = |set: u128, hidden: usize, matched: usize| set << 16 | (hidden as u128) << 8 | matched as u128;
    let labels_of = |h2: usize| {
        let own = (r < 1.0).then_some(h2);
        let oot = cfg.out_of_task.filter(|_| r > 0.0);
        own.into_iter().chain(oot)
    };

    // Fewest turns from (hidden, matched) until the window matches; states
    // that cannot get there before the last possible query turn are dropped.
    let mut dist = vec![vec![usize::MAX; k + 1]; n + 1];
    for row in &mut dist {
        row[k] = 0;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for h in 0..=n {
            for m in 0..k {
                let best = rows[h]
                    .iter()
                    .flat_map(|&(h2, _)| labels_of(h2).map(move |l| (h2, l)))
                    .map(|(h2, l)| dist[h2][advance(&labels, m, l as u8)])
                    .min()
                    .unwrap_or(usize::MAX)
                    .saturating_add(1);
                if best < dist[h][m] {
                    dist[h][m] = best;
                    changed = true;
                }
            }
        }
    }
    let horizon = fixed.unwrap_or(survival.len().saturating_sub(1));

    let mut states = States::default();
    states.add(pack(0, n, 0), 1.0);
    for (t, &reach) in survival.iter().enumerate() {
        if states.entries.is_empty() || fixed.is_some_and(|ft| t > ft) {
            break;
        }
        let query_turn = fixed.is_none_or(|ft| t == ft);
        let mut next = States::default();
        for &(key, p) in &states.entries {
            let (written, hidden, matched) = (key >> 16, (key >> 8) as u8 as usize, key as u8 as usize);
            for &(h2, q) in &rows[hidden] {
                for (is_oot, po) in [(false, 1.0 - r), (true, r)] {
                    if po == 0.0 || (is_oot && cfg.out_of_task.is_none()) {
                        continue;
                    }
                    let (label, prepared) = match (is_oot, cfg.out_of_task) {
                        (true, Some(o)) => (o, &oot),
                        _ => (h2, &emission[h2]),
                    };
                    let m2 = advance(&labels, matched, label as u8);
                    let alive = (t + 1).saturating_add(dist[h2][m2]) <= horizon;
                    for pat in prepared {
                        let base = p * q * po * pat.weight;
                        for &(pe, bits) in &pat.writes {
                            let mass = base * pe;
                            let set = written | bits;
                            if query_turn && matched == k && set == target {
                                out[label] += reach * mass * pat.ti * code_factor;
                            }
                            if alive {
                                next.add(pack(set, h2, m2), mass);
                            }
                        }
                    }
                }
            }
        }
        states = next;
    }
    out
}

/// Multiplicative hash for the packed forward-state keys.
#[derive(Default)]
struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(u64::from(b));
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = (self.0.rotate_left(5) ^ v).wrapping_mul(0x517c_c1b7_2722_0a95);
    }

    fn write_u128(&mut self, v: u128) {
        self.write_u64(v as u64);
        self.write_u64((v >> 64) as u64);
    }
}

/// Forward states in first-insertion order, so sums are reproducible.
#[derive(Default)]
struct States {
    index: HashMap<u128, usize, BuildHasherDefault<KeyHasher>>,
    entries: Vec<(u128, f64)>,
}

impl States {
    fn add(&mut self, key: u128, mass: f64) {
        match self.index.entry(key) {
            Entry::Occupied(e) => self.entries[*e.get()].1 += mass,
            Entry::Vacant(e) => {
                e.insert(self.entries.len());
                self.entries.push((key, mass));
            }
        }
    }
}

/// Expected user turns per label.
fn label_marginal(cfg: &Compiled) -> Vec<f64> {
    let n = cfg.schema.num_tasks();
    let r = cfg.out_of_task_rate;
    let mut prior = vec![0.0; n];
    let mut hidden = vec![0.0; n];
    for (t, &reach) in cfg.survival().iter().enumerate() {
        let mut next = vec![0.0; n];
        if t == 0 {
            next.clone_from(&cfg.start);
        } else {
            for (h, &p) in hidden.iter().enumerate() {
                for (h2, &q) in cfg.transition[h].iter().enumerate() {
                    next[h2] += p * q;
                }
            }
        }
        for (h, &p) in next.iter().enumerate() {
            match cfg.out_of_task {
                Some(o) => {
                    prior[h] += reach * p * (1.0 - r);
                    prior[o] += reach * p * r;
                }
                None => prior[h] += reach * p,
            }
        }
        hidden = next;
    }
    prior
}

fn per_query(cfg: &Compiled, history: usize) -> Result<BayesOracle> {
    if cfg.schema.slots().len() + cfg.schema.frames().len() > 112 {
        return Err(Error::invalid("per-query oracle supports at most 112 slots and frames"));
    }
    Ok(BayesOracle::per_query(cfg, history))
}

fn monte_carlo(cfg: &Compiled, history: usize, turns: usize, seed: u64) -> Result<BayesOracle> {
    let n = cfg.schema.num_tasks();
    let theta = cfg.schema.threshold();
    let mut rng = SeededRng::new(seed);
    let mut table = Table::new();
    let mut counted = 0;
    let mut i = 0usize;
    while counted < turns {
        let dialog = cfg.dialog(&mut rng, format!("mc-{i}"));
        i += 1;
        let mut reg = initial_register(&cfg.schema);
        let mut hist = TaskHistory::new(history);
        for (obs, gold) in dialog.user_turns() {
            reg = reg.update(obs, &cfg.schema, theta)?;
            add(&mut table, full_key(&reg, &hist), gold, n, 1.0);
            hist.push(gold);
            counted += 1;
        }
    }
    Ok(BayesOracle::from_counts(
        cfg,
        history,
        OracleSource::MonteCarlo { turns: counted },
        table,
    ))
}

/// Builds the oracle for history width `history` (gold labels).
pub fn bayes_oracle(cfg: &GeneratorConfig, history: usize, method: OracleMethod) -> Result<BayesOracle> {
    let compiled = cfg.compile()?;
    if compiled.schema.num_tasks() >= NO_TASK as usize {
        return Err(Error::invalid("the oracle supports at most 254 tasks"));
    }
    match method {
        OracleMethod::Exact { state_limit } => exact(&compiled, history, state_limit),
        OracleMethod::PerQuery => per_query(&compiled, history),
        OracleMethod::MonteCarlo { turns, seed } => monte_carlo(&compiled, history, turns, seed),
        OracleMethod::Auto { state_limit } => match exact(&compiled, history, state_limit) {
            Err(Error::StateSpaceTooLarge { .. }) => per_query(&compiled, history),
            other => other,
        },
    }
}
