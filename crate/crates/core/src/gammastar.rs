//! The diagonal sequence `γ*` and the two desk-scale certificates that no
//! Lipschitz endpoint-fixing map from a thread with gaps bounded by `γ*`
//! onto a family thread exists.
//!
//! Step `k+1` of the construction runs, for every ordering `σ` of the
//! earlier indices, a sweep-and-select recursion on the gaps of the target
//! thread (sorted by decreasing length): starting from the largest gap, each
//! step adds the sweeping of the current gap by `K·γ*_{σ_i}` and moves to the
//! next gap not contained in the accumulated sweepings. The deepest gap
//! reached over all orderings bounds `γ*_{k+1}`.

use std::env;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cantor::{CantorError, GapStream};
use crate::exactnum::{IntervalUnion, OpenInterval, Rational};
use crate::lipmap::{lip_const, span, sweeping, LipError, PLMap};
use crate::thread::{Thread, ThreadError};

/// Default cap on `k_max`; step `k+1` walks all `k!` orderings.
pub const FACTORIAL_GUARD: usize = 7;
/// Default cap on `|source support| · |target support|` for the brute-force search.
pub const SEARCH_GUARD: usize = 1 << 22;
/// Name of the environment variable that raises search guards.
pub const GUARD_ENV: &str = "SKEIN_GUARD_OVERRIDE";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaStarError {
    #[error("k_max = {k_max} exceeds the factorial guard {guard}")]
    FactorialGuard { k_max: usize, guard: usize },
    #[error("family thread {family_index} cannot supply gap {needed} within a budget of {budget}")]
    DeepeningExhausted { family_index: usize, needed: usize, budget: usize },
    #[error("family thread {family_index} has measure bound {bound}, not above eps = {eps}")]
    MeasureViolation { family_index: usize, bound: Rational, eps: Rational },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("search space {candidates} exceeds the guard {guard}")]
    SearchGuard { candidates: usize, guard: usize },
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Thread(#[from] ThreadError),
    #[error(transparent)]
    Lip(#[from] LipError),
}

/// The configured guard, raised (never lowered) by `SKEIN_GUARD_OVERRIDE`.
pub fn effective_guard(default: usize) -> usize {
    env::var(GUARD_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(default, |o| o.max(default))
}

/// A target thread of the family: either backed by a gap stream (and so
/// deepenable on demand) or a fixed finite truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyMember {
    Stream { stream: GapStream, width: Rational },
    Fixed { thread: Thread },
}

impl FamilyMember {
    pub fn stream(stream: GapStream, width: Rational) -> Self {
        FamilyMember::Stream { stream, width }
    }

    pub fn width(&self) -> &Rational {
        match self {
            FamilyMember::Stream { width, .. } => width,
            FamilyMember::Fixed { thread } => thread.width(),
        }
    }

    /// Gaps currently known, by decreasing length.
    ///
    /// For a stream the gap lengths are the strictly decreasing `γ_i`, so
    /// emission order is length order and deepening only appends.
    pub fn known_gaps(&self) -> Vec<OpenInterval> {
        match self {
            FamilyMember::Stream { stream, .. } => stream.emitted().to_vec(),
            FamilyMember::Fixed { thread } => thread.gaps_by_length(),
        }
    }

    /// Make at least `n` gaps available, emitting at most `budget` in total.
    fn deepen(&mut self, n: usize, budget: usize, family_index: usize) -> Result<(), GammaStarError> {
        let exhausted = GammaStarError::DeepeningExhausted { family_index, needed: n, budget };
        match self {
            FamilyMember::Stream { stream, .. } => {
                if n > budget {
                    return Err(exhausted);
                }
                stream.ensure(n).map_err(|e| match e {
                    CantorError::GammaExhausted { .. } => exhausted,
                    other => other.into(),
                })
            }
            FamilyMember::Fixed { thread } => {
                if n > thread.gaps().len() {
                    return Err(exhausted);
                }
                Ok(())
            }
        }
    }

    /// Measure of the limit thread, bounded from below at the current depth.
    pub fn measure_lower_bound(&self) -> Rational {
        match self {
            FamilyMember::Stream { stream, .. } => stream.measure_lower_bound(),
            FamilyMember::Fixed { thread } => thread.measure(),
        }
    }

    /// The thread truncated to its `m` longest gaps.
    pub fn prefix_thread(&self, m: usize) -> Result<Thread, GammaStarError> {
        let mut me = self.clone();
        me.deepen(m, usize::MAX, 0)?;
        let gaps = me.known_gaps().into_iter().take(m).collect();
        Ok(Thread::new(Rational::one(), self.width().clone(), gaps)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaStarConfig {
    #[serde(rename = "K")]
    pub k: Rational,
    pub eps: Rational,
    pub k_max: usize,
    pub deepening_budget: usize,
    pub factorial_guard: usize,
}

impl GammaStarConfig {
    pub fn new(k: Rational, eps: Rational, k_max: usize) -> Self {
        GammaStarConfig { k, eps, k_max, deepening_budget: 512, factorial_guard: FACTORIAL_GUARD }
    }
}

/// One ordering's walk through the target gaps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingTrace {
    /// A permutation of `1..=k`.
    pub ordering: Vec<usize>,
    /// Selected gap indices `n_0 = 1 < n_1 < … < n_k` (1-based, by decreasing length).
    pub selected: Vec<usize>,
    /// `sweepings[i]` is the sweeping of gap `selected[i]` by `K·γ*_{ordering[i]}`.
    pub sweepings: Vec<OpenInterval>,
    pub n_sigma: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTrace {
    /// The index `k+1` of the term produced.
    pub step: usize,
    /// 0-based index into the family (the family is cycled).
    pub family_index: usize,
    /// Target gaps by decreasing length, as far as the step looked.
    pub gaps: Vec<OpenInterval>,
    pub orderings: Vec<OrderingTrace>,
    pub n_omega: usize,
    pub alpha: Rational,
    pub measure_lower_bound: Rational,
    pub gamma: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaStarRun {
    pub config: GammaStarConfig,
    pub rho: Rational,
    pub gammas: Vec<Rational>,
    pub steps: Vec<StepTrace>,
}

/// All permutations of `1..=k` in lexicographic order.
pub fn orderings(k: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (1..=k).collect();
    let mut out = vec![cur.clone()];
    loop {
        // Standard next-permutation step.
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

fn rho() -> Rational {
    Rational::frac(1, 2)
}

/// `2^{-(k+2)} · eps / K`, the dyadic half of the bound on `γ*_{k+1}`.
fn dyadic_bound(k: usize, cfg: &GammaStarConfig) -> Rational {
    Rational::pow2_neg(k as u32 + 2) * &cfg.eps / &cfg.k
}

/// `γ*_{k+1} = ρ · min(2^{-(k+2)} eps/K, α/K, γ*_k)`.
///
/// The last term keeps the sequence strictly decreasing when a later family
/// member has longer gaps than an earlier one.
fn next_gamma(k: usize, alpha: &Rational, prev: Option<&Rational>, cfg: &GammaStarConfig) -> Rational {
    let mut m = dyadic_bound(k, cfg).min(alpha / &cfg.k);
    if let Some(p) = prev {
        m = m.min(p.clone());
    }
    rho() * m
}

pub fn gamma_star_prefix(family: &[FamilyMember], cfg: &GammaStarConfig) -> Result<GammaStarRun, GammaStarError> {
    let pre = |m: &str| Err(GammaStarError::PreconditionFailed(m.to_string()));
    if family.is_empty() {
        return pre("the family is empty");
    }
    if cfg.k < Rational::one() {
        return pre("K must be at least 1");
    }
    if !cfg.eps.is_positive() {
        return pre("eps must be positive");
    }
    if cfg.k_max > cfg.factorial_guard {
        return Err(GammaStarError::FactorialGuard { k_max: cfg.k_max, guard: cfg.factorial_guard });
    }
    let mut family = family.to_vec();
    let mut gammas: Vec<Rational> = Vec::new();
    let mut steps = Vec::new();

    for step in 1..=cfg.k_max {
        let k = step - 1;
        let fi = k % family.len();
        let member = &mut family[fi];
        check_measure(member, fi, cfg)?;
        member.deepen(1, cfg.deepening_budget, fi)?;

        let mut traces = Vec::new();
        for sigma in orderings(k) {
            let mut selected = vec![1usize];
            let mut sweeps = Vec::with_capacity(k);
            let mut covered = IntervalUnion::new();
            for &j in &sigma {
                let cur = *selected.last().expect("nonempty");
                let radius = &cfg.k * &gammas[j - 1];
                let sw = sweeping(&member.known_gaps()[cur - 1], &radius);
                covered.insert(&sw);
                sweeps.push(sw);
                let mut n = cur + 1;
                loop {
                    member.deepen(n, cfg.deepening_budget, fi)?;
                    if !covered.covers(&member.known_gaps()[n - 1]) {
                        break;
                    }
                    n += 1;
                }
                selected.push(n);
            }
            let n_sigma = *selected.last().expect("nonempty");
            traces.push(OrderingTrace { ordering: sigma, selected, sweepings: sweeps, n_sigma });
        }
        check_measure(member, fi, cfg)?;

        let n_omega = traces.iter().map(|t| t.n_sigma).max().expect("at least one ordering");
        let gaps: Vec<OpenInterval> = member.known_gaps().into_iter().take(n_omega.max(max_selected(&traces))).collect();
        let alpha = gaps[n_omega - 1].length();
        let gamma = next_gamma(k, &alpha, gammas.last(), cfg);
        steps.push(StepTrace {
            step,
            family_index: fi,
            gaps,
            orderings: traces,
            n_omega,
            alpha,
            measure_lower_bound: member.measure_lower_bound(),
            gamma: gamma.clone(),
        });
        gammas.push(gamma);
    }
    Ok(GammaStarRun { config: cfg.clone(), rho: rho(), gammas, steps })
}

fn max_selected(traces: &[OrderingTrace]) -> usize {
    traces.iter().flat_map(|t| t.selected.iter().copied()).max().unwrap_or(1)
}

fn check_measure(member: &FamilyMember, family_index: usize, cfg: &GammaStarConfig) -> Result<(), GammaStarError> {
    let bound = member.measure_lower_bound();
    if bound <= cfg.eps {
        return Err(GammaStarError::MeasureViolation { family_index, bound, eps: cfg.eps.clone() });
    }
    Ok(())
}

/// Re-derive every recorded quantity of a run from the trace alone.
///
/// Checks, per ordering: the sweepings are the recorded gaps swept by the
/// recorded radii; every selected gap escapes the accumulated sweepings while
/// every skipped gap is covered by them; selected gaps get strictly shorter.
/// Per step: `n_Ω`, `α` and `γ*` follow, and `γ*_k < 2^{-(k+1)} eps / K`.
pub fn recheck_trace(run: &GammaStarRun) -> Result<(), String> {
    let cfg = &run.config;
    if run.gammas.len() != run.steps.len() {
        return Err("gamma count differs from step count".into());
    }
    for (idx, st) in run.steps.iter().enumerate() {
        let k = idx;
        let at = |m: String| format!("step {}: {m}", st.step);
        if st.step != idx + 1 {
            return Err(at("out of sequence".into()));
        }
        if st.gaps.windows(2).any(|w| w[0].length() < w[1].length()) {
            return Err(at("gaps are not sorted by decreasing length".into()));
        }
        let mut seen: Vec<&Vec<usize>> = st.orderings.iter().map(|o| &o.ordering).collect();
        seen.sort();
        seen.dedup();
        let expected = (1..=k).product::<usize>();
        if seen.len() != expected || st.orderings.len() != expected {
            return Err(at(format!("expected {expected} distinct orderings")));
        }
        for o in &st.orderings {
            let mut sorted = o.ordering.clone();
            sorted.sort();
            if sorted != (1..=k).collect::<Vec<_>>() {
                return Err(at(format!("{:?} is not a permutation of 1..={k}", o.ordering)));
            }
            recheck_ordering(o, st, &run.gammas, cfg).map_err(at)?;
        }
        let n_omega = st.orderings.iter().map(|o| o.n_sigma).max().unwrap_or(1);
        if n_omega != st.n_omega {
            return Err(at("n_omega is not the maximum of n_sigma".into()));
        }
        let alpha = st.gaps.get(n_omega - 1).ok_or_else(|| at("gap n_omega not recorded".into()))?.length();
        if alpha != st.alpha {
            return Err(at("alpha is not the length of gap n_omega".into()));
        }
        let gamma = next_gamma(k, &alpha, idx.checked_sub(1).map(|p| &run.gammas[p]), cfg);
        if gamma != st.gamma || gamma != run.gammas[idx] {
            return Err(at("gamma does not follow from alpha".into()));
        }
        let bound = Rational::pow2_neg(st.step as u32 + 1) * &cfg.eps / &cfg.k;
        if gamma >= bound {
            return Err(at(format!("gamma {gamma} is not below {bound}")));
        }
        if &cfg.k * &gamma >= alpha {
            return Err(at("K gamma is not below alpha".into()));
        }
        if idx > 0 && gamma >= run.gammas[idx - 1] {
            return Err(at("gammas are not strictly decreasing".into()));
        }
        if st.measure_lower_bound <= cfg.eps {
            return Err(at("measure bound is not above eps".into()));
        }
    }
    Ok(())
}

fn recheck_ordering(o: &OrderingTrace, st: &StepTrace, gammas: &[Rational], cfg: &GammaStarConfig) -> Result<(), String> {
    let k = o.ordering.len();
    if o.selected.len() != k + 1 || o.sweepings.len() != k || o.selected[0] != 1 {
        return Err(format!("{:?}: malformed selection", o.ordering));
    }
    if o.n_sigma != o.selected[k] {
        return Err(format!("{:?}: n_sigma is not the last selection", o.ordering));
    }
    let gap = |n: usize| st.gaps.get(n - 1).ok_or_else(|| format!("gap {n} not recorded"));
    let mut covered = IntervalUnion::new();
    for i in 0..k {
        let radius = &cfg.k * &gammas[o.ordering[i] - 1];
        let (prev, next) = (o.selected[i], o.selected[i + 1]);
        if sweeping(gap(prev)?, &radius) != o.sweepings[i] {
            return Err(format!("{:?}: sweeping {i} does not match", o.ordering));
        }
        covered.insert(&o.sweepings[i]);
        if next <= prev {
            return Err(format!("{:?}: selections do not increase", o.ordering));
        }
        if covered.covers(gap(next)?) {
            return Err(format!("{:?}: gap {next} lies inside the sweepings", o.ordering));
        }
        for skipped in prev + 1..next {
            if !covered.covers(gap(skipped)?) {
                return Err(format!("{:?}: gap {skipped} escapes the sweepings but was skipped", o.ordering));
            }
        }
        if gap(next)?.length() >= gap(prev)?.length() {
            return Err(format!("{:?}: gap {next} is not shorter than gap {prev}", o.ordering));
        }
    }
    Ok(())
}

/// Which source gap covers a block of target gaps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceSlot {
    /// The `i`-th longest source gap (1-based), bounded by the `i`-th budget.
    Budget(usize),
    /// Any later source gap, bounded by the last budget.
    Tail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAssignment {
    pub source: SourceSlot,
    pub budget: Rational,
    pub targets: Vec<OpenInterval>,
    pub span: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum JumpCertificate {
    Feasible {
        assignment: Vec<BlockAssignment>,
    },
    Infeasible {
        /// The analyzed target gaps, by position.
        analyzed: Vec<OpenInterval>,
        /// Target gaps no single source gap can jump even alone.
        uncoverable: Vec<OpenInterval>,
        states_explored: usize,
    },
}

/// Decide whether source gaps with the given length budgets can jump over
/// the `m` longest gaps of `target` under a `K`-Lipschitz monotone map.
///
/// Under a non-decreasing map every target gap is jumped by exactly one
/// source gap, and the target gaps jumped by one source gap form a run of
/// consecutive gaps (by position). The search therefore partitions the
/// analyzed gaps into position-consecutive blocks and assigns each block a
/// distinct source gap `C` with `K · length(C) >= span(block)`. Source gaps
/// beyond the listed budgets are bounded by the last budget and unlimited in
/// number.
pub fn jump_infeasibility(
    target: &Thread,
    budgets: &[Rational],
    k: &Rational,
    m: usize,
) -> Result<JumpCertificate, GammaStarError> {
    let pre = |s: String| Err(GammaStarError::PreconditionFailed(s));
    if !k.is_positive() {
        return pre("K must be positive".into());
    }
    if budgets.len() > 63 {
        return pre("at most 63 budgets are supported".into());
    }
    let limit = target.width() / k;
    for b in budgets {
        if !b.is_positive() || b >= &limit {
            return pre(format!("budget {b} must lie in (0, a_target / K = {limit})"));
        }
    }
    if m > target.gaps().len() {
        return pre(format!("m = {m} exceeds the {} available target gaps", target.gaps().len()));
    }
    let mut analyzed: Vec<OpenInterval> = target.gaps_by_length().into_iter().take(m).collect();
    analyzed.sort();

    let mut search = BlockSearch {
        gaps: &analyzed,
        budgets,
        k,
        dead: std::collections::HashSet::new(),
        explored: 0,
        chosen: Vec::new(),
    };
    let found = search.run(0, 0);
    let (mut chosen, explored) = (search.chosen, search.explored);
    if found {
        chosen.reverse();
        return Ok(JumpCertificate::Feasible { assignment: chosen });
    }
    let best = budgets.iter().max().map(|b| k * b).unwrap_or_else(Rational::zero);
    let uncoverable = analyzed.iter().filter(|g| g.length() > best).cloned().collect();
    Ok(JumpCertificate::Infeasible { analyzed, uncoverable, states_explored: explored })
}

struct BlockSearch<'a> {
    gaps: &'a [OpenInterval],
    budgets: &'a [Rational],
    k: &'a Rational,
    dead: std::collections::HashSet<(usize, u64)>,
    explored: usize,
    /// Filled in reverse on success.
    chosen: Vec<BlockAssignment>,
}

impl BlockSearch<'_> {
    fn run(&mut self, start: usize, used: u64) -> bool {
        if start == self.gaps.len() {
            return true;
        }
        if self.dead.contains(&(start, used)) {
            return false;
        }
        self.explored += 1;
        for end in start..self.gaps.len() {
            let block = &self.gaps[start..=end];
            let sp = span(block);
            let mut slots: Vec<(SourceSlot, Rational, u64)> = Vec::new();
            if let Some(last) = self.budgets.last() {
                slots.push((SourceSlot::Tail, last.clone(), used));
            }
            for (i, b) in self.budgets.iter().enumerate() {
                if used & (1 << i) == 0 {
                    slots.push((SourceSlot::Budget(i + 1), b.clone(), used | (1 << i)));
                }
            }
            for (slot, budget, next_used) in slots {
                if self.k * &budget >= sp && self.run(end + 1, next_used) {
                    self.chosen.push(BlockAssignment { source: slot, budget, targets: block.to_vec(), span: sp });
                    return true;
                }
            }
        }
        self.dead.insert((start, used));
        false
    }
}

/// Exhaustive search for a non-decreasing endpoint-fixing `K`-Lipschitz map
/// between grid samplings of `source` and `target`.
///
/// On a finite support the Lipschitz condition reduces to the endpoint
/// condition `d(F(0), F(l)) <= K · a_source` plus `d(F(x), F(x')) <= K |x' - x|`
/// for consecutive support points (the triangle inequality in the target
/// extends it to all pairs). Partial assignments that cannot be completed
/// are therefore determined by their last point and value, and are pruned.
/// Assignments are explored in lexicographic order of values; the first
/// complete one is returned.
pub fn brute_force_map_search(
    source: &Thread,
    target: &Thread,
    k: &Rational,
    grid_step: &Rational,
) -> Result<Option<PLMap>, GammaStarError> {
    brute_force_map_search_guarded(source, target, k, grid_step, effective_guard(SEARCH_GUARD))
}

pub fn brute_force_map_search_guarded(
    source: &Thread,
    target: &Thread,
    k: &Rational,
    grid_step: &Rational,
    guard: usize,
) -> Result<Option<PLMap>, GammaStarError> {
    if !grid_step.is_positive() || k.is_negative() {
        return Err(GammaStarError::PreconditionFailed("grid step must be positive and K non-negative".into()));
    }
    let xs = source.sample_points(grid_step);
    let vs = target.sample_points(grid_step);
    let candidates = xs.len().saturating_mul(vs.len());
    if candidates > guard {
        return Err(GammaStarError::SearchGuard { candidates, guard });
    }
    let ends = target.metric(&Rational::zero(), target.length());
    if ends > k * source.width() {
        return Ok(None);
    }
    let mut s = MapSearch {
        xs: &xs,
        vs: &vs,
        target,
        k,
        dead: vec![false; candidates],
        path: Vec::with_capacity(xs.len()),
    };
    if !s.run(0, 0) {
        return Ok(None);
    }
    let mut path = s.path;
    path.reverse();
    let points = xs.iter().cloned().zip(path.into_iter().map(|j| vs[j].clone())).collect();
    let map = PLMap::new(source.clone(), target.clone(), points)?;
    debug_assert!(&lip_const(&map) <= k);
    Ok(Some(map))
}

struct MapSearch<'a> {
    xs: &'a [Rational],
    vs: &'a [Rational],
    target: &'a Thread,
    k: &'a Rational,
    dead: Vec<bool>,
    /// Value indices, filled in reverse on success.
    path: Vec<usize>,
}

impl MapSearch<'_> {
    fn run(&mut self, i: usize, v: usize) -> bool {
        let last = self.xs.len() - 1;
        if i == last {
            if v == self.vs.len() - 1 {
                self.path.push(v);
                return true;
            }
            return false;
        }
        let cell = i * self.vs.len() + v;
        if self.dead[cell] {
            return false;
        }
        let reach = self.k * &(&self.xs[i + 1] - &self.xs[i]);
        for w in self.successors(v, &reach) {
            if self.run(i + 1, w) {
                self.path.push(v);
                return true;
            }
        }
        self.dead[cell] = true;
        false
    }

    /// Value indices `w >= v` with `d(vs[v], vs[w]) <= reach`, ascending.
    ///
    /// For `w >= v` the distance is `min(vs[w] - vs[v], vs[v] + l - vs[w] + a)`,
    /// so the admissible set is an initial run plus a final run.
    fn successors(&self, v: usize, reach: &Rational) -> Vec<usize> {
        let base = &self.vs[v];
        let straight_top = base + reach;
        let first_end = self.vs.partition_point(|x| x <= &straight_top);
        let wrap_from = base + self.target.length() + self.target.width() - reach;
        let second_start = self.vs.partition_point(|x| x < &wrap_from).max(first_end);
        let out: Vec<usize> = (v..first_end).chain(second_start..self.vs.len()).collect();
        debug_assert!(out.iter().all(|&w| &self.target.metric(base, &self.vs[w]) <= reach));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{build_thread, GammaRule, GammaSource};
    use crate::exactnum::q;
    use crate::fixtures::{t_a, t_line};

    fn half_bound_family() -> Vec<FamilyMember> {
        [q(1, 2), q(1, 3), q(1, 4)]
            .into_iter()
            .map(|w| FamilyMember::stream(GapStream::new(GammaSource::Rule(GammaRule::half_bound())).unwrap(), w))
            .collect()
    }

    #[test]
    fn permutation_listing() {
        assert_eq!(orderings(0), vec![Vec::<usize>::new()]);
        assert_eq!(orderings(3).len(), 6);
        assert_eq!(orderings(3)[1], vec![1, 3, 2]);
        assert_eq!(orderings(4).len(), 24);
    }

    #[test]
    fn first_term_by_hand() {
        let cfg = GammaStarConfig::new(q(2, 1), q(1, 4), 1);
        let run = gamma_star_prefix(&half_bound_family(), &cfg).unwrap();
        // 1/2 · min(1/4 · 1/2 · 1/4, 1/8 / 2) = 1/2 · 1/32
        assert_eq!(run.gammas, vec![q(1, 64)]);
    }

    #[test]
    fn five_terms_recheck() {
        let cfg = GammaStarConfig::new(q(2, 1), q(1, 4), 5);
        let run = gamma_star_prefix(&half_bound_family(), &cfg).unwrap();
        assert_eq!(run.gammas.len(), 5);
        recheck_trace(&run).unwrap();
        for (i, g) in run.gammas.iter().enumerate() {
            assert!(g < &(Rational::pow2_neg(i as u32 + 2) * q(1, 2) * q(1, 4)));
        }
    }

    #[test]
    fn tampered_trace_is_caught() {
        let cfg = GammaStarConfig::new(q(2, 1), q(1, 4), 3);
        let mut run = gamma_star_prefix(&half_bound_family(), &cfg).unwrap();
        run.steps[2].orderings[0].n_sigma += 1;
        assert!(recheck_trace(&run).is_err());
    }

    #[test]
    fn guards() {
        let cfg = GammaStarConfig::new(q(2, 1), q(1, 4), 8);
        assert_eq!(
            gamma_star_prefix(&half_bound_family(), &cfg),
            Err(GammaStarError::FactorialGuard { k_max: 8, guard: 7 })
        );
        let fixed = vec![FamilyMember::Fixed { thread: t_a() }];
        let cfg = GammaStarConfig::new(q(2, 1), q(1, 4), 5);
        assert!(matches!(gamma_star_prefix(&fixed, &cfg), Err(GammaStarError::DeepeningExhausted { .. })));
        let cfg = GammaStarConfig::new(q(2, 1), q(9, 10), 2);
        assert!(matches!(gamma_star_prefix(&fixed, &cfg), Err(GammaStarError::MeasureViolation { .. })));
    }

    #[test]
    fn certificate_examples() {
        let c = jump_infeasibility(&t_a(), &[q(1, 64)], &q(2, 1), 1).unwrap();
        assert!(matches!(c, JumpCertificate::Infeasible { ref uncoverable, .. } if uncoverable.len() == 1));
        let c = jump_infeasibility(&t_a(), &[q(1, 8)], &q(1, 1), 1).unwrap();
        assert!(matches!(c, JumpCertificate::Feasible { .. }));
        assert!(matches!(
            jump_infeasibility(&t_a(), &[q(1, 2)], &q(2, 1), 1),
            Err(GammaStarError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn certificate_blocks_share_a_gap() {
        // One source gap of budget 3/16 at K = 2 reaches 3/8 >= span of the two
        // right-hand gaps (67/96 - 1/2), but not of all three.
        let c = jump_infeasibility(&t_a(), &[q(3, 16), q(1, 128)], &q(2, 1), 3).unwrap();
        let JumpCertificate::Feasible { assignment } = c else { panic!("expected feasible") };
        assert_eq!(assignment.iter().map(|b| b.targets.len()).sum::<usize>(), 3);
    }

    #[test]
    fn brute_force_examples() {
        let id = brute_force_map_search(&t_line(), &t_line(), &q(1, 1), &q(1, 8)).unwrap().unwrap();
        assert_eq!(id.support(), id.values());
        assert_eq!(brute_force_map_search(&t_line(), &t_line(), &q(0, 1), &q(1, 8)).unwrap(), None);
        let src = build_thread(&[q(1, 64)], 1, q(1, 2)).unwrap();
        assert_eq!(brute_force_map_search(&src, &t_a(), &q(2, 1), &q(1, 128)).unwrap(), None);
        assert!(matches!(
            brute_force_map_search_guarded(&t_line(), &t_line(), &q(1, 1), &q(1, 128), 100),
            Err(GammaStarError::SearchGuard { .. })
        ));
    }

    #[test]
    fn brute_force_finds_a_jump_when_allowed() {
        // K = 8 lets a source gap of length 1/64 cover 1/8.
        let src = build_thread(&[q(1, 64)], 1, q(1, 2)).unwrap();
        let f = brute_force_map_search(&src, &t_a(), &q(8, 1), &q(1, 64)).unwrap().unwrap();
        assert!(lip_const(&f) <= q(8, 1));
        assert!(f.is_non_decreasing() && f.is_endpoint_fixing());
    }
}
