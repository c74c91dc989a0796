//! Maps between threads, known on a finite support.
//!
//! A [`PLMap`] is interpreted as defined only on its support: the support,
//! with the domain's metric, is itself a (finite) thread, and every
//! quantifier below ranges over it. In particular the "gaps" of the domain
//! are the open intervals between consecutive support points; the stored
//! gaps of the domain thread are always among them because their endpoints
//! are required to be in the support.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{OpenInterval, Rational};
use crate::thread::{ExtendedInterval, Thread, ThreadError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LipError {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("map does not fix the endpoints")]
    NotEndpointFixing,
    #[error("map is not non-decreasing")]
    NotMonotone,
    #[error("support gap {gap} is at least a_S / Lip")]
    PreconditionGap { gap: OpenInterval },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("{0} is not a gap here")]
    NotAGap(OpenInterval),
    #[error("value at {0} is not in N")]
    NotInN(Rational),
    #[error("Lipschitz constant increased from {before} to {after}")]
    LipIncreased { before: Rational, after: Rational },
    #[error("no candidate within tolerance of F({end})")]
    NoNearbyPoint { end: Rational },
    #[error(transparent)]
    Thread(#[from] ThreadError),
}

/// A map between threads given by its values on a finite support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PLMapRepr", into = "PLMapRepr")]
pub struct PLMap {
    domain: Thread,
    codomain: Thread,
    xs: Vec<Rational>,
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct PLMapRepr {
    domain: Thread,
    codomain: Thread,
    points: Vec<(Rational, Rational)>,
}

impl TryFrom<PLMapRepr> for PLMap {
    type Error = LipError;
    fn try_from(r: PLMapRepr) -> Result<Self, LipError> {
        PLMap::new(r.domain, r.codomain, r.points)
    }
}

impl From<PLMap> for PLMapRepr {
    fn from(m: PLMap) -> Self {
        PLMapRepr { domain: m.domain, codomain: m.codomain, points: m.xs.into_iter().zip(m.values).collect() }
    }
}

impl PLMap {
    /// Validates that the support contains `0`, `l` and every gap endpoint of
    /// the domain, and that all coordinates and values are thread points.
    pub fn new(domain: Thread, codomain: Thread, mut points: Vec<(Rational, Rational)>) -> Result<Self, LipError> {
        points.sort_by(|a, b| a.0.cmp(&b.0));
        for w in points.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(LipError::InvalidMap(format!("{} listed twice", w[0].0)));
            }
        }
        for (x, v) in &points {
            if !domain.contains_point(x) {
                return Err(LipError::InvalidMap(format!("{x} is not a domain point")));
            }
            if !codomain.contains_point(v) {
                return Err(LipError::InvalidMap(format!("value {v} at {x} is not a codomain point")));
            }
        }
        let (xs, values): (Vec<_>, Vec<_>) = points.into_iter().unzip();
        let mut required = vec![Rational::zero(), domain.length().clone()];
        for g in domain.gaps() {
            required.push(g.left().clone());
            required.push(g.right().clone());
        }
        for r in required {
            if xs.binary_search(&r).is_err() {
                return Err(LipError::InvalidMap(format!("support is missing {r}")));
            }
        }
        Ok(PLMap { domain, codomain, xs, values })
    }

    /// Build from a sampled support and a value function.
    pub fn from_fn(
        domain: Thread,
        codomain: Thread,
        support: &[Rational],
        f: impl Fn(&Rational) -> Rational,
    ) -> Result<Self, LipError> {
        let points = support.iter().map(|x| (x.clone(), f(x))).collect();
        PLMap::new(domain, codomain, points)
    }

    pub fn domain(&self) -> &Thread {
        &self.domain
    }

    pub fn codomain(&self) -> &Thread {
        &self.codomain
    }

    pub fn support(&self) -> &[Rational] {
        &self.xs
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn points(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.xs.iter().zip(&self.values)
    }

    pub fn value_at(&self, x: &Rational) -> Option<&Rational> {
        self.xs.binary_search(x).ok().map(|i| &self.values[i])
    }

    pub fn is_endpoint_fixing(&self) -> bool {
        self.values.first().is_some_and(|v| v.is_zero())
            && self.values.last() == Some(self.codomain.length())
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// Open intervals between consecutive support points.
    pub fn support_gaps(&self) -> Vec<OpenInterval> {
        self.xs
            .windows(2)
            .map(|w| OpenInterval::new(w[0].clone(), w[1].clone()).expect("sorted support"))
            .collect()
    }

    fn is_support_gap(&self, g: &OpenInterval) -> bool {
        match self.xs.binary_search(g.left()) {
            Ok(i) => self.xs.get(i + 1) == Some(g.right()),
            Err(_) => false,
        }
    }

    fn with_values(&self, values: Vec<Rational>) -> PLMap {
        PLMap { values, ..self.clone() }
    }

    fn require_endpoint_fixing(&self) -> Result<(), LipError> {
        if self.is_endpoint_fixing() {
            Ok(())
        } else {
            Err(LipError::NotEndpointFixing)
        }
    }

    fn require_monotone(&self) -> Result<(), LipError> {
        if self.is_non_decreasing() {
            Ok(())
        } else {
            Err(LipError::NotMonotone)
        }
    }

    fn require_codomain_gap(&self, g: &OpenInterval) -> Result<(), LipError> {
        if self.codomain.gaps().contains(g) {
            Ok(())
        } else {
            Err(LipError::NotAGap(g.clone()))
        }
    }
}

/// Exact Lipschitz constant over all support pairs.
pub fn lip_const(f: &PLMap) -> Rational {
    let mut best = Rational::zero();
    let n = f.xs.len();
    for i in 0..n {
        for j in i + 1..n {
            let num = f.codomain.metric(&f.values[i], &f.values[j]);
            if num.is_zero() {
                continue;
            }
            let ratio = num / f.domain.metric(&f.xs[i], &f.xs[j]);
            if ratio > best {
                best = ratio;
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "witness", rename_all = "snake_case")]
pub enum IntervalWitness {
    /// `d(F(0), F(l)) > K · a_T`.
    Ends { distance: Rational, bound: Rational },
    /// `d(F(x), F(y)) > K · |y - x|`.
    Pair { x: Rational, y: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum IntervalVerdict {
    Accept,
    Reject(IntervalWitness),
}

/// The interval criterion: endpoint condition plus the straight-line bound
/// on every support pair. Equivalent to `lip_const(F) <= K`.
pub fn check_interval_criterion(f: &PLMap, k: &Rational) -> IntervalVerdict {
    let n = f.xs.len();
    let ends = f.codomain.metric(&f.values[0], &f.values[n - 1]);
    let bound = k * f.domain.width();
    if ends > bound {
        return IntervalVerdict::Reject(IntervalWitness::Ends { distance: ends, bound });
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = f.codomain.metric(&f.values[i], &f.values[j]);
            if d > k * &(&f.xs[j] - &f.xs[i]) {
                return IntervalVerdict::Reject(IntervalWitness::Pair { x: f.xs[i].clone(), y: f.xs[j].clone() });
            }
        }
    }
    IntervalVerdict::Accept
}

/// First support gap (longest first, ties leftmost) of length at least `threshold`.
fn long_support_gap(f: &PLMap, threshold: &Rational) -> Option<OpenInterval> {
    let mut gaps = f.support_gaps();
    gaps.sort_by(crate::thread::compare_by_length);
    gaps.into_iter().find(|g| &g.length() >= threshold)
}

/// `a_S / K`, or `None` for a constant map (no gap is ever too long).
fn gap_threshold(f: &PLMap, k: &Rational) -> Option<Rational> {
    f.codomain.width().checked_div(k)
}

/// Replace an endpoint-fixing map by a non-decreasing one without
/// increasing the Lipschitz constant.
///
/// With a support gap of length at least `a_S / Lip(F)` the result is the
/// two-step map jumping across that gap; otherwise it is the running maximum.
pub fn monotone_regularize(f: &PLMap) -> Result<PLMap, LipError> {
    f.require_endpoint_fixing()?;
    let k = lip_const(f);
    if let Some(gap) = gap_threshold(f, &k).and_then(|t| long_support_gap(f, &t)) {
        let top = f.codomain.length().clone();
        let values = f
            .xs
            .iter()
            .map(|x| if x <= gap.left() { Rational::zero() } else { top.clone() })
            .collect();
        return Ok(f.with_values(values));
    }
    let mut running = Rational::zero();
    let values = f
        .values
        .iter()
        .map(|v| {
            if v > &running {
                running = v.clone();
            }
            running.clone()
        })
        .collect();
    Ok(f.with_values(values))
}

/// Clamp the values of `F` into `[A, B]_S`, landing in `subthread(S, A, B)`.
///
/// Values of the result are in the coordinates of the subthread, i.e.
/// shifted by `-A`.
pub fn clip(f: &PLMap, a: &Rational, b: &Rational) -> Result<PLMap, LipError> {
    if a >= b {
        return Err(LipError::PreconditionFailed(format!("need A < B, got {a} >= {b}")));
    }
    let sub = f.codomain.subthread(a, b)?;
    let n = f.values.len();
    if &f.values[0] != a || &f.values[n - 1] != b {
        return Err(LipError::PreconditionFailed("need F(0) = A and F(l) = B".into()));
    }
    let k = lip_const(f);
    if let Some(gap) = gap_threshold(f, &k).and_then(|t| long_support_gap(f, &t)) {
        return Err(LipError::PreconditionGap { gap });
    }
    let values = f.values.iter().map(|v| v.clone().max(a.clone()).min(b.clone()) - a).collect();
    Ok(PLMap { domain: f.domain.clone(), codomain: sub, xs: f.xs.clone(), values })
}

/// Whether the support gap `ct` jumps over the codomain gap `cs`.
pub fn jumps_over(f: &PLMap, ct: &OpenInterval, cs: &OpenInterval) -> Result<bool, LipError> {
    f.require_monotone()?;
    if !f.is_support_gap(ct) {
        return Err(LipError::NotAGap(ct.clone()));
    }
    f.require_codomain_gap(cs)?;
    let lo = f.value_at(ct.left()).expect("support point");
    let hi = f.value_at(ct.right()).expect("support point");
    Ok(lo <= cs.left() && hi >= cs.right())
}

/// The support gap `(x₋, y₊)` jumping over the codomain gap `cs`.
///
/// `x₋` is the last preimage of the largest value `<= left(cs)`, `y₊` the
/// first preimage of the smallest value `>= right(cs)`.
pub fn find_jumping_gap(f: &PLMap, cs: &OpenInterval) -> Result<OpenInterval, LipError> {
    f.require_monotone()?;
    f.require_endpoint_fixing()?;
    f.require_codomain_gap(cs)?;
    let e_minus = f.values.iter().filter(|v| *v <= cs.left()).max().expect("F(0) = 0");
    let e_plus = f.values.iter().filter(|v| *v >= cs.right()).min().expect("F(l) = l_S");
    let x_minus = f.points().filter(|(_, v)| *v == e_minus).map(|(x, _)| x).max().expect("attained");
    let y_plus = f.points().filter(|(_, v)| *v == e_plus).map(|(x, _)| x).min().expect("attained");
    Ok(OpenInterval::new(x_minus.clone(), y_plus.clone()).expect("monotone map"))
}

/// `D_r(g) = (right - r, left + r)`: where a gap reachable within `r` of `g` may sit.
///
/// Empty exactly when `r <= length(g) / 2`; the empty result is located at
/// the midpoint of `g`.
pub fn sweeping(g: &OpenInterval, r: &Rational) -> OpenInterval {
    assert!(r.is_positive() && !g.is_empty(), "sweeping needs r > 0 and a nonempty gap");
    let left = g.right() - r;
    let right = g.left() + r;
    if left >= right {
        OpenInterval::empty_at(g.left().midpoint(g.right()))
    } else {
        OpenInterval::new(left, right).expect("checked order")
    }
}

/// `span(J) = max_{j != j'} |y_j - x_{j'}|`, and the length for a single gap.
pub fn span(gaps: &[OpenInterval]) -> Rational {
    if gaps.len() == 1 {
        return gaps[0].length();
    }
    let mut best = Rational::zero();
    for (i, a) in gaps.iter().enumerate() {
        for (j, b) in gaps.iter().enumerate() {
            if i != j {
                let d = (a.right() - b.left()).abs();
                if d > best {
                    best = d;
                }
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpBoundWitness {
    pub source_gap: OpenInterval,
    /// `K · length(Ct)`
    pub reach: Rational,
    pub span: Rational,
}

/// A short source gap cannot jump over a set of target gaps spreading wider
/// than `K` times its length. Returns the violated instance, if any.
pub fn jump_bound_violation(
    f: &PLMap,
    ct: &OpenInterval,
    jumped: &[OpenInterval],
    k: &Rational,
) -> Result<Option<JumpBoundWitness>, LipError> {
    let pre = |m: &str| LipError::PreconditionFailed(m.to_string());
    if !f.is_non_decreasing() || !f.is_endpoint_fixing() {
        return Err(pre("map must be non-decreasing and endpoint-fixing"));
    }
    if !k.is_positive() {
        return Err(pre("K must be positive"));
    }
    if jumped.is_empty() {
        return Err(pre("the jumped set is empty"));
    }
    if !f.is_support_gap(ct) {
        return Err(pre("Ct is not a gap of the support"));
    }
    if ct.length() >= f.codomain.width() / k {
        return Err(pre("length(Ct) must be below a_S / K"));
    }
    for cs in jumped {
        if !f.codomain.gaps().contains(cs) || !jumps_over(f, ct, cs)? {
            return Err(LipError::PreconditionFailed(format!("{ct} does not jump over {cs}")));
        }
    }
    let reach = k * &ct.length();
    let span = span(jumped);
    Ok((reach < span).then(|| JumpBoundWitness { source_gap: ct.clone(), reach, span }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub x: Rational,
    pub p: Rational,
    pub domain_distance: Rational,
    pub codomain_distance: Rational,
}

/// A map starting in `S1 = {v <= split}` that ever enters `S2 = {v > split}`,
/// with `d(S1, S2) >= eps` and all support gaps shorter than `eps / K`, must
/// cross somewhere with ratio above `K`. Returns that crossing.
pub fn separation_violation(
    f: &PLMap,
    split: &Rational,
    eps: &Rational,
    k: &Rational,
) -> Result<Option<SeparationWitness>, LipError> {
    let pre = |m: String| LipError::PreconditionFailed(m);
    if !eps.is_positive() || !k.is_positive() {
        return Err(pre("eps and K must be positive".into()));
    }
    let step = eps / k;
    if let Some(g) = f.support_gaps().into_iter().find(|g| g.length() >= step) {
        return Err(pre(format!("support gap {g} is not shorter than eps/K = {step}")));
    }
    if &f.values[0] > split {
        return Err(pre("F(0) must lie in S1".into()));
    }
    let (s1, s2): (Vec<&Rational>, Vec<&Rational>) = f.values.iter().partition(|v| *v <= split);
    for u in &s1 {
        for v in &s2 {
            if &f.codomain.metric(u, v) < eps {
                return Err(pre(format!("values {u} and {v} are closer than eps")));
            }
        }
    }
    let Some(i) = f.values.iter().position(|v| v > split) else {
        return Ok(None);
    };
    let (x, p) = (&f.xs[i - 1], &f.xs[i]);
    Ok(Some(SeparationWitness {
        x: x.clone(),
        p: p.clone(),
        domain_distance: f.domain.metric(x, p),
        codomain_distance: f.codomain.metric(&f.values[i - 1], &f.values[i]),
    }))
}

/// The largest extended interval around the support point `t` on which all
/// values satisfy `in_n`.
pub fn maximal_interval(
    f: &PLMap,
    in_n: impl Fn(&Rational) -> bool,
    t: &Rational,
) -> Result<ExtendedInterval, LipError> {
    let i = f.xs.binary_search(t).map_err(|_| ThreadError::InvalidPoint(t.clone()))?;
    if !in_n(&f.values[i]) {
        return Err(LipError::NotInN(t.clone()));
    }
    let n = f.xs.len();
    let ok = |j: usize| in_n(&f.values[j]);
    let mut lo = i;
    while lo > 0 && ok(lo - 1) {
        lo -= 1;
    }
    let mut hi = i;
    while hi + 1 < n && ok(hi + 1) {
        hi += 1;
    }
    let x = |j: usize| f.xs[j].clone();
    if lo == 0 && hi == n - 1 {
        return Ok(ExtendedInterval::Inner { p: x(0), q: x(n - 1) });
    }
    if lo == 0 && ok(n - 1) {
        let mut r = n - 1;
        while ok(r - 1) {
            r -= 1;
        }
        return Ok(ExtendedInterval::Outer { p: x(hi), q: x(r) });
    }
    if hi == n - 1 && ok(0) {
        let mut s = 0;
        while ok(s + 1) {
            s += 1;
        }
        return Ok(ExtendedInterval::Outer { p: x(s), q: x(lo) });
    }
    Ok(ExtendedInterval::Inner { p: x(lo), q: x(hi) })
}

/// Send every support point of `interval` to `s`, provided this does not
/// raise the Lipschitz constant.
pub fn collapse_maximal(f: &PLMap, interval: &ExtendedInterval, s: &Rational) -> Result<PLMap, LipError> {
    if !f.codomain.contains_point(s) {
        return Err(ThreadError::InvalidPoint(s.clone()).into());
    }
    let values = f
        .points()
        .map(|(x, v)| if interval.contains(x) { s.clone() } else { v.clone() })
        .collect();
    let out = f.with_values(values);
    let (before, after) = (lip_const(f), lip_const(&out));
    if after > before {
        return Err(LipError::LipIncreased { before, after });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplacedExtremes {
    pub p: Rational,
    pub q: Rational,
    /// Defined on `subthread(domain, P, Q)`, coordinates shifted by `-P`.
    pub map: PLMap,
}

/// `d([0, P]_T, T \ [0, P]_T)` over the support, for a support point `P`.
fn separation_distance(f: &PLMap, cut: usize) -> Rational {
    let (head, tail) = f.xs.split_at(cut + 1);
    head.iter()
        .flat_map(|x| tail.iter().map(move |y| f.domain.metric(x, y)))
        .min()
        .expect("both sides nonempty")
}

fn nearest<'a>(s: &Thread, target: &Rational, candidates: &'a [Rational]) -> Option<(&'a Rational, Rational)> {
    candidates
        .iter()
        .map(|c| (c, s.metric(target, c)))
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)))
}

/// Restrict `F` to `[P, Q]_T`, where `P` is the left end of the first gap
/// and `Q` the right end of the last, and move the values at `P` and `Q`
/// onto the nearest points of `D1` and `D2`.
///
/// The moves are allowed up to `eps · δ/2`, where `δ` is the distance from
/// `[0, P]_T` to the rest of the thread (symmetrically for `Q`); this keeps
/// the Lipschitz constant within `eps` of the original.
pub fn replace_extremes(f: &PLMap, d1: &[Rational], d2: &[Rational], eps: &Rational) -> Result<ReplacedExtremes, LipError> {
    let gaps = f.domain.gaps();
    let (Some(first), Some(last)) = (gaps.first(), gaps.last()) else {
        return Err(ThreadError::NotSeparableAtTruncation {
            p: Rational::zero(),
            q: f.domain.length().clone(),
        }
        .into());
    };
    for d in d1.iter().chain(d2) {
        if !f.codomain.contains_point(d) {
            return Err(ThreadError::InvalidPoint(d.clone()).into());
        }
    }
    let (p, q) = (first.left().clone(), last.right().clone());
    let ip = f.xs.binary_search(&p).expect("gap endpoints are in the support");
    let iq = f.xs.binary_search(&q).expect("gap endpoints are in the support");
    let two = Rational::from_integer(2);
    let delta_p = separation_distance(f, ip);
    let delta_q = separation_distance(f, iq - 1);

    let pick = |target: &Rational, ds: &[Rational], delta: &Rational, at: &Rational| {
        let tol = eps * delta / &two;
        match nearest(&f.codomain, target, ds) {
            Some((c, d)) if d <= tol => Ok(c.clone()),
            _ => Err(LipError::NoNearbyPoint { end: at.clone() }),
        }
    };
    let a_hat = pick(&f.values[ip], d1, &delta_p, &p)?;
    let b_hat = pick(&f.values[iq], d2, &delta_q, &q)?;

    let domain = f.domain.subthread(&p, &q)?;
    let mut points: Vec<(Rational, Rational)> =
        (ip..=iq).map(|i| (&f.xs[i] - &p, f.values[i].clone())).collect();
    points[0].1 = a_hat;
    points.last_mut().expect("nonempty").1 = b_hat;
    let map = PLMap::new(domain, f.codomain.clone(), points)?;
    let (before, after) = (lip_const(f), lip_const(&map));
    if after > &before + eps {
        return Err(LipError::LipIncreased { before, after });
    }
    Ok(ReplacedExtremes { p, q, map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;
    use crate::fixtures::{t_a, t_line};

    fn iv(a: Rational, b: Rational) -> OpenInterval {
        OpenInterval::new(a, b).unwrap()
    }

    fn line_map(xs: &[Rational], vs: &[Rational]) -> PLMap {
        PLMap::new(t_line(), t_line(), xs.iter().cloned().zip(vs.iter().cloned()).collect()).unwrap()
    }

    #[test]
    fn identity_has_constant_one() {
        let f = line_map(&[q(0, 1), q(1, 2), q(1, 1)], &[q(0, 1), q(1, 2), q(1, 1)]);
        assert_eq!(lip_const(&f), q(1, 1));
    }

    #[test]
    fn step_map_constant() {
        let f = line_map(&[q(0, 1), q(1, 2), q(1, 1)], &[q(0, 1), q(1, 1), q(1, 1)]);
        assert_eq!(lip_const(&f), q(2, 1));
        assert_eq!(
            check_interval_criterion(&f, &q(1, 1)),
            IntervalVerdict::Reject(IntervalWitness::Pair { x: q(0, 1), y: q(1, 2) })
        );
        assert_eq!(check_interval_criterion(&f, &q(2, 1)), IntervalVerdict::Accept);
    }

    #[test]
    fn constant_map_is_zero() {
        let f = line_map(&[q(0, 1), q(1, 1)], &[q(1, 3), q(1, 3)]);
        assert_eq!(lip_const(&f), q(0, 1));
    }

    #[test]
    fn support_must_cover_gap_endpoints() {
        let e = PLMap::new(t_a(), t_line(), vec![(q(0, 1), q(0, 1)), (q(1, 1), q(1, 1))]);
        assert!(matches!(e, Err(LipError::InvalidMap(_))));
        let e = PLMap::new(t_line(), t_a(), vec![(q(0, 1), q(9, 16)), (q(1, 1), q(1, 1))]);
        assert!(matches!(e, Err(LipError::InvalidMap(_))));
    }

    #[test]
    fn ends_condition_checked_first() {
        let dom = Thread::segment(q(1, 1), q(1, 8)).unwrap();
        let f = PLMap::new(dom, t_line(), vec![(q(0, 1), q(0, 1)), (q(1, 1), q(1, 1))]).unwrap();
        // d(F0, F1) = 1 > 1 * 1/8
        assert!(matches!(
            check_interval_criterion(&f, &q(1, 1)),
            IntervalVerdict::Reject(IntervalWitness::Ends { .. })
        ));
    }

    #[test]
    fn running_max_regularization() {
        let f = line_map(&[q(0, 1), q(1, 4), q(1, 2), q(1, 1)], &[q(0, 1), q(1, 4), q(1, 8), q(1, 1)]);
        let g = monotone_regularize(&f).unwrap();
        assert_eq!(g.values(), &[q(0, 1), q(1, 4), q(1, 4), q(1, 1)]);
        assert!(lip_const(&g) <= lip_const(&f));
    }

    #[test]
    fn two_step_regularization() {
        let dom = Thread::new(q(1, 1), q(1, 1), vec![iv(q(1, 4), q(3, 4))]).unwrap();
        let f = PLMap::new(
            dom,
            t_line(),
            vec![(q(0, 1), q(0, 1)), (q(1, 4), q(1, 2)), (q(3, 4), q(1, 2)), (q(1, 1), q(1, 1))],
        )
        .unwrap();
        assert_eq!(lip_const(&f), q(2, 1));
        let g = monotone_regularize(&f).unwrap();
        assert_eq!(g.values(), &[q(0, 1), q(0, 1), q(1, 1), q(1, 1)]);
        assert!(lip_const(&g) <= q(2, 1));
    }

    #[test]
    fn regularize_needs_fixed_ends() {
        let f = line_map(&[q(0, 1), q(1, 1)], &[q(1, 2), q(1, 1)]);
        assert_eq!(monotone_regularize(&f), Err(LipError::NotEndpointFixing));
    }

    #[test]
    fn clip_clamps_into_subthread() {
        let f = line_map(&[q(0, 1), q(1, 2), q(1, 1)], &[q(1, 4), q(1, 8), q(3, 4)]);
        let g = clip(&f, &q(1, 4), &q(3, 4)).unwrap();
        // {1/4, 1/4, 3/4} in the coordinates of [1/4, 3/4].
        assert_eq!(g.values(), &[q(0, 1), q(0, 1), q(1, 2)]);
        assert_eq!(g.codomain().length(), &q(1, 2));
        assert!(lip_const(&g) <= lip_const(&f));
    }

    #[test]
    fn clip_rejects_long_gap() {
        let dom = Thread::new(q(1, 1), q(1, 1), vec![iv(q(1, 4), q(3, 4))]).unwrap();
        let narrow = Thread::segment(q(1, 1), q(1, 4)).unwrap();
        let f = PLMap::new(
            dom,
            narrow,
            vec![(q(0, 1), q(1, 4)), (q(1, 4), q(1, 4)), (q(3, 4), q(3, 4)), (q(1, 1), q(3, 4))],
        )
        .unwrap();
        assert!(matches!(clip(&f, &q(1, 4), &q(3, 4)), Err(LipError::PreconditionGap { .. })));
    }

    fn jump_fixture() -> PLMap {
        let dom = Thread::new(q(1, 1), q(1, 2), vec![iv(q(1, 4), q(1, 2))]).unwrap();
        PLMap::new(
            dom,
            t_a(),
            vec![(q(0, 1), q(0, 1)), (q(1, 4), q(1, 3)), (q(1, 2), q(3, 4)), (q(1, 1), q(1, 1))],
        )
        .unwrap()
    }

    #[test]
    fn jumping_examples() {
        let f = jump_fixture();
        let ct = iv(q(1, 4), q(1, 2));
        assert!(jumps_over(&f, &ct, &iv(q(1, 3), q(19, 48))).unwrap());
        assert!(jumps_over(&f, &ct, &iv(q(1, 2), q(5, 8))).unwrap());
        // 3/4 lies past 67/96, so the third gap is jumped as well.
        assert!(jumps_over(&f, &ct, &iv(q(2, 3), q(67, 96))).unwrap());
        let g = line_map(&[q(0, 1), q(1, 2), q(1, 1)], &[q(0, 1), q(1, 4), q(1, 1)]);
        assert!(matches!(jumps_over(&g, &iv(q(0, 1), q(1, 2)), &iv(q(0, 1), q(1, 2))), Err(LipError::NotAGap(_))));
        let h = line_map(&[q(0, 1), q(1, 2), q(1, 1)], &[q(0, 1), q(3, 4), q(1, 2)]);
        assert_eq!(jumps_over(&h, &iv(q(0, 1), q(1, 2)), &iv(q(0, 1), q(1, 2))), Err(LipError::NotMonotone));
    }

    #[test]
    fn jumping_gap_of_identity_is_the_gap() {
        let support = t_a().sample_points(&q(1, 8));
        let f = PLMap::from_fn(t_a(), t_a(), &support, |x| x.clone()).unwrap();
        for cs in t_a().gaps() {
            assert_eq!(&find_jumping_gap(&f, cs).unwrap(), cs);
        }
        let g = line_map(&[q(0, 1), q(1, 1)], &[q(0, 1), q(1, 2)]);
        assert_eq!(find_jumping_gap(&g, &iv(q(0, 1), q(1, 2))), Err(LipError::NotEndpointFixing));
    }

    #[test]
    fn sweeping_examples() {
        assert_eq!(sweeping(&iv(q(1, 2), q(5, 8)), &q(1, 8)), iv(q(1, 2), q(5, 8)));
        assert!(sweeping(&iv(q(1, 2), q(5, 8)), &q(1, 16)).is_empty());
        assert_eq!(sweeping(&iv(q(1, 2), q(5, 8)), &q(1, 4)), iv(q(3, 8), q(3, 4)));
    }

    #[test]
    fn span_examples() {
        assert_eq!(span(&[iv(q(1, 2), q(5, 8))]), q(1, 8));
        assert_eq!(span(&[iv(q(1, 3), q(19, 48)), iv(q(1, 2), q(5, 8))]), q(7, 24));
    }

    #[test]
    fn short_gap_cannot_jump_far() {
        let dom = Thread::new(q(1, 1), q(1, 2), vec![iv(q(1, 2), q(33, 64))]).unwrap();
        let f = PLMap::new(
            dom,
            t_a(),
            vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 2)), (q(33, 64), q(5, 8)), (q(1, 1), q(1, 1))],
        )
        .unwrap();
        let ct = iv(q(1, 2), q(33, 64));
        let w = jump_bound_violation(&f, &ct, &[iv(q(1, 2), q(5, 8))], &q(2, 1)).unwrap().unwrap();
        assert_eq!(w.reach, q(1, 32));
        assert_eq!(w.span, q(1, 8));
        assert!(matches!(check_interval_criterion(&f, &q(2, 1)), IntervalVerdict::Reject(_)));
        // K = 8 leaves no room: length(Ct) must be below a_S / K = 1/16.
        assert!(jump_bound_violation(&f, &ct, &[iv(q(1, 2), q(5, 8))], &q(8, 1)).unwrap().is_none());
        assert!(matches!(
            jump_bound_violation(&f, &ct, &[iv(q(1, 2), q(5, 8))], &q(40, 1)),
            Err(LipError::PreconditionFailed(_))
        ));
        assert!(matches!(
            jump_bound_violation(&f, &ct, &[iv(q(2, 3), q(67, 96))], &q(2, 1)),
            Err(LipError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn separation_examples() {
        let cod = Thread::segment(q(1, 1), q(1, 2)).unwrap();
        let support: Vec<_> = (0..=8).map(|i| q(i, 8)).collect();
        let f = PLMap::from_fn(t_line(), cod.clone(), &support, |x| {
            if x < &q(5, 8) { q(0, 1) } else { q(1, 1) }
        })
        .unwrap();
        let w = separation_violation(&f, &q(0, 1), &q(1, 2), &q(2, 1)).unwrap().unwrap();
        assert_eq!((w.x, w.p), (q(1, 2), q(5, 8)));
        assert!(w.codomain_distance > q(2, 1) * w.domain_distance);

        let stay = PLMap::from_fn(t_line(), cod.clone(), &support, |_| q(0, 1)).unwrap();
        assert_eq!(separation_violation(&stay, &q(0, 1), &q(1, 2), &q(2, 1)).unwrap(), None);

        let coarse: Vec<_> = (0..=2).map(|i| q(i, 2)).collect();
        let g = PLMap::from_fn(t_line(), cod, &coarse, |x| x.clone()).unwrap();
        assert!(matches!(
            separation_violation(&g, &q(0, 1), &q(1, 2), &q(2, 1)),
            Err(LipError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn maximal_interval_examples() {
        let support: Vec<_> = (0..=8).map(|i| q(i, 8)).collect();
        let in_n = |v: &Rational| v <= &q(1, 4);
        let f = PLMap::from_fn(t_line(), t_line(), &support, |x| {
            if x <= &q(1, 4) || x >= &q(3, 4) { q(0, 1) } else { q(1, 2) }
        })
        .unwrap();
        assert_eq!(
            maximal_interval(&f, in_n, &q(0, 1)).unwrap(),
            ExtendedInterval::Outer { p: q(1, 4), q: q(3, 4) }
        );
        assert_eq!(
            maximal_interval(&f, in_n, &q(7, 8)).unwrap(),
            ExtendedInterval::Outer { p: q(1, 4), q: q(3, 4) }
        );
        assert_eq!(maximal_interval(&f, in_n, &q(1, 2)), Err(LipError::NotInN(q(1, 2))));

        let g = PLMap::from_fn(t_line(), t_line(), &support, |x| {
            if x >= &q(1, 4) && x <= &q(1, 2) { q(0, 1) } else { q(1, 2) }
        })
        .unwrap();
        assert_eq!(
            maximal_interval(&g, in_n, &q(1, 4)).unwrap(),
            ExtendedInterval::Inner { p: q(1, 4), q: q(1, 2) }
        );
    }

    fn collapse_fixture() -> PLMap {
        line_map(
            &[q(0, 1), q(1, 4), q(3, 8), q(1, 2), q(3, 4), q(1, 1)],
            &[q(0, 1), q(1, 2), q(5, 8), q(1, 2), q(1, 4), q(1, 1)],
        )
    }

    #[test]
    fn collapse_to_bound_point() {
        let f = collapse_fixture();
        let in_n = |v: &Rational| v >= &q(1, 2);
        let i = maximal_interval(&f, in_n, &q(1, 4)).unwrap();
        assert_eq!(i, ExtendedInterval::Inner { p: q(1, 4), q: q(1, 2) });
        let g = collapse_maximal(&f, &i, &q(1, 2)).unwrap();
        assert_eq!(g.values(), &[q(0, 1), q(1, 2), q(1, 2), q(1, 2), q(1, 4), q(1, 1)]);
        assert_eq!(lip_const(&g), lip_const(&f));
    }

    #[test]
    fn collapse_to_wrong_point() {
        let f = collapse_fixture();
        let i = ExtendedInterval::Inner { p: q(1, 4), q: q(1, 2) };
        assert!(matches!(collapse_maximal(&f, &i, &q(1, 1)), Err(LipError::LipIncreased { .. })));
    }

    fn extremes_fixture() -> PLMap {
        let dom = Thread::new(q(1, 1), q(1, 1), vec![iv(q(1, 8), q(1, 4)), iv(q(3, 4), q(7, 8))]).unwrap();
        let support = [q(0, 1), q(1, 8), q(1, 4), q(1, 2), q(3, 4), q(7, 8), q(1, 1)];
        PLMap::from_fn(dom, t_line(), &support, |x| x.clone()).unwrap()
    }

    #[test]
    fn extremes_kept_when_available() {
        let f = extremes_fixture();
        let r = replace_extremes(&f, &[q(1, 8)], &[q(7, 8)], &q(1, 2)).unwrap();
        assert_eq!((r.p.clone(), r.q.clone()), (q(1, 8), q(7, 8)));
        assert_eq!(r.map.values().first(), Some(&q(1, 8)));
        assert_eq!(r.map.values().last(), Some(&q(7, 8)));
        assert_eq!(r.map.domain().length(), &q(3, 4));
    }

    #[test]
    fn extremes_moved_within_tolerance() {
        let f = extremes_fixture();
        // δ_P = 1/8 and eps = 1/2, so the tolerance is 1/32.
        let r = replace_extremes(&f, &[q(5, 32)], &[q(7, 8)], &q(1, 2)).unwrap();
        assert_eq!(r.map.values()[0], q(5, 32));
        assert!(lip_const(&r.map) <= lip_const(&f) + q(1, 2));
        assert_eq!(
            replace_extremes(&f, &[q(1, 2)], &[q(7, 8)], &q(1, 2)),
            Err(LipError::NoNearbyPoint { end: q(1, 8) })
        );
    }

    #[test]
    fn extremes_need_a_gap() {
        let f = line_map(&[q(0, 1), q(1, 1)], &[q(0, 1), q(1, 1)]);
        assert!(matches!(
            replace_extremes(&f, &[q(0, 1)], &[q(1, 1)], &q(1, 2)),
            Err(LipError::Thread(ThreadError::NotSeparableAtTruncation { .. }))
        ));
    }

    #[test]
    fn json_round_trip() {
        let f = jump_fixture();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains(r#""points":[["0/1","0/1"],["1/4","1/3"]"#));
        assert_eq!(serde_json::from_str::<PLMap>(&s).unwrap(), f);
    }
}
