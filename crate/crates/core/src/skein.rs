//! Attachment spaces, threading spaces and finite-depth skein truncations.
//!
//! A skein starts from two points `A`, `B` at distance 1/2. Each stage glues,
//! over selected pairs `(p, q)` with `0 < d(p, q) <= 1/2`, threads of length 1
//! and width `d(p, q)` whose ends are identified with `p` and `q`. Only
//! finitely many threads and points are materialized.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cantor::{build_thread_from_rule, CantorError, GammaRule};
use crate::exactnum::Rational;
use crate::thread::{Thread, ThreadError};

/// Radius of the ball on which the ancestor map is a retraction.
pub fn stability_radius() -> Rational {
    Rational::frac(1, 8)
}

/// Largest pair distance that gets a thread attached.
pub fn attach_radius() -> Rational {
    Rational::frac(1, 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeinError {
    #[error("point {0} is not materialized")]
    NotMaterialized(String),
    #[error("invalid address {0:?}")]
    InvalidAddress(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("glue of piece {piece} is not isometric on anchors {a}, {b}: {piece_distance} vs {base_distance}")]
    GlueNotIsometric { piece: usize, a: usize, b: usize, piece_distance: Rational, base_distance: Rational },
    #[error("not a metric: {0}")]
    NotAMetric(String),
    #[error("boundness of {point} to {anchor}: closed form says {closed_form}, extensional check says {extensional}")]
    CriterionMismatch { point: String, anchor: String, closed_form: bool, extensional: bool },
    #[error("{point} is at distance {distance} from the order-{beta} skein, not below 1/8")]
    OutsideStabilityBall { point: String, beta: usize, distance: Rational },
    #[error("{point} has several nearest points of order <= {beta}: {candidates:?}")]
    Ambiguous { point: String, beta: usize, candidates: Vec<String> },
    #[error("not isolated: {0}")]
    NotIsolated(String),
    #[error("{pairs} eligible pairs at depth {depth} exceed the guard {guard}; set a pair limit")]
    PairGuard { depth: usize, pairs: usize, guard: usize },
    #[error("registry check failed: {0}")]
    Registry(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Thread(#[from] ThreadError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
}

// ---------------------------------------------------------------------------
// Generic attachment

/// A finite metric space given by an exact distance table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiniteMetricRepr")]
pub struct FiniteMetric {
    names: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

#[derive(Deserialize)]
struct FiniteMetricRepr {
    names: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

impl TryFrom<FiniteMetricRepr> for FiniteMetric {
    type Error = SkeinError;
    fn try_from(r: FiniteMetricRepr) -> Result<Self, SkeinError> {
        FiniteMetric::new(r.names, r.dist)
    }
}

impl FiniteMetric {
    /// Validates shape, symmetry, identity of indiscernibles and the triangle inequality.
    pub fn new(names: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self, SkeinError> {
        let n = names.len();
        if n == 0 || dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(SkeinError::NotAMetric("table shape does not match the point list".into()));
        }
        let m = FiniteMetric { names, dist };
        m.check_axioms(|i, j| m.dist[i][j].clone(), n)?;
        Ok(m)
    }

    /// A path `0 - 1 - … - (n-1)` with the given consecutive step lengths.
    pub fn path(names: Vec<String>, steps: &[Rational]) -> Result<Self, SkeinError> {
        let n = names.len();
        if steps.len() + 1 != n {
            return Err(SkeinError::NotAMetric("a path of n points needs n - 1 steps".into()));
        }
        let mut pos = vec![Rational::zero()];
        for s in steps {
            let next = pos.last().expect("nonempty") + s;
            pos.push(next);
        }
        let dist = (0..n).map(|i| (0..n).map(|j| (&pos[i] - &pos[j]).abs()).collect()).collect();
        FiniteMetric::new(names, dist)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    fn check_axioms(&self, d: impl Fn(usize, usize) -> Rational, n: usize) -> Result<(), SkeinError> {
        check_metric_axioms(n, d).map_err(SkeinError::NotAMetric)
    }
}

/// Exhaustive check of the metric axioms over `0..n`.
pub fn check_metric_axioms(n: usize, d: impl Fn(usize, usize) -> Rational) -> Result<(), String> {
    let table: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| d(i, j)).collect()).collect();
    for i in 0..n {
        if !table[i][i].is_zero() {
            return Err(format!("d({i},{i}) = {}", table[i][i]));
        }
        for j in 0..n {
            if table[i][j] != table[j][i] {
                return Err(format!("d({i},{j}) != d({j},{i})"));
            }
            if i != j && !table[i][j].is_positive() {
                return Err(format!("d({i},{j}) = {} for distinct points", table[i][j]));
            }
            for k in 0..n {
                if table[i][k] > &table[i][j] + &table[j][k] {
                    return Err(format!("triangle inequality fails for ({i},{j},{k})"));
                }
            }
        }
    }
    Ok(())
}

/// A piece glued to the base along `glue: piece anchor -> base point`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub space: FiniteMetric,
    pub glue: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "in", rename_all = "snake_case")]
pub enum AttachedPoint {
    Base { point: usize },
    Piece { piece: usize, point: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachmentSpace {
    base: FiniteMetric,
    pieces: Vec<Piece>,
}

/// Largest space whose metric axioms are checked exhaustively by [`attach`].
pub const ATTACH_AXIOM_CHECK_LIMIT: usize = 80;

/// Glue `pieces` onto `base`; distances minimize over passages through anchors.
pub fn attach(base: FiniteMetric, pieces: Vec<Piece>) -> Result<AttachmentSpace, SkeinError> {
    for (pi, piece) in pieces.iter().enumerate() {
        if piece.glue.is_empty() {
            return Err(SkeinError::InvalidPoint(format!("piece {pi} has no anchors")));
        }
        let mut seen_piece = BTreeSet::new();
        let mut seen_base = BTreeSet::new();
        for &(a, b) in &piece.glue {
            if a >= piece.space.len() || b >= base.len() {
                return Err(SkeinError::InvalidPoint(format!("piece {pi} glues {a} -> {b} out of range")));
            }
            if !seen_piece.insert(a) || !seen_base.insert(b) {
                return Err(SkeinError::InvalidPoint(format!("piece {pi} glue is not injective")));
            }
        }
        for &(a, ga) in &piece.glue {
            for &(b, gb) in &piece.glue {
                let (pd, bd) = (piece.space.distance(a, b), base.distance(ga, gb));
                if pd != bd {
                    return Err(SkeinError::GlueNotIsometric {
                        piece: pi,
                        a,
                        b,
                        piece_distance: pd.clone(),
                        base_distance: bd.clone(),
                    });
                }
            }
        }
    }
    let space = AttachmentSpace { base, pieces };
    let pts = space.points();
    if pts.len() <= ATTACH_AXIOM_CHECK_LIMIT {
        check_metric_axioms(pts.len(), |i, j| space.distance(pts[i], pts[j])).map_err(SkeinError::NotAMetric)?;
    }
    Ok(space)
}

impl AttachmentSpace {
    pub fn base(&self) -> &FiniteMetric {
        &self.base
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Every point once: base points, then unglued piece points.
    pub fn points(&self) -> Vec<AttachedPoint> {
        let mut out: Vec<AttachedPoint> = (0..self.base.len()).map(|point| AttachedPoint::Base { point }).collect();
        for (piece, p) in self.pieces.iter().enumerate() {
            for point in 0..p.space.len() {
                if !p.glue.iter().any(|&(a, _)| a == point) {
                    out.push(AttachedPoint::Piece { piece, point });
                }
            }
        }
        out
    }

    /// Glued piece points become their base images.
    pub fn canonical(&self, p: AttachedPoint) -> AttachedPoint {
        if let AttachedPoint::Piece { piece, point } = p {
            if let Some(&(_, b)) = self.pieces[piece].glue.iter().find(|&&(a, _)| a == point) {
                return AttachedPoint::Base { point: b };
            }
        }
        p
    }

    pub fn distance(&self, p: AttachedPoint, q: AttachedPoint) -> Rational {
        use AttachedPoint::*;
        match (self.canonical(p), self.canonical(q)) {
            (Base { point: x }, Base { point: y }) => self.base.distance(x, y).clone(),
            (Piece { piece, point }, Base { point: y }) | (Base { point: y }, Piece { piece, point }) => {
                let pc = &self.pieces[piece];
                pc.glue
                    .iter()
                    .map(|&(s, gs)| pc.space.distance(point, s) + self.base.distance(gs, y))
                    .min()
                    .expect("anchors are nonempty")
            }
            (Piece { piece: i, point: x }, Piece { piece: j, point: y }) if i == j => {
                self.pieces[i].space.distance(x, y).clone()
            }
            (Piece { piece: i, point: x }, Piece { piece: j, point: y }) => {
                let (pi, pj) = (&self.pieces[i], &self.pieces[j]);
                let mut best: Option<Rational> = None;
                for &(s, gs) in &pi.glue {
                    for &(t, gt) in &pj.glue {
                        let h = pi.space.distance(x, s) + self.base.distance(gs, gt) + pj.space.distance(t, y);
                        best = Some(best.map_or(h.clone(), |b| b.min(h)));
                    }
                }
                best.expect("anchors are nonempty")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Threading spaces

/// Finitely many threads of length 1 and width `d(A, B)` glued at `A`, `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ThreadingSpaceRepr")]
pub struct ThreadingSpace {
    width: Rational,
    threads: Vec<(usize, Thread)>,
}

#[derive(Deserialize)]
struct ThreadingSpaceRepr {
    width: Rational,
    threads: Vec<(usize, Thread)>,
}

impl TryFrom<ThreadingSpaceRepr> for ThreadingSpace {
    type Error = SkeinError;
    fn try_from(r: ThreadingSpaceRepr) -> Result<Self, SkeinError> {
        ThreadingSpace::new(r.width, r.threads)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum ThreadingPoint {
    A,
    B,
    On { thread: usize, coord: Rational },
}

impl ThreadingSpace {
    pub fn new(width: Rational, threads: Vec<(usize, Thread)>) -> Result<Self, SkeinError> {
        if !width.is_positive() || width > attach_radius() {
            return Err(SkeinError::PreconditionFailed(format!("width {width} must lie in (0, 1/2]")));
        }
        for (gid, t) in &threads {
            if t.length() != &Rational::one() || t.width() != &width {
                return Err(SkeinError::PreconditionFailed(format!("thread {gid} must have length 1 and width {width}")));
            }
        }
        Ok(ThreadingSpace { width, threads })
    }

    /// Threads built from the given rules with `gaps` gaps each.
    pub fn from_rules(width: Rational, rules: &[GammaRule], gaps: usize) -> Result<Self, SkeinError> {
        let threads = rules
            .iter()
            .enumerate()
            .map(|(gid, r)| Ok((gid, build_thread_from_rule(r, gaps, width.clone())?)))
            .collect::<Result<Vec<_>, SkeinError>>()?;
        ThreadingSpace::new(width, threads)
    }

    pub fn width(&self) -> &Rational {
        &self.width
    }

    pub fn threads(&self) -> &[(usize, Thread)] {
        &self.threads
    }

    /// End coordinates collapse to the anchors.
    pub fn canonical(&self, p: &ThreadingPoint) -> Result<ThreadingPoint, SkeinError> {
        match p {
            ThreadingPoint::On { thread, coord } => {
                let (_, t) = self
                    .threads
                    .get(*thread)
                    .ok_or_else(|| SkeinError::InvalidPoint(format!("no thread {thread}")))?;
                if !t.contains_point(coord) {
                    return Err(SkeinError::InvalidPoint(format!("{coord} is not on thread {thread}")));
                }
                Ok(if coord.is_zero() {
                    ThreadingPoint::A
                } else if coord == t.length() {
                    ThreadingPoint::B
                } else {
                    p.clone()
                })
            }
            other => Ok(other.clone()),
        }
    }

    fn to_anchor(&self, p: &ThreadingPoint, anchor_at_zero: bool) -> Rational {
        let end = if anchor_at_zero { Rational::zero() } else { Rational::one() };
        match p {
            ThreadingPoint::A if anchor_at_zero => Rational::zero(),
            ThreadingPoint::B if !anchor_at_zero => Rational::zero(),
            ThreadingPoint::A | ThreadingPoint::B => self.width.clone(),
            ThreadingPoint::On { thread, coord } => self.threads[*thread].1.metric(coord, &end),
        }
    }
}

pub fn threading_distance(ts: &ThreadingSpace, p: &ThreadingPoint, q: &ThreadingPoint) -> Result<Rational, SkeinError> {
    let (p, q) = (ts.canonical(p)?, ts.canonical(q)?);
    if let (ThreadingPoint::On { thread: i, coord: x }, ThreadingPoint::On { thread: j, coord: y }) = (&p, &q) {
        if i == j {
            return Ok(ts.threads[*i].1.metric(x, y));
        }
    }
    let via_a = ts.to_anchor(&p, true) + ts.to_anchor(&q, true);
    let via_b = ts.to_anchor(&p, false) + ts.to_anchor(&q, false);
    Ok(via_a.min(via_b))
}

// ---------------------------------------------------------------------------
// Addresses

/// Structural address of a skein point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SkeinAddress {
    A,
    B,
    /// A coordinate on the thread with the given gamma id over `(lower, upper)`;
    /// coordinate 0 sits at `lower`.
    Inner { lower: Box<SkeinAddress>, upper: Box<SkeinAddress>, gamma_id: usize, coord: Rational },
}

impl SkeinAddress {
    /// Anchor coordinates collapse to the parent point.
    pub fn canonical(self) -> SkeinAddress {
        match self {
            SkeinAddress::Inner { lower, upper, gamma_id, coord } => {
                if coord.is_zero() {
                    lower.canonical()
                } else if coord == Rational::one() {
                    upper.canonical()
                } else {
                    SkeinAddress::Inner {
                        lower: Box::new(lower.canonical()),
                        upper: Box::new(upper.canonical()),
                        gamma_id,
                        coord,
                    }
                }
            }
            base => base,
        }
    }

    /// Least stage containing the point.
    pub fn order(&self) -> usize {
        match self {
            SkeinAddress::A | SkeinAddress::B => 0,
            SkeinAddress::Inner { lower, upper, .. } => 1 + lower.order().max(upper.order()),
        }
    }
}

impl fmt::Display for SkeinAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkeinAddress::A => f.write_str("A"),
            SkeinAddress::B => f.write_str("B"),
            SkeinAddress::Inner { lower, upper, gamma_id, coord } => {
                write!(f, "({lower},{upper})#{gamma_id}@{coord}")
            }
        }
    }
}

impl FromStr for SkeinAddress {
    type Err = SkeinError;
    fn from_str(s: &str) -> Result<Self, SkeinError> {
        let bad = || SkeinError::InvalidAddress(s.to_string());
        let (addr, rest) = parse_address(s.trim()).ok_or_else(bad)?;
        if !rest.is_empty() {
            return Err(bad());
        }
        Ok(addr)
    }
}

fn parse_address(s: &str) -> Option<(SkeinAddress, &str)> {
    if let Some(rest) = s.strip_prefix('A') {
        return Some((SkeinAddress::A, rest));
    }
    if let Some(rest) = s.strip_prefix('B') {
        return Some((SkeinAddress::B, rest));
    }
    let rest = s.strip_prefix('(')?;
    let (lower, rest) = parse_address(rest)?;
    let rest = rest.strip_prefix(',')?;
    let (upper, rest) = parse_address(rest)?;
    let rest = rest.strip_prefix(")#")?;
    let digits = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
    let gamma_id = rest[..digits].parse().ok()?;
    let rest = rest[digits..].strip_prefix('@')?;
    let len = rest.find(|c: char| !(c.is_ascii_digit() || c == '/' || c == '-')).unwrap_or(rest.len());
    let coord = rest[..len].parse().ok()?;
    Some((SkeinAddress::Inner { lower: Box::new(lower), upper: Box::new(upper), gamma_id, coord }, &rest[len..]))
}

// ---------------------------------------------------------------------------
// Truncations

pub type PointId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeinConfig {
    pub depth: usize,
    /// Gamma ids `0..gammas` per expanded pair; id `j` uses `γ_i = 2^{-(i+2+j)}`.
    pub gammas: usize,
    pub grid: Rational,
    pub gaps_per_thread: usize,
    /// Expand at most this many eligible pairs per stage, chosen at an even stride.
    pub pair_limit: Option<usize>,
}

/// Eligible pairs per stage above which an explicit pair limit is required.
pub const PAIR_GUARD: usize = 64;

impl SkeinConfig {
    pub fn new(depth: usize, gammas: usize, grid: Rational) -> Self {
        SkeinConfig { depth, gammas, grid, gaps_per_thread: 3, pair_limit: None }
    }

    pub fn with_pair_limit(mut self, limit: usize) -> Self {
        self.pair_limit = Some(limit);
        self
    }

    pub fn gamma_rule(gamma_id: usize) -> GammaRule {
        GammaRule::Geometric { shift: 1 + gamma_id as u32 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointKind {
    Base,
    Inner { thread: usize, coord: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub address: String,
    pub order: usize,
    pub kind: PointKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreadRecord {
    pub lower: PointId,
    pub upper: PointId,
    pub gamma_id: usize,
    pub thread: Thread,
    /// All materialized points of the thread by coordinate, anchors included.
    pub points: Vec<PointId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedPair {
    pub stage: usize,
    pub lower: PointId,
    pub upper: PointId,
    pub distance: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TruncationRepr")]
pub struct SkeinTruncation {
    config: SkeinConfig,
    points: Vec<PointRecord>,
    threads: Vec<ThreadRecord>,
    expanded: Vec<ExpandedPair>,
    #[serde(skip)]
    index: HashMap<String, PointId>,
}

impl PartialEq for SkeinTruncation {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.points == other.points
            && self.threads == other.threads
            && self.expanded == other.expanded
    }
}

impl Eq for SkeinTruncation {}

#[derive(Deserialize)]
struct TruncationRepr {
    config: SkeinConfig,
    points: Vec<PointRecord>,
    threads: Vec<ThreadRecord>,
    expanded: Vec<ExpandedPair>,
}

impl TryFrom<TruncationRepr> for SkeinTruncation {
    type Error = SkeinError;
    fn try_from(r: TruncationRepr) -> Result<Self, SkeinError> {
        let mut tr = SkeinTruncation {
            config: r.config,
            points: r.points,
            threads: r.threads,
            expanded: r.expanded,
            index: HashMap::new(),
        };
        tr.rebuild_index()?;
        tr.registry_check()?;
        Ok(tr)
    }
}

impl SkeinTruncation {
    /// Build `Sk(depth)` restricted to the configured threads and samples.
    pub fn build(config: SkeinConfig) -> Result<Self, SkeinError> {
        if !config.grid.is_positive() || config.gammas == 0 {
            return Err(SkeinError::PreconditionFailed("grid must be positive and gammas at least 1".into()));
        }
        let base = |a: &str| PointRecord { address: a.into(), order: 0, kind: PointKind::Base };
        let mut tr = SkeinTruncation {
            config,
            points: vec![base("A"), base("B")],
            threads: Vec::new(),
            expanded: Vec::new(),
            index: HashMap::new(),
        };
        tr.rebuild_index()?;
        let templates = (0..tr.config.gammas)
            .map(|gid| {
                let rule = SkeinConfig::gamma_rule(gid);
                Ok(build_thread_from_rule(&rule, tr.config.gaps_per_thread, Rational::one())?.gaps().to_vec())
            })
            .collect::<Result<Vec<_>, SkeinError>>()?;

        for stage in 0..tr.config.depth {
            let pairs = tr.eligible_pairs(stage)?;
            for (lower, upper, distance) in pairs {
                for (gid, gaps) in templates.iter().enumerate() {
                    let thread = Thread::new(Rational::one(), distance.clone(), gaps.clone())?;
                    tr.add_thread(lower, upper, gid, thread, stage + 1)?;
                }
                tr.expanded.push(ExpandedPair { stage, lower, upper, distance });
            }
        }
        tr.registry_check()?;
        Ok(tr)
    }

    /// Pairs expanded at `stage`: highest order exactly `stage` and
    /// `0 < d <= 1/2`, in order of (higher id, lower id).
    fn eligible_pairs(&self, stage: usize) -> Result<Vec<(PointId, PointId, Rational)>, SkeinError> {
        let mut s = DistanceSession::new(self);
        let mut out = Vec::new();
        for q in 0..self.points.len() {
            for p in 0..q {
                if self.points[p].order.max(self.points[q].order) != stage {
                    continue;
                }
                let d = s.distance(p, q);
                if d.is_positive() && d <= attach_radius() {
                    out.push((p, q, d));
                }
            }
        }
        let n = out.len();
        match self.config.pair_limit {
            Some(limit) if n > limit => Ok((0..limit).map(|i| out[i * n / limit].clone()).collect()),
            None if n > PAIR_GUARD => Err(SkeinError::PairGuard { depth: stage + 1, pairs: n, guard: PAIR_GUARD }),
            _ => Ok(out),
        }
    }

    fn add_thread(&mut self, lower: PointId, upper: PointId, gamma_id: usize, thread: Thread, order: usize) -> Result<(), SkeinError> {
        let tid = self.threads.len();
        let mut ids = vec![lower];
        let one = Rational::one();
        for c in thread.sample_points(&self.config.grid) {
            if c.is_zero() || c == one {
                continue;
            }
            let address = format!("({},{})#{gamma_id}@{c}", self.points[lower].address, self.points[upper].address);
            let id = self.points.len();
            if self.index.insert(address.clone(), id).is_some() {
                return Err(SkeinError::Registry(format!("duplicate address {address}")));
            }
            self.points.push(PointRecord { address, order, kind: PointKind::Inner { thread: tid, coord: c } });
            ids.push(id);
        }
        ids.push(upper);
        self.threads.push(ThreadRecord { lower, upper, gamma_id, thread, points: ids });
        Ok(())
    }

    fn rebuild_index(&mut self) -> Result<(), SkeinError> {
        self.index.clear();
        for (id, p) in self.points.iter().enumerate() {
            if self.index.insert(p.address.clone(), id).is_some() {
                return Err(SkeinError::Registry(format!("duplicate address {}", p.address)));
            }
        }
        Ok(())
    }

    /// Structural consistency: every non-base point lies in the interior of
    /// exactly one thread, orders and addresses follow from the parents, and
    /// thread point lists run from the lower to the upper anchor.
    pub fn registry_check(&self) -> Result<(), SkeinError> {
        let bad = |m: String| Err(SkeinError::Registry(m));
        if self.points.len() < 2 || self.points[0].address != "A" || self.points[1].address != "B" {
            return bad("the registry must start with A and B".into());
        }
        let mut owner = vec![None; self.points.len()];
        for (tid, t) in self.threads.iter().enumerate() {
            let (Some(&first), Some(&last)) = (t.points.first(), t.points.last()) else {
                return bad(format!("thread {tid} lists no points"));
            };
            if first != t.lower || last != t.upper || t.lower >= self.points.len() || t.upper >= self.points.len() {
                return bad(format!("thread {tid} does not run between its anchors"));
            }
            if t.thread.length() != &Rational::one() {
                return bad(format!("thread {tid} does not have length 1"));
            }
            let order = 1 + self.points[t.lower].order.max(self.points[t.upper].order);
            let mut prev = Rational::zero();
            for &id in &t.points[1..t.points.len() - 1] {
                let Some(rec) = self.points.get(id) else {
                    return bad(format!("thread {tid} lists unknown point {id}"));
                };
                let PointKind::Inner { thread, coord } = &rec.kind else {
                    return bad(format!("base point inside thread {tid}"));
                };
                if *thread != tid || coord <= &prev || coord >= &Rational::one() || !t.thread.contains_point(coord) {
                    return bad(format!("point {} misplaced on thread {tid}", rec.address));
                }
                if owner[id].replace(tid).is_some() {
                    return bad(format!("point {} lies on two threads", rec.address));
                }
                let address =
                    format!("({},{})#{}@{coord}", self.points[t.lower].address, self.points[t.upper].address, t.gamma_id);
                if rec.address != address || rec.order != order {
                    return bad(format!("point {} has inconsistent address or order", rec.address));
                }
                prev = coord.clone();
            }
        }
        for (id, rec) in self.points.iter().enumerate() {
            let inner = matches!(rec.kind, PointKind::Inner { .. });
            if inner != owner[id].is_some() {
                return bad(format!("point {} is not covered by exactly one thread interior", rec.address));
            }
        }
        Ok(())
    }

    pub fn config(&self) -> &SkeinConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PointRecord] {
        &self.points
    }

    pub fn threads(&self) -> &[ThreadRecord] {
        &self.threads
    }

    pub fn expanded(&self) -> &[ExpandedPair] {
        &self.expanded
    }

    pub fn address(&self, id: PointId) -> &str {
        &self.points[id].address
    }

    pub fn order_of(&self, id: PointId) -> usize {
        self.points[id].order
    }

    /// Points first appearing at stage `g`.
    pub fn generation(&self, g: usize) -> Vec<PointId> {
        (0..self.points.len()).filter(|&i| self.points[i].order == g).collect()
    }

    /// Resolve an address (anchor coordinates collapse to parents).
    pub fn lookup(&self, addr: &str) -> Result<PointId, SkeinError> {
        let canonical = addr.parse::<SkeinAddress>()?.canonical().to_string();
        self.index.get(&canonical).copied().ok_or(SkeinError::NotMaterialized(canonical))
    }

    /// `(thread, lower, upper, coordinate)` for inner points.
    pub fn parents(&self, id: PointId) -> Option<(usize, PointId, PointId, &Rational)> {
        match &self.points[id].kind {
            PointKind::Base => None,
            PointKind::Inner { thread, coord } => {
                let t = &self.threads[*thread];
                Some((*thread, t.lower, t.upper, coord))
            }
        }
    }

    fn coord_on(&self, id: PointId, tid: usize) -> Option<Rational> {
        let t = &self.threads[tid];
        match &self.points[id].kind {
            PointKind::Inner { thread, coord } if *thread == tid => Some(coord.clone()),
            _ if id == t.lower => Some(Rational::zero()),
            _ if id == t.upper => Some(Rational::one()),
            _ => None,
        }
    }
}

/// Memoized distance queries against one truncation.
pub struct DistanceSession<'a> {
    tr: &'a SkeinTruncation,
    memo: HashMap<(PointId, PointId), Rational>,
}

impl<'a> DistanceSession<'a> {
    pub fn new(tr: &'a SkeinTruncation) -> Self {
        DistanceSession { tr, memo: HashMap::new() }
    }

    pub fn truncation(&self) -> &'a SkeinTruncation {
        self.tr
    }

    /// Same-thread pairs use the thread metric; otherwise the higher-order
    /// point is routed out through the nearer combination of its anchors.
    pub fn distance(&mut self, p: PointId, q: PointId) -> Rational {
        if p == q {
            return Rational::zero();
        }
        let key = (p.min(q), p.max(q));
        if let Some(d) = self.memo.get(&key) {
            return d.clone();
        }
        let d = self.compute(p, q);
        self.memo.insert(key, d.clone());
        d
    }

    fn compute(&mut self, p: PointId, q: PointId) -> Rational {
        let tr = self.tr;
        for (x, y) in [(p, q), (q, p)] {
            if let Some((tid, ..)) = tr.parents(x) {
                if let Some(cy) = tr.coord_on(y, tid) {
                    let cx = tr.coord_on(x, tid).expect("own thread");
                    return tr.threads[tid].thread.metric(&cx, &cy);
                }
            }
        }
        let (hi, lo) = if (tr.order_of(p), p) > (tr.order_of(q), q) { (p, q) } else { (q, p) };
        let Some((tid, a, b, c)) = tr.parents(hi) else {
            // Both base points and distinct.
            return attach_radius();
        };
        let t = &tr.threads[tid].thread;
        let c = c.clone();
        let via_a = t.metric(&c, &Rational::zero()) + self.distance(a, lo);
        let via_b = t.metric(&c, &Rational::one()) + self.distance(b, lo);
        via_a.min(via_b)
    }

    pub fn distance_by_address(&mut self, p: &str, q: &str) -> Result<Rational, SkeinError> {
        let (p, q) = (self.tr.lookup(p)?, self.tr.lookup(q)?);
        Ok(self.distance(p, q))
    }
}

pub fn skein_distance(tr: &SkeinTruncation, p: &str, q: &str) -> Result<Rational, SkeinError> {
    DistanceSession::new(tr).distance_by_address(p, q)
}

/// All-pairs distances by exact shortest paths in the graph whose edges are
/// the `A`–`B` link and the segments between consecutive materialized points
/// along each thread. Independent of the recursive evaluation.
pub fn shortest_path_table(tr: &SkeinTruncation) -> Vec<Vec<Rational>> {
    let n = tr.len();
    let mut adj: Vec<Vec<(PointId, Rational)>> = vec![Vec::new(); n];
    let mut edge = |a: PointId, b: PointId, w: Rational| {
        adj[a].push((b, w.clone()));
        adj[b].push((a, w));
    };
    edge(0, 1, attach_radius());
    for (tid, t) in tr.threads().iter().enumerate() {
        let cs: Vec<Rational> = t.points.iter().map(|&id| tr.coord_on(id, tid).expect("on thread")).collect();
        for i in 1..t.points.len() {
            edge(t.points[i - 1], t.points[i], &cs[i] - &cs[i - 1]);
        }
    }
    (0..n).map(|s| dijkstra(&adj, s)).collect()
}

fn dijkstra(adj: &[Vec<(PointId, Rational)>], src: PointId) -> Vec<Rational> {
    let mut best: Vec<Option<Rational>> = vec![None; adj.len()];
    let mut done = vec![false; adj.len()];
    let mut heap = BinaryHeap::new();
    best[src] = Some(Rational::zero());
    heap.push(Reverse((Rational::zero(), src)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for (v, w) in &adj[u] {
            let nd = &d + w;
            if best[*v].as_ref().is_none_or(|b| &nd < b) {
                best[*v] = Some(nd.clone());
                heap.push(Reverse((nd, *v)));
            }
        }
    }
    best.into_iter().map(|d| d.expect("the skein is connected")).collect()
}

/// Whether inner point `p` over `(x, y)` is bound to the anchor `s`.
///
/// Closed form: `d(p, s) < d(p, other)` and `d(p, s) <= (1 - a)/2` with
/// `a = d(x, y)`. Cross-checked against `d(p, z) = d(p, s) + d(s, z)` for
/// every materialized `z` off the thread interior with order at most that of
/// `p`; later threads glued at `p` itself are not routed through `s`.
pub fn is_bound(s: &mut DistanceSession<'_>, p: PointId, anchor: PointId) -> Result<bool, SkeinError> {
    let tr = s.truncation();
    let (tid, x, y, _) = tr
        .parents(p)
        .ok_or_else(|| SkeinError::PreconditionFailed(format!("{} is a base point", tr.address(p))))?;
    let other = if anchor == x {
        y
    } else if anchor == y {
        x
    } else {
        return Err(SkeinError::PreconditionFailed(format!("{} is not a parent of {}", tr.address(anchor), tr.address(p))));
    };
    let width = tr.threads[tid].thread.width().clone();
    let dps = s.distance(p, anchor);
    let closed = dps < s.distance(p, other) && dps <= (Rational::one() - width) / Rational::from_integer(2);
    let mut extensional = true;
    let stage = tr.order_of(p);
    for z in 0..tr.len() {
        if tr.order_of(z) > stage || matches!(tr.points[z].kind, PointKind::Inner { thread, .. } if thread == tid) {
            continue;
        }
        if s.distance(p, z) != &dps + &s.distance(anchor, z) {
            extensional = false;
            break;
        }
    }
    if closed != extensional {
        return Err(SkeinError::CriterionMismatch {
            point: tr.address(p).into(),
            anchor: tr.address(anchor).into(),
            closed_form: closed,
            extensional,
        });
    }
    Ok(closed)
}

/// Distance from `p` to the materialized part of `Sk(beta)` and its minimizers.
///
/// The nearest point of `Sk(beta)` is reached through thread anchors, all of
/// which are materialized, so the minimum is exact.
pub fn nearest_of_order(s: &mut DistanceSession<'_>, p: PointId, beta: usize) -> (Rational, Vec<PointId>) {
    let tr = s.truncation();
    let mut best: Option<Rational> = None;
    let mut arg = Vec::new();
    for z in (0..tr.len()).filter(|&z| tr.order_of(z) <= beta) {
        let d = s.distance(p, z);
        match &best {
            Some(b) if &d > b => {}
            Some(b) if &d == b => arg.push(z),
            _ => {
                best = Some(d);
                arg = vec![z];
            }
        }
    }
    (best.expect("A has order 0"), arg)
}

/// The ancestor of order `beta`: the unique nearest point of `Sk(beta)`.
pub fn ancestor(s: &mut DistanceSession<'_>, p: PointId, beta: usize) -> Result<PointId, SkeinError> {
    let tr = s.truncation();
    if tr.order_of(p) <= beta {
        return Ok(p);
    }
    let (d, arg) = nearest_of_order(s, p, beta);
    if d >= stability_radius() {
        return Err(SkeinError::OutsideStabilityBall { point: tr.address(p).into(), beta, distance: d });
    }
    if arg.len() > 1 {
        return Err(SkeinError::Ambiguous {
            point: tr.address(p).into(),
            beta,
            candidates: arg.iter().map(|&z| tr.address(z).to_string()).collect(),
        });
    }
    Ok(arg[0])
}

/// For `p` of order `beta + 1`, the parent that is not its ancestor.
pub fn pseudo_ancestor(s: &mut DistanceSession<'_>, p: PointId, beta: usize) -> Result<PointId, SkeinError> {
    let tr = s.truncation();
    if tr.order_of(p) != beta + 1 {
        return Err(SkeinError::PreconditionFailed(format!("{} does not have order {}", tr.address(p), beta + 1)));
    }
    let (_, x, y, _) = tr.parents(p).expect("positive order");
    let anc = ancestor(s, p, beta)?;
    Ok(if anc == x { y } else { x })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum StabilityVerdict {
    Accept {
        pairs: usize,
        /// Pairs with distinct ancestors whose three-term decomposition was checked.
        decomposed: usize,
    },
    Reject {
        p: String,
        q: String,
        property: String,
        lhs: Rational,
        rhs: Rational,
    },
}

/// Check the ancestor map on sampled pairs: it is 1-Lipschitz, and pairs with
/// distinct ancestors decompose as `d(p,P p) + d(P p,P q) + d(P q,q)`.
pub fn stability_report(
    s: &mut DistanceSession<'_>,
    beta: usize,
    pairs: &[(PointId, PointId)],
) -> Result<StabilityVerdict, SkeinError> {
    let tr = s.truncation();
    let mut decomposed = 0;
    for &(p, q) in pairs {
        let (pp, pq) = (ancestor(s, p, beta)?, ancestor(s, q, beta)?);
        let d = s.distance(p, q);
        let image = s.distance(pp, pq);
        let reject = |property: &str, lhs: Rational, rhs: Rational| StabilityVerdict::Reject {
            p: tr.address(p).into(),
            q: tr.address(q).into(),
            property: property.into(),
            lhs,
            rhs,
        };
        if image > d {
            return Ok(reject("lipschitz", image, d));
        }
        if pp != pq {
            let sum = s.distance(p, pp) + &image + s.distance(pq, q);
            if sum != d {
                return Ok(reject("decomposition", d, sum));
            }
            decomposed += 1;
        }
    }
    Ok(StabilityVerdict::Accept { pairs: pairs.len(), decomposed })
}

/// A sequence from `p` to `q` with consecutive distances at most 1/2.
///
/// The higher-order endpoint steps to its nearer parent (within 1/2, since
/// threads have length 1) until both ends are base points.
pub fn chain(s: &mut DistanceSession<'_>, p: PointId, q: PointId) -> Vec<PointId> {
    let tr = s.truncation();
    let mut head = vec![p];
    let mut tail = vec![q];
    loop {
        let (x, y) = (*head.last().expect("nonempty"), *tail.last().expect("nonempty"));
        if x == y {
            tail.pop();
            break;
        }
        let step_head = (tr.order_of(x), x) >= (tr.order_of(y), y);
        let cur = if step_head { x } else { y };
        let Some((_, a, b, _)) = tr.parents(cur) else {
            break;
        };
        let next = if s.distance(cur, a) <= s.distance(cur, b) { a } else { b };
        if step_head {
            head.push(next);
        } else {
            tail.push(next);
        }
    }
    head.extend(tail.into_iter().rev());
    head.dedup();
    head
}

/// Smallest superset closed under taking ancestors at every order whose
/// stability ball contains the member.
pub fn ancestor_closure(s: &mut DistanceSession<'_>, sample: &[PointId]) -> BTreeSet<PointId> {
    let tr = s.truncation();
    let mut out: BTreeSet<PointId> = sample.iter().copied().collect();
    let mut work: Vec<PointId> = out.iter().copied().collect();
    while let Some(x) = work.pop() {
        for beta in 0..tr.order_of(x) {
            let Ok(a) = ancestor(s, x, beta) else { continue };
            if out.insert(a) {
                work.push(a);
            }
        }
    }
    out
}

/// Data for the isolated-point obstruction: any `K`-Lipschitz retraction onto
/// `S` restricted to a thread along the chain whose gaps are all shorter than
/// `eps / K` must separate two values at distance `>= eps` across a gap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionRecipe {
    pub point: String,
    pub nearest: String,
    pub chain: Vec<String>,
    pub eps: Rational,
    #[serde(rename = "K")]
    pub k: Rational,
    /// Strict upper bound on every gap length.
    pub gap_budget: Rational,
    pub gamma_rule: GammaRule,
}

pub fn isolated_point_obstruction(
    s: &mut DistanceSession<'_>,
    set: &[PointId],
    p: PointId,
    k: &Rational,
) -> Result<ObstructionRecipe, SkeinError> {
    let tr = s.truncation();
    if !k.is_positive() {
        return Err(SkeinError::PreconditionFailed("K must be positive".into()));
    }
    let others: BTreeSet<PointId> = set.iter().copied().filter(|&z| z != p).collect();
    if !set.contains(&p) || others.is_empty() {
        return Err(SkeinError::NotIsolated(format!("{} needs at least one other member of S", tr.address(p))));
    }
    let (eps, nearest) = others
        .iter()
        .map(|&z| (s.distance(p, z), z))
        .min()
        .expect("nonempty");
    if eps <= tr.config.grid {
        return Err(SkeinError::NotIsolated(format!(
            "{} is within the sampling step of {}",
            tr.address(p),
            tr.address(nearest)
        )));
    }
    let budget = &eps / k;
    let route = chain(s, p, nearest);
    Ok(ObstructionRecipe {
        point: tr.address(p).into(),
        nearest: tr.address(nearest).into(),
        chain: route.iter().map(|&z| tr.address(z).to_string()).collect(),
        eps,
        k: k.clone(),
        gamma_rule: GammaRule::Capped { cap: budget.clone() },
        gap_budget: budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;

    fn depth1() -> SkeinTruncation {
        SkeinTruncation::build(SkeinConfig::new(1, 2, q(1, 16))).unwrap()
    }

    fn depth2() -> SkeinTruncation {
        SkeinTruncation::build(SkeinConfig::new(2, 2, q(1, 16)).with_pair_limit(4)).unwrap()
    }

    #[test]
    fn address_round_trip() {
        for s in ["A", "B", "(A,B)#0@1/16", "((A,B)#1@3/8,B)#0@1/2"] {
            assert_eq!(s.parse::<SkeinAddress>().unwrap().to_string(), s);
        }
        assert_eq!("(A,B)#0@0".parse::<SkeinAddress>().unwrap().canonical(), SkeinAddress::A);
        assert_eq!("((A,B)#1@3/8,B)#0@1/2".parse::<SkeinAddress>().unwrap().order(), 2);
        for bad in ["", "C", "(A,B)", "(A,B)#x@1/2", "(A,B)#0@1/2junk"] {
            assert!(bad.parse::<SkeinAddress>().is_err(), "{bad}");
        }
    }

    #[test]
    fn attachment_examples() {
        let base = FiniteMetric::path(vec!["A".into(), "B".into()], &[q(1, 2)]).unwrap();
        let path = FiniteMetric::path(vec!["a".into(), "m".into(), "f".into()], &[q(1, 8), q(1, 8)]).unwrap();
        let single = Piece { space: path.clone(), glue: vec![(0, 0)] };
        let sp = attach(base.clone(), vec![single.clone()]).unwrap();
        let far = AttachedPoint::Piece { piece: 0, point: 2 };
        assert_eq!(sp.distance(far, AttachedPoint::Base { point: 1 }), q(1, 4) + q(1, 2));
        assert_eq!(
            sp.distance(AttachedPoint::Piece { piece: 0, point: 0 }, AttachedPoint::Base { point: 1 }),
            q(1, 2)
        );
        let other = Piece { space: path.clone(), glue: vec![(0, 1)] };
        let sp = attach(base.clone(), vec![single, other]).unwrap();
        let far2 = AttachedPoint::Piece { piece: 1, point: 2 };
        assert_eq!(sp.distance(far, far2), q(1, 4) + q(1, 2) + q(1, 4));
        let skew = Piece { space: path, glue: vec![(0, 0), (1, 1)] };
        assert!(matches!(attach(base, vec![skew]), Err(SkeinError::GlueNotIsometric { .. })));
    }

    #[test]
    fn threading_examples() {
        let ts = ThreadingSpace::from_rules(q(1, 2), &[GammaRule::half_bound(), SkeinConfig::gamma_rule(1)], 3).unwrap();
        let p = ThreadingPoint::On { thread: 0, coord: q(1, 10) };
        let r = ThreadingPoint::On { thread: 1, coord: q(1, 10) };
        assert_eq!(threading_distance(&ts, &p, &r).unwrap(), q(1, 5));
        assert_eq!(threading_distance(&ts, &ThreadingPoint::A, &p).unwrap(), q(1, 10));
        let far = ThreadingPoint::On { thread: 0, coord: q(15, 16) };
        assert_eq!(threading_distance(&ts, &p, &far).unwrap(), q(1, 10) + q(1, 16) + q(1, 2));
        let in_gap = ThreadingPoint::On { thread: 0, coord: q(9, 16) };
        assert!(threading_distance(&ts, &in_gap, &p).is_err());
    }

    #[test]
    fn base_and_orders() {
        let tr = depth1();
        assert_eq!(skein_distance(&tr, "A", "B").unwrap(), q(1, 2));
        assert_eq!(skein_distance(&tr, "(A,B)#1@1/16", "(A,B)#1@1/16").unwrap(), q(0, 1));
        assert_eq!(tr.order_of(tr.lookup("(A,B)#0@1/16").unwrap()), 1);
        assert_eq!(tr.lookup("(A,B)#0@0").unwrap(), 0);
        assert!(matches!(tr.lookup("(A,B)#0@9/16"), Err(SkeinError::NotMaterialized(_))));
        assert_eq!(tr.len(), 2 + 16 + 19);
    }

    #[test]
    fn depth2_matches_oracle_and_budget() {
        let tr = depth2();
        assert!(tr.len() <= 200, "{} points", tr.len());
        let table = shortest_path_table(&tr);
        let mut s = DistanceSession::new(&tr);
        for p in 0..tr.len() {
            for r in 0..tr.len() {
                assert_eq!(s.distance(p, r), table[p][r], "{} {}", tr.address(p), tr.address(r));
            }
        }
    }

    #[test]
    fn bound_examples() {
        let tr = depth1();
        let mut s = DistanceSession::new(&tr);
        let p = tr.lookup("(A,B)#0@1/16").unwrap();
        assert!(is_bound(&mut s, p, 0).unwrap());
        assert!(!is_bound(&mut s, p, 1).unwrap());
        let mid = tr.lookup("(A,B)#0@1/2").unwrap();
        assert!(!is_bound(&mut s, mid, 0).unwrap() && !is_bound(&mut s, mid, 1).unwrap());
        let r = tr.lookup("(A,B)#0@5/16").unwrap();
        assert!(!is_bound(&mut s, r, 0).unwrap());
    }

    #[test]
    fn ancestors_and_chains() {
        let tr = depth1();
        let mut s = DistanceSession::new(&tr);
        let p = tr.lookup("(A,B)#0@1/16").unwrap();
        assert_eq!(ancestor(&mut s, p, 0).unwrap(), 0);
        assert_eq!(ancestor(&mut s, p, 1).unwrap(), p);
        assert_eq!(pseudo_ancestor(&mut s, p, 0).unwrap(), 1);
        let mid = tr.lookup("(A,B)#0@1/2").unwrap();
        assert!(matches!(ancestor(&mut s, mid, 0), Err(SkeinError::OutsideStabilityBall { .. })));
        assert_eq!(chain(&mut s, 0, 1), vec![0, 1]);
        assert_eq!(chain(&mut s, p, 1), vec![p, 0, 1]);
        assert_eq!(ancestor_closure(&mut s, &[0, 1]), BTreeSet::from([0, 1]));
        assert_eq!(ancestor_closure(&mut s, &[p]), BTreeSet::from([0, p]));
    }

    #[test]
    fn obstruction_recipe() {
        let tr = depth1();
        let mut s = DistanceSession::new(&tr);
        let r = isolated_point_obstruction(&mut s, &[0, 1], 0, &q(2, 1)).unwrap();
        assert_eq!(r.chain, vec!["A", "B"]);
        assert_eq!(r.gap_budget, q(1, 4));
        assert!(matches!(isolated_point_obstruction(&mut s, &[0], 0, &q(2, 1)), Err(SkeinError::NotIsolated(_))));
        let p = tr.lookup("(A,B)#0@1/16").unwrap();
        let near = tr.lookup("(A,B)#0@1/8").unwrap();
        assert!(matches!(isolated_point_obstruction(&mut s, &[p, near], p, &q(2, 1)), Err(SkeinError::NotIsolated(_))));
    }

    #[test]
    fn truncation_json_round_trip() {
        let tr = depth2();
        let json = serde_json::to_string(&tr).unwrap();
        let back: SkeinTruncation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, tr);
        assert_eq!(back.lookup("(A,B)#1@1/2").unwrap(), tr.lookup("(A,B)#1@1/2").unwrap());
    }
}
