//! Threads: closed subsets of `[0, l]` containing both ends, with the
//! wrap-around metric `d(x,y) = min(|x-y|, x + (l-y) + a, y + (l-x) + a)`.
//!
//! A thread is stored as its length `l`, its width `a = d(0, l)` and the
//! finitely many gaps (maximal open intervals missing from it) materialized
//! so far.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{OpenInterval, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThreadError {
    #[error("invalid thread: {0}")]
    InvalidThread(String),
    #[error("{0} is not a point of the thread")]
    InvalidPoint(Rational),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("no gap separates {p} from {q} in the materialized truncation")]
    NotSeparableAtTruncation { p: Rational, q: Rational },
}

/// A thread of length `l` and width `a`, `0 < a <= l`.
///
/// Gaps are kept sorted by left endpoint. Gaps may share an endpoint (which
/// is then an isolated point of the thread) and may touch `0` or `l`; the
/// extremes always belong to the thread because gaps are open.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ThreadRepr", into = "ThreadRepr")]
pub struct Thread {
    length: Rational,
    width: Rational,
    gaps: Vec<OpenInterval>,
}

#[derive(Serialize, Deserialize)]
struct ThreadRepr {
    length: Rational,
    width: Rational,
    gaps: Vec<OpenInterval>,
}

impl TryFrom<ThreadRepr> for Thread {
    type Error = ThreadError;
    fn try_from(r: ThreadRepr) -> Result<Self, Self::Error> {
        Thread::new(r.length, r.width, r.gaps)
    }
}

impl From<Thread> for ThreadRepr {
    fn from(t: Thread) -> Self {
        ThreadRepr { length: t.length, width: t.width, gaps: t.gaps }
    }
}

impl std::fmt::Debug for Thread {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Thread(l={}, a={}, gaps={:?})", self.length, self.width, self.gaps)
    }
}

/// A coordinate already checked to lie on some thread.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThreadPoint(Rational);

impl ThreadPoint {
    pub fn coord(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }
}

/// Either `[p, q]_T` or the wrap-around set `[0, p]_T ∪ [q, l]_T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "UPPERCASE")]
pub enum ExtendedInterval {
    Inner { p: Rational, q: Rational },
    Outer { p: Rational, q: Rational },
}

impl ExtendedInterval {
    /// Membership of a coordinate (thread membership is the caller's concern).
    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            ExtendedInterval::Inner { p, q } => p <= x && x <= q,
            ExtendedInterval::Outer { p, q } => x <= p || q <= x,
        }
    }
}

/// The two closed pieces `[0, x]_T` and `[y, l]_T` cut at a gap `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingSplit {
    pub gap: OpenInterval,
    /// `[0, gap.left]`
    pub lower: (Rational, Rational),
    /// `[gap.right, l]`
    pub upper: (Rational, Rational),
}

impl Thread {
    pub fn new(length: Rational, width: Rational, mut gaps: Vec<OpenInterval>) -> Result<Self, ThreadError> {
        let bad = |m: String| Err(ThreadError::InvalidThread(m));
        if !length.is_positive() {
            return bad(format!("length {length} must be positive"));
        }
        if !width.is_positive() || width > length {
            return bad(format!("width {width} must satisfy 0 < a <= {length}"));
        }
        gaps.sort();
        for g in &gaps {
            if g.is_empty() {
                return bad(format!("empty gap {g}"));
            }
            if g.left().is_negative() || g.right() > &length {
                return bad(format!("gap {g} leaves [0, {length}]"));
            }
        }
        for w in gaps.windows(2) {
            if w[0].right() > w[1].left() {
                return bad(format!("gaps {} and {} overlap", w[0], w[1]));
            }
        }
        Ok(Thread { length, width, gaps })
    }

    /// A thread with no gaps.
    pub fn segment(length: Rational, width: Rational) -> Result<Self, ThreadError> {
        Thread::new(length, width, Vec::new())
    }

    pub fn length(&self) -> &Rational {
        &self.length
    }

    pub fn width(&self) -> &Rational {
        &self.width
    }

    pub fn gaps(&self) -> &[OpenInterval] {
        &self.gaps
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        if x.is_negative() || x > &self.length {
            return false;
        }
        // The last gap starting strictly left of x is the only candidate cover.
        let idx = self.gaps.partition_point(|g| g.left() < x);
        idx == 0 || !self.gaps[idx - 1].contains_point(x)
    }

    pub fn point(&self, x: Rational) -> Result<ThreadPoint, ThreadError> {
        if self.contains_point(&x) {
            Ok(ThreadPoint(x))
        } else {
            Err(ThreadError::InvalidPoint(x))
        }
    }

    /// The raw metric formula; callers are responsible for point validity.
    pub fn metric(&self, x: &Rational, y: &Rational) -> Rational {
        thread_metric(&self.length, &self.width, x, y)
    }

    pub fn distance(&self, x: &ThreadPoint, y: &ThreadPoint) -> Rational {
        self.metric(&x.0, &y.0)
    }

    /// Distance between raw coordinates, validating both.
    pub fn distance_checked(&self, x: &Rational, y: &Rational) -> Result<Rational, ThreadError> {
        for p in [x, y] {
            if !self.contains_point(p) {
                return Err(ThreadError::InvalidPoint(p.clone()));
            }
        }
        Ok(self.metric(x, y))
    }

    /// `[x, y]_T` as a thread of its own, coordinates shifted by `-x`.
    pub fn subthread(&self, x: &Rational, y: &Rational) -> Result<Thread, ThreadError> {
        if x >= y {
            return Err(ThreadError::InvalidInterval(format!("need x < y, got {x} >= {y}")));
        }
        for p in [x, y] {
            if !self.contains_point(p) {
                return Err(ThreadError::InvalidPoint(p.clone()));
            }
        }
        let len = y - x;
        // d_T(x, y) in closed form, since x < y.
        let width = len.clone().min(&self.width + x + (&self.length - y));
        let shift = -x;
        let gaps = self
            .gaps
            .iter()
            .filter(|g| x <= g.left() && g.right() <= y)
            .map(|g| g.shifted(&shift))
            .collect();
        Thread::new(len, width, gaps)
    }

    /// Gaps ordered by decreasing length, ties by ascending left endpoint.
    pub fn gaps_by_length(&self) -> Vec<OpenInterval> {
        let mut v = self.gaps.clone();
        v.sort_by(compare_by_length);
        v
    }

    /// Lebesgue measure of the materialized point set.
    pub fn measure(&self) -> Rational {
        &self.length - self.gaps.iter().map(|g| g.length()).sum::<Rational>()
    }

    /// Whether `(p, q)_T` has no points, i.e. `(p, q)` is itself a gap.
    pub fn open_part_is_empty(&self, p: &Rational, q: &Rational) -> bool {
        self.gaps.iter().any(|g| g.left() == p && g.right() == q)
    }

    /// Split the thread at a gap lying between `p < q`.
    ///
    /// When `(p, q)` is itself a gap the split is at that gap; otherwise the
    /// longest gap inside `[p, q]` is used.
    pub fn separating_split(&self, p: &Rational, q: &Rational) -> Result<SeparatingSplit, ThreadError> {
        for x in [p, q] {
            if !self.contains_point(x) {
                return Err(ThreadError::InvalidPoint(x.clone()));
            }
        }
        if p >= q {
            return Err(ThreadError::InvalidInterval(format!("need p < q, got {p} >= {q}")));
        }
        let gap = if self.open_part_is_empty(p, q) {
            OpenInterval::new(p.clone(), q.clone()).expect("p < q")
        } else {
            self.gaps_by_length()
                .into_iter()
                .find(|g| p <= g.left() && g.right() <= q)
                .ok_or_else(|| ThreadError::NotSeparableAtTruncation { p: p.clone(), q: q.clone() })?
        };
        Ok(SeparatingSplit {
            lower: (Rational::zero(), gap.left().clone()),
            upper: (gap.right().clone(), self.length.clone()),
            gap,
        })
    }

    /// Multiples of `step` in `[0, l]` that lie on the thread, together with
    /// `0`, `l` and every gap endpoint; sorted and deduplicated.
    pub fn sample_points(&self, step: &Rational) -> Vec<Rational> {
        assert!(step.is_positive(), "sample step must be positive");
        let mut pts = vec![Rational::zero(), self.length.clone()];
        let mut x = step.clone();
        while x < self.length {
            if self.contains_point(&x) {
                pts.push(x.clone());
            }
            x += step;
        }
        for g in &self.gaps {
            pts.push(g.left().clone());
            pts.push(g.right().clone());
        }
        pts.sort();
        pts.dedup();
        pts
    }

    /// Same length and width with a different gap set.
    pub fn with_gaps(&self, gaps: Vec<OpenInterval>) -> Result<Thread, ThreadError> {
        Thread::new(self.length.clone(), self.width.clone(), gaps)
    }
}

pub fn compare_by_length(a: &OpenInterval, b: &OpenInterval) -> Ordering {
    b.length().cmp(&a.length()).then_with(|| a.left().cmp(b.left()))
}

/// `d_{l,a}(x, y)`.
pub fn thread_metric(l: &Rational, a: &Rational, x: &Rational, y: &Rational) -> Rational {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let direct = hi - lo;
    // Of the two wrap terms the one starting from the smaller coordinate is never larger.
    let wrap = lo + (l - hi) + a;
    direct.min(wrap)
}
