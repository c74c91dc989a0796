//! Fat Cantor threads `T_γ`.
//!
//! Gaps are placed greedily: the `i`-th gap is `(q_n, q_n + γ_i)` for the
//! first rational `q_n` of a fixed enumeration of `(0, 1)` whose candidate
//! interval fits in `(0, 1)` without meeting an earlier gap. The enumeration
//! lists reduced fractions by denominator, then numerator.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{OpenInterval, Rational};
use crate::thread::{Thread, ThreadError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CantorError {
    #[error("enumeration indices start at 1")]
    InvalidIndex,
    #[error("gamma rejected at index {index}: {violation}")]
    InvalidGamma { index: usize, violation: GammaViolation },
    #[error("gamma prefix has no term {needed}")]
    GammaExhausted { needed: usize },
    #[error(transparent)]
    Thread(#[from] ThreadError),
}

/// The reduced fractions of `(0, 1)`: 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, …
#[derive(Clone, Debug)]
pub struct RationalEnumeration {
    num: i64,
    den: i64,
}

impl RationalEnumeration {
    pub fn new() -> Self {
        RationalEnumeration { num: 0, den: 2 }
    }
}

impl Default for RationalEnumeration {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for RationalEnumeration {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        loop {
            self.num += 1;
            if self.num >= self.den {
                self.den += 1;
                self.num = 1;
            }
            if self.num.gcd(&self.den) == 1 {
                return Some(Rational::frac(self.num, self.den));
            }
        }
    }
}

/// The `n`-th rational of the enumeration, 1-based.
pub fn rational_at(n: usize) -> Result<Rational, CantorError> {
    if n == 0 {
        return Err(CantorError::InvalidIndex);
    }
    Ok(RationalEnumeration::new().nth(n - 1).expect("enumeration is infinite"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaViolation {
    /// γ_i > 0
    NotPositive,
    /// γ_i < γ_{i-1}
    NotDecreasing,
    /// γ_i < 2^{-(i+1)}
    AboveBound,
    /// q_1 + γ_1 < 1
    FirstGapOverflow,
}

impl std::fmt::Display for GammaViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GammaViolation::NotPositive => "not positive",
            GammaViolation::NotDecreasing => "not strictly decreasing",
            GammaViolation::AboveBound => "not below 2^-(i+1)",
            GammaViolation::FirstGapOverflow => "first gap does not fit in (0,1)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum GammaVerdict {
    Accept,
    Reject { index: usize, violation: GammaViolation },
}

/// Check membership of a finite prefix in the admissible class.
///
/// Conditions are checked index by index in the order positivity,
/// monotonicity, bound; the first failure is reported (1-based index).
pub fn validate_gamma(gamma: &[Rational]) -> GammaVerdict {
    for (k, g) in gamma.iter().enumerate() {
        let index = k + 1;
        let fail = |violation| GammaVerdict::Reject { index, violation };
        if !g.is_positive() {
            return fail(GammaViolation::NotPositive);
        }
        if k > 0 && g >= &gamma[k - 1] {
            return fail(GammaViolation::NotDecreasing);
        }
        if g >= &Rational::pow2_neg(index as u32 + 1) {
            return fail(GammaViolation::AboveBound);
        }
    }
    // q_1 = 1/2, so the last condition reads γ_1 < 1/2; the bound already forces it.
    if let Some(g) = gamma.first() {
        if g >= &Rational::frac(1, 2) {
            return GammaVerdict::Reject { index: 1, violation: GammaViolation::FirstGapOverflow };
        }
    }
    GammaVerdict::Accept
}

/// Closed-form admissible sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum GammaRule {
    /// `γ_i = 2^{-(i+1+shift)}`, `shift >= 1`; `shift = 1` is the half-bound preset.
    Geometric { shift: u32 },
    /// `γ_i = min(2^{-(i+2)}, cap · 2^{-i})`: half-bound, but every gap below `cap`.
    Capped { cap: Rational },
}

impl GammaRule {
    pub fn half_bound() -> Self {
        GammaRule::Geometric { shift: 1 }
    }

    /// Parse a CLI preset name.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "half-bound" => Some(Self::half_bound()),
            _ => None,
        }
    }

    /// `γ_i`, 1-based.
    pub fn term(&self, i: usize) -> Rational {
        let i = i as u32;
        match self {
            GammaRule::Geometric { shift } => Rational::pow2_neg(i + 1 + shift),
            GammaRule::Capped { cap } => {
                Rational::pow2_neg(i + 2).min(cap * &Rational::pow2_neg(i))
            }
        }
    }

    /// Upper bound on `Σ_{i>k} γ_i`.
    pub fn tail_bound(&self, k: usize) -> Rational {
        match self {
            GammaRule::Geometric { shift } => Rational::pow2_neg(k as u32 + 1 + shift),
            GammaRule::Capped { .. } => Rational::pow2_neg(k as u32 + 2),
        }
    }

    fn check(&self) -> Result<(), CantorError> {
        let bad = |violation| Err(CantorError::InvalidGamma { index: 1, violation });
        match self {
            GammaRule::Geometric { shift } if *shift == 0 => bad(GammaViolation::AboveBound),
            GammaRule::Capped { cap } if !cap.is_positive() => bad(GammaViolation::NotPositive),
            _ => Ok(()),
        }
    }
}

/// Where gap lengths come from: an explicit finite prefix or a rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaSource {
    Prefix(Vec<Rational>),
    Rule(GammaRule),
}

impl GammaSource {
    pub fn term(&self, i: usize) -> Option<Rational> {
        match self {
            GammaSource::Prefix(v) => v.get(i - 1).cloned(),
            GammaSource::Rule(r) => Some(r.term(i)),
        }
    }

    /// Upper bound on the total length of gaps after the first `k`.
    pub fn tail_bound(&self, k: usize) -> Rational {
        match self {
            GammaSource::Prefix(v) => v.iter().skip(k).sum(),
            GammaSource::Rule(r) => r.tail_bound(k),
        }
    }

    pub fn validate(&self) -> Result<(), CantorError> {
        match self {
            GammaSource::Prefix(v) => match validate_gamma(v) {
                GammaVerdict::Accept => Ok(()),
                GammaVerdict::Reject { index, violation } => {
                    Err(CantorError::InvalidGamma { index, violation })
                }
            },
            GammaSource::Rule(r) => r.check(),
        }
    }
}

/// Lazy, resumable producer of the gaps `G^γ_1, G^γ_2, …`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapStream {
    gamma: GammaSource,
    /// In emission order.
    emitted: Vec<OpenInterval>,
    #[serde(skip)]
    sorted: Vec<OpenInterval>,
}

impl PartialEq for GapStream {
    fn eq(&self, other: &Self) -> bool {
        self.gamma == other.gamma && self.emitted == other.emitted
    }
}

impl Eq for GapStream {}

impl GapStream {
    pub fn new(gamma: GammaSource) -> Result<Self, CantorError> {
        gamma.validate()?;
        Ok(GapStream { gamma, emitted: Vec::new(), sorted: Vec::new() })
    }

    pub fn gamma(&self) -> &GammaSource {
        &self.gamma
    }

    pub fn emitted(&self) -> &[OpenInterval] {
        &self.emitted
    }

    /// Index of the next gap to be produced (1-based).
    pub fn cursor(&self) -> usize {
        self.emitted.len() + 1
    }

    /// Pure transition: the next gap and the advanced stream.
    pub fn next_gap(&self) -> Result<(OpenInterval, GapStream), CantorError> {
        let mut next = self.clone();
        let gap = next.advance()?.clone();
        Ok((gap, next))
    }

    /// Produce the next gap in place.
    pub fn advance(&mut self) -> Result<&OpenInterval, CantorError> {
        if self.sorted.len() != self.emitted.len() {
            // Rebuilt lazily after deserialization.
            self.sorted = self.emitted.clone();
            self.sorted.sort();
        }
        let i = self.cursor();
        let len = self.gamma.term(i).ok_or(CantorError::GammaExhausted { needed: i })?;
        let one = Rational::one();
        for q in RationalEnumeration::new() {
            let right = &q + &len;
            if right > one {
                continue;
            }
            let cand = OpenInterval::new(q, right).expect("positive length");
            if !self.meets_emitted(&cand) {
                let pos = self.sorted.partition_point(|g| g < &cand);
                self.sorted.insert(pos, cand.clone());
                self.emitted.push(cand);
                return Ok(self.emitted.last().expect("just pushed"));
            }
        }
        unreachable!("the enumeration is infinite")
    }

    /// Advance until at least `k` gaps exist.
    pub fn ensure(&mut self, k: usize) -> Result<(), CantorError> {
        while self.emitted.len() < k {
            self.advance()?;
        }
        Ok(())
    }

    fn meets_emitted(&self, cand: &OpenInterval) -> bool {
        // Emitted gaps are disjoint, so sorted by left they are sorted by right too.
        let idx = self.sorted.partition_point(|g| g.left() < cand.right());
        idx > 0 && self.sorted[idx - 1].intersects(cand)
    }

    /// The truncation `[0,1]` minus the emitted gaps, with the given width.
    pub fn thread(&self, width: Rational) -> Result<Thread, CantorError> {
        Ok(Thread::new(Rational::one(), width, self.emitted.clone())?)
    }

    /// A lower bound for the measure of the limit set: the truncation's
    /// measure minus a bound on every gap still to come.
    pub fn measure_lower_bound(&self) -> Rational {
        let used: Rational = self.emitted.iter().map(|g| g.length()).sum();
        Rational::one() - used - self.gamma.tail_bound(self.emitted.len())
    }
}

/// `T_γ(1, a)` truncated after its first `k` gaps.
pub fn build_thread(gamma: &[Rational], k: usize, width: Rational) -> Result<Thread, CantorError> {
    if k > gamma.len() {
        return Err(CantorError::GammaExhausted { needed: gamma.len() + 1 });
    }
    let mut stream = GapStream::new(GammaSource::Prefix(gamma[..k].to_vec()))?;
    stream.ensure(k)?;
    stream.thread(width)
}

/// Same as [`build_thread`] for a rule-generated sequence.
pub fn build_thread_from_rule(rule: &GammaRule, k: usize, width: Rational) -> Result<Thread, CantorError> {
    let mut stream = GapStream::new(GammaSource::Rule(rule.clone()))?;
    stream.ensure(k)?;
    stream.thread(width)
}
