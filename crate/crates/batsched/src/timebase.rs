//! Exact integer time representation and busy-interval algebra.
//!
//! All scheduling arithmetic runs on [`Tick`]s, a signed count of a fixed
//! sub-minute base unit, so waveforms can be compared with `==` instead of
//! float tolerances. Conversion to and from decimal minutes happens only at
//! the file/CLI boundary through a [`TickScale`].

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Signed count of base time units. With the default scale one tick is
/// 10^-6 minutes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tick(pub i64);

impl Tick {
    pub const ZERO: Tick = Tick(0);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl Add for Tick {
    type Output = Tick;
    fn add(self, rhs: Tick) -> Tick {
        Tick(self.0 + rhs.0)
    }
}

impl Sub for Tick {
    type Output = Tick;
    fn sub(self, rhs: Tick) -> Tick {
        Tick(self.0 - rhs.0)
    }
}

impl AddAssign for Tick {
    fn add_assign(&mut self, rhs: Tick) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Tick {
    fn sub_assign(&mut self, rhs: Tick) {
        self.0 -= rhs.0;
    }
}

impl Neg for Tick {
    type Output = Tick;
    fn neg(self) -> Tick {
        Tick(-self.0)
    }
}

impl Sum for Tick {
    fn sum<I: Iterator<Item = Tick>>(iter: I) -> Tick {
        Tick(iter.map(|t| t.0).sum())
    }
}

impl fmt::Display for Tick {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}t", self.0)
    }
}

/// Resolution of the tick grid: one tick is 10^-`frac_digits` minutes.
///
/// Fixed when a scenario is built; every time literal in input files must be
/// an exact multiple of the tick, otherwise parsing fails rather than
/// rounding silently.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TickScale {
    frac_digits: u32,
}

impl Default for TickScale {
    fn default() -> Self {
        TickScale { frac_digits: 6 }
    }
}

impl TickScale {
    pub fn new(frac_digits: u32) -> Result<Self> {
        if frac_digits > 9 {
            return Err(Error::InvalidInput(format!(
                "tick resolution 1e-{frac_digits} is finer than the supported 1e-9 minutes"
            )));
        }
        Ok(TickScale { frac_digits })
    }

    /// Parse a resolution literal such as `1e-6` or `0.000001`. Only powers
    /// of ten are accepted; they are what keeps decimal inputs exact.
    pub fn from_resolution_str(text: &str) -> Result<Self> {
        let reject = || Error::InvalidInput(format!(
            "tick resolution `{text}` is not a power of ten between 1 and 1e-9 minutes"
        ));
        let (digits, point_exp) = split_decimal(text).map_err(|_| reject())?;
        // digits * 10^point_exp must equal 10^-k for some k in 0..=9
        let mut mantissa: i128 = digits.parse().map_err(|_| reject())?;
        let mut mantissa_exp = 0i64;
        while mantissa > 1 && mantissa % 10 == 0 {
            mantissa /= 10;
            mantissa_exp += 1;
        }
        if mantissa != 1 {
            return Err(reject());
        }
        let value_exp = point_exp + mantissa_exp;
        if !(-9..=0).contains(&value_exp) {
            return Err(reject());
        }
        TickScale::new((-value_exp) as u32)
    }

    pub fn ticks_per_minute(&self) -> i64 {
        10i64.pow(self.frac_digits)
    }

    /// Parse a decimal-minutes literal into ticks, exactly. Values that are
    /// not an exact multiple of the tick are rejected.
    pub fn parse_minutes(&self, text: &str) -> Result<Tick> {
        let (digits, point_exp) = split_decimal(text).map_err(|reason| Error::TimeParse {
            value: text.to_string(),
            reason,
        })?;
        let negative = text.trim().starts_with('-');
        let mantissa: i128 = digits.parse().map_err(|_| Error::TimeParse {
            value: text.to_string(),
            reason: "too many digits".to_string(),
        })?;
        // ticks = mantissa * 10^(point_exp + frac_digits)
        let exp = point_exp + self.frac_digits as i64;
        let ticks = if exp >= 0 {
            if exp > 30 {
                return Err(Error::TimeParse {
                    value: text.to_string(),
                    reason: "magnitude out of range".to_string(),
                });
            }
            mantissa.checked_mul(10i128.pow(exp as u32))
        } else {
            let div = 10i128.pow((-exp).min(40) as u32);
            if mantissa % div != 0 {
                return Err(Error::TimeParse {
                    value: text.to_string(),
                    reason: format!(
                        "not representable at tick resolution 1e-{} min",
                        self.frac_digits
                    ),
                });
            }
            Some(mantissa / div)
        };
        let ticks = ticks.ok_or_else(|| Error::TimeParse {
            value: text.to_string(),
            reason: "magnitude out of range".to_string(),
        })?;
        let ticks = if negative { -ticks } else { ticks };
        i64::try_from(ticks).map(Tick).map_err(|_| Error::TimeParse {
            value: text.to_string(),
            reason: "magnitude out of range".to_string(),
        })
    }

    /// Render ticks as a decimal-minutes string with no rounding.
    pub fn format_minutes(&self, t: Tick) -> String {
        let tpm = self.ticks_per_minute();
        let sign = if t.0 < 0 { "-" } else { "" };
        let abs = t.0.unsigned_abs();
        let whole = abs / tpm as u64;
        let frac = abs % tpm as u64;
        if frac == 0 {
            return format!("{sign}{whole}");
        }
        let digits = format!("{:0width$}", frac, width = self.frac_digits as usize);
        format!("{sign}{whole}.{}", digits.trim_end_matches('0'))
    }

    /// Convert ticks to floating-point minutes for the continuous (battery)
    /// side of the model.
    pub fn minutes_f64(&self, t: Tick) -> f64 {
        t.0 as f64 / self.ticks_per_minute() as f64
    }
}

/// Split a decimal literal (optionally signed, optional fraction, optional
/// exponent) into its digit string and the power of ten scaling it, i.e.
/// `value = digits * 10^point_exp` (sign excluded).
fn split_decimal(text: &str) -> std::result::Result<(String, i64), String> {
    let trimmed = text.trim();
    let unsigned = trimmed
        .strip_prefix('-')
        .or_else(|| trimmed.strip_prefix('+'))
        .unwrap_or(trimmed);
    if unsigned.is_empty() {
        return Err("empty".to_string());
    }
    let (mantissa_text, exp) = match unsigned.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| format!("bad exponent `{e}`"))?;
            (m, exp)
        }
        None => (unsigned, 0),
    };
    let (int_part, frac_part) = match mantissa_text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa_text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err("no digits".to_string());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err("not a decimal number".to_string());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.trim_start_matches('0').is_empty() {
        "0".to_string()
    } else {
        digits
    };
    Ok((digits, exp - frac_part.len() as i64))
}

/// Half-open time span `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    start: Tick,
    end: Tick,
}

impl Interval {
    pub fn new(start: Tick, end: Tick) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidInput(format!(
                "interval start {start} exceeds end {end}"
            )));
        }
        Ok(Interval { start, end })
    }

    pub fn start(&self) -> Tick {
        self.start
    }

    pub fn end(&self) -> Tick {
        self.end
    }

    pub fn width(&self) -> Tick {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, t: Tick) -> bool {
        self.start <= t && t < self.end
    }
}

/// Normalized finite union of half-open intervals: sorted, pairwise disjoint,
/// non-adjacent, no empty members. This is the carrier for busy/free
/// waveforms; a time point is "busy" iff it lies in the set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new() -> Self {
        IntervalSet::default()
    }

    /// Build from arbitrary intervals: empties dropped, overlapping or
    /// touching intervals merged.
    pub fn from_unnormalized<I: IntoIterator<Item = Interval>>(intervals: I) -> Self {
        let mut items: Vec<Interval> = intervals.into_iter().filter(|iv| !iv.is_empty()).collect();
        items.sort_by_key(|iv| (iv.start, iv.end));
        let mut merged: Vec<Interval> = Vec::with_capacity(items.len());
        for iv in items {
            match merged.last_mut() {
                Some(last) if iv.start <= last.end => {
                    if iv.end > last.end {
                        last.end = iv.end;
                    }
                }
                _ => merged.push(iv),
            }
        }
        IntervalSet { intervals: merged }
    }

    pub fn singleton(iv: Interval) -> Self {
        IntervalSet::from_unnormalized([iv])
    }

    /// Set union; invariants restored (adjacent pieces merge).
    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut out: Vec<Interval> = Vec::with_capacity(self.intervals.len() + other.intervals.len());
        let (mut a, mut b) = (self.intervals.iter().peekable(), other.intervals.iter().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => {
                    if x.start <= y.start {
                        *a.next().unwrap()
                    } else {
                        *b.next().unwrap()
                    }
                }
                (Some(_), None) => *a.next().unwrap(),
                (None, Some(_)) => *b.next().unwrap(),
                (None, None) => break,
            };
            match out.last_mut() {
                Some(last) if next.start <= last.end => {
                    if next.end > last.end {
                        last.end = next.end;
                    }
                }
                _ => out.push(next),
            }
        }
        IntervalSet { intervals: out }
    }

    /// True iff `t` lies in some `[start, end)` member.
    pub fn contains(&self, t: Tick) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.end <= t);
        self.intervals.get(idx).is_some_and(|iv| iv.contains(t))
    }

    /// Total width of all members.
    pub fn measure(&self) -> Tick {
        self.intervals.iter().map(|iv| iv.width()).sum()
    }

    /// Restrict the set to a clamp interval.
    pub fn intersect(&self, clamp: Interval) -> IntervalSet {
        let intervals = self
            .intervals
            .iter()
            .filter(|iv| iv.end > clamp.start && iv.start < clamp.end)
            .map(|iv| Interval {
                start: iv.start.max(clamp.start),
                end: iv.end.min(clamp.end),
            })
            .filter(|iv| !iv.is_empty())
            .collect();
        IntervalSet { intervals }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Interval> {
        self.intervals.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }
}

impl FromIterator<Interval> for IntervalSet {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        IntervalSet::from_unnormalized(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(start: i64, end: i64) -> Interval {
        Interval::new(Tick(start), Tick(end)).unwrap()
    }

    fn set(pairs: &[(i64, i64)]) -> IntervalSet {
        IntervalSet::from_unnormalized(pairs.iter().map(|&(s, e)| iv(s, e)))
    }

    #[test]
    fn union_merges_adjacent() {
        let merged = set(&[(0, 2)]).union(&set(&[(2, 3)]));
        assert_eq!(merged, set(&[(0, 3)]));
    }

    #[test]
    fn union_identity() {
        let a = set(&[(0, 500_000)]);
        assert_eq!(a.union(&IntervalSet::new()), a);
        assert_eq!(IntervalSet::new().union(&a), a);
    }

    #[test]
    fn union_idempotent() {
        let a = set(&[(2_000_000, 2_300_000)]);
        assert_eq!(a.union(&a), a);
    }

    #[test]
    fn contains_half_open_endpoints() {
        let s = set(&[(0, 1)]);
        assert!(s.contains(Tick(0)));
        assert!(!s.contains(Tick(1)));
    }

    #[test]
    fn contains_between_pieces() {
        // 51.1 min at 1e-6 resolution falls in the gap of this set
        let s = set(&[(50_800_000, 51_000_000), (51_300_000, 51_600_000)]);
        assert!(!s.contains(Tick(51_100_000)));
        assert!(s.contains(Tick(51_300_000)));
    }

    #[test]
    fn measure_examples() {
        assert_eq!(IntervalSet::new().measure(), Tick(0));
        assert_eq!(set(&[(0, 1), (2, 3)]).measure(), Tick(2));
    }

    #[test]
    fn zero_width_is_identity() {
        let s = set(&[(5, 5)]);
        assert!(s.is_empty());
        let joined = set(&[(0, 1)]).union(&s);
        assert_eq!(joined, set(&[(0, 1)]));
    }

    #[test]
    fn intersect_clamps() {
        let s = set(&[(0, 10), (20, 30)]);
        assert_eq!(s.intersect(iv(5, 25)), set(&[(5, 10), (20, 25)]));
        assert!(s.intersect(iv(12, 18)).is_empty());
    }

    #[test]
    fn parse_minutes_exact() {
        let scale = TickScale::default();
        assert_eq!(scale.parse_minutes("50.8").unwrap(), Tick(50_800_000));
        assert_eq!(scale.parse_minutes("0.3").unwrap(), Tick(300_000));
        assert_eq!(scale.parse_minutes("0").unwrap(), Tick(0));
        assert_eq!(scale.parse_minutes("-1.5").unwrap(), Tick(-1_500_000));
        assert_eq!(scale.parse_minutes("1e-6").unwrap(), Tick(1));
        assert_eq!(scale.parse_minutes("0.1000000").unwrap(), Tick(100_000));
    }

    #[test]
    fn parse_minutes_rejects_excess_precision() {
        let scale = TickScale::default();
        assert!(scale.parse_minutes("0.1234567").is_err());
        assert!(scale.parse_minutes("1e-7").is_err());
        let coarse = TickScale::new(3).unwrap();
        assert!(coarse.parse_minutes("0.0001").is_err());
        assert_eq!(coarse.parse_minutes("0.125").unwrap(), Tick(125));
    }

    #[test]
    fn parse_minutes_rejects_garbage() {
        let scale = TickScale::default();
        assert!(scale.parse_minutes("").is_err());
        assert!(scale.parse_minutes("1.2.3").is_err());
        assert!(scale.parse_minutes("abc").is_err());
        assert!(scale.parse_minutes("99999999999999999999").is_err());
    }

    #[test]
    fn format_minutes_round_trips() {
        let scale = TickScale::default();
        for text in ["0", "50.8", "0.3", "57.1", "-2.25", "189.000001"] {
            let t = scale.parse_minutes(text).unwrap();
            assert_eq!(scale.format_minutes(t), *text);
        }
    }

    #[test]
    fn resolution_literals() {
        assert_eq!(
            TickScale::from_resolution_str("1e-6").unwrap(),
            TickScale::default()
        );
        assert_eq!(
            TickScale::from_resolution_str("0.000001").unwrap(),
            TickScale::default()
        );
        assert_eq!(
            TickScale::from_resolution_str("1").unwrap(),
            TickScale::new(0).unwrap()
        );
        assert_eq!(
            TickScale::from_resolution_str("0.001").unwrap(),
            TickScale::new(3).unwrap()
        );
        assert!(TickScale::from_resolution_str("2e-6").is_err());
        assert!(TickScale::from_resolution_str("1e-10").is_err());
        assert!(TickScale::from_resolution_str("10").is_err());
    }

    prop_compose! {
        fn arb_intervals(max_len: usize)
            (pairs in prop::collection::vec((0i64..2_000, 0i64..200), 0..max_len))
            -> Vec<Interval>
        {
            pairs.into_iter().map(|(s, w)| iv(s, s + w)).collect()
        }
    }

    proptest! {
        #[test]
        fn union_commutative_associative(a in arb_intervals(12), b in arb_intervals(12), c in arb_intervals(12)) {
            let (a, b, c) = (
                IntervalSet::from_unnormalized(a),
                IntervalSet::from_unnormalized(b),
                IntervalSet::from_unnormalized(c),
            );
            prop_assert_eq!(a.union(&b), b.union(&a));
            prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
            prop_assert_eq!(a.union(&a), a.clone());
        }

        #[test]
        fn union_measure_subadditive(a in arb_intervals(12), b in arb_intervals(12)) {
            let (a, b) = (IntervalSet::from_unnormalized(a), IntervalSet::from_unnormalized(b));
            let joint = a.union(&b);
            prop_assert!(joint.measure() <= a.measure() + b.measure());
        }

        #[test]
        fn contains_matches_naive_scan(raw in arb_intervals(12), t in 0i64..2_400) {
            let t = Tick(t);
            let naive = raw.iter().any(|iv| iv.contains(t));
            let normalized = IntervalSet::from_unnormalized(raw);
            prop_assert_eq!(normalized.contains(t), naive);
        }

        #[test]
        fn union_membership(a in arb_intervals(10), b in arb_intervals(10), t in 0i64..2_400) {
            let t = Tick(t);
            let (a, b) = (IntervalSet::from_unnormalized(a), IntervalSet::from_unnormalized(b));
            prop_assert_eq!(a.union(&b).contains(t), a.contains(t) || b.contains(t));
        }

        #[test]
        fn format_parse_round_trip(ticks in -10_000_000_000i64..10_000_000_000) {
            let scale = TickScale::default();
            let text = scale.format_minutes(Tick(ticks));
            prop_assert_eq!(scale.parse_minutes(&text).unwrap(), Tick(ticks));
        }
    }
}
