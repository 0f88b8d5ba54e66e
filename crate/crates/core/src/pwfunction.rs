//! Z-periodic, possibly discontinuous piecewise linear functions.
//!
//! A function is stored on the fundamental domain `[0, 1)` by its breakpoints,
//! each with a value and the two one-sided limits. The datum at `x = 1` is the
//! one at `x = 0`. On every open interval between consecutive breakpoints the
//! function is affine, so it is determined by the right limit at the left end
//! and the left limit at the right end.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::QuadraticElement as QE;

/// Which value of a function at a point: the limit from the left, the value
/// itself, or the limit from the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    At,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BreakpointDatum {
    pub x: QE,
    pub value: QE,
    pub left_limit: QE,
    pub right_limit: QE,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::At => "at",
            Side::Right => "right",
        })
    }
}

impl BreakpointDatum {
    pub fn continuous(x: QE, value: QE) -> Self {
        BreakpointDatum {
            x,
            left_limit: value.clone(),
            right_limit: value.clone(),
            value,
        }
    }

    pub fn get(&self, side: Side) -> &QE {
        match side {
            Side::Left => &self.left_limit,
            Side::At => &self.value,
            Side::Right => &self.right_limit,
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.left_limit == self.value && self.value == self.right_limit
    }
}

/// Position of a point of `[0, 1)` relative to the breakpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// Equal to breakpoint `i`.
    Breakpoint(usize),
    /// Strictly inside the open interval following breakpoint `i`.
    Interior(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseFunction {
    f: Option<QE>,
    breakpoints: Vec<BreakpointDatum>,
    /// Declared slope of the interval following each breakpoint, when known.
    slopes: Option<Vec<QE>>,
    derived: SlopeCache,
}

/// Lazily computed slopes derived from the limits; ignored by comparisons.
#[derive(Clone, Debug, Default)]
struct SlopeCache(OnceLock<Vec<QE>>);

impl PartialEq for SlopeCache {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for SlopeCache {}

/// First limit/slope mismatch found by [`PiecewiseFunction::check_table_consistency`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableViolation {
    /// Index of the interval `(x_i, x_{i+1})`.
    pub interval: usize,
    pub declared_slope: QE,
    pub expected_left_limit: QE,
    pub found_left_limit: QE,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub first_violation: Option<TableViolation>,
}

impl PiecewiseFunction {
    /// Builds a function from breakpoints in `[0, 1)` starting at 0.
    ///
    /// Declared slopes are optional; if given there must be one per
    /// breakpoint. They are not checked against the limits here, see
    /// [`check_table_consistency`](Self::check_table_consistency).
    pub fn new(f: Option<QE>, breakpoints: Vec<BreakpointDatum>, slopes: Option<Vec<QE>>) -> Result<Self> {
        let first = breakpoints
            .first()
            .ok_or_else(|| Error::InvalidFunction("no breakpoints".into()))?;
        if !first.x.is_zero() {
            return Err(Error::InvalidFunction("first breakpoint must be 0".into()));
        }
        for w in breakpoints.windows(2) {
            if w[0].x >= w[1].x {
                return Err(Error::InvalidFunction(format!(
                    "breakpoints not strictly increasing at {}",
                    w[1].x
                )));
            }
        }
        if breakpoints.last().unwrap().x >= QE::one() {
            return Err(Error::InvalidFunction("breakpoints must lie in [0, 1)".into()));
        }
        if let Some(s) = &slopes {
            if s.len() != breakpoints.len() {
                return Err(Error::InvalidFunction("one slope per interval expected".into()));
            }
        }
        if let Some(f) = &f {
            if f.sign() <= 0 || *f >= QE::one() {
                return Err(Error::InvalidFunction(format!("f = {} outside (0, 1)", f)));
            }
        }
        Ok(PiecewiseFunction {
            f,
            breakpoints,
            slopes,
            derived: SlopeCache::default(),
        })
    }

    /// Continuous function interpolating `(x_i, value_i)`; the value at 1 is
    /// the value at 0.
    pub fn continuous(f: Option<QE>, points: Vec<(QE, QE)>) -> Result<Self> {
        let bps = points
            .into_iter()
            .map(|(x, v)| BreakpointDatum::continuous(x, v))
            .collect();
        Self::new(f, bps, None)
    }

    pub fn f(&self) -> Option<&QE> {
        self.f.as_ref()
    }

    pub fn with_f(mut self, f: Option<QE>) -> Self {
        self.f = f;
        self
    }

    pub fn breakpoints(&self) -> &[BreakpointDatum] {
        &self.breakpoints
    }

    pub fn breakpoint_xs(&self) -> Vec<QE> {
        self.breakpoints.iter().map(|b| b.x.clone()).collect()
    }

    pub fn declared_slopes(&self) -> Option<&[QE]> {
        self.slopes.as_deref()
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// Right end of interval `i` (1 for the last interval).
    pub fn interval_end(&self, i: usize) -> QE {
        self.breakpoints
            .get(i + 1)
            .map(|b| b.x.clone())
            .unwrap_or_else(QE::one)
    }

    /// Left limit at the right end of interval `i`, with wrap-around.
    fn left_limit_after(&self, i: usize) -> &QE {
        &self.breakpoints[(i + 1) % self.breakpoints.len()].left_limit
    }

    /// Slope of the affine piece on interval `i`, derived from its limits.
    pub fn slope(&self, i: usize) -> QE {
        self.derived_slopes()[i].clone()
    }

    pub fn slopes(&self) -> Vec<QE> {
        self.derived_slopes().to_vec()
    }

    fn derived_slopes(&self) -> &[QE] {
        self.derived.0.get_or_init(|| {
            (0..self.len())
                .map(|i| {
                    let width = &self.interval_end(i) - &self.breakpoints[i].x;
                    &(self.left_limit_after(i) - &self.breakpoints[i].right_limit) / &width
                })
                .collect()
        })
    }

    /// Locates a point of `[0, 1)` by exact binary search.
    pub fn locate(&self, x: &QE) -> Location {
        match self.breakpoints.binary_search_by(|b| b.x.cmp(x)) {
            Ok(i) => Location::Breakpoint(i),
            Err(i) => Location::Interior(i - 1),
        }
    }

    fn reduce(x: &QE) -> QE {
        if x.sign() >= 0 && *x < QE::one() {
            x.clone()
        } else {
            x.fractional_part()
        }
    }

    /// Value (`Side::At`) or one-sided limit of the periodic function at `x`.
    pub fn limit(&self, x: &QE, side: Side) -> QE {
        let x = Self::reduce(x);
        match self.locate(&x) {
            Location::Breakpoint(i) => self.breakpoints[i].get(side).clone(),
            Location::Interior(i) => self.interior_value(i, &x),
        }
    }

    /// Affine extension of the piece on interval `i`, evaluated at `x`.
    pub fn interior_value(&self, i: usize, x: &QE) -> QE {
        let b = &self.breakpoints[i];
        &b.right_limit + &(&self.derived_slopes()[i] * &(x - &b.x))
    }

    pub fn evaluate(&self, x: &QE) -> QE {
        self.limit(x, Side::At)
    }

    /// Subadditivity slack `π(x) + π(y) - π(x + y)`.
    pub fn delta_pi(&self, x: &QE, y: &QE) -> QE {
        &(&self.evaluate(x) + &self.evaluate(y)) - &self.evaluate(&(x + y))
    }

    /// The same function with additional breakpoints at the given points
    /// (reduced mod 1); data at new breakpoints is synthesized by affine
    /// extension of the interval they split.
    pub fn refined(&self, points: &[QE]) -> Self {
        let mut extra: Vec<QE> = points.iter().map(Self::reduce).collect();
        extra.sort();
        extra.dedup();
        let mut out: Vec<BreakpointDatum> = Vec::with_capacity(self.len() + extra.len());
        let mut slopes: Vec<QE> = Vec::new();
        let mut k = 0;
        for (i, b) in self.breakpoints.iter().enumerate() {
            out.push(b.clone());
            if let Some(s) = &self.slopes {
                slopes.push(s[i].clone());
            }
            let end = self.interval_end(i);
            while k < extra.len() && extra[k] <= b.x {
                k += 1;
            }
            while k < extra.len() && extra[k] < end {
                let v = self.interior_value(i, &extra[k]);
                out.push(BreakpointDatum::continuous(extra[k].clone(), v));
                if let Some(s) = &self.slopes {
                    slopes.push(s[i].clone());
                }
                k += 1;
            }
        }
        PiecewiseFunction {
            f: self.f.clone(),
            breakpoints: out,
            slopes: self.slopes.as_ref().map(|_| slopes),
            derived: SlopeCache::default(),
        }
    }

    /// Common refinement of two functions: both over the union of breakpoints.
    pub fn common_refinement(&self, other: &Self) -> (Self, Self) {
        let a = self.refined(&other.breakpoint_xs());
        let b = other.refined(&self.breakpoint_xs());
        (a, b)
    }

    /// `self + eps * other` over the common refinement, including all limits.
    /// Keeps `f` of `self`.
    pub fn add_scaled(&self, other: &Self, eps: &QE) -> Self {
        let (a, b) = self.common_refinement(other);
        let combine = |x: &QE, y: &QE| x + &(eps * y);
        let breakpoints = a
            .breakpoints
            .iter()
            .zip(&b.breakpoints)
            .map(|(p, q)| BreakpointDatum {
                x: p.x.clone(),
                value: combine(&p.value, &q.value),
                left_limit: combine(&p.left_limit, &q.left_limit),
                right_limit: combine(&p.right_limit, &q.right_limit),
            })
            .collect();
        let slopes = match (&a.slopes, &b.slopes) {
            (Some(s), Some(t)) => Some(s.iter().zip(t).map(|(x, y)| combine(x, y)).collect()),
            _ => None,
        };
        PiecewiseFunction {
            f: self.f.clone(),
            breakpoints,
            slopes,
            derived: SlopeCache::default(),
        }
    }

    /// `factor * self`, keeping `f`.
    pub fn scaled(&self, factor: &QE) -> Self {
        let zero = PiecewiseFunction {
            f: self.f.clone(),
            breakpoints: self
                .breakpoints
                .iter()
                .map(|b| BreakpointDatum::continuous(b.x.clone(), QE::zero()))
                .collect(),
            slopes: self.slopes.as_ref().map(|s| vec![QE::zero(); s.len()]),
            derived: SlopeCache::default(),
        };
        zero.add_scaled(self, factor)
    }

    /// Checks every interval's limits against its declared slope, including
    /// the wrap-around interval ending at 1. Without declared slopes every
    /// table is consistent, since slopes are then derived from the limits.
    pub fn check_table_consistency(&self) -> ConsistencyReport {
        let first_violation = self.slopes.as_ref().and_then(|slopes| {
            (0..self.len()).find_map(|i| {
                let b = &self.breakpoints[i];
                let width = &self.interval_end(i) - &b.x;
                let expected = &b.right_limit + &(&slopes[i] * &width);
                let found = self.left_limit_after(i);
                (expected != *found).then(|| TableViolation {
                    interval: i,
                    declared_slope: slopes[i].clone(),
                    expected_left_limit: expected,
                    found_left_limit: found.clone(),
                })
            })
        });
        ConsistencyReport {
            consistent: first_violation.is_none(),
            first_violation,
        }
    }

    /// Replaces one datum; used for fault injection and editing.
    pub fn with_datum(&self, i: usize, datum: BreakpointDatum) -> Result<Self> {
        let mut bps = self.breakpoints.clone();
        bps[i] = datum;
        Self::new(self.f.clone(), bps, self.slopes.clone())
    }

    /// All field elements occurring in the function, for radicand checks.
    fn elements(&self) -> impl Iterator<Item = &QE> {
        self.breakpoints
            .iter()
            .flat_map(|b| [&b.x, &b.value, &b.left_limit, &b.right_limit])
            .chain(self.f.iter())
            .chain(self.slopes.iter().flatten())
    }

    pub fn radicand(&self) -> Option<u32> {
        self.elements().find_map(|e| e.radicand())
    }

    pub fn to_document(&self) -> FunctionDocument {
        let rows = self
            .breakpoints
            .iter()
            .enumerate()
            .map(|(i, b)| FunctionRow {
                x: b.x.clone(),
                value: b.value.clone(),
                left: Some(b.left_limit.clone()),
                right: Some(b.right_limit.clone()),
                slope: self.slopes.as_ref().map(|s| s[i].clone()),
            })
            .collect();
        FunctionDocument {
            d: self.radicand(),
            f: self.f.clone(),
            rows,
        }
    }

    pub fn from_document(doc: &FunctionDocument) -> Result<Self> {
        let mut rows: Vec<&FunctionRow> = doc.rows.iter().collect();
        // a trailing row at x = 1 must repeat the row at 0
        if rows.len() > 1 && rows.last().unwrap().x == QE::one() {
            let last = rows.pop().unwrap();
            let first = rows[0];
            let same = last.value == first.value
                && last.left.as_ref().unwrap_or(&last.value) == first.left.as_ref().unwrap_or(&first.value)
                && last.right.as_ref().unwrap_or(&last.value) == first.right.as_ref().unwrap_or(&first.value);
            if !same {
                return Err(Error::InvalidFunction("row at x = 1 disagrees with row at x = 0".into()));
            }
        }
        let breakpoints: Vec<BreakpointDatum> = rows
            .iter()
            .map(|r| BreakpointDatum {
                x: r.x.clone(),
                left_limit: r.left.clone().unwrap_or_else(|| r.value.clone()),
                right_limit: r.right.clone().unwrap_or_else(|| r.value.clone()),
                value: r.value.clone(),
            })
            .collect();
        let declared = rows.iter().filter(|r| r.slope.is_some()).count();
        let slopes = match declared {
            0 => None,
            n if n == rows.len() => Some(rows.iter().map(|r| r.slope.clone().unwrap()).collect()),
            _ => return Err(Error::InvalidFunction("slopes must be given for all rows or none".into())),
        };
        let func = Self::new(doc.f.clone(), breakpoints, slopes)?;
        if let Some(r) = func.elements().find_map(|e| e.radicand()) {
            if doc.d != Some(r) {
                return Err(Error::InvalidFunction(format!(
                    "element uses sqrt({}) but document declares d = {:?}",
                    r, doc.d
                )));
            }
        }
        if func.elements().any(|e| e.radicand().is_some_and(|r| Some(r) != doc.d)) {
            return Err(Error::InvalidFunction("mixed radicands".into()));
        }
        Ok(func)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FunctionDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }
}

/// On-disk form of a function: `d`, `f` and rows `{x, value, left, right}`;
/// omitted limits equal the value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<QE>,
    pub rows: Vec<FunctionRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionRow {
    pub x: QE,
    pub value: QE,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<QE>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<QE>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<QE>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::qe;

    fn gmic45() -> PiecewiseFunction {
        PiecewiseFunction::new(
            Some(qe("4/5")),
            vec![
                BreakpointDatum::continuous(qe("0"), qe("0")),
                BreakpointDatum::continuous(qe("4/5"), qe("1")),
            ],
            Some(vec![qe("5/4"), qe("-5")]),
        )
        .unwrap()
    }

    #[test]
    fn evaluation_and_limits() {
        let g = gmic45();
        assert_eq!(g.evaluate(&qe("2/5")), qe("1/2"));
        assert_eq!(g.evaluate(&qe("9/10")), qe("1/2"));
        assert_eq!(g.evaluate(&qe("7/5")), qe("1/2"));
        assert_eq!(g.evaluate(&qe("-1/10")), qe("1/2"));
        assert_eq!(g.limit(&qe("4/5"), Side::Left), qe("1"));
        assert_eq!(g.limit(&qe("1"), Side::Left), qe("0"));
    }

    #[test]
    fn slack() {
        let g = gmic45();
        assert_eq!(g.delta_pi(&qe("9/10"), &qe("3/10")), qe("5/8"));
        assert_eq!(g.delta_pi(&qe("0"), &qe("1/3+sqrt(2)")), qe("0"));
    }

    #[test]
    fn consistency_detects_corruption() {
        let g = gmic45();
        assert!(g.check_table_consistency().consistent);
        let bad = g
            .with_datum(
                1,
                BreakpointDatum {
                    x: qe("4/5"),
                    value: qe("1"),
                    left_limit: qe("99/100"),
                    right_limit: qe("1"),
                },
            )
            .unwrap();
        let report = bad.check_table_consistency();
        assert!(!report.consistent);
        assert_eq!(report.first_violation.unwrap().interval, 0);
    }

    #[test]
    fn refinement_preserves_values() {
        let g = gmic45();
        let r = g.refined(&[qe("1/2"), qe("1/2*sqrt(2)"), qe("3/2")]);
        assert_eq!(r.len(), 4);
        for x in ["1/10", "1/2", "7/10", "9/10", "3/4"] {
            assert_eq!(r.evaluate(&qe(x)), g.evaluate(&qe(x)));
        }
        assert!(r.check_table_consistency().consistent);
    }

    #[test]
    fn add_scaled_cancels() {
        let g = gmic45();
        assert_eq!(g.add_scaled(&g, &QE::zero()).breakpoints(), g.breakpoints());
        let z = g.add_scaled(&g, &qe("-1"));
        assert!(z
            .breakpoints()
            .iter()
            .all(|b| b.value.is_zero() && b.left_limit.is_zero() && b.right_limit.is_zero()));
    }

    #[test]
    fn document_round_trip() {
        let g = gmic45();
        let back = PiecewiseFunction::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn document_defaults_and_errors() {
        let text = r#"{"f": "1/2", "rows": [{"x": "0", "value": "0"}, {"x": "1/2", "value": "1"}, {"x": "1", "value": "0"}]}"#;
        let p = PiecewiseFunction::from_json(text).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.evaluate(&qe("1/4")), qe("1/2"));
        let bad = r#"{"f": "1/2", "rows": [{"x": "0", "value": "0"}, {"x": "1/4*sqrt(2)", "value": "1"}]}"#;
        assert!(PiecewiseFunction::from_json(bad).is_err());
        let unsorted = r#"{"rows": [{"x": "0", "value": "0"}, {"x": "1/2", "value": "1"}, {"x": "1/3", "value": "1"}]}"#;
        assert!(PiecewiseFunction::from_json(unsorted).is_err());
    }
}
