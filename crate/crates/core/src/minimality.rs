//! Minimality test for periodic piecewise linear functions.
//!
//! `π` is minimal iff `π(0) = 0`, `0 ≤ π ≤ 1`, `π` is subadditive and
//! `π(x) + π(f - x) = 1`. With exact arithmetic all of this is decided on the
//! vertices of `ΔP_B`, using one-sided limits for discontinuous functions.

use serde::Serialize;

use crate::complexes::{DeltaComplex, Face1D};
use crate::error::{Error, Result};
use crate::exactfield::QuadraticElement as QE;
use crate::pwfunction::{PiecewiseFunction, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    ValueAtZero,
    ValueAtF,
    Range,
    Subadditivity,
    Symmetry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// The offending point: `(x, side)` for one-dimensional checks.
    pub point: Option<(QE, Side)>,
    /// The offending face and vertex for checks on `ΔP_B`.
    pub face: Option<(Face1D, Face1D, Face1D)>,
    pub vertex: Option<(QE, QE)>,
    /// The offending value: `π(x)`, or `Δπ_F(u, v)`, or `π(x) + π(f - x)`.
    pub value: QE,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalityReport {
    pub is_minimal: bool,
    pub violations: Vec<Violation>,
}

impl MinimalityReport {
    pub fn first(&self, kind: ViolationKind) -> Option<&Violation> {
        self.violations.iter().find(|v| v.kind == kind)
    }
}

fn point_violation(kind: ViolationKind, x: &QE, side: Side, value: QE) -> Violation {
    Violation {
        kind,
        point: Some((x.clone(), side)),
        face: None,
        vertex: None,
        value,
    }
}

/// Runs all checks and collects every violation, in a fixed order.
pub fn minimality_test(pi: &PiecewiseFunction) -> Result<MinimalityReport> {
    let f = pi
        .f()
        .cloned()
        .ok_or_else(|| Error::InvalidFunction("minimality needs the right-hand side f".into()))?;
    let pi = pi.refined(std::slice::from_ref(&f));
    let complex = DeltaComplex::new(&pi);
    Ok(check_with_complex(&pi, &f, &complex))
}

/// The minimality checks for `π` already refined to contain `f`, given its
/// complex.
pub(crate) fn check_with_complex(pi: &PiecewiseFunction, f: &QE, complex: &DeltaComplex) -> MinimalityReport {
    use ViolationKind::*;
    let one = QE::one();
    let mut violations = Vec::new();
    let zero = QE::zero();
    let v0 = pi.evaluate(&zero);
    if !v0.is_zero() {
        violations.push(point_violation(ValueAtZero, &zero, Side::At, v0));
    }
    let vf = pi.evaluate(f);
    if vf != one {
        violations.push(point_violation(ValueAtF, f, Side::At, vf));
    }
    for b in pi.breakpoints() {
        for side in [Side::Left, Side::At, Side::Right] {
            let v = b.get(side);
            if v.sign() < 0 || v > &one {
                violations.push(point_violation(Range, &b.x, side, v.clone()));
            }
        }
    }
    let diagonals = [Face1D::Vertex(f.clone()), Face1D::Vertex(f + &one)];
    for d in &complex.faces {
        let diagonal = diagonals.contains(&d.face.k);
        for (vertex, slack) in d.face.vertices().iter().zip(&d.slacks) {
            let kind = if slack.sign() < 0 {
                Subadditivity
            } else if diagonal && !slack.is_zero() {
                Symmetry
            } else {
                continue;
            };
            violations.push(Violation {
                kind,
                point: None,
                face: Some((d.face.i.clone(), d.face.j.clone(), d.face.k.clone())),
                vertex: Some(vertex.clone()),
                value: slack.clone(),
            });
        }
    }
    // π(x) + π(f - x) = 1 at breakpoints, for values and matching limits
    for b in pi.breakpoints() {
        let y = f - &b.x;
        for (side, mirror) in [(Side::At, Side::At), (Side::Left, Side::Right), (Side::Right, Side::Left)] {
            let total = b.get(side) + &pi.limit(&y, mirror);
            if total != one {
                violations.push(point_violation(Symmetry, &b.x, side, total));
            }
        }
    }
    MinimalityReport {
        is_minimal: violations.is_empty(),
        violations,
    }
}
