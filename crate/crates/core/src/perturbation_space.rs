//! The finite-dimensional test for piecewise linear perturbations.
//!
//! A symbolic perturbation `π̃` has one slope per covered component and two
//! jumps per breakpoint (value minus left limit, right limit minus value);
//! its values are chained from `π̃(0) = 0` along the intervals. Every tight
//! vertex of `ΔP_B` forces `Δπ̃_F(u, v) = 0`; together with `π̃(f) = 0`,
//! symmetry and periodicity this is a homogeneous linear system whose
//! nullspace is the space of such perturbations.

use std::collections::HashSet;

use serde::Serialize;

use crate::complexes::{delta_pi_limit, Face1D};
use crate::covering::{ComponentSet, CoveringContext, CoveringResult};
use crate::error::{Error, Result};
use crate::exactfield::QuadraticElement as QE;
use crate::minimality::check_with_complex;
use crate::pwfunction::{BreakpointDatum, PiecewiseFunction, Side};

type Form = Vec<QE>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Parameter {
    /// Common slope on a covered component.
    Slope { component: usize },
    /// Slope on an uncovered interval, when such intervals are admitted.
    IntervalSlope { interval: (QE, QE) },
    /// `π̃(x) − π̃(x⁻)`
    LeftJump { x: QE },
    /// `π̃(x⁺) − π̃(x)`
    RightJump { x: QE },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Additivity { face: (Face1D, Face1D, Face1D), vertex: (QE, QE) },
    Normalization,
    Symmetry { x: QE, side: Side },
    Periodicity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equation {
    pub coefficients: Vec<QE>,
    pub provenance: Provenance,
}

/// Parameters and the limits of `π̃` at each breakpoint as linear forms.
#[derive(Clone, Debug)]
pub struct SymbolicPerturbation {
    pub parameters: Vec<Parameter>,
    breakpoints: Vec<QE>,
    /// `(left limit, value, right limit)` per breakpoint.
    limits: Vec<[Form; 3]>,
    /// Left limit at 1, which periodicity ties to the left limit at 0.
    left_at_one: Form,
    /// Slope parameter index per interval.
    slope_of: Vec<usize>,
}

impl SymbolicPerturbation {
    pub fn len(&self) -> usize {
        self.parameters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameters.is_empty()
    }

    /// `π̃` at `x` (any real) from `side`, as a linear form.
    pub fn limit_form(&self, x: &QE, side: Side) -> Form {
        let x = x.fractional_part();
        match self.breakpoints.binary_search(&x) {
            Ok(i) => self.limits[i][side_index(side)].clone(),
            Err(i) => {
                let i = i - 1;
                let mut form = self.limits[i][2].clone();
                let slope = self.slope_of[i];
                form[slope] = &form[slope] + &(&x - &self.breakpoints[i]);
                form
            }
        }
    }

    /// Instantiates a parameter vector as a function over the breakpoints.
    pub fn realize(&self, vector: &[QE]) -> Result<PiecewiseFunction> {
        let eval = |form: &Form| dot(form, vector);
        let data = self
            .breakpoints
            .iter()
            .zip(&self.limits)
            .map(|(x, [l, v, r])| BreakpointDatum {
                x: x.clone(),
                value: eval(v),
                left_limit: eval(l),
                right_limit: eval(r),
            })
            .collect();
        PiecewiseFunction::new(None, data, None)
    }

    /// The parameter vector of a function with the same breakpoints, if it is
    /// affine with a common slope on each component.
    pub fn coordinates_of(&self, g: &PiecewiseFunction) -> Option<Vec<QE>> {
        let g = g.refined(&self.breakpoints);
        if g.breakpoint_xs() != self.breakpoints {
            return None;
        }
        let mut out: Vec<Option<QE>> = vec![None; self.len()];
        for (i, slope) in g.slopes().into_iter().enumerate() {
            let idx = self.slope_of[i];
            match &out[idx] {
                Some(s) if *s != slope => return None,
                _ => out[idx] = Some(slope),
            }
        }
        let offset = self.len() - 2 * self.breakpoints.len();
        for (i, b) in g.breakpoints().iter().enumerate() {
            out[offset + 2 * i] = Some(&b.value - &b.left_limit);
            out[offset + 2 * i + 1] = Some(&b.right_limit - &b.value);
        }
        if !g.breakpoints()[0].value.is_zero() {
            return None;
        }
        out.into_iter().map(|c| Some(c.unwrap_or_else(QE::zero))).collect()
    }
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::At => 1,
        Side::Right => 2,
    }
}

fn add(a: &Form, b: &Form) -> Form {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &Form, b: &Form) -> Form {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[QE], b: &[QE]) -> QE {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .fold(QE::zero(), |acc, (x, y)| &acc + &(x * y))
}

/// How intervals outside every covered component are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UncoveredPolicy {
    Reject,
    /// Give each uncovered interval its own slope parameter.
    FreeSlopes,
}

/// Builds the parameters for `π` (refined to contain `f`) and a component set.
pub fn parameterize(ctx: &CoveringContext, cs: &ComponentSet, policy: UncoveredPolicy) -> Result<SymbolicPerturbation> {
    let pi = ctx.function();
    let intervals = ctx.intervals();
    let components = cs.component_count();
    let mut parameters: Vec<Parameter> = (0..components).map(|c| Parameter::Slope { component: c }).collect();
    let mut slope_of = Vec::with_capacity(intervals.len());
    for (lo, hi) in &intervals {
        match cs.component_of(lo, hi) {
            Some(c) => slope_of.push(c),
            None if policy == UncoveredPolicy::FreeSlopes => {
                slope_of.push(parameters.len());
                parameters.push(Parameter::IntervalSlope {
                    interval: (lo.clone(), hi.clone()),
                });
            }
            None => {
                return Err(Error::Unresolved(format!(
                    "interval ({lo}, {hi}) is not inside one covered component; run the dense merge or admit free slopes"
                )))
            }
        }
    }
    let offset = parameters.len();
    let breakpoints = pi.breakpoint_xs();
    for x in &breakpoints {
        parameters.push(Parameter::LeftJump { x: x.clone() });
        parameters.push(Parameter::RightJump { x: x.clone() });
    }
    let n = parameters.len();
    let unit = |idx: usize| {
        let mut v = vec![QE::zero(); n];
        v[idx] = QE::one();
        v
    };
    let zero = vec![QE::zero(); n];
    let mut limits: Vec<[Form; 3]> = Vec::with_capacity(breakpoints.len());
    let mut left = sub(&zero, &unit(offset));
    let mut value = zero.clone();
    for i in 0..breakpoints.len() {
        if i > 0 {
            value = add(&left, &unit(offset + 2 * i));
        }
        let right = add(&value, &unit(offset + 2 * i + 1));
        let width = &pi.interval_end(i) - &breakpoints[i];
        let mut next_left = right.clone();
        next_left[slope_of[i]] = &next_left[slope_of[i]] + &width;
        limits.push([left, value.clone(), right]);
        left = next_left;
    }
    Ok(SymbolicPerturbation {
        parameters,
        breakpoints,
        limits,
        left_at_one: left,
        slope_of,
    })
}

#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub perturbation: SymbolicPerturbation,
    pub equations: Vec<Equation>,
}

impl ConstraintSystem {
    pub fn parameter_count(&self) -> usize {
        self.perturbation.len()
    }

    pub fn is_satisfied_by(&self, vector: &[QE]) -> bool {
        self.equations.iter().all(|e| dot(&e.coefficients, vector).is_zero())
    }
}

/// Scales a nonzero form so its first nonzero coefficient is 1.
fn normalized(form: &Form) -> Option<Form> {
    let lead = form.iter().find(|c| !c.is_zero())?.clone();
    if lead == QE::one() {
        return Some(form.clone());
    }
    let inv = lead.invert().expect("nonzero");
    Some(form.iter().map(|c| if c.is_zero() { QE::zero() } else { c * &inv }).collect())
}

/// All equations forced on `π̃`, deduplicated up to scaling, in a fixed order:
/// additivity by face and vertex, then normalization, symmetry, periodicity.
pub fn build_system(ctx: &CoveringContext, cs: &ComponentSet, policy: UncoveredPolicy) -> Result<ConstraintSystem> {
    let pi = ctx.function();
    let f = pi
        .f()
        .cloned()
        .ok_or_else(|| Error::InvalidFunction("the system needs the right-hand side f".into()))?;
    let sp = parameterize(ctx, cs, policy)?;
    let mut seen: HashSet<Form> = HashSet::new();
    let mut equations = Vec::new();
    let mut push = |form: Form, provenance: Provenance| {
        if let Some(key) = normalized(&form) {
            if seen.insert(key) {
                equations.push(Equation {
                    coefficients: form,
                    provenance,
                });
            }
        }
    };
    for d in &ctx.complex().faces {
        for ((u, v), slack) in d.face.vertices().iter().zip(&d.slacks) {
            if !slack.is_zero() {
                continue;
            }
            let [su, sv, sw] = d.face.approach_sides(u, v);
            let form = sub(&add(&sp.limit_form(u, su), &sp.limit_form(v, sv)), &sp.limit_form(&(u + v), sw));
            push(
                form,
                Provenance::Additivity {
                    face: (d.face.i.clone(), d.face.j.clone(), d.face.k.clone()),
                    vertex: (u.clone(), v.clone()),
                },
            );
        }
    }
    push(sp.limit_form(&f, Side::At), Provenance::Normalization);
    for x in sp.breakpoints.clone() {
        let y = &f - &x;
        for (side, mirror) in [(Side::At, Side::At), (Side::Left, Side::Right), (Side::Right, Side::Left)] {
            push(add(&sp.limit_form(&x, side), &sp.limit_form(&y, mirror)), Provenance::Symmetry { x: x.clone(), side });
        }
    }
    push(sub(&sp.left_at_one, &sp.limits[0][0]), Provenance::Periodicity);
    Ok(ConstraintSystem {
        perturbation: sp,
        equations,
    })
}

#[derive(Clone, Debug)]
pub struct Nullspace {
    pub rank: usize,
    /// Indices of the equations that raised the rank, in order.
    pub independent: Vec<usize>,
    pub basis: Vec<Vec<QE>>,
}

impl Nullspace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Exact incremental Gauss-Jordan elimination, first nonzero pivot.
pub fn nullspace(system: &ConstraintSystem) -> Nullspace {
    let n = system.parameter_count();
    let mut rows: Vec<(usize, Form)> = Vec::new();
    let mut independent = Vec::new();
    for (idx, eq) in system.equations.iter().enumerate() {
        if rows.len() == n {
            break;
        }
        let mut v = eq.coefficients.clone();
        for (p, row) in &rows {
            if v[*p].is_zero() {
                continue;
            }
            let factor = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = &*x - &(&factor * r);
                }
            }
        }
        let Some(v) = normalized(&v) else { continue };
        let pivot = v.iter().position(|c| !c.is_zero()).expect("nonzero row");
        for (_, row) in rows.iter_mut() {
            if row[pivot].is_zero() {
                continue;
            }
            let factor = row[pivot].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                if !r.is_zero() {
                    *x = &*x - &(&factor * r);
                }
            }
        }
        rows.push((pivot, v));
        independent.push(idx);
    }
    let pivots: Vec<usize> = rows.iter().map(|(p, _)| *p).collect();
    let basis = (0..n)
        .filter(|j| !pivots.contains(j))
        .map(|j| {
            let mut x = vec![QE::zero(); n];
            x[j] = QE::one();
            for (p, row) in &rows {
                x[*p] = -row[j].clone();
            }
            x
        })
        .collect();
    Nullspace {
        rank: rows.len(),
        independent,
        basis,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// No nonzero piecewise linear perturbation exists.
    Extreme,
    /// Nonzero perturbations exist; each is realized and verified.
    NotExtreme,
    /// Uncovered intervals remain and no perturbation was found.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct RealizedPerturbation {
    pub function: PiecewiseFunction,
    /// `π ± ε·π̃` is minimal.
    pub epsilon: QE,
}

#[derive(Clone, Debug)]
pub struct ExtremalityReport {
    pub verdict: Verdict,
    pub covering: CoveringResult,
    pub system: ConstraintSystem,
    pub nullspace: Nullspace,
    pub perturbations: Vec<RealizedPerturbation>,
}

impl ExtremalityReport {
    pub fn dimension(&self) -> usize {
        self.nullspace.dimension()
    }

    /// The equations that raised the rank, in order.
    pub fn independent_equations(&self) -> impl Iterator<Item = &Equation> {
        self.nullspace.independent.iter().map(|&i| &self.system.equations[i])
    }
}

/// `ε = m / M̂` with `M̂` the largest `|Δπ̃_F|` over all face vertices.
pub fn realization_epsilon(ctx: &CoveringContext, perturbation: &PiecewiseFunction) -> QE {
    let bound = ctx
        .complex()
        .faces
        .iter()
        .flat_map(|d| {
            d.face
                .vertices()
                .iter()
                .map(|(u, v)| delta_pi_limit(perturbation, &d.face, u, v).expect("vertex lies in its face").abs())
        })
        .max()
        .unwrap_or_else(QE::zero);
    match ctx.complex().min_positive_slack() {
        Some(m) if !bound.is_zero() => m.checked_div(&bound).expect("nonzero bound"),
        _ => QE::one(),
    }
}

/// Covering, optional dense merge, system, nullspace and realization.
pub fn extremality_test_pwc(pi: &PiecewiseFunction, assume_pwc: bool) -> Result<ExtremalityReport> {
    let ctx = CoveringContext::new(pi);
    let f = ctx
        .function()
        .f()
        .cloned()
        .ok_or_else(|| Error::InvalidFunction("extremality needs the right-hand side f".into()))?;
    let report = check_with_complex(ctx.function(), &f, ctx.complex());
    if !report.is_minimal {
        return Err(Error::Precondition("the function is not minimal".into()));
    }
    let covering = ctx.run(assume_pwc);
    let resolved = covering.components.uncovered().is_empty();
    let system = build_system(&ctx, &covering.components, UncoveredPolicy::FreeSlopes)?;
    let nullspace = nullspace(&system);
    let perturbations = nullspace
        .basis
        .iter()
        .map(|v| {
            let function = system.perturbation.realize(v)?;
            let epsilon = realization_epsilon(&ctx, &function);
            Ok(RealizedPerturbation { function, epsilon })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = if !perturbations.is_empty() {
        Verdict::NotExtreme
    } else if resolved {
        Verdict::Extreme
    } else {
        Verdict::Inconclusive
    };
    Ok(ExtremalityReport {
        verdict,
        covering,
        system,
        nullspace,
        perturbations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compendium::gmic;
    use crate::exactfield::qe;

    #[test]
    fn single_equation_nullspace() {
        let ctx = CoveringContext::new(&gmic(&qe("1/2")).unwrap());
        let cs = ctx.run(false).components;
        let mut system = build_system(&ctx, &cs, UncoveredPolicy::Reject).unwrap();
        let n = system.parameter_count();
        let mut row = vec![QE::zero(); n];
        row[0] = QE::one();
        row[1] = -QE::one();
        system.equations = vec![Equation {
            coefficients: row,
            provenance: Provenance::Normalization,
        }];
        let ns = nullspace(&system);
        assert_eq!(ns.dimension(), n - 1);
        assert!(ns.basis.iter().all(|b| b[0] == b[1]));
        assert!(ns.basis.iter().any(|b| b[0] == QE::one()));
    }

    #[test]
    fn gmic_is_extreme() {
        let report = extremality_test_pwc(&gmic(&qe("4/5")).unwrap(), false).unwrap();
        assert_eq!(report.verdict, Verdict::Extreme);
        assert_eq!(report.dimension(), 0);
    }

    #[test]
    fn gmic_coordinates_round_trip() {
        let g = gmic(&qe("4/5")).unwrap();
        let ctx = CoveringContext::new(&g);
        let cs = ctx.run(false).components;
        let system = build_system(&ctx, &cs, UncoveredPolicy::Reject).unwrap();
        let coords = system.perturbation.coordinates_of(&g).unwrap();
        let back = system.perturbation.realize(&coords).unwrap();
        assert_eq!(back.breakpoints(), ctx.function().breakpoints());
    }
}
