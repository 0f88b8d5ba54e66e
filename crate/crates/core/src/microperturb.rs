//! Locally microperiodic ("crazy") perturbations.
//!
//! `π̄ = π̄^pwl + π̄^micro`, where the micro part lives on finitely many open
//! intervals. On each such interval it takes the value `c_i` on the coset
//! `b_i + T` of a dense subgroup `T = <t_1, ..., t_n>_Z` and vanishes
//! elsewhere. Whether such a `π̄` is an effective perturbation of a minimal
//! `π` (so that `π ± επ̄` stays minimal for some `ε > 0`) reduces to finitely
//! many checks on the faces of `ΔP_B`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::complexes::{delta_pi_limit, DeltaComplex, Face1D, Face2D, FaceData};
use crate::error::{Error, Result};
use crate::exactfield::{q_linearly_independent, QuadraticElement as QE};
use crate::lattice::solve_integer_combination;
use crate::pwfunction::{FunctionDocument, PiecewiseFunction};

/// `λ` with `t = Σ λ_i·generators[i]`, or `None` if `t ∉ <generators>_Z`.
pub fn group_member(t: &QE, generators: &[QE]) -> Option<Vec<BigInt>> {
    solve_integer_combination(generators, t)
}

/// A finitely generated additive subgroup of `Q(sqrt(d))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseGroup {
    generators: Vec<QE>,
}

impl DenseGroup {
    pub fn new(generators: Vec<QE>) -> Self {
        DenseGroup { generators }
    }

    pub fn generators(&self) -> &[QE] {
        &self.generators
    }

    /// A pair of `Q`-linearly independent generators, which makes the group
    /// dense in `R`.
    pub fn density_certificate(&self) -> Option<(usize, usize)> {
        let n = self.generators.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| q_linearly_independent(&self.generators[i], &self.generators[j]))
    }

    pub fn is_dense(&self) -> bool {
        self.density_certificate().is_some()
    }

    pub fn contains(&self, t: &QE) -> bool {
        group_member(t, &self.generators).is_some()
    }

    pub fn coefficients(&self, t: &QE) -> Option<Vec<BigInt>> {
        group_member(t, &self.generators)
    }
}

/// The micro part on one open interval: value `c` on `b + T` for each
/// `(b, c)` in `cosets`, zero elsewhere in the interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MicroPiece {
    pub interval: (QE, QE),
    pub cosets: Vec<(QE, QE)>,
}

impl MicroPiece {
    fn contains_open(&self, x: &QE) -> bool {
        &self.interval.0 < x && x < &self.interval.1
    }

    fn covers(&self, lo: &QE, hi: &QE) -> bool {
        &self.interval.0 <= lo && hi <= &self.interval.1
    }

    fn value(&self, x: &QE, group: &DenseGroup) -> QE {
        self.cosets
            .iter()
            .find(|(b, _)| group.contains(&(x - b)))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(QE::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrazyPerturbation {
    pwl: PiecewiseFunction,
    pieces: Vec<MicroPiece>,
    group: DenseGroup,
}

impl CrazyPerturbation {
    pub fn new(pwl: PiecewiseFunction, mut pieces: Vec<MicroPiece>, group: DenseGroup) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidPerturbation(m));
        if !group.is_dense() {
            return bad("the generators do not contain two Q-linearly independent elements".into());
        }
        let mut radicands: Vec<u32> = group.generators.iter().filter_map(QE::radicand).collect();
        radicands.extend(pwl.radicand());
        pieces.sort_by(|a, b| a.interval.0.cmp(&b.interval.0));
        for piece in &pieces {
            let (lo, hi) = &piece.interval;
            if !(lo < hi) || lo.sign() < 0 || hi > &QE::one() {
                return bad(format!("piece interval ({lo}, {hi}) is not a subinterval of [0, 1]"));
            }
            radicands.extend(lo.radicand());
            radicands.extend(hi.radicand());
            for (idx, (b, c)) in piece.cosets.iter().enumerate() {
                radicands.extend(b.radicand());
                radicands.extend(c.radicand());
                if c.is_zero() {
                    return bad(format!("coset {b} + T has value 0"));
                }
                if b < lo || b > hi {
                    return bad(format!("representative {b} lies outside [{lo}, {hi}]"));
                }
                for (b2, _) in &piece.cosets[..idx] {
                    if group.contains(&(b - b2)) {
                        return bad(format!("cosets {b2} + T and {b} + T coincide"));
                    }
                }
            }
            if let Some(x) = pwl.breakpoint_xs().iter().find(|x| piece.contains_open(x)) {
                return bad(format!("breakpoint {x} of the piecewise linear part lies inside ({lo}, {hi})"));
            }
        }
        for w in pieces.windows(2) {
            if w[0].interval.1 > w[1].interval.0 {
                return bad("piece intervals overlap".into());
            }
        }
        radicands.sort_unstable();
        radicands.dedup();
        if radicands.len() > 1 {
            return Err(Error::MismatchedRadicand(radicands[0], radicands[1]));
        }
        Ok(CrazyPerturbation { pwl, pieces, group })
    }

    pub fn pwl(&self) -> &PiecewiseFunction {
        &self.pwl
    }

    pub fn pieces(&self) -> &[MicroPiece] {
        &self.pieces
    }

    pub fn group(&self) -> &DenseGroup {
        &self.group
    }

    /// `π̄^micro(x)` with `x` reduced modulo 1.
    pub fn micro(&self, x: &QE) -> QE {
        let x = x.fractional_part();
        self.pieces
            .iter()
            .find(|p| p.contains_open(&x))
            .map(|p| p.value(&x, &self.group))
            .unwrap_or_else(QE::zero)
    }

    /// `π̄(x) = π̄^pwl(x) + π̄^micro(x)`.
    pub fn evaluate(&self, x: &QE) -> QE {
        &self.pwl.evaluate(x) + &self.micro(x)
    }

    /// Breakpoints of `π̄`: those of the pwl part and the piece endpoints.
    pub fn breakpoints(&self) -> Vec<QE> {
        let mut out = self.pwl.breakpoint_xs();
        for p in &self.pieces {
            out.push(p.interval.0.fractional_part());
            out.push(p.interval.1.fractional_part());
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn negated(&self) -> Self {
        CrazyPerturbation {
            pwl: self.pwl.scaled(&-QE::one()),
            pieces: self
                .pieces
                .iter()
                .map(|p| MicroPiece {
                    interval: p.interval.clone(),
                    cosets: p.cosets.iter().map(|(b, c)| (b.clone(), -c.clone())).collect(),
                })
                .collect(),
            group: self.group.clone(),
        }
    }

    fn piece_on(&self, lo: &QE, hi: &QE) -> Option<&MicroPiece> {
        self.pieces.iter().find(|p| p.covers(lo, hi))
    }

    pub fn to_document(&self) -> PerturbationDocument {
        PerturbationDocument {
            group: self.group.generators.clone(),
            pwl: Some(self.pwl.to_document()),
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceDocument {
                    interval: [p.interval.0.clone(), p.interval.1.clone()],
                    cosets: p.cosets.iter().map(|(b, c)| CosetDocument { b: b.clone(), c: c.clone() }).collect(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &PerturbationDocument) -> Result<Self> {
        let pwl = match &doc.pwl {
            Some(d) => PiecewiseFunction::from_document(d)?,
            None => PiecewiseFunction::continuous(None, vec![(QE::zero(), QE::zero())])?,
        };
        let pieces = doc
            .pieces
            .iter()
            .map(|p| MicroPiece {
                interval: (p.interval[0].clone(), p.interval[1].clone()),
                cosets: p.cosets.iter().map(|c| (c.b.clone(), c.c.clone())).collect(),
            })
            .collect();
        Self::new(pwl, pieces, DenseGroup::new(doc.group.clone()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("documents serialize")
    }
}

/// `π̄(x)` for a crazy perturbation.
pub fn evaluate_crazy(pbar: &CrazyPerturbation, x: &QE) -> QE {
    pbar.evaluate(x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationDocument {
    pub group: Vec<QE>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pwl: Option<FunctionDocument>,
    pub pieces: Vec<PieceDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceDocument {
    pub interval: [QE; 2],
    pub cosets: Vec<CosetDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetDocument {
    pub b: QE,
    pub c: QE,
}

/// The condition that fails on a face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EffectivenessCondition {
    /// `Δπ̄(u, v) ≠ 0` at a tight vertex face.
    VertexEquation { delta: QE },
    /// `Δπ̄^pwl_F(u, v) ≠ 0` at a tight vertex of a face of positive dimension.
    PwlLimitEquation { delta: QE },
    /// A coset on coordinate `coordinate` has no partner on `partner`.
    CosetMatching {
        coordinate: usize,
        partner: usize,
        b: QE,
        c: QE,
    },
    /// The micro part is nonzero on a projection of a tight two-dimensional face.
    MicroOnTwoDimensionalFace { coordinate: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EffectivenessWitness {
    pub face: (Face1D, Face1D, Face1D),
    pub vertex: Option<(QE, QE)>,
    pub condition: EffectivenessCondition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EffectivenessReport {
    pub effective: bool,
    pub witness: Option<EffectivenessWitness>,
}

/// `π` and `π̄^pwl` over their common breakpoints, and the complex of `π`.
struct Prepared<'a> {
    pi: PiecewiseFunction,
    pwl: PiecewiseFunction,
    pbar: &'a CrazyPerturbation,
    complex: DeltaComplex,
}

fn prepare<'a>(pi: &PiecewiseFunction, pbar: &'a CrazyPerturbation) -> Result<Prepared<'a>> {
    let f = pi
        .f()
        .cloned()
        .ok_or_else(|| Error::Precondition("the function has no right-hand side f".into()))?;
    if !pbar.evaluate(&QE::zero()).is_zero() || !pbar.evaluate(&f).is_zero() {
        return Err(Error::Precondition("the perturbation must vanish at 0 and f".into()));
    }
    let mut points = pbar.breakpoints();
    points.push(f.clone());
    let pi_r = pi.refined(&points);
    let mut points = pi_r.breakpoint_xs();
    points.extend(pbar.breakpoints());
    let pwl = pbar.pwl.refined(&points).with_f(Some(f));
    if let Some(x) = pi_r.breakpoint_xs().iter().find(|x| !pbar.micro(x).is_zero()) {
        return Err(Error::Precondition(format!(
            "the micro part does not vanish at the breakpoint {x}"
        )));
    }
    let complex = DeltaComplex::new(&pi_r);
    Ok(Prepared {
        pi: pi_r,
        pwl,
        pbar,
        complex,
    })
}

/// Coset lists on the projections of a face: `Point(x)` for a singleton
/// projection, `Cosets` (shifted into the projection's range) otherwise.
enum Coordinate {
    Point(QE),
    Cosets(Vec<(QE, QE)>),
}

impl Prepared<'_> {
    fn coordinates(&self, face: &Face2D) -> [Coordinate; 3] {
        let proj = face.projections();
        std::array::from_fn(|which| {
            let (lo, hi) = &proj[which];
            if lo == hi {
                return Coordinate::Point(lo.clone());
            }
            let shift = lo.floor();
            let s = QE::from_bigint(shift.clone());
            let cosets = self
                .pbar
                .piece_on(&(lo - &s), &(hi - &s))
                .map(|p| p.cosets.iter().map(|(b, c)| (b + &s, c.clone())).collect())
                .unwrap_or_default();
            Coordinate::Cosets(cosets)
        })
    }

    fn check_face(&self, data: &FaceData) -> Option<EffectivenessWitness> {
        let face = &data.face;
        let triple = || (face.i.clone(), face.j.clone(), face.k.clone());
        let fail = |vertex: Option<(QE, QE)>, condition| {
            Some(EffectivenessWitness {
                face: triple(),
                vertex,
                condition,
            })
        };
        for (u, v) in data.tight_vertices() {
            let delta = if data.dimension() == 0 {
                let d = &(&self.pbar.evaluate(u) + &self.pbar.evaluate(v)) - &self.pbar.evaluate(&(u + v));
                if !d.is_zero() {
                    return fail(Some((u.clone(), v.clone())), EffectivenessCondition::VertexEquation { delta: d });
                }
                continue;
            } else {
                delta_pi_limit(&self.pwl, face, u, v).expect("vertex lies in its face")
            };
            if !delta.is_zero() {
                return fail(Some((u.clone(), v.clone())), EffectivenessCondition::PwlLimitEquation { delta });
            }
        }
        match data.dimension() {
            1 => self.check_edge(face).and_then(|c| fail(None, c)),
            2 => {
                let coords = self.coordinates(face);
                let busy = coords
                    .iter()
                    .position(|c| matches!(c, Coordinate::Cosets(list) if !list.is_empty()))?;
                fail(None, EffectivenessCondition::MicroOnTwoDimensionalFace { coordinate: busy })
            }
            _ => None,
        }
    }

    /// Coset matching along a tight edge with singleton projection `s`.
    fn check_edge(&self, face: &Face2D) -> Option<EffectivenessCondition> {
        let coords = self.coordinates(face);
        let s = coords.iter().position(|c| matches!(c, Coordinate::Point(_)))?;
        let Coordinate::Point(p) = &coords[s] else { unreachable!() };
        let cosets = |which: usize| match &coords[which] {
            Coordinate::Cosets(list) => list.clone(),
            Coordinate::Point(_) => Vec::new(),
        };
        let group = &self.pbar.group;
        // (a, b): coordinates related by b = a + p (translation) or b = p - a
        let (a, b, reflect) = match s {
            0 => (1, 2, false),
            1 => (0, 2, false),
            _ => (0, 1, true),
        };
        let (la, lb) = (cosets(a), cosets(b));
        let partner = |ba: &QE, bb: &QE| {
            let image = if reflect { p - ba } else { ba + p };
            group.contains(&(&image - bb))
        };
        let sign = |c: &QE| if reflect { -c.clone() } else { c.clone() };
        for (ba, ca) in &la {
            if !lb.iter().any(|(bb, cb)| partner(ba, bb) && *cb == sign(ca)) {
                return Some(EffectivenessCondition::CosetMatching {
                    coordinate: a,
                    partner: b,
                    b: ba.clone(),
                    c: ca.clone(),
                });
            }
        }
        for (bb, cb) in &lb {
            if !la.iter().any(|(ba, ca)| partner(ba, bb) && *cb == sign(ca)) {
                return Some(EffectivenessCondition::CosetMatching {
                    coordinate: b,
                    partner: a,
                    b: bb.clone(),
                    c: cb.clone(),
                });
            }
        }
        None
    }

    /// An upper bound on `|Δπ̄^micro|` over the relative interior of a face,
    /// over coset combinations that are consistent with `x + y = z`.
    fn micro_bound(&self, face: &Face2D) -> QE {
        let coords = self.coordinates(face);
        // (representative if known, value)
        let options = |c: &Coordinate| -> Vec<(Option<QE>, QE)> {
            match c {
                Coordinate::Point(x) => vec![(Some(x.clone()), QE::zero())],
                Coordinate::Cosets(list) => list
                    .iter()
                    .map(|(b, c)| (Some(b.clone()), c.clone()))
                    .chain(std::iter::once((None, QE::zero())))
                    .collect(),
            }
        };
        let group = &self.pbar.group;
        let mut best = QE::zero();
        for (rx, cx) in options(&coords[0]) {
            for (ry, cy) in options(&coords[1]) {
                let zs: Vec<QE> = match &coords[2] {
                    Coordinate::Point(_) => vec![QE::zero()],
                    Coordinate::Cosets(list) => match (&rx, &ry) {
                        (Some(a), Some(b)) => {
                            let r = a + b;
                            let hit = list.iter().find(|(bz, _)| group.contains(&(&r - bz)));
                            vec![hit.map(|(_, c)| c.clone()).unwrap_or_else(QE::zero)]
                        }
                        _ => list.iter().map(|(_, c)| c.clone()).chain(std::iter::once(QE::zero())).collect(),
                    },
                };
                for cz in zs {
                    let d = (&(&cx + &cy) - &cz).abs();
                    if d > best {
                        best = d;
                    }
                }
            }
        }
        best
    }

    fn pwl_bound(&self, face: &Face2D) -> QE {
        face.vertices()
            .iter()
            .map(|(u, v)| delta_pi_limit(&self.pwl, face, u, v).expect("vertex lies in its face").abs())
            .max()
            .unwrap_or_else(QE::zero)
    }

    fn effectiveness(&self) -> EffectivenessReport {
        let witness = self
            .complex
            .faces
            .iter()
            .filter(|d| d.has_tight_vertex())
            .find_map(|d| self.check_face(d));
        EffectivenessReport {
            effective: witness.is_none(),
            witness,
        }
    }
}

/// Decides whether `π̄` is an effective perturbation of the minimal `π`.
///
/// Minimality of `π` is assumed, not rechecked.
pub fn check_effective(pi: &PiecewiseFunction, pbar: &CrazyPerturbation) -> Result<EffectivenessReport> {
    Ok(prepare(pi, pbar)?.effectiveness())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Epsilon {
    Finite(QE),
    /// `Δπ̄` vanishes wherever it matters: every `ε` works.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsilonReport {
    /// Smallest positive slack `m` of `Δπ` over the vertices of `ΔP_B`.
    pub min_slack: Option<QE>,
    /// `M̂`, a bound on `|Δπ̄_F|` over all faces.
    pub bound: QE,
    pub epsilon: Epsilon,
}

/// `ε = m / M̂` if `π̄` is effective, `None` otherwise.
pub fn find_epsilon(pi: &PiecewiseFunction, pbar: &CrazyPerturbation) -> Result<Option<EpsilonReport>> {
    let prep = prepare(pi, pbar)?;
    if !prep.effectiveness().effective {
        return Ok(None);
    }
    let bound = prep
        .complex
        .faces
        .iter()
        .map(|d| &prep.pwl_bound(&d.face) + &prep.micro_bound(&d.face))
        .max()
        .unwrap_or_else(QE::zero);
    let min_slack = prep.complex.min_positive_slack();
    let epsilon = match &min_slack {
        Some(m) if !bound.is_zero() => Epsilon::Finite(m.checked_div(&bound)?),
        _ => Epsilon::Unbounded,
    };
    Ok(Some(EpsilonReport {
        min_slack,
        bound,
        epsilon,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerturbedCheck {
    pub sign: i8,
    pub minimal: bool,
    pub failure: Option<String>,
}

/// Re-verifies minimality of `π + ε·π̄` and `π − ε·π̄` face by face.
///
/// Faces without a tight vertex must absorb `ε·(|Δπ̄^pwl_F| + micro bound)` at
/// every vertex. Faces with a tight vertex must satisfy the effectiveness
/// conditions, and `Δπ_F ± ε·Δπ̄^pwl_F ≥ 0` at every vertex, with equality on
/// the symmetry diagonals `x + y ∈ {f, 1 + f}`.
pub fn verify_perturbed_minimality(
    pi: &PiecewiseFunction,
    pbar: &CrazyPerturbation,
    eps: &QE,
) -> Result<[PerturbedCheck; 2]> {
    let prep = prepare(pi, pbar)?;
    let f = prep.pi.f().cloned().expect("checked in prepare");
    let diagonals = [Face1D::Vertex(f.clone()), Face1D::Vertex(&f + &QE::one())];
    let run = |sign: i8| -> PerturbedCheck {
        let signed = if sign > 0 { eps.clone() } else { -eps.clone() };
        let at = |x: &QE| &prep.pi.evaluate(x) + &(&signed * &pbar.evaluate(x));
        let check = || -> Option<String> {
            if !at(&QE::zero()).is_zero() {
                return Some("value at 0 is not 0".into());
            }
            if at(&f) != QE::one() {
                return Some("value at f is not 1".into());
            }
            for d in &prep.complex.faces {
                let face = &d.face;
                let name = || format!("{:?}", face.triple());
                if !d.has_tight_vertex() {
                    let micro = prep.micro_bound(face);
                    for ((u, v), s) in face.vertices().iter().zip(&d.slacks) {
                        let pwl = delta_pi_limit(&prep.pwl, face, u, v).expect("vertex lies in its face");
                        let worst = s - &(eps * &(&pwl.abs() + &micro));
                        if worst.sign() < 0 {
                            return Some(format!("slack of {} at ({u}, {v}) is exhausted", name()));
                        }
                    }
                    continue;
                }
                if let Some(w) = prep.check_face(d) {
                    return Some(format!("{} violates {:?}", name(), w.condition));
                }
                let diagonal = diagonals.contains(&face.k);
                for ((u, v), s) in face.vertices().iter().zip(&d.slacks) {
                    let pwl = delta_pi_limit(&prep.pwl, face, u, v).expect("vertex lies in its face");
                    let value = s + &(&signed * &pwl);
                    if value.sign() < 0 || (diagonal && !value.is_zero()) {
                        return Some(format!("{} at ({u}, {v}) has slack {value}", name()));
                    }
                }
            }
            None
        };
        let failure = check();
        PerturbedCheck {
            sign,
            minimal: failure.is_none(),
            failure,
        }
    };
    Ok([run(1), run(-1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compendium::{kzh_crazy_perturbation, KZH_F, KZH_L, KZH_T1, KZH_T2, KZH_U};
    use crate::exactfield::qe;

    #[test]
    fn density_certificate() {
        assert_eq!(DenseGroup::new(vec![qe(KZH_T1), qe(KZH_T2)]).density_certificate(), Some((0, 1)));
        assert!(!DenseGroup::new(vec![qe("1/3"), qe("1/7")]).is_dense());
    }

    #[test]
    fn evaluation_on_cosets() {
        let p = kzh_crazy_perturbation();
        let l = qe(KZH_L);
        let u = qe(KZH_U);
        let t1 = qe(KZH_T1);
        assert_eq!(p.evaluate(&(&l + &t1)), QE::one());
        assert_eq!(p.evaluate(&(&u - &t1)), -QE::one());
        assert_eq!(p.evaluate(&((&l + &u).scale(&crate::exactfield::rational(1, 2)))), QE::zero());
        assert_eq!(p.evaluate(&l), QE::zero());
        let f = qe(KZH_F);
        assert_eq!(p.evaluate(&(&(&f - &u) + &qe(KZH_T2))), QE::one());
    }

    #[test]
    fn rejects_coinciding_cosets() {
        let group = DenseGroup::new(vec![qe(KZH_T1), qe(KZH_T2)]);
        let pwl = PiecewiseFunction::continuous(None, vec![(QE::zero(), QE::zero())]).unwrap();
        let b = qe("3/10");
        let piece = MicroPiece {
            interval: (qe("1/4"), qe("1/2")),
            cosets: vec![(b.clone(), QE::one()), (&b + &qe(KZH_T2), -QE::one())],
        };
        assert!(CrazyPerturbation::new(pwl, vec![piece], group).is_err());
    }

    #[test]
    fn document_round_trip() {
        let p = kzh_crazy_perturbation();
        assert_eq!(CrazyPerturbation::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn negation_flips_values() {
        let p = kzh_crazy_perturbation();
        let x = &qe(KZH_L) + &qe(KZH_T1);
        assert_eq!(p.negated().evaluate(&x), -p.evaluate(&x));
    }
}
