//! Covered intervals and connected covered components.
//!
//! On a covered component every effective perturbation is affine with one
//! common slope. Two-dimensional additive faces cover their three projections
//! directly; additive edges transport coverage between their two proper
//! projections by a translation or a reflection. What remains uncovered can
//! sometimes be absorbed by dense translation moves, under the assumption
//! that perturbations are piecewise continuous.

use num_bigint::BigInt;
use serde::Serialize;

use crate::complexes::{DeltaComplex, Face1D, Face2D, FaceData};
use crate::error::{Error, Result};
use crate::exactfield::{q_linearly_independent, QuadraticElement as QE};
use crate::pwfunction::PiecewiseFunction;

type Interval = (QE, QE);
type Triple = (Face1D, Face1D, Face1D);

fn triple(face: &Face2D) -> Triple {
    (face.i.clone(), face.j.clone(), face.k.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// `x ↦ x + amount`
    Translation,
    /// `x ↦ amount − x`
    Reflection,
}

/// A move induced by an additive edge, defined on `domain`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub amount: QE,
    pub domain: Interval,
}

impl MoveRecord {
    fn apply(&self, x: &QE) -> QE {
        match self.kind {
            MoveKind::Translation => x + &self.amount,
            MoveKind::Reflection => &self.amount - x,
        }
    }

    fn apply_inverse(&self, x: &QE) -> QE {
        match self.kind {
            MoveKind::Translation => x - &self.amount,
            MoveKind::Reflection => &self.amount - x,
        }
    }

    fn image_of(&self, (a, b): &Interval, inverse: bool) -> Interval {
        let (p, q) = if inverse {
            (self.apply_inverse(a), self.apply_inverse(b))
        } else {
            (self.apply(a), self.apply(b))
        };
        if p <= q {
            (p, q)
        } else {
            (q, p)
        }
    }

    pub fn image(&self) -> Interval {
        self.image_of(&self.domain, false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Face { face: Triple },
    Edge { face: Triple, relation: MoveRecord },
    DenseMerge { intervals: Vec<Interval> },
}

/// One application that changed the covered set or the component structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveringStep {
    pub step: StepKind,
    pub components_after: usize,
}

/// Covered pieces (disjoint open intervals, each in a component) plus the
/// steps that produced them.
#[derive(Clone, Debug, Default)]
pub struct ComponentSet {
    pieces: Vec<(QE, QE, usize)>,
    parent: Vec<usize>,
    pub steps: Vec<CoveringStep>,
}

impl ComponentSet {
    fn root(&self, mut c: usize) -> usize {
        while self.parent[c] != c {
            c = self.parent[c];
        }
        c
    }

    fn new_component(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    /// Union of two components; true if they were distinct.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.root(a), self.root(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Covers `(lo, hi)` within component `comp`; overlapping pieces fuse.
    fn insert(&mut self, lo: QE, hi: QE, comp: usize) -> bool {
        if lo >= hi {
            return false;
        }
        let start = self.pieces.partition_point(|p| p.1 <= lo);
        let end = start + self.pieces[start..].iter().take_while(|p| p.0 < hi).count();
        let mut changed = false;
        let mut new_lo = lo;
        let mut new_hi = hi;
        if end == start {
            changed = true;
        } else {
            let (first_lo, last_hi) = (self.pieces[start].0.clone(), self.pieces[end - 1].1.clone());
            if end - start > 1 || new_lo < first_lo || new_hi > last_hi {
                changed = true;
            }
            if first_lo < new_lo {
                new_lo = first_lo;
            }
            if last_hi > new_hi {
                new_hi = last_hi;
            }
        }
        let merged: Vec<usize> = self.pieces[start..end].iter().map(|p| p.2).collect();
        for c in merged {
            changed |= self.union(c, comp);
        }
        let root = self.root(comp);
        self.pieces.splice(start..end, std::iter::once((new_lo, new_hi, root)));
        changed
    }

    fn overlapping(&self, (lo, hi): &Interval) -> Vec<(Interval, usize)> {
        let start = self.pieces.partition_point(|p| &p.1 <= lo);
        self.pieces[start..]
            .iter()
            .take_while(|p| &p.0 < hi)
            .map(|p| {
                let a = QE::max_of(&p.0, lo);
                let b = QE::min_of(&p.1, hi);
                ((a, b), p.2)
            })
            .collect()
    }

    /// Component index of the piece containing `(lo, hi)`, if covered.
    pub fn component_of(&self, lo: &QE, hi: &QE) -> Option<usize> {
        let root = self
            .pieces
            .iter()
            .find(|p| &p.0 <= lo && hi <= &p.1)
            .map(|p| self.root(p.2))?;
        self.roots().iter().position(|&r| r == root)
    }

    fn roots(&self) -> Vec<usize> {
        let mut roots: Vec<usize> = Vec::new();
        for p in &self.pieces {
            let r = self.root(p.2);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        roots
    }

    /// Components as lists of covered open intervals, ordered by their
    /// leftmost point.
    pub fn components(&self) -> Vec<Vec<Interval>> {
        let roots = self.roots();
        let mut out = vec![Vec::new(); roots.len()];
        for p in &self.pieces {
            let idx = roots.iter().position(|&r| r == self.root(p.2)).expect("root listed");
            out[idx].push((p.0.clone(), p.1.clone()));
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.roots().len()
    }

    /// Maximal open subintervals of `(0, 1)` not covered.
    pub fn uncovered(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut cursor = QE::zero();
        for p in &self.pieces {
            if cursor < p.0 {
                out.push((cursor.clone(), p.0.clone()));
            }
            if p.1 > cursor {
                cursor = p.1.clone();
            }
        }
        if cursor < QE::one() {
            out.push((cursor, QE::one()));
        }
        out
    }

    fn record(&mut self, step: StepKind) {
        let components_after = self.component_count();
        self.steps.push(CoveringStep { step, components_after });
    }
}

/// A merge of uncovered intervals justified by translation moves whose
/// differences generate a dense subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DenseMergeEvidence {
    pub source: Interval,
    pub target: Interval,
    /// `a_i`, the translation amounts, base `a_0` first.
    pub amounts: Vec<QE>,
    /// `t_i = a_i − a_0` for `i ≥ 1`.
    pub generators: Vec<QE>,
    /// Indices into `generators` of a Q-linearly independent pair.
    pub certificate: (usize, usize),
}

/// `π` refined to contain `f`, with its complex.
pub struct CoveringContext {
    pi: PiecewiseFunction,
    complex: DeltaComplex,
}

impl CoveringContext {
    pub fn new(pi: &PiecewiseFunction) -> Self {
        let pi = match pi.f() {
            Some(f) => pi.refined(std::slice::from_ref(f)),
            None => pi.clone(),
        };
        let complex = DeltaComplex::new(&pi);
        CoveringContext { pi, complex }
    }

    pub fn function(&self) -> &PiecewiseFunction {
        &self.pi
    }

    pub fn complex(&self) -> &DeltaComplex {
        &self.complex
    }

    /// Intervals of `P_B`.
    pub fn intervals(&self) -> Vec<Interval> {
        (0..self.pi.len())
            .map(|i| (self.pi.breakpoints()[i].x.clone(), self.pi.interval_end(i)))
            .collect()
    }

    fn additive(&self, dim: usize) -> impl Iterator<Item = &FaceData> {
        self.complex.additive_faces().filter(move |d| d.dimension() == dim)
    }

    pub fn directly_covered(&self) -> ComponentSet {
        let mut cs = ComponentSet::default();
        for d in self.additive(2) {
            let comp = cs.new_component();
            let mut changed = false;
            for (lo, hi) in d.face.projections() {
                let (lo, hi) = reduce_interval(lo, hi);
                changed |= cs.insert(lo, hi, comp);
            }
            if changed {
                cs.record(StepKind::Face { face: triple(&d.face) });
            }
        }
        cs
    }

    /// The moves of all additive edges, in face order.
    pub fn edge_moves(&self) -> Vec<(Triple, MoveRecord)> {
        self.additive(1).filter_map(|d| Some((triple(&d.face), edge_move(&d.face)?))).collect()
    }

    pub fn extend_by_edges(&self, mut cs: ComponentSet) -> ComponentSet {
        let moves = self.edge_moves();
        // each productive pass covers new ground or joins components; the
        // bound only guards against pathological inputs
        let limit = 4 * (self.pi.len() + moves.len()) + 16;
        for _ in 0..limit {
            let mut progress = false;
            for (face, mv) in &moves {
                if apply_move(&mut cs, mv) {
                    cs.record(StepKind::Edge {
                        face: face.clone(),
                        relation: mv.clone(),
                    });
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        cs
    }

    /// Merges uncovered intervals connected by translations whose pairwise
    /// differences contain two Q-linearly independent elements. Only sound
    /// when perturbations are assumed piecewise continuous.
    pub fn dense_move_merge(&self, mut cs: ComponentSet) -> (ComponentSet, Vec<DenseMergeEvidence>) {
        let moves = self.edge_moves();
        let uncovered = cs.uncovered();
        let mut evidence = Vec::new();
        let mut merged: Vec<Interval> = Vec::new();
        for source in &uncovered {
            if merged.contains(source) {
                continue;
            }
            for target in &uncovered {
                let Some(ev) = dense_evidence(&moves, source, target) else {
                    continue;
                };
                let comp = cs.new_component();
                let mut group = vec![source.clone(), target.clone()];
                if let Some(f) = self.pi.f() {
                    let partner = (f - &source.1, f - &source.0);
                    if uncovered.contains(&partner) {
                        group.push(partner);
                    }
                }
                group.sort();
                group.dedup();
                for (lo, hi) in &group {
                    cs.insert(lo.clone(), hi.clone(), comp);
                }
                cs.record(StepKind::DenseMerge { intervals: group.clone() });
                merged.extend(group);
                evidence.push(ev);
                break;
            }
        }
        (cs, evidence)
    }

    /// The full pipeline; dense merging only when `assume_pwc`.
    pub fn run(&self, assume_pwc: bool) -> CoveringResult {
        let before_merge = self.extend_by_edges(self.directly_covered());
        let (components, evidence) = if assume_pwc && !before_merge.uncovered().is_empty() {
            let (cs, ev) = self.dense_move_merge(before_merge.clone());
            (self.extend_by_edges(cs), ev)
        } else {
            (before_merge.clone(), Vec::new())
        };
        CoveringResult {
            before_merge,
            components,
            evidence,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoveringResult {
    pub before_merge: ComponentSet,
    pub components: ComponentSet,
    pub evidence: Vec<DenseMergeEvidence>,
}

/// Projection of `K ⊆ [1, 2]` shifted back into `[0, 1]`.
fn reduce_interval(lo: QE, hi: QE) -> Interval {
    if lo >= QE::one() {
        let one = QE::one();
        (&lo - &one, &hi - &one)
    } else {
        (lo, hi)
    }
}

/// The translation or reflection induced by an additive edge.
fn edge_move(face: &Face2D) -> Option<MoveRecord> {
    let [p1, p2, p3] = face.projections();
    let shift = if p3.0 >= QE::one() { QE::one() } else { QE::zero() };
    match face.singleton_projection()? {
        // y = v: x ↦ x + v
        1 => Some(MoveRecord {
            kind: MoveKind::Translation,
            amount: &p2.0 - &shift,
            domain: p1,
        }),
        // x = u: y ↦ y + u
        0 => Some(MoveRecord {
            kind: MoveKind::Translation,
            amount: &p1.0 - &shift,
            domain: p2,
        }),
        // x + y = k: x ↦ k − x
        _ => Some(MoveRecord {
            kind: MoveKind::Reflection,
            amount: p3.0,
            domain: p1,
        }),
    }
}

fn apply_move(cs: &mut ComponentSet, mv: &MoveRecord) -> bool {
    let image = mv.image();
    let mut inserts: Vec<(Interval, usize)> = Vec::new();
    for (piece, comp) in cs.overlapping(&mv.domain) {
        inserts.push((mv.image_of(&piece, false), comp));
    }
    for (piece, comp) in cs.overlapping(&image) {
        inserts.push((mv.image_of(&piece, true), comp));
    }
    let mut changed = false;
    for ((lo, hi), comp) in inserts {
        changed |= cs.insert(lo, hi, comp);
    }
    changed
}

fn overlap_length(a: &Interval, b: &Interval) -> QE {
    let lo = QE::max_of(&a.0, &b.0);
    let hi = QE::min_of(&a.1, &b.1);
    if lo < hi {
        &hi - &lo
    } else {
        QE::zero()
    }
}

fn dense_evidence(moves: &[(Triple, MoveRecord)], source: &Interval, target: &Interval) -> Option<DenseMergeEvidence> {
    // (amount, length of the part of the source carried into the target)
    let mut amounts: Vec<(QE, QE)> = Vec::new();
    for (_, mv) in moves {
        if mv.kind != MoveKind::Translation {
            continue;
        }
        for (dom, amount) in [(mv.domain.clone(), mv.amount.clone()), (mv.image(), -mv.amount.clone())] {
            let carried = (&dom.0 + &amount, &dom.1 + &amount);
            if overlap_length(&dom, source).is_zero() || overlap_length(&carried, target).is_zero() {
                continue;
            }
            let lo = QE::max_of(&dom.0, &source.0);
            let hi = QE::min_of(&dom.1, &source.1);
            let reach = overlap_length(&(&lo + &amount, &hi + &amount), target);
            if reach.is_zero() {
                continue;
            }
            match amounts.iter_mut().find(|(a, _)| *a == amount) {
                Some((_, r)) if reach > *r => *r = reach,
                Some(_) => {}
                None => amounts.push((amount, reach)),
            }
        }
    }
    if amounts.len() < 3 {
        return None;
    }
    // base: the move reaching furthest, ties broken by the smaller amount
    amounts.sort_by(|(a, ra), (b, rb)| rb.cmp(ra).then(a.cmp(b)));
    let base = amounts[0].0.clone();
    let mut rest: Vec<QE> = amounts[1..].iter().map(|(a, _)| a.clone()).collect();
    rest.sort();
    let generators: Vec<QE> = rest.iter().map(|a| a - &base).collect();
    let n = generators.len();
    let certificate = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| q_linearly_independent(&generators[i], &generators[j]))?;
    let mut all = vec![base];
    all.extend(rest);
    Some(DenseMergeEvidence {
        source: source.clone(),
        target: target.clone(),
        amounts: all,
        generators,
        certificate,
    })
}

/// The first `count` continued fraction convergents `p_n/q_n` of `num/den`.
pub fn continued_fraction_convergents(num: &QE, den: &QE, count: usize) -> Result<Vec<(BigInt, BigInt)>> {
    let mut x = num.checked_div(den)?;
    if x.is_rational() {
        return Err(Error::RationalRatio);
    }
    let (mut p_prev, mut p) = (BigInt::from(0), BigInt::from(1));
    let (mut q_prev, mut q) = (BigInt::from(1), BigInt::from(0));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let a = x.floor();
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        (p_prev, p) = (p, p_next);
        (q_prev, q) = (q, q_next);
        out.push((p.clone(), q.clone()));
        x = (&x - &QE::from_bigint(a)).invert()?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compendium::gmic;
    use crate::exactfield::qe;

    fn pairs(v: &[(i64, i64)]) -> Vec<(BigInt, BigInt)> {
        v.iter().map(|&(p, q)| (BigInt::from(p), BigInt::from(q))).collect()
    }

    #[test]
    fn sqrt2_convergents() {
        let c = continued_fraction_convergents(&qe("sqrt(2)"), &QE::one(), 5).unwrap();
        assert_eq!(c, pairs(&[(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]));
    }

    #[test]
    fn one_plus_sqrt2_convergents() {
        let c = continued_fraction_convergents(&qe("1+sqrt(2)"), &QE::one(), 4).unwrap();
        assert_eq!(c, pairs(&[(2, 1), (5, 2), (12, 5), (29, 12)]));
    }

    #[test]
    fn rational_ratio_is_rejected() {
        let r = continued_fraction_convergents(&qe("1/10*sqrt(2)"), &qe("3/7*sqrt(2)"), 3);
        assert!(matches!(r, Err(Error::RationalRatio)));
    }

    #[test]
    fn insert_fuses_overlaps_only() {
        let mut cs = ComponentSet::default();
        let a = cs.new_component();
        let b = cs.new_component();
        assert!(cs.insert(qe("0"), qe("1/4"), a));
        assert!(cs.insert(qe("1/4"), qe("1/2"), b));
        assert_eq!(cs.component_count(), 2);
        assert!(!cs.insert(qe("1/8"), qe("1/5"), a));
        assert!(cs.insert(qe("1/5"), qe("3/10"), a));
        assert_eq!(cs.component_count(), 1);
        assert_eq!(cs.uncovered(), vec![(qe("1/2"), qe("1"))]);
    }

    #[test]
    fn gmic_is_covered_in_two_components() {
        let ctx = CoveringContext::new(&gmic(&qe("4/5")).unwrap());
        let result = ctx.run(false);
        assert!(result.components.uncovered().is_empty());
        assert_eq!(
            result.components.components(),
            vec![vec![(qe("0"), qe("4/5"))], vec![(qe("4/5"), qe("1"))]]
        );
    }
}
