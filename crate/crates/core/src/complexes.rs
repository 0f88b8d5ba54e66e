//! The two-dimensional polyhedral complex `ΔP_B` of a piecewise linear
//! function.
//!
//! Faces are `F(I, J, K) = {(x, y) : x ∈ I, y ∈ J, x + y ∈ K}` where `I` and
//! `J` are faces of the one-dimensional complex on `[0, 1]` (breakpoints and
//! the closed intervals between consecutive breakpoints) and `K` is a face of
//! the same complex extended periodically to `[0, 2]`.
//!
//! A polytope can arise from several triples; every face is stored once, under
//! its canonical triple: the smallest faces containing its three projections.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::QuadraticElement as QE;
use crate::pwfunction::{PiecewiseFunction, Side};

/// A face of the one-dimensional complex: a breakpoint or a closed interval
/// between consecutive breakpoints (possibly shifted by 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Face1D {
    Vertex(QE),
    Interval(QE, QE),
}

impl std::fmt::Display for Face1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Face1D::Vertex(x) => write!(f, "{{{x}}}"),
            Face1D::Interval(a, b) => write!(f, "[{a}, {b}]"),
        }
    }
}

impl Face1D {
    pub fn lo(&self) -> &QE {
        match self {
            Face1D::Vertex(x) | Face1D::Interval(x, _) => x,
        }
    }

    pub fn hi(&self) -> &QE {
        match self {
            Face1D::Vertex(x) | Face1D::Interval(_, x) => x,
        }
    }

    pub fn is_vertex(&self) -> bool {
        matches!(self, Face1D::Vertex(_))
    }

    pub fn contains(&self, x: &QE) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    pub fn contains_face(&self, other: &Face1D) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }
}

/// Sorted breakpoints of `[0, 1]` (including 1) and of `[0, 2]`.
#[derive(Clone, Debug)]
pub struct BreakpointComplex {
    pub unit: Vec<QE>,
    pub double: Vec<QE>,
}

impl BreakpointComplex {
    pub fn new(pi: &PiecewiseFunction) -> Self {
        let mut unit = pi.breakpoint_xs();
        unit.push(QE::one());
        let mut double = unit.clone();
        double.extend(unit[1..].iter().map(|x| x + &QE::one()));
        BreakpointComplex { unit, double }
    }

    fn faces_of(points: &[QE]) -> Vec<Face1D> {
        let mut faces = Vec::with_capacity(2 * points.len());
        for (i, p) in points.iter().enumerate() {
            faces.push(Face1D::Vertex(p.clone()));
            if let Some(q) = points.get(i + 1) {
                faces.push(Face1D::Interval(p.clone(), q.clone()));
            }
        }
        faces
    }

    pub fn unit_faces(&self) -> Vec<Face1D> {
        Self::faces_of(&self.unit)
    }

    pub fn double_faces(&self) -> Vec<Face1D> {
        Self::faces_of(&self.double)
    }

    /// Smallest face of the complex over `points` containing `[lo, hi]`, which
    /// must lie inside the covered range and contain no breakpoint in its
    /// interior.
    pub fn minimal_face(points: &[QE], lo: &QE, hi: &QE) -> Face1D {
        match points.binary_search(lo) {
            Ok(k) if lo == hi => Face1D::Vertex(points[k].clone()),
            Ok(k) => Face1D::Interval(points[k].clone(), points[k + 1].clone()),
            Err(k) => Face1D::Interval(points[k - 1].clone(), points[k].clone()),
        }
    }

    /// Faces of the complex over `points` containing `face` (itself included).
    fn containing(points: &[QE], face: &Face1D) -> Vec<Face1D> {
        match face {
            Face1D::Interval(..) => vec![face.clone()],
            Face1D::Vertex(x) => {
                let k = points.binary_search(x).expect("vertex is a breakpoint");
                let mut out = vec![face.clone()];
                if k > 0 {
                    out.push(Face1D::Interval(points[k - 1].clone(), x.clone()));
                }
                if k + 1 < points.len() {
                    out.push(Face1D::Interval(x.clone(), points[k + 1].clone()));
                }
                out
            }
        }
    }
}

/// Which one-sided value of `π` is seen at coordinate `w` when approaching
/// from inside the projection `[lo, hi]`.
fn approach_side(lo: &QE, hi: &QE, w: &QE) -> Side {
    if lo == hi {
        Side::At
    } else if w == lo {
        Side::Right
    } else if w == hi {
        Side::Left
    } else {
        Side::At
    }
}

/// A face `F(I, J, K)` of `ΔP_B` with its vertices.
#[derive(Clone, Debug, Serialize)]
pub struct Face2D {
    pub i: Face1D,
    pub j: Face1D,
    pub k: Face1D,
    vertices: Vec<(QE, QE)>,
}

impl PartialEq for Face2D {
    fn eq(&self, other: &Self) -> bool {
        (&self.i, &self.j, &self.k) == (&other.i, &other.j, &other.k)
    }
}

impl Eq for Face2D {}

impl Face2D {
    /// The polytope for a triple, or `None` if it is empty.
    pub fn new(i: Face1D, j: Face1D, k: Face1D) -> Option<Self> {
        let vertices = polytope_vertices(&i, &j, &k);
        (!vertices.is_empty()).then_some(Face2D { i, j, k, vertices })
    }

    pub fn triple(&self) -> (&Face1D, &Face1D, &Face1D) {
        (&self.i, &self.j, &self.k)
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[(QE, QE)] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        match self.vertices.len() {
            1 => 0,
            2 => 1,
            _ => 2,
        }
    }

    /// Projection `p_which(F)` as a closed interval, `which ∈ {0, 1, 2}` for
    /// `x`, `y` and `x + y`.
    pub fn projection(&self, which: usize) -> (QE, QE) {
        let coord = |(u, v): &(QE, QE)| match which {
            0 => u.clone(),
            1 => v.clone(),
            _ => u + v,
        };
        let mut lo = coord(&self.vertices[0]);
        let mut hi = lo.clone();
        for p in &self.vertices[1..] {
            let c = coord(p);
            if c < lo {
                lo = c;
            } else if c > hi {
                hi = c;
            }
        }
        (lo, hi)
    }

    pub fn projections(&self) -> [(QE, QE); 3] {
        [self.projection(0), self.projection(1), self.projection(2)]
    }

    pub fn contains_point(&self, u: &QE, v: &QE) -> bool {
        self.i.contains(u) && self.j.contains(v) && self.k.contains(&(u + v))
    }

    /// Whether `self ⊆ other` as polytopes, for canonical triples.
    pub fn is_subface_of(&self, other: &Face2D) -> bool {
        other.i.contains_face(&self.i) && other.j.contains_face(&self.j) && other.k.contains_face(&self.k)
    }

    /// The sides from which `π` is approached at `(u, v)` along `relint(F)`,
    /// for the coordinates `x`, `y` and `x + y`.
    pub fn approach_sides(&self, u: &QE, v: &QE) -> [Side; 3] {
        let w = u + v;
        let [p1, p2, p3] = self.projections();
        [
            approach_side(&p1.0, &p1.1, u),
            approach_side(&p2.0, &p2.1, v),
            approach_side(&p3.0, &p3.1, &w),
        ]
    }

    /// The singleton projection of an edge (0, 1 or 2), if `F` is an edge.
    pub fn singleton_projection(&self) -> Option<usize> {
        if self.dimension() != 1 {
            return None;
        }
        [&self.i, &self.j, &self.k].iter().position(|f| f.is_vertex())
    }
}

fn polytope_vertices(i: &Face1D, j: &Face1D, k: &Face1D) -> Vec<(QE, QE)> {
    let xs = bounds(i);
    let ys = bounds(j);
    let zs = bounds(k);
    let mut out: Vec<(QE, QE)> = Vec::new();
    for x in &xs {
        for y in &ys {
            if k.contains(&(x + y)) {
                out.push((x.clone(), y.clone()));
            }
        }
        for z in &zs {
            let y = z - x;
            if j.contains(&y) {
                out.push((x.clone(), y));
            }
        }
    }
    for y in &ys {
        for z in &zs {
            let x = z - y;
            if i.contains(&x) {
                out.push((x, y.clone()));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn bounds(f: &Face1D) -> Vec<QE> {
    match f {
        Face1D::Vertex(x) => vec![x.clone()],
        Face1D::Interval(a, b) => vec![a.clone(), b.clone()],
    }
}

/// All nonempty faces of `ΔP_B`, each once under its canonical triple, in
/// canonical order.
pub fn enumerate_faces(pi: &PiecewiseFunction) -> Vec<Face2D> {
    let bc = BreakpointComplex::new(pi);
    let unit = bc.unit_faces();
    let double = bc.double_faces();
    let pairs: Vec<(&Face1D, &Face1D)> = unit.iter().flat_map(|i| unit.iter().map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .flat_map_iter(|(i, j)| {
            let lo = i.lo() + j.lo();
            let hi = i.hi() + j.hi();
            // K faces meeting [lo, hi]
            let start = double.partition_point(|k| k.hi() < &lo);
            double[start..]
                .iter()
                .take_while(|k| k.lo() <= &hi)
                .filter_map(|k| {
                    let face = Face2D::new((*i).clone(), (*j).clone(), k.clone())?;
                    is_canonical(&bc, &face).then_some(face)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn is_canonical(bc: &BreakpointComplex, face: &Face2D) -> bool {
    let [p1, p2, p3] = face.projections();
    BreakpointComplex::minimal_face(&bc.unit, &p1.0, &p1.1) == face.i
        && BreakpointComplex::minimal_face(&bc.unit, &p2.0, &p2.1) == face.j
        && BreakpointComplex::minimal_face(&bc.double, &p3.0, &p3.1) == face.k
}

/// `Δπ_F(u, v)`: the limit of `Δπ` at `(u, v)` from the relative interior of `F`.
pub fn delta_pi_limit(pi: &PiecewiseFunction, face: &Face2D, u: &QE, v: &QE) -> Result<QE> {
    if !face.contains_point(u, v) {
        return Err(Error::NotInFace {
            u: u.to_string(),
            v: v.to_string(),
        });
    }
    Ok(delta_limit_unchecked(pi, face, u, v))
}

fn delta_limit_unchecked(pi: &PiecewiseFunction, face: &Face2D, u: &QE, v: &QE) -> QE {
    let [s1, s2, s3] = face.approach_sides(u, v);
    let w = u + v;
    &(&pi.limit(u, s1) + &pi.limit(v, s2)) - &pi.limit(&w, s3)
}

/// Whether `F` lies in a face `F' ⊇ F` with `Δπ_{F'}` vanishing on `verts(F)`.
pub fn is_additive_face(pi: &PiecewiseFunction, face: &Face2D) -> bool {
    let bc = BreakpointComplex::new(pi);
    containing_faces(&bc, face)
        .iter()
        .any(|outer| face.vertices().iter().all(|(u, v)| delta_limit_unchecked(pi, outer, u, v).is_zero()))
}

fn containing_faces(bc: &BreakpointComplex, face: &Face2D) -> Vec<Face2D> {
    let is = BreakpointComplex::containing(&bc.unit, &face.i);
    let js = BreakpointComplex::containing(&bc.unit, &face.j);
    let ks = BreakpointComplex::containing(&bc.double, &face.k);
    let mut out = Vec::new();
    for i in &is {
        for j in &js {
            for k in &ks {
                if let Some(f) = Face2D::new(i.clone(), j.clone(), k.clone()) {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// A face together with `Δπ_F` at each of its vertices.
#[derive(Clone, Debug, Serialize)]
pub struct FaceData {
    pub face: Face2D,
    pub slacks: Vec<QE>,
    pub additive: bool,
}

impl FaceData {
    pub fn dimension(&self) -> usize {
        self.face.dimension()
    }

    pub fn has_tight_vertex(&self) -> bool {
        self.slacks.iter().any(|s| s.is_zero())
    }

    /// `(vertex, slack)` pairs where `Δπ_F` vanishes.
    pub fn tight_vertices(&self) -> impl Iterator<Item = &(QE, QE)> {
        self.face
            .vertices()
            .iter()
            .zip(&self.slacks)
            .filter(|(_, s)| s.is_zero())
            .map(|(p, _)| p)
    }
}

/// The complex of a function with all limit slacks evaluated.
#[derive(Clone, Debug)]
pub struct DeltaComplex {
    pub faces: Vec<FaceData>,
}

impl DeltaComplex {
    pub fn new(pi: &PiecewiseFunction) -> Self {
        Self::from_faces(pi, enumerate_faces(pi))
    }

    pub fn from_faces(pi: &PiecewiseFunction, faces: Vec<Face2D>) -> Self {
        let mut data: Vec<FaceData> = faces
            .into_par_iter()
            .map(|face| {
                let slacks = face
                    .vertices()
                    .iter()
                    .map(|(u, v)| delta_limit_unchecked(pi, &face, u, v))
                    .collect();
                FaceData {
                    face,
                    slacks,
                    additive: false,
                }
            })
            .collect();
        let bc = BreakpointComplex::new(pi);
        let additive: Vec<bool> = data
            .par_iter()
            .map(|d| {
                if d.slacks.iter().all(|s| s.is_zero()) {
                    return true;
                }
                if !d.has_tight_vertex() {
                    return false;
                }
                containing_faces(&bc, &d.face).iter().any(|outer| {
                    d.face
                        .vertices()
                        .iter()
                        .all(|(u, v)| delta_limit_unchecked(pi, outer, u, v).is_zero())
                })
            })
            .collect();
        for (d, a) in data.iter_mut().zip(additive) {
            d.additive = a;
        }
        DeltaComplex { faces: data }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn additive_faces(&self) -> impl Iterator<Item = &FaceData> {
        self.faces.iter().filter(|d| d.additive)
    }

    /// Smallest positive slack over all faces and vertices.
    pub fn min_positive_slack(&self) -> Option<QE> {
        self.faces
            .iter()
            .flat_map(|d| d.slacks.iter())
            .filter(|s| s.sign() > 0)
            .min()
            .cloned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compendium::gmic;
    use crate::exactfield::qe;

    fn iv(a: &str, b: &str) -> Face1D {
        Face1D::Interval(qe(a), qe(b))
    }

    fn pt(a: &str) -> Face1D {
        Face1D::Vertex(qe(a))
    }

    #[test]
    fn diagonal_segment_vertices() {
        let f = Face2D::new(iv("0", "1"), iv("0", "1"), pt("1")).unwrap();
        assert_eq!(f.vertices(), &[(qe("0"), qe("1")), (qe("1"), qe("0"))]);
        assert_eq!(f.dimension(), 1);
    }

    #[test]
    fn box_vertices() {
        let f = Face2D::new(iv("0", "1/4"), iv("1/2", "3/4"), iv("1/4", "2")).unwrap();
        assert_eq!(f.vertices().len(), 4);
        assert_eq!(f.dimension(), 2);
    }

    #[test]
    fn triangle_vertices() {
        let f = Face2D::new(iv("0", "1"), iv("0", "1"), iv("1", "2")).unwrap();
        assert_eq!(
            f.vertices(),
            &[(qe("0"), qe("1")), (qe("1"), qe("0")), (qe("1"), qe("1"))]
        );
        assert!(Face2D::new(iv("0", "1/4"), iv("0", "1/4"), pt("1")).is_none());
    }

    #[test]
    fn gmic_vertex_face() {
        let g = gmic(&qe("4/5")).unwrap();
        let faces = enumerate_faces(&g);
        let f = faces
            .iter()
            .find(|f| f.i == pt("4/5") && f.j == pt("4/5"))
            .expect("vertex face present");
        assert_eq!(f.k, iv("1", "9/5"));
        assert_eq!(f.dimension(), 0);
        assert_eq!(f.vertices(), &[(qe("4/5"), qe("4/5"))]);
    }

    #[test]
    fn lower_triangle_is_additive_for_gmic() {
        let g = gmic(&qe("4/5")).unwrap();
        let f = Face2D::new(iv("0", "4/5"), iv("0", "4/5"), iv("0", "4/5")).unwrap();
        assert_eq!(f.dimension(), 2);
        for (u, v) in f.vertices() {
            assert!(delta_pi_limit(&g, &f, u, v).unwrap().is_zero());
        }
        assert!(is_additive_face(&g, &f));
        let origin = Face2D::new(pt("0"), pt("0"), pt("0")).unwrap();
        assert!(is_additive_face(&g, &origin));
    }

    #[test]
    fn point_outside_face() {
        let g = gmic(&qe("4/5")).unwrap();
        let f = Face2D::new(iv("0", "4/5"), iv("0", "4/5"), iv("0", "4/5")).unwrap();
        assert!(delta_pi_limit(&g, &f, &qe("4/5"), &qe("4/5")).is_err());
    }

    #[test]
    fn continuous_limits_equal_values() {
        let g = gmic(&qe("4/5")).unwrap();
        for face in enumerate_faces(&g) {
            for (u, v) in face.vertices() {
                assert_eq!(delta_pi_limit(&g, &face, u, v).unwrap(), g.delta_pi(u, v));
            }
        }
    }

    #[test]
    fn linear_function_complex_matches_brute_force() {
        // one breakpoint: faces over {0}, [0,1], {1} and K over [0,2]
        let p = PiecewiseFunction::continuous(None, vec![(qe("0"), qe("0"))]).unwrap();
        let faces = enumerate_faces(&p);
        // vertices (0,0),(0,1),(1,0),(1,1); edges: 4 box sides + diagonal;
        // two triangles
        let count = |d: usize| faces.iter().filter(|f| f.dimension() == d).count();
        assert_eq!((count(0), count(1), count(2)), (4, 5, 2));
    }
}
