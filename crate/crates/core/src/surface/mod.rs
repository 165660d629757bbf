//! Translation surfaces presented as polygons with edge gluings.
//!
//! Edge `e` of polygon `p` runs from vertex `e` to vertex `e + 1`. Glued
//! edges carry opposite holonomy. Coordinates live in one quadratic field.

mod cylinders;
mod mesh;
mod segments;
mod svg;
mod symmetry;
mod unfold;

pub use cylinders::{cylinder_decomposition, cylinders_similar, Cylinder};
pub use mesh::Mesh;
pub use segments::{
    segments_between, segments_between_with, Crossing, SearchOptions, Segment, DEFAULT_NODE_CAP,
};
pub use svg::render_svg;
pub use symmetry::{central_symmetry_weierstrass, Involution};
pub use unfold::{build_unfolding, unfolding_copies, unfolding_vertex};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{FieldError, PlanarVec, QuadElem};
use crate::polygon::{check_simple, on_segment, orient, signed_area2, PolygonError};
use crate::unfolding::Stratum;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("invalid gluing: {0}")]
    InvalidGluing(String),
    #[error("polygon {0}: {1}")]
    BadPolygon(usize, PolygonError),
    #[error("point is not on the surface: {0}")]
    InvalidPoint(String),
    #[error("direction is not completely periodic: {0}")]
    NotPeriodic(String),
    #[error("no translation-surface involution with derivative -1 was found")]
    NotCentrallySymmetric,
    #[error("segment endpoint is a cone point")]
    ConePointStart,
    #[error("search exceeded {0} nodes")]
    BudgetExceeded(u64),
    #[error("{0}")]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl SurfaceError {
    pub fn code(&self) -> &'static str {
        match self {
            SurfaceError::InvalidGluing(_) => "InvalidGluing",
            SurfaceError::BadPolygon(..) => "InvalidPolygon",
            SurfaceError::InvalidPoint(_) => "InvalidPoint",
            SurfaceError::NotPeriodic(_) => "NotPeriodic",
            SurfaceError::NotCentrallySymmetric => "NotCentrallySymmetric",
            SurfaceError::ConePointStart => "ConePointStart",
            SurfaceError::BudgetExceeded(_) => "BudgetExceeded",
            SurfaceError::Polygon(e) => e.code(),
            SurfaceError::Field(e) => e.code(),
        }
    }
}

/// A point given by a polygon index and coordinates in that polygon.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub polygon: usize,
    pub point: PlanarVec,
}

impl SurfacePoint {
    pub fn new(polygon: usize, point: PlanarVec) -> Self {
        SurfacePoint { polygon, point }
    }

    fn key_cmp(&self, o: &SurfacePoint) -> Ordering {
        self.polygon
            .cmp(&o.polygon)
            .then_with(|| self.point.lex_cmp(&o.point))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub label: String,
    #[serde(flatten)]
    pub at: SurfacePoint,
}

/// Where a point sits relative to the polygon decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Interior,
    Edge(usize),
    Vertex(usize),
}

pub type EdgeRef = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceJson", into = "SurfaceJson")]
pub struct TranslationSurface {
    pub polygons: Vec<Vec<PlanarVec>>,
    pub gluings: Vec<(EdgeRef, EdgeRef)>,
    pub marked_points: Vec<MarkedPoint>,
    partner: Vec<Vec<EdgeRef>>,
}

#[derive(Serialize, Deserialize)]
struct SurfaceJson {
    disc: u64,
    polygons: Vec<Vec<PlanarVec>>,
    gluings: Vec<[[usize; 2]; 2]>,
    #[serde(default)]
    marked_points: Vec<MarkedPoint>,
}

impl TryFrom<SurfaceJson> for TranslationSurface {
    type Error = SurfaceError;
    fn try_from(j: SurfaceJson) -> Result<Self, SurfaceError> {
        let gl = j
            .gluings
            .iter()
            .map(|[a, b]| ((a[0], a[1]), (b[0], b[1])))
            .collect();
        let mut s = TranslationSurface::new(j.polygons, gl)?;
        if s.disc()? != j.disc {
            return Err(SurfaceError::InvalidGluing(format!(
                "declared field D = {} but coordinates use D = {}",
                j.disc,
                s.disc()?
            )));
        }
        for m in j.marked_points {
            s.locate(&m.at)?;
            s.marked_points.push(m);
        }
        Ok(s)
    }
}

impl From<TranslationSurface> for SurfaceJson {
    fn from(s: TranslationSurface) -> Self {
        SurfaceJson {
            disc: s.disc().unwrap_or(0),
            gluings: s.gluings.iter().map(|&(a, b)| [[a.0, a.1], [b.0, b.1]]).collect(),
            polygons: s.polygons,
            marked_points: s.marked_points,
        }
    }
}

/// One cone point: the polygon corners meeting there and its angle in units of `2 pi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeClass {
    pub corners: Vec<EdgeRef>,
    pub angle_2pi: u64,
    pub representative: SurfacePoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeAnalysis {
    pub classes: Vec<ConeClass>,
    pub genus: u64,
    pub stratum: Stratum,
}

impl TranslationSurface {
    /// Validates the polygons and the gluing and builds the edge pairing.
    pub fn new(
        polygons: Vec<Vec<PlanarVec>>,
        gluings: Vec<(EdgeRef, EdgeRef)>,
    ) -> Result<Self, SurfaceError> {
        if polygons.is_empty() {
            return Err(SurfaceError::InvalidGluing("no polygons".into()));
        }
        let mut disc = 0;
        for (i, p) in polygons.iter().enumerate() {
            if p.len() < 3 {
                return Err(SurfaceError::BadPolygon(
                    i,
                    PolygonError::OpenChain("fewer than three vertices".into()),
                ));
            }
            for v in p {
                let d = v.disc()?;
                if d != 0 {
                    if disc != 0 && disc != d {
                        return Err(FieldError::MismatchedField(disc, d).into());
                    }
                    disc = d;
                }
            }
            if !signed_area2(p).is_positive() {
                return Err(SurfaceError::BadPolygon(
                    i,
                    PolygonError::OpenChain("vertices are not counterclockwise".into()),
                ));
            }
            check_simple(p).map_err(|e| SurfaceError::BadPolygon(i, e))?;
        }
        let mut partner: Vec<Vec<Option<EdgeRef>>> = polygons.iter().map(|p| vec![None; p.len()]).collect();
        for &(a, b) in &gluings {
            for e in [a, b] {
                if e.0 >= polygons.len() || e.1 >= polygons[e.0].len() {
                    return Err(SurfaceError::InvalidGluing(format!("no edge {e:?}")));
                }
            }
            if a == b {
                return Err(SurfaceError::InvalidGluing(format!("edge {a:?} glued to itself")));
            }
            for (e, f) in [(a, b), (b, a)] {
                if partner[e.0][e.1].replace(f).is_some() {
                    return Err(SurfaceError::InvalidGluing(format!("edge {e:?} glued twice")));
                }
            }
            let ha = edge_vec(&polygons, a);
            let hb = edge_vec(&polygons, b);
            if !(&ha + &hb).is_zero() {
                return Err(SurfaceError::InvalidGluing(format!(
                    "edges {a:?} and {b:?} are not opposite translates"
                )));
            }
        }
        let partner = partner
            .into_iter()
            .enumerate()
            .map(|(p, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(e, f)| {
                        f.ok_or_else(|| SurfaceError::InvalidGluing(format!("edge {:?} is free", (p, e))))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TranslationSurface {
            polygons,
            gluings,
            marked_points: Vec::new(),
            partner,
        })
    }

    pub fn with_marked_points(mut self, pts: Vec<MarkedPoint>) -> Result<Self, SurfaceError> {
        for m in &pts {
            self.locate(&m.at)?;
        }
        self.marked_points = pts;
        Ok(self)
    }

    pub fn disc(&self) -> Result<u64, FieldError> {
        let mut d = 0;
        for v in self.polygons.iter().flatten() {
            let e = v.disc()?;
            if e != 0 {
                d = e;
            }
        }
        Ok(d)
    }

    pub fn partner(&self, e: EdgeRef) -> EdgeRef {
        self.partner[e.0][e.1]
    }

    pub fn vertex(&self, p: usize, v: usize) -> &PlanarVec {
        let poly = &self.polygons[p];
        &poly[v % poly.len()]
    }

    pub fn edge(&self, e: EdgeRef) -> PlanarVec {
        edge_vec(&self.polygons, e)
    }

    pub fn area(&self) -> QuadElem {
        let two = QuadElem::from_int(2);
        self.polygons
            .iter()
            .map(|p| signed_area2(p) / &two)
            .fold(QuadElem::zero(), |a, b| a + b)
    }

    /// Classifies a point as interior, on an edge or at a vertex of its polygon.
    pub fn locate(&self, pt: &SurfacePoint) -> Result<Location, SurfaceError> {
        let poly = self
            .polygons
            .get(pt.polygon)
            .ok_or_else(|| SurfaceError::InvalidPoint(format!("no polygon {}", pt.polygon)))?;
        pt.point.disc()?;
        let k = poly.len();
        for (i, v) in poly.iter().enumerate() {
            if *v == pt.point {
                return Ok(Location::Vertex(i));
            }
        }
        for i in 0..k {
            let (a, b) = (&poly[i], &poly[(i + 1) % k]);
            if orient(a, b, &pt.point) == 0 && on_segment(a, b, &pt.point) {
                return Ok(Location::Edge(i));
            }
        }
        if point_in_polygon(poly, &pt.point) {
            Ok(Location::Interior)
        } else {
            Err(SurfaceError::InvalidPoint(format!(
                "{} lies outside polygon {}",
                pt.point, pt.polygon
            )))
        }
    }

    /// Corners around each vertex, walked counterclockwise.
    pub fn vertex_classes(&self) -> Vec<Vec<EdgeRef>> {
        let mut seen: Vec<Vec<bool>> = self.polygons.iter().map(|p| vec![false; p.len()]).collect();
        let mut out = Vec::new();
        for p in 0..self.polygons.len() {
            for v in 0..self.polygons[p].len() {
                if seen[p][v] {
                    continue;
                }
                let mut cls = Vec::new();
                let mut cur = (p, v);
                while !seen[cur.0][cur.1] {
                    seen[cur.0][cur.1] = true;
                    cls.push(cur);
                    let k = self.polygons[cur.0].len();
                    cur = self.partner((cur.0, (cur.1 + k - 1) % k));
                }
                out.push(cls);
            }
        }
        out
    }

    /// Index into [`vertex_classes`](Self::vertex_classes) of a corner.
    pub fn class_of(&self, classes: &[Vec<EdgeRef>], corner: EdgeRef) -> usize {
        classes
            .iter()
            .position(|c| c.contains(&corner))
            .expect("corner belongs to a class")
    }

    /// Cone angles, genus and stratum. On a torus every vertex is regular and
    /// the stratum is `H(0)`.
    pub fn cone_analysis(&self) -> ConeAnalysis {
        let reference = PlanarVec::from_ints(1, 0);
        let mut classes = Vec::new();
        let mut excess = 0i64;
        for corners in self.vertex_classes() {
            let mut turns = 0;
            for &(p, v) in &corners {
                let c = self.vertex(p, v);
                let k = self.polygons[p].len();
                let out = self.vertex(p, v + 1) - c;
                let inn = self.vertex(p, v + k - 1) - c;
                if PlanarVec::in_ccw_arc(&reference, &out, &inn) {
                    turns += 1;
                }
            }
            excess += turns as i64 - 1;
            let representative = corners
                .iter()
                .map(|&(p, v)| SurfacePoint::new(p, self.vertex(p, v).clone()))
                .min_by(|a, b| a.key_cmp(b))
                .expect("nonempty class");
            classes.push(ConeClass {
                corners,
                angle_2pi: turns,
                representative,
            });
        }
        let genus = (excess / 2 + 1) as u64;
        let mut orders: Vec<u64> = classes
            .iter()
            .filter(|c| c.angle_2pi > 1)
            .map(|c| c.angle_2pi - 1)
            .collect();
        orders.sort_unstable_by(|a, b| b.cmp(a));
        if orders.is_empty() {
            orders.push(0);
        }
        ConeAnalysis {
            classes,
            genus,
            stratum: Stratum(orders),
        }
    }

    /// Canonical representative: the least `(polygon, x, y)` among all
    /// presentations of the point.
    pub fn canonical(&self, pt: &SurfacePoint) -> Result<SurfacePoint, SurfaceError> {
        Ok(match self.locate(pt)? {
            Location::Interior => pt.clone(),
            Location::Edge(e) => {
                let (q, f) = self.partner((pt.polygon, e));
                let offset = self.vertex(q, f + 1) - self.vertex(pt.polygon, e);
                let other = SurfacePoint::new(q, &pt.point + &offset);
                if other.key_cmp(pt) == Ordering::Less {
                    other
                } else {
                    pt.clone()
                }
            }
            Location::Vertex(v) => {
                let classes = self.vertex_classes();
                let c = self.class_of(&classes, (pt.polygon, v));
                classes[c]
                    .iter()
                    .map(|&(p, w)| SurfacePoint::new(p, self.vertex(p, w).clone()))
                    .min_by(|a, b| a.key_cmp(b))
                    .expect("nonempty class")
            }
        })
    }

    pub fn same_point(&self, a: &SurfacePoint, b: &SurfacePoint) -> Result<bool, SurfaceError> {
        Ok(self.canonical(a)? == self.canonical(b)?)
    }

    /// Whether the point is a cone point of angle greater than `2 pi`.
    pub fn is_singular(&self, pt: &SurfacePoint) -> Result<bool, SurfaceError> {
        if let Location::Vertex(v) = self.locate(pt)? {
            let ca = self.cone_analysis();
            return Ok(ca
                .classes
                .iter()
                .any(|c| c.corners.contains(&(pt.polygon, v)) && c.angle_2pi > 1));
        }
        Ok(false)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("surface serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, String> {
        serde_json::from_str(s).map_err(|e| e.to_string())
    }
}

fn edge_vec(polygons: &[Vec<PlanarVec>], (p, e): EdgeRef) -> PlanarVec {
    let poly = &polygons[p];
    &poly[(e + 1) % poly.len()] - &poly[e]
}

/// Strict interior test by crossing parity; boundary points are handled by the caller.
fn point_in_polygon(poly: &[PlanarVec], q: &PlanarVec) -> bool {
    let k = poly.len();
    let mut inside = false;
    for i in 0..k {
        let a = &poly[i];
        let b = &poly[(i + 1) % k];
        let a_above = a.y.cmp_same_field(&q.y) == Ordering::Greater;
        let b_above = b.y.cmp_same_field(&q.y) == Ordering::Greater;
        if a_above != b_above {
            // Edge straddles the horizontal line through q; is the crossing right of q?
            let o = orient(a, b, q);
            if (b_above && o > 0) || (a_above && o < 0) {
                inside = !inside;
            }
        }
    }
    inside
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn v(x: &str, y: &str) -> PlanarVec {
        PlanarVec::new(x.parse().unwrap(), y.parse().unwrap())
    }

    /// Unit square with opposite sides glued.
    pub fn square_torus() -> TranslationSurface {
        let sq = vec![v("0", "0"), v("1", "0"), v("1", "1"), v("0", "1")];
        TranslationSurface::new(vec![sq], vec![((0, 0), (0, 2)), ((0, 1), (0, 3))]).unwrap()
    }

    #[test]
    fn torus_cone_data() {
        let t = square_torus();
        let ca = t.cone_analysis();
        assert_eq!(ca.genus, 1);
        assert_eq!(ca.classes.len(), 1);
        assert_eq!(ca.classes[0].angle_2pi, 1);
        assert_eq!(ca.stratum.to_string(), "H(0)");
    }

    #[test]
    fn rejects_bad_gluings() {
        let sq = vec![v("0", "0"), v("1", "0"), v("1", "1"), v("0", "1")];
        let e = TranslationSurface::new(vec![sq.clone()], vec![((0, 0), (0, 1)), ((0, 2), (0, 3))]);
        assert!(matches!(e, Err(SurfaceError::InvalidGluing(_))));
        let e = TranslationSurface::new(vec![sq], vec![((0, 0), (0, 2))]);
        assert!(matches!(e, Err(SurfaceError::InvalidGluing(_))));
    }

    #[test]
    fn canonical_points() {
        let t = square_torus();
        let a = SurfacePoint::new(0, v("1", "1/2"));
        let b = SurfacePoint::new(0, v("0", "1/2"));
        assert!(t.same_point(&a, &b).unwrap());
        let c = SurfacePoint::new(0, v("1", "1"));
        assert_eq!(t.canonical(&c).unwrap().point, v("0", "0"));
        assert!(t.locate(&SurfacePoint::new(0, v("2", "0"))).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = square_torus()
            .with_marked_points(vec![MarkedPoint {
                label: "c".into(),
                at: SurfacePoint::new(0, v("1/2", "1/2")),
            }])
            .unwrap();
        let s = t.to_json();
        let back = TranslationSurface::from_json(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json(), s);
    }
}
