//! Finite blocking: which pairs of points on a genus-two table or surface
//! admit a finite set meeting every segment between them, and a bounded
//! empirical check of a proposed blocking set.

use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{PlanarVec, QuadElem};
use crate::polygon::{on_segment, realize, validate_polygon, AnglePi, PolygonError, PolygonSpec};
use crate::surface::{
    segments_between, unfolding_copies, Involution, MarkedPoint, Segment, SurfaceError, SurfacePoint,
    TranslationSurface,
};
use crate::unfolding::{classify_genus2, torus_cover_check, HyperKind, UnfoldingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockingError {
    #[error("table unfolds to genus {0}, not two")]
    NotGenusTwo(u64),
    #[error("hyperelliptic involution unavailable: {0}")]
    InvolutionUnavailable(String),
    #[error("blocking set contains an endpoint")]
    EndpointInBlockingSet,
    #[error(transparent)]
    Unfolding(UnfoldingError),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

impl From<UnfoldingError> for BlockingError {
    fn from(e: UnfoldingError) -> Self {
        match e {
            UnfoldingError::NotGenusTwo(g) => BlockingError::NotGenusTwo(g),
            e => BlockingError::Unfolding(e),
        }
    }
}

impl BlockingError {
    pub fn code(&self) -> &'static str {
        match self {
            BlockingError::NotGenusTwo(_) => "NotGenusTwo",
            BlockingError::InvolutionUnavailable(_) => "InvolutionUnavailable",
            BlockingError::EndpointInBlockingSet => "EndpointInBlockingSet",
            BlockingError::Unfolding(e) => e.code(),
            BlockingError::Polygon(e) => e.code(),
            BlockingError::Surface(e) => e.code(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    BlockedSelf,
    BlockedPair,
    NotBlocked,
}

/// A point of a table or of a surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "site", rename_all = "snake_case")]
pub enum Site {
    Vertex { index: usize },
    EdgeMidpoint { edge: usize },
    FaceCenter,
    TablePoint { at: PlanarVec },
    SurfacePoint { polygon: usize, point: PlanarVec },
}

impl From<&SurfacePoint> for Site {
    fn from(p: &SurfacePoint) -> Self {
        Site::SurfacePoint {
            polygon: p.polygon,
            point: p.point.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockingVerdict {
    pub kind: VerdictKind,
    pub subjects: Vec<Site>,
    pub blocking_set: Vec<Site>,
    pub witness: Option<Segment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum PolygonBlocking {
    /// The unfolding covers a torus; every pair of points is finitely blocked.
    AllPairsBlocked,
    /// Verdicts for every pair of vertices. Pairs not involving a vertex are
    /// never blocked.
    Primitive {
        verdicts: Vec<BlockingVerdict>,
        warnings: Vec<String>,
    },
}

pub const EXCEPTION_WARNING: &str =
    "the quadrilateral (1/3,2/3,1/2,1/2) is the listed exception: no pairs of finitely blocked points";

fn table_vertices(spec: &PolygonSpec) -> Result<(PolygonSpec, Vec<PlanarVec>), BlockingError> {
    let spec = match &spec.vertices {
        Some(_) => validate_polygon(spec)?,
        None => realize(&spec.angles, None)?,
    };
    let v = spec.vertices.clone().expect("realized");
    Ok((spec, v))
}

fn describe(verts: &[PlanarVec], y: &PlanarVec) -> Site {
    let k = verts.len();
    if let Some(i) = verts.iter().position(|v| v == y) {
        return Site::Vertex { index: i };
    }
    let half = QuadElem::from_frac(1, 2);
    for e in 0..k {
        let (a, b) = (&verts[e], &verts[(e + 1) % k]);
        if on_segment(a, b, y) && (a + b).scale(&half) == *y {
            return Site::EdgeMidpoint { edge: e };
        }
    }
    if k == 4 {
        let c = (&verts[0] + &verts[2]).scale(&half);
        if c == (&verts[1] + &verts[3]).scale(&half) && c == *y {
            return Site::FaceCenter;
        }
    }
    Site::TablePoint { at: y.clone() }
}

/// Table positions of the Weierstrass points of the unfolding.
pub fn weierstrass_table_sites(spec: &PolygonSpec) -> Result<Vec<Site>, BlockingError> {
    let (spec, verts) = table_vertices(spec)?;
    let (s, group) = unfolding_copies(&spec)?;
    let inv = Involution::find(&s).map_err(|e| BlockingError::InvolutionUnavailable(e.to_string()))?;
    let mut out = Vec::new();
    for w in inv.fixed_points(&s)? {
        let g = group[w.polygon].inverse().expect("invertible");
        let site = describe(&verts, &g.apply(&w.point));
        if !out.contains(&site) {
            out.push(site);
        }
    }
    Ok(out)
}

/// The solid points drawn for the special tables, keyed by angle order.
fn drawn_solid_points(spec: &PolygonSpec, verts: &[PlanarVec], pair: (usize, usize)) -> Vec<Site> {
    let k = verts.len();
    if k == 3 {
        // Midpoint of the side joining the pair, or opposite the lone vertex.
        let (i, j) = pair;
        let e = if (i + 1) % 3 == j { i } else { j };
        return vec![Site::EdgeMidpoint { edge: e }];
    }
    let (i, j) = pair;
    if (i + 2) % 4 == j {
        return vec![Site::FaceCenter];
    }
    // Trapezoid: the base joining the pair and the opposite side.
    let e = if (i + 1) % 4 == j { i } else { j };
    let _ = spec;
    vec![
        Site::EdgeMidpoint { edge: e },
        Site::EdgeMidpoint { edge: (e + 2) % 4 },
    ]
}

/// Pairs of finitely blocked vertices of a genus-two table.
pub fn polygon_blocking(spec: &PolygonSpec) -> Result<PolygonBlocking, BlockingError> {
    let class = classify_genus2(spec)?;
    let (full, verts) = table_vertices(spec)?;
    if torus_cover_check(&full)? {
        return Ok(PolygonBlocking::AllPairsBlocked);
    }
    let angles = &full.angles;
    let k = angles.len();
    let d = crate::polygon::angle_lcm(angles);
    let unit = AnglePi::new(1, d);
    let minimal: Vec<usize> = (0..k).filter(|&i| angles[i] == unit).collect();
    let special = class.hyperelliptic == HyperKind::Special;
    let mut warnings = Vec::new();
    let f = AnglePi::new;
    let mut sorted = angles.clone();
    sorted.sort();
    if sorted == [f(1, 3), f(1, 2), f(1, 2), f(2, 3)] {
        warnings.push(EXCEPTION_WARNING.to_string());
    }

    let mut blocked: Vec<BlockingVerdict> = Vec::new();
    let weierstrass = || weierstrass_table_sites(&full);
    if special && minimal.len() == 2 {
        let pair = (minimal[0], minimal[1]);
        blocked.push(BlockingVerdict {
            kind: VerdictKind::BlockedPair,
            subjects: vec![Site::Vertex { index: pair.0 }, Site::Vertex { index: pair.1 }],
            blocking_set: drawn_solid_points(&full, &verts, pair),
            witness: None,
        });
    } else if special && k == 3 {
        // Isosceles triangle: the lone angle, if it is pi/d.
        for &i in &minimal {
            let others: Vec<_> = (0..3).filter(|&j| j != i).collect();
            if angles[others[0]] == angles[others[1]] {
                let opposite = (i + 1) % 3;
                blocked.push(BlockingVerdict {
                    kind: VerdictKind::BlockedSelf,
                    subjects: vec![Site::Vertex { index: i }],
                    blocking_set: drawn_solid_points(&full, &verts, (opposite, (opposite + 1) % 3)),
                    witness: None,
                });
            }
        }
    } else if !special {
        let w = weierstrass()?;
        for &i in &minimal {
            let me = Site::Vertex { index: i };
            blocked.push(BlockingVerdict {
                kind: VerdictKind::BlockedSelf,
                subjects: vec![me.clone()],
                blocking_set: w.iter().filter(|s| **s != me).cloned().collect(),
                witness: None,
            });
        }
    }

    let mut verdicts = Vec::new();
    for i in 0..k {
        for j in i..k {
            let subj: Vec<Site> = if i == j {
                vec![Site::Vertex { index: i }]
            } else {
                vec![Site::Vertex { index: i }, Site::Vertex { index: j }]
            };
            match blocked.iter().find(|v| v.subjects == subj) {
                Some(v) => verdicts.push(v.clone()),
                None => verdicts.push(BlockingVerdict {
                    kind: VerdictKind::NotBlocked,
                    subjects: subj,
                    blocking_set: Vec::new(),
                    witness: None,
                }),
            }
        }
    }
    Ok(PolygonBlocking::Primitive { verdicts, warnings })
}

/// The points `p` is finitely blocked from on a primitive genus-two surface:
/// none for a zero, otherwise its image under the hyperelliptic involution,
/// blocked by the Weierstrass points other than the two subjects.
pub fn surface_blocking(
    s: &TranslationSurface,
    p: &SurfacePoint,
) -> Result<Vec<BlockingVerdict>, BlockingError> {
    let unavailable = |m: String| BlockingError::InvolutionUnavailable(m);
    let genus = s.cone_analysis().genus;
    if genus != 2 {
        return Err(unavailable(format!("surface has genus {genus}")));
    }
    let p = s.canonical(p)?;
    if s.is_singular(&p)? {
        return Ok(Vec::new());
    }
    let inv = Involution::find(s).map_err(|e| unavailable(e.to_string()))?;
    let w = inv.fixed_points(s)?;
    if w.len() != 6 {
        return Err(unavailable(format!("{} fixed points", w.len())));
    }
    let q = inv.apply(s, &p)?;
    let blockers: Vec<Site> = w
        .iter()
        .filter(|x| **x != p && **x != q)
        .map(Site::from)
        .collect();
    let (kind, subjects) = if p == q {
        (VerdictKind::BlockedSelf, vec![Site::from(&p)])
    } else {
        (VerdictKind::BlockedPair, vec![Site::from(&p), Site::from(&q)])
    };
    Ok(vec![BlockingVerdict {
        kind,
        subjects,
        blocking_set: blockers,
        witness: None,
    }])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum BlockingCheck {
    /// Every segment of length at most `lmax` meets the set. Not a proof beyond `lmax`.
    AllBlockedUpTo {
        lmax: QuadElem,
        segments: usize,
    },
    Counterexample {
        segment: Segment,
    },
}

/// Enumerates the segments from `p` to `q` of length at most `lmax` and
/// returns the first one, in canonical order, that misses `blocking_set`.
pub fn verify_blocking(
    s: &TranslationSurface,
    p: &SurfacePoint,
    q: &SurfacePoint,
    blocking_set: &[SurfacePoint],
    lmax: &QuadElem,
) -> Result<BlockingCheck, BlockingError> {
    for b in blocking_set {
        if s.same_point(b, p)? || s.same_point(b, q)? {
            return Err(BlockingError::EndpointInBlockingSet);
        }
    }
    let probes: Vec<MarkedPoint> = blocking_set
        .iter()
        .enumerate()
        .map(|(i, b)| MarkedPoint {
            label: format!("b{i}"),
            at: b.clone(),
        })
        .collect();
    let segs = segments_between(s, p, q, lmax, &probes)?;
    let n = segs.len();
    match segs.into_iter().find(|x| x.crossings.is_empty()) {
        Some(segment) => Ok(BlockingCheck::Counterexample { segment }),
        None => Ok(BlockingCheck::AllBlockedUpTo {
            lmax: lmax.clone(),
            segments: n,
        }),
    }
}

/// Coordinates of a table site.
pub fn site_coords(verts: &[PlanarVec], site: &Site) -> Option<PlanarVec> {
    let k = verts.len();
    let half = QuadElem::from_frac(1, 2);
    match site {
        Site::Vertex { index } => verts.get(*index).cloned(),
        Site::EdgeMidpoint { edge } if *edge < k => {
            Some((&verts[*edge] + &verts[(edge + 1) % k]).scale(&half))
        }
        Site::FaceCenter if k == 4 => Some((&verts[0] + &verts[2]).scale(&half)),
        Site::TablePoint { at } => Some(at.clone()),
        _ => None,
    }
}

/// Checks a table verdict on the unfolding. The first subject is taken in the
/// identity copy, the second ranges over all of its copies, and the blocking
/// set is lifted to every copy. Returns the shortest counterexample, if any.
pub fn verify_table_verdict(
    spec: &PolygonSpec,
    verdict: &BlockingVerdict,
    lmax: &QuadElem,
) -> Result<BlockingCheck, BlockingError> {
    let (full, verts) = table_vertices(spec)?;
    let (s, group) = unfolding_copies(&full)?;
    let coords = |site: &Site| {
        site_coords(&verts, site)
            .ok_or_else(|| BlockingError::Surface(SurfaceError::InvalidPoint(format!("{site:?}"))))
    };
    let lift = |y: &PlanarVec| -> Result<Vec<SurfacePoint>, BlockingError> {
        let mut out: Vec<SurfacePoint> = Vec::new();
        for (i, g) in group.iter().enumerate() {
            let c = s.canonical(&SurfacePoint::new(i, g.apply(y)))?;
            if !out.contains(&c) {
                out.push(c);
            }
        }
        Ok(out)
    };
    let (first, last) = match (verdict.subjects.first(), verdict.subjects.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(BlockingError::Surface(SurfaceError::InvalidPoint(
                "no subjects".into(),
            )))
        }
    };
    let p = s.canonical(&SurfacePoint::new(0, coords(first)?))?;
    let targets = lift(&coords(last)?)?;
    let mut set = Vec::new();
    for site in &verdict.blocking_set {
        for b in lift(&coords(site)?)? {
            if !set.contains(&b) {
                set.push(b);
            }
        }
    }
    let mut best: Option<Segment> = None;
    let mut total = 0;
    for q in &targets {
        match verify_blocking(&s, &p, q, &set, lmax)? {
            BlockingCheck::AllBlockedUpTo { segments, .. } => total += segments,
            BlockingCheck::Counterexample { segment } => {
                let shorter = best.as_ref().is_none_or(|b| {
                    segment
                        .length_sq()
                        .cmp_same_field(&b.length_sq())
                        .then_with(|| segment.holonomy.lex_cmp(&b.holonomy))
                        .is_lt()
                });
                if shorter {
                    best = Some(segment);
                }
            }
        }
    }
    Ok(match best {
        Some(segment) => BlockingCheck::Counterexample { segment },
        None => BlockingCheck::AllBlockedUpTo {
            lmax: lmax.clone(),
            segments: total,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden::{golden_points, rel_flow};
    use crate::polygon::parse_angles;
    use crate::prototypes::{build_prototype_surface, prototype_weierstrass, PrototypeTriple};
    use crate::surface::tests::{square_torus, v};

    fn spec(s: &str) -> PolygonSpec {
        PolygonSpec::from_angles(parse_angles(s).unwrap())
    }

    #[test]
    fn table_verdicts_lift() {
        let t = spec("1/8,3/8,1/2");
        let lmax = QuadElem::from_int(6);
        let PolygonBlocking::Primitive { verdicts, .. } = polygon_blocking(&t).unwrap() else {
            panic!("torus cover")
        };
        let me = verdicts
            .iter()
            .find(|v| v.kind == VerdictKind::BlockedSelf)
            .unwrap();
        assert!(matches!(
            verify_table_verdict(&t, me, &lmax).unwrap(),
            BlockingCheck::AllBlockedUpTo { .. }
        ));
        let mut open = me.clone();
        open.blocking_set.clear();
        assert!(matches!(
            verify_table_verdict(&t, &open, &lmax).unwrap(),
            BlockingCheck::Counterexample { .. }
        ));
    }

    fn blocked(r: &PolygonBlocking) -> Vec<BlockingVerdict> {
        match r {
            PolygonBlocking::Primitive { verdicts, .. } => verdicts
                .iter()
                .filter(|v| v.kind != VerdictKind::NotBlocked)
                .cloned()
                .collect(),
            PolygonBlocking::AllPairsBlocked => panic!("torus cover"),
        }
    }

    fn index_of(s: &PolygonSpec, a: AnglePi) -> usize {
        s.angles.iter().position(|x| *x == a).unwrap()
    }

    #[test]
    fn eighth_triangle_vertex_blocked_from_itself() {
        let sp = spec("1/8,3/8,1/2");
        let b = blocked(&polygon_blocking(&sp).unwrap());
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].kind, VerdictKind::BlockedSelf);
        let i = index_of(&sp, AnglePi::new(1, 8));
        assert_eq!(b[0].subjects, vec![Site::Vertex { index: i }]);
        assert!(!b[0].blocking_set.is_empty());
    }

    #[test]
    fn fifth_triangle_pair_by_base_midpoint() {
        let sp = spec("1/5,1/5,3/5");
        let b = blocked(&polygon_blocking(&sp).unwrap());
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].kind, VerdictKind::BlockedPair);
        assert_eq!(
            b[0].subjects,
            vec![Site::Vertex { index: 0 }, Site::Vertex { index: 1 }]
        );
        assert_eq!(b[0].blocking_set, vec![Site::EdgeMidpoint { edge: 0 }]);
    }

    #[test]
    fn other_rows() {
        assert!(blocked(&polygon_blocking(&spec("1/5,3/10,1/2")).unwrap()).is_empty());
        let r = polygon_blocking(&spec("1/3,2/3,1/2,1/2")).unwrap();
        assert!(blocked(&r).is_empty());
        match r {
            PolygonBlocking::Primitive { warnings, .. } => assert_eq!(warnings.len(), 1),
            _ => unreachable!(),
        }
        let sp = spec("2/5,2/5,1/5");
        let b = blocked(&polygon_blocking(&sp).unwrap());
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].subjects, vec![Site::Vertex { index: 2 }]);
        assert_eq!(b[0].blocking_set, vec![Site::EdgeMidpoint { edge: 0 }]);
        let b = blocked(&polygon_blocking(&spec("1/2,1/2,1/2,1/2,1/2,3/2")).unwrap());
        assert_eq!(b.len(), 5);
        assert!(b.iter().all(|v| v.kind == VerdictKind::BlockedSelf));
        assert!(b.iter().all(|v| v.subjects != vec![Site::Vertex { index: 5 }]));
        assert_eq!(
            polygon_blocking(&spec("1/6,1/6,2/3")).unwrap(),
            PolygonBlocking::AllPairsBlocked
        );
        assert!(matches!(
            polygon_blocking(&spec("1/7,2/7,4/7")),
            Err(BlockingError::NotGenusTwo(_))
        ));
    }

    #[test]
    fn trapezoid_and_parallelogram_drawings() {
        let b = blocked(&polygon_blocking(&spec("1/3,1/3,2/3,2/3")).unwrap());
        assert_eq!(b[0].kind, VerdictKind::BlockedPair);
        assert_eq!(
            b[0].blocking_set,
            vec![Site::EdgeMidpoint { edge: 0 }, Site::EdgeMidpoint { edge: 2 }]
        );
        let mut par = spec("1/3,2/3,1/3,2/3");
        let h: QuadElem = "1/2*sqrt(3)".parse().unwrap();
        let x = QuadElem::sqrt(3);
        let half = QuadElem::from_frac(1, 2);
        par.vertices = Some(vec![
            PlanarVec::zero(),
            PlanarVec::new(x.clone(), QuadElem::zero()),
            PlanarVec::new(&x + &half, h.clone()),
            PlanarVec::new(half, h),
        ]);
        let b = blocked(&polygon_blocking(&par).unwrap());
        assert_eq!(
            b[0].subjects,
            vec![Site::Vertex { index: 0 }, Site::Vertex { index: 2 }]
        );
        assert_eq!(b[0].blocking_set, vec![Site::FaceCenter]);
    }

    #[test]
    fn surface_verdicts() {
        let t = PrototypeTriple::new(5, 1, 1, -1).unwrap();
        let s = build_prototype_surface(&t).unwrap();
        let w1 = prototype_weierstrass(&s, 1).unwrap().clone();
        let r = surface_blocking(&s, &w1).unwrap();
        assert_eq!(r[0].kind, VerdictKind::BlockedSelf);
        assert_eq!(r[0].blocking_set.len(), 5);

        let st = rel_flow(&QuadElem::from_frac(1, 2)).unwrap();
        let [a, b] = golden_points(&st);
        let r = surface_blocking(&st.surface, &a).unwrap();
        assert_eq!(r[0].kind, VerdictKind::BlockedPair);
        assert_eq!(r[0].subjects[1], Site::from(&b));
        let mirror = surface_blocking(&st.surface, &b).unwrap();
        assert_eq!(
            mirror[0].subjects,
            vec![r[0].subjects[1].clone(), r[0].subjects[0].clone()]
        );
        let z = st.point("zero-a").unwrap();
        assert!(surface_blocking(&st.surface, z).unwrap().is_empty());
        assert!(matches!(
            surface_blocking(&square_torus(), &SurfacePoint::new(0, v("1/3", "1/3"))),
            Err(BlockingError::InvolutionUnavailable(_))
        ));
    }

    #[test]
    fn torus_half_points_block_origin_short_range() {
        let s = square_torus();
        let o = SurfacePoint::new(0, v("0", "0"));
        let set: Vec<_> = [("1/2", "0"), ("0", "1/2"), ("1/2", "1/2")]
            .iter()
            .map(|(x, y)| SurfacePoint::new(0, v(x, y)))
            .collect();
        let r = verify_blocking(&s, &o, &o, &set, &QuadElem::from_int(6)).unwrap();
        assert!(matches!(r, BlockingCheck::AllBlockedUpTo { .. }));
        let r = verify_blocking(&s, &o, &o, &[], &QuadElem::from_int(1)).unwrap();
        assert!(matches!(r, BlockingCheck::Counterexample { .. }));
        assert_eq!(
            verify_blocking(&s, &o, &o, &[o.clone()], &QuadElem::from_int(1)),
            Err(BlockingError::EndpointInBlockingSet)
        );
    }
}
