//! The golden tetromino, its rel deformation, the golden points, and the
//! staircase surfaces in H(6) with golden-ratio proportions.

use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{PlanarVec, QuadElem};
use crate::surface::{
    central_symmetry_weierstrass, MarkedPoint, SurfaceError, SurfacePoint, TranslationSurface,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoldenError {
    #[error("t = {0} is outside (-phi^2, 1)")]
    OutOfRange(String),
    #[error("all lengths must be positive")]
    DegenerateLengths,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

impl GoldenError {
    pub fn code(&self) -> &'static str {
        match self {
            GoldenError::OutOfRange(_) => "OutOfRange",
            GoldenError::DegenerateLengths => "DegenerateLengths",
            GoldenError::Surface(e) => e.code(),
        }
    }
}

fn phi() -> QuadElem {
    QuadElem::phi()
}

fn q(n: i64) -> QuadElem {
    QuadElem::from_int(n)
}

fn half() -> QuadElem {
    QuadElem::from_frac(1, 2)
}

fn pt(x: &QuadElem, y: &QuadElem) -> PlanarVec {
    PlanarVec::new(x.clone(), y.clone())
}

pub fn in_range(t: &QuadElem) -> bool {
    let p2 = phi().square();
    (t + &p2).is_positive() && (q(1) - t).is_positive()
}

/// Heights `(1 - t, phi^2 + t, 2 phi - t)` of the cylinders, top to bottom.
pub fn heights(t: &QuadElem) -> [QuadElem; 3] {
    [q(1) - t, phi().square() + t, phi() * q(2) - t]
}

/// Circumferences `(1, phi^2, phi)`, top to bottom.
pub fn circumferences() -> [QuadElem; 3] {
    [q(1), phi().square(), phi()]
}

/// Moduli `(1 - t, 1 + t / phi^2, 2 - t / phi)`, top to bottom.
pub fn moduli(t: &QuadElem) -> [QuadElem; 3] {
    let h = heights(t);
    let c = circumferences();
    [&h[0] / &c[0], &h[1] / &c[1], &h[2] / &c[2]]
}

/// Whether the moduli are in proportion `[1:1:2]`: `2 (1 - t) = 2 - t / phi`.
pub fn decagon_membership(t: &QuadElem) -> bool {
    q(2) * (q(1) - t) == q(2) - t / phi()
}

#[derive(Clone, Debug, Serialize)]
pub struct RelFlowState {
    pub t: QuadElem,
    pub surface: TranslationSurface,
    /// `w1..w6`, `golden-a`, `golden-b`, `zero-a`, `zero-b`.
    pub tracked_points: Vec<MarkedPoint>,
}

impl RelFlowState {
    pub fn point(&self, label: &str) -> Option<&SurfacePoint> {
        self.tracked_points
            .iter()
            .find(|m| m.label == label)
            .map(|m| &m.at)
    }

    pub fn weierstrass_points(&self) -> Vec<MarkedPoint> {
        self.tracked_points
            .iter()
            .filter(|m| m.label.starts_with('w'))
            .cloned()
            .collect()
    }

    pub fn heights(&self) -> [QuadElem; 3] {
        heights(&self.t)
    }

    pub fn moduli(&self) -> [QuadElem; 3] {
        moduli(&self.t)
    }
}

/// The surface at time `t` of the rel flow. Polygons are the three horizontal
/// cylinders, top (0) to bottom (2), each drawn symmetric about its centre;
/// the bottom cylinder occupies `[1, 1 + phi] x [0, 2 phi - t]`.
pub fn rel_flow(t: &QuadElem) -> Result<RelFlowState, GoldenError> {
    if !in_range(t) {
        return Err(GoldenError::OutOfRange(t.to_string()));
    }
    let [h1, h2, h3] = heights(t);
    let f = phi();
    let f2 = f.square();
    let zero = q(0);
    let one = q(1);
    let xl = (&one - &f2) * half();
    let xr = &xl + &f2;
    let m3 = &one + &f * half();
    let r3 = &one + &f;
    let y2 = h3.clone();
    let y1 = &y2 + &h2;
    let y0 = &y1 + &h1;

    let top = vec![pt(&zero, &y1), pt(&one, &y1), pt(&one, &y0), pt(&zero, &y0)];
    let middle = vec![
        pt(&xl, &y2),
        pt(&zero, &y2),
        pt(&one, &y2),
        pt(&xr, &y2),
        pt(&xr, &y1),
        pt(&one, &y1),
        pt(&zero, &y1),
        pt(&xl, &y1),
    ];
    let bottom = vec![
        pt(&one, &zero),
        pt(&m3, &zero),
        pt(&r3, &zero),
        pt(&r3, &y2),
        pt(&m3, &y2),
        pt(&one, &y2),
    ];
    let gluings = vec![
        ((0, 0), (1, 5)),
        ((0, 1), (0, 3)),
        ((0, 2), (1, 1)),
        ((1, 0), (2, 3)),
        ((1, 2), (2, 4)),
        ((1, 3), (1, 7)),
        ((1, 4), (2, 0)),
        ((1, 6), (2, 1)),
        ((2, 2), (2, 5)),
    ];
    let s = TranslationSurface::new(vec![top, middle, bottom], gluings)?;

    let mid1 = (&y1 + &y0) * half();
    let mid2 = (&y2 + &y1) * half();
    let mid3 = &y2 * half();
    let d = &f * (&one - t);
    let mut raw = vec![
        ("w1", SurfacePoint::new(0, pt(&zero, &mid1))),
        ("w2", SurfacePoint::new(0, pt(&half(), &mid1))),
        ("w3", SurfacePoint::new(1, pt(&half(), &mid2))),
        ("w4", SurfacePoint::new(1, pt(&xr, &mid2))),
        ("w5", SurfacePoint::new(2, pt(&m3, &mid3))),
        ("w6", SurfacePoint::new(2, pt(&one, &mid3))),
        ("golden-a", SurfacePoint::new(2, pt(&one, &(&y2 - &d)))),
        ("golden-b", SurfacePoint::new(2, pt(&one, &d))),
        ("zero-a", SurfacePoint::new(2, pt(&one, &y2))),
        ("zero-b", SurfacePoint::new(2, pt(&one, &zero))),
    ];
    let mut tracked = Vec::new();
    for (label, p) in raw.drain(..) {
        tracked.push(MarkedPoint {
            label: label.into(),
            at: s.canonical(&p)?,
        });
    }
    let marks = tracked
        .iter()
        .filter(|m| !m.label.starts_with("zero"))
        .cloned()
        .collect();
    Ok(RelFlowState {
        t: t.clone(),
        surface: s.with_marked_points(marks)?,
        tracked_points: tracked,
    })
}

/// The rel flow at `t = 0`.
pub fn golden_tetromino() -> TranslationSurface {
    rel_flow(&q(0)).expect("t = 0 is in range").surface
}

/// The two golden points: on the vertical line through `w6`, at distance
/// `phi (1 - t)` from the zero above and below it respectively.
pub fn golden_points(state: &RelFlowState) -> [SurfacePoint; 2] {
    [
        state.point("golden-a").expect("tracked").clone(),
        state.point("golden-b").expect("tracked").clone(),
    ]
}

/// The bottom-cylinder Weierstrass point the golden points meet at `t = 0`.
pub fn w2_bottom(state: &RelFlowState) -> &SurfacePoint {
    state.point("w6").expect("tracked")
}

/// Grid coordinates of a staircase surface: column and row boundaries.
#[derive(Clone, Debug, Serialize)]
pub struct Staircase {
    pub xs: [QuadElem; 5],
    pub ys: [QuadElem; 5],
}

impl Staircase {
    pub fn new(x1: &QuadElem, x2: &QuadElem, y1: &QuadElem, y2: &QuadElem) -> Result<Self, GoldenError> {
        if ![x1, x2, y1, y2].iter().all(|v| v.is_positive()) {
            return Err(GoldenError::DegenerateLengths);
        }
        let f = phi();
        let fm1 = &f - q(1);
        let a1 = &f * x1;
        let a2 = &a1 + &fm1 * x2;
        let a3 = &a2 + x2;
        let a4 = &a3 + x1;
        let b1 = &f * y1;
        let b2 = &b1 + &f * y2;
        let b3 = &b2 + y2;
        let b4 = &b3 + y1;
        Ok(Staircase {
            xs: [q(0), a1, a2, a3, a4],
            ys: [q(0), b1, b2, b3, b4],
        })
    }

    /// Column range of row `r` and row range of column `c`.
    const ROW_COLS: [(usize, usize); 4] = [(0, 1), (0, 3), (2, 4), (3, 4)];
    const COL_ROWS: [(usize, usize); 4] = [(0, 2), (1, 2), (1, 3), (2, 4)];

    fn vertices(&self) -> Vec<PlanarVec> {
        let (x, y) = (&self.xs, &self.ys);
        [
            (0, 0),
            (1, 0),
            (1, 1),
            (2, 1),
            (3, 1),
            (3, 2),
            (4, 2),
            (4, 3),
            (4, 4),
            (3, 4),
            (3, 3),
            (2, 3),
            (2, 2),
            (1, 2),
            (0, 2),
            (0, 1),
        ]
        .iter()
        .map(|&(i, j)| pt(&x[i], &y[j]))
        .collect()
    }

    fn row_of(&self, y: &QuadElem) -> Option<usize> {
        (0..4).find(|&r| (y - &self.ys[r]).is_positive() && (&self.ys[r + 1] - y).is_positive())
    }

    fn col_of(&self, x: &QuadElem) -> Option<usize> {
        (0..4).find(|&c| (x - &self.xs[c]).is_positive() && (&self.xs[c + 1] - x).is_positive())
    }

    /// One full Dehn twist in the horizontal cylinder through `p`, if any.
    fn twist_h(&self, p: &PlanarVec) -> Option<PlanarVec> {
        let r = self.row_of(&p.y)?;
        let (c0, c1) = Self::ROW_COLS[r];
        let (lo, hi) = (&self.xs[c0], &self.xs[c1]);
        let circ = hi - lo;
        let frac = (&p.y - &self.ys[r]) / (&self.ys[r + 1] - &self.ys[r]);
        Some(pt(&wrap(&(&p.x + &frac * &circ), lo, &circ), &p.y))
    }

    /// One full Dehn twist in the vertical cylinder through `p`, if any.
    fn twist_v(&self, p: &PlanarVec) -> Option<PlanarVec> {
        let c = self.col_of(&p.x)?;
        let (r0, r1) = Self::COL_ROWS[c];
        let (lo, hi) = (&self.ys[r0], &self.ys[r1]);
        let circ = hi - lo;
        let frac = (&p.x - &self.xs[c]) / (&self.xs[c + 1] - &self.xs[c]);
        Some(pt(&p.x, &wrap(&(&p.y + &frac * &circ), lo, &circ)))
    }
}

fn wrap(v: &QuadElem, lo: &QuadElem, len: &QuadElem) -> QuadElem {
    let mut v = v.clone();
    while !(&v - lo).is_negative() && !(&v - lo - len).is_negative() {
        v -= len;
    }
    while (&v - lo).is_negative() {
        v += len;
    }
    v
}

/// The staircase with columns `(phi x1, (phi - 1) x2, x2, x1)` and rows
/// `(phi y1, phi y2, y2, y1)` as one polygon with opposite sides identified.
pub fn m0_surface(
    x1: &QuadElem,
    x2: &QuadElem,
    y1: &QuadElem,
    y2: &QuadElem,
) -> Result<TranslationSurface, GoldenError> {
    let st = Staircase::new(x1, x2, y1, y2)?;
    let gluings = vec![
        ((0, 0), (0, 13)),
        ((0, 2), (0, 12)),
        ((0, 3), (0, 10)),
        ((0, 5), (0, 8)),
        ((0, 1), (0, 15)),
        ((0, 4), (0, 14)),
        ((0, 6), (0, 11)),
        ((0, 7), (0, 9)),
    ];
    Ok(TranslationSurface::new(vec![st.vertices()], gluings)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum M0Verdict {
    NoPeriodicPoints,
    CandidatesRemain,
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub label: String,
    pub point: SurfacePoint,
    /// Images under one full twist of the horizontal and the vertical cylinder through it.
    pub twist_images: Vec<SurfacePoint>,
    pub eliminated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct M0Candidates {
    pub candidates: Vec<Candidate>,
    pub verdict: M0Verdict,
}

/// Cylinder-interior symmetric points of the staircase that could be periodic.
///
/// `s1..s4` lie in the middle two rows, `o1..o4` in the outer two columns (two
/// positions carry both labels). A point in the interior of a middle row that
/// is not an `s` point, or in the interior of an outer column that is not an
/// `o` point, is not periodic. Candidates are followed under single cylinder
/// twists, and a candidate whose orbit reaches such a point is eliminated.
pub fn periodic_point_candidates_m0(
    x1: &QuadElem,
    x2: &QuadElem,
    y1: &QuadElem,
    y2: &QuadElem,
) -> Result<M0Candidates, GoldenError> {
    let st = Staircase::new(x1, x2, y1, y2)?;
    let s = m0_surface(x1, x2, y1, y2)?;
    let (xs, ys) = (&st.xs, &st.ys);
    let mid = |a: &QuadElem, b: &QuadElem| (a + b) * half();
    let row_mid = |r: usize| mid(&ys[r], &ys[r + 1]);
    let col_mid = |c: usize| mid(&xs[c], &xs[c + 1]);
    let row1_far = &xs[1] + &phi() * x2 * half();
    let solid = [
        pt(&col_mid(0), &row_mid(1)),
        pt(&row1_far, &row_mid(1)),
        pt(&col_mid(2), &row_mid(2)),
        pt(&col_mid(3), &row_mid(2)),
    ];
    let open = [
        pt(&col_mid(0), &row_mid(0)),
        pt(&col_mid(0), &row_mid(1)),
        pt(&col_mid(3), &row_mid(2)),
        pt(&col_mid(3), &row_mid(3)),
    ];
    let mut unique: Vec<PlanarVec> = Vec::new();
    for p in solid.iter().chain(open.iter()) {
        if !unique.contains(p) {
            unique.push(p.clone());
        }
    }
    let forbidden = |p: &PlanarVec| {
        let in_mid_row = matches!(st.row_of(&p.y), Some(1 | 2));
        let in_outer_col = matches!(st.col_of(&p.x), Some(0 | 3));
        (in_mid_row && !solid.contains(p)) || (in_outer_col && !open.contains(p))
    };
    let images =
        |p: &PlanarVec| -> Vec<PlanarVec> { [st.twist_h(p), st.twist_v(p)].into_iter().flatten().collect() };
    let mut candidates = Vec::new();
    for (i, p) in unique.iter().enumerate() {
        let mut orbit = vec![p.clone()];
        let mut k = 0;
        let mut eliminated = false;
        while k < orbit.len() {
            for img in images(&orbit[k]) {
                if forbidden(&img) {
                    eliminated = true;
                } else if unique.contains(&img) && !orbit.contains(&img) {
                    orbit.push(img);
                }
            }
            k += 1;
        }
        let mut twist_images = Vec::new();
        for img in images(p) {
            twist_images.push(s.canonical(&SurfacePoint::new(0, img))?);
        }
        candidates.push(Candidate {
            label: format!("c{}", i + 1),
            point: s.canonical(&SurfacePoint::new(0, p.clone()))?,
            twist_images,
            eliminated,
        });
    }
    let verdict = if candidates.iter().all(|c| c.eliminated) {
        M0Verdict::NoPeriodicPoints
    } else {
        M0Verdict::CandidatesRemain
    };
    Ok(M0Candidates { candidates, verdict })
}

/// Weierstrass points of the rel-flow surface, recomputed from its symmetry.
pub fn computed_weierstrass(state: &RelFlowState) -> Result<Vec<SurfacePoint>, GoldenError> {
    let all = central_symmetry_weierstrass(&state.surface)?;
    let mut out = Vec::new();
    for p in all {
        if !state.surface.is_singular(&p)? {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{cylinder_decomposition, Involution};

    fn t(s: &str) -> QuadElem {
        s.parse().unwrap()
    }

    fn horizontal_moduli(s: &TranslationSurface) -> Vec<QuadElem> {
        let mut m: Vec<_> = cylinder_decomposition(s, &PlanarVec::from_ints(1, 0))
            .unwrap()
            .into_iter()
            .map(|c| c.modulus)
            .collect();
        m.sort_by(|a, b| a.cmp_same_field(b));
        m
    }

    #[test]
    fn tetromino_cone_data_and_moduli() {
        let s = golden_tetromino();
        assert_eq!(s.cone_analysis().stratum.to_string(), "H(1,1)");
        assert_eq!(horizontal_moduli(&s), vec![q(1), q(1), q(2)]);
        let f = phi();
        assert_eq!(s.area(), q(1) + f.pow(4) + q(2) * f.square());
    }

    #[test]
    fn weierstrass_points_match_labels() {
        let st = rel_flow(&t("1/3")).unwrap();
        let w = central_symmetry_weierstrass(&st.surface).unwrap();
        assert_eq!(w.len(), 6);
        let labelled: Vec<_> = st.weierstrass_points().into_iter().map(|m| m.at).collect();
        assert_eq!(labelled.len(), 6);
        assert!(labelled.iter().all(|p| w.contains(p)));
        for z in ["zero-a", "zero-b"] {
            assert!(st.surface.is_singular(st.point(z).unwrap()).unwrap());
        }
    }

    #[test]
    fn rel_flow_moduli_formulas() {
        let f = phi();
        for s in ["-1", "-1/2", "0", "1/2", "9/10", "1/7"] {
            let tv = t(s);
            let st = rel_flow(&tv).unwrap();
            let m = st.moduli();
            assert_eq!(m[0], q(1) - &tv);
            assert_eq!(m[1], q(1) + &tv / f.square());
            assert_eq!(m[2], q(2) - &tv / &f);
            let mut want = m.to_vec();
            want.sort_by(|a, b| a.cmp_same_field(b));
            assert_eq!(horizontal_moduli(&st.surface), want);
            assert_eq!(st.surface.area(), golden_tetromino().area());
        }
    }

    #[test]
    fn range_is_open() {
        let f2 = phi().square();
        assert!(matches!(rel_flow(&q(1)), Err(GoldenError::OutOfRange(_))));
        assert!(matches!(rel_flow(&-f2), Err(GoldenError::OutOfRange(_))));
        assert!(rel_flow(&(q(1) - phi().square() - QuadElem::from_frac(1, 100))).is_ok());
    }

    #[test]
    fn decagon_only_at_zero() {
        assert!(decagon_membership(&q(0)));
        assert!(!decagon_membership(&t("1/2")));
        assert!(!decagon_membership(&q(-1)));
    }

    #[test]
    fn golden_points_behaviour() {
        let st = rel_flow(&q(0)).unwrap();
        let [a, b] = golden_points(&st);
        assert_eq!(a, b);
        assert_eq!(&a, w2_bottom(&st));

        let f = phi();
        for n in 2..=10 {
            let tv = q(1) - QuadElem::from_frac(1, n);
            let st = rel_flow(&tv).unwrap();
            let [a, b] = golden_points(&st);
            // Both zeros sit on the left side of the bottom cylinder.
            let h3 = &heights(&tv)[2];
            let za = SurfacePoint::new(2, pt(&q(1), h3));
            let zb = SurfacePoint::new(2, pt(&q(1), &q(0)));
            assert!(st.surface.same_point(&za, st.point("zero-a").unwrap()).unwrap());
            assert!(st.surface.same_point(&zb, st.point("zero-b").unwrap()).unwrap());
            let d = (&f * (q(1) - &tv)).square();
            assert_eq!((&za.point - &a.point).norm_sq(), d);
            assert_eq!((&b.point - &zb.point).norm_sq(), d);
            assert_eq!((a.polygon, b.polygon), (2, 2));
            assert!(a.point.x == q(1) && b.point.x == q(1));
            let inv = Involution::find(&st.surface).unwrap();
            assert_eq!(inv.apply(&st.surface, &a).unwrap(), b);
        }
    }

    #[test]
    fn m0_is_h6_with_four_cylinders() {
        let one = q(1);
        let s = m0_surface(&one, &one, &one, &one).unwrap();
        let ca = s.cone_analysis();
        assert_eq!(ca.genus, 4);
        assert_eq!(ca.stratum.to_string(), "H(6)");
        let cyl = cylinder_decomposition(&s, &PlanarVec::from_ints(1, 0)).unwrap();
        assert_eq!(cyl.len(), 4);
        assert!(matches!(
            m0_surface(&one, &q(0), &one, &one),
            Err(GoldenError::DegenerateLengths)
        ));
    }

    #[test]
    fn m0_candidates_eliminated() {
        for (a, b, c, d) in [
            ("1", "1", "1", "1"),
            ("2", "1/3", "1", "5/2"),
            ("1/2", "3", "2", "1"),
        ] {
            let r = periodic_point_candidates_m0(&t(a), &t(b), &t(c), &t(d)).unwrap();
            assert_eq!(r.candidates.len(), 6);
            assert_eq!(r.verdict, M0Verdict::NoPeriodicPoints);
        }
    }
}
