//! Rational-angled polygons (billiard tables).
//!
//! Angles are stored in units of `pi`. A polygon may carry explicit vertex
//! coordinates together with an optional Gram matrix; the Gram matrix lets a
//! table whose trigonometry leaves every real quadratic field (the `pi/5`
//! family) still be drawn with exact coordinates in an affine frame.

mod angle;
mod realize;

pub use angle::{parse_angles, AnglePi};
pub use realize::{realize, tan_in_field, tan_squared};

use std::cmp::Ordering;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{FieldError, PlanarVec, QuadElem, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("angles sum to {found}*pi but a {k}-gon needs {expected}*pi")]
    AngleSumMismatch {
        k: usize,
        expected: Rational,
        found: Rational,
    },
    #[error("boundary chain does not close: {0}")]
    OpenChain(String),
    #[error("boundary crosses itself between edges {0} and {1}")]
    SelfIntersection(usize, usize),
    #[error("vertex {vertex} has angle {found}*pi, expected {expected}*pi")]
    AngleMismatch {
        vertex: usize,
        expected: AnglePi,
        found: String,
    },
    #[error("side {side} has squared length {found}, expected {expected}")]
    LengthMismatch {
        side: usize,
        expected: String,
        found: String,
    },
    #[error("invalid angle `{0}`")]
    InvalidAngle(String),
    #[error("no exact realization is known for angles {0}")]
    NoRealization(String),
    #[error("{0}")]
    Field(#[from] FieldError),
}

impl PolygonError {
    pub fn code(&self) -> &'static str {
        match self {
            PolygonError::AngleSumMismatch { .. } => "AngleSumMismatch",
            PolygonError::OpenChain(_) => "OpenChain",
            PolygonError::SelfIntersection(..) => "SelfIntersection",
            PolygonError::AngleMismatch { .. } => "AngleMismatch",
            PolygonError::LengthMismatch { .. } => "LengthMismatch",
            PolygonError::InvalidAngle(_) => "InvalidAngle",
            PolygonError::NoRealization(_) => "NoRealization",
            PolygonError::Field(e) => e.code(),
        }
    }
}

/// Symmetric bilinear form `[[xx, xy], [xy, yy]]` used to measure angles and
/// lengths of a polygon drawn in an affine frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gram {
    pub xx: QuadElem,
    pub xy: QuadElem,
    pub yy: QuadElem,
}

impl Gram {
    pub fn euclidean() -> Self {
        Gram {
            xx: QuadElem::one(),
            xy: QuadElem::zero(),
            yy: QuadElem::one(),
        }
    }

    pub fn diagonal(xx: QuadElem, yy: QuadElem) -> Self {
        Gram {
            xx,
            xy: QuadElem::zero(),
            yy,
        }
    }

    pub fn inner(&self, u: &PlanarVec, v: &PlanarVec) -> QuadElem {
        &self.xx * &u.x * &v.x + &self.xy * (&u.x * &v.y + &u.y * &v.x) + &self.yy * &u.y * &v.y
    }

    /// Reflection in the line spanned by `v`, as a row-major 2x2 matrix.
    pub fn reflection(&self, v: &PlanarVec) -> Mat2 {
        let e1 = PlanarVec::from_ints(1, 0);
        let e2 = PlanarVec::from_ints(0, 1);
        let vv = self.inner(v, v);
        let two = QuadElem::from_int(2);
        let image = |e: &PlanarVec| -> PlanarVec {
            let k = &two * self.inner(e, v) / &vv;
            &v.scale(&k) - e
        };
        let c1 = image(&e1);
        let c2 = image(&e2);
        Mat2([c1.x, c2.x, c1.y, c2.y])
    }
}

/// Row-major 2x2 matrix over a quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2(pub [QuadElem; 4]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([
            QuadElem::one(),
            QuadElem::zero(),
            QuadElem::zero(),
            QuadElem::one(),
        ])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        Mat2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn apply(&self, v: &PlanarVec) -> PlanarVec {
        let [a, b, c, d] = &self.0;
        PlanarVec::new(a * &v.x + b * &v.y, c * &v.x + d * &v.y)
    }

    pub fn det(&self) -> QuadElem {
        let [a, b, c, d] = &self.0;
        a * d - b * c
    }

    /// `None` when singular.
    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let [a, b, c, d] = &self.0;
        let k = det.inverse();
        Some(Mat2([d * &k, -(b * &k), -(c * &k), a * &k]))
    }
}

/// A billiard table: angles in units of `pi`, optional side lengths, optional
/// vertex coordinates (counterclockwise) and optional Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonSpec {
    pub angles: Vec<AnglePi>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_lengths: Option<Vec<QuadElem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<PlanarVec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Gram>,
}

impl PolygonSpec {
    pub fn from_angles(angles: Vec<AnglePi>) -> Self {
        PolygonSpec {
            angles,
            side_lengths: None,
            vertices: None,
            metric: None,
        }
    }

    pub fn k(&self) -> usize {
        self.angles.len()
    }

    pub fn gram(&self) -> Gram {
        self.metric.clone().unwrap_or_else(Gram::euclidean)
    }

    /// Angles as a sorted multiset, the key used for permutation-invariant lookups.
    pub fn sorted_angles(&self) -> Vec<AnglePi> {
        let mut v = self.angles.clone();
        v.sort();
        v
    }
}

/// d = lcm of the angle denominators.
pub fn angle_lcm(angles: &[AnglePi]) -> u64 {
    angles.iter().fold(1u64, |acc, a| acc.lcm(&a.b))
}

/// Checks the angle sum, and when vertices are present, simplicity and the
/// exact angles and lengths they realize. Clockwise vertex lists are turned
/// around (together with the angle and length lists).
pub fn validate_polygon(spec: &PolygonSpec) -> Result<PolygonSpec, PolygonError> {
    let k = spec.angles.len();
    if k < 3 {
        return Err(PolygonError::OpenChain(format!("{k} vertices")));
    }
    let found: Rational = spec.angles.iter().map(|a| a.value()).sum();
    let expected = Rational::from_integer((k as i64 - 2).into());
    if found != expected {
        return Err(PolygonError::AngleSumMismatch { k, expected, found });
    }
    let mut out = spec.clone();
    if let Some(lengths) = &spec.side_lengths {
        if lengths.len() != k {
            return Err(PolygonError::OpenChain(format!(
                "{} side lengths for {k} vertices",
                lengths.len()
            )));
        }
        if let Some(i) = lengths.iter().position(|l| !l.is_positive()) {
            return Err(PolygonError::OpenChain(format!("side {i} is not positive")));
        }
    }
    let Some(verts) = &spec.vertices else {
        return Ok(out);
    };
    if verts.len() != k {
        return Err(PolygonError::OpenChain(format!(
            "{} vertices for {k} angles",
            verts.len()
        )));
    }
    for i in 0..k {
        verts[i].disc()?;
        verts[i].x.common_disc(&verts[0].x)?;
        if verts[i] == verts[(i + 1) % k] {
            return Err(PolygonError::OpenChain(format!("side {i} has zero length")));
        }
    }
    if signed_area2(verts).is_negative() {
        let mut v = verts.clone();
        v.reverse();
        // vertex i of the reversed list was vertex k-1-i; side i was side k-2-i.
        out.angles.reverse();
        if let Some(l) = &mut out.side_lengths {
            l.reverse();
            l.rotate_left(1);
        }
        out.vertices = Some(v);
    }
    let verts = out.vertices.clone().unwrap();
    check_simple(&verts)?;
    let gram = out.gram();
    for (i, claimed) in out.angles.iter().enumerate() {
        let prev = &verts[(i + k - 1) % k];
        let next = &verts[(i + 1) % k];
        let found = vertex_angle(prev, &verts[i], next, &gram);
        if found.as_ref() != Some(claimed) {
            return Err(PolygonError::AngleMismatch {
                vertex: i,
                expected: *claimed,
                found: found.map_or_else(|| "irrational".to_string(), |a| a.to_string()),
            });
        }
    }
    if let Some(lengths) = &out.side_lengths {
        for i in 0..k {
            let e = &verts[(i + 1) % k] - &verts[i];
            let sq = gram.inner(&e, &e);
            let want = lengths[i].square();
            if sq != want {
                return Err(PolygonError::LengthMismatch {
                    side: i,
                    expected: want.to_string(),
                    found: sq.to_string(),
                });
            }
        }
    }
    Ok(out)
}

/// Twice the signed coordinate area (positive for counterclockwise order).
pub fn signed_area2(verts: &[PlanarVec]) -> QuadElem {
    let k = verts.len();
    let mut acc = QuadElem::zero();
    for i in 0..k {
        acc += &verts[i].cross(&verts[(i + 1) % k]);
    }
    acc
}

pub fn check_simple(verts: &[PlanarVec]) -> Result<(), PolygonError> {
    let k = verts.len();
    for i in 0..k {
        let a = (&verts[i], &verts[(i + 1) % k]);
        for j in i + 1..k {
            let b = (&verts[j], &verts[(j + 1) % k]);
            let adjacent = j == i + 1 || (i == 0 && j == k - 1);
            let hit = if adjacent {
                // Adjacent sides share one endpoint; they must not fold back.
                let (shared, p, q) = if j == i + 1 {
                    (a.1, a.0, b.1)
                } else {
                    (a.0, a.1, b.0)
                };
                let u = p - shared;
                let w = q - shared;
                u.cross(&w).is_zero() && u.dot(&w).is_positive()
            } else {
                segments_touch(a.0, a.1, b.0, b.1)
            };
            if hit {
                return Err(PolygonError::SelfIntersection(i, j));
            }
        }
    }
    Ok(())
}

/// Whether closed segments `pq` and `rs` share a point.
pub fn segments_touch(p: &PlanarVec, q: &PlanarVec, r: &PlanarVec, s: &PlanarVec) -> bool {
    let o1 = orient(p, q, r);
    let o2 = orient(p, q, s);
    let o3 = orient(r, s, p);
    let o4 = orient(r, s, q);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(p, q, r))
        || (o2 == 0 && on_segment(p, q, s))
        || (o3 == 0 && on_segment(r, s, p))
        || (o4 == 0 && on_segment(r, s, q))
}

pub fn orient(a: &PlanarVec, b: &PlanarVec, c: &PlanarVec) -> i8 {
    (b - a).cross(&(c - a)).signum()
}

/// For `c` collinear with `ab`: whether it lies on the closed segment.
pub fn on_segment(a: &PlanarVec, b: &PlanarVec, c: &PlanarVec) -> bool {
    let ab = b - a;
    let ac = c - a;
    let t = ab.dot(&ac);
    !t.is_negative() && t.cmp_same_field(&ab.dot(&ab)) != Ordering::Greater
}

/// Largest rotation order tried when identifying an angle.
const MAX_ANGLE_DENOM: u64 = 240;

/// Identifies the interior angle at `cur` (counterclockwise polygon) as a
/// rational multiple of `pi`, or `None` when it is not one with a small
/// denominator.
///
/// The composition of the reflections in the two sides is a rotation by twice
/// the angle. Its order `N` fixes the denominator, and the position of the
/// first power among all `N` powers, sorted by angle, fixes the numerator.
pub fn vertex_angle(prev: &PlanarVec, cur: &PlanarVec, next: &PlanarVec, gram: &Gram) -> Option<AnglePi> {
    let out = next - cur;
    let inc = prev - cur;
    let turn = out.cross(&inc).signum();
    if turn == 0 {
        return (out.dot(&inc).is_negative()).then(|| AnglePi::new(1, 1));
    }
    let rot = gram.reflection(&inc).mul(&gram.reflection(&out));
    let w = out.clone();
    let mut orbit = vec![w.clone()];
    let mut cur_v = rot.apply(&w);
    let mut n = 1u64;
    while cur_v != w {
        if n >= MAX_ANGLE_DENOM {
            return None;
        }
        orbit.push(cur_v.clone());
        cur_v = rot.apply(&cur_v);
        n += 1;
    }
    let first = orbit.get(1).cloned().unwrap_or_else(|| w.clone());
    let mut sorted = orbit.clone();
    sorted.sort_by(|a, b| PlanarVec::ccw_cmp(&w, a, b));
    let m = sorted.iter().position(|v| *v == first).unwrap_or(0) as u64;
    let numer = if turn > 0 { m } else { n + m };
    if numer == 0 {
        return None;
    }
    Some(AnglePi::new(numer, n))
}
