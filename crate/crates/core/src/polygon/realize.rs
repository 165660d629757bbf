//! Exact coordinates for the tables this crate works with.
//!
//! When `tan` of the relevant angles lies in a real quadratic field the table
//! is drawn with Euclidean coordinates. Otherwise (the `pi/5` family) it is
//! drawn in an affine frame with Gram matrix `diag(1, tan^2)`, which only
//! needs `tan^2` to be exact.

use super::{validate_polygon, AnglePi, Gram, PolygonError, PolygonSpec};
use crate::exactnum::{PlanarVec, QuadElem};

fn q(s: &str) -> QuadElem {
    s.parse().expect("table constant")
}

/// `tan^2` of an acute angle, when it lies in a real quadratic field.
pub fn tan_squared(angle: AnglePi) -> Option<QuadElem> {
    if let Some(t) = tan_in_field(angle) {
        return Some(t.square());
    }
    let s = match (angle.a, angle.b) {
        (1, 5) => "5-2*sqrt(5)",
        (2, 5) => "5+2*sqrt(5)",
        (1, 10) => "1-2/5*sqrt(5)",
        (3, 10) => "1+2/5*sqrt(5)",
        _ => return None,
    };
    Some(q(s))
}

/// `tan` of an acute angle, when it lies in a real quadratic field.
pub fn tan_in_field(angle: AnglePi) -> Option<QuadElem> {
    let s = match (angle.a, angle.b) {
        (1, 3) => "sqrt(3)",
        (1, 4) => "1",
        (1, 6) => "1/3*sqrt(3)",
        (1, 8) => "-1+sqrt(2)",
        (3, 8) => "1+sqrt(2)",
        (1, 12) => "2-sqrt(3)",
        (5, 12) => "2+sqrt(3)",
        _ => return None,
    };
    Some(q(s))
}

/// A drawing of one shape: vertices in counterclockwise order, their angles,
/// and the metric of the frame.
struct Drawing {
    angles: Vec<AnglePi>,
    verts: Vec<PlanarVec>,
    gram: Gram,
}

fn pt(x: &QuadElem, y: &QuadElem) -> PlanarVec {
    PlanarVec::new(x.clone(), y.clone())
}

/// Frame for a shape whose slanted sides make angle `alpha` with the x-axis:
/// returns `(slope, gram)` where a rise of `slope * run` realizes `alpha`.
fn slope_frame(alpha: AnglePi) -> Option<(QuadElem, Gram)> {
    if let Some(t) = tan_in_field(alpha) {
        return Some((t, Gram::euclidean()));
    }
    let t2 = tan_squared(alpha)?;
    Some((QuadElem::one(), Gram::diagonal(QuadElem::one(), t2)))
}

/// Default irrational second parameter for shapes with two lengths.
fn generic_partner(slope: &QuadElem, gram: &Gram) -> QuadElem {
    let d = slope.disc().max(gram.yy.disc());
    QuadElem::sqrt(if d == 0 { 2 } else { d })
}

fn params<const N: usize>(
    given: Option<&[QuadElem]>,
    defaults: [QuadElem; N],
) -> Result<[QuadElem; N], PolygonError> {
    match given {
        None => Ok(defaults),
        Some(p) if p.len() == N && p.iter().all(QuadElem::is_positive) => {
            Ok(std::array::from_fn(|i| p[i].clone()))
        }
        Some(p) => Err(PolygonError::OpenChain(format!(
            "expected {N} positive shape parameters, got {}",
            p.len()
        ))),
    }
}

fn draw(sorted: &[AnglePi], given: Option<&[QuadElem]>) -> Result<Drawing, PolygonError> {
    let half = AnglePi::new(1, 2);
    let none = || PolygonError::NoRealization(join(sorted));
    let zero = QuadElem::zero();
    match sorted.len() {
        3 => {
            let [scale] = params(given, [QuadElem::one()])?;
            let (alpha, beta, gamma) = (sorted[0], sorted[1], sorted[2]);
            let mut d = if gamma == half {
                // Right triangle; the leg opposite alpha has length one.
                let (slope, gram) = slope_frame(alpha).ok_or_else(none)?;
                let run = QuadElem::one() / &slope;
                let one = QuadElem::one();
                Drawing {
                    angles: vec![alpha, half, beta],
                    verts: vec![pt(&zero, &zero), pt(&run, &zero), pt(&run, &one)],
                    gram,
                }
            } else if alpha == beta {
                let (slope, gram) = slope_frame(alpha).ok_or_else(none)?;
                let one = QuadElem::one();
                let two = QuadElem::from_int(2);
                Drawing {
                    angles: vec![alpha, alpha, gamma],
                    verts: vec![pt(&zero, &zero), pt(&two, &zero), pt(&one, &slope)],
                    gram,
                }
            } else if beta == gamma {
                let (slope, gram) = slope_frame(beta).ok_or_else(none)?;
                let one = QuadElem::one();
                let two = QuadElem::from_int(2);
                Drawing {
                    angles: vec![beta, beta, alpha],
                    verts: vec![pt(&zero, &zero), pt(&two, &zero), pt(&one, &slope)],
                    gram,
                }
            } else {
                let ta = tan_in_field(alpha).ok_or_else(none)?;
                let tb = tan_in_field(beta).ok_or_else(none)?;
                let sum = ta.try_add(&tb)?;
                let x = tb.try_div(&sum)?;
                let y = &x * &ta;
                Drawing {
                    angles: vec![alpha, beta, gamma],
                    verts: vec![pt(&zero, &zero), pt(&QuadElem::one(), &zero), pt(&x, &y)],
                    gram: Gram::euclidean(),
                }
            };
            d.verts = d.verts.iter().map(|v| v.scale(&scale)).collect();
            Ok(d)
        }
        4 if sorted.iter().all(|a| *a == half) => {
            let [w, h] = params(given, [QuadElem::one(), QuadElem::one()])?;
            Ok(Drawing {
                angles: vec![half; 4],
                verts: vec![pt(&zero, &zero), pt(&w, &zero), pt(&w, &h), pt(&zero, &h)],
                gram: Gram::euclidean(),
            })
        }
        4 if sorted[2] == half && sorted[1] == half => {
            // Right trapezoid (1/n, 1/2, 1/2, (n-1)/n).
            let small = sorted[0];
            let (slope, gram) = slope_frame(small).ok_or_else(none)?;
            let [x1, x2] = params(given, [QuadElem::one(), generic_partner(&slope, &gram)])?;
            let h = &x1 * &slope;
            let r = &x1 + &x2;
            Ok(Drawing {
                angles: vec![small, half, half, sorted[3]],
                verts: vec![pt(&zero, &zero), pt(&r, &zero), pt(&r, &h), pt(&x1, &h)],
                gram,
            })
        }
        4 if sorted[0] == sorted[1] && sorted[2] == sorted[3] && sorted[0] < half => {
            // Isosceles trapezoid (alpha, alpha, pi - alpha, pi - alpha).
            let small = sorted[0];
            let (slope, gram) = slope_frame(small).ok_or_else(none)?;
            let [x1, x2] = params(given, [QuadElem::one(), generic_partner(&slope, &gram)])?;
            let h = &x1 * &slope;
            let bottom = &x1 + &x1 + &x2;
            let top_right = &x1 + &x2;
            Ok(Drawing {
                angles: vec![small, small, sorted[2], sorted[2]],
                verts: vec![
                    pt(&zero, &zero),
                    pt(&bottom, &zero),
                    pt(&top_right, &h),
                    pt(&x1, &h),
                ],
                gram,
            })
        }
        6 if sorted[..5].iter().all(|a| *a == half) && sorted[5] == AnglePi::new(3, 2) => {
            let s2 = QuadElem::sqrt(2);
            let one = QuadElem::one();
            let [x1, x2, y1, y2] = params(given, [one.clone(), s2.clone(), one, s2])?;
            let xr = &x1 + &x2;
            let yt = &y1 + &y2;
            Ok(Drawing {
                angles: vec![half, half, half, AnglePi::new(3, 2), half, half],
                verts: vec![
                    pt(&zero, &zero),
                    pt(&xr, &zero),
                    pt(&xr, &y1),
                    pt(&x1, &y1),
                    pt(&x1, &yt),
                    pt(&zero, &yt),
                ],
                gram: Gram::euclidean(),
            })
        }
        _ => Err(none()),
    }
}

fn join(angles: &[AnglePi]) -> String {
    angles
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Reorders a drawing so that its angles read `want` counterclockwise,
/// using a rotation of the vertex list or a mirror image.
fn fit(d: Drawing, want: &[AnglePi]) -> Option<(Vec<PlanarVec>, Gram)> {
    let k = want.len();
    for i in 0..k {
        if (0..k).all(|j| d.angles[(i + j) % k] == want[j]) {
            let verts = (0..k).map(|j| d.verts[(i + j) % k].clone()).collect();
            return Some((verts, d.gram));
        }
    }
    // Mirror x -> -x (an isometry of every diagonal frame) and read backwards.
    let mirrored: Vec<PlanarVec> = d
        .verts
        .iter()
        .rev()
        .map(|v| PlanarVec::new(-&v.x, v.y.clone()))
        .collect();
    let angles: Vec<AnglePi> = d.angles.iter().rev().copied().collect();
    for i in 0..k {
        if (0..k).all(|j| angles[(i + j) % k] == want[j]) {
            let verts = (0..k).map(|j| mirrored[(i + j) % k].clone()).collect();
            return Some((verts, d.gram));
        }
    }
    None
}

/// Exact vertices for a table with the given angles (in counterclockwise
/// order). `shape` optionally fixes the free lengths of the family:
/// a scale factor for triangles, `[w, h]` for rectangles, `[x1, x2]` for
/// trapezoids and `[x1, x2, y1, y2]` for the L-shaped hexagon.
pub fn realize(angles: &[AnglePi], shape: Option<&[QuadElem]>) -> Result<PolygonSpec, PolygonError> {
    validate_polygon(&PolygonSpec::from_angles(angles.to_vec()))?;
    let mut sorted = angles.to_vec();
    sorted.sort();
    let drawing = draw(&sorted, shape)?;
    let (verts, gram) = fit(drawing, angles).ok_or_else(|| PolygonError::NoRealization(join(angles)))?;
    let k = verts.len();
    let lengths: Option<Vec<QuadElem>> = (0..k)
        .map(|i| {
            let e = &verts[(i + 1) % k] - &verts[i];
            gram.inner(&e, &e).sqrt_exact()
        })
        .collect();
    let metric = (gram != Gram::euclidean()).then_some(gram);
    let spec = PolygonSpec {
        angles: angles.to_vec(),
        side_lengths: lengths.filter(|l| same_field(l)),
        vertices: Some(verts),
        metric,
    };
    validate_polygon(&spec)
}

fn same_field(v: &[QuadElem]) -> bool {
    v.iter().all(|x| v.iter().all(|y| x.common_disc(y).is_ok()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::parse_angles;

    fn real(s: &str) -> PolygonSpec {
        realize(&parse_angles(s).unwrap(), None).unwrap()
    }

    #[test]
    fn eighth_triangle_coordinates() {
        let p = real("1/8,1/2,3/8");
        let v = p.vertices.unwrap();
        assert_eq!(v[1], PlanarVec::new(q("1+sqrt(2)"), QuadElem::zero()));
        assert_eq!(v[2], PlanarVec::new(q("1+sqrt(2)"), QuadElem::one()));
        assert!(p.metric.is_none());
    }

    #[test]
    fn any_angle_order_is_honoured() {
        for s in ["1/8,3/8,1/2", "3/8,1/8,1/2", "1/2,3/8,1/8", "1/3,2/3,1/2,1/2"] {
            let p = real(s);
            assert_eq!(p.angles, parse_angles(s).unwrap());
        }
    }

    #[test]
    fn pentagon_family_uses_a_metric_frame() {
        for s in ["1/10,2/5,1/2", "1/5,3/10,1/2", "1/5,1/5,3/5", "2/5,2/5,1/5"] {
            let p = real(s);
            assert!(p.metric.is_some(), "{s}");
        }
    }

    #[test]
    fn table_rows_realize() {
        for s in [
            "1/2,1/2,1/2,3/2,1/2,1/2",
            "1/4,3/4,1/2,1/2",
            "1/3,2/3,1/2,1/2",
            "1/3,1/3,2/3,2/3",
            "1/8,3/8,1/2",
            "1/6,1/6,2/3",
            "1/4,1/3,5/12",
        ] {
            real(s);
        }
    }

    #[test]
    fn unknown_shapes_are_reported() {
        let a = parse_angles("1/7,2/7,4/7").unwrap();
        assert!(matches!(realize(&a, None), Err(PolygonError::NoRealization(_))));
    }

    #[test]
    fn shape_parameters_fix_lengths() {
        let a = parse_angles("1/2,1/2,1/2,3/2,1/2,1/2").unwrap();
        let shape = [1, 2, 1, 3].map(QuadElem::from_int);
        let p = realize(&a, Some(&shape)).unwrap();
        let l = p.side_lengths.unwrap();
        assert_eq!(
            l.iter().map(ToString::to_string).collect::<Vec<_>>(),
            ["3", "1", "2", "3", "1", "4"]
        );
    }
}
