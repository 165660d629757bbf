use std::collections::HashMap;

use super::{SurfaceError, SurfacePoint, TranslationSurface};
use crate::exactnum::PlanarVec;
use crate::polygon::{realize, validate_polygon, Mat2, PolygonSpec};

const MAX_COPIES: usize = 2000;

fn vertices_of(spec: &PolygonSpec) -> Result<(Vec<PlanarVec>, PolygonSpec), SurfaceError> {
    let spec = match &spec.vertices {
        Some(_) => validate_polygon(spec)?,
        None => realize(&spec.angles, None)?,
    };
    Ok((spec.vertices.clone().expect("realized"), spec))
}

/// Glues one copy of the table per element of the group generated by the side
/// reflections. Copies with orientation-reversing linear part are listed with
/// reversed vertex order so that every polygon is counterclockwise.
///
/// When the table carries a metric the copies are drawn in its affine frame.
pub fn build_unfolding(spec: &PolygonSpec) -> Result<TranslationSurface, SurfaceError> {
    Ok(unfold_with_group(spec)?.0)
}

/// The unfolding together with the linear part of each copy, in polygon order.
/// Polygon `i` is the image of the table under `group[i]`.
pub fn unfolding_copies(spec: &PolygonSpec) -> Result<(TranslationSurface, Vec<Mat2>), SurfaceError> {
    unfold_with_group(spec)
}

fn unfold_with_group(spec: &PolygonSpec) -> Result<(TranslationSurface, Vec<Mat2>), SurfaceError> {
    let (verts, spec) = vertices_of(spec)?;
    let k = verts.len();
    let gram = spec.gram();
    let refl: Vec<Mat2> = (0..k)
        .map(|i| gram.reflection(&(&verts[(i + 1) % k] - &verts[i])))
        .collect();

    let mut group = vec![Mat2::identity()];
    let mut idx: HashMap<Mat2, usize> = HashMap::from([(Mat2::identity(), 0)]);
    let mut head = 0;
    while head < group.len() {
        let g = group[head].clone();
        head += 1;
        for r in &refl {
            let h = g.mul(r);
            if !idx.contains_key(&h) {
                if group.len() >= MAX_COPIES {
                    return Err(SurfaceError::InvalidGluing(
                        "reflection group is too large to unfold".into(),
                    ));
                }
                idx.insert(h.clone(), group.len());
                group.push(h);
            }
        }
    }

    let reversed: Vec<bool> = group.iter().map(|g| g.det().is_negative()).collect();
    let polygons = group
        .iter()
        .zip(&reversed)
        .map(|(g, &rev)| {
            (0..k)
                .map(|j| g.apply(&verts[if rev { (k - j) % k } else { j }]))
                .collect()
        })
        .collect();
    let edge = |gi: usize, i: usize| if reversed[gi] { k - 1 - i } else { i };
    let mut gluings = Vec::new();
    for (gi, g) in group.iter().enumerate() {
        for (i, r) in refl.iter().enumerate() {
            let hi = idx[&g.mul(r)];
            if gi < hi {
                gluings.push(((gi, edge(gi, i)), (hi, edge(hi, i))));
            }
        }
    }
    Ok((TranslationSurface::new(polygons, gluings)?, group))
}

/// Vertex `i` of the table, seen in the identity copy of its unfolding.
pub fn unfolding_vertex(spec: &PolygonSpec, i: usize) -> Result<SurfacePoint, SurfaceError> {
    let (verts, _) = vertices_of(spec)?;
    let v = verts
        .get(i)
        .ok_or_else(|| SurfaceError::InvalidPoint(format!("table has no vertex {i}")))?;
    Ok(SurfacePoint::new(0, v.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::parse_angles;
    use crate::unfolding::unfolding_genus;

    fn unfold(s: &str) -> TranslationSurface {
        build_unfolding(&PolygonSpec::from_angles(parse_angles(s).unwrap())).unwrap()
    }

    #[test]
    fn eighth_triangle_is_h2() {
        let s = unfold("1/8,3/8,1/2");
        assert_eq!(s.polygons.len(), 16);
        let ca = s.cone_analysis();
        assert_eq!(ca.genus, 2);
        assert_eq!(ca.stratum.to_string(), "H(2)");
    }

    #[test]
    fn copies_map_back_to_table() {
        let spec = PolygonSpec::from_angles(parse_angles("1/8,3/8,1/2").unwrap());
        let (s, group) = unfolding_copies(&spec).unwrap();
        let (verts, _) = vertices_of(&spec).unwrap();
        for (poly, g) in s.polygons.iter().zip(&group) {
            let back: Vec<_> = poly.iter().map(|v| g.inverse().unwrap().apply(v)).collect();
            assert!(verts.iter().all(|v| back.contains(v)));
        }
    }

    #[test]
    fn square_unfolds_to_torus() {
        let s = unfold("1/2,1/2,1/2,1/2");
        assert_eq!(s.polygons.len(), 4);
        assert_eq!(s.cone_analysis().genus, 1);
    }

    #[test]
    fn genus_matches_formula() {
        for a in [
            "1/5,1/5,3/5",
            "1/3,2/3,1/2,1/2",
            "1/4,1/4,3/4,3/4",
            "2/5,2/5,1/5",
            "1/6,1/6,2/3",
        ] {
            let spec = PolygonSpec::from_angles(parse_angles(a).unwrap());
            let s = build_unfolding(&spec).unwrap();
            assert_eq!(s.cone_analysis().genus, unfolding_genus(&spec).unwrap(), "{a}");
        }
    }
}
