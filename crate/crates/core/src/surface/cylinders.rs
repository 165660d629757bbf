use std::cmp::Ordering;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::mesh::{Mesh, Tri};
use super::{SurfaceError, TranslationSurface};
use crate::exactnum::{PlanarVec, QuadElem};

/// Leaf crossings allowed before a direction is declared not periodic.
const LEVEL_BUDGET: usize = 20_000;

/// A maximal cylinder in a given direction. Lengths are Euclidean in the
/// surface coordinates when `|direction|` lies in the coordinate field;
/// otherwise `normalized` is set and lengths are measured in units of
/// `|direction|`. The modulus does not depend on the unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cylinder {
    pub direction: PlanarVec,
    pub circumference: QuadElem,
    pub height: QuadElem,
    pub modulus: QuadElem,
    /// Saddle connection lengths along the bottom and the top boundary.
    pub boundary_saddle_lengths: [Vec<QuadElem>; 2],
    pub normalized: bool,
}

impl Cylinder {
    pub fn area(&self) -> QuadElem {
        &self.height * &self.circumference
    }
}

/// Whether `c1` is a rescaled copy of `c2`, boundary sequences compared up to
/// cyclic rotation and either boundary order.
pub fn cylinders_similar(c1: &Cylinder, c2: &Cylinder) -> bool {
    if c1.height.disc() != 0 && c2.height.disc() != 0 && c1.height.disc() != c2.height.disc() {
        return false;
    }
    let lambda = &c1.circumference / &c2.circumference;
    if c1.height != &c2.height * &lambda {
        return false;
    }
    let scaled = |v: &Vec<QuadElem>| v.iter().map(|x| x * &lambda).collect::<Vec<_>>();
    let b2 = [
        scaled(&c2.boundary_saddle_lengths[0]),
        scaled(&c2.boundary_saddle_lengths[1]),
    ];
    let b1 = &c1.boundary_saddle_lengths;
    (cyclic_eq(&b1[0], &b2[0]) && cyclic_eq(&b1[1], &b2[1]))
        || (cyclic_eq(&b1[0], &b2[1]) && cyclic_eq(&b1[1], &b2[0]))
}

fn cyclic_eq(a: &[QuadElem], b: &[QuadElem]) -> bool {
    a.len() == b.len()
        && (a.is_empty() || (0..a.len()).any(|r| (0..a.len()).all(|i| a[(i + r) % a.len()] == b[i])))
}

fn x_at(u: &PlanarVec, w: &PlanarVec, h: &QuadElem) -> QuadElem {
    if u.y == w.y {
        return u.x.clone();
    }
    &u.x + (h - &u.y) * (&w.x - &u.x) / (&w.y - &u.y)
}

fn cmp(a: &QuadElem, b: &QuadElem) -> Ordering {
    a.cmp_same_field(b)
}

/// Strip of triangle `t` between its `k`-th and `k+1`-th critical heights.
struct Strip {
    t: usize,
    k: usize,
    left: usize,
    right: usize,
}

struct Work<'a> {
    tris: &'a [Tri],
    heights: Vec<Vec<QuadElem>>,
}

impl Work<'_> {
    fn span(&self, t: usize) -> (QuadElem, QuadElem) {
        let h = &self.heights[t];
        (h[0].clone(), h[h.len() - 1].clone())
    }

    fn edges_at(&self, s: &Strip, h: &QuadElem) -> (QuadElem, QuadElem) {
        let tri = &self.tris[s.t];
        (
            x_at(tri.at(s.left), tri.at(s.left + 1), h),
            x_at(tri.at(s.right), tri.at(s.right + 1), h),
        )
    }
}

/// Decomposes the surface into cylinders in direction `dir`.
///
/// The surface is mapped by a rotation-dilation taking `dir` to `(1, 0)`,
/// triangulated, and every horizontal leaf through a vertex is followed across
/// triangles until it returns to a vertex. Between consecutive leaves each
/// triangle is cut into strips; strips chained left to right form bands, and
/// bands stacked across leaves free of cone points form one cylinder.
///
/// On a torus, where no vertex is singular, one vertex is treated as marked.
pub fn cylinder_decomposition(
    s: &TranslationSurface,
    dir: &PlanarVec,
) -> Result<Vec<Cylinder>, SurfaceError> {
    if dir.is_zero() {
        return Err(SurfaceError::InvalidPoint("direction is zero".into()));
    }
    let mut mesh = Mesh::build(s)?;
    let n2 = dir.norm_sq();
    let rot = |p: &PlanarVec| {
        PlanarVec::new(
            (&dir.x * &p.x + &dir.y * &p.y) / &n2,
            (&dir.x * &p.y - &dir.y * &p.x) / &n2,
        )
    };
    for tri in &mut mesh.tris {
        for v in &mut tri.v {
            *v = rot(v);
        }
    }
    let any_singular = (0..mesh.vertices.len()).any(|v| mesh.is_singular(v));
    let singular = |v: usize| if any_singular { mesh.is_singular(v) } else { v == 0 };
    let tris = &mesh.tris;
    let nt = tris.len();

    // Close the set of critical heights under leaf continuation.
    let mut heights: Vec<Vec<QuadElem>> = tris
        .iter()
        .map(|t| {
            let mut h: Vec<QuadElem> = t.v.iter().map(|p| p.y.clone()).collect();
            h.sort_by(cmp);
            h.dedup();
            h
        })
        .collect();
    let mut work: Vec<(usize, QuadElem)> = (0..nt)
        .flat_map(|t| heights[t].clone().into_iter().map(move |h| (t, h)))
        .collect();
    let mut total = work.len();
    while let Some((t, h)) = work.pop() {
        let tri = &tris[t];
        for i in 0..3 {
            let (u, w) = (tri.at(i), tri.at(i + 1));
            if (&u.y - &h).signum() * (&w.y - &h).signum() >= 0 {
                continue;
            }
            let (n, _) = tri.nb[i];
            let hn = &h + &mesh.offset(t, i).y;
            let set = &mut heights[n];
            if let Err(pos) = set.binary_search_by(|x| cmp(x, &hn)) {
                set.insert(pos, hn.clone());
                total += 1;
                if total > LEVEL_BUDGET {
                    return Err(SurfaceError::NotPeriodic(format!(
                        "leaves through vertices did not close after {LEVEL_BUDGET} crossings; \
                         open leaf at height {hn} in triangle {n}"
                    )));
                }
                work.push((n, hn));
            }
        }
    }

    // Strips, indexed by (triangle, band index).
    let mut base = vec![0usize; nt + 1];
    for t in 0..nt {
        base[t + 1] = base[t] + heights[t].len() - 1;
    }
    let mut strips = Vec::with_capacity(base[nt]);
    for t in 0..nt {
        let hs = &heights[t];
        for k in 0..hs.len() - 1 {
            let mid = (&hs[k] + &hs[k + 1]) / QuadElem::from_int(2);
            let tri = &tris[t];
            let crossing: Vec<(usize, QuadElem)> = (0..3)
                .filter(|&i| (&tri.at(i).y - &mid).signum() * (&tri.at(i + 1).y - &mid).signum() < 0)
                .map(|i| (i, x_at(tri.at(i), tri.at(i + 1), &mid)))
                .collect();
            let (a, b) = (&crossing[0], &crossing[1]);
            let (left, right) = if cmp(&a.1, &b.1) == Ordering::Less {
                (a.0, b.0)
            } else {
                (b.0, a.0)
            };
            strips.push(Strip { t, k, left, right });
        }
    }
    let w = Work { tris, heights };
    let strip_at = |t: usize, h: &QuadElem| -> usize {
        let k = w.heights[t]
            .binary_search_by(|x| cmp(x, h))
            .expect("critical heights are closed under continuation");
        base[t] + k
    };
    let right_of: Vec<usize> = strips
        .iter()
        .map(|s| {
            let (n, _) = tris[s.t].nb[s.right];
            strip_at(n, &(&w.heights[s.t][s.k] + &mesh.offset(s.t, s.right).y))
        })
        .collect();

    // Bands: cycles of the right-neighbour permutation, in left-to-right order.
    let mut band_of = vec![usize::MAX; strips.len()];
    let mut bands: Vec<Vec<usize>> = Vec::new();
    for i in 0..strips.len() {
        if band_of[i] != usize::MAX {
            continue;
        }
        let mut cyc = Vec::new();
        let mut j = i;
        while band_of[j] == usize::MAX {
            band_of[j] = bands.len();
            cyc.push(j);
            j = right_of[j];
        }
        bands.push(cyc);
    }
    // Singular vertices lying on a band's bottom (0) or top (1) leaf.
    let boundary_marks = |b: usize, side: usize| -> Vec<QuadElem> {
        let mut pos = QuadElem::zero();
        let mut marks: Vec<QuadElem> = Vec::new();
        for &si in &bands[b] {
            let st = &strips[si];
            let h = &w.heights[st.t][st.k + side];
            let (xl, xr) = w.edges_at(st, h);
            for j in 0..3 {
                let p = tris[st.t].at(j);
                if p.y == *h && singular(mesh.vid[st.t][j]) {
                    let m = &pos + &(&p.x - &xl);
                    if !marks.contains(&m) {
                        marks.push(m);
                    }
                }
            }
            pos = pos + (xr - xl);
        }
        if let Some(i) = marks.iter().position(|m| *m == pos) {
            if marks.iter().any(QuadElem::is_zero) {
                marks.remove(i);
            } else {
                marks[i] = QuadElem::zero();
            }
        }
        marks.sort_by(cmp);
        let mut out: Vec<QuadElem> = marks.windows(2).map(|p| &p[1] - &p[0]).collect();
        if let (Some(f), Some(l)) = (marks.first(), marks.last()) {
            out.push(&pos - l + f);
        }
        out
    };
    let band_width = |b: usize| -> QuadElem {
        bands[b].iter().fold(QuadElem::zero(), |acc, &si| {
            let st = &strips[si];
            let (xl, xr) = w.edges_at(st, &w.heights[st.t][st.k]);
            acc + (xr - xl)
        })
    };
    let band_height = |b: usize| -> QuadElem {
        let st = &strips[bands[b][0]];
        &w.heights[st.t][st.k + 1] - &w.heights[st.t][st.k]
    };

    let mut uf = UnionFind::<usize>::new(bands.len());
    for b in 0..bands.len() {
        if !boundary_marks(b, 1).is_empty() {
            continue;
        }
        for &si in &bands[b] {
            let st = &strips[si];
            if st.k + 2 < w.heights[st.t].len() {
                uf.union(b, band_of[si + 1]);
                continue;
            }
            let (_, top) = w.span(st.t);
            let tri = &tris[st.t];
            if let Some(i) = (0..3).find(|&i| tri.at(i).y == top && tri.at(i + 1).y == top) {
                let (n, _) = tri.nb[i];
                uf.union(b, band_of[base[n]]);
            }
        }
    }

    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for b in 0..bands.len() {
        let r = uf.find(b);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(b),
            None => groups.push((r, vec![b])),
        }
    }
    let field = s.disc()?.max(dir.disc()?);
    let scale = n2
        .sqrt_exact()
        .filter(|r| r.disc() == 0 || field == 0 || r.disc() == field);
    let unit = scale.clone().unwrap_or_else(QuadElem::one);
    let mut out = Vec::new();
    for (_, members) in groups {
        let bottom = members
            .iter()
            .copied()
            .find(|&b| !boundary_marks(b, 0).is_empty())
            .ok_or_else(|| SurfaceError::NotPeriodic("cylinder without a lower boundary".into()))?;
        let top = members
            .iter()
            .copied()
            .find(|&b| !boundary_marks(b, 1).is_empty())
            .ok_or_else(|| SurfaceError::NotPeriodic("cylinder without an upper boundary".into()))?;
        let circ = band_width(bottom);
        let height = members.iter().fold(QuadElem::zero(), |a, &b| a + band_height(b));
        let modulus = &height / &circ;
        let lengths = |b: usize, side: usize| -> Vec<QuadElem> {
            boundary_marks(b, side).iter().map(|x| x * &unit).collect()
        };
        out.push(Cylinder {
            direction: dir.clone(),
            circumference: &circ * &unit,
            height: &height * &unit,
            modulus,
            boundary_saddle_lengths: [lengths(bottom, 0), lengths(top, 1)],
            normalized: scale.is_none(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::tests::{square_torus, v};

    #[test]
    fn torus_diagonal() {
        let c = cylinder_decomposition(&square_torus(), &PlanarVec::from_ints(1, 1)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].circumference, QuadElem::sqrt(2));
        assert_eq!(c[0].height, QuadElem::sqrt(2) / QuadElem::from_int(2));
        assert_eq!(c[0].modulus, QuadElem::from_frac(1, 2));
        assert_eq!(c[0].boundary_saddle_lengths[0], vec![QuadElem::sqrt(2)]);
    }

    #[test]
    fn torus_slopes() {
        for (a, b) in [(1, 0), (0, 1), (2, 1), (3, -2)] {
            let c = cylinder_decomposition(&square_torus(), &PlanarVec::from_ints(a, b)).unwrap();
            assert_eq!(c.len(), 1);
            assert_eq!(c[0].area(), QuadElem::one());
        }
    }

    #[test]
    fn irrational_slope_is_not_periodic() {
        let d = v("1", "sqrt2");
        assert!(matches!(
            cylinder_decomposition(&square_torus(), &d),
            Err(SurfaceError::NotPeriodic(_))
        ));
    }

    #[test]
    fn similarity() {
        let q = QuadElem::from_int;
        let mk = |h, c, b0: Vec<i64>, b1: Vec<i64>| Cylinder {
            direction: PlanarVec::from_ints(1, 0),
            circumference: q(c),
            height: q(h),
            modulus: q(h) / q(c),
            boundary_saddle_lengths: [b0.into_iter().map(q).collect(), b1.into_iter().map(q).collect()],
            normalized: false,
        };
        let a = mk(1, 2, vec![1, 1], vec![2]);
        let b = mk(2, 4, vec![2, 2], vec![4]);
        assert!(cylinders_similar(&a, &a));
        assert!(cylinders_similar(&a, &b));
        assert!(!cylinders_similar(&a, &mk(1, 3, vec![3], vec![3])));
    }
}
