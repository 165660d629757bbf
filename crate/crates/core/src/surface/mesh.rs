use std::collections::HashMap;

use super::{SurfaceError, SurfacePoint, TranslationSurface};
use crate::exactnum::PlanarVec;
use crate::polygon::{on_segment, orient};

/// A triangle in the coordinates of its source polygon. Edge `i` runs from
/// `v[i]` to `v[i + 1]` and is glued to edge `nb[i].1` of triangle `nb[i].0`.
#[derive(Clone, Debug)]
pub struct Tri {
    pub v: [PlanarVec; 3],
    pub poly: usize,
    pub nb: [(usize, usize); 3],
}

impl Tri {
    pub fn at(&self, i: usize) -> &PlanarVec {
        &self.v[i % 3]
    }
}

#[derive(Clone, Debug)]
pub struct MeshVertex {
    pub corners: Vec<(usize, usize)>,
    /// Cone angle in units of `2 pi`.
    pub turns: u64,
}

/// Triangulation of a translation surface, optionally refined so that given
/// points become vertices.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub tris: Vec<Tri>,
    pub vertices: Vec<MeshVertex>,
    /// Vertex index of each corner `(triangle, j)`.
    pub vid: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn build(s: &TranslationSurface) -> Result<Mesh, SurfaceError> {
        let mut tris = Vec::new();
        // Triangle edge sitting on polygon edge (p, e), and diagonals keyed by endpoints.
        let mut on_edge: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let mut diag: HashMap<(usize, usize, usize), (usize, usize)> = HashMap::new();
        for (p, poly) in s.polygons.iter().enumerate() {
            let n = poly.len();
            for [a, b, c] in ear_clip(poly).ok_or_else(|| {
                SurfaceError::InvalidGluing(format!("polygon {p} could not be triangulated"))
            })? {
                let t = tris.len();
                let idx = [a, b, c];
                for i in 0..3 {
                    let (u, w) = (idx[i], idx[(i + 1) % 3]);
                    if w == (u + 1) % n {
                        on_edge.insert((p, u), (t, i));
                    } else {
                        diag.insert((p, u, w), (t, i));
                    }
                }
                tris.push(Tri {
                    v: [poly[a].clone(), poly[b].clone(), poly[c].clone()],
                    poly: p,
                    nb: [(usize::MAX, 0); 3],
                });
            }
        }
        for (&(p, e), &(t, i)) in &on_edge {
            tris[t].nb[i] = on_edge[&s.partner((p, e))];
        }
        for (&(p, u, w), &(t, i)) in &diag {
            tris[t].nb[i] = diag[&(p, w, u)];
        }
        let mut m = Mesh {
            tris,
            vertices: Vec::new(),
            vid: Vec::new(),
        };
        m.compute_vertices();
        Ok(m)
    }

    /// Builds the mesh and makes each point a vertex.
    pub fn with_points(s: &TranslationSurface, pts: &[SurfacePoint]) -> Result<Mesh, SurfaceError> {
        let mut m = Mesh::build(s)?;
        for p in pts {
            s.locate(p)?;
            m.insert_point(p)?;
        }
        m.compute_vertices();
        Ok(m)
    }

    /// Translation taking coordinates of triangle `t` to those of its
    /// neighbour across edge `i`.
    pub fn offset(&self, t: usize, i: usize) -> PlanarVec {
        let (n, j) = self.tris[t].nb[i];
        self.tris[n].at(j + 1) - self.tris[t].at(i)
    }

    /// Vertex index of a point that is a vertex of the mesh.
    pub fn vertex_at(&self, pt: &SurfacePoint) -> Option<usize> {
        for (t, tri) in self.tris.iter().enumerate() {
            if tri.poly == pt.polygon {
                for j in 0..3 {
                    if tri.v[j] == pt.point {
                        return Some(self.vid[t][j]);
                    }
                }
            }
        }
        None
    }

    pub fn is_singular(&self, vid: usize) -> bool {
        self.vertices[vid].turns > 1
    }

    fn compute_vertices(&mut self) {
        let reference = PlanarVec::from_ints(1, 0);
        let mut vid = vec![[usize::MAX; 3]; self.tris.len()];
        let mut vertices = Vec::new();
        for t in 0..self.tris.len() {
            for j in 0..3 {
                if vid[t][j] != usize::MAX {
                    continue;
                }
                let id = vertices.len();
                let mut corners = Vec::new();
                let mut turns = 0;
                let mut cur = (t, j);
                while vid[cur.0][cur.1] == usize::MAX {
                    vid[cur.0][cur.1] = id;
                    corners.push(cur);
                    let tri = &self.tris[cur.0];
                    let c = tri.at(cur.1);
                    let out = tri.at(cur.1 + 1) - c;
                    let inn = tri.at(cur.1 + 2) - c;
                    if PlanarVec::in_ccw_arc(&reference, &out, &inn) {
                        turns += 1;
                    }
                    cur = tri.nb[(cur.1 + 2) % 3];
                }
                vertices.push(MeshVertex { corners, turns });
            }
        }
        self.vid = vid;
        self.vertices = vertices;
    }

    fn insert_point(&mut self, pt: &SurfacePoint) -> Result<(), SurfaceError> {
        let x = &pt.point;
        for t in 0..self.tris.len() {
            let tri = &self.tris[t];
            if tri.poly != pt.polygon {
                continue;
            }
            if tri.v.contains(x) {
                return Ok(());
            }
            let o: Vec<i8> = (0..3).map(|i| orient(tri.at(i), tri.at(i + 1), x)).collect();
            if o.iter().any(|&s| s < 0) {
                continue;
            }
            if let Some(i) = (0..3).find(|&i| o[i] == 0) {
                if on_segment(tri.at(i), tri.at(i + 1), x) {
                    if tri.nb[i].0 == t {
                        return Err(SurfaceError::InvalidGluing(format!(
                            "triangle {t} is glued to itself"
                        )));
                    }
                    self.split_edge(t, i, x.clone());
                    return Ok(());
                }
                continue;
            }
            self.split_interior(t, x.clone());
            return Ok(());
        }
        Err(SurfaceError::InvalidPoint(format!(
            "{} is not in polygon {}",
            x, pt.polygon
        )))
    }

    fn link(&mut self, a: (usize, usize), b: (usize, usize)) {
        self.tris[a.0].nb[a.1] = b;
        self.tris[b.0].nb[b.1] = a;
    }

    fn split_interior(&mut self, t: usize, x: PlanarVec) {
        let old = self.tris[t].clone();
        let [a, b, c] = old.v.clone();
        let t1 = self.tris.len();
        let t2 = t1 + 1;
        let mk = |v: [PlanarVec; 3]| Tri {
            v,
            poly: old.poly,
            nb: [(usize::MAX, 0); 3],
        };
        self.tris[t] = mk([a.clone(), b.clone(), x.clone()]);
        self.tris.push(mk([b, c.clone(), x.clone()]));
        self.tris.push(mk([c, a, x]));
        let new_of = |e: (usize, usize)| {
            if e.0 == t {
                [(t, 0), (t1, 0), (t2, 0)][e.1]
            } else {
                e
            }
        };
        self.link((t, 0), new_of(old.nb[0]));
        self.link((t1, 0), new_of(old.nb[1]));
        self.link((t2, 0), new_of(old.nb[2]));
        self.link((t, 1), (t1, 2));
        self.link((t1, 1), (t2, 2));
        self.link((t2, 1), (t, 2));
    }

    fn split_edge(&mut self, t: usize, i: usize, x: PlanarVec) {
        let (n, j) = self.tris[t].nb[i];
        let xn = &x + &self.offset(t, i);
        let ot = self.tris[t].clone();
        let on = self.tris[n].clone();
        let (a, b, c) = (ot.at(i).clone(), ot.at(i + 1).clone(), ot.at(i + 2).clone());
        let (bn, an, cn) = (on.at(j).clone(), on.at(j + 1).clone(), on.at(j + 2).clone());
        let t2 = self.tris.len();
        let n2 = t2 + 1;
        let mk = |v: [PlanarVec; 3], poly| Tri {
            v,
            poly,
            nb: [(usize::MAX, 0); 3],
        };
        self.tris[t] = mk([a, x.clone(), c.clone()], ot.poly);
        self.tris.push(mk([x, b, c], ot.poly));
        self.tris.push(mk([xn.clone(), an, cn.clone()], on.poly));
        self.tris[n] = mk([bn, xn, cn], on.poly);
        let n1 = n;
        // Old edges other than the split one, in their new homes.
        let new_of = |e: (usize, usize)| {
            if e == (t, (i + 1) % 3) {
                (t2, 1)
            } else if e == (t, (i + 2) % 3) {
                (t, 2)
            } else if e == (n, (j + 1) % 3) {
                (n2, 1)
            } else if e == (n, (j + 2) % 3) {
                (n1, 2)
            } else {
                e
            }
        };
        let ext = |tri: &Tri, k: usize| new_of(tri.nb[k % 3]);
        self.link((t, 0), (n2, 0));
        self.link((t2, 0), (n1, 0));
        self.link((t, 1), (t2, 2));
        self.link((n1, 1), (n2, 2));
        self.link((t, 2), ext(&ot, i + 2));
        self.link((t2, 1), ext(&ot, i + 1));
        self.link((n1, 2), ext(&on, j + 2));
        self.link((n2, 1), ext(&on, j + 1));
    }
}

/// Ear clipping for a simple counterclockwise polygon; returns index triples.
fn ear_clip(poly: &[PlanarVec]) -> Option<Vec<[usize; 3]>> {
    let mut rest: Vec<usize> = (0..poly.len()).collect();
    let mut out = Vec::new();
    while rest.len() > 3 {
        let m = rest.len();
        let ear = (0..m).find(|&i| {
            let (a, b, c) = (rest[(i + m - 1) % m], rest[i], rest[(i + 1) % m]);
            if orient(&poly[a], &poly[b], &poly[c]) <= 0 {
                return false;
            }
            rest.iter().all(|&w| {
                w == a
                    || w == b
                    || w == c
                    || orient(&poly[a], &poly[b], &poly[w]) < 0
                    || orient(&poly[b], &poly[c], &poly[w]) < 0
                    || orient(&poly[c], &poly[a], &poly[w]) < 0
            })
        })?;
        out.push([rest[(ear + m - 1) % m], rest[ear], rest[(ear + 1) % m]]);
        rest.remove(ear);
    }
    if orient(&poly[rest[0]], &poly[rest[1]], &poly[rest[2]]) <= 0 {
        return None;
    }
    out.push([rest[0], rest[1], rest[2]]);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::tests::{square_torus, v};

    #[test]
    fn torus_mesh_has_one_vertex() {
        let m = Mesh::build(&square_torus()).unwrap();
        assert_eq!(m.tris.len(), 2);
        assert_eq!(m.vertices.len(), 1);
        assert_eq!(m.vertices[0].turns, 1);
    }

    #[test]
    fn inserted_points_become_vertices() {
        let s = square_torus();
        let pts = [
            SurfacePoint::new(0, v("1/2", "0")),
            SurfacePoint::new(0, v("1/3", "1/4")),
            SurfacePoint::new(0, v("1/2", "1/2")),
        ];
        let m = Mesh::with_points(&s, &pts).unwrap();
        assert_eq!(m.vertices.len(), 4);
        assert!(m.vertices.iter().all(|x| x.turns == 1));
        // Euler characteristic of the torus.
        let f = m.tris.len() as i64;
        assert_eq!(m.vertices.len() as i64 - 3 * f / 2 + f, 0);
        for (t, tri) in m.tris.iter().enumerate() {
            for i in 0..3 {
                let (n, j) = tri.nb[i];
                assert_eq!(m.tris[n].nb[j], (t, i));
                let h = tri.at(i + 1) - tri.at(i);
                let g = m.tris[n].at(j + 1) - m.tris[n].at(j);
                assert!((&h + &g).is_zero());
            }
        }
    }
}
