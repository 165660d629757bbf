use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::Serialize;

use super::mesh::Mesh;
use super::{MarkedPoint, SurfaceError, SurfacePoint, TranslationSurface};
use crate::exactnum::{PlanarVec, QuadElem};

pub const DEFAULT_NODE_CAP: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub label: String,
    /// Position along the segment, strictly between 0 and 1.
    pub t: QuadElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: SurfacePoint,
    pub end: SurfacePoint,
    pub holonomy: PlanarVec,
    pub crossings: Vec<Crossing>,
}

impl Segment {
    pub fn length_sq(&self) -> QuadElem {
        self.holonomy.norm_sq()
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub node_cap: u64,
    pub allow_cone_endpoints: bool,
}

impl Default for SearchOptions {
    /// Node cap from `FLATBLOCK_NODE_CAP` when set.
    fn default() -> Self {
        let node_cap = std::env::var("FLATBLOCK_NODE_CAP")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_NODE_CAP);
        SearchOptions {
            node_cap,
            allow_cone_endpoints: false,
        }
    }
}

/// Straight segments from `p` to `q` of length at most `lmax` whose interior
/// avoids cone points and the endpoints themselves, with the probes each one
/// passes through. Sorted by length, then holonomy.
pub fn segments_between(
    s: &TranslationSurface,
    p: &SurfacePoint,
    q: &SurfacePoint,
    lmax: &QuadElem,
    probes: &[MarkedPoint],
) -> Result<Vec<Segment>, SurfaceError> {
    segments_between_with(s, p, q, lmax, probes, &SearchOptions::default())
}

pub fn segments_between_with(
    s: &TranslationSurface,
    p: &SurfacePoint,
    q: &SurfacePoint,
    lmax: &QuadElem,
    probes: &[MarkedPoint],
    opts: &SearchOptions,
) -> Result<Vec<Segment>, SurfaceError> {
    if !lmax.is_positive() {
        return Err(SurfaceError::InvalidPoint("length bound must be positive".into()));
    }
    let mut pts = vec![p.clone(), q.clone()];
    pts.extend(probes.iter().map(|m| m.at.clone()));
    let mesh = Mesh::with_points(s, &pts)?;
    let vp = mesh.vertex_at(p).expect("inserted");
    let vq = mesh.vertex_at(q).expect("inserted");
    if !opts.allow_cone_endpoints && (mesh.is_singular(vp) || mesh.is_singular(vq)) {
        return Err(SurfaceError::ConePointStart);
    }
    let mut labels: HashMap<usize, Vec<String>> = HashMap::new();
    for m in probes {
        let v = mesh.vertex_at(&m.at).expect("inserted");
        if v != vp && v != vq {
            labels.entry(v).or_default().push(m.label.clone());
        }
    }
    let search = Search {
        mesh: &mesh,
        vp,
        vq,
        labels,
        lmax2: lmax.square(),
        nodes: AtomicU64::new(0),
        cap: opts.node_cap,
        over: AtomicBool::new(false),
    };
    let found: Vec<Vec<Hit>> = mesh.vertices[vp]
        .corners
        .par_iter()
        .map(|&(t, j)| search.root(t, j))
        .collect::<Result<_, _>>()?;
    let start = s.canonical(p)?;
    let end = s.canonical(q)?;
    let mut out: Vec<Segment> = found
        .into_iter()
        .flatten()
        .map(|h| {
            let n2 = h.end.norm_sq();
            let crossings = h
                .crossings
                .into_iter()
                .map(|(label, x)| Crossing {
                    label,
                    t: x.dot(&h.end) / &n2,
                })
                .collect();
            Segment {
                start: start.clone(),
                end: end.clone(),
                holonomy: h.end,
                crossings,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.length_sq()
            .cmp_same_field(&b.length_sq())
            .then_with(|| a.holonomy.lex_cmp(&b.holonomy))
    });
    Ok(out)
}

struct Hit {
    end: PlanarVec,
    crossings: Vec<(String, PlanarVec)>,
}

/// Open cone of directions `(l, r)`, less than a half-turn wide, entering
/// triangle `t` through edge `e`; `o` places `t` in the developed plane.
struct Wedge {
    t: usize,
    e: usize,
    o: PlanarVec,
    l: PlanarVec,
    r: PlanarVec,
}

struct Search<'a> {
    mesh: &'a Mesh,
    vp: usize,
    vq: usize,
    labels: HashMap<usize, Vec<String>>,
    lmax2: QuadElem,
    nodes: AtomicU64,
    cap: u64,
    over: AtomicBool,
}

impl Search<'_> {
    fn tick(&self) -> Result<(), SurfaceError> {
        let n = self.nodes.fetch_add(1, AtomicOrdering::Relaxed) + 1;
        if n > self.cap || self.over.load(AtomicOrdering::Relaxed) {
            self.over.store(true, AtomicOrdering::Relaxed);
            return Err(SurfaceError::BudgetExceeded(self.cap));
        }
        Ok(())
    }

    fn within(&self, x: &PlanarVec) -> bool {
        x.norm_sq().cmp_same_field(&self.lmax2) != Ordering::Greater
    }

    /// All directions leaving `p` through corner `j` of triangle `t`.
    fn root(&self, t: usize, j: usize) -> Result<Vec<Hit>, SurfaceError> {
        let tri = &self.mesh.tris[t];
        let o = -tri.at(j);
        let d1 = tri.at(j + 1) + &o;
        let d2 = tri.at(j + 2) + &o;
        let mut hits = Vec::new();
        self.trace(self.mesh.vid[t][(j + 1) % 3], d1.clone(), &d1, &mut hits)?;
        let e = (j + 1) % 3;
        if self.edge_reachable(t, e, &o, &d1, &d2) {
            let mut stack = vec![self.cross(t, e, &o, d1, d2)];
            while let Some(w) = stack.pop() {
                self.tick()?;
                self.expand(w, &mut stack, &mut hits)?;
            }
        }
        Ok(hits)
    }

    fn cross(&self, t: usize, e: usize, o: &PlanarVec, l: PlanarVec, r: PlanarVec) -> Wedge {
        let (n, f) = self.mesh.tris[t].nb[e];
        let o2 = o - &self.mesh.offset(t, e);
        Wedge {
            t: n,
            e: f,
            o: o2,
            l,
            r,
        }
    }

    fn expand(&self, w: Wedge, stack: &mut Vec<Wedge>, hits: &mut Vec<Hit>) -> Result<(), SurfaceError> {
        let tri = &self.mesh.tris[w.t];
        let c = tri.at(w.e + 2) + &w.o;
        let after_l = w.l.cross(&c).signum();
        let before_r = c.cross(&w.r).signum();
        let (right_edge, left_edge) = ((w.e + 1) % 3, (w.e + 2) % 3);
        let mut push = |edge: usize, l: PlanarVec, r: PlanarVec| {
            if self.edge_reachable(w.t, edge, &w.o, &l, &r) {
                stack.push(self.cross(w.t, edge, &w.o, l, r));
            }
        };
        if after_l > 0 && before_r > 0 {
            self.trace(self.mesh.vid[w.t][(w.e + 2) % 3], c.clone(), &c, hits)?;
            push(right_edge, w.l, c.clone());
            push(left_edge, c, w.r);
        } else if after_l <= 0 {
            push(left_edge, w.l, w.r);
        } else {
            push(right_edge, w.l, w.r);
        }
        Ok(())
    }

    /// Whether the part of edge `e` of `t` seen through `(l, r)` comes within `lmax`.
    fn edge_reachable(&self, t: usize, e: usize, o: &PlanarVec, l: &PlanarVec, r: &PlanarVec) -> bool {
        let tri = &self.mesh.tris[t];
        let u = tri.at(e) + o;
        let w = tri.at(e + 1) + o;
        let dir = &w - &u;
        let hit = |d: &PlanarVec| d.scale(&(u.cross(&dir) / d.cross(&dir)));
        let (a, b) = (hit(l), hit(r));
        if self.within(&a) || self.within(&b) {
            return true;
        }
        let ab = &b - &a;
        let s = -a.dot(&ab);
        if !s.is_positive() || s.cmp_same_field(&ab.norm_sq()) != Ordering::Less {
            return false;
        }
        // Squared distance from the origin to the line through a and b.
        let cr = a.cross(&ab);
        (&cr * &cr).cmp_same_field(&(&self.lmax2 * &ab.norm_sq())) != Ordering::Greater
    }

    /// Follows the ray in direction `d` from the vertex `v` at developed
    /// position `x`, passing through regular vertices, until it reaches `q`,
    /// stops, or leaves the disc of radius `lmax`.
    fn trace(
        &self,
        mut v: usize,
        mut x: PlanarVec,
        d: &PlanarVec,
        hits: &mut Vec<Hit>,
    ) -> Result<(), SurfaceError> {
        let mesh = self.mesh;
        let mut crossings = Vec::new();
        loop {
            self.tick()?;
            if !self.within(&x) {
                return Ok(());
            }
            if v == self.vq {
                hits.push(Hit { end: x, crossings });
                return Ok(());
            }
            if v == self.vp || mesh.is_singular(v) {
                return Ok(());
            }
            if let Some(ls) = self.labels.get(&v) {
                crossings.extend(ls.iter().map(|l| (l.clone(), x.clone())));
            }
            let (t, j) = *mesh.vertices[v]
                .corners
                .iter()
                .find(|&&(t, j)| {
                    let tri = &mesh.tris[t];
                    let c = tri.at(j);
                    PlanarVec::in_ccw_arc(d, &(tri.at(j + 1) - c), &(tri.at(j + 2) - c))
                })
                .expect("a regular vertex has a corner in every direction");
            let tri = &mesh.tris[t];
            let mut o = &x - tri.at(j);
            if (tri.at(j + 1) - tri.at(j)).same_direction(d) {
                x = tri.at(j + 1) + &o;
                v = mesh.vid[t][(j + 1) % 3];
                continue;
            }
            let (mut t, mut e) = (t, (j + 1) % 3);
            loop {
                self.tick()?;
                let tri = &mesh.tris[t];
                let u = tri.at(e) + &o;
                let w = tri.at(e + 1) + &o;
                let dir = &w - &u;
                let at = d.scale(&(u.cross(&dir) / d.cross(&dir)));
                if !self.within(&at) {
                    return Ok(());
                }
                let (n, f) = tri.nb[e];
                o = &o - &mesh.offset(t, e);
                let c = mesh.tris[n].at(f + 2) + &o;
                match d.cross(&c).signum() {
                    0 => {
                        x = c;
                        v = mesh.vid[n][(f + 2) % 3];
                        break;
                    }
                    1 => e = (f + 1) % 3,
                    _ => e = (f + 2) % 3,
                }
                t = n;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::tests::{square_torus, v};

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn unit_lattice_vectors() {
        let s = square_torus();
        let o = SurfacePoint::new(0, v("0", "0"));
        let segs = segments_between(&s, &o, &o, &QuadElem::one(), &[]).unwrap();
        let hol: Vec<_> = segs.iter().map(|s| s.holonomy.clone()).collect();
        assert_eq!(hol.len(), 4);
        for (a, b) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            assert!(hol.contains(&PlanarVec::from_ints(a, b)));
        }
    }

    #[test]
    fn primitive_vectors_up_to_five() {
        let s = square_torus();
        let o = SurfacePoint::new(0, v("0", "0"));
        let segs = segments_between(&s, &o, &o, &QuadElem::from_int(5), &[]).unwrap();
        let mut want = 0;
        for a in -5i64..=5 {
            for b in -5i64..=5 {
                if (a, b) != (0, 0) && a * a + b * b <= 25 && gcd(a, b) == 1 {
                    want += 1;
                }
            }
        }
        assert_eq!(segs.len(), want);
    }

    #[test]
    fn half_points_are_crossed() {
        let s = square_torus();
        let o = SurfacePoint::new(0, v("0", "0"));
        let probes: Vec<MarkedPoint> = [("a", "1/2", "0"), ("b", "0", "1/2"), ("c", "1/2", "1/2")]
            .iter()
            .map(|(l, x, y)| MarkedPoint {
                label: l.to_string(),
                at: SurfacePoint::new(0, v(x, y)),
            })
            .collect();
        let segs = segments_between(&s, &o, &o, &QuadElem::from_int(4), &probes).unwrap();
        for seg in &segs {
            assert_eq!(seg.crossings.len(), 1);
            assert_eq!(seg.crossings[0].t, QuadElem::from_frac(1, 2));
        }
    }

    #[test]
    fn interior_endpoints() {
        let s = square_torus();
        let p = SurfacePoint::new(0, v("1/3", "1/5"));
        let q = SurfacePoint::new(0, v("1/2", "1/2"));
        let segs = segments_between(&s, &p, &q, &QuadElem::from_int(3), &[]).unwrap();
        // Oracle: q - p + (m, n) with no other copy of p or q strictly inside.
        let mut want = 0;
        for m in -4i64..=4 {
            for n in -4i64..=4 {
                let h = (
                    QuadElem::from_frac(1, 6) + QuadElem::from_int(m),
                    QuadElem::from_frac(3, 10) + QuadElem::from_int(n),
                );
                if (&h.0 * &h.0 + &h.1 * &h.1).cmp_same_field(&QuadElem::from_int(9)) == Ordering::Greater {
                    continue;
                }
                let hv = PlanarVec::new(h.0.clone(), h.1.clone());
                let blocked = (1..=50).any(|k| {
                    (1..k).any(|i| {
                        let pt = hv.scale(&QuadElem::from_frac(i, k));
                        let is_int = |x: &QuadElem, off: QuadElem| {
                            (x + &off).as_rational().is_some_and(|r| r.is_integer())
                        };
                        (is_int(&pt.x, QuadElem::zero()) && is_int(&pt.y, QuadElem::zero()))
                            || (is_int(&pt.x, -QuadElem::from_frac(1, 6))
                                && is_int(&pt.y, -QuadElem::from_frac(3, 10)))
                    })
                });
                if !blocked {
                    want += 1;
                }
            }
        }
        assert_eq!(segs.len(), want);
    }
}
