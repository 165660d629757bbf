use std::collections::VecDeque;

use super::{SurfaceError, SurfacePoint, TranslationSurface};
use crate::exactnum::{PlanarVec, QuadElem};

/// An automorphism with derivative `-1`: polygon `i` is carried onto polygon
/// `sigma[i]` by `z -> -z + center[i]`, vertex `v` landing on vertex `v + shift[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub sigma: Vec<usize>,
    pub shift: Vec<usize>,
    pub center: Vec<PlanarVec>,
}

impl Involution {
    /// Searches for a point reflection of the presentation compatible with the gluings.
    pub fn find(s: &TranslationSurface) -> Result<Involution, SurfaceError> {
        let k0 = s.polygons[0].len();
        for j in 0..s.polygons.len() {
            if s.polygons[j].len() != k0 {
                continue;
            }
            for sh in 0..k0 {
                if let Some(inv) = Self::extend(s, j, sh) {
                    return Ok(inv);
                }
            }
        }
        Err(SurfaceError::NotCentrallySymmetric)
    }

    fn extend(s: &TranslationSurface, j: usize, sh: usize) -> Option<Involution> {
        let n = s.polygons.len();
        let mut sigma = vec![usize::MAX; n];
        let mut shift = vec![0; n];
        let mut center = vec![PlanarVec::zero(); n];
        let fits = |i: usize, j: usize, sh: usize| -> Option<PlanarVec> {
            let (p, q) = (&s.polygons[i], &s.polygons[j]);
            if p.len() != q.len() {
                return None;
            }
            let k = p.len();
            let c = &q[sh % k] + &p[0];
            (0..k).all(|v| &c - &p[v] == q[(v + sh) % k]).then_some(c)
        };
        center[0] = fits(0, j, sh)?;
        sigma[0] = j;
        shift[0] = sh;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let k = s.polygons[i].len();
            for e in 0..k {
                let (q, f) = s.partner((i, e));
                let (qi, fi) = s.partner((sigma[i], (e + shift[i]) % k));
                let kq = s.polygons[q].len();
                let sq = (fi + kq - f % kq) % kq;
                if sigma[q] == usize::MAX {
                    center[q] = fits(q, qi, sq)?;
                    sigma[q] = qi;
                    shift[q] = sq;
                    queue.push_back(q);
                } else if sigma[q] != qi || shift[q] != sq {
                    return None;
                }
            }
        }
        let mut hit = vec![false; n];
        for &t in &sigma {
            if t == usize::MAX || std::mem::replace(&mut hit[t], true) {
                return None;
            }
        }
        Some(Involution { sigma, shift, center })
    }

    pub fn apply(&self, s: &TranslationSurface, pt: &SurfacePoint) -> Result<SurfacePoint, SurfaceError> {
        s.locate(pt)?;
        let i = pt.polygon;
        s.canonical(&SurfacePoint::new(self.sigma[i], &self.center[i] - &pt.point))
    }

    /// Fixed points: polygon centres, midpoints of edges sent to their partners,
    /// and vertex classes sent to themselves. Canonical and deduplicated.
    pub fn fixed_points(&self, s: &TranslationSurface) -> Result<Vec<SurfacePoint>, SurfaceError> {
        let half = QuadElem::from_frac(1, 2);
        let mut out: Vec<SurfacePoint> = Vec::new();
        let push = |p: SurfacePoint, out: &mut Vec<SurfacePoint>| -> Result<(), SurfaceError> {
            let c = s.canonical(&p)?;
            if !out.contains(&c) {
                out.push(c);
            }
            Ok(())
        };
        for (i, &t) in self.sigma.iter().enumerate() {
            if t == i {
                push(SurfacePoint::new(i, self.center[i].scale(&half)), &mut out)?;
            }
        }
        for &(a, b) in &s.gluings {
            let k = s.polygons[a.0].len();
            if (self.sigma[a.0], (a.1 + self.shift[a.0]) % k) == b {
                let mid = (s.vertex(a.0, a.1) + s.vertex(a.0, a.1 + 1)).scale(&half);
                push(SurfacePoint::new(a.0, mid), &mut out)?;
            }
        }
        let classes = s.vertex_classes();
        for (ci, cls) in classes.iter().enumerate() {
            let (i, v) = cls[0];
            let k = s.polygons[i].len();
            if s.class_of(&classes, (self.sigma[i], (v + self.shift[i]) % k)) == ci {
                push(SurfacePoint::new(i, s.vertex(i, v).clone()), &mut out)?;
            }
        }
        Ok(out)
    }
}

/// Fixed points of the point reflection of a centrally symmetric presentation.
pub fn central_symmetry_weierstrass(s: &TranslationSurface) -> Result<Vec<SurfacePoint>, SurfaceError> {
    Involution::find(s)?.fixed_points(s)
}
