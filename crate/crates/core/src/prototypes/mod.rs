//! Prototype L-shaped surfaces in genus-two eigenform loci and the action of
//! their horizontal and vertical multitwists on the Weierstrass points.

use std::fmt;

use num_integer::{Integer, Roots};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{PlanarVec, QuadElem, Rational};
use crate::surface::{
    central_symmetry_weierstrass, MarkedPoint, SurfaceError, SurfacePoint, TranslationSurface,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrototypeError {
    #[error("discriminant {0} is a perfect square")]
    SquareDiscriminant(u64),
    #[error("not a prototype triple: {0}")]
    InvalidTriple(String),
    #[error("prototype is not realizable: {0}")]
    GeometryInfeasible(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

impl PrototypeError {
    pub fn code(&self) -> &'static str {
        match self {
            PrototypeError::SquareDiscriminant(_) => "SquareDiscriminant",
            PrototypeError::InvalidTriple(_) => "InvalidTriple",
            PrototypeError::GeometryInfeasible(_) => "GeometryInfeasible",
            PrototypeError::Surface(e) => e.code(),
        }
    }
}

/// `(b, c, e)` with `D = e^2 + 4bc`, `c + e < b`, `gcd(b, c, e) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrototypeTriple {
    pub d: u64,
    pub b: u64,
    pub c: u64,
    pub e: i64,
}

fn is_square(n: u64) -> bool {
    let r = n.sqrt();
    r * r == n
}

impl PrototypeTriple {
    pub fn new(d: u64, b: u64, c: u64, e: i64) -> Result<Self, PrototypeError> {
        if is_square(d) {
            return Err(PrototypeError::SquareDiscriminant(d));
        }
        let t = PrototypeTriple { d, b, c, e };
        let bad = |m: &str| Err(PrototypeError::InvalidTriple(format!("({b},{c},{e}): {m}")));
        if b == 0 || c == 0 {
            return bad("b and c must be positive");
        }
        if (e * e) as i128 + 4 * (b as i128) * (c as i128) != d as i128 {
            return bad(&format!("e^2 + 4bc != {d}"));
        }
        if c as i64 + e >= b as i64 {
            return bad("c + e >= b");
        }
        if b.gcd(&c).gcd(&e.unsigned_abs()) != 1 {
            return bad("gcd(b, c, e) != 1");
        }
        Ok(t)
    }

    /// `(e + sqrt(D)) / 2`.
    pub fn lambda(&self) -> QuadElem {
        (QuadElem::from_int(self.e) + QuadElem::sqrt(self.d)) * QuadElem::from_frac(1, 2)
    }

    pub fn spin(&self) -> Option<u8> {
        spin_invariant(self)
    }

    /// Horizontal moduli: the `lambda x lambda` square and the `b x c` strip.
    pub fn horizontal_moduli(&self) -> [QuadElem; 2] {
        [QuadElem::one(), QuadElem::from_frac(self.c as i64, self.b as i64)]
    }

    /// `Mod(V_r) / Mod(V_l) = (b - lambda)(lambda + c) / (c lambda)`, evaluated in the field.
    pub fn vertical_moduli_ratio_field(&self) -> QuadElem {
        let l = self.lambda();
        let b = QuadElem::from_int(self.b as i64);
        let c = QuadElem::from_int(self.c as i64);
        (&b - &l) * (&l + &c) / (&c * &l)
    }

    /// `(b - c - e) / c`.
    pub fn vertical_moduli_ratio(&self) -> Rational {
        Rational::new(
            (self.b as i64 - self.c as i64 - self.e).into(),
            (self.c as i64).into(),
        )
    }
}

impl Serialize for PrototypeTriple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row {
            #[serde(rename = "D")]
            d: u64,
            b: u64,
            c: u64,
            e: i64,
            lambda: QuadElem,
            spin: Option<u8>,
        }
        Row {
            d: self.d,
            b: self.b,
            c: self.c,
            e: self.e,
            lambda: self.lambda(),
            spin: self.spin(),
        }
        .serialize(s)
    }
}

/// All triples for `d`, ordered by `e` then `b`, optionally filtered by spin.
pub fn enumerate_prototypes(d: u64, spin: Option<u8>) -> Result<Vec<PrototypeTriple>, PrototypeError> {
    if d == 0 || is_square(d) {
        return Err(PrototypeError::SquareDiscriminant(d));
    }
    let mut out = Vec::new();
    if d < 5 {
        return Ok(out);
    }
    let emax = (d - 4).sqrt() as i64;
    for e in -emax..=emax {
        if (e - d as i64).rem_euclid(2) != 0 {
            continue;
        }
        let rest = d as i64 - e * e;
        if rest % 4 != 0 {
            continue;
        }
        let n = (rest / 4) as u64;
        for b in 1..=n {
            if n % b != 0 {
                continue;
            }
            if let Ok(t) = PrototypeTriple::new(d, b, n / b, e) {
                if spin.is_none() || t.spin() == spin {
                    out.push(t);
                }
            }
        }
    }
    Ok(out)
}

/// Largest `f` with `f^2 | D` and `D / f^2` congruent to 0 or 1 mod 4.
pub fn conductor(d: u64) -> u64 {
    let mut best = 1;
    let mut f = 1;
    while f * f <= d {
        if d % (f * f) == 0 && matches!((d / (f * f)) % 4, 0 | 1) {
            best = f;
        }
        f += 1;
    }
    best
}

/// `(e - f)/2 + (c + 1) b mod 2`, defined when `D = 1 mod 8`.
pub fn spin_invariant(t: &PrototypeTriple) -> Option<u8> {
    if t.d % 8 != 1 {
        return None;
    }
    let f = conductor(t.d) as i64;
    let v = (t.e - f) / 2 + (t.c as i64 + 1) * t.b as i64;
    Some(v.rem_euclid(2) as u8)
}

/// A permutation of the labels `1..=5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PermutationS5 {
    /// `image[i - 1]` is the image of label `i`.
    pub image: [u8; 5],
}

impl PermutationS5 {
    pub fn identity() -> Self {
        PermutationS5 {
            image: [1, 2, 3, 4, 5],
        }
    }

    pub fn transposition(a: u8, b: u8) -> Self {
        let mut p = Self::identity();
        p.image.swap(a as usize - 1, b as usize - 1);
        p
    }

    pub fn from_image(image: [u8; 5]) -> Option<Self> {
        let mut seen = [false; 5];
        for &x in &image {
            if !(1..=5).contains(&x) || std::mem::replace(&mut seen[x as usize - 1], true) {
                return None;
            }
        }
        Some(PermutationS5 { image })
    }

    pub fn apply(&self, i: u8) -> u8 {
        self.image[i as usize - 1]
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &PermutationS5) -> PermutationS5 {
        PermutationS5 {
            image: other.image.map(|x| self.apply(x)),
        }
    }

    /// `(a b)^k`: the transposition for odd `k`, the identity otherwise.
    pub fn transposition_pow(a: u8, b: u8, k: u64) -> Self {
        if k % 2 == 1 {
            Self::transposition(a, b)
        } else {
            Self::identity()
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl fmt::Display for PermutationS5 {
    /// Cycle notation without fixed points, e.g. `(12)(45)`; `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        let mut seen = [false; 5];
        for start in 1..=5u8 {
            if seen[start as usize - 1] || self.apply(start) == start {
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            while !seen[x as usize - 1] {
                seen[x as usize - 1] = true;
                write!(f, "{x}")?;
                x = self.apply(x);
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Serialize for PermutationS5 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `(c', b')` with `c'/b' = c/b` in lowest terms.
pub fn horizontal_exponents(t: &PrototypeTriple) -> (u64, u64) {
    let g = t.c.gcd(&t.b);
    (t.c / g, t.b / g)
}

/// `(b'', c'')` with `b''/c'' = (b - c - e)/c` in lowest terms.
pub fn vertical_exponents(t: &PrototypeTriple) -> (u64, u64) {
    let r = t.vertical_moduli_ratio();
    assert_eq!(
        t.vertical_moduli_ratio_field(),
        QuadElem::from_rational(r.clone()),
        "vertical moduli ratio"
    );
    let n: u64 = r.numer().try_into().expect("positive ratio");
    let d: u64 = r.denom().try_into().expect("positive ratio");
    (n, d)
}

/// `(12)^{c'} (45)^{b'}`.
pub fn horizontal_twist_perm(t: &PrototypeTriple) -> PermutationS5 {
    let (c1, b1) = horizontal_exponents(t);
    PermutationS5::transposition_pow(1, 2, c1).compose(&PermutationS5::transposition_pow(4, 5, b1))
}

/// `(23)^{c''} (14)^{b''}`.
pub fn vertical_twist_perm(t: &PrototypeTriple) -> PermutationS5 {
    let (b2, c2) = vertical_exponents(t);
    PermutationS5::transposition_pow(2, 3, c2).compose(&PermutationS5::transposition_pow(1, 4, b2))
}

/// Orbits of the group generated by `gens` on `1..=5`, each sorted, ordered by least element.
pub fn orbits(gens: &[PermutationS5]) -> Vec<Vec<u8>> {
    let mut seen = [false; 5];
    let mut out = Vec::new();
    for start in 1..=5u8 {
        if seen[start as usize - 1] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start as usize - 1] = true;
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            i += 1;
            for g in gens {
                let y = g.apply(x);
                if !std::mem::replace(&mut seen[y as usize - 1], true) {
                    orbit.push(y);
                }
            }
        }
        orbit.sort();
        out.push(orbit);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    /// The twists act transitively; no two distinct Weierstrass points are blocked.
    Transitive,
    /// Two orbits, each meeting a point that illuminates every other one.
    TwoOrbits,
    /// The twist route leaves the question open for this triple.
    RequiresGeometricArgument,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupAnalysis {
    pub h_perm: PermutationS5,
    pub v_perm: PermutationS5,
    pub condition_met: bool,
    pub orbits: Vec<Vec<u8>>,
    pub conclusion: Conclusion,
}

pub fn blocking_group_analysis(t: &PrototypeTriple) -> GroupAnalysis {
    let h = horizontal_twist_perm(t);
    let v = vertical_twist_perm(t);
    let (c1, b1) = horizontal_exponents(t);
    let (b2, c2) = vertical_exponents(t);
    let odd = |x: u64| x % 2 == 1;
    let condition_met = (odd(c1) && odd(b1)) || (odd(c2) && odd(b2));
    let orbits = orbits(&[h, v]);
    let conclusion = if !condition_met {
        Conclusion::RequiresGeometricArgument
    } else if orbits.len() == 1 {
        Conclusion::Transitive
    } else {
        Conclusion::TwoOrbits
    };
    GroupAnalysis {
        h_perm: h,
        v_perm: v,
        condition_met,
        orbits,
        conclusion,
    }
}

/// The prototype cut as a `lambda x lambda` square (polygon 0) under a `b x c`
/// strip (polygon 1) centred above it. Regluing the strip by a horizontal
/// translation gives the usual L-shape with zero twist. Marked points `w1..w5`
/// are the labelled Weierstrass points; `zero` is the cone point.
pub fn build_prototype_surface(t: &PrototypeTriple) -> Result<TranslationSurface, PrototypeError> {
    let l = t.lambda();
    let b = QuadElem::from_int(t.b as i64);
    let c = QuadElem::from_int(t.c as i64);
    if !l.is_positive() {
        return Err(PrototypeError::GeometryInfeasible("lambda <= 0".into()));
    }
    if !(&b - &l).is_positive() {
        return Err(PrototypeError::GeometryInfeasible("b <= lambda".into()));
    }
    let half = QuadElem::from_frac(1, 2);
    let zero = QuadElem::zero();
    let p = |x: &QuadElem, y: &QuadElem| PlanarVec::new(x.clone(), y.clone());
    let left = (&l - &b) * &half;
    let right = (&l + &b) * &half;
    let top = &l + &c;
    let square = vec![p(&zero, &zero), p(&l, &zero), p(&l, &l), p(&zero, &l)];
    let strip = vec![
        p(&left, &l),
        p(&zero, &l),
        p(&l, &l),
        p(&right, &l),
        p(&right, &top),
        p(&l, &top),
        p(&zero, &top),
        p(&left, &top),
    ];
    let gluings = vec![
        ((0, 0), (1, 5)),
        ((0, 1), (0, 3)),
        ((0, 2), (1, 1)),
        ((1, 0), (1, 6)),
        ((1, 2), (1, 4)),
        ((1, 3), (1, 7)),
    ];
    let s = TranslationSurface::new(vec![square, strip], gluings)?;
    let mid_strip = &l + &c * &half;
    let labelled = [
        ("w1", SurfacePoint::new(1, p(&(&l * &half), &mid_strip))),
        ("w2", SurfacePoint::new(1, p(&right, &mid_strip))),
        ("w3", SurfacePoint::new(1, p(&right, &l))),
        ("w4", SurfacePoint::new(0, p(&(&l * &half), &(&l * &half)))),
        ("w5", SurfacePoint::new(0, p(&l, &(&l * &half)))),
        ("zero", SurfacePoint::new(0, p(&zero, &zero))),
    ];
    let mut marks = Vec::new();
    for (label, pt) in labelled {
        marks.push(MarkedPoint {
            label: label.into(),
            at: s.canonical(&pt)?,
        });
    }
    let fixed = central_symmetry_weierstrass(&s)?;
    debug_assert!(marks.iter().all(|m| fixed.contains(&m.at)));
    Ok(s.with_marked_points(marks)?)
}

/// The labelled Weierstrass point `w{i}` of a prototype surface, `i` in `1..=5`.
pub fn prototype_weierstrass(s: &TranslationSurface, i: u8) -> Option<&SurfacePoint> {
    let label = format!("w{i}");
    s.marked_points.iter().find(|m| m.label == label).map(|m| &m.at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::cylinder_decomposition;

    fn triples(d: u64) -> Vec<(u64, u64, i64)> {
        enumerate_prototypes(d, None)
            .unwrap()
            .iter()
            .map(|t| (t.b, t.c, t.e))
            .collect()
    }

    #[test]
    fn discriminant_eight_by_hand() {
        let mut got = triples(8);
        got.sort();
        assert_eq!(got, vec![(1, 1, -2), (2, 1, 0)]);
    }

    #[test]
    fn square_discriminant_rejected() {
        assert_eq!(
            enumerate_prototypes(16, None),
            Err(PrototypeError::SquareDiscriminant(16))
        );
    }

    #[test]
    fn table_rows_present() {
        for (d, row) in [
            (5, (1, 1, -1)),
            (12, (3, 1, 0)),
            (17, (1, 2, -3)),
            (21, (1, 3, -3)),
            (32, (4, 1, -4)),
            (45, (1, 5, -5)),
            (77, (1, 7, -7)),
        ] {
            assert!(triples(d).contains(&row), "D={d}");
        }
        let t41: Vec<_> = enumerate_prototypes(41, Some(0)).unwrap();
        assert!(t41.iter().any(|t| (t.b, t.c, t.e) == (5, 2, -1)));
    }

    #[test]
    fn spins() {
        let t = |b, c, e| PrototypeTriple::new(17, b, c, e).unwrap();
        assert_eq!(t(1, 2, -3).spin(), Some(1));
        assert_eq!(t(2, 1, -3).spin(), Some(0));
        assert_eq!(PrototypeTriple::new(41, 5, 2, -1).unwrap().spin(), Some(0));
        assert_eq!(PrototypeTriple::new(5, 1, 1, -1).unwrap().spin(), None);
        assert_eq!(conductor(45), 3);
        assert_eq!(conductor(32), 2);
        assert_eq!(conductor(12), 1);
    }

    #[test]
    fn twist_permutations() {
        let t = PrototypeTriple::new(5, 1, 1, -1).unwrap();
        assert_eq!(horizontal_twist_perm(&t).to_string(), "(12)(45)");
        assert_eq!(vertical_twist_perm(&t).to_string(), "(14)(23)");
        let t = PrototypeTriple::new(41, 5, 2, -1).unwrap();
        assert_eq!(horizontal_twist_perm(&t).to_string(), "(45)");
        assert_eq!(vertical_twist_perm(&t).to_string(), "(23)");
        let a = blocking_group_analysis(&t);
        assert!(!a.condition_met);
        assert_eq!(a.orbits, vec![vec![1], vec![2, 3], vec![4, 5]]);
        assert_eq!(a.conclusion, Conclusion::RequiresGeometricArgument);
        let t = PrototypeTriple::new(32, 4, 1, -4).unwrap();
        assert_eq!(horizontal_twist_perm(&t).to_string(), "(12)");
        assert_eq!(vertical_twist_perm(&t).to_string(), "(14)(23)");
    }

    #[test]
    fn condition_and_orbits() {
        let a = blocking_group_analysis(&PrototypeTriple::new(5, 1, 1, -1).unwrap());
        assert!(a.condition_met);
        assert_eq!(a.orbits, vec![vec![1, 2, 3, 4, 5]]);
        let a = blocking_group_analysis(&PrototypeTriple::new(12, 3, 1, 0).unwrap());
        assert!(a.condition_met);
    }

    #[test]
    fn vertical_ratio_two_ways() {
        for d in 5..=200u64 {
            if is_square(d) {
                continue;
            }
            for t in enumerate_prototypes(d, None).unwrap() {
                assert_eq!(
                    t.vertical_moduli_ratio_field(),
                    QuadElem::from_rational(t.vertical_moduli_ratio())
                );
                let l = t.lambda();
                assert!(
                    (&l * &l - QuadElem::from_int(t.e) * &l - QuadElem::from_int((t.b * t.c) as i64))
                        .is_zero()
                );
            }
        }
    }

    #[test]
    fn prototype_surface_geometry() {
        for (d, b, c, e) in [(5, 1, 1, -1), (12, 3, 1, 0), (41, 5, 2, -1), (17, 1, 2, -3)] {
            let t = PrototypeTriple::new(d, b, c, e).unwrap();
            let s = build_prototype_surface(&t).unwrap();
            let ca = s.cone_analysis();
            assert_eq!(ca.stratum.to_string(), "H(2)");
            let l = t.lambda();
            assert_eq!(s.area(), &l * &l + QuadElem::from_int((b * c) as i64));
            let w = central_symmetry_weierstrass(&s).unwrap();
            assert_eq!(w.len(), 6);
            for i in 1..=5 {
                let p = prototype_weierstrass(&s, i).unwrap();
                assert!(w.contains(p));
                assert!(!s.is_singular(p).unwrap());
            }
            let cyl = cylinder_decomposition(&s, &PlanarVec::from_ints(1, 0)).unwrap();
            let mut moduli: Vec<_> = cyl.iter().map(|c| c.modulus.clone()).collect();
            moduli.sort_by(|a, b| a.cmp_same_field(b));
            let mut want = t.horizontal_moduli().to_vec();
            want.sort_by(|a, b| a.cmp_same_field(b));
            assert_eq!(moduli, want);
        }
    }

    #[test]
    fn infeasible_geometry() {
        let t = PrototypeTriple {
            d: 5,
            b: 1,
            c: 1,
            e: -3,
        };
        assert!(matches!(
            build_prototype_surface(&t),
            Err(PrototypeError::GeometryInfeasible(_))
        ));
    }
}
