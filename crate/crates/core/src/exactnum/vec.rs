use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{FieldError, QuadElem};

/// A vector in the plane with exact coordinates from one common field.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PlanarVec {
    pub x: QuadElem,
    pub y: QuadElem,
}

impl PlanarVec {
    pub fn new(x: QuadElem, y: QuadElem) -> Self {
        PlanarVec { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        PlanarVec::new(QuadElem::from_int(x), QuadElem::from_int(y))
    }

    pub fn zero() -> Self {
        PlanarVec::from_ints(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn disc(&self) -> Result<u64, FieldError> {
        self.x.common_disc(&self.y)
    }

    pub fn scale(&self, k: &QuadElem) -> PlanarVec {
        PlanarVec::new(&self.x * k, &self.y * k)
    }

    pub fn dot(&self, o: &PlanarVec) -> QuadElem {
        &self.x * &o.x + &self.y * &o.y
    }

    /// z-component of the cross product; positive when `o` is counterclockwise of `self`.
    pub fn cross(&self, o: &PlanarVec) -> QuadElem {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm_sq(&self) -> QuadElem {
        self.dot(self)
    }

    pub fn cross_sign(&self, o: &PlanarVec) -> i8 {
        self.cross(o).signum()
    }

    /// True when `o` is a positive multiple of `self`.
    pub fn same_direction(&self, o: &PlanarVec) -> bool {
        self.cross(o).is_zero() && self.dot(o).is_positive()
    }

    /// Lexicographic order on (x, y).
    pub fn lex_cmp(&self, o: &PlanarVec) -> Ordering {
        self.x
            .cmp_same_field(&o.x)
            .then_with(|| self.y.cmp_same_field(&o.y))
    }

    /// Compares the counterclockwise angles, in `[0, 2pi)`, from `base` to `a` and to `b`.
    pub fn ccw_cmp(base: &PlanarVec, a: &PlanarVec, b: &PlanarVec) -> Ordering {
        let ka = angle_class(base, a);
        let kb = angle_class(base, b);
        if ka != kb {
            return ka.cmp(&kb);
        }
        if ka == 1 || ka == 3 {
            match a.cross_sign(b) {
                1 => Ordering::Less,
                -1 => Ordering::Greater,
                _ => Ordering::Equal,
            }
        } else {
            Ordering::Equal
        }
    }

    /// Whether `d` lies in the half-open counterclockwise arc `[from, to)`.
    pub fn in_ccw_arc(d: &PlanarVec, from: &PlanarVec, to: &PlanarVec) -> bool {
        PlanarVec::ccw_cmp(from, d, to) == Ordering::Less
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// 0: along `base`, 1: strictly left, 2: opposite, 3: strictly right.
fn angle_class(base: &PlanarVec, v: &PlanarVec) -> u8 {
    match base.cross_sign(v) {
        1 => 1,
        -1 => 3,
        _ => {
            if base.dot(v).is_positive() {
                0
            } else {
                2
            }
        }
    }
}

impl Add for &PlanarVec {
    type Output = PlanarVec;
    fn add(self, o: &PlanarVec) -> PlanarVec {
        PlanarVec::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Add for PlanarVec {
    type Output = PlanarVec;
    fn add(self, o: PlanarVec) -> PlanarVec {
        &self + &o
    }
}

impl Sub for &PlanarVec {
    type Output = PlanarVec;
    fn sub(self, o: &PlanarVec) -> PlanarVec {
        PlanarVec::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Sub for PlanarVec {
    type Output = PlanarVec;
    fn sub(self, o: PlanarVec) -> PlanarVec {
        &self - &o
    }
}

impl Neg for &PlanarVec {
    type Output = PlanarVec;
    fn neg(self) -> PlanarVec {
        PlanarVec::new(-&self.x, -&self.y)
    }
}

impl Neg for PlanarVec {
    type Output = PlanarVec;
    fn neg(self) -> PlanarVec {
        -&self
    }
}

impl fmt::Display for PlanarVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for PlanarVec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [&self.x, &self.y].serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlanarVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[QuadElem; 2]>::deserialize(d)?;
        Ok(PlanarVec { x, y })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> PlanarVec {
        PlanarVec::from_ints(x, y)
    }

    #[test]
    fn ccw_order_around_circle() {
        let base = v(1, 0);
        let ring = [
            v(1, 0),
            v(1, 1),
            v(0, 1),
            v(-1, 1),
            v(-1, 0),
            v(-1, -1),
            v(0, -1),
            v(1, -1),
        ];
        for i in 0..ring.len() {
            for j in 0..ring.len() {
                assert_eq!(PlanarVec::ccw_cmp(&base, &ring[i], &ring[j]), i.cmp(&j));
            }
        }
    }

    #[test]
    fn half_open_arc() {
        assert!(PlanarVec::in_ccw_arc(&v(1, 0), &v(1, 0), &v(0, 1)));
        assert!(!PlanarVec::in_ccw_arc(&v(0, 1), &v(1, 0), &v(0, 1)));
        assert!(PlanarVec::in_ccw_arc(&v(0, -1), &v(-1, 0), &v(1, 0)));
    }

    #[test]
    fn json_is_string_pair() {
        let p = PlanarVec::new(QuadElem::phi(), QuadElem::from_frac(-1, 3));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["1/2+1/2*sqrt(5)","-1/3"]"#);
        assert_eq!(serde_json::from_str::<PlanarVec>(&s).unwrap(), p);
    }
}
