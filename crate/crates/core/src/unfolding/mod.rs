//! Cone data of the pillowcase double, genus of the canonical unfolding and
//! the hyperelliptic criterion.
//!
//! Cone angles here are in units of `2pi`; billiard angles (module polygon)
//! are in units of `pi`. A vertex of angle `(a/b)pi` doubles to a cone point
//! of angle `(a/b)2pi`, so the numbers coincide but the types do not.

mod combinatorial;
mod scan;
mod table;

pub use combinatorial::{combinatorial_unfolding, CombinatorialUnfolding, VertexClass};
pub use scan::{scan_fractions, scan_genus2};
pub use table::{classify_genus2, genus_two_rows, torus_cover_check, Genus2Class, TableRow};

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{rat, Rational};
use crate::polygon::{angle_lcm, AnglePi, PolygonSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnfoldingError {
    #[error("invalid cone data: {0}")]
    InvalidConeData(String),
    #[error("unfolding has genus {0}, not two")]
    NotGenusTwo(u64),
    #[error("operation needs a genus-two table; unfolding has genus {0}")]
    WrongFamily(u64),
    #[error("side lengths or vertices are needed: {0}")]
    NeedsLengths(String),
}

impl UnfoldingError {
    pub fn code(&self) -> &'static str {
        match self {
            UnfoldingError::InvalidConeData(_) => "InvalidConeData",
            UnfoldingError::NotGenusTwo(_) => "NotGenusTwo",
            UnfoldingError::WrongFamily(_) => "WrongFamily",
            UnfoldingError::NeedsLengths(_) => "NeedsLengths",
        }
    }
}

/// `multiplicity` cone points of angle `(a/b)2pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConeAngle2Pi {
    pub a: u64,
    pub b: u64,
    pub multiplicity: u64,
}

impl ConeAngle2Pi {
    pub fn value(&self) -> Rational {
        rat(self.a as i64, self.b as i64)
    }
}

/// Cone points of a flat sphere, grouped by angle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereConeData {
    pub cones: Vec<ConeAngle2Pi>,
}

impl SphereConeData {
    /// Groups reduced fractions `(a, b)` by value.
    pub fn from_fractions(fr: &[(u64, u64)]) -> Self {
        let mut groups: BTreeMap<AnglePi, u64> = BTreeMap::new();
        for &(a, b) in fr {
            *groups.entry(AnglePi::new(a, b)).or_default() += 1;
        }
        SphereConeData {
            cones: groups
                .into_iter()
                .map(|(x, m)| ConeAngle2Pi {
                    a: x.a,
                    b: x.b,
                    multiplicity: m,
                })
                .collect(),
        }
    }

    /// One entry per cone point, in increasing order.
    pub fn expanded(&self) -> Vec<AnglePi> {
        self.cones
            .iter()
            .flat_map(|c| std::iter::repeat(AnglePi::new(c.a, c.b)).take(c.multiplicity as usize))
            .collect()
    }

    pub fn n(&self) -> u64 {
        self.cones.iter().map(|c| c.multiplicity).sum()
    }

    pub fn d(&self) -> u64 {
        angle_lcm(&self.expanded())
    }

    /// Flat-sphere Gauss-Bonnet: the angles (in units of `2pi`) sum to `n - 2`.
    pub fn check(&self) -> Result<(), UnfoldingError> {
        let n = self.n();
        if n < 3 {
            return Err(UnfoldingError::InvalidConeData(format!("{n} cone points")));
        }
        let total: Rational = self
            .cones
            .iter()
            .map(|c| c.value() * Rational::from_integer(c.multiplicity.into()))
            .sum();
        if total != rat(n as i64 - 2, 1) {
            return Err(UnfoldingError::InvalidConeData(format!(
                "angles sum to {total}*2pi, expected {}*2pi",
                n - 2
            )));
        }
        Ok(())
    }

    /// Genus of the canonical degree-`d` cyclic cover:
    /// `g = 1 + (d/2)(n - 2 - sum 1/b)`.
    pub fn genus(&self) -> Result<u64, UnfoldingError> {
        self.check()?;
        let d = self.d();
        let inv: Rational = self
            .cones
            .iter()
            .map(|c| rat(c.multiplicity as i64, c.b as i64))
            .sum();
        let n = self.n() as i64;
        let g = rat(1, 1) + rat(d as i64, 2) * (rat(n - 2, 1) - inv);
        if !g.is_integer() || g < Rational::zero() {
            return Err(UnfoldingError::InvalidConeData(format!("genus {g}")));
        }
        Ok(g.to_integer().to_u64().unwrap_or(0))
    }

    /// Zero orders of the lifted abelian differential: each cone of angle
    /// `(a/b)2pi` lifts to `d/b` points of angle `a*2pi`.
    pub fn stratum(&self) -> Stratum {
        let d = self.d();
        let mut orders = Vec::new();
        for c in &self.cones {
            if c.a >= 2 {
                for _ in 0..c.multiplicity * (d / c.b) {
                    orders.push(c.a - 1);
                }
            }
        }
        Stratum::new(orders)
    }
}

/// The doubled table as a flat sphere.
pub fn pillowcase_double(spec: &PolygonSpec) -> SphereConeData {
    let fr: Vec<(u64, u64)> = spec.angles.iter().map(|a| (a.a, a.b)).collect();
    SphereConeData::from_fractions(&fr)
}

pub fn unfolding_genus(spec: &PolygonSpec) -> Result<u64, UnfoldingError> {
    pillowcase_double(spec).genus()
}

/// A stratum `H(k_1, ..., k_m)` of abelian differentials.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Stratum(pub Vec<u64>);

impl Stratum {
    pub fn new(mut orders: Vec<u64>) -> Self {
        orders.sort_unstable_by(|a, b| b.cmp(a));
        Stratum(orders)
    }

    pub fn genus(&self) -> u64 {
        self.0.iter().sum::<u64>() / 2 + 1
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "H(0)");
        }
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "H({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HyperKind {
    DeckInvolution,
    Special,
    NotHyperelliptic,
}

/// The pattern that matched, with numerators taken over the common
/// denominator `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "pattern", rename_all = "snake_case")]
pub enum Witness {
    /// `(a1/d, a2/d, odd/2, ...)` with `d = 2k`.
    Deck {
        d: u64,
        k: u64,
        m: u64,
        a1: u64,
        a2: u64,
        genus: u64,
    },
    /// `(a1, a1, a2, a2)/d` or `(a1, a1, a2)/d`.
    Special {
        d: u64,
        a1: u64,
        a2: u64,
        points: u64,
    },
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperellipticVerdict {
    pub kind: HyperKind,
    pub witness: Witness,
}

pub fn hyperelliptic_criterion(cone: &SphereConeData) -> Result<HyperellipticVerdict, UnfoldingError> {
    let genus = cone.genus()?;
    let d = cone.d();
    let pts = cone.expanded();
    let n = pts.len() as u64;
    let num: Vec<u64> = pts.iter().map(|x| x.numer_over(d)).collect();

    if d % 2 == 0 {
        let k = d / 2;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let rest_half = (0..pts.len())
                    .filter(|&l| l != i && l != j)
                    .all(|l| pts[l].b == 2);
                if !rest_half || num[i].gcd(&k) != 1 || num[j].gcd(&k) != 1 {
                    continue;
                }
                let m = (num[i] % 2) + (num[j] % 2);
                if k * (n - 2) + m == 2 * genus + 2 {
                    return Ok(HyperellipticVerdict {
                        kind: HyperKind::DeckInvolution,
                        witness: Witness::Deck {
                            d,
                            k,
                            m,
                            a1: num[i],
                            a2: num[j],
                            genus,
                        },
                    });
                }
            }
        }
    }

    if let Some((a1, a2)) = special_pattern(&pts, &num, d) {
        return Ok(HyperellipticVerdict {
            kind: HyperKind::Special,
            witness: Witness::Special { d, a1, a2, points: n },
        });
    }
    Ok(HyperellipticVerdict {
        kind: HyperKind::NotHyperelliptic,
        witness: Witness::None,
    })
}

fn special_pattern(pts: &[AnglePi], num: &[u64], d: u64) -> Option<(u64, u64)> {
    let half = AnglePi::new(1, 2);
    let quarter = AnglePi::new(1, 4);
    if pts == [half; 4] || pts == [quarter, quarter, half] {
        return None;
    }
    let coprime = |x: u64| x.gcd(&d) == 1;
    match num {
        [x, x2, y, y2] if x == x2 && y == y2 => {
            if coprime(*x) {
                Some((*x, *y))
            } else if coprime(*y) {
                Some((*y, *x))
            } else {
                None
            }
        }
        [p, q, r] => {
            // Some value occurs twice; it must be coprime to d.
            [(p, q, r), (q, r, p), (p, r, q)]
                .into_iter()
                .find(|(x, x2, _)| x == x2 && coprime(**x))
                .map(|(x, _, y)| (*x, *y))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::parse_angles;

    fn cone(s: &str) -> SphereConeData {
        pillowcase_double(&PolygonSpec::from_angles(parse_angles(s).unwrap()))
    }

    #[test]
    fn genus_examples() {
        assert_eq!(cone("1/2,1/2,1/2,1/2").genus().unwrap(), 1);
        assert_eq!(cone("1/10,2/5,1/2").genus().unwrap(), 2);
        assert_eq!(cone("1/4,1/4,1/4,5/4").genus().unwrap(), 3);
        assert_eq!(cone("1/10,1/10,4/5").genus().unwrap(), 4);
        assert_eq!(cone("1/10,2/5,1/2").d(), 10);
    }

    #[test]
    fn verdicts() {
        let v = hyperelliptic_criterion(&cone("1/4,3/4,1/2,1/2")).unwrap();
        assert_eq!(v.kind, HyperKind::DeckInvolution);
        assert!(matches!(v.witness, Witness::Deck { k: 2, m: 2, .. }));
        let v = hyperelliptic_criterion(&cone("1/5,1/5,3/5")).unwrap();
        assert_eq!(v.kind, HyperKind::Special);
        assert!(matches!(v.witness, Witness::Special { a1: 1, a2: 3, .. }));
        let v = hyperelliptic_criterion(&cone("1/4,1/4,1/4,5/4")).unwrap();
        assert_eq!(v.kind, HyperKind::NotHyperelliptic);
    }

    #[test]
    fn gauss_bonnet_is_enforced() {
        let bad = SphereConeData::from_fractions(&[(1, 3), (1, 3), (1, 2)]);
        assert!(matches!(
            hyperelliptic_criterion(&bad),
            Err(UnfoldingError::InvalidConeData(_))
        ));
    }

    #[test]
    fn strata() {
        assert_eq!(cone("1/8,3/8,1/2").stratum().to_string(), "H(2)");
        assert_eq!(cone("1/3,1/3,2/3,2/3").stratum().to_string(), "H(1,1)");
        assert_eq!(cone("1/5,1/5,3/5").stratum().to_string(), "H(2)");
        assert_eq!(cone("1/2,1/2,1/2,1/2").stratum().to_string(), "H(0)");
    }
}
