use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::exactnum::Rational;
use crate::polygon::{angle_lcm, AnglePi};

/// A cone point of the unfolding: the corners `(copy, vertex)` glued into it
/// and their total angle in units of `pi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexClass {
    pub corners: Vec<(usize, usize)>,
    #[serde(with = "crate::exactnum::rational_string")]
    pub angle_pi: Rational,
}

/// Topology of the unfolding, computed from the angles alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CombinatorialUnfolding {
    pub copies: usize,
    pub edges: usize,
    pub classes: Vec<VertexClass>,
    pub euler_characteristic: i64,
}

impl CombinatorialUnfolding {
    /// Genus from `V - E + F`.
    pub fn genus_euler(&self) -> i64 {
        (2 - self.euler_characteristic) / 2
    }

    /// Genus from Gauss-Bonnet on the corner angles.
    pub fn genus_gauss_bonnet(&self) -> Rational {
        let excess: Rational = self
            .classes
            .iter()
            .map(|c| &c.angle_pi - Rational::from_integer(2.into()))
            .sum();
        // sum (theta - 2pi) = 2pi (2g - 2)
        excess / Rational::from_integer(4.into()) + Rational::from_integer(1.into())
    }
}

/// Group element `R^rot F^flip` where `R` is rotation by `pi/d` and `F` the
/// reflection in the x-axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Elem {
    rot: u64,
    flip: bool,
}

impl Elem {
    fn compose(self, o: Elem, modulus: u64) -> Elem {
        let r = if self.flip {
            (self.rot + modulus - o.rot % modulus) % modulus
        } else {
            (self.rot + o.rot) % modulus
        };
        Elem {
            rot: r,
            flip: self.flip ^ o.flip,
        }
    }
}

/// Unfolds a polygon with the given angles by gluing copies indexed by the
/// dihedral group generated by the side reflections. Edge `i` of copy `g`
/// is glued to edge `i` of copy `g r_i`.
pub fn combinatorial_unfolding(angles: &[AnglePi]) -> CombinatorialUnfolding {
    let k = angles.len();
    let d = angle_lcm(angles);
    let modulus = 2 * d;
    // Direction of side i in units of pi/d: psi_i = psi_{i-1} + d - a_i d / b_i.
    let mut psi = vec![0u64; k];
    for i in 1..k {
        let turn = d + modulus - angles[i].numer_over(d);
        psi[i] = (psi[i - 1] + turn) % modulus;
    }
    let refl: Vec<Elem> = psi
        .iter()
        .map(|p| Elem {
            rot: (2 * p) % modulus,
            flip: true,
        })
        .collect();

    let mut group = vec![Elem { rot: 0, flip: false }];
    let mut idx = std::collections::HashMap::new();
    idx.insert(group[0], 0usize);
    let mut head = 0;
    while head < group.len() {
        let g = group[head];
        head += 1;
        for r in &refl {
            let h = g.compose(*r, modulus);
            if !idx.contains_key(&h) {
                idx.insert(h, group.len());
                group.push(h);
            }
        }
    }

    let n = group.len();
    let mut uf = UnionFind::<usize>::new(n * k);
    for (gi, g) in group.iter().enumerate() {
        for (i, r) in refl.iter().enumerate() {
            let hi = idx[&g.compose(*r, modulus)];
            uf.union(gi * k + i, hi * k + i);
            uf.union(gi * k + (i + 1) % k, hi * k + (i + 1) % k);
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
    for gi in 0..n {
        for v in 0..k {
            by_root.entry(uf.find(gi * k + v)).or_default().push((gi, v));
        }
    }
    let classes: Vec<VertexClass> = by_root
        .into_values()
        .map(|corners| {
            let angle_pi = corners.iter().map(|&(_, v)| angles[v].value()).sum();
            VertexClass { corners, angle_pi }
        })
        .collect();
    let edges = n * k / 2;
    let euler_characteristic = classes.len() as i64 - edges as i64 + n as i64;
    CombinatorialUnfolding {
        copies: n,
        edges,
        classes,
        euler_characteristic,
    }
}
