use num_integer::Integer;
use rayon::prelude::*;

use super::SphereConeData;
use crate::polygon::AnglePi;

/// Reduced fractions in `(0, 2)`, excluding `1`, with denominator at most
/// `max_denom`, in increasing order.
pub fn scan_fractions(max_denom: u64) -> Vec<AnglePi> {
    let mut out = Vec::new();
    for b in 1..=max_denom {
        for a in 1..2 * b {
            if a.gcd(&b) == 1 && !(a == 1 && b == 1) {
                out.push(AnglePi::new(a, b));
            }
        }
    }
    out.sort();
    out
}

/// Every sphere cone datum with at most `max_points` cone points and
/// denominators at most `max_denom` whose canonical cover has genus two.
///
/// Genus two forces `sum 1/b >= n - 3`; since no `1/b` exceeds `1/2` this
/// also bounds `n <= 6`.
pub fn scan_genus2(max_points: usize, max_denom: u64) -> Vec<SphereConeData> {
    let fr = scan_fractions(max_denom);
    let l = (1..=max_denom).fold(1u64, |acc, b| acc.lcm(&b));
    let ctx = Ctx {
        val: fr.iter().map(|x| x.numer_over(l)).collect(),
        inv: fr.iter().map(|x| l / x.b).collect(),
        fr,
        l,
    };
    let mut found: Vec<SphereConeData> = (3..=max_points.min(6))
        .into_par_iter()
        .flat_map(|n| {
            let mut out = Vec::new();
            let mut stack = Vec::with_capacity(n);
            ctx.extend(n, 0, &mut stack, 0, 0, &mut out);
            out
        })
        .collect();
    found.sort_by_key(|c| c.expanded());
    found
}

/// Fractions scaled by the common denominator `l`.
struct Ctx {
    fr: Vec<AnglePi>,
    val: Vec<u64>,
    inv: Vec<u64>,
    l: u64,
}

impl Ctx {
    fn extend(
        &self,
        n: usize,
        from: usize,
        stack: &mut Vec<usize>,
        sum: u64,
        inv: u64,
        out: &mut Vec<SphereConeData>,
    ) {
        let target = (n as u64 - 2) * self.l;
        let left = (n - stack.len()) as u64;
        if left == 0 {
            if sum == target {
                let pts: Vec<(u64, u64)> = stack.iter().map(|&i| (self.fr[i].a, self.fr[i].b)).collect();
                let cone = SphereConeData::from_fractions(&pts);
                if cone.genus() == Ok(2) {
                    out.push(cone);
                }
            }
            return;
        }
        if 2 * inv + left * self.l < 2 * (n as u64).saturating_sub(3) * self.l {
            return;
        }
        if sum + left * 2 * self.l <= target {
            return;
        }
        for i in from..self.fr.len() {
            // Remaining entries are at least this one.
            if sum + self.val[i] * left > target {
                break;
            }
            stack.push(i);
            self.extend(n, i, stack, sum + self.val[i], inv + self.inv[i], out);
            stack.pop();
        }
    }
}
