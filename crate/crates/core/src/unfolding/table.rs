use serde::Serialize;

use super::{hyperelliptic_criterion, pillowcase_double, HyperKind, Stratum, UnfoldingError};
use crate::exactnum::{rat, QuadElem, Rational};
use crate::polygon::{AnglePi, PolygonSpec};
use num_traits::Zero;

/// One row of the table of genus-two billiards, parameterized by `n`.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub index: usize,
    pub pattern: &'static str,
    pub ns: Vec<u64>,
    pub label: &'static str,
}

impl TableRow {
    pub fn angles(&self, n: u64) -> Vec<AnglePi> {
        let f = AnglePi::new;
        let half = f(1, 2);
        let mut v = match self.index {
            1 => vec![half, half, half, half, half, f(3, 2)],
            2 => vec![f(1, n), f(n - 1, n), half, half],
            3 => vec![f(1, n), f(1, n), f(n - 1, n), f(n - 1, n)],
            4 => vec![f(1, 2 * n), f(n - 1, 2 * n), half],
            5 => vec![f(2, 2 * n), f(n - 2, 2 * n), half],
            6 => vec![f(1, n), f(1, n), f(n - 2, n)],
            7 => vec![f(2, n), f(2, n), f(n - 4, n)],
            _ => unreachable!("row index"),
        };
        v.sort();
        v
    }

    /// Instances of the row: `(n, sorted angles)`; the hexagon row has no `n`.
    pub fn instances(&self) -> Vec<(Option<u64>, Vec<AnglePi>)> {
        if self.ns.is_empty() {
            vec![(None, self.angles(0))]
        } else {
            self.ns.iter().map(|&n| (Some(n), self.angles(n))).collect()
        }
    }
}

pub fn genus_two_rows() -> Vec<TableRow> {
    let row = |index, pattern, ns: &[u64], label| TableRow {
        index,
        pattern,
        ns: ns.to_vec(),
        label,
    };
    vec![
        row(1, "(3/2,(1/2)^5)", &[], "H(2)"),
        row(2, "(1/n,(n-1)/n,1/2,1/2)", &[3, 4], "H(1,1), H(2)"),
        row(3, "(1/n,1/n,(n-1)/n,(n-1)/n)", &[3], "H(1,1)"),
        row(4, "(1/(2n),(n-1)/(2n),1/2)", &[4, 5], "Regular 2n-gon locus"),
        row(5, "(2/(2n),(n-2)/(2n),1/2)", &[5], "Double pentagon locus"),
        row(6, "(1/n,1/n,(n-2)/n)", &[5, 6], "Double regular n-gon locus"),
        row(7, "(2/n,2/n,(n-4)/n)", &[5], "Decagon locus"),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Genus2Class {
    pub row: usize,
    pub pattern: String,
    pub n: Option<u64>,
    /// Row label of the orbit closure.
    pub orbit_closure: String,
    /// Stratum of this instance.
    pub stratum: Stratum,
    pub hyperelliptic: HyperKind,
    /// Length-ratio condition under which the unfolding is a torus cover.
    pub torus_condition: String,
}

impl Genus2Class {
    pub fn family(&self) -> String {
        match self.n {
            Some(n) => format!("{}, n={n}", self.pattern),
            None => self.pattern.clone(),
        }
    }
}

/// Locates a genus-two table in the table of rows, by sorted angle multiset.
pub fn classify_genus2(spec: &PolygonSpec) -> Result<Genus2Class, UnfoldingError> {
    let cone = pillowcase_double(spec);
    let g = cone.genus()?;
    if g != 2 {
        return Err(UnfoldingError::NotGenusTwo(g));
    }
    let sorted = spec.sorted_angles();
    let verdict = hyperelliptic_criterion(&cone)?;
    for row in genus_two_rows() {
        for (n, angles) in row.instances() {
            if angles == sorted {
                let torus_condition = match sorted.len() {
                    6 => "x1/x2 and y1/y2 rational",
                    4 => "x1/x2 rational",
                    _ => "angles (1/6,1/6,2/3)",
                };
                return Ok(Genus2Class {
                    row: row.index,
                    pattern: row.pattern.to_string(),
                    n,
                    orbit_closure: row.label.to_string(),
                    stratum: cone.stratum(),
                    hyperelliptic: verdict.kind,
                    torus_condition: torus_condition.to_string(),
                });
            }
        }
    }
    Err(UnfoldingError::InvalidConeData(format!(
        "genus two but no table row matches {sorted:?}"
    )))
}

/// Ratios `|e_i| / |e_j|` over all pairs of parallel sides.
fn parallel_ratios(spec: &PolygonSpec) -> Result<Vec<QuadElem>, UnfoldingError> {
    let k = spec.k();
    let mut out = Vec::new();
    if let Some(v) = &spec.vertices {
        let e: Vec<_> = (0..k).map(|i| &v[(i + 1) % k] - &v[i]).collect();
        for i in 0..k {
            for j in i + 1..k {
                if e[i].cross(&e[j]).is_zero() {
                    let t = if e[j].x.is_zero() {
                        &e[i].y / &e[j].y
                    } else {
                        &e[i].x / &e[j].x
                    };
                    out.push(t.abs());
                }
            }
        }
        return Ok(out);
    }
    let Some(l) = &spec.side_lengths else {
        return Err(UnfoldingError::NeedsLengths(
            "torus-cover test compares parallel sides".into(),
        ));
    };
    // Side i points in direction psi_i (units of pi); sides are parallel when
    // the directions differ by an integer.
    let mut psi = vec![Rational::from_integer(0.into()); k];
    for i in 1..k {
        psi[i] = &psi[i - 1] + rat(1, 1) - spec.angles[i].value();
    }
    for i in 0..k {
        for j in i + 1..k {
            if (&psi[i] - &psi[j]).is_integer() {
                out.push(&l[i] / &l[j]);
            }
        }
    }
    Ok(out)
}

/// Rank over `Q` of the span of the edge periods of the unfolding.
fn period_rank(spec: &PolygonSpec) -> Result<usize, UnfoldingError> {
    let (surf, _) =
        crate::surface::unfolding_copies(spec).map_err(|e| UnfoldingError::InvalidConeData(e.to_string()))?;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (p, poly) in surf.polygons.iter().enumerate() {
        for e in 0..poly.len() {
            let v = surf.edge((p, e));
            rows.push(vec![
                v.x.rational_part().clone(),
                v.x.radical_part().clone(),
                v.y.rational_part().clone(),
                v.y.radical_part().clone(),
            ]);
        }
    }
    Ok(rational_rank(rows))
}

fn rational_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let pivot = rows[rank].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &pivot[c];
                for k in c..cols {
                    let t = &f * &pivot[k];
                    rows[r][k] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether the unfolding of a genus-two table covers a torus: the periods of
/// a torus cover span a two-dimensional rational space. Tables given only by
/// side lengths compare the lengths of parallel sides instead.
pub fn torus_cover_check(spec: &PolygonSpec) -> Result<bool, UnfoldingError> {
    classify_genus2(spec).map_err(|e| match e {
        UnfoldingError::NotGenusTwo(g) => UnfoldingError::WrongFamily(g),
        e => e,
    })?;
    if spec.k() == 3 {
        let f = AnglePi::new;
        return Ok(spec.sorted_angles() == [f(1, 6), f(1, 6), f(2, 3)]);
    }
    if spec.vertices.is_some() {
        return Ok(period_rank(spec)? <= 2);
    }
    Ok(parallel_ratios(spec)?.iter().all(QuadElem::is_rational))
}
