//! Iso-level polylines of the quantum-cooperativity map.
//!
//! Marching squares over the (loaded Q, photon number) lattice. Because
//! the cooperativity is locally a power law in both axes, edge crossings
//! are interpolated geometrically (linear in log-value versus
//! log-coordinate), which keeps extracted contours faithful to the model
//! even on coarse logarithmic grids.

use crate::error::{Error, Result};
use crate::sweep::CeffMap;

/// One extracted iso-level polyline in map coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourLine {
    /// The cooperativity value this line traces.
    pub level: f64,
    /// Polyline vertices as `(q_c, n_c)` pairs; closed loops repeat their
    /// first vertex at the end.
    pub points: Vec<(f64, f64)>,
}

/// Lattice edges, identified by the lower-left lattice point they spring
/// from. `H` runs along the Q axis, `V` along the photon axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeId {
    H { i: usize, j: usize },
    V { i: usize, j: usize },
}

/// Geometry of one level set on the lattice: which edges the level crosses
/// and how the crossings pair up inside each cell.
struct LevelGrid<'a> {
    map: &'a CeffMap,
    level: f64,
}

impl LevelGrid<'_> {
    fn nq(&self) -> usize {
        self.map.q_c_grid().len()
    }

    fn nn(&self) -> usize {
        self.map.n_c_grid().len()
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        self.map.c_eff_at(i, j)
    }

    fn inside(&self, i: usize, j: usize) -> bool {
        self.value(i, j) >= self.level
    }

    /// Linear index of an edge, `H` edges first in row-major scan order.
    fn edge_index(&self, edge: EdgeId) -> usize {
        match edge {
            EdgeId::H { i, j } => j * (self.nq() - 1) + i,
            EdgeId::V { i, j } => (self.nq() - 1) * self.nn() + j * self.nq() + i,
        }
    }

    fn n_edges(&self) -> usize {
        (self.nq() - 1) * self.nn() + self.nq() * (self.nn() - 1)
    }

    /// Where the level crosses an edge, in map coordinates. Interpolates
    /// log-value against log-coordinate, falling back to plain linear
    /// interpolation when any quantity is non-positive.
    fn crossing(&self, edge: EdgeId) -> (f64, f64) {
        let (u0, u1, f0, f1, fixed, horizontal) = match edge {
            EdgeId::H { i, j } => (
                self.map.q_c_grid()[i],
                self.map.q_c_grid()[i + 1],
                self.value(i, j),
                self.value(i + 1, j),
                self.map.n_c_grid()[j],
                true,
            ),
            EdgeId::V { i, j } => (
                self.map.n_c_grid()[j],
                self.map.n_c_grid()[j + 1],
                self.value(i, j),
                self.value(i, j + 1),
                self.map.q_c_grid()[i],
                false,
            ),
        };
        let geometric = u0 > 0.0 && u1 > 0.0 && f0 > 0.0 && f1 > 0.0 && f0 != f1;
        let u = if geometric {
            let t = (self.level / f0).ln() / (f1 / f0).ln();
            u0 * (u1 / u0).powf(t.clamp(0.0, 1.0))
        } else if f0 == f1 {
            0.5 * (u0 + u1)
        } else {
            let t = ((self.level - f0) / (f1 - f0)).clamp(0.0, 1.0);
            u0 + t * (u1 - u0)
        };
        if horizontal {
            (u, fixed)
        } else {
            (fixed, u)
        }
    }

    /// The 0–2 segments of the level set inside cell `(i, j)`, as pairs of
    /// crossed edges. Saddle cells are disambiguated by the mean of the
    /// four corner values.
    fn cell_segments(&self, i: usize, j: usize) -> Vec<(EdgeId, EdgeId)> {
        let bottom = EdgeId::H { i, j };
        let top = EdgeId::H { i, j: j + 1 };
        let left = EdgeId::V { i, j };
        let right = EdgeId::V { i: i + 1, j };
        let mask = (self.inside(i, j) as usize)
            | (self.inside(i + 1, j) as usize) << 1
            | (self.inside(i + 1, j + 1) as usize) << 2
            | (self.inside(i, j + 1) as usize) << 3;
        match mask {
            0 | 15 => vec![],
            1 | 14 => vec![(left, bottom)],
            2 | 13 => vec![(bottom, right)],
            3 | 12 => vec![(left, right)],
            4 | 11 => vec![(right, top)],
            6 | 9 => vec![(bottom, top)],
            7 | 8 => vec![(top, left)],
            5 | 10 => {
                let center = 0.25
                    * (self.value(i, j)
                        + self.value(i + 1, j)
                        + self.value(i, j + 1)
                        + self.value(i + 1, j + 1));
                let joined = (center >= self.level) == (mask == 5);
                if joined {
                    vec![(left, top), (bottom, right)]
                } else {
                    vec![(left, bottom), (right, top)]
                }
            }
            _ => unreachable!("4-bit mask"),
        }
    }
}

/// Extract iso-level polylines from a cooperativity map. Levels that the
/// map never reaches simply produce no lines; levels must be positive.
/// Output order is deterministic: by level, then by lattice scan order of
/// each line's starting edge.
pub fn iso_ceff_contours(map: &CeffMap, levels: &[f64]) -> Result<Vec<ContourLine>> {
    if map.q_c_grid().len() < 2 || map.n_c_grid().len() < 2 {
        return Err(Error::MissingData(
            "contour extraction needs at least a 2 x 2 lattice".into(),
        ));
    }
    let mut lines = Vec::new();
    for &level in levels {
        Error::check_positive("contour level", level)?;
        let grid = LevelGrid { map, level };
        lines.extend(trace_level(&grid));
    }
    Ok(lines)
}

/// Assemble the per-cell segments of one level into polylines. Every
/// crossed edge touches at most two segments, so the segments form simple
/// chains and loops; chains are emitted first, each starting from its
/// lowest-index open end.
fn trace_level(grid: &LevelGrid) -> Vec<ContourLine> {
    let n_edges = grid.n_edges();
    // Adjacency between crossed edges: up to two partners each.
    let mut partners: Vec<[Option<usize>; 2]> = vec![[None; 2]; n_edges];
    let mut edge_of: Vec<Option<EdgeId>> = vec![None; n_edges];
    let mut connect = |a: EdgeId, b: EdgeId| {
        let (ia, ib) = (grid.edge_index(a), grid.edge_index(b));
        edge_of[ia] = Some(a);
        edge_of[ib] = Some(b);
        for (from, to) in [(ia, ib), (ib, ia)] {
            let slot = partners[from].iter_mut().find(|s| s.is_none());
            if let Some(slot) = slot {
                *slot = Some(to);
            }
        }
    };
    for j in 0..grid.nn() - 1 {
        for i in 0..grid.nq() - 1 {
            for (a, b) in grid.cell_segments(i, j) {
                connect(a, b);
            }
        }
    }

    let degree = |idx: usize, partners: &[[Option<usize>; 2]]| {
        partners[idx].iter().flatten().count()
    };
    let mut visited = vec![false; n_edges];
    let mut lines = Vec::new();
    // Open chains first (degree-1 endpoints), then closed loops.
    for pass in 0..2 {
        for start in 0..n_edges {
            let wanted = if pass == 0 { 1 } else { 2 };
            if visited[start] || edge_of[start].is_none() || degree(start, &partners) != wanted {
                continue;
            }
            let mut points = Vec::new();
            let mut current = start;
            let mut previous = usize::MAX;
            loop {
                visited[current] = true;
                points.push(grid.crossing(edge_of[current].expect("crossed edge")));
                let next = partners[current]
                    .iter()
                    .flatten()
                    .copied()
                    .find(|&n| n != previous && !visited[n]);
                match next {
                    Some(n) => {
                        previous = current;
                        current = n;
                    }
                    None => break,
                }
            }
            if pass == 1 {
                // Close the loop explicitly.
                points.push(points[0]);
            }
            if points.len() >= 2 {
                lines.push(ContourLine {
                    level: grid.level,
                    points,
                });
            }
        }
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{hot_bath, HotBathModel};
    use crate::cavity::OpticalCavity;
    use crate::cooling::{cooled_occupancy, parametric_rate};
    use crate::mechanics::MechanicalMode;
    use crate::sweep::{ceff_map, log_grid};

    /// A synthetic separable power-law field `C = q * n`, exactly the form
    /// the geometric interpolation is built for.
    fn product_map() -> CeffMap {
        let q = log_grid(1.0, 100.0, 6).unwrap();
        let n = log_grid(0.01, 1.0, 5).unwrap();
        let mut c = Vec::new();
        for &qi in &q {
            for &ni in &n {
                c.push(qi * ni);
            }
        }
        CeffMap::from_grids(q.clone(), n.clone(), vec![0.0; c.len()], c).unwrap()
    }

    #[test]
    fn product_field_contours_are_exact_hyperbolas() {
        let map = product_map();
        let lines = iso_ceff_contours(&map, &[1.0]).unwrap();
        assert!(!lines.is_empty());
        let mut n_points = 0;
        for line in &lines {
            for &(q, n) in &line.points {
                assert!(
                    (q * n - 1.0).abs() < 1e-9,
                    "point ({q}, {n}) off the q*n = 1 contour"
                );
                n_points += 1;
            }
        }
        assert!(n_points >= 4);
    }

    #[test]
    fn missing_levels_and_bad_levels() {
        let map = product_map();
        // The field spans [0.01, 100]; 1e4 is never reached.
        assert!(iso_ceff_contours(&map, &[1e4]).unwrap().is_empty());
        assert!(iso_ceff_contours(&map, &[-1.0]).is_err());
        assert!(iso_ceff_contours(&map, &[]).unwrap().is_empty());
    }

    #[test]
    fn extraction_is_deterministic() {
        let map = product_map();
        let a = iso_ceff_contours(&map, &[0.1, 1.0, 10.0]).unwrap();
        let b = iso_ceff_contours(&map, &[0.1, 1.0, 10.0]).unwrap();
        assert_eq!(a, b);
        let levels: Vec<f64> = a.iter().map(|l| l.level).collect();
        let mut sorted = levels.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(levels, sorted, "lines ordered by level");
    }

    #[test]
    fn model_contours_feed_back_within_two_percent() {
        let cavity = OpticalCavity::from_hz(193.4e12, 1.187e9, 181e6).unwrap();
        let mode = MechanicalMode::from_hz(10.02e9, 8.28, 14.54e3, 1.182e6).unwrap();
        let model = HotBathModel::reference_fit();
        let q_grid = log_grid(1e5, 1e7, 25).unwrap();
        let n_grid = log_grid(1e-3, 1e3, 31).unwrap();
        let map = ceff_map(&cavity, &mode, &model, &q_grid, &n_grid).unwrap();
        let intracavity_only = HotBathModel { beta: 0.0, ..model };

        let lines = iso_ceff_contours(&map, &[0.5, 1.0, 2.0, 5.0]).unwrap();
        assert!(lines.len() >= 4);
        let mut checked = 0;
        for line in &lines {
            for &(q_c, n_c) in &line.points {
                let rescaled = cavity.with_q_loaded(q_c).unwrap();
                let bath = hot_bath(&intracavity_only, &mode, n_c, 0.0).unwrap();
                let gamma_om = parametric_rate(&mode, &rescaled, n_c).unwrap();
                let direct = cooled_occupancy(&bath, gamma_om, n_c, 0.0).unwrap();
                assert!(
                    (direct.c_eff / line.level - 1.0).abs() < 0.02,
                    "contour level {} re-evaluates to {} at ({q_c:.4e}, {n_c:.4e})",
                    line.level,
                    direct.c_eff
                );
                checked += 1;
            }
        }
        assert!(checked > 40, "only {checked} contour points extracted");
    }
}
