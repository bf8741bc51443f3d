//! Marching-squares contours of cell-centered fields and of the sub-cell
//! interface `psi = 0` of each reconstructed cell.
//!
//! Ambiguous (saddle) squares are resolved by the mean of their four corner
//! values: when the mean lies on the inside, the two inside corners are
//! connected through the square.

use std::collections::HashMap;

use crate::grid::{CellField, Point};
use crate::transport::SchemeState;

/// Default number of sub-samples per cell edge for PSI extraction.
pub const DEFAULT_PSI_SAMPLES: usize = 8;

/// An open or closed chain of points; closed chains repeat their first point.
pub type Polyline = Vec<Point>;

/// PSI polylines of one interface cell.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiSegment {
    pub cell: (isize, isize),
    pub points: Polyline,
}

pub fn is_closed(line: &[Point]) -> bool {
    line.len() > 2 && line.first() == line.last()
}

/// Signed area enclosed by a closed polyline (positive counter-clockwise).
pub fn polygon_area(line: &[Point]) -> f64 {
    0.5 * line
        .windows(2)
        .map(|w| w[0].x * w[1].y - w[1].x * w[0].y)
        .sum::<f64>()
}

/// Edge of the node lattice: horizontal from node `(i, j)` to `(i+1, j)` or
/// vertical from `(i, j)` to `(i, j+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Iso-lines at `level` of the bilinear interpolant of node values laid out
/// row-major over `(i, j)` with `nj` nodes per row. `pos` maps a node to its
/// location.
fn march(values: &[f64], ni: usize, nj: usize, level: f64, pos: impl Fn(usize, usize) -> Point) -> Vec<Polyline> {
    if ni < 2 || nj < 2 {
        return Vec::new();
    }
    let val = |i: usize, j: usize| values[i * nj + j];
    let inside = |i: usize, j: usize| val(i, j) >= level;
    let crossing = |e: Edge| {
        let ((i0, j0), (i1, j1)) = match e {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (a, b) = (val(i0, j0), val(i1, j1));
        let t = ((level - a) / (b - a)).clamp(0.0, 1.0);
        let (p, q) = (pos(i0, j0), pos(i1, j1));
        Point::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
    };

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for i in 0..ni - 1 {
        for j in 0..nj - 1 {
            let c = [inside(i, j), inside(i + 1, j), inside(i + 1, j + 1), inside(i, j + 1)];
            // edges: bottom, right, top, left; edge k joins corners k and k+1
            let e = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            let cut: Vec<usize> = (0..4).filter(|&k| c[k] != c[(k + 1) % 4]).collect();
            match cut.len() {
                2 => segments.push((e[cut[0]], e[cut[1]])),
                4 => {
                    let mean = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
                    // isolate the corners on the opposite side of the center
                    let center_inside = mean >= level;
                    let isolated = if c[0] == center_inside { [1, 3] } else { [0, 2] };
                    for k in isolated {
                        segments.push((e[(k + 3) % 4], e[k]));
                    }
                }
                _ => {}
            }
        }
    }
    join(&segments, crossing)
}

/// Chains segments sharing edges into polylines, open chains first.
fn join(segments: &[(Edge, Edge)], point: impl Fn(Edge) -> Point) -> Vec<Polyline> {
    let mut by_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(k);
        by_edge.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start_seg: usize, start_edge: Edge, used: &mut Vec<bool>| {
        let mut edges = vec![start_edge];
        let (mut seg, mut at) = (start_seg, start_edge);
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            edges.push(next);
            at = next;
            match by_edge[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        edges.into_iter().map(&point).collect::<Polyline>()
    };

    // open chains start at an edge owned by a single segment
    for k in 0..segments.len() {
        if used[k] {
            continue;
        }
        let (a, b) = segments[k];
        let start = if by_edge[&a].len() == 1 {
            Some(a)
        } else if by_edge[&b].len() == 1 {
            Some(b)
        } else {
            None
        };
        if let Some(e) = start {
            lines.push(walk(k, e, &mut used));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            lines.push(walk(k, segments[k].0, &mut used));
        }
    }
    lines
}

/// Contour of the bilinear interpolant of cell-center values at `level`.
pub fn extract_contour(field: &CellField, level: f64) -> Vec<Polyline> {
    let g = field.grid();
    let values: Vec<f64> = field.interior_values().collect();
    march(&values, g.nx, g.ny, level, |i, j| g.center_unchecked(i as isize, j as isize))
}

/// Zero set of `psi` in every reconstructed cell, traced on a
/// `samples x samples` subgrid of the cell box.
pub fn extract_psi_segments(state: &SchemeState, samples: usize) -> Vec<PsiSegment> {
    let s = samples.max(1);
    let mut out = Vec::new();
    let mut values = vec![0.0; (s + 1) * (s + 1)];
    for r in state.recons.iter() {
        let (lo, hi) = state.grid.cell_bounds(r.cell.0, r.cell.1);
        let pos = |a: usize, b: usize| {
            Point::new(
                lo.x + (hi.x - lo.x) * a as f64 / s as f64,
                lo.y + (hi.y - lo.y) * b as f64 / s as f64,
            )
        };
        for a in 0..=s {
            for b in 0..=s {
                values[a * (s + 1) + b] = r.psi_eval(pos(a, b));
            }
        }
        for points in march(&values, s + 1, s + 1, 0.0, pos) {
            out.push(PsiSegment { cell: r.cell, points });
        }
    }
    out
}
