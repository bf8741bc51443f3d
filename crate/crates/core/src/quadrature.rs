//! Gauss–Legendre rules for cell-volume and cell-face integrals.
//!
//! Face integrals use a fixed low-order rule. Cell-volume integrals of the
//! THINC function use a tensor rule whose per-axis order is either fixed or
//! picked from the steepness of the integrand along that axis: the logistic
//! `1/(1+exp(-2 beta s x))` has its nearest complex poles at distance
//! `pi/(2 beta s)` from the real line, which bounds the Gauss–Legendre error
//! through the Bernstein ellipse through those poles.

use std::f64::consts::PI;

/// Largest per-axis order kept in the node table.
pub const MAX_ORDER: usize = 32;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule, nodes by Newton iteration on `P_n` from the
    /// Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for k in 0..m {
            let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// How the per-axis order of the cell-volume rule is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VolumeRule {
    /// Same order on both axes for every cell.
    Tensor(usize),
    /// Per-cell, per-axis order estimated to reach the given relative
    /// accuracy on the THINC integrand.
    Adaptive { tolerance: f64 },
}

/// Cell-volume and face rules used by reconstruction and flux evaluation.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    volume: VolumeRule,
    face: GaussLegendre,
    table: Vec<GaussLegendre>,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::new(VolumeRule::Adaptive { tolerance: 1e-10 }, 2)
    }
}

impl QuadratureRule {
    pub fn new(volume: VolumeRule, face_points: usize) -> Self {
        if let VolumeRule::Tensor(n) = volume {
            assert!((1..=MAX_ORDER).contains(&n), "tensor order {n} out of range");
        }
        Self {
            volume,
            face: GaussLegendre::new(face_points),
            table: (1..=MAX_ORDER).map(GaussLegendre::new).collect(),
        }
    }

    /// Fixed `n x n` tensor rule with a 2-point face rule.
    pub fn tensor(n: usize) -> Self {
        Self::new(VolumeRule::Tensor(n), 2)
    }

    pub fn volume_rule(&self) -> VolumeRule {
        self.volume
    }

    pub fn face(&self) -> &GaussLegendre {
        &self.face
    }

    /// Stored rule of order `n` (1-based).
    pub fn line(&self, n: usize) -> &GaussLegendre {
        &self.table[n.clamp(1, MAX_ORDER) - 1]
    }

    /// Per-axis orders for a cell of widths `hx, hy`, where `slope_x, slope_y`
    /// bound `|dP/dx|`, `|dP/dy|` over the cell.
    pub fn volume_orders(&self, beta: f64, hx: f64, hy: f64, slope_x: f64, slope_y: f64) -> (usize, usize) {
        match self.volume {
            VolumeRule::Tensor(n) => (n, n),
            VolumeRule::Adaptive { tolerance } => (
                adaptive_order(beta * slope_x * hx, tolerance),
                adaptive_order(beta * slope_y * hy, tolerance),
            ),
        }
    }

    /// Tensor points `(X, Y, w)` in cell-local coordinates for a cell of
    /// widths `hx, hy` centered at the origin. Weights sum to `hx * hy`.
    pub fn volume_points(&self, hx: f64, hy: f64, nx: usize, ny: usize, out: &mut Vec<(f64, f64, f64)>) {
        out.clear();
        let rx = self.line(nx);
        let ry = self.line(ny);
        for (&xa, &wa) in rx.nodes.iter().zip(&rx.weights) {
            for (&yb, &wb) in ry.nodes.iter().zip(&ry.weights) {
                out.push((0.5 * hx * xa, 0.5 * hy * yb, 0.25 * hx * hy * wa * wb));
            }
        }
    }
}

/// Order such that `rho^(-2n) <= tolerance`, with `rho` the Bernstein
/// ellipse parameter of the nearest pole of the logistic of argument range
/// `steepness` (= beta * slope * h) over `[-1, 1]`.
fn adaptive_order(steepness: f64, tolerance: f64) -> usize {
    const MIN_ORDER: usize = 3;
    if steepness <= 0.0 || !steepness.is_finite() {
        return MIN_ORDER;
    }
    let a = PI / steepness;
    let rho = a + (a * a + 1.0).sqrt();
    let n = ((1.0 / tolerance).ln() / (2.0 * rho.ln())).ceil();
    (n as usize).clamp(MIN_ORDER, MAX_ORDER)
}
