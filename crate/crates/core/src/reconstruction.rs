//! Cell-local reconstruction: the level set polynomial, the conservation
//! shift, and the THINC function built from both.
//!
//! For an interface cell the level set samples on the 3x3 stencil give a
//! quadratic surrogate `P(x)` of the signed distance in cell-local
//! coordinates. The THINC function
//!
//! ```text
//! H(x) = 1/2 (1 + tanh(beta (P(x) + d)))
//! ```
//!
//! is then pinned to the cell's VOF value by solving for the scalar shift
//! `d` so that the cell average of `H` equals `H̄`. The zero set of
//! `psi(x) = P(x) + d` is the reconstructed sub-cell interface, and
//! `atanh(2H - 1) / beta` maps the THINC function back to `psi`.

use crate::error::{Error, Result};
use crate::grid::{CartesianGrid2D, CellField, Point};
use crate::quadrature::QuadratureRule;

/// Interface band: a cell holds a reconstruction iff `EPS <= H̄ <= 1 - EPS`.
pub const INTERFACE_EPS: f64 = 1e-8;
/// Clamp applied to `H` before the inverse scaling.
pub const INVERSE_CLAMP: f64 = 1e-12;
/// Residual tolerance on the cell-average constraint.
pub const SHIFT_TOLERANCE: f64 = 1e-10;
/// Gradient magnitude below which a fit is considered degenerate.
pub const GRADIENT_FLOOR: f64 = 1e-12;

const MAX_NEWTON_ITERATIONS: usize = 50;
const MAX_BISECTIONS: usize = 400;

/// Quadratic surrogate of the level set around a cell center.
///
/// Coefficients are `[a00, a10, a01, a20, a11, a02]` for the monomials
/// `1, X, Y, X², XY, Y²` with `X = x - origin.x`, `Y = y - origin.y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSetPolynomial {
    pub origin: Point,
    pub coeffs: [f64; 6],
}

impl LevelSetPolynomial {
    pub const fn new(origin: Point, coeffs: [f64; 6]) -> Self {
        Self { origin, coeffs }
    }

    #[inline]
    pub fn eval_local(&self, x: f64, y: f64) -> f64 {
        let [a00, a10, a01, a20, a11, a02] = self.coeffs;
        a00 + x * (a10 + a20 * x + a11 * y) + y * (a01 + a02 * y)
    }

    #[inline]
    pub fn eval(&self, p: Point) -> f64 {
        self.eval_local(p.x - self.origin.x, p.y - self.origin.y)
    }

    pub fn gradient_local(&self, x: f64, y: f64) -> (f64, f64) {
        let [_, a10, a01, a20, a11, a02] = self.coeffs;
        (a10 + 2.0 * a20 * x + a11 * y, a01 + a11 * x + 2.0 * a02 * y)
    }

    pub fn gradient(&self, p: Point) -> (f64, f64) {
        self.gradient_local(p.x - self.origin.x, p.y - self.origin.y)
    }

    /// Least-squares quadratic through the nine cell-center samples of the
    /// 3x3 stencil around `(i, j)`, without normalization.
    ///
    /// On the tensor stencil the normal equations decouple: the odd
    /// monomials are orthogonal to everything else, leaving a 3x3 system
    /// for `1, X², Y²` that is solved in closed form.
    pub fn fit_least_squares(phi: &CellField, i: isize, j: isize) -> Result<Self> {
        let grid = phi.grid();
        let origin = grid.cell_center(i, j)?;
        for (di, dj) in [(-1, -1), (1, 1)] {
            if !grid.contains_index(i + di, j + dj) {
                return Err(Error::Index { i: i + di, j: j + dj });
            }
        }
        let (mut sum, mut s1, mut t1, mut st, mut s2, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for ds in -1isize..=1 {
            for dt in -1isize..=1 {
                let v = phi.at(i + ds, j + dt);
                let (s, t) = (ds as f64, dt as f64);
                sum += v;
                s1 += v * s;
                t1 += v * t;
                st += v * s * t;
                s2 += v * s * s;
                t2 += v * t * t;
            }
        }
        let c10 = s1 / 6.0;
        let c01 = t1 / 6.0;
        let c11 = st / 4.0;
        let even = 0.5 * (s2 + t2) - 2.0 * sum / 3.0;
        let odd = 0.5 * (s2 - t2);
        let c20 = 0.5 * (even + odd);
        let c02 = 0.5 * (even - odd);
        let c00 = (sum - 6.0 * even) / 9.0;
        let (hx, hy) = (grid.dx, grid.dy);
        Ok(Self::new(
            origin,
            [c00, c10 / hx, c01 / hy, c20 / (hx * hx), c11 / (hx * hy), c02 / (hy * hy)],
        ))
    }

    /// Rescales every coefficient by `1/|grad P(origin)|`.
    pub fn normalized(self) -> Result<Self> {
        let g = self.coeffs[1].hypot(self.coeffs[2]);
        if !(g >= GRADIENT_FLOOR) {
            return Err(Error::DegenerateGradient { magnitude: g });
        }
        let mut coeffs = self.coeffs;
        coeffs.iter_mut().for_each(|c| *c /= g);
        Ok(Self { coeffs, ..self })
    }

    /// Bounds on `|dP/dx|` and `|dP/dy|` over a cell of widths `hx, hy`.
    fn slope_bounds(&self, hx: f64, hy: f64) -> (f64, f64) {
        let [_, a10, a01, a20, a11, a02] = self.coeffs;
        (
            a10.abs() + a20.abs() * hx + 0.5 * a11.abs() * hy,
            a01.abs() + a02.abs() * hy + 0.5 * a11.abs() * hx,
        )
    }
}

/// Fits the level set polynomial of cell `(i, j)` and rescales it to unit
/// gradient at the cell center, so that `beta * P` is dimensionless.
pub fn fit_polynomial(phi: &CellField, cell: (isize, isize)) -> Result<LevelSetPolynomial> {
    LevelSetPolynomial::fit_least_squares(phi, cell.0, cell.1)?.normalized()
}

/// Steepness from the half-thickness `eta` (in cells) of the transition
/// layer `eps <= H <= 1 - eps`, in physical `1/length` for cells of size `dx`.
pub fn beta_from_thickness(eta: f64, eps: f64, dx: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("transition cutoff must lie in (0, 0.5), got {eps}")));
    }
    if !(eta > 0.0) || !(dx > 0.0) {
        return Err(Error::Domain(format!("need eta > 0 and dx > 0, got eta={eta}, dx={dx}")));
    }
    Ok((1.0 - 2.0 * eps).atanh() / (eta * dx))
}

/// `1/2 (1 + tanh(beta * s))`.
#[inline]
pub fn thinc(beta: f64, s: f64) -> f64 {
    0.5 * (1.0 + (beta * s).tanh())
}

/// `atanh(2H - 1) / beta` with `H` clamped to `[INVERSE_CLAMP, 1 - INVERSE_CLAMP]`.
#[inline]
pub fn inverse_thinc(beta: f64, h: f64) -> f64 {
    let h = h.clamp(INVERSE_CLAMP, 1.0 - INVERSE_CLAMP);
    0.5 * (h / (1.0 - h)).ln() / beta
}

/// THINC function of one interface cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThincReconstruction {
    pub poly: LevelSetPolynomial,
    pub shift: f64,
    pub beta: f64,
    pub cell: (isize, isize),
    /// Cell widths `(dx, dy)`; the cell box is centered on `poly.origin`.
    pub size: (f64, f64),
}

impl ThincReconstruction {
    /// `psi(p) = P(p) + shift`; its zero set is the sub-cell interface.
    #[inline]
    pub fn psi_eval(&self, p: Point) -> f64 {
        self.poly.eval(p) + self.shift
    }

    /// THINC value `1/2 (1 + tanh(beta psi(p)))`, strictly inside `(0, 1)`
    /// for finite arguments of moderate size.
    #[inline]
    pub fn thinc_eval(&self, p: Point) -> f64 {
        thinc(self.beta, self.psi_eval(p))
    }

    /// Level set recovered from the THINC value by the inverse scaling.
    #[inline]
    pub fn inverse_thinc_eval(&self, p: Point) -> f64 {
        inverse_thinc(self.beta, self.thinc_eval(p))
    }

    /// Cell average of the THINC function under the volume rule.
    pub fn cell_average_h(&self, quad: &QuadratureRule) -> f64 {
        let problem = ShiftProblem::new(&self.poly, self.beta, self.size, quad);
        problem.average(self.shift)
    }
}

/// Cell average of the THINC function, evaluated by quadrature.
pub fn cell_average_h(recon: &ThincReconstruction, quad: &QuadratureRule) -> f64 {
    recon.cell_average_h(quad)
}

/// The one-dimensional root problem `avg(d) = H̄`.
///
/// With `e_q = exp(-2 beta (P_q - m))` precomputed for the mean `m` of the
/// quadrature samples, each evaluation costs one `exp` plus a division per
/// point: `1/2 (1 + tanh(beta (P_q + d))) = 1 / (1 + e_q exp(-2 beta (d + m)))`.
/// When the samples spread too far for `e_q` to be represented, each point
/// is evaluated directly instead.
struct ShiftProblem {
    beta: f64,
    mean: f64,
    /// `2 beta (P_q - m)`
    spread: Vec<f64>,
    /// `exp(-spread)`, present when no entry over- or underflows.
    scaled: Option<Vec<f64>>,
    weights: Vec<f64>,
    h: f64,
}

/// Largest `|2 beta (P_q - m)|` handled by the precomputed exponentials.
const SPREAD_LIMIT: f64 = 600.0;

impl ShiftProblem {
    fn new(poly: &LevelSetPolynomial, beta: f64, (hx, hy): (f64, f64), quad: &QuadratureRule) -> Self {
        let (sx, sy) = poly.slope_bounds(hx, hy);
        let (nx, ny) = quad.volume_orders(beta, hx, hy, sx, sy);
        let mut pts = Vec::with_capacity(nx * ny);
        quad.volume_points(hx, hy, nx, ny, &mut pts);
        let area = hx * hy;
        let values: Vec<f64> = pts.iter().map(|&(x, y, _)| poly.eval_local(x, y)).collect();
        let weights: Vec<f64> = pts.iter().map(|&(_, _, w)| w / area).collect();
        let mean = values.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>();
        let spread: Vec<f64> = values.iter().map(|&v| 2.0 * beta * (v - mean)).collect();
        let scaled = spread
            .iter()
            .all(|z| z.abs() <= SPREAD_LIMIT)
            .then(|| spread.iter().map(|&z| (-z).exp()).collect());
        Self {
            beta,
            mean,
            spread,
            scaled,
            weights,
            h: hx.max(hy),
        }
    }

    /// Calls `f(w, s)` for every point, `s` being the THINC value at shift `d`.
    #[inline]
    fn for_each_sample(&self, d: f64, mut f: impl FnMut(f64, f64)) {
        let shifted = 2.0 * self.beta * (d + self.mean);
        match &self.scaled {
            Some(scaled) => {
                // saturates cleanly: with |spread| <= 600 every sample is
                // within exp(-100) of 0 or 1 once the clamp binds
                let factor = (-shifted).clamp(-700.0, 700.0).exp();
                for (&e, &w) in scaled.iter().zip(&self.weights) {
                    f(w, 1.0 / (1.0 + e * factor));
                }
            }
            None => {
                for (&z, &w) in self.spread.iter().zip(&self.weights) {
                    f(w, 1.0 / (1.0 + (-(z + shifted)).exp()));
                }
            }
        }
    }

    fn average(&self, d: f64) -> f64 {
        let mut avg = 0.0;
        self.for_each_sample(d, |w, s| avg += w * s);
        avg
    }

    /// Average and its derivative with respect to `d`.
    fn average_and_slope(&self, d: f64) -> (f64, f64) {
        let (mut avg, mut slope) = (0.0, 0.0);
        self.for_each_sample(d, |w, s| {
            avg += w * s;
            slope += w * s * (1.0 - s);
        });
        (avg, 2.0 * self.beta * slope)
    }

    /// Safeguarded Newton from `d = 0`, then bisection on an expanding
    /// bracket if Newton has not converged after its iteration budget.
    fn solve(&self, target: f64) -> Option<f64> {
        let step_floor = 1e-12 * self.h;
        let max_step = 2.0 * self.h;
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut d = 0.0;
        for _ in 0..MAX_NEWTON_ITERATIONS {
            let (avg, slope) = self.average_and_slope(d);
            let r = avg - target;
            if r < 0.0 {
                lo = lo.max(d);
            } else {
                hi = hi.min(d);
            }
            if !(slope > 0.0) || !slope.is_finite() {
                break;
            }
            let step = r / slope;
            if r.abs() <= SHIFT_TOLERANCE && step.abs() <= step_floor {
                return Some(d - step);
            }
            let mut next = d - step.clamp(-max_step, max_step);
            if !(next > lo && next < hi) {
                next = if lo.is_finite() && hi.is_finite() {
                    0.5 * (lo + hi)
                } else if lo.is_finite() {
                    lo + max_step
                } else {
                    hi - max_step
                };
            }
            d = next;
        }
        self.bisect(target)
    }

    fn bisect(&self, target: f64) -> Option<f64> {
        let mut lo = -5.0 * self.h;
        let mut hi = 5.0 * self.h;
        let mut grow = 0;
        while self.average(lo) - target > 0.0 || self.average(hi) - target < 0.0 {
            lo *= 2.0;
            hi *= 2.0;
            grow += 1;
            if grow > 60 {
                return None;
            }
        }
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let r = self.average(mid) - target;
            if r < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Shift `d` such that the cell average of `1/2 (1 + tanh(beta (P + d)))`
/// equals `vof`, for a cell of widths `size` centered on `poly.origin`.
pub fn solve_shift(
    poly: &LevelSetPolynomial,
    vof: f64,
    beta: f64,
    cell: (isize, isize),
    size: (f64, f64),
    quad: &QuadratureRule,
) -> Result<f64> {
    if !(INTERFACE_EPS..=1.0 - INTERFACE_EPS).contains(&vof) {
        return Err(Error::OutsideBand {
            value: vof,
            eps: INTERFACE_EPS,
        });
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("steepness must be positive, got {beta}")));
    }
    let problem = ShiftProblem::new(poly, beta, size, quad);
    let d = problem
        .solve(vof)
        .ok_or(Error::ShiftSolve { i: cell.0, j: cell.1 })?;
    if (problem.average(d) - vof).abs() > SHIFT_TOLERANCE {
        return Err(Error::ShiftSolve { i: cell.0, j: cell.1 });
    }
    Ok(d)
}

/// Fits and normalizes the polynomial of one cell and pins it to the VOF
/// value.
pub fn reconstruct_cell(
    phi: &CellField,
    vof: f64,
    cell: (isize, isize),
    beta: f64,
    quad: &QuadratureRule,
) -> Result<ThincReconstruction> {
    let grid: &CartesianGrid2D = phi.grid();
    let poly = fit_polynomial(phi, cell)?;
    let size = (grid.dx, grid.dy);
    let shift = solve_shift(&poly, vof, beta, cell, size, quad)?;
    Ok(ThincReconstruction {
        poly,
        shift,
        beta,
        cell,
        size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_cell_recon(coeffs: [f64; 6], shift: f64, beta: f64) -> ThincReconstruction {
        ThincReconstruction {
            poly: LevelSetPolynomial::new(Point::new(0.0, 0.0), coeffs),
            shift,
            beta,
            cell: (0, 0),
            size: (1.0, 1.0),
        }
    }

    const LINEAR_X: [f64; 6] = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];

    #[test]
    fn fit_reproduces_linear_field() {
        let g = CartesianGrid2D::unit_square(16).unwrap();
        let phi = CellField::from_fn(&g, |i, j| g.cell_center(i, j).unwrap().x - 0.5);
        let poly = fit_polynomial(&phi, (5, 7)).unwrap();
        let c = g.cell_center(5, 7).unwrap();
        assert_abs_diff_eq!(poly.coeffs[0], c.x - 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(poly.coeffs[1], 1.0, epsilon = 1e-12);
        for k in 2..6 {
            assert_abs_diff_eq!(poly.coeffs[k], 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn fit_matches_taylor_coefficients_of_a_quadratic() {
        let (cx, cy, r) = (0.43, 0.61, 0.2);
        let f = |p: Point| ((p.x - cx).powi(2) + (p.y - cy).powi(2) - r * r) / (2.0 * r);
        let g = CartesianGrid2D::unit_square(32).unwrap();
        let phi = CellField::from_fn(&g, |i, j| f(g.cell_center(i, j).unwrap()));
        let raw = LevelSetPolynomial::fit_least_squares(&phi, 10, 20).unwrap();
        let o = g.cell_center(10, 20).unwrap();
        let want = [f(o), (o.x - cx) / r, (o.y - cy) / r, 0.5 / r, 0.0, 0.5 / r];
        for (got, want) in raw.coeffs.iter().zip(want) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn fitted_circle_vanishes_at_true_interface() {
        // signed distance to a circle, positive inside
        let (cx, cy, r) = (0.5, 0.5, 0.15);
        let g = CartesianGrid2D::unit_square(64).unwrap();
        let sd = |p: Point| r - (p.x - cx).hypot(p.y - cy);
        let phi = CellField::from_fn(&g, |i, j| sd(g.cell_center(i, j).unwrap()));
        let dx = g.dx;
        let mut worst = 0.0f64;
        let mut checked = 0;
        for (i, j) in g.interior_cells() {
            let c = g.cell_center(i, j).unwrap();
            if sd(c).abs() > 0.5 * dx {
                continue;
            }
            let poly = fit_polynomial(&phi, (i, j)).unwrap();
            let rho = (c.x - cx).hypot(c.y - cy);
            let near = Point::new(cx + r * (c.x - cx) / rho, cy + r * (c.y - cy) / rho);
            worst = worst.max(poly.eval(near).abs());
            checked += 1;
        }
        assert!(checked > 20);
        assert!(worst <= 10.0 * dx.powi(3), "max |P| at interface = {worst:e}, bound {:e}", 10.0 * dx.powi(3));
    }

    #[test]
    fn degenerate_gradient_is_rejected() {
        let g = CartesianGrid2D::unit_square(8).unwrap();
        let phi = CellField::new(&g, 0.3);
        assert!(matches!(fit_polynomial(&phi, (3, 3)), Err(Error::DegenerateGradient { .. })));
    }

    #[test]
    fn normalization_gives_unit_gradient() {
        let p = LevelSetPolynomial::new(Point::new(0.0, 0.0), [0.1, 3.0, -4.0, 1.0, 2.0, -0.5])
            .normalized()
            .unwrap();
        let (gx, gy) = p.gradient_local(0.0, 0.0);
        assert_abs_diff_eq!(gx.hypot(gy), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn beta_estimates() {
        let b = beta_from_thickness(1.5, 1e-8, 1.0).unwrap();
        assert_abs_diff_eq!(b, 6.14023, epsilon = 1e-5);
        let b64 = beta_from_thickness(1.5, 1e-8, 1.0 / 64.0).unwrap();
        assert_abs_diff_eq!(b64, 64.0 * b, epsilon = 1e-10);
        assert_abs_diff_eq!(b64, 392.97, epsilon = 0.01);
        assert!(beta_from_thickness(1.5, 0.5, 1.0).is_err());
        assert!(beta_from_thickness(0.0, 1e-8, 1.0).is_err());
    }

    #[test]
    fn thinc_values() {
        let r = unit_cell_recon(LINEAR_X, -0.25, 6.0);
        assert_eq!(r.thinc_eval(Point::new(0.25, 0.3)), 0.5);
        let r = unit_cell_recon(LINEAR_X, 0.0, 6.0);
        assert_abs_diff_eq!(r.thinc_eval(Point::new(0.25, 0.0)), 0.952574, epsilon = 1e-6);
        for s in [0.01, 0.1, 0.3, 1.0] {
            let sum = r.thinc_eval(Point::new(s, 0.0)) + r.thinc_eval(Point::new(-s, 0.0));
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn inverse_thinc_values() {
        assert_eq!(inverse_thinc(6.0, 0.5), 0.0);
        assert_abs_diff_eq!(inverse_thinc(6.0, 0.952574), 0.25, epsilon = 1e-6);
        // saturation is absorbed by the clamp
        assert!(inverse_thinc(6.0, 1.0).is_finite());
        assert!(inverse_thinc(6.0, 0.0).is_finite());
        let r = unit_cell_recon([0.02, 0.6, 0.8, 0.3, -0.2, 0.1], 0.05, 6.0);
        let p = Point::new(0.2, -0.35);
        assert_abs_diff_eq!(r.inverse_thinc_eval(p), r.psi_eval(p), epsilon = 1e-12);
    }

    #[test]
    fn psi_zero_set() {
        let r = unit_cell_recon(LINEAR_X, 0.1, 6.0);
        for y in [-0.5, 0.0, 0.4] {
            assert_abs_diff_eq!(r.psi_eval(Point::new(-0.1, y)), 0.0, epsilon = 1e-16);
            assert_eq!(r.thinc_eval(Point::new(-0.1, y)), 0.5);
        }
        let shifted = unit_cell_recon(LINEAR_X, 0.7, 6.0);
        let p = Point::new(0.13, 0.2);
        assert_eq!(r.poly.gradient(p), shifted.poly.gradient(p));
    }

    #[test]
    fn symmetric_cell_average() {
        let quad = QuadratureRule::default();
        let r = unit_cell_recon(LINEAR_X, 0.0, 6.0);
        assert_abs_diff_eq!(r.cell_average_h(&quad), 0.5, epsilon = 1e-12);
        let r = unit_cell_recon(LINEAR_X, -50.0, 6.0);
        assert!(r.cell_average_h(&quad) < INTERFACE_EPS);
    }

    #[test]
    fn shift_of_half_filled_linear_cell_is_zero() {
        let quad = QuadratureRule::default();
        let poly = LevelSetPolynomial::new(Point::new(0.0, 0.0), LINEAR_X);
        for beta in [1.0, 6.0, 20.0] {
            let d = solve_shift(&poly, 0.5, beta, (0, 0), (1.0, 1.0), &quad).unwrap();
            assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);
        }
    }

    /// Composite Simpson over `[-1/2, 1/2]` with `n` intervals.
    fn simpson(n: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = 1.0 / n as f64;
        let mut s = f(-0.5) + f(0.5);
        for k in 1..n {
            let x = -0.5 + k as f64 * h;
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn shift_for_three_quarter_fill_matches_simpson_oracle() {
        let beta = 6.0;
        let target = 0.75;
        // P = X, so the cell average is a 1D integral in X
        let avg = |d: f64| simpson(10_000, |x| 0.5 * (1.0 + (beta * (x + d)).tanh()));
        let (mut lo, mut hi) = (-1.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if avg(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!((oracle - 0.25).abs() < 0.01, "oracle {oracle}");

        let quad = QuadratureRule::default();
        let poly = LevelSetPolynomial::new(Point::new(0.0, 0.0), LINEAR_X);
        let d = solve_shift(&poly, target, beta, (0, 0), (1.0, 1.0), &quad).unwrap();
        assert_abs_diff_eq!(d, oracle, epsilon = 1e-8);
    }

    #[test]
    fn shift_is_monotone_in_vof() {
        let quad = QuadratureRule::default();
        let poly = LevelSetPolynomial::new(Point::new(0.0, 0.0), [0.0, 0.6, 0.8, 0.2, -0.1, 0.3]);
        let d6 = solve_shift(&poly, 0.6, 6.0, (0, 0), (1.0, 1.0), &quad).unwrap();
        let d9 = solve_shift(&poly, 0.9, 6.0, (0, 0), (1.0, 1.0), &quad).unwrap();
        assert!(d9 > d6);
    }

    #[test]
    fn shift_rejects_values_outside_band() {
        let quad = QuadratureRule::default();
        let poly = LevelSetPolynomial::new(Point::new(0.0, 0.0), LINEAR_X);
        for v in [0.0, 1.0, 0.5e-8, 1.0 - 0.5e-8] {
            assert!(matches!(
                solve_shift(&poly, v, 6.0, (0, 0), (1.0, 1.0), &quad),
                Err(Error::OutsideBand { .. })
            ));
        }
        // the band is closed
        assert!(solve_shift(&poly, INTERFACE_EPS, 6.0, (0, 0), (1.0, 1.0), &quad).is_ok());
    }

    #[test]
    fn solved_shift_closes_the_constraint() {
        let quad = QuadratureRule::default();
        let g = CartesianGrid2D::unit_square(64).unwrap();
        let beta = 6.0 / g.dx;
        let phi = CellField::from_fn(&g, |i, j| {
            let c = g.cell_center(i, j).unwrap();
            0.15 - (c.x - 0.5).hypot(c.y - 0.75)
        });
        for (cell, vof) in [((41, 48), 0.3), ((32, 57), 0.999), ((22, 47), 1e-7)] {
            let r = reconstruct_cell(&phi, vof, cell, beta, &quad).unwrap();
            assert_abs_diff_eq!(r.cell_average_h(&quad), vof, epsilon = 1e-10);
        }
    }

    #[test]
    fn three_point_rule_also_closes_its_own_constraint() {
        let quad = QuadratureRule::tensor(3);
        let poly = LevelSetPolynomial::new(Point::new(0.0, 0.0), [0.0, 0.6, 0.8, 0.2, -0.1, 0.3]);
        let d = solve_shift(&poly, 0.3, 6.0, (0, 0), (1.0, 1.0), &quad).unwrap();
        let r = ThincReconstruction {
            poly,
            shift: d,
            beta: 6.0,
            cell: (0, 0),
            size: (1.0, 1.0),
        };
        assert_abs_diff_eq!(r.cell_average_h(&quad), 0.3, epsilon = 1e-10);
    }
}
