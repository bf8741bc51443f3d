//! Uniform 2D Cartesian grid with ghost layers and cell-centered scalar fields.
//!
//! Cells are addressed by signed indices `(i, j)`: interior cells run over
//! `0..nx` and `0..ny`, ghost cells extend `nghost` layers beyond each side.
//! Storage is row-major over `(i, j)`, i.e. `j` varies fastest.

use crate::error::{Error, Result};

/// Default ghost-layer width. The 3x3 fit stencil needs one layer and
/// CFL-limited departure points need at most two.
pub const DEFAULT_GHOSTS: usize = 2;

/// A point in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Uniform cell layout over `[x0, x1] x [y0, y1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartesianGrid2D {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub dx: f64,
    pub dy: f64,
    pub nghost: usize,
}

impl CartesianGrid2D {
    pub fn new(nx: usize, ny: usize, x0: f64, y0: f64, x1: f64, y1: f64, nghost: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Config(format!("grid needs at least one cell per axis, got {nx}x{ny}")));
        }
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::Config(format!("empty domain [{x0}, {x1}] x [{y0}, {y1}]")));
        }
        if nghost < 2 {
            return Err(Error::Config(format!("need at least 2 ghost layers, got {nghost}")));
        }
        Ok(Self {
            nx,
            ny,
            x0,
            y0,
            x1,
            y1,
            dx: (x1 - x0) / nx as f64,
            dy: (y1 - y0) / ny as f64,
            nghost,
        })
    }

    /// `n x n` cells on the unit square with the default ghost width.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 0.0, 0.0, 1.0, 1.0, DEFAULT_GHOSTS)
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Number of stored values per field, ghosts included.
    pub fn storage_len(&self) -> usize {
        (self.nx + 2 * self.nghost) * (self.ny + 2 * self.nghost)
    }

    pub fn interior_len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn contains_index(&self, i: isize, j: isize) -> bool {
        let g = self.nghost as isize;
        i >= -g && i < self.nx as isize + g && j >= -g && j < self.ny as isize + g
    }

    pub fn is_interior(&self, i: isize, j: isize) -> bool {
        i >= 0 && i < self.nx as isize && j >= 0 && j < self.ny as isize
    }

    /// Position of `(i, j)` in field storage.
    pub fn storage_index(&self, i: isize, j: isize) -> Result<usize> {
        if !self.contains_index(i, j) {
            return Err(Error::Index { i, j });
        }
        Ok(self.storage_index_unchecked(i, j))
    }

    #[inline]
    pub(crate) fn storage_index_unchecked(&self, i: isize, j: isize) -> usize {
        let g = self.nghost as isize;
        let stride = (self.ny + 2 * self.nghost) as isize;
        ((i + g) * stride + (j + g)) as usize
    }

    /// Position of an interior cell in interior-only arrays (row-major).
    #[inline]
    pub fn interior_index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Center of cell `(i, j)`. Ghost indices extrapolate linearly.
    pub fn cell_center(&self, i: isize, j: isize) -> Result<Point> {
        if !self.contains_index(i, j) {
            return Err(Error::Index { i, j });
        }
        Ok(self.center_unchecked(i, j))
    }

    #[inline]
    pub(crate) fn center_unchecked(&self, i: isize, j: isize) -> Point {
        Point::new(
            self.x0 + (i as f64 + 0.5) * self.dx,
            self.y0 + (j as f64 + 0.5) * self.dy,
        )
    }

    /// Lower-left and upper-right corners of cell `(i, j)`.
    pub fn cell_bounds(&self, i: isize, j: isize) -> (Point, Point) {
        let lo = Point::new(self.x0 + i as f64 * self.dx, self.y0 + j as f64 * self.dy);
        (lo, Point::new(lo.x + self.dx, lo.y + self.dy))
    }

    /// Cell whose closed box contains `p`. A point on a shared face belongs
    /// to the cell with the lower index.
    pub fn locate_cell(&self, p: Point) -> Result<(isize, isize)> {
        let i = Self::locate_axis(p.x, self.x0, self.dx, self.nx, self.nghost);
        let j = Self::locate_axis(p.y, self.y0, self.dy, self.ny, self.nghost);
        match (i, j) {
            (Some(i), Some(j)) => Ok((i, j)),
            _ => Err(Error::Location { x: p.x, y: p.y }),
        }
    }

    fn locate_axis(v: f64, origin: f64, h: f64, n: usize, nghost: usize) -> Option<isize> {
        let g = nghost as isize;
        let lo = -g;
        let hi = n as isize + g - 1;
        if !v.is_finite() {
            return None;
        }
        let s = (v - origin) / h;
        // ceil(s) - 1 sends points exactly on a face to the lower cell
        let mut k = s.ceil() as isize - 1;
        // the lowest face belongs to the first cell
        if k == lo - 1 && s == lo as f64 {
            k = lo;
        }
        if k < lo || k > hi {
            return None;
        }
        // floating point guard for points a hair outside the computed cell
        let lower_face = origin + k as f64 * h;
        if v < lower_face && k > lo {
            k -= 1;
        }
        Some(k)
    }

    /// Extended (ghost-inclusive) domain bounds.
    pub fn extended_bounds(&self) -> (Point, Point) {
        let gx = self.nghost as f64 * self.dx;
        let gy = self.nghost as f64 * self.dy;
        (
            Point::new(self.x0 - gx, self.y0 - gy),
            Point::new(self.x1 + gx, self.y1 + gy),
        )
    }

    /// Iterator over interior `(i, j)` in storage order.
    pub fn interior_cells(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        (0..self.nx as isize).flat_map(move |i| (0..self.ny as isize).map(move |j| (i, j)))
    }
}

/// One scalar per cell, ghosts included.
#[derive(Clone, Debug, PartialEq)]
pub struct CellField {
    grid: CartesianGrid2D,
    values: Vec<f64>,
}

impl CellField {
    pub fn new(grid: &CartesianGrid2D, value: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![value; grid.storage_len()],
        }
    }

    /// Field with interior values from `f(i, j)` and ghosts filled.
    pub fn from_fn(grid: &CartesianGrid2D, mut f: impl FnMut(isize, isize) -> f64) -> Self {
        let mut field = Self::new(grid, 0.0);
        for (i, j) in grid.interior_cells() {
            let k = grid.storage_index_unchecked(i, j);
            field.values[k] = f(i, j);
        }
        field.fill_ghosts();
        field
    }

    pub fn grid(&self) -> &CartesianGrid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: isize, j: isize) -> Result<f64> {
        Ok(self.values[self.grid.storage_index(i, j)?])
    }

    pub fn set(&mut self, i: isize, j: isize, v: f64) -> Result<()> {
        let k = self.grid.storage_index(i, j)?;
        self.values[k] = v;
        Ok(())
    }

    /// Unchecked read for hot loops; `(i, j)` must lie in the ghost-extended range.
    #[inline]
    pub fn at(&self, i: isize, j: isize) -> f64 {
        debug_assert!(self.grid.contains_index(i, j));
        self.values[self.grid.storage_index_unchecked(i, j)]
    }

    #[inline]
    pub fn at_mut(&mut self, i: isize, j: isize) -> &mut f64 {
        debug_assert!(self.grid.contains_index(i, j));
        let k = self.grid.storage_index_unchecked(i, j);
        &mut self.values[k]
    }

    /// Zero-gradient ghost fill: every ghost copies the nearest interior cell.
    pub fn fill_ghosts(&mut self) {
        let g = self.grid.nghost as isize;
        let nx = self.grid.nx as isize;
        let ny = self.grid.ny as isize;
        for i in -g..nx + g {
            for j in -g..ny + g {
                if self.grid.is_interior(i, j) {
                    continue;
                }
                let v = self.at(i.clamp(0, nx - 1), j.clamp(0, ny - 1));
                *self.at_mut(i, j) = v;
            }
        }
    }

    /// Interior values in storage order.
    pub fn interior_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.grid.interior_cells().map(move |(i, j)| self.at(i, j))
    }

    /// Largest absolute interior difference to another field on the same grid.
    pub fn max_abs_diff(&self, other: &CellField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .interior_values()
            .zip(other.interior_values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}
