use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Triangular lattice of base stations, one per area `pi`, with a BS at the
/// origin and exclusion discs of radius `a_ex` around each.
#[derive(Debug, Clone, Copy)]
pub struct HexLattice {
    d: f64,
    row: f64,
    inv_d: f64,
    inv_row: f64,
    a_ex2: f64,
}

impl HexLattice {
    pub fn new(a_ex: f64) -> Self {
        let d = lattice_constant();
        let row = d * 3f64.sqrt() / 2.0;
        Self {
            d,
            row,
            inv_d: 1.0 / d,
            inv_row: 1.0 / row,
            a_ex2: a_ex * a_ex,
        }
    }

    /// Nearest-neighbor spacing of the lattice.
    pub fn spacing(&self) -> f64 {
        self.d
    }

    /// Lattice coordinates `(u, v)` of a point, so that `x = (u + v/2) d`, `y = v d sqrt(3)/2`.
    fn coords(&self, x: f64, y: f64) -> (f64, f64) {
        let v = y * self.inv_row;
        (x * self.inv_d - 0.5 * v, v)
    }

    fn point(&self, u: f64, v: f64) -> (f64, f64) {
        ((u + 0.5 * v) * self.d, v * self.row)
    }

    /// Squared distance to the nearest lattice point.
    #[inline]
    pub fn nearest_dist2(&self, x: f64, y: f64) -> f64 {
        let (u, v) = self.coords(x, y);
        let (i, j) = (fast_floor(u), fast_floor(v));
        let mut best = f64::INFINITY;
        for (di, dj) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            let (px, py) = self.point(i + di, j + dj);
            let d2 = (x - px).powi(2) + (y - py).powi(2);
            best = best.min(d2);
        }
        best
    }

    /// Whether a D2D transmitter at `(x, y)` survives the exclusion thinning.
    #[inline]
    pub fn keeps(&self, x: f64, y: f64) -> bool {
        if self.a_ex2 == 0.0 {
            return true;
        }
        // a_ex is below the row spacing, so only the two enclosing rows can
        // hold a center within reach, and within a row only the nearest one.
        let j = fast_floor(y * self.inv_row);
        let row_d2 = |jj: f64| {
            let dy = y - jj * self.row;
            let i = fast_floor(x * self.inv_d - 0.5 * jj + 0.5);
            let dx = x - (i + 0.5 * jj) * self.d;
            dx * dx + dy * dy
        };
        row_d2(j).min(row_d2(j + 1.0)) > self.a_ex2
    }

    /// Maps the unit square onto one lattice cell (a rhombus of area `pi`).
    pub fn cell_point(&self, s: f64, t: f64) -> (f64, f64) {
        self.point(s, t)
    }
}

/// `floor` through an integer conversion, which avoids a libm call on
/// baseline x86-64. Valid for `|x| < 2^62`.
#[inline]
fn fast_floor(x: f64) -> f64 {
    let t = x as i64 as f64;
    t - f64::from(u8::from(t > x))
}

/// Lattice constant giving one BS per area `pi`.
pub fn lattice_constant() -> f64 {
    (2.0 * PI / 3f64.sqrt()).sqrt()
}

/// Exclusion-region centers (the BS positions) within distance `extent` of
/// the origin, which is itself a center. Sorted by distance from the origin.
pub fn hex_exclusion_layout(a_ex: f64, extent: f64) -> Result<Vec<(f64, f64)>> {
    if !(a_ex > 0.0 && a_ex < 1.0) {
        return Err(Error::InvalidParam(format!("a_ex must lie in (0, 1) (got {a_ex})")));
    }
    if !(extent >= 0.0 && extent.is_finite()) {
        return Err(Error::InvalidParam(format!(
            "extent must be finite and >= 0 (got {extent})"
        )));
    }
    let lat = HexLattice::new(a_ex);
    let n = (extent / lat.row).ceil() as i64 + 1;
    let mut pts = Vec::new();
    for j in -n..=n {
        for i in -2 * n..=2 * n {
            let (x, y) = lat.point(i as f64, j as f64);
            if x * x + y * y <= extent * extent {
                pts.push((x, y));
            }
        }
    }
    pts.sort_by(|a, b| (a.0.hypot(a.1)).total_cmp(&b.0.hypot(b.1)));
    Ok(pts)
}
