//! Pinching-antenna positions along the waveguides.
//!
//! Positions are stored as indices into the uniform candidate grid
//! `{0, D_x/(L-1), ..., D_x}`, so every layout is on-grid by construction.

use rand::Rng;

use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Uniform grid of candidate x-coordinates on `[0, extent]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    len: usize,
    extent: f64,
}

impl Grid {
    pub fn new(len: usize, extent: f64) -> Result<Self> {
        if len < 2 || !(extent > 0.0) {
            return Err(Error::Input(format!(
                "grid needs len >= 2 and extent > 0 (len {len}, extent {extent})"
            )));
        }
        Ok(Self { len, extent })
    }

    pub fn from_config(cfg: &SystemConfig) -> Result<Self> {
        Self::new(cfg.grid_size, cfg.region_x)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn step(&self) -> f64 {
        self.extent / (self.len - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.len {
            self.extent
        } else {
            i as f64 * self.extent / (self.len - 1) as f64
        }
    }

    /// Index of the grid point nearest to `x`, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let raw = (x / self.step()).round();
        raw.clamp(0.0, (self.len - 1) as f64) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PinchLayout {
    grid: Grid,
    indices: Vec<Vec<usize>>,
    waveguide_y: Vec<f64>,
    height: f64,
}

impl PinchLayout {
    /// Build a layout from explicit grid indices, one row per waveguide.
    pub fn from_indices(cfg: &SystemConfig, indices: Vec<Vec<usize>>) -> Result<Self> {
        let grid = Grid::from_config(cfg)?;
        if indices.len() != cfg.num_waveguides {
            return Err(Error::Dimension(format!(
                "{} layout rows for {} waveguides",
                indices.len(),
                cfg.num_waveguides
            )));
        }
        let layout = Self {
            grid,
            waveguide_y: (0..cfg.num_waveguides)
                .map(|m| cfg.waveguide_y(m))
                .collect(),
            height: cfg.waveguide_height,
            indices,
        };
        layout.validate(cfg.min_spacing())?;
        Ok(layout)
    }

    /// Build a layout from coordinates in metres; each must be a grid point.
    pub fn from_positions(cfg: &SystemConfig, positions: &[Vec<f64>]) -> Result<Self> {
        let grid = Grid::from_config(cfg)?;
        let mut indices = Vec::with_capacity(positions.len());
        for row in positions {
            let mut r = Vec::with_capacity(row.len());
            for &x in row {
                let i = grid.nearest(x);
                if (grid.point(i) - x).abs() > 1e-9 * grid.extent().max(1.0) {
                    return Err(Error::Input(format!(
                        "position {x} is not on the candidate grid"
                    )));
                }
                r.push(i);
            }
            indices.push(r);
        }
        Self::from_indices(cfg, indices)
    }

    /// N antennas spread evenly over `[0, D_x]` on every waveguide.
    pub fn uniform(cfg: &SystemConfig) -> Result<Self> {
        let grid = Grid::from_config(cfg)?;
        let n = cfg.pas_per_waveguide;
        let last = (grid.len() - 1) as f64;
        let row: Vec<usize> = if n == 1 {
            vec![(grid.len() - 1) / 2]
        } else {
            (0..n)
                .map(|i| (i as f64 * last / (n - 1) as f64).round() as usize)
                .collect()
        };
        Self::from_indices(cfg, vec![row; cfg.num_waveguides])
    }

    /// Independent uniformly random feasible rows.
    pub fn random<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<Self> {
        let grid = Grid::from_config(cfg)?;
        let n = cfg.pas_per_waveguide;
        if n > grid.len() {
            return Err(Error::Config("more antennas than grid points".into()));
        }
        let spacing = cfg.min_spacing();
        let mut rows = Vec::with_capacity(cfg.num_waveguides);
        for _ in 0..cfg.num_waveguides {
            let mut found = None;
            for _ in 0..10_000 {
                let mut row = rand::seq::index::sample(rng, grid.len(), n).into_vec();
                row.sort_unstable();
                if row
                    .windows(2)
                    .all(|w| grid.point(w[1]) - grid.point(w[0]) >= spacing)
                {
                    found = Some(row);
                    break;
                }
            }
            rows.push(found.ok_or_else(|| {
                Error::Config("could not sample a layout satisfying the spacing constraint".into())
            })?);
        }
        Self::from_indices(cfg, rows)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn num_waveguides(&self) -> usize {
        self.indices.len()
    }

    pub fn pas_per_waveguide(&self) -> usize {
        self.indices.first().map_or(0, Vec::len)
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn waveguide_y(&self, m: usize) -> f64 {
        self.waveguide_y[m]
    }

    pub fn indices(&self, m: usize) -> &[usize] {
        &self.indices[m]
    }

    pub fn x(&self, m: usize, n: usize) -> f64 {
        self.grid.point(self.indices[m][n])
    }

    /// x-coordinates of every antenna on waveguide `m`.
    pub fn positions(&self, m: usize) -> Vec<f64> {
        self.indices[m]
            .iter()
            .map(|&i| self.grid.point(i))
            .collect()
    }

    /// Cartesian position of antenna `n` on waveguide `m`.
    pub fn pa_position(&self, m: usize, n: usize) -> [f64; 3] {
        [self.x(m, n), self.waveguide_y[m], self.height]
    }

    /// Move antenna `(m, n)` to grid index `index` without validation.
    pub(crate) fn set_index(&mut self, m: usize, n: usize, index: usize) {
        self.indices[m][n] = index;
    }

    pub fn validate(&self, min_spacing: f64) -> Result<()> {
        let n = self.pas_per_waveguide();
        if n == 0 {
            return Err(Error::Input("layout has no antennas".into()));
        }
        for (m, row) in self.indices.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "waveguide {m} has {} antennas, expected {n}",
                    row.len()
                )));
            }
            if let Some(&i) = row.iter().find(|&&i| i >= self.grid.len()) {
                return Err(Error::Input(format!(
                    "grid index {i} out of range on waveguide {m}"
                )));
            }
            for w in row.windows(2) {
                let gap = self.grid.point(w[1]) - self.grid.point(w[0]);
                // Allow for rounding in the grid arithmetic.
                if gap < min_spacing * (1.0 - 1e-12) {
                    return Err(Error::Input(format!(
                        "antennas on waveguide {m} at {:.6} and {:.6} violate ordering/spacing",
                        self.grid.point(w[0]),
                        self.grid.point(w[1])
                    )));
                }
            }
        }
        Ok(())
    }

    /// Frobenius distance between the coordinate matrices of two layouts.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for (ra, rb) in self.indices.iter().zip(&other.indices) {
            for (&a, &b) in ra.iter().zip(rb) {
                let d = self.grid.point(a) - other.grid.point(b);
                acc += d * d;
            }
        }
        acc.sqrt()
    }
}

/// Grid indices admissible for antenna `(m, n)` with its neighbours held fixed.
///
/// The admissible interval is the open interval
/// `(x_{n-1} + spacing, x_{n+1} - spacing)`; a missing lower neighbour opens the
/// interval down to (and including) zero and a missing upper neighbour up to
/// (and including) the end of the grid.
pub fn candidate_set(layout: &PinchLayout, m: usize, n: usize, min_spacing: f64) -> Vec<usize> {
    let grid = layout.grid();
    let row = layout.indices(m);
    let lower = (n > 0).then(|| grid.point(row[n - 1]) + min_spacing);
    let upper = (n + 1 < row.len()).then(|| grid.point(row[n + 1]) - min_spacing);
    (0..grid.len())
        .filter(|&i| {
            let x = grid.point(i);
            lower.is_none_or(|lo| x > lo) && upper.is_none_or(|hi| x < hi)
        })
        .collect()
}
