//! Uniform planar arrays, steering vectors and displacement histograms.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::{Error, Result};

/// Uniform planar array of `nx × ny` elements centred on its own origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarArray {
    nx: usize,
    ny: usize,
    spacing: f64,
}

impl PlanarArray {
    pub fn new(nx: usize, ny: usize, spacing: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Invalid(format!(
                "array needs at least one element per axis (got {nx} x {ny})"
            )));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::domain("spacing", spacing, "must be finite and > 0"));
        }
        Ok(Self { nx, ny, spacing })
    }

    /// Square `n × n` array.
    pub fn square(n: usize, spacing: f64) -> Result<Self> {
        Self::new(n, n, spacing)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid indices of element `i` in row-major order (x fastest).
    pub fn indices(&self, i: usize) -> (usize, usize) {
        (i % self.nx, i / self.nx)
    }

    /// Transverse position of element `i` in metres.
    pub fn position(&self, i: usize) -> [f64; 2] {
        let (ix, iy) = self.indices(i);
        [
            (ix as f64 - (self.nx as f64 - 1.0) / 2.0) * self.spacing,
            (iy as f64 - (self.ny as f64 - 1.0) / 2.0) * self.spacing,
        ]
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|i| self.position(i)).collect()
    }

    /// Euclidean distance between elements `i` and `j`, computed from the
    /// integer grid offset so that equal separations compare exactly.
    pub fn separation(&self, i: usize, j: usize) -> f64 {
        let (ax, ay) = self.indices(i);
        let (bx, by) = self.indices(j);
        let dx = ax.abs_diff(bx) as u64;
        let dy = ay.abs_diff(by) as u64;
        squared_offset_to_distance(dx * dx + dy * dy, self.spacing)
    }
}

fn squared_offset_to_distance(key: u64, spacing: f64) -> f64 {
    (key as f64).sqrt() * spacing
}

/// Steering vector with entries exp(i k (x sinθ cosφ + y sinθ sinφ)).
///
/// `theta` is measured from the array normal and `phi` from the x axis. Entries
/// have unit magnitude; no 1/√N normalisation is applied.
pub fn steering_vector(array: &PlanarArray, theta: f64, phi: f64, k: f64) -> Vec<Complex64> {
    let ux = theta.sin() * phi.cos();
    let uy = theta.sin() * phi.sin();
    (0..array.len())
        .map(|i| {
            let [x, y] = array.position(i);
            Complex64::from_polar(1.0, k * (x * ux + y * uy))
        })
        .collect()
}

/// Element-pair separations of one array with their multiplicities.
///
/// Entries are keyed by the squared integer grid offset dx² + dy², so
/// displacement vectors of equal length are grouped exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementHistogram {
    spacing: f64,
    entries: Vec<(u64, u64)>,
}

impl DisplacementHistogram {
    /// Number of distinct separations.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// (squared grid offset, multiplicity) pairs in increasing separation.
    pub fn raw(&self) -> &[(u64, u64)] {
        &self.entries
    }

    /// (separation in metres, multiplicity) pairs in increasing separation.
    pub fn entries(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.entries
            .iter()
            .map(|&(key, m)| (squared_offset_to_distance(key, self.spacing), m))
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

/// Histogram of all ordered element pairs (including i = i') by separation.
pub fn displacement_histogram(array: &PlanarArray) -> DisplacementHistogram {
    let (nx, ny) = (array.nx as i64, array.ny as i64);
    let mut bins: BTreeMap<u64, u64> = BTreeMap::new();
    for dx in -(nx - 1)..nx {
        for dy in -(ny - 1)..ny {
            let key = (dx * dx + dy * dy) as u64;
            let m = ((nx - dx.abs()) * (ny - dy.abs())) as u64;
            *bins.entry(key).or_insert(0) += m;
        }
    }
    DisplacementHistogram {
        spacing: array.spacing,
        entries: bins.into_iter().collect(),
    }
}
