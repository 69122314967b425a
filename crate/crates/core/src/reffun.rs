//! Multiview reference functions rasterized on the pixel grid.
//!
//! A voxel in plane `k` imprints `|k|` rectangular pulses of width `p / |k|`,
//! one per consecutive cell. The pulse in cell `i` starts at intra-cell offset
//! `i * w` for `k > 0` and `(|k| - 1 - i) * w` for `k < 0`, so tiling the
//! pattern at every cell anchor covers each pixel exactly once.

use num_rational::Ratio;

use crate::config::{DisplayConfig, PlaneIndex};
use crate::error::Result;

/// Read access to kernel samples, whatever their dimensionality.
pub trait Samples {
    fn samples(&self) -> &[i32];
}

impl Samples for [i32] {
    fn samples(&self) -> &[i32] {
        self
    }
}

impl Samples for Vec<i32> {
    fn samples(&self) -> &[i32] {
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulseSpec {
    pub cell_offset: usize,
    pub left_edge: usize,
    pub width: usize,
    /// Pulse center relative to the anchor, in pixels.
    pub center: Ratio<i64>,
}

impl PulseSpec {
    /// Absolute pixel range covered by the pulse, relative to the anchor.
    pub fn span(&self, cell_pitch: usize) -> std::ops::Range<usize> {
        let start = self.cell_offset * cell_pitch + self.left_edge;
        start..start + self.width
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel1D {
    values: Vec<i32>,
    plane: PlaneIndex,
    support_cells: usize,
}

impl Kernel1D {
    pub(crate) fn from_parts(values: Vec<i32>, plane: PlaneIndex, support_cells: usize) -> Self {
        Self {
            values,
            plane,
            support_cells,
        }
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn plane(&self) -> PlaneIndex {
        self.plane
    }

    pub fn support_cells(&self) -> usize {
        self.support_cells
    }

    pub fn sum(&self) -> i64 {
        self.values.iter().map(|&v| v as i64).sum()
    }
}

impl Samples for Kernel1D {
    fn samples(&self) -> &[i32] {
        &self.values
    }
}

/// Separable 2D kernel stored both as its 1D factor and as the full
/// outer-product raster (row-major, `side x side`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel2D {
    factor: Kernel1D,
    values: Vec<i32>,
}

impl Kernel2D {
    pub(crate) fn outer(factor: Kernel1D) -> Self {
        let values = outer_product(factor.values(), factor.values());
        Self { factor, values }
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn side(&self) -> usize {
        self.factor.len()
    }

    pub fn side_cells(&self) -> usize {
        self.factor.support_cells()
    }

    pub fn plane(&self) -> PlaneIndex {
        self.factor.plane()
    }

    pub fn at(&self, x: usize, y: usize) -> i32 {
        self.values[y * self.side() + x]
    }

    /// The 1D factor applied along both axes.
    pub fn factor(&self) -> &Kernel1D {
        &self.factor
    }

    pub fn sum(&self) -> i64 {
        self.values.iter().map(|&v| v as i64).sum()
    }
}

impl Samples for Kernel2D {
    fn samples(&self) -> &[i32] {
        &self.values
    }
}

pub(crate) fn outer_product(rows: &[i32], cols: &[i32]) -> Vec<i32> {
    rows.iter()
        .flat_map(|&r| cols.iter().map(move |&c| r * c))
        .collect()
}

pub fn pulse_layout(k: PlaneIndex, cfg: &DisplayConfig) -> Result<Vec<PulseSpec>> {
    let k = k.check(cfg)?;
    let width = cfg.pulse_width(k)?;
    let n = k.abs();
    let p = cfg.cell_pitch();
    Ok((0..n)
        .map(|i| {
            let slot = if k.is_positive() { i } else { n - 1 - i };
            let left_edge = slot * width;
            // 2 * center = 2 * (i * p + left_edge) + width
            let twice = 2 * (i * p + left_edge) + width;
            PulseSpec {
                cell_offset: i,
                left_edge,
                width,
                center: Ratio::new(twice as i64, 2),
            }
        })
        .collect())
}

/// Binary raster of `F_k` over `|k|` cells.
pub fn raster_1d(k: PlaneIndex, cfg: &DisplayConfig) -> Result<Kernel1D> {
    let pulses = pulse_layout(k, cfg)?;
    let p = cfg.cell_pitch();
    let mut values = vec![0; k.abs() * p];
    for pulse in &pulses {
        values[pulse.span(p)].fill(1);
    }
    Ok(Kernel1D::from_parts(values, k, k.abs()))
}

/// Haar scaling function: 1 on `[0, 1)`, 0 elsewhere.
fn haar_box(t: Ratio<i64>) -> i32 {
    let zero = Ratio::from_integer(0);
    let one = Ratio::from_integer(1);
    i32::from(t >= zero && t < one)
}

/// Same raster as [`raster_1d`], evaluated pointwise as a sum of shifted Haar
/// boxes `Haar((x - x_ki) / w + 1/2)` in exact rational arithmetic.
pub fn raster_1d_haar_form(k: PlaneIndex, cfg: &DisplayConfig) -> Result<Kernel1D> {
    let pulses = pulse_layout(k, cfg)?;
    let half = Ratio::new(1, 2);
    let len = k.abs() * cfg.cell_pitch();
    let values = (0..len as i64)
        .map(|x| {
            let x = Ratio::from_integer(x);
            pulses
                .iter()
                .map(|pulse| {
                    let w = Ratio::from_integer(pulse.width as i64);
                    haar_box((x - pulse.center) / w + half)
                })
                .sum()
        })
        .collect();
    Ok(Kernel1D::from_parts(values, k, k.abs()))
}

pub fn raster_2d(k: PlaneIndex, cfg: &DisplayConfig) -> Result<Kernel2D> {
    Ok(Kernel2D::outer(raster_1d(k, cfg)?))
}

/// Sum of `raster_1d(k)` placed at the cell anchors `0, p, .., (anchors-1) p`.
/// Pixels in `[(|k|-1) p, anchors * p)` are covered exactly once.
pub fn tiled_coverage(k: PlaneIndex, cfg: &DisplayConfig, anchors: usize) -> Result<Vec<i32>> {
    let raster = raster_1d(k, cfg)?;
    let p = cfg.cell_pitch();
    let mut sum = vec![0; (anchors + k.abs()) * p];
    for n in 0..anchors {
        for (dst, &v) in sum[n * p..].iter_mut().zip(raster.values()) {
            *dst += v;
        }
    }
    sum.truncate(anchors * p);
    Ok(sum)
}
