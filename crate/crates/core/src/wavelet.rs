//! Multiview wavelets: every pulse of a reference function is replaced by a
//! Haar wavelet over the same pixels.
//!
//! Kernels are integer valued (`β = (+1, -1)`, no `√2`). Pulses of odd width
//! `w` keep a single zero sample in the middle, `(w-1)/2` positive samples
//! before it and `(w-1)/2` negative samples after it, so the zero-mean
//! property still holds exactly (e.g. `|k| = 4` at a 60 pixel pitch gives
//! `7 / 1 / 7`).

use crate::config::{DisplayConfig, PlaneIndex};
use crate::error::{Error, Result};
use crate::reffun::{outer_product, pulse_layout, Samples};

/// Two-scale coefficients `(β0, β1)` applied to the half-width pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HaarCoefficients {
    beta0: i32,
    beta1: i32,
}

impl HaarCoefficients {
    pub const UNIT: Self = Self { beta0: 1, beta1: -1 };

    pub fn new(beta0: i32, beta1: i32) -> Result<Self> {
        if beta0 == 0 || beta0 != -beta1 {
            return Err(Error::config(format!(
                "Haar coefficients must satisfy b0 = -b1 != 0, got ({beta0}, {beta1})"
            )));
        }
        Ok(Self { beta0, beta1 })
    }

    pub fn beta(&self) -> (i32, i32) {
        (self.beta0, self.beta1)
    }
}

impl Default for HaarCoefficients {
    fn default() -> Self {
        Self::UNIT
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletKernel1D {
    values: Vec<i32>,
    plane: PlaneIndex,
    support_cells: usize,
    odd_split: bool,
}

impl WaveletKernel1D {
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

    /// True when pulses have odd width and carry a central zero sample.
    pub fn odd_split(&self) -> bool {
        self.odd_split
    }
}

impl Samples for WaveletKernel1D {
    fn samples(&self) -> &[i32] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletKernel2D {
    factor: WaveletKernel1D,
    values: Vec<i32>,
}

impl WaveletKernel2D {
    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn side(&self) -> usize {
        self.factor.len()
    }

    pub fn plane(&self) -> PlaneIndex {
        self.factor.plane()
    }

    pub fn factor(&self) -> &WaveletKernel1D {
        &self.factor
    }

    pub fn at(&self, x: usize, y: usize) -> i32 {
        self.values[y * self.side() + x]
    }
}

impl Samples for WaveletKernel2D {
    fn samples(&self) -> &[i32] {
        &self.values
    }
}

/// `+1` on the first half, `-1` on the second.
pub fn haar_mother(width: usize) -> Result<Vec<i32>> {
    if width < 2 || width % 2 != 0 {
        return Err(Error::config(format!(
            "Haar wavelet width must be even and at least 2, got {width}"
        )));
    }
    let half = width / 2;
    Ok(std::iter::repeat(1)
        .take(half)
        .chain(std::iter::repeat(-1).take(half))
        .collect())
}

/// Length of each signed half of a pulse of width `w`.
fn half_width(w: usize) -> Result<usize> {
    if w < 2 {
        return Err(Error::config(format!(
            "pulse width {w} is too narrow to carry a Haar wavelet"
        )));
    }
    Ok(w / 2)
}

pub fn wavelet_1d(k: PlaneIndex, cfg: &DisplayConfig) -> Result<WaveletKernel1D> {
    wavelet_1d_with(k, cfg, HaarCoefficients::UNIT)
}

/// Builds the wavelet as `β0 * S + β1 * S'` per pulse, where `S` covers the
/// leading half of the pulse and `S'` the trailing half.
pub fn wavelet_1d_with(
    k: PlaneIndex,
    cfg: &DisplayConfig,
    beta: HaarCoefficients,
) -> Result<WaveletKernel1D> {
    let pulses = pulse_layout(k, cfg)?;
    let p = cfg.cell_pitch();
    let width = pulses[0].width;
    let half = half_width(width)?;
    let mut values = vec![0; k.abs() * p];
    for pulse in &pulses {
        let span = pulse.span(p);
        values[span.start..span.start + half].fill(beta.beta0);
        values[span.end - half..span.end].fill(beta.beta1);
    }
    Ok(WaveletKernel1D {
        values,
        plane: k,
        support_cells: k.abs(),
        odd_split: width % 2 == 1,
    })
}

pub fn wavelet_2d(k: PlaneIndex, cfg: &DisplayConfig) -> Result<WaveletKernel2D> {
    let factor = wavelet_1d(k, cfg)?;
    let values = outer_product(factor.values(), factor.values());
    Ok(WaveletKernel2D { factor, values })
}

/// Exact sum of samples; zero for every admissible wavelet.
pub fn admissibility<K: Samples + ?Sized>(kernel: &K) -> i64 {
    kernel.samples().iter().map(|&v| v as i64).sum()
}
