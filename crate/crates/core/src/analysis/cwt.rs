//! Continuous wavelet transform with the multiview wavelet family: one
//! response map per plane index, evaluated at every pixel translation.
//!
//! The wavelet is zero-mean over exactly the reference pattern of its plane,
//! so a lone voxel scores 0 at its own anchor. Its strongest responses sit
//! half a pulse away diagonally, at `anchor ± (w/2, w/2)`, both equal to
//! `(L-1) * (p/2)^2` for even pulse widths.

use serde::Serialize;

use crate::config::{DisplayConfig, PlaneIndex};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::synth::MultiviewImage;
use crate::wavelet::wavelet_1d;

use super::correlate::{correlate_separable_with, ResponseMap};

pub fn cwt_plane(img: &MultiviewImage, n: PlaneIndex, cfg: &DisplayConfig) -> Result<ResponseMap> {
    cwt_plane_with(img, n, cfg, Execution::default())
}

pub fn cwt_plane_with(
    img: &MultiviewImage,
    n: PlaneIndex,
    cfg: &DisplayConfig,
    exec: Execution,
) -> Result<ResponseMap> {
    let w = wavelet_1d(n, cfg)?;
    Ok(correlate_separable_with(img, w.values(), w.values(), 1, exec)?.with_plane(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Argmax {
    pub u: usize,
    pub v: usize,
    pub score: i64,
}

/// Largest score; ties go to the smallest `(v, u)`.
pub fn cwt_argmax(r: &ResponseMap) -> Result<Argmax> {
    if r.valid_region().is_empty() {
        return Err(Error::argument("response map has an empty valid region"));
    }
    let mut best: Option<Argmax> = None;
    for (u, v, score) in r.anchors() {
        if best.map_or(true, |b| score > b.score) {
            best = Some(Argmax { u, v, score });
        }
    }
    best.ok_or_else(|| Error::argument("response map has no samples"))
}
