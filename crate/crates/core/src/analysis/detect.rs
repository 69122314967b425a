//! Thresholded convolution recognition of voxels and depth-map assembly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use crate::config::{DisplayConfig, PlaneIndex};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::reffun::raster_1d;
use crate::scene::{Voxel, VoxelSet};
use crate::synth::MultiviewImage;

use super::correlate::correlate_separable_with;

/// Peak score of a lone full-scale voxel against its own unit-amplitude
/// kernel: `(L - 1) * p^2`. The same for every plane.
pub fn threshold_value(cfg: &DisplayConfig) -> i64 {
    let p = cfg.cell_pitch() as i64;
    (cfg.gray_levels() as i64 - 1) * p * p
}

/// Threshold estimate `p^2 * L^2` expressed in units of `10^8`.
pub fn paper_units(cfg: &DisplayConfig) -> Ratio<u128> {
    let p = cfg.cell_pitch() as u128;
    let l = cfg.gray_levels() as u128;
    Ratio::new(p * p * l * l, 100_000_000)
}

/// Exact decimal rendering of a ratio whose denominator divides a power of ten.
/// Falls back to `num/den` otherwise.
pub fn exact_decimal(r: &Ratio<u128>) -> String {
    let (mut den, mut twos, mut fives) = (*r.denom(), 0u32, 0u32);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scaled = r.numer() * 10u128.pow(digits) / r.denom();
    if digits == 0 {
        return scaled.to_string();
    }
    let scale = 10u128.pow(digits);
    format!("{}.{:0width$}", scaled / scale, scaled % scale, width = digits as usize)
}

/// Fraction of [`threshold_value`] a score must reach, in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionFraction(Ratio<u64>);

impl DetectionFraction {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 || numer == 0 || numer > denom {
            return Err(Error::argument(format!(
                "detection fraction must lie in (0, 1], got {numer}/{denom}"
            )));
        }
        Ok(Self(Ratio::new(numer, denom)))
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    /// `score >= fraction * threshold`, exactly.
    pub fn admits(&self, score: i64, threshold: i64) -> bool {
        score as i128 * *self.0.denom() as i128 >= *self.0.numer() as i128 * threshold as i128
    }
}

impl Default for DetectionFraction {
    fn default() -> Self {
        Self(Ratio::new(7, 10))
    }
}

impl fmt::Display for DetectionFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = Ratio::new(*self.0.numer() as u128, *self.0.denom() as u128);
        f.write_str(&exact_decimal(&r))
    }
}

/// Accepts decimals (`0.7`) and ratios (`7/10`).
impl FromStr for DetectionFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::argument(format!("`{s}` is not a fraction"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            return Self::new(n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let denom = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let numer = int
            .checked_mul(denom)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Self::new(numer, denom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Detection {
    pub cx: u32,
    pub cy: u32,
    pub k: PlaneIndex,
    pub score: i64,
}

impl Detection {
    pub fn voxel(&self) -> Voxel {
        Voxel::new(self.cx, self.cy, self.k)
    }
}

pub fn detect_plane(
    img: &MultiviewImage,
    k: PlaneIndex,
    cfg: &DisplayConfig,
    fraction: DetectionFraction,
) -> Result<Vec<Detection>> {
    detect_plane_with(img, k, cfg, fraction, Execution::default())
}

/// Correlates with the plane's 2D reference raster at cell-aligned anchors
/// and keeps anchors scoring at least `fraction * threshold_value`. Planes
/// whose pattern is larger than the image yield no anchors.
pub fn detect_plane_with(
    img: &MultiviewImage,
    k: PlaneIndex,
    cfg: &DisplayConfig,
    fraction: DetectionFraction,
    exec: Execution,
) -> Result<Vec<Detection>> {
    let kernel = raster_1d(k, cfg)?;
    if kernel.len() > img.width() || kernel.len() > img.height() {
        return Ok(Vec::new());
    }
    let p = cfg.cell_pitch();
    let threshold = threshold_value(cfg);
    let response = correlate_separable_with(img, kernel.values(), kernel.values(), p, exec)?;
    Ok(response
        .anchors()
        .filter(|&(_, _, score)| fraction.admits(score, threshold))
        .map(|(u, v, score)| Detection {
            cx: (u / p) as u32,
            cy: (v / p) as u32,
            k,
            score,
        })
        .collect())
}

/// Gray level per plane; background keeps level 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthLegend {
    pub background: u8,
    pub levels: Vec<(PlaneIndex, u8)>,
}

impl DepthLegend {
    /// Spreads the plane ladder evenly over `1..=L-1`, ascending with `k`.
    pub fn new(cfg: &DisplayConfig) -> Result<Self> {
        let planes = cfg.plane_ladder();
        let top = cfg.full_scale() as usize;
        let n = planes.len();
        if n > top {
            return Err(Error::config(format!(
                "{} gray levels cannot encode {n} planes plus background",
                cfg.gray_levels()
            )));
        }
        let step = if n > 1 { (top - 1) / (n - 1) } else { 0 };
        let levels = planes
            .into_iter()
            .enumerate()
            .map(|(i, k)| (k, if n == 1 { top as u8 } else { (1 + i * step) as u8 }))
            .collect();
        Ok(Self {
            background: 0,
            levels,
        })
    }

    pub fn level(&self, k: PlaneIndex) -> Option<u8> {
        self.levels.iter().find(|(p, _)| *p == k).map(|&(_, l)| l)
    }

    pub fn plane_of(&self, level: u8) -> Option<PlaneIndex> {
        self.levels.iter().find(|(_, l)| *l == level).map(|&(p, _)| p)
    }

    pub fn is_injective_and_monotone(&self) -> bool {
        self.levels.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1)
            && self.levels.iter().all(|&(_, l)| l != self.background)
    }
}

/// One gray level per cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthMap {
    pub width_cells: usize,
    pub height_cells: usize,
    pub pixels: Vec<u8>,
    pub legend: DepthLegend,
}

impl DepthMap {
    pub fn get(&self, cx: usize, cy: usize) -> u8 {
        self.pixels[cy * self.width_cells + cx]
    }

    pub fn plane_at(&self, cx: usize, cy: usize) -> Option<PlaneIndex> {
        self.legend.plane_of(self.get(cx, cy))
    }
}

#[derive(Debug, Clone)]
pub struct SceneAnalysis {
    /// Every per-plane detection, ordered by plane then anchor.
    pub detections: Vec<Detection>,
    /// The detections as voxels; a cell may hold several planes.
    pub voxels: VoxelSet,
    /// One plane per cell after conflict resolution.
    pub depth: DepthMap,
}

/// Preference order for a cell claimed by several planes: higher score, then
/// larger `|k|`, then negative `k`.
fn outranks(a: &Detection, b: &Detection) -> bool {
    (a.score, a.k.abs(), -a.k.get()) > (b.score, b.k.abs(), -b.k.get())
}

pub fn detect_all(
    img: &MultiviewImage,
    cfg: &DisplayConfig,
    fraction: DetectionFraction,
) -> Result<SceneAnalysis> {
    detect_all_with(img, cfg, fraction, Execution::default())
}

pub fn detect_all_with(
    img: &MultiviewImage,
    cfg: &DisplayConfig,
    fraction: DetectionFraction,
    exec: Execution,
) -> Result<SceneAnalysis> {
    let legend = DepthLegend::new(cfg)?;
    let planes = cfg.plane_ladder();
    let per_plane = par::map_collect(exec, &planes, |&k| detect_plane_with(img, k, cfg, fraction, exec));
    let mut detections = Vec::new();
    for found in per_plane {
        detections.extend(found?);
    }

    let (wc, hc) = img.cells();
    let mut voxels = VoxelSet::new(wc as u32, hc as u32);
    let mut best: BTreeMap<(u32, u32), Detection> = BTreeMap::new();
    for d in &detections {
        voxels.insert(d.voxel())?;
        best.entry((d.cx, d.cy))
            .and_modify(|cur| {
                if outranks(d, cur) {
                    *cur = *d;
                }
            })
            .or_insert(*d);
    }

    let mut pixels = vec![legend.background; wc * hc];
    for ((cx, cy), d) in &best {
        pixels[*cy as usize * wc + *cx as usize] = legend.level(d.k).expect("legend covers the ladder");
    }
    Ok(SceneAnalysis {
        detections,
        voxels,
        depth: DepthMap {
            width_cells: wc,
            height_cells: hc,
            pixels,
            legend,
        },
    })
}

/// Recall and precision of `found` against `truth`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Score {
    pub true_positives: usize,
    pub found: usize,
    pub truth: usize,
    pub recall: f64,
    pub precision: f64,
}

pub fn score_against(found: &VoxelSet, truth: &VoxelSet) -> Score {
    let tp = truth.iter().filter(|v| found.contains(v)).count();
    let ratio = |n: usize, d: usize| if d == 0 { 1.0 } else { n as f64 / d as f64 };
    Score {
        true_positives: tp,
        found: found.len(),
        truth: truth.len(),
        recall: ratio(tp, truth.len()),
        precision: ratio(tp, found.len()),
    }
}
