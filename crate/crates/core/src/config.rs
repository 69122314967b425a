//! Display geometry shared by every stage: cell pitch, gray levels and the
//! range of depth planes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CELL_PITCH: usize = 60;
pub const DEFAULT_GRAY_LEVELS: u32 = 256;
pub const DEFAULT_MAX_ABS_PLANE: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplayConfig {
    cell_pitch: usize,
    gray_levels: u32,
    max_abs_plane: u32,
}

impl Default for DisplayConfig {
    fn default() -> Self {
        Self {
            cell_pitch: DEFAULT_CELL_PITCH,
            gray_levels: DEFAULT_GRAY_LEVELS,
            max_abs_plane: DEFAULT_MAX_ABS_PLANE,
        }
    }
}

impl DisplayConfig {
    /// Gray levels are capped at 256 because images are stored as 8-bit samples.
    pub fn new(cell_pitch: usize, gray_levels: u32, max_abs_plane: u32) -> Result<Self> {
        if cell_pitch < 2 {
            return Err(Error::config(format!(
                "cell pitch must be at least 2 pixels, got {cell_pitch}"
            )));
        }
        if !(2..=256).contains(&gray_levels) {
            return Err(Error::config(format!(
                "gray levels must lie in 2..=256, got {gray_levels}"
            )));
        }
        if max_abs_plane == 0 {
            return Err(Error::config("maximum plane index must be at least 1"));
        }
        Ok(Self {
            cell_pitch,
            gray_levels,
            max_abs_plane,
        })
    }

    pub fn cell_pitch(&self) -> usize {
        self.cell_pitch
    }

    pub fn gray_levels(&self) -> u32 {
        self.gray_levels
    }

    pub fn max_abs_plane(&self) -> u32 {
        self.max_abs_plane
    }

    /// Full-scale intensity, `grayLevels - 1`.
    pub fn full_scale(&self) -> u8 {
        (self.gray_levels - 1) as u8
    }

    pub fn plane(&self, k: i32) -> Result<PlaneIndex> {
        PlaneIndex::new(k, self)
    }

    /// Every valid plane, ordered by k: `-max..=-1, 1..=max`.
    pub fn plane_ladder(&self) -> Vec<PlaneIndex> {
        let m = self.max_abs_plane as i32;
        (-m..=m)
            .filter(|&k| k != 0)
            .map(PlaneIndex)
            .collect()
    }

    /// Pulse width `p / |k|`, rejecting pitches that `|k|` does not divide.
    pub fn pulse_width(&self, k: PlaneIndex) -> Result<usize> {
        let n = k.abs();
        if self.cell_pitch % n != 0 {
            return Err(Error::config(format!(
                "cell pitch {} is not divisible by |k| = {n}",
                self.cell_pitch
            )));
        }
        Ok(self.cell_pitch / n)
    }
}

/// Signed, nonzero depth-plane index. The sign is a display convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlaneIndex(i32);

impl PlaneIndex {
    pub fn new(k: i32, cfg: &DisplayConfig) -> Result<Self> {
        if k == 0 || k.unsigned_abs() > cfg.max_abs_plane {
            return Err(Error::InvalidPlane(k));
        }
        Ok(Self(k))
    }

    /// Checks only `k != 0`; range against a configuration is checked at kernel build.
    pub fn nonzero(k: i32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPlane(k));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> i32 {
        self.0
    }

    pub fn abs(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn mirrored(self) -> Self {
        Self(-self.0)
    }

    pub(crate) fn check(self, cfg: &DisplayConfig) -> Result<Self> {
        Self::new(self.0, cfg)
    }
}

impl fmt::Display for PlaneIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
