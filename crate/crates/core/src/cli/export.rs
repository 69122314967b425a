//! CSV and preview encodings. All numeric outputs are exact integers.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{Detection, ResponseMap};
use crate::config::PlaneIndex;
use crate::error::{Error, Result};
use crate::scene::{Voxel, VoxelSet};

/// One line per stored row, comma-separated scores.
pub fn response_csv(r: &ResponseMap) -> String {
    let (_, rows) = r.dims();
    let mut out = String::new();
    for j in 0..rows {
        push_row(&mut out, r.sample_row(j));
    }
    out
}

fn push_row<T: std::fmt::Display>(out: &mut String, values: &[T]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v}").expect("writing to a String");
    }
    out.push('\n');
}

/// Integer rows of a `side`-wide raster.
pub fn matrix_csv(values: &[i32], side: usize) -> String {
    let mut out = String::new();
    for row in values.chunks(side.max(1)) {
        push_row(&mut out, row);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Normalization {
    pub min: i64,
    pub max: i64,
}

/// Maps `[min, max]` linearly onto `0..=255` with round-half-up; a flat map is all 0.
pub fn preview(r: &ResponseMap) -> (Vec<u8>, Normalization) {
    let (min, max) = r.min_max().unwrap_or((0, 0));
    let span = (max - min) as i128;
    let pixels = r
        .scores()
        .iter()
        .map(|&s| {
            if span == 0 {
                0
            } else {
                ((2 * 255 * (s - min) as i128 + span) / (2 * span)) as u8
            }
        })
        .collect();
    (pixels, Normalization { min, max })
}

pub fn detections_csv(detections: &[Detection]) -> String {
    let mut out = String::from("cx,cy,k,score\n");
    for d in detections {
        writeln!(out, "{},{},{},{}", d.cx, d.cy, d.k, d.score).expect("writing to a String");
    }
    out
}

pub fn voxels_csv(set: &VoxelSet) -> String {
    let mut out = String::from("cx,cy,k\n");
    for v in set {
        writeln!(out, "{},{},{}", v.cx, v.cy, v.k).expect("writing to a String");
    }
    out
}

/// Parses the output of [`voxels_csv`]; the lateral grid is sized to fit.
pub fn parse_voxels_csv(text: &str) -> Result<VoxelSet> {
    let mut voxels = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (n == 0 && line.starts_with("cx")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::at_line(n + 1, format!("expected `cx,cy,k`, got `{line}`"));
        if fields.len() < 3 {
            return Err(bad());
        }
        let cx: u32 = fields[0].parse().map_err(|_| bad())?;
        let cy: u32 = fields[1].parse().map_err(|_| bad())?;
        let k: i32 = fields[2].parse().map_err(|_| bad())?;
        let k = PlaneIndex::nonzero(k).map_err(|_| Error::at_line(n + 1, "plane 0"))?;
        voxels.push(Voxel::new(cx, cy, k));
    }
    let nx = voxels.iter().map(|v| v.cx + 1).max().unwrap_or(0);
    let ny = voxels.iter().map(|v| v.cy + 1).max().unwrap_or(0);
    let mut set = VoxelSet::new(nx, ny);
    for v in voxels {
        set.insert(v)?;
    }
    Ok(set)
}
