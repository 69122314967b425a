//! The `synth`, `analyze`, `cwt`, `kernels` and `selftest` pipelines. Each
//! writes its files into the output directory and returns their paths.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::json;

use crate::analysis::{
    correlate_separable, cwt_argmax, cwt_plane, detect_all, exact_decimal, paper_units,
    score_against, threshold_value, DetectionFraction,
};
use crate::config::{DisplayConfig, PlaneIndex};
use crate::error::{Error, Result};
use crate::reffun::{raster_1d, raster_1d_haar_form, raster_2d, tiled_coverage};
use crate::scene::{cube_diagonals, from_edge_list, EdgeList, Tetrahedron, Voxel, VoxelSet};
use crate::synth::{add_noise, render};
use crate::wavelet::{admissibility, wavelet_1d, wavelet_2d};

use super::export::{
    detections_csv, matrix_csv, parse_voxels_csv, preview, response_csv, voxels_csv,
};
use super::manifest::{display, RunManifest};
use super::pgm::{read_pgm, write_gray, write_pgm};

#[derive(Debug, Clone)]
pub struct Options {
    pub cfg: DisplayConfig,
    pub out_dir: PathBuf,
}

impl Options {
    fn prepare(&self) -> Result<()> {
        fs::create_dir_all(&self.out_dir).map_err(|e| Error::io(&self.out_dir, e))
    }

    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn config_args(&self) -> Vec<String> {
        vec![
            format!("--pitch={}", self.cfg.cell_pitch()),
            format!("--levels={}", self.cfg.gray_levels()),
            format!("--max-plane={}", self.cfg.max_abs_plane()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectSource {
    Cube8,
    Tetra,
    File(PathBuf),
}

impl ObjectSource {
    fn name(&self) -> String {
        match self {
            ObjectSource::Cube8 => "cube8".into(),
            ObjectSource::Tetra => "tetra".into(),
            ObjectSource::File(path) => stem(path),
        }
    }

    pub fn voxels(&self, cfg: &DisplayConfig) -> Result<VoxelSet> {
        match self {
            ObjectSource::Cube8 => cube_diagonals(8, cfg),
            ObjectSource::Tetra => Tetrahedron::default().voxels(cfg),
            ObjectSource::File(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let edges: EdgeList = text.parse()?;
                let set = from_edge_list(&edges)?;
                for v in &set {
                    v.k.check(cfg)?;
                }
                Ok(set)
            }
        }
    }
}

impl FromStr for ObjectSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cube8" => ObjectSource::Cube8,
            "tetra" => ObjectSource::Tetra,
            path if Path::new(path).is_file() => ObjectSource::File(path.into()),
            other => {
                return Err(Error::argument(format!(
                    "unknown object `{other}`: expected cube8, tetra or an object file"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub summary: Vec<String>,
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

pub fn synth(opts: &Options, source: &ObjectSource, noise: u32, seed: u64) -> Result<Outcome> {
    opts.prepare()?;
    let cfg = &opts.cfg;
    let voxels = source.voxels(cfg)?;
    let rendering = render(&voxels, cfg)?;
    let image = add_noise(&rendering.image, noise, seed)?;

    let name = source.name();
    let pgm = opts.out(&format!("{name}.pgm"));
    write_pgm(&image, &pgm)?;
    let truth = write_text(&opts.out(&format!("{name}.voxels.csv")), &voxels_csv(&voxels))?;

    let mut command = vec!["synth".to_string(), name.clone()];
    command.extend(opts.config_args());
    command.push(format!("--noise={noise}"));
    command.push(format!("--seed={seed}"));
    let mut manifest = RunManifest::new(command, cfg);
    if let ObjectSource::File(path) = source {
        manifest.inputs.push(display(path));
    }
    manifest.outputs = vec![display(&pgm), display(&truth)];
    manifest.seed = Some(seed);
    manifest.notes = vec![
        "patterns are anchored at the voxel cell and extend toward increasing cell indices".into(),
        format!(
            "canvas has {} empty margin cells on the right and bottom",
            rendering.margin_cells
        ),
        "overlapping patterns combine by maximum at full scale".into(),
        "noise adds an independent uniform integer in [0, amplitude] per pixel (ChaCha8 stream, row-major), clamped at full scale".into(),
    ];
    if matches!(source, ObjectSource::Tetra) {
        manifest.notes.push(
            "tetrahedron: base in the deepest plane with corners (0,0) and (extent-1,0), third vertex (extent/2, extent-1); apex at (extent/2, extent/2); markers at the two remaining corners".into(),
        );
    }
    manifest.details = json!({
        "object": name,
        "voxels": voxels.len(),
        "object_cells": rendering.object_cells,
        "margin_cells": rendering.margin_cells,
        "used_planes": rendering.used_planes,
        "image_size": [image.width(), image.height()],
        "noise_amplitude": noise,
    });
    let json = manifest.write(&opts.out(&format!("{name}.synth.json")))?;

    Ok(Outcome {
        outputs: vec![pgm, truth, json],
        summary: vec![format!(
            "rendered {} voxels of {name} into a {}x{} image",
            voxels.len(),
            image.width(),
            image.height()
        )],
    })
}

pub fn analyze(
    opts: &Options,
    image_path: &Path,
    fraction: DetectionFraction,
    truth: Option<&Path>,
) -> Result<Outcome> {
    opts.prepare()?;
    let cfg = &opts.cfg;
    let image = read_pgm(image_path, cfg)?;
    let result = detect_all(&image, cfg, fraction)?;
    let name = stem(image_path);

    let det = write_text(&opts.out(&format!("{name}.detections.csv")), &detections_csv(&result.detections))?;
    let depth = opts.out(&format!("{name}.depth.pgm"));
    write_gray(&depth, result.depth.width_cells, result.depth.height_cells, &result.depth.pixels)?;

    let mut summary = vec![format!(
        "{} detections in {} cells at fraction {fraction}",
        result.detections.len(),
        result.depth.pixels.iter().filter(|&&l| l != result.depth.legend.background).count()
    )];
    let score = match truth {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let truth_set = parse_voxels_csv(&text)?;
            let s = score_against(&result.voxels, &truth_set);
            summary.push(format!(
                "recall {:.4} ({}/{}), precision {:.4} ({}/{})",
                s.recall, s.true_positives, s.truth, s.precision, s.true_positives, s.found
            ));
            Some(s)
        }
        None => None,
    };

    let mut command = vec!["analyze".to_string(), display(image_path)];
    command.extend(opts.config_args());
    command.push(format!("--fraction={fraction}"));
    if let Some(path) = truth {
        command.push(format!("--truth={}", display(path)));
    }
    let mut manifest = RunManifest::new(command, cfg);
    manifest.inputs.push(display(image_path));
    manifest.inputs.extend(truth.map(display));
    manifest.outputs = vec![display(&det), display(&depth)];
    manifest.notes = vec![
        "scores use unit-amplitude reference kernels; threshold_value = (levels-1) * pitch^2".into(),
        "a detection needs score >= fraction * threshold_value at a cell-aligned anchor".into(),
        "depth map has one pixel per cell; a cell claimed by several planes keeps the highest score, then larger |k|, then negative k".into(),
    ];
    manifest.details = json!({
        "fraction": fraction.to_string(),
        "threshold_value": threshold_value(cfg),
        "paper_units": exact_decimal(&paper_units(cfg)),
        "detections": result.detections.len(),
        "depth_legend": result.depth.legend,
        "depth_size_cells": [result.depth.width_cells, result.depth.height_cells],
        "score": score,
    });
    let json = manifest.write(&opts.out(&format!("{name}.analyze.json")))?;
    Ok(Outcome {
        outputs: vec![det, depth, json],
        summary,
    })
}

pub fn cwt(opts: &Options, image_path: &Path, plane: i32) -> Result<Outcome> {
    opts.prepare()?;
    let cfg = &opts.cfg;
    let n = PlaneIndex::new(plane, cfg)?;
    let image = read_pgm(image_path, cfg)?;
    let response = cwt_plane(&image, n, cfg)?;
    let best = cwt_argmax(&response)?;
    let name = format!("{}.cwt{}", stem(image_path), n);

    let csv = write_text(&opts.out(&format!("{name}.csv")), &response_csv(&response))?;
    let (pixels, norm) = preview(&response);
    let (cols, rows) = response.dims();
    let pgm = opts.out(&format!("{name}.pgm"));
    write_gray(&pgm, cols, rows, &pixels)?;

    let p = cfg.cell_pitch();
    let mut command = vec!["cwt".to_string(), display(image_path), format!("--plane={n}")];
    command.extend(opts.config_args());
    let mut manifest = RunManifest::new(command, cfg);
    manifest.inputs.push(display(image_path));
    manifest.outputs = vec![display(&csv), display(&pgm)];
    manifest.notes = vec![
        "response rows are anchors v = 0.., columns anchors u = 0.. over the valid region".into(),
        "preview maps [min, max] linearly onto 0..=255".into(),
        "argmax ties resolve to the smallest (v, u)".into(),
    ];
    manifest.details = json!({
        "plane": n,
        "valid_region": [cols, rows],
        "normalization": norm,
        "odd_pulse_split": wavelet_1d(n, cfg)?.odd_split(),
        "argmax": {
            "u": best.u,
            "v": best.v,
            "score": best.score,
            "cell": [best.u / p, best.v / p],
        },
    });
    let json = manifest.write(&opts.out(&format!("{name}.json")))?;
    Ok(Outcome {
        outputs: vec![csv, pgm, json],
        summary: vec![format!(
            "plane {n}: argmax at pixel ({}, {}) in cell ({}, {}), score {}",
            best.u,
            best.v,
            best.u / p,
            best.v / p,
            best.score
        )],
    })
}

pub fn kernels(opts: &Options, plane: i32) -> Result<Outcome> {
    opts.prepare()?;
    let cfg = &opts.cfg;
    let n = PlaneIndex::new(plane, cfg)?;
    let r1 = raster_1d(n, cfg)?;
    let r2 = raster_2d(n, cfg)?;
    let w1 = wavelet_1d(n, cfg)?;
    let w2 = wavelet_2d(n, cfg)?;
    let name = format!("kernel{n}");
    let files = [
        ("reference1d", matrix_csv(r1.values(), r1.len())),
        ("reference2d", matrix_csv(r2.values(), r2.side())),
        ("wavelet1d", matrix_csv(w1.values(), w1.len())),
        ("wavelet2d", matrix_csv(w2.values(), w2.side())),
    ];
    let mut outputs = Vec::new();
    for (kind, text) in files {
        outputs.push(write_text(&opts.out(&format!("{name}.{kind}.csv")), &text)?);
    }

    let width = cfg.pulse_width(n)?;
    let mut command = vec!["kernels".to_string(), format!("--plane={n}")];
    command.extend(opts.config_args());
    let mut manifest = RunManifest::new(command, cfg);
    manifest.outputs = outputs.iter().map(|p| display(p)).collect();
    manifest.notes = vec!["wavelet coefficients (+1, -1) without the sqrt(2) factor".into()];
    if w1.odd_split() {
        manifest.notes.push(format!(
            "pulse width {width} is odd: each wavelet pulse is {h} x +1, one 0, {h} x -1",
            h = width / 2
        ));
    }
    manifest.details = json!({
        "plane": n,
        "pulse_width": width,
        "support_cells": r1.support_cells(),
        "reference_sum_1d": r1.sum(),
        "reference_sum_2d": r2.sum(),
        "wavelet_sum_1d": admissibility(&w1),
        "wavelet_sum_2d": admissibility(&w2),
        "odd_pulse_split": w1.odd_split(),
    });
    outputs.push(manifest.write(&opts.out(&format!("{name}.json")))?);
    Ok(Outcome {
        outputs,
        summary: vec![format!("plane {n}: {} pixel support, pulse width {width}", r1.len())],
    })
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Quick invariant checks over every plane of the configuration.
pub fn selftest(cfg: &DisplayConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(Check {
            name: name.into(),
            passed,
            detail,
        })
    };
    let p = cfg.cell_pitch();
    let planes = cfg.plane_ladder();

    let units = exact_decimal(&paper_units(cfg));
    push("threshold units", true, format!("p^2 L^2 / 1e8 = {units}; working peak {}", threshold_value(cfg)));

    let mut unity = true;
    let mut haar = true;
    let mut zero_mean = true;
    let mut peak = true;
    for &k in &planes {
        let cover = tiled_coverage(k, cfg, 3 * k.abs())?;
        unity &= cover[(k.abs() - 1) * p..].iter().all(|&c| c == 1);
        haar &= raster_1d_haar_form(k, cfg)? == raster_1d(k, cfg)?;
        match (wavelet_1d(k, cfg), wavelet_2d(k, cfg)) {
            (Ok(w1), Ok(w2)) => zero_mean &= admissibility(&w1) == 0 && admissibility(&w2) == 0,
            (Err(Error::Config(_)), _) | (_, Err(Error::Config(_))) => {}
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
        let mut lone = VoxelSet::new(1, 1);
        lone.insert(Voxel::new(0, 0, k))?;
        let img = render(&lone, cfg)?.image;
        let r = raster_1d(k, cfg)?;
        let score = correlate_separable(&img, r.values(), r.values())?.at(0, 0);
        peak &= score == Some(threshold_value(cfg));
    }
    let n = planes.len();
    push("partition of unity", unity, format!("{n} planes"));
    push("haar form equivalence", haar, format!("{n} planes"));
    push("wavelet zero mean", zero_mean, format!("{n} planes"));
    push("constant self-correlation peak", peak, format!("{n} planes"));
    Ok(checks)
}
