//! Computer-generated multiview images of voxel sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{DisplayConfig, PlaneIndex};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::reffun::{pulse_layout, raster_1d};
use crate::scene::VoxelSet;

/// 8-bit image whose sides are whole numbers of cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiviewImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
    cfg: DisplayConfig,
}

impl MultiviewImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>, cfg: DisplayConfig) -> Result<Self> {
        let p = cfg.cell_pitch();
        if width % p != 0 || height % p != 0 {
            return Err(Error::config(format!(
                "image size {width}x{height} is not a whole number of {p}-pixel cells"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::argument(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        let top = cfg.full_scale();
        if let Some(i) = pixels.iter().position(|&v| v > top) {
            return Err(Error::config(format!(
                "pixel {i} has value {} above full scale {top}",
                pixels[i]
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            cfg,
        })
    }

    pub fn zeros(width_cells: usize, height_cells: usize, cfg: DisplayConfig) -> Self {
        let p = cfg.cell_pitch();
        Self {
            width: width_cells * p,
            height: height_cells * p,
            pixels: vec![0; width_cells * height_cells * p * p],
            cfg,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> (usize, usize) {
        let p = self.cfg.cell_pitch();
        (self.width / p, self.height / p)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn config(&self) -> &DisplayConfig {
        &self.cfg
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// Same pixel grid under a different configuration.
    pub fn with_config(&self, cfg: DisplayConfig) -> Result<Self> {
        Self::new(self.width, self.height, self.pixels.clone(), cfg)
    }
}

/// Rendered image plus the facts needed to reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct Rendering {
    #[serde(skip)]
    pub image: MultiviewImage,
    pub used_planes: Vec<PlaneIndex>,
    /// Empty cells appended on the right and bottom.
    pub margin_cells: usize,
    pub object_cells: (u32, u32),
}

struct Stamp {
    y0: usize,
    rows: Vec<i32>,
    col_spans: Vec<std::ops::Range<usize>>,
}

pub fn render(v: &VoxelSet, cfg: &DisplayConfig) -> Result<Rendering> {
    render_with(v, cfg, Execution::default())
}

/// Stamps every voxel's 2D reference pattern at full scale onto an empty
/// canvas of `(nx + m) x (ny + m)` cells, `m` being the largest `|k|` used,
/// combining overlaps by maximum.
pub fn render_with(v: &VoxelSet, cfg: &DisplayConfig, exec: Execution) -> Result<Rendering> {
    let p = cfg.cell_pitch();
    let used_planes = v.planes();
    let margin = v.max_abs_plane();
    let (nx, ny) = v.lateral();
    let mut image = MultiviewImage::zeros(nx as usize + margin, ny as usize + margin, *cfg);

    let mut stamps = Vec::with_capacity(v.len());
    for voxel in v {
        let k = voxel.k.check(cfg)?;
        let rows = raster_1d(k, cfg)?.values().to_vec();
        let x0 = voxel.cx as usize * p;
        let y0 = voxel.cy as usize * p;
        let col_spans = pulse_layout(k, cfg)?
            .iter()
            .map(|pulse| {
                let s = pulse.span(p);
                x0 + s.start..x0 + s.end
            })
            .collect::<Vec<_>>();
        if x0 + rows.len() > image.width || y0 + rows.len() > image.height {
            return Err(Error::config(format!("voxel {voxel} does not fit the canvas")));
        }
        stamps.push(Stamp {
            y0,
            rows,
            col_spans,
        });
    }

    let level = cfg.full_scale();
    let width = image.width;
    par::for_each_row(exec, &mut image.pixels, width, |y, row| {
        for stamp in &stamps {
            if y < stamp.y0 || y >= stamp.y0 + stamp.rows.len() || stamp.rows[y - stamp.y0] == 0 {
                continue;
            }
            for span in &stamp.col_spans {
                for px in &mut row[span.clone()] {
                    *px = (*px).max(level);
                }
            }
        }
    });

    Ok(Rendering {
        image,
        used_planes,
        margin_cells: margin,
        object_cells: (nx, ny),
    })
}

/// Adds an independent uniform integer in `[0, amplitude]` to every pixel,
/// clamped at full scale. Pixels are visited in row-major order from a
/// ChaCha8 stream seeded with `seed`.
pub fn add_noise(img: &MultiviewImage, amplitude: u32, seed: u64) -> Result<MultiviewImage> {
    let cfg = img.cfg;
    if amplitude >= cfg.gray_levels() {
        return Err(Error::argument(format!(
            "noise amplitude {amplitude} must be below the gray-level count {}",
            cfg.gray_levels()
        )));
    }
    if amplitude == 0 {
        return Ok(img.clone());
    }
    let top = cfg.full_scale() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = img
        .pixels
        .iter()
        .map(|&v| (v as u32 + rng.gen_range(0..=amplitude)).min(top) as u8)
        .collect();
    Ok(MultiviewImage { pixels, ..*img })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reffun::raster_2d;
    use crate::scene::{cube_diagonals, Voxel};
    use proptest::prelude::*;

    fn cfg() -> DisplayConfig {
        DisplayConfig::default()
    }

    fn single(cx: u32, cy: u32, k: i32) -> VoxelSet {
        let mut set = VoxelSet::new(cx + 1, cy + 1);
        set.insert(Voxel::new(cx, cy, PlaneIndex::nonzero(k).unwrap())).unwrap();
        set
    }

    #[test]
    fn empty_set_renders_black() {
        let r = render(&VoxelSet::new(3, 2), &cfg()).unwrap();
        assert_eq!((r.image.width(), r.image.height()), (180, 120));
        assert!(r.image.pixels().iter().all(|&v| v == 0));
        assert_eq!(r.margin_cells, 0);
    }

    #[test]
    fn single_voxel_plane_one() {
        let r = render(&single(0, 0, 1), &cfg()).unwrap();
        assert_eq!(r.image.cells(), (2, 2));
        for y in 0..120 {
            for x in 0..120 {
                let expected = if x < 60 && y < 60 { 255 } else { 0 };
                assert_eq!(r.image.get(x, y), expected, "({x}, {y})");
            }
        }
    }

    #[test]
    fn stamp_matches_raster_2d() {
        for k in [-3, 2, 5] {
            let r = render(&single(1, 2, k), &cfg()).unwrap();
            let kernel = raster_2d(PlaneIndex::nonzero(k).unwrap(), &cfg()).unwrap();
            let side = kernel.side();
            let mut lit = 0usize;
            for y in 0..r.image.height() {
                for x in 0..r.image.width() {
                    let inside = (60..60 + side).contains(&x) && (120..120 + side).contains(&y);
                    let expected = if inside { 255 * kernel.at(x - 60, y - 120) as u8 } else { 0 };
                    assert_eq!(r.image.get(x, y), expected);
                    lit += usize::from(expected > 0);
                }
            }
            assert_eq!(lit, 3600);
        }
    }

    #[test]
    fn canvas_sizes() {
        let cube = cube_diagonals(8, &cfg()).unwrap();
        let r = render(&cube, &cfg()).unwrap();
        assert_eq!((r.image.width(), r.image.height()), (720, 720));
        assert_eq!(r.margin_cells, 4);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let cube = cube_diagonals(8, &cfg()).unwrap();
        let a = render_with(&cube, &cfg(), Execution::Sequential).unwrap();
        let b = render_with(&cube, &cfg(), Execution::Parallel).unwrap();
        assert_eq!(a.image, b.image);
    }

    #[test]
    fn noise_contract() {
        let img = render(&cube_diagonals(4, &cfg()).unwrap(), &cfg()).unwrap().image;
        assert_eq!(add_noise(&img, 0, 9).unwrap(), img);
        let a = add_noise(&img, 51, 7).unwrap();
        assert_eq!(a, add_noise(&img, 51, 7).unwrap());
        assert_ne!(a, add_noise(&img, 51, 8).unwrap());
        for (&before, &after) in img.pixels().iter().zip(a.pixels()) {
            assert!(after >= before && after - before <= 51);
        }
        assert!(matches!(add_noise(&img, 256, 1), Err(Error::Argument(_))));
        assert!(add_noise(&img, 255, 1).is_ok());
    }

    #[test]
    fn image_validation() {
        assert!(MultiviewImage::new(61, 60, vec![0; 61 * 60], cfg()).is_err());
        assert!(MultiviewImage::new(60, 60, vec![0; 10], cfg()).is_err());
        let four = DisplayConfig::new(60, 4, 6).unwrap();
        assert!(MultiviewImage::new(60, 60, vec![4; 3600], four).is_err());
        assert!(MultiviewImage::new(60, 60, vec![3; 3600], four).is_ok());
    }

    fn voxel_sets() -> impl Strategy<Value = VoxelSet> {
        proptest::collection::vec((0u32..5, 0u32..5, prop_oneof![-4i32..=-1, 1i32..=4]), 0..8).prop_map(|vs| {
            let mut set = VoxelSet::new(5, 5);
            for (x, y, k) in vs {
                set.insert(Voxel::new(x, y, PlaneIndex::nonzero(k).unwrap())).unwrap();
            }
            set
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn every_voxel_pattern_is_complete(set in voxel_sets()) {
            let r = render(&set, &cfg()).unwrap();
            for v in &set {
                let kernel = raster_2d(v.k, &cfg()).unwrap();
                let (x0, y0) = (v.cx as usize * 60, v.cy as usize * 60);
                for y in 0..kernel.side() {
                    for x in 0..kernel.side() {
                        if kernel.at(x, y) == 1 {
                            prop_assert_eq!(r.image.get(x0 + x, y0 + y), 255);
                        }
                    }
                }
            }
        }

        #[test]
        fn support_is_union_of_stamps(a in voxel_sets(), b in voxel_sets()) {
            let union = a.union(&b);
            let margin = union.max_abs_plane();
            let canvas = |s: &VoxelSet| {
                // re-render each part on the union's canvas
                let mut sized = VoxelSet::new(5 + (margin - s.max_abs_plane()) as u32, 5 + (margin - s.max_abs_plane()) as u32);
                for v in s { sized.insert(*v).unwrap(); }
                render(&sized, &cfg()).unwrap().image
            };
            let (ia, ib, iu) = (canvas(&a), canvas(&b), render(&union, &cfg()).unwrap().image);
            prop_assert_eq!(ia.width(), iu.width());
            for ((&x, &y), &z) in ia.pixels().iter().zip(ib.pixels()).zip(iu.pixels()) {
                prop_assert_eq!(z != 0, x != 0 || y != 0);
            }
        }
    }
}
