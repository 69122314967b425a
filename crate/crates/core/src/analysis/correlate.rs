//! Exact separable cross-correlation over the valid region.
//!
//! Each kernel is split into maximal runs of equal nonzero samples, so a pass
//! costs one prefix-sum difference per run instead of one multiply per tap.
//! Reference rasters and wavelets have at most `2|k|` runs.

use crate::config::PlaneIndex;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::synth::MultiviewImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub u0: usize,
    pub v0: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        (self.u0..self.u0 + self.width).contains(&u) && (self.v0..self.v0 + self.height).contains(&v)
    }
}

/// Correlation scores indexed by anchor pixel. Only anchors whose kernel
/// support fits inside the image are stored; with a stride `s`, sample
/// `(i, j)` is the anchor `(i * s, j * s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseMap {
    scores: Vec<i64>,
    cols: usize,
    rows: usize,
    stride: usize,
    valid: Rect,
    plane: Option<PlaneIndex>,
}

impl ResponseMap {
    pub fn valid_region(&self) -> Rect {
        self.valid
    }

    pub fn plane(&self) -> Option<PlaneIndex> {
        self.plane
    }

    pub(crate) fn with_plane(mut self, plane: PlaneIndex) -> Self {
        self.plane = Some(plane);
        self
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Number of stored samples along x and y.
    pub fn dims(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    pub fn scores(&self) -> &[i64] {
        &self.scores
    }

    pub fn sample_row(&self, j: usize) -> &[i64] {
        &self.scores[j * self.cols..(j + 1) * self.cols]
    }

    /// Score at anchor pixel `(u, v)`, if that anchor was evaluated.
    pub fn at(&self, u: usize, v: usize) -> Option<i64> {
        if !self.valid.contains(u, v) || u % self.stride != 0 || v % self.stride != 0 {
            return None;
        }
        Some(self.scores[(v / self.stride) * self.cols + u / self.stride])
    }

    /// `(u, v, score)` for every stored anchor in row-major order.
    pub fn anchors(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        let s = self.stride;
        self.scores
            .iter()
            .enumerate()
            .map(move |(n, &score)| ((n % self.cols) * s, (n / self.cols) * s, score))
    }

    pub fn min_max(&self) -> Option<(i64, i64)> {
        let min = *self.scores.iter().min()?;
        let max = *self.scores.iter().max()?;
        Some((min, max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Run {
    start: usize,
    end: usize,
    value: i64,
}

fn runs(kernel: &[i32]) -> Vec<Run> {
    let mut out: Vec<Run> = Vec::new();
    for (i, &v) in kernel.iter().enumerate() {
        match out.last_mut() {
            Some(run) if run.end == i && run.value == v as i64 => run.end += 1,
            _ if v != 0 => out.push(Run {
                start: i,
                end: i + 1,
                value: v as i64,
            }),
            _ => {}
        }
    }
    out
}

/// `scores[v][u] = sum_{y,x} img[v+y][u+x] * ky[y] * kx[x]`, row pass then
/// column pass, exact in `i64`.
pub fn correlate_separable(img: &MultiviewImage, kx: &[i32], ky: &[i32]) -> Result<ResponseMap> {
    correlate_separable_with(img, kx, ky, 1, Execution::default())
}

pub fn correlate_separable_with(
    img: &MultiviewImage,
    kx: &[i32],
    ky: &[i32],
    stride: usize,
    exec: Execution,
) -> Result<ResponseMap> {
    correlate_grid(img.pixels(), img.width(), img.height(), kx, ky, stride, exec)
}

pub(crate) fn correlate_grid(
    pixels: &[u8],
    width: usize,
    height: usize,
    kx: &[i32],
    ky: &[i32],
    stride: usize,
    exec: Execution,
) -> Result<ResponseMap> {
    if kx.is_empty() || ky.is_empty() {
        return Err(Error::argument("correlation kernels must be nonempty"));
    }
    if kx.len() > width || ky.len() > height {
        return Err(Error::argument(format!(
            "kernel {}x{} is larger than the {width}x{height} image",
            kx.len(),
            ky.len()
        )));
    }
    if stride == 0 {
        return Err(Error::argument("stride must be positive"));
    }
    debug_assert_eq!(pixels.len(), width * height);
    let valid = Rect {
        u0: 0,
        v0: 0,
        width: width - kx.len() + 1,
        height: height - ky.len() + 1,
    };
    let cols = valid.width.div_ceil(stride);
    let rows = valid.height.div_ceil(stride);
    let row_runs = runs(kx);
    let col_runs = runs(ky);

    // Row pass into rows 1..=height of a column prefix table; row 0 stays 0.
    let mut prefix = vec![0i64; (height + 1) * cols];
    par::for_each_row(exec, &mut prefix[cols..], cols, |y, out| {
        let src = &pixels[y * width..(y + 1) * width];
        let mut acc = Vec::with_capacity(width + 1);
        acc.push(0i64);
        let mut sum = 0i64;
        for &p in src {
            sum += p as i64;
            acc.push(sum);
        }
        for (i, o) in out.iter_mut().enumerate() {
            let u = i * stride;
            *o = row_runs
                .iter()
                .map(|r| r.value * (acc[u + r.end] - acc[u + r.start]))
                .sum();
        }
    });
    for y in 1..=height {
        let (done, rest) = prefix.split_at_mut(y * cols);
        let above = &done[(y - 1) * cols..];
        for (cur, &prev) in rest[..cols].iter_mut().zip(above) {
            *cur += prev;
        }
    }

    let mut scores = vec![0i64; rows * cols];
    par::for_each_row(exec, &mut scores, cols, |j, out| {
        let v = j * stride;
        for r in &col_runs {
            let hi = &prefix[(v + r.end) * cols..(v + r.end + 1) * cols];
            let lo = &prefix[(v + r.start) * cols..(v + r.start + 1) * cols];
            for ((o, &h), &l) in out.iter_mut().zip(hi).zip(lo) {
                *o += r.value * (h - l);
            }
        }
    });

    Ok(ResponseMap {
        scores,
        cols,
        rows,
        stride,
        valid,
        plane: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DisplayConfig;
    use proptest::prelude::*;

    /// Direct 2D double loop over the outer product kernel.
    fn direct(pixels: &[u8], width: usize, height: usize, kx: &[i32], ky: &[i32]) -> Vec<i64> {
        let mut out = Vec::new();
        for v in 0..=height - ky.len() {
            for u in 0..=width - kx.len() {
                let mut acc = 0i64;
                for (y, &wy) in ky.iter().enumerate() {
                    for (x, &wx) in kx.iter().enumerate() {
                        acc += pixels[(v + y) * width + u + x] as i64 * (wy * wx) as i64;
                    }
                }
                out.push(acc);
            }
        }
        out
    }

    fn small_cfg() -> DisplayConfig {
        DisplayConfig::new(2, 256, 6).unwrap()
    }

    #[test]
    fn run_decomposition() {
        assert_eq!(runs(&[0, 1, 1, 0, -1, -1, 2]).len(), 3);
        assert!(runs(&[0, 0]).is_empty());
        assert_eq!(
            runs(&[3, 3, 3]),
            vec![Run {
                start: 0,
                end: 3,
                value: 3
            }]
        );
    }

    #[test]
    fn unit_kernel_is_identity() {
        let pixels: Vec<u8> = (0..36).map(|i| (i * 7 % 256) as u8).collect();
        let img = MultiviewImage::new(6, 6, pixels.clone(), small_cfg()).unwrap();
        let r = correlate_separable(&img, &[1], &[1]).unwrap();
        assert_eq!(r.scores(), pixels.iter().map(|&p| p as i64).collect::<Vec<_>>().as_slice());
        assert_eq!(r.valid_region(), Rect { u0: 0, v0: 0, width: 6, height: 6 });
    }

    #[test]
    fn zero_image_gives_zero_scores() {
        let img = MultiviewImage::new(8, 6, vec![0; 48], small_cfg()).unwrap();
        let r = correlate_separable(&img, &[1, -1, 2], &[4, 4]).unwrap();
        assert!(r.scores().iter().all(|&s| s == 0));
        assert_eq!(r.dims(), (6, 5));
    }

    #[test]
    fn oversized_kernel_is_rejected() {
        let img = MultiviewImage::new(4, 4, vec![0; 16], small_cfg()).unwrap();
        assert!(matches!(correlate_separable(&img, &[1; 5], &[1]), Err(Error::Argument(_))));
        assert!(matches!(correlate_separable(&img, &[], &[1]), Err(Error::Argument(_))));
    }

    #[test]
    fn strided_samples_match_full_map() {
        let pixels: Vec<u8> = (0..30 * 24).map(|i| ((i * 31 + 7) % 256) as u8).collect();
        let full = correlate_grid(&pixels, 30, 24, &[1, 2, 0, -1], &[0, 3, 3], 1, Execution::Sequential).unwrap();
        let coarse = correlate_grid(&pixels, 30, 24, &[1, 2, 0, -1], &[0, 3, 3], 4, Execution::Parallel).unwrap();
        for (u, v, s) in coarse.anchors() {
            assert_eq!(full.at(u, v), Some(s));
            assert_eq!(coarse.at(u, v), Some(s));
        }
        assert_eq!(coarse.at(1, 0), None);
        assert_eq!(coarse.dims(), (7, 6));
    }

    proptest! {
        #[test]
        fn matches_direct_correlation(
            (w, h, pixels) in (1usize..14, 1usize..14).prop_flat_map(|(w, h)| {
                (Just(w), Just(h), proptest::collection::vec(any::<u8>(), w * h))
            }),
            kx in proptest::collection::vec(-3i32..=3, 1..6),
            ky in proptest::collection::vec(-3i32..=3, 1..6),
        ) {
            prop_assume!(kx.len() <= w && ky.len() <= h);
            let r = correlate_grid(&pixels, w, h, &kx, &ky, 1, Execution::Sequential).unwrap();
            let expected = direct(&pixels, w, h, &kx, &ky);
            prop_assert_eq!(r.scores(), expected.as_slice());
        }
    }
}
