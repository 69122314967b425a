//! Wireframe voxel objects: 3D Bresenham voxelization, the cube-diagonal and
//! tetrahedron test objects, and the plain-text object format.
//!
//! Plane 0 carries no pattern, so segment walks skip it and the test objects
//! use the ladders `-h..=-1, 1..=h`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::config::{DisplayConfig, PlaneIndex};
use crate::error::{Error, Result};

/// Integer point in (cell-x, cell-y, plane) space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point3 {
    pub x: i32,
    pub y: i32,
    pub k: i32,
}

impl Point3 {
    pub const fn new(x: i32, y: i32, k: i32) -> Self {
        Self { x, y, k }
    }

    fn coords(self) -> [i32; 3] {
        [self.x, self.y, self.k]
    }

    fn from_coords(c: [i32; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Voxel {
    pub cx: u32,
    pub cy: u32,
    pub k: PlaneIndex,
}

impl Voxel {
    pub fn new(cx: u32, cy: u32, k: PlaneIndex) -> Self {
        Self { cx, cy, k }
    }

    fn from_point(p: Point3) -> Result<Self> {
        if p.x < 0 || p.y < 0 {
            return Err(Error::argument(format!(
                "voxel ({}, {}, {}) has a negative lateral coordinate",
                p.x, p.y, p.k
            )));
        }
        Ok(Self::new(p.x as u32, p.y as u32, PlaneIndex::nonzero(p.k)?))
    }
}

impl fmt::Display for Voxel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.cx, self.cy, self.k)
    }
}

/// Set of voxels on an `nx x ny` lateral cell grid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VoxelSet {
    voxels: BTreeSet<Voxel>,
    lateral: (u32, u32),
}

impl VoxelSet {
    pub fn new(nx: u32, ny: u32) -> Self {
        Self {
            voxels: BTreeSet::new(),
            lateral: (nx, ny),
        }
    }

    /// Collects points and sizes the lateral grid to fit them.
    pub fn from_points(points: impl IntoIterator<Item = Point3>) -> Result<Self> {
        let voxels = points
            .into_iter()
            .map(Voxel::from_point)
            .collect::<Result<BTreeSet<_>>>()?;
        let nx = voxels.iter().map(|v| v.cx + 1).max().unwrap_or(0);
        let ny = voxels.iter().map(|v| v.cy + 1).max().unwrap_or(0);
        Ok(Self {
            voxels,
            lateral: (nx, ny),
        })
    }

    /// Returns false when the voxel was already present.
    pub fn insert(&mut self, v: Voxel) -> Result<bool> {
        if v.cx >= self.lateral.0 || v.cy >= self.lateral.1 {
            return Err(Error::argument(format!(
                "voxel {v} lies outside the {}x{} lateral grid",
                self.lateral.0, self.lateral.1
            )));
        }
        Ok(self.voxels.insert(v))
    }

    pub fn contains(&self, v: &Voxel) -> bool {
        self.voxels.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Voxel> + '_ {
        self.voxels.iter()
    }

    pub fn len(&self) -> usize {
        self.voxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voxels.is_empty()
    }

    pub fn lateral(&self) -> (u32, u32) {
        self.lateral
    }

    /// Distinct planes in ascending order.
    pub fn planes(&self) -> Vec<PlaneIndex> {
        let set: BTreeSet<_> = self.voxels.iter().map(|v| v.k).collect();
        set.into_iter().collect()
    }

    pub fn max_abs_plane(&self) -> usize {
        self.voxels.iter().map(|v| v.k.abs()).max().unwrap_or(0)
    }

    pub fn in_plane(&self, k: PlaneIndex) -> impl Iterator<Item = &Voxel> + '_ {
        self.voxels.iter().filter(move |v| v.k == k)
    }

    /// Union; the lateral grid grows to cover both operands.
    pub fn union(&self, other: &VoxelSet) -> VoxelSet {
        VoxelSet {
            voxels: self.voxels.union(&other.voxels).copied().collect(),
            lateral: (
                self.lateral.0.max(other.lateral.0),
                self.lateral.1.max(other.lateral.1),
            ),
        }
    }
}

impl<'a> IntoIterator for &'a VoxelSet {
    type Item = &'a Voxel;
    type IntoIter = std::collections::btree_set::Iter<'a, Voxel>;

    fn into_iter(self) -> Self::IntoIter {
        self.voxels.iter()
    }
}

/// Voxels of one segment in walk order, with the count of plane-0 steps dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentRaster {
    pub points: Vec<Point3>,
    pub skipped_screen_plane: usize,
}

/// 3D Bresenham walk between two voxels, both included.
///
/// Endpoints are sorted lexicographically first so the output does not depend
/// on direction; an error term of exactly one half rounds toward the second
/// endpoint. The walk has `max(|dx|, |dy|, |dk|) + 1` steps before steps
/// landing on plane 0 are removed.
pub fn rasterize_segment_3d(a: Point3, b: Point3) -> Result<SegmentRaster> {
    for end in [a, b] {
        if end.k == 0 {
            return Err(Error::InvalidPlane(0));
        }
    }
    let (from, to) = if a <= b { (a, b) } else { (b, a) };
    let start = from.coords();
    let delta: Vec<i32> = (0..3).map(|i| to.coords()[i] - start[i]).collect();
    let steps = delta.iter().map(|d| d.abs()).max().unwrap_or(0);

    let mut current = start;
    // err[i] = 2 |d_i| t + D - 2 D m_i, with m_i the steps taken on axis i
    let mut err: [i64; 3] = [steps as i64; 3];
    let mut points = Vec::with_capacity(steps as usize + 1);
    let mut skipped = 0;
    for t in 0..=steps {
        if t > 0 {
            for axis in 0..3 {
                err[axis] += 2 * delta[axis].abs() as i64;
                if err[axis] >= 2 * steps as i64 {
                    err[axis] -= 2 * steps as i64;
                    current[axis] += delta[axis].signum();
                }
            }
        }
        if current[2] == 0 {
            skipped += 1;
        } else {
            points.push(Point3::from_coords(current));
        }
    }
    Ok(SegmentRaster {
        points,
        skipped_screen_plane: skipped,
    })
}

/// Vertices plus index pairs, as read from an object file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeList {
    pub vertices: Vec<Point3>,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeList {
    pub fn validate(&self) -> Result<()> {
        for (n, v) in self.vertices.iter().enumerate() {
            if v.k == 0 {
                return Err(Error::argument(format!("vertex {n} lies in plane 0")));
            }
            if v.x < 0 || v.y < 0 {
                return Err(Error::argument(format!("vertex {n} has a negative lateral coordinate")));
            }
        }
        for &(i, j) in &self.edges {
            if i >= self.vertices.len() || j >= self.vertices.len() {
                return Err(Error::argument(format!(
                    "edge ({i}, {j}) references a missing vertex ({} declared)",
                    self.vertices.len()
                )));
            }
            if i == j {
                return Err(Error::argument(format!("edge ({i}, {j}) is a self-loop")));
            }
        }
        Ok(())
    }
}

/// Parses `v <cx> <cy> <k>` and `e <i> <j>` lines (0-based vertex indices).
/// `#` starts a comment.
impl FromStr for EdgeList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut list = EdgeList::default();
        let mut edge_lines = Vec::new();
        for (n, raw) in s.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let tag = fields.next().unwrap_or_default();
            let nums = fields
                .map(|f| {
                    f.parse::<i64>()
                        .map_err(|_| Error::at_line(line_no, format!("`{f}` is not an integer")))
                })
                .collect::<Result<Vec<_>>>()?;
            match (tag, nums.as_slice()) {
                ("v", &[x, y, k]) => {
                    let to_i32 = |v: i64| {
                        i32::try_from(v).map_err(|_| Error::at_line(line_no, "coordinate out of range"))
                    };
                    let p = Point3::new(to_i32(x)?, to_i32(y)?, to_i32(k)?);
                    if p.k == 0 {
                        return Err(Error::at_line(line_no, "vertex in plane 0"));
                    }
                    if p.x < 0 || p.y < 0 {
                        return Err(Error::at_line(line_no, "negative lateral coordinate"));
                    }
                    list.vertices.push(p);
                }
                ("e", &[i, j]) => {
                    if i < 0 || j < 0 {
                        return Err(Error::at_line(line_no, "negative vertex index"));
                    }
                    list.edges.push((i as usize, j as usize));
                    edge_lines.push(line_no);
                }
                ("v", _) => return Err(Error::at_line(line_no, "expected `v <cx> <cy> <k>`")),
                ("e", _) => return Err(Error::at_line(line_no, "expected `e <i> <j>`")),
                (other, _) => {
                    return Err(Error::at_line(line_no, format!("unknown record `{other}`")))
                }
            }
        }
        for (&(i, j), &line_no) in list.edges.iter().zip(&edge_lines) {
            if i >= list.vertices.len() || j >= list.vertices.len() {
                return Err(Error::at_line(line_no, format!("edge ({i}, {j}) references a missing vertex")));
            }
            if i == j {
                return Err(Error::at_line(line_no, "self-loop edge"));
            }
        }
        Ok(list)
    }
}

/// Union of all rasterized edges. Isolated vertices are kept.
pub fn from_edge_list(e: &EdgeList) -> Result<VoxelSet> {
    e.validate()?;
    let mut points: Vec<Point3> = e.vertices.clone();
    for &(i, j) in &e.edges {
        points.extend(rasterize_segment_3d(e.vertices[i], e.vertices[j])?.points);
    }
    VoxelSet::from_points(points)
}

/// The four space diagonals of a `size^3` cube over the planes
/// `-size/2..=-1, 1..=size/2`.
pub fn cube_diagonals(size: u32, cfg: &DisplayConfig) -> Result<VoxelSet> {
    if size == 0 || size % 2 != 0 {
        return Err(Error::config(format!("cube size must be even and positive, got {size}")));
    }
    let half = (size / 2) as i32;
    if half as u32 > cfg.max_abs_plane() {
        return Err(Error::config(format!(
            "a cube of size {size} needs planes up to {half}, configuration allows {}",
            cfg.max_abs_plane()
        )));
    }
    let far = size as i32 - 1;
    let mut edges = EdgeList::default();
    for (x, y) in [(0, 0), (far, 0), (0, far), (far, far)] {
        let n = edges.vertices.len();
        edges.vertices.push(Point3::new(x, y, -half));
        edges.vertices.push(Point3::new(far - x, far - y, half));
        edges.edges.push((n, n + 1));
    }
    let mut set = from_edge_list(&edges)?;
    set.lateral = (size, size);
    Ok(set)
}

/// Wireframe tetrahedron on a square lateral extent.
///
/// The base triangle lies in the deepest plane with two vertices at the
/// corners `(0, 0)` and `(extent-1, 0)` and the third at the middle of the far
/// side `(extent/2, extent-1)`; the apex sits at `(extent/2, extent/2)` in the
/// shallowest plane. Optional markers fill the two remaining corners of the
/// deepest plane. With cell y pointing up, the edge from `(0, 0)` to the apex
/// is the lower-left edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tetrahedron {
    pub extent: u32,
    pub base_plane: i32,
    pub apex_plane: i32,
    pub corner_markers: bool,
}

impl Default for Tetrahedron {
    fn default() -> Self {
        Self {
            extent: 40,
            base_plane: -5,
            apex_plane: 4,
            corner_markers: true,
        }
    }
}

impl Tetrahedron {
    pub fn vertices(&self) -> [Point3; 4] {
        let far = self.extent as i32 - 1;
        let mid = self.extent as i32 / 2;
        [
            Point3::new(0, 0, self.base_plane),
            Point3::new(far, 0, self.base_plane),
            Point3::new(mid, far, self.base_plane),
            Point3::new(mid, mid, self.apex_plane),
        ]
    }

    pub fn markers(&self) -> Vec<Point3> {
        let far = self.extent as i32 - 1;
        if self.corner_markers {
            vec![
                Point3::new(0, far, self.base_plane),
                Point3::new(far, far, self.base_plane),
            ]
        } else {
            Vec::new()
        }
    }

    /// Endpoints of the edge running from the origin corner to the apex.
    pub fn corner_edge(&self) -> (Point3, Point3) {
        let v = self.vertices();
        (v[0], v[3])
    }

    pub fn edge_list(&self) -> EdgeList {
        let mut vertices = self.vertices().to_vec();
        vertices.extend(self.markers());
        let edges = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .collect();
        EdgeList { vertices, edges }
    }

    pub fn voxels(&self, cfg: &DisplayConfig) -> Result<VoxelSet> {
        if self.extent < 2 {
            return Err(Error::config("tetrahedron extent must be at least 2 cells"));
        }
        for k in [self.base_plane, self.apex_plane] {
            PlaneIndex::new(k, cfg)?;
        }
        let mut set = from_edge_list(&self.edge_list())?;
        set.lateral = (self.extent, self.extent);
        Ok(set)
    }
}

pub fn tetrahedron_edges(cfg: &DisplayConfig) -> Result<VoxelSet> {
    Tetrahedron::default().voxels(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn walk(a: (i32, i32, i32), b: (i32, i32, i32)) -> Vec<(i32, i32, i32)> {
        rasterize_segment_3d(Point3::new(a.0, a.1, a.2), Point3::new(b.0, b.1, b.2))
            .unwrap()
            .points
            .into_iter()
            .map(|p| (p.x, p.y, p.k))
            .collect()
    }

    /// Closed form: coordinate = a + sign * round_half_up(|d| t / D).
    fn closed_form(a: Point3, b: Point3) -> Vec<Point3> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let d = [b.x - a.x, b.y - a.y, b.k - a.k];
        let steps = d.iter().map(|v| v.abs()).max().unwrap();
        (0..=steps)
            .map(|t| {
                let at = |i: usize, base: i32| {
                    if steps == 0 {
                        return base;
                    }
                    let n = 2 * d[i].abs() as i64 * t as i64 + steps as i64;
                    base + d[i].signum() * (n / (2 * steps as i64)) as i32
                };
                Point3::new(at(0, a.x), at(1, a.y), at(2, a.k))
            })
            .collect()
    }

    #[test]
    fn segment_examples() {
        assert_eq!(walk((0, 0, 1), (0, 0, 1)), vec![(0, 0, 1)]);
        assert_eq!(walk((0, 0, 1), (3, 0, 1)), vec![(0, 0, 1), (1, 0, 1), (2, 0, 1), (3, 0, 1)]);
        let diag = walk((0, 0, -4), (7, 7, 4));
        assert_eq!(diag.len(), 8);
        let planes: Vec<i32> = diag.iter().map(|p| p.2).collect();
        assert_eq!(planes, vec![-4, -3, -2, -1, 1, 2, 3, 4]);
        let laterals: Vec<(i32, i32)> = diag.iter().map(|p| (p.0, p.1)).collect();
        assert_eq!(laterals, (0..8).map(|i| (i, i)).collect::<Vec<_>>());
        let raw = rasterize_segment_3d(Point3::new(0, 0, -4), Point3::new(7, 7, 4)).unwrap();
        assert_eq!(raw.skipped_screen_plane, 1);
    }

    #[test]
    fn segment_rejects_plane_zero() {
        assert!(rasterize_segment_3d(Point3::new(0, 0, 0), Point3::new(1, 1, 1)).is_err());
    }

    #[test]
    fn cube_examples() {
        let cfg = DisplayConfig::default();
        let cube = cube_diagonals(8, &cfg).unwrap();
        assert_eq!(cube.len(), 32);
        assert_eq!(cube.lateral(), (8, 8));
        for k in cfg.plane_ladder().into_iter().filter(|k| k.abs() <= 4) {
            assert_eq!(cube.in_plane(k).count(), 4, "plane {k}");
        }
        let corners = cube_diagonals(2, &cfg).unwrap();
        assert_eq!(corners.len(), 8);
        for v in &corners {
            assert!(v.cx <= 1 && v.cy <= 1 && v.k.abs() == 1);
        }
        assert!(cube_diagonals(7, &cfg).is_err());
        assert!(cube_diagonals(14, &cfg).is_err());
    }

    #[test]
    fn cube_symmetries() {
        let cube = cube_diagonals(8, &DisplayConfig::default()).unwrap();
        let map = |f: &dyn Fn(&Voxel) -> Voxel| -> BTreeSet<Voxel> { cube.iter().map(f).collect() };
        let original: BTreeSet<Voxel> = cube.iter().copied().collect();
        assert_eq!(map(&|v| Voxel::new(v.cy, v.cx, v.k)), original);
        assert_eq!(map(&|v| Voxel::new(7 - v.cx, v.cy, v.k)), original);
        assert_eq!(map(&|v| Voxel::new(v.cx, 7 - v.cy, v.k)), original);
        assert_eq!(map(&|v| Voxel::new(v.cx, v.cy, v.k.mirrored())), original);
    }

    #[test]
    fn tetrahedron_examples() {
        let cfg = DisplayConfig::default();
        let tet = tetrahedron_edges(&cfg).unwrap();
        let xs: Vec<u32> = tet.iter().map(|v| v.cx).collect();
        let ys: Vec<u32> = tet.iter().map(|v| v.cy).collect();
        assert_eq!((*xs.iter().min().unwrap(), *xs.iter().max().unwrap()), (0, 39));
        assert_eq!((*ys.iter().min().unwrap(), *ys.iter().max().unwrap()), (0, 39));
        let planes: Vec<i32> = tet.planes().into_iter().map(PlaneIndex::get).collect();
        assert_eq!(planes, vec![-5, -4, -3, -2, -1, 1, 2, 3, 4]);
        let minus5 = PlaneIndex::nonzero(-5).unwrap();
        assert!(tet.contains(&Voxel::new(0, 39, minus5)));
        assert!(tet.contains(&Voxel::new(39, 39, minus5)));
        assert_eq!(40 * 40 * planes.len(), 14_400);

        let shallow = DisplayConfig::new(60, 256, 4).unwrap();
        assert!(tetrahedron_edges(&shallow).is_err());
    }

    #[test]
    fn edge_list_examples() {
        let single: EdgeList = "v 2 3 -1".parse().unwrap();
        let set = from_edge_list(&single).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.contains(&Voxel::new(2, 3, PlaneIndex::nonzero(-1).unwrap())));

        let line: EdgeList = "# a line\nv 0 0 1\nv 3 0 1\ne 0 1\n".parse().unwrap();
        assert_eq!(from_edge_list(&line).unwrap().len(), 4);

        let vee: EdgeList = "v 0 0 1\nv 3 0 1 # shared\nv 3 3 1\ne 0 1\ne 1 2".parse().unwrap();
        assert_eq!(from_edge_list(&vee).unwrap().len(), 7);
    }

    #[test]
    fn edge_list_format_errors() {
        for (text, line) in [
            ("v 0 0 1\ne 0 5", "line 2"),
            ("v 0 0 1\nv 1 1 1\ne 1 1", "line 3"),
            ("v 0 0 0", "line 1"),
            ("v 0 x 1", "line 1"),
            ("q 1 2", "line 1"),
            ("\n\nv 1 2", "line 3"),
        ] {
            match text.parse::<EdgeList>() {
                Err(Error::Format { location, .. }) => assert_eq!(location, line, "{text:?}"),
                other => panic!("{text:?} parsed as {other:?}"),
            }
        }
        let bad = EdgeList {
            vertices: vec![Point3::new(0, 0, 1)],
            edges: vec![(0, 3)],
        };
        assert!(from_edge_list(&bad).is_err());
    }

    fn point() -> impl Strategy<Value = Point3> {
        (-20i32..20, -20i32..20, prop_oneof![-9i32..=-1, 1i32..=9])
            .prop_map(|(x, y, k)| Point3::new(x, y, k))
    }

    proptest! {
        #[test]
        fn walk_matches_closed_form(a in point(), b in point()) {
            let full = closed_form(a, b);
            let walked = rasterize_segment_3d(a, b).unwrap();
            let kept: Vec<Point3> = full.iter().copied().filter(|p| p.k != 0).collect();
            prop_assert_eq!(&walked.points, &kept);
            prop_assert_eq!(walked.skipped_screen_plane, full.len() - kept.len());
            let d = [b.x - a.x, b.y - a.y, b.k - a.k];
            prop_assert_eq!(full.len() as i32, d.iter().map(|v| v.abs()).max().unwrap() + 1);
            for pair in full.windows(2) {
                for (u, v) in pair[0].coords().iter().zip(pair[1].coords()) {
                    prop_assert!((u - v).abs() <= 1);
                }
            }
        }

        #[test]
        fn walk_is_symmetric_and_keeps_endpoints(a in point(), b in point()) {
            let ab: BTreeSet<Point3> = rasterize_segment_3d(a, b).unwrap().points.into_iter().collect();
            let ba: BTreeSet<Point3> = rasterize_segment_3d(b, a).unwrap().points.into_iter().collect();
            prop_assert!(ab.contains(&a) && ab.contains(&b));
            prop_assert_eq!(ab, ba);
        }
    }
}
