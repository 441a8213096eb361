//! Directional chain-code features.
//!
//! A glyph is normalized to 30x30, every closed boundary (outer boundaries of
//! each 8-connected ink component and the boundaries of their holes) is traced
//! with Moore neighborhood tracing, and each tracing step is binned by
//! direction into the block of the zone grid holding the step's start pixel.
//!
//! Direction codes use a y-up convention on a row-down raster:
//!
//! ```text
//!   3 2 1
//!   4 P 0
//!   5 6 7
//! ```

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imaging::{make_zone_grid, normalize_glyph, BinaryImage, ZoneGrid};

/// Side length of the normalized glyph fed to the chain-code extractor.
pub const DCC_SIZE: usize = 30;

/// One of the eight Freeman directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction(u8);

impl Direction {
    /// `(drow, dcol)` for each code.
    const STEPS: [(isize, isize); 8] = [
        (0, 1),
        (-1, 1),
        (-1, 0),
        (-1, -1),
        (0, -1),
        (1, -1),
        (1, 0),
        (1, 1),
    ];

    pub fn new(code: u8) -> Option<Self> {
        (code < 8).then_some(Self(code))
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn step(self) -> (isize, isize) {
        Self::STEPS[self.0 as usize]
    }

    pub fn angle_degrees(self) -> i32 {
        let a = self.0 as i32 * 45;
        if a > 180 {
            a - 360
        } else {
            a
        }
    }

    pub fn from_step(drow: isize, dcol: isize) -> Option<Self> {
        Self::STEPS
            .iter()
            .position(|&s| s == (drow, dcol))
            .map(|i| Self(i as u8))
    }
}

/// Ink pixels with at least one background 4-neighbor, in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContourPointSet {
    points: Vec<(usize, usize)>,
}

impl ContourPointSet {
    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.points.binary_search(&(row, col)).is_ok()
    }
}

/// A closed boundary: start pixel plus the Freeman code of each move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCode {
    pub start: (usize, usize),
    pub codes: Vec<Direction>,
}

impl ChainCode {
    /// Pixels visited by each step's start, in order. The walk ends back on `start`.
    pub fn step_origins(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let mut pos = (self.start.0 as isize, self.start.1 as isize);
        self.codes.iter().map(move |d| {
            let here = (pos.0 as usize, pos.1 as usize);
            let (dr, dc) = d.step();
            pos = (pos.0 + dr, pos.1 + dc);
            here
        })
    }

    pub fn code_string(&self) -> String {
        self.codes.iter().map(|d| char::from(b'0' + d.code())).collect()
    }
}

pub fn find_contour_points(img: &BinaryImage) -> ContourPointSet {
    let mut points = Vec::new();
    for r in 0..img.height() {
        for c in 0..img.width() {
            if !img.is_ink(r, c) {
                continue;
            }
            let (ri, ci) = (r as isize, c as isize);
            let touches_background = [(-1, 0), (1, 0), (0, -1), (0, 1)]
                .iter()
                .any(|&(dr, dc)| !img.is_ink_at(ri + dr, ci + dc));
            if touches_background {
                points.push((r, c));
            }
        }
    }
    ContourPointSet { points }
}

/// Moore neighborhood in clockwise screen order, starting west.
const RING: [(isize, isize); 8] = [
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
];

/// Traces every closed boundary of `img`.
///
/// Outer boundaries come first, one per 8-connected ink component, each
/// starting at the component's topmost-leftmost pixel and running clockwise.
/// Hole boundaries (4-connected background regions not touching the image
/// border) follow, starting at the ink pixel left of the hole's first pixel
/// and running counter-clockwise. `contour` must come from
/// [`find_contour_points`] on the same image; every start pixel is one of its
/// points.
pub fn trace_contours(img: &BinaryImage, contour: &ContourPointSet) -> Vec<ChainCode> {
    let (w, h) = (img.width(), img.height());
    let mut traces = Vec::new();

    // Each component's first contour point in row-major order is its
    // topmost-leftmost pixel.
    let mut component = vec![usize::MAX; w * h];
    let mut next_label = 0;
    for &(r, c) in contour.points() {
        if component[r * w + c] != usize::MAX {
            continue;
        }
        flood(img, &mut component, (r, c), next_label, true);
        next_label += 1;
        traces.push(moore_trace(img, (r, c), (r as isize, c as isize - 1)));
    }

    let mut region = vec![usize::MAX; w * h];
    let mut next_region = 0;
    for r in 0..h {
        for c in 0..w {
            if img.is_ink(r, c) || region[r * w + c] != usize::MAX {
                continue;
            }
            let touches_border = flood(img, &mut region, (r, c), next_region, false);
            next_region += 1;
            if !touches_border {
                debug_assert!(c > 0 && img.is_ink(r, c - 1));
                debug_assert!(contour.contains(r, c - 1));
                traces.push(moore_trace(img, (r, c - 1), (r as isize, c as isize)));
            }
        }
    }
    traces
}

/// Labels the 8-connected ink component (`ink = true`) or 4-connected
/// background region (`ink = false`) containing `seed`. Returns whether the
/// region touches the image border.
fn flood(
    img: &BinaryImage,
    labels: &mut [usize],
    seed: (usize, usize),
    label: usize,
    ink: bool,
) -> bool {
    let (w, h) = (img.width(), img.height());
    let neighbors: &[(isize, isize)] = if ink { &RING } else { &RING_4 };
    let mut touches_border = false;
    let mut queue = VecDeque::from([seed]);
    labels[seed.0 * w + seed.1] = label;
    while let Some((r, c)) = queue.pop_front() {
        if r == 0 || c == 0 || r + 1 == h || c + 1 == w {
            touches_border = true;
        }
        for &(dr, dc) in neighbors {
            let (nr, nc) = (r as isize + dr, c as isize + dc);
            if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                continue;
            }
            let (nr, nc) = (nr as usize, nc as usize);
            if img.is_ink(nr, nc) == ink && labels[nr * w + nc] == usize::MAX {
                labels[nr * w + nc] = label;
                queue.push_back((nr, nc));
            }
        }
    }
    touches_border
}

const RING_4: [(isize, isize); 4] = [(0, -1), (-1, 0), (0, 1), (1, 0)];

/// Moore neighborhood tracing from `start`, first entered from the background
/// neighbor `entry`.
///
/// Jacob's criterion (stop on re-entering `start` from `entry`) never fires
/// when the boundary later returns to `start` from another side, as on
/// one-pixel strokes. The loop therefore stops when the move about to leave
/// `start` equals the first move, which covers Jacob's case as well.
fn moore_trace(img: &BinaryImage, start: (usize, usize), entry: (isize, isize)) -> ChainCode {
    let start_i = (start.0 as isize, start.1 as isize);
    let mut pos = start_i;
    let mut back = entry;
    let mut codes = Vec::new();
    let mut first_move = None;
    // each (pixel, backtrack) state occurs at most once per loop
    let limit = 8 * img.ink_count() + 8;

    while codes.len() < limit {
        let Some(k) = next_move(img, pos, back) else {
            break;
        };
        if pos == start_i {
            match first_move {
                None => first_move = Some(k),
                Some(first) if first == k => break,
                Some(_) => {}
            }
        }
        let prev = RING[(k + 7) % 8];
        let step = RING[k];
        back = (pos.0 + prev.0, pos.1 + prev.1);
        pos = (pos.0 + step.0, pos.1 + step.1);
        codes.push(Direction::from_step(step.0, step.1).expect("unit step"));
    }
    debug_assert!(codes.len() < limit, "boundary trace did not close");
    ChainCode { start, codes }
}

/// Ring index of the first ink neighbor clockwise after the backtrack pixel.
fn next_move(img: &BinaryImage, pos: (isize, isize), back: (isize, isize)) -> Option<usize> {
    let from = RING
        .iter()
        .position(|&d| (pos.0 + d.0, pos.1 + d.1) == back)
        .expect("backtrack pixel is a Moore neighbor");
    (1..8).map(|i| (from + i) % 8).find(|&k| {
        let d = RING[k];
        img.is_ink_at(pos.0 + d.0, pos.1 + d.1)
    })
}

/// Block layout of the chain-code histogram.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DccGrid {
    /// 10x10 blocks of 3x3 pixels, 800 features.
    #[default]
    Fine,
    /// 3x3 blocks of 10x10 pixels, 72 features.
    Compact,
}

impl DccGrid {
    pub fn blocks(self) -> usize {
        match self {
            DccGrid::Fine => 10,
            DccGrid::Compact => 3,
        }
    }

    pub fn feature_len(self) -> usize {
        self.blocks() * self.blocks() * 8
    }

    pub fn zone_grid(self) -> ZoneGrid {
        make_zone_grid(DCC_SIZE, DCC_SIZE, self.blocks(), self.blocks())
            .expect("presets divide the normalized size")
    }

    pub fn from_blocks(blocks: usize) -> Option<Self> {
        match blocks {
            10 => Some(DccGrid::Fine),
            3 => Some(DccGrid::Compact),
            _ => None,
        }
    }
}

impl fmt::Display for DccGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{0}x{0}", self.blocks())
    }
}

impl FromStr for DccGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "10x10" | "default" | "fine" => Ok(DccGrid::Fine),
            "3x3" | "compact" => Ok(DccGrid::Compact),
            other => Err(Error::Config(format!(
                "dcc grid must be 10x10 or 3x3, got {other:?}"
            ))),
        }
    }
}

/// Per-block direction counts, flattened block-major then direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DccFeatureVector {
    pub grid: ZoneGrid,
    pub histogram: Vec<u32>,
}

impl DccFeatureVector {
    pub fn len(&self) -> usize {
        self.histogram.len()
    }

    pub fn is_empty(&self) -> bool {
        self.histogram.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.histogram.iter().map(|&v| v as u64).sum()
    }

    pub fn block(&self, zone_row: usize, zone_col: usize) -> &[u32] {
        let i = (zone_row * self.grid.cols + zone_col) * 8;
        &self.histogram[i..i + 8]
    }
}

pub fn extract_dcc(img: &BinaryImage, grid: &ZoneGrid) -> Result<DccFeatureVector> {
    if grid.image_width() != img.width() || grid.image_height() != img.height() {
        return Err(Error::GridMismatch {
            width: img.width(),
            height: img.height(),
            rows: grid.rows,
            cols: grid.cols,
        });
    }
    let mut histogram = vec![0u32; grid.zone_count() * 8];
    let contour = find_contour_points(img);
    for chain in trace_contours(img, &contour) {
        for ((r, c), dir) in chain.step_origins().zip(&chain.codes) {
            histogram[grid.zone_index(r, c) * 8 + dir.code() as usize] += 1;
        }
    }
    Ok(DccFeatureVector {
        grid: *grid,
        histogram,
    })
}

/// Chain-code pipeline on a binarized glyph: crop, resize to 30x30, histogram.
pub fn dcc_features(img: &BinaryImage, grid: DccGrid) -> Result<DccFeatureVector> {
    let glyph = normalize_glyph(img, DCC_SIZE)?;
    extract_dcc(&glyph, &grid.zone_grid())
}
