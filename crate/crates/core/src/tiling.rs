//! Packing and tiling checks for translates of the half-open unit cube `[0, 1)^n`.
//!
//! Every verdict is a windowed one: a point set enumerated on a box `B` is
//! judged on the interior-safe region, `B` shrunk by one cube side. Coverage is
//! decided by an exact recursive interval sweep, not by sampling.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{frac, lex_cmp, BoxRegion, IndexedParam, Point, StructuredSet, TilingAxis};
use crate::stft::{is_integer, DEFAULT_INT_TOL};

/// Upper bound on reported witnesses.
pub const MAX_WITNESSES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageVerdict {
    PackingAndTiling,
    /// No overlaps; coverage was examined and found incomplete.
    PackingOnly,
    /// No overlaps; coverage was not examined.
    Packing,
    NotPacking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverageWitness {
    /// Two cubes overlapping in a set of positive measure; `at` lies in the overlap.
    Overlap {
        p: Point,
        q: Point,
        at: Point,
    },
    Uncovered {
        point: Point,
    },
}

impl CoverageWitness {
    fn location(&self) -> &[f64] {
        match self {
            CoverageWitness::Overlap { at, .. } => at,
            CoverageWitness::Uncovered { point } => point,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub verdict: CoverageVerdict,
    pub witnesses: Vec<CoverageWitness>,
    /// Smallest distance of a witness location from the box boundary.
    pub margin: Option<f64>,
    /// Region the verdict applies to.
    pub region: BoxRegion,
}

impl CoverageReport {
    pub fn is_tiling(&self) -> bool {
        self.verdict == CoverageVerdict::PackingAndTiling
    }

    pub fn is_packing(&self) -> bool {
        self.verdict != CoverageVerdict::NotPacking
    }
}

fn margin_of(witnesses: &[CoverageWitness], bx: &BoxRegion) -> Option<f64> {
    witnesses.iter().map(|w| bx.boundary_distance(w.location())).min_by(f64::total_cmp)
}

fn overlap_center(p: &[f64], q: &[f64]) -> Point {
    p.iter().zip(q).map(|(a, b)| 0.5 * (a.max(*b) + a.min(*b) + 1.0)).collect()
}

fn check_points(points: &[Point], dim: usize) -> Result<()> {
    for p in points {
        if p.len() != dim {
            return Err(Error::domain(format!("point {p:?} does not have dimension {dim}")));
        }
    }
    Ok(())
}

/// Pairs whose open cubes intersect (max-norm distance `< 1 - eps`).
pub fn check_packing(points: &[Point], bx: &BoxRegion) -> Result<CoverageReport> {
    check_packing_with(points, bx, DEFAULT_INT_TOL)
}

pub fn check_packing_with(points: &[Point], bx: &BoxRegion, eps: f64) -> Result<CoverageReport> {
    check_points(points, bx.dim())?;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| lex_cmp(a, b));
    sorted.dedup();
    let pairs = overlapping_pairs(&sorted, eps);
    let witnesses: Vec<CoverageWitness> = pairs
        .into_iter()
        .take(MAX_WITNESSES)
        .map(|(i, j)| CoverageWitness::Overlap {
            p: sorted[i].clone(),
            q: sorted[j].clone(),
            at: overlap_center(&sorted[i], &sorted[j]),
        })
        .collect();
    let verdict = if witnesses.is_empty() { CoverageVerdict::Packing } else { CoverageVerdict::NotPacking };
    Ok(CoverageReport { verdict, margin: margin_of(&witnesses, bx), witnesses, region: bx.clone() })
}

/// Index pairs `(i, j)`, `i < j`, at max-norm distance `< 1 - eps`, in lexicographic order.
pub(crate) fn overlapping_pairs(points: &[Point], eps: f64) -> Vec<(usize, usize)> {
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        cells.entry(p.iter().map(|x| x.floor() as i64).collect()).or_default().push(i);
    }
    let dim = points.first().map_or(0, |p| p.len());
    let mut pairs = BTreeSet::new();
    let mut neighbor = vec![0i64; dim];
    for (i, p) in points.iter().enumerate() {
        let base: Vec<i64> = p.iter().map(|x| x.floor() as i64).collect();
        for code in 0..3usize.pow(dim as u32) {
            let mut c = code;
            for (k, slot) in neighbor.iter_mut().enumerate() {
                *slot = base[k] + (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(idx) = cells.get(&neighbor) {
                for &j in idx {
                    if j > i {
                        let dist = p.iter().zip(&points[j]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                        if dist < 1.0 - eps {
                            pairs.insert((i, j));
                        }
                    }
                }
            }
        }
    }
    pairs.into_iter().collect()
}

#[derive(Default)]
struct SweepOutcome {
    overlaps: Vec<(usize, usize, Point)>,
    gaps: Vec<Point>,
}

impl SweepOutcome {
    fn full(&self) -> bool {
        self.overlaps.len() + self.gaps.len() >= MAX_WITNESSES
    }
}

struct Sweep<'a> {
    points: &'a [Point],
    eps: f64,
}

impl Sweep<'_> {
    /// Merged breakpoints of the active cubes along `dim`, within `[lo, hi]`.
    fn breakpoints(&self, active: &[usize], dim: usize, lo: f64, hi: f64) -> Vec<f64> {
        let mut raw = vec![lo, hi];
        for &i in active {
            for x in [self.points[i][dim], self.points[i][dim] + 1.0] {
                if x > lo + self.eps && x < hi - self.eps {
                    raw.push(x);
                }
            }
        }
        raw.sort_by(f64::total_cmp);
        let mut out: Vec<f64> = Vec::with_capacity(raw.len());
        for x in raw {
            match out.last() {
                Some(&l) if x - l <= self.eps => {}
                _ => out.push(x),
            }
        }
        // keep hi as the final breakpoint
        if let Some(last) = out.last_mut() {
            *last = hi;
        }
        out
    }

    fn locate(&self, bps: &[f64], x: f64) -> usize {
        if x <= bps[0] + self.eps {
            return 0;
        }
        let last = bps.len() - 1;
        if x >= bps[last] - self.eps {
            return last;
        }
        let i = bps.partition_point(|&b| b < x);
        // nearest of bps[i-1], bps[i]
        if i > 0 && (x - bps[i - 1]).abs() <= (bps[i] - x).abs() {
            i - 1
        } else {
            i
        }
    }

    /// Splits `active` along `dim` into one list per elementary interval.
    fn split(&self, active: &[usize], dim: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<Vec<usize>>) {
        let bps = self.breakpoints(active, dim, lo, hi);
        let mut slabs = vec![Vec::new(); bps.len() - 1];
        for &i in active {
            let a = self.locate(&bps, self.points[i][dim]);
            let b = self.locate(&bps, self.points[i][dim] + 1.0);
            for slab in slabs.iter_mut().take(b).skip(a) {
                slab.push(i);
            }
        }
        (bps, slabs)
    }

    fn cheapest_dim(&self, active: &[usize], remaining: &[usize], cell_lo: &[f64], cell_hi: &[f64]) -> usize {
        *remaining
            .iter()
            .min_by_key(|&&d| self.breakpoints(active, d, cell_lo[d], cell_hi[d]).len())
            .expect("remaining dimensions")
    }

    fn run(
        &self,
        active: &[usize],
        remaining: &mut Vec<usize>,
        cell_lo: &mut [f64],
        cell_hi: &mut [f64],
        out: &mut SweepOutcome,
    ) {
        if out.full() {
            return;
        }
        if active.is_empty() {
            out.gaps.push(cell_lo.iter().zip(cell_hi.iter()).map(|(l, h)| 0.5 * (l + h)).collect());
            return;
        }
        if remaining.is_empty() {
            if active.len() > 1 {
                let at = cell_lo.iter().zip(cell_hi.iter()).map(|(l, h)| 0.5 * (l + h)).collect();
                out.overlaps.push((active[0], active[1], at));
            }
            return;
        }
        let dim = self.cheapest_dim(active, remaining, cell_lo, cell_hi);
        let pos = remaining.iter().position(|&d| d == dim).expect("dim present");
        remaining.remove(pos);
        let (saved_lo, saved_hi) = (cell_lo[dim], cell_hi[dim]);
        let (bps, slabs) = self.split(active, dim, saved_lo, saved_hi);
        for (k, slab) in slabs.iter().enumerate() {
            cell_lo[dim] = bps[k];
            cell_hi[dim] = bps[k + 1];
            self.run(slab, remaining, cell_lo, cell_hi, out);
            if out.full() {
                break;
            }
        }
        cell_lo[dim] = saved_lo;
        cell_hi[dim] = saved_hi;
        remaining.insert(pos, dim);
    }
}

/// Exact windowed tiling check.
///
/// `points` must be the set enumerated on `bx`; the verdict concerns the
/// interior-safe region `bx` shrunk by one.
pub fn check_tiling(points: &[Point], bx: &BoxRegion) -> Result<CoverageReport> {
    check_tiling_with(points, bx, DEFAULT_INT_TOL)
}

pub fn check_tiling_with(points: &[Point], bx: &BoxRegion, eps: f64) -> Result<CoverageReport> {
    check_points(points, bx.dim())?;
    let region = bx
        .shrunk(1.0)
        .ok_or_else(|| Error::domain("box too small: interior-safe region (box shrunk by 1) is empty"))?;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| lex_cmp(a, b));
    sorted.dedup();
    let n = bx.dim();
    // cubes meeting the region
    let active: Vec<usize> = (0..sorted.len())
        .filter(|&i| (0..n).all(|d| sorted[i][d] + 1.0 > region.lo()[d] + eps && sorted[i][d] < region.hi()[d] - eps))
        .collect();
    let sweep = Sweep { points: &sorted, eps };

    // Split along the cheapest coordinate first and sweep the slabs in parallel.
    let all_dims: Vec<usize> = (0..n).collect();
    let dim = sweep.cheapest_dim(&active, &all_dims, region.lo(), region.hi());
    let (bps, slabs) = sweep.split(&active, dim, region.lo()[dim], region.hi()[dim]);
    let outcomes: Vec<SweepOutcome> = slabs
        .par_iter()
        .enumerate()
        .map(|(k, slab)| {
            let mut cell_lo = region.lo().to_vec();
            let mut cell_hi = region.hi().to_vec();
            cell_lo[dim] = bps[k];
            cell_hi[dim] = bps[k + 1];
            let mut remaining: Vec<usize> = (0..n).filter(|&d| d != dim).collect();
            let mut out = SweepOutcome::default();
            sweep.run(slab, &mut remaining, &mut cell_lo, &mut cell_hi, &mut out);
            out
        })
        .collect();

    let mut seen = BTreeSet::new();
    let mut overlaps = Vec::new();
    let mut gaps = Vec::new();
    for o in outcomes {
        for (i, j, at) in o.overlaps {
            if seen.insert((i, j)) {
                overlaps.push(CoverageWitness::Overlap { p: sorted[i].clone(), q: sorted[j].clone(), at });
            }
        }
        gaps.extend(o.gaps.into_iter().map(|point| CoverageWitness::Uncovered { point }));
    }
    let verdict = if !overlaps.is_empty() {
        CoverageVerdict::NotPacking
    } else if !gaps.is_empty() {
        CoverageVerdict::PackingOnly
    } else {
        CoverageVerdict::PackingAndTiling
    };
    let mut witnesses = overlaps;
    witnesses.extend(gaps);
    witnesses.truncate(MAX_WITNESSES);
    Ok(CoverageReport { verdict, margin: margin_of(&witnesses, bx), witnesses, region })
}

/// Enumerates `set` on `bx` and checks tiling on its interior-safe region.
pub fn check_set_tiling(set: &StructuredSet, bx: &BoxRegion) -> Result<CoverageReport> {
    let pts = set.enumerate(bx)?;
    check_tiling(&pts, bx)
}

/// A function with bounded support, convolved against point masses.
pub trait Kernel {
    fn dim(&self) -> usize;
    /// Half-open box containing the support.
    fn support(&self) -> (Vec<f64>, Vec<f64>);
    fn eval(&self, x: &[f64]) -> f64;
}

/// `χ_[0,1)^n`.
#[derive(Debug, Clone, Copy)]
pub struct UnitCubeIndicator {
    pub dim: usize,
}

impl Kernel for UnitCubeIndicator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0; self.dim], vec![1.0; self.dim])
    }

    fn eval(&self, x: &[f64]) -> f64 {
        if x.iter().all(|v| (0.0..1.0).contains(v)) {
            1.0
        } else {
            0.0
        }
    }
}

/// Values of a function on the cell centers of a regular grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub resolution: f64,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl Grid {
    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (i, s)| acc * s + i)
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for (slot, s) in idx.iter_mut().zip(&self.shape).rev() {
            *slot = flat % s;
            flat /= s;
        }
        idx
    }

    pub fn center(&self, idx: &[usize]) -> Point {
        idx.iter().zip(&self.lo).map(|(&i, l)| l + (i as f64 + 0.5) * self.resolution).collect()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }

    /// Cells whose center lies in `region` and whose value differs from `value` by more than `tol`.
    pub fn mismatches(&self, region: &BoxRegion, value: f64, tol: f64) -> Vec<(Point, f64)> {
        (0..self.values.len())
            .filter_map(|flat| {
                let c = self.center(&self.unflatten(flat));
                let v = self.values[flat];
                (region.contains(&c) && (v - value).abs() > tol).then_some((c, v))
            })
            .collect()
    }

    /// `x,y,count` rows for a two-dimensional grid.
    pub fn to_csv(&self) -> Result<String> {
        if self.shape.len() != 2 {
            return Err(Error::domain("CSV coverage dump needs a two-dimensional grid"));
        }
        let mut s = String::from("x,y,count\n");
        for i in 0..self.shape[0] {
            for j in 0..self.shape[1] {
                let c = self.center(&[i, j]);
                s.push_str(&format!("{},{},{}\n", c[0], c[1], self.get(&[i, j])));
            }
        }
        Ok(s)
    }
}

/// `Σ_p f(x - p)` at a single location.
pub fn convolution_at(kernel: &dyn Kernel, points: &[Point], x: &[f64]) -> f64 {
    points
        .iter()
        .map(|p| {
            let shifted: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
            kernel.eval(&shifted)
        })
        .sum()
}

/// `f ∗ Σ_p δ_p` sampled at the cell centers of a grid of side `resolution` covering `bx`.
pub fn convolution_oracle(kernel: &dyn Kernel, points: &[Point], bx: &BoxRegion, resolution: f64) -> Result<Grid> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::domain(format!("resolution must be positive, got {resolution}")));
    }
    if kernel.dim() != bx.dim() {
        return Err(Error::domain("kernel and box dimensions differ"));
    }
    check_points(points, bx.dim())?;
    let mut shape = Vec::with_capacity(bx.dim());
    for (l, h) in bx.lo().iter().zip(bx.hi()) {
        let cells = (h - l) / resolution;
        if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
            return Err(Error::domain(format!("resolution {resolution} does not divide box side {}", h - l)));
        }
        shape.push(cells.round() as usize);
    }
    let total: usize = shape.iter().product();
    let mut grid = Grid { lo: bx.lo().to_vec(), resolution, shape, values: vec![0.0; total] };
    let (slo, shi) = kernel.support();
    let dim = bx.dim();
    for p in points {
        // index range of cell centers inside p + support
        let mut ranges = Vec::with_capacity(dim);
        for d in 0..dim {
            let first = ((p[d] + slo[d] - grid.lo[d]) / resolution - 0.5).ceil().max(0.0) as usize;
            let last = ((p[d] + shi[d] - grid.lo[d]) / resolution - 0.5).floor();
            if last < 0.0 {
                ranges.clear();
                break;
            }
            let last = (last as usize).min(grid.shape[d].saturating_sub(1));
            if first > last {
                ranges.clear();
                break;
            }
            ranges.push((first, last));
        }
        if ranges.len() != dim {
            continue;
        }
        let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        loop {
            let c = grid.center(&idx);
            let shifted: Vec<f64> = c.iter().zip(p).map(|(a, b)| a - b).collect();
            let flat = grid.flat_index(&idx);
            grid.values[flat] += kernel.eval(&shifted);
            // odometer increment
            let mut d = dim;
            loop {
                if d == 0 {
                    break;
                }
                d -= 1;
                if idx[d] < ranges[d].1 {
                    idx[d] += 1;
                    for (e, slot) in idx.iter_mut().enumerate().skip(d + 1) {
                        *slot = ranges[e].0;
                    }
                    break;
                }
                if d == 0 {
                    d = usize::MAX;
                    break;
                }
            }
            if d == usize::MAX {
                break;
            }
        }
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecognizedAxis {
    Rows,
    Columns,
    /// Both forms fit; all offsets vanish.
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingStructure {
    pub axis: RecognizedAxis,
    /// The tile covering the reference point; translated to the origin for `offsets`.
    pub anchor: Point,
    /// Strip offsets `a_k` relative to the anchor, so `a_0 = 0`.
    pub offsets: IndexedParam,
    /// The same tiling in absolute coordinates.
    pub set: StructuredSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Recognition {
    Recognized(TilingStructure),
    /// Neither form fits; the two points differ by a non-integer in both coordinates.
    Unrecognized {
        p: Point,
        q: Point,
    },
}

/// Recovers the rows/columns description of a windowed tiling of `R²` by unit squares.
pub fn recognize_2d_cube_tiling(points: &[Point], bx: &BoxRegion) -> Result<Recognition> {
    recognize_2d_cube_tiling_with(points, bx, DEFAULT_INT_TOL)
}

pub fn recognize_2d_cube_tiling_with(points: &[Point], bx: &BoxRegion, eps: f64) -> Result<Recognition> {
    if bx.dim() != 2 {
        return Err(Error::domain("cube tiling recognition works in R²"));
    }
    let report = check_tiling_with(points, bx, eps)?;
    if !report.is_tiling() {
        return Err(Error::Precondition(format!(
            "points do not tile the window: {:?} with {} witnesses",
            report.verdict,
            report.witnesses.len()
        )));
    }
    Ok(recognize_unchecked(points, &report.region, eps))
}

/// Recognition without the tiling precondition check; `region` is the interior-safe region.
pub(crate) fn recognize_unchecked(points: &[Point], region: &BoxRegion, eps: f64) -> Recognition {
    let reference: Point = if region.contains(&[0.0, 0.0]) { vec![0.0, 0.0] } else { region.lo().to_vec() };
    let anchor = points
        .iter()
        .filter(|p| p.iter().zip(&reference).all(|(a, r)| *a <= r + eps && r - a < 1.0 - eps))
        .min_by(|a, b| lex_cmp(a, b))
        .cloned()
        .unwrap_or_else(|| points.iter().min_by(|a, b| lex_cmp(a, b)).cloned().unwrap_or(reference.clone()));
    let rel: Vec<[f64; 2]> = points.iter().map(|p| [p[0] - anchor[0], p[1] - anchor[1]]).collect();

    let fits = |strip: usize| -> std::result::Result<IndexedParam, (usize, usize)> {
        let off = 1 - strip;
        let mut offsets = IndexedParam::default();
        let mut first_in_strip: HashMap<i64, usize> = HashMap::new();
        for (i, q) in rel.iter().enumerate() {
            if !is_integer(q[strip], eps) {
                return Err((i, i));
            }
            let k = q[strip].round() as i64;
            let a = frac(q[off], eps);
            match first_in_strip.get(&k) {
                None => {
                    first_in_strip.insert(k, i);
                    if a != 0.0 {
                        offsets.set(vec![k], a);
                    }
                }
                Some(&j) => {
                    if !is_integer(q[off] - rel[j][off], eps) {
                        return Err((j, i));
                    }
                }
            }
        }
        Ok(offsets)
    };

    let rows = fits(1);
    let cols = fits(0);
    let abs_strip = |strip: usize, offsets: &IndexedParam| -> StructuredSet {
        let off = 1 - strip;
        let shift = frac(anchor[strip], eps);
        let base = (anchor[strip] - shift).round() as i64;
        let mut table = IndexedParam::default();
        for (k, a) in offsets.table.iter() {
            let v = frac(anchor[off] + a, eps);
            if v != 0.0 {
                table.set(vec![k[0] + base], v);
            }
        }
        // strips without an entry carry the anchor's offset
        let anchor_off = frac(anchor[off], eps);
        let mut full = IndexedParam::constant(anchor_off);
        for (k, v) in table.table {
            full.set(k, v);
        }
        for k in offsets.table.keys() {
            full.table.entry(vec![k[0] + base]).or_insert(0.0);
        }
        let axis = if strip == 1 { TilingAxis::Rows } else { TilingAxis::Columns };
        StructuredSet::CubeTiling2D { axis, strip_shift: shift, offsets: full }
    };
    match (rows, cols) {
        (Ok(_), Ok(_)) => Recognition::Recognized(TilingStructure {
            axis: RecognizedAxis::Lattice,
            set: StructuredSet::Lattice { dim: 2, offset: vec![frac(anchor[0], eps), frac(anchor[1], eps)] },
            anchor,
            offsets: IndexedParam::default(),
        }),
        (Ok(offsets), Err(_)) => Recognition::Recognized(TilingStructure {
            axis: RecognizedAxis::Rows,
            set: abs_strip(1, &offsets),
            anchor,
            offsets,
        }),
        (Err(_), Ok(offsets)) => Recognition::Recognized(TilingStructure {
            axis: RecognizedAxis::Columns,
            set: abs_strip(0, &offsets),
            anchor,
            offsets,
        }),
        (Err(_), Err(_)) => {
            // a point off the integer rows and a point off the integer columns
            let off_row = rel.iter().position(|q| !is_integer(q[1], eps)).unwrap_or(0);
            let off_col = rel.iter().position(|q| !is_integer(q[0], eps)).unwrap_or(0);
            let pick = if off_row != off_col {
                (off_row, off_col)
            } else {
                // one point is off both; compare it with the anchor
                (off_row, points.iter().position(|p| *p == anchor).unwrap_or(0))
            };
            Recognition::Unrecognized { p: points[pick.0].clone(), q: points[pick.1].clone() }
        }
    }
}

/// `#(Λ ∩ [-T, T)^n) / (2T)^n`.
pub fn estimate_density(points: &[Point], half_width: f64) -> Result<f64> {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::domain(format!("density window half-width must be positive, got {half_width}")));
    }
    let Some(dim) = points.first().map(|p| p.len()) else {
        return Ok(0.0);
    };
    let bx = BoxRegion::centered(dim, half_width)?;
    let count = points.iter().filter(|p| bx.contains(p)).count();
    Ok(count as f64 / bx.volume())
}
