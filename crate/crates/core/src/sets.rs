//! Finite descriptions of (infinite) time-frequency sets and their windowed enumeration.
//!
//! A [`StructuredSet`] lives in `R^n`. When it is read as a time-frequency set,
//! `n = 2d` and a point is `(t_1..t_d, λ_1..λ_d)`. Tiling sets and spectra used
//! as building blocks are plain subsets of `R^d`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stft::DEFAULT_INT_TOL;

pub type Point = Vec<f64>;

/// Slack used when mapping a coordinate to its integer cell.
const KEY_SLACK: f64 = 1e-9;

/// Integer cell index of each coordinate.
pub fn cell_key(p: &[f64]) -> Vec<i64> {
    p.iter().map(|x| (x + KEY_SLACK).floor() as i64).collect()
}

/// Fractional part in `[0, 1)`, snapping values within `eps` of an integer to 0.
pub fn frac(x: f64, eps: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r < eps || 1.0 - r <= eps {
        0.0
    } else {
        r
    }
}

pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Axis-aligned half-open box `[lo_1, hi_1) × … × [lo_n, hi_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = BoxRegion { lo, hi };
        b.validate()?;
        Ok(b)
    }

    /// `[-radius, radius)^dim`.
    pub fn centered(dim: usize, radius: f64) -> Result<Self> {
        Self::new(vec![-radius; dim], vec![radius; dim])
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.is_empty() || self.lo.len() != self.hi.len() {
            return Err(Error::domain(format!(
                "box bounds must have equal positive length, got {} and {}",
                self.lo.len(),
                self.hi.len()
            )));
        }
        for (l, h) in self.lo.iter().zip(&self.hi) {
            if !l.is_finite() || !h.is_finite() || l >= h {
                return Err(Error::domain(format!("invalid box side [{l}, {h})")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().zip(&self.lo).zip(&self.hi).all(|((x, l), h)| l <= x && x < h)
    }

    pub fn expanded(&self, by: f64) -> Self {
        BoxRegion { lo: self.lo.iter().map(|v| v - by).collect(), hi: self.hi.iter().map(|v| v + by).collect() }
    }

    /// Shrinks every side by `by`; `None` if a side becomes empty.
    pub fn shrunk(&self, by: f64) -> Option<Self> {
        let b = self.expanded(-by);
        b.lo.iter().zip(&b.hi).all(|(l, h)| l < h).then_some(b)
    }

    pub fn translated(&self, shift: &[f64]) -> Self {
        BoxRegion {
            lo: self.lo.iter().zip(shift).map(|(v, s)| v + s).collect(),
            hi: self.hi.iter().zip(shift).map(|(v, s)| v + s).collect(),
        }
    }

    /// Sub-box on the given coordinates, in that order.
    pub fn select(&self, dims: &[usize]) -> Self {
        BoxRegion { lo: dims.iter().map(|&i| self.lo[i]).collect(), hi: dims.iter().map(|&i| self.hi[i]).collect() }
    }

    pub fn concat(&self, other: &BoxRegion) -> Self {
        let mut lo = self.lo.clone();
        lo.extend_from_slice(&other.lo);
        let mut hi = self.hi.clone();
        hi.extend_from_slice(&other.hi);
        BoxRegion { lo, hi }
    }

    /// Distance from `p` to the box boundary (negative outside).
    pub fn boundary_distance(&self, p: &[f64]) -> f64 {
        p.iter().zip(&self.lo).zip(&self.hi).map(|((x, l), h)| (x - l).min(h - x)).fold(f64::INFINITY, f64::min)
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }
}

/// A point of the time-frequency plane `R^{2d}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfPoint {
    pub t: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl TfPoint {
    pub fn from_flat(p: &[f64]) -> Result<Self> {
        if p.is_empty() || !p.len().is_multiple_of(2) {
            return Err(Error::domain(format!("time-frequency point needs even length, got {}", p.len())));
        }
        let d = p.len() / 2;
        Ok(TfPoint { t: p[..d].to_vec(), lambda: p[d..].to_vec() })
    }

    pub fn to_flat(&self) -> Point {
        let mut v = self.t.clone();
        v.extend_from_slice(&self.lambda);
        v
    }
}

mod keyed {
    //! Maps keyed by integer tuples, written as `{"[k,m]": value}` in JSON.

    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn format_key(k: &[i64]) -> String {
        let parts: Vec<String> = k.iter().map(|v| v.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    pub fn parse_key(s: &str) -> Result<Vec<i64>, String> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| format!("table key {s:?} must look like \"[k]\" or \"[k,m]\""))?;
        if inner.trim().is_empty() {
            return Ok(Vec::new());
        }
        inner.split(',').map(|p| p.trim().parse::<i64>().map_err(|e| format!("table key {s:?}: {e}"))).collect()
    }

    pub fn serialize<V: Serialize, S: Serializer>(map: &BTreeMap<Vec<i64>, V>, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(map.len()))?;
        for (k, v) in map {
            m.serialize_entry(&format_key(k), v)?;
        }
        m.end()
    }

    pub fn deserialize<'de, V: Deserialize<'de>, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<Vec<i64>, V>, D::Error> {
        let raw: BTreeMap<String, V> = BTreeMap::deserialize(d)?;
        raw.into_iter().map(|(k, v)| parse_key(&k).map(|k| (k, v)).map_err(D::Error::custom)).collect()
    }
}

pub use keyed::format_key;

/// Real parameters indexed by integer tuples, with a default outside the table.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IndexedParam {
    #[serde(default)]
    pub default: f64,
    #[serde(default, with = "keyed", skip_serializing_if = "BTreeMap::is_empty")]
    pub table: BTreeMap<Vec<i64>, f64>,
}

impl IndexedParam {
    pub fn constant(default: f64) -> Self {
        IndexedParam { default, table: BTreeMap::new() }
    }

    pub fn from_entries<I: IntoIterator<Item = (Vec<i64>, f64)>>(default: f64, entries: I) -> Self {
        IndexedParam { default, table: entries.into_iter().collect() }
    }

    pub fn get(&self, key: &[i64]) -> f64 {
        self.table.get(key).copied().unwrap_or(self.default)
    }

    pub fn set(&mut self, key: Vec<i64>, value: f64) {
        self.table.insert(key, value);
    }

    fn validate(&self, name: &str, arity: usize) -> Result<()> {
        let in_range = |v: f64| (0.0..1.0).contains(&v);
        if !in_range(self.default) {
            return Err(Error::Construction(format!("{name}: default {} outside [0, 1)", self.default)));
        }
        for (k, v) in &self.table {
            if k.len() != arity {
                return Err(Error::Construction(format!(
                    "{name}: key {} has {} indices, expected {arity}",
                    keyed::format_key(k),
                    k.len()
                )));
            }
            if !in_range(*v) {
                return Err(Error::Construction(format!("{name}[{}] = {v} outside [0, 1)", keyed::format_key(k))));
            }
        }
        Ok(())
    }

    pub fn canonical(&self) -> Self {
        IndexedParam {
            default: self.default,
            table: self.table.iter().filter(|(_, v)| **v != self.default).map(|(k, v)| (k.clone(), *v)).collect(),
        }
    }
}

/// Sets indexed by the integer cell of a parent point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<Box<StructuredSet>>,
    #[serde(default, with = "keyed", skip_serializing_if = "BTreeMap::is_empty")]
    pub table: BTreeMap<Vec<i64>, StructuredSet>,
}

impl SetTable {
    pub fn uniform(set: StructuredSet) -> Self {
        SetTable { default: Some(Box::new(set)), table: BTreeMap::new() }
    }

    pub fn from_entries<I: IntoIterator<Item = (Vec<i64>, StructuredSet)>>(
        default: Option<StructuredSet>,
        entries: I,
    ) -> Self {
        SetTable { default: default.map(Box::new), table: entries.into_iter().collect() }
    }

    pub fn get(&self, key: &[i64]) -> Option<&StructuredSet> {
        self.table.get(key).or(self.default.as_deref())
    }

    fn lookup(&self, key: &[i64], what: &str) -> Result<&StructuredSet> {
        self.get(key)
            .ok_or_else(|| Error::Construction(format!("no {what} for cell {} and no default", keyed::format_key(key))))
    }

    fn validate(&self, name: &str, dim: usize, arity: usize) -> Result<()> {
        let check = |s: &StructuredSet| -> Result<()> {
            s.validate()?;
            if s.dim() != dim {
                return Err(Error::Construction(format!("{name}: member has dimension {}, expected {dim}", s.dim())));
            }
            Ok(())
        };
        if let Some(d) = &self.default {
            check(d)?;
        }
        for (k, s) in &self.table {
            if k.len() != arity {
                return Err(Error::Construction(format!(
                    "{name}: key {} has {} indices, expected {arity}",
                    keyed::format_key(k),
                    k.len()
                )));
            }
            check(s)?;
        }
        Ok(())
    }

    fn canonical(&self) -> Self {
        let default = self.default.as_ref().map(|d| Box::new(d.canonical()));
        let table = self
            .table
            .iter()
            .map(|(k, s)| (k.clone(), s.canonical()))
            .filter(|(_, s)| default.as_deref() != Some(s))
            .collect();
        SetTable { default, table }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TilingAxis {
    /// `⋃_k (Z + a_k) × {k}`
    Rows,
    /// `⋃_k {k} × (Z + a_k)`
    Columns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StripAxis {
    /// Strips `R × [n, n+1)` in the time plane.
    Horizontal,
    /// Strips `[m, m+1) × R`; the mirror image of `Horizontal`.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StripKind {
    Overlap,
    Tiling,
}

fn tiling_kind() -> StripKind {
    StripKind::Tiling
}

fn z2_table() -> SetTable {
    SetTable::uniform(StructuredSet::lattice(2))
}

/// Parameters of the two-dimensional family, written for horizontal strips.
///
/// Overlap strip `n`: `{(m + t_{n,k}, n, j + μ_{k,m,n}, k + ν_n)}`.
/// Tiling strip `n`: `⋃_m {(m + t_n, n)} × Λ_{m,n}`.
/// The vertical form swaps the two time and the two frequency coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoDTheorem {
    pub axis: StripAxis,
    /// Fractional position of the strips; strip `n` sits at `n + strip_shift`.
    #[serde(default)]
    pub strip_shift: f64,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub overlap_strips: BTreeSet<i64>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub tiling_strips: BTreeSet<i64>,
    #[serde(default = "tiling_kind")]
    pub default_strip: StripKind,
    /// `t_{n,k}`, keys `[n,k]`.
    #[serde(default)]
    pub shift: IndexedParam,
    /// `μ_{k,m,n}`, keys `[k,m,n]`.
    #[serde(default)]
    pub freq_offset: IndexedParam,
    /// `ν_n`, keys `[n]`.
    #[serde(default)]
    pub strip_freq: IndexedParam,
    /// `t_n` for tiling strips, keys `[n]`.
    #[serde(default)]
    pub tile_shift: IndexedParam,
    /// `Λ_{m,n}`, keys `[m,n]`.
    #[serde(default = "z2_table")]
    pub tile_spectra: SetTable,
}

impl TwoDTheorem {
    /// All strips tiling-type with `Λ_{m,n} = Z²` and zero parameters, i.e. `Z⁴`.
    pub fn trivial(axis: StripAxis) -> Self {
        TwoDTheorem {
            axis,
            strip_shift: 0.0,
            overlap_strips: BTreeSet::new(),
            tiling_strips: BTreeSet::new(),
            default_strip: StripKind::Tiling,
            shift: IndexedParam::default(),
            freq_offset: IndexedParam::default(),
            strip_freq: IndexedParam::default(),
            tile_shift: IndexedParam::default(),
            tile_spectra: z2_table(),
        }
    }

    pub fn strip_kind(&self, n: i64) -> StripKind {
        if self.overlap_strips.contains(&n) {
            StripKind::Overlap
        } else if self.tiling_strips.contains(&n) {
            StripKind::Tiling
        } else {
            self.default_strip
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(n) = self.overlap_strips.intersection(&self.tiling_strips).next() {
            return Err(Error::Construction(format!("strip {n} listed as both overlap and tiling type")));
        }
        if !(0.0..1.0).contains(&self.strip_shift) {
            return Err(Error::Construction(format!("strip_shift {} outside [0, 1)", self.strip_shift)));
        }
        self.shift.validate("shift", 2)?;
        self.freq_offset.validate("freq_offset", 3)?;
        self.strip_freq.validate("strip_freq", 1)?;
        self.tile_shift.validate("tile_shift", 1)?;
        self.tile_spectra.validate("tile_spectra", 2, 2)
    }

    fn canonical(&self) -> Self {
        let (overlap_strips, tiling_strips) = match self.default_strip {
            StripKind::Tiling => (self.overlap_strips.clone(), BTreeSet::new()),
            StripKind::Overlap => (BTreeSet::new(), self.tiling_strips.clone()),
        };
        TwoDTheorem {
            axis: self.axis,
            strip_shift: self.strip_shift,
            overlap_strips,
            tiling_strips,
            default_strip: self.default_strip,
            shift: self.shift.canonical(),
            freq_offset: self.freq_offset.canonical(),
            strip_freq: self.strip_freq.canonical(),
            tile_shift: self.tile_shift.canonical(),
            tile_spectra: self.tile_spectra.canonical(),
        }
    }

    /// Visits points of the horizontal form inside `bx` (already in horizontal coordinates).
    fn visit_horizontal(&self, bx: &BoxRegion, f: &mut dyn FnMut(&[f64])) -> Result<()> {
        let (lo, hi) = (bx.lo(), bx.hi());
        let freq_box = bx.select(&[2, 3]);
        for n in int_candidates(lo[1], hi[1], self.strip_shift) {
            let y = n as f64 + self.strip_shift;
            if !(lo[1] <= y && y < hi[1]) {
                continue;
            }
            match self.strip_kind(n) {
                StripKind::Overlap => {
                    let nu = self.strip_freq.get(&[n]);
                    for k in int_candidates(lo[3], hi[3], nu) {
                        let l2 = k as f64 + nu;
                        if !(lo[3] <= l2 && l2 < hi[3]) {
                            continue;
                        }
                        let t = self.shift.get(&[n, k]);
                        for m in int_candidates(lo[0], hi[0], t) {
                            let x = m as f64 + t;
                            if !(lo[0] <= x && x < hi[0]) {
                                continue;
                            }
                            let mu = self.freq_offset.get(&[k, m, n]);
                            for j in int_candidates(lo[2], hi[2], mu) {
                                let l1 = j as f64 + mu;
                                if lo[2] <= l1 && l1 < hi[2] {
                                    f(&[x, y, l1, l2]);
                                }
                            }
                        }
                    }
                }
                StripKind::Tiling => {
                    let t = self.tile_shift.get(&[n]);
                    for m in int_candidates(lo[0], hi[0], t) {
                        let x = m as f64 + t;
                        if !(lo[0] <= x && x < hi[0]) {
                            continue;
                        }
                        let spectrum = self.tile_spectra.lookup(&[m, n], "tile spectrum")?;
                        spectrum.visit(&freq_box, &mut |l: &[f64]| f(&[x, y, l[0], l[1]]))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Candidates `k` for `lo <= k + c < hi`; callers filter on the computed coordinate.
fn int_candidates(lo: f64, hi: f64, c: f64) -> std::ops::RangeInclusive<i64> {
    ((lo - c).floor() as i64 - 1)..=((hi - c).ceil() as i64)
}

/// A finite description of a possibly infinite point set in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructuredSet {
    Explicit {
        dim: usize,
        points: Vec<Point>,
    },
    /// `Z^dim + offset`.
    Lattice {
        dim: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        offset: Vec<f64>,
    },
    /// A tiling set of the unit square; `strip_shift` moves the strips off the integers.
    #[serde(rename = "cube_tiling_2d")]
    CubeTiling2D {
        axis: TilingAxis,
        #[serde(default)]
        strip_shift: f64,
        #[serde(default)]
        offsets: IndexedParam,
    },
    /// `⋃_{t ∈ J} {t} × Λ_t`, spectra keyed by the integer cell of `t`.
    Standard {
        d: usize,
        time_set: Box<StructuredSet>,
        spectra: SetTable,
    },
    /// `{(s, t, λ, ν) : (s, λ) ∈ Λ_1, (t, ν) ∈ Λ_{(s, λ)}}`, children keyed by the cell of `(s, λ)`.
    PseudoStandard {
        m: usize,
        n: usize,
        base: Box<StructuredSet>,
        children: SetTable,
    },
    #[serde(rename = "two_d_theorem")]
    TwoDTheorem(Box<TwoDTheorem>),
}

impl StructuredSet {
    pub fn lattice(dim: usize) -> Self {
        StructuredSet::Lattice { dim, offset: vec![0.0; dim] }
    }

    pub fn shifted_lattice(offset: Vec<f64>) -> Self {
        StructuredSet::Lattice { dim: offset.len(), offset }
    }

    pub fn explicit(dim: usize, points: Vec<Point>) -> Result<Self> {
        let s = StructuredSet::Explicit { dim, points };
        s.validate()?;
        Ok(s)
    }

    pub fn cube_tiling_2d(axis: TilingAxis, offsets: IndexedParam) -> Result<Self> {
        let s = StructuredSet::CubeTiling2D { axis, strip_shift: 0.0, offsets };
        s.validate()?;
        Ok(s)
    }

    /// Ambient dimension `n` of the set in `R^n`.
    pub fn dim(&self) -> usize {
        match self {
            StructuredSet::Explicit { dim, .. } | StructuredSet::Lattice { dim, .. } => *dim,
            StructuredSet::CubeTiling2D { .. } => 2,
            StructuredSet::Standard { d, .. } => 2 * d,
            StructuredSet::PseudoStandard { m, n, .. } => 2 * (m + n),
            StructuredSet::TwoDTheorem(_) => 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StructuredSet::Explicit { dim, points } => {
                if *dim == 0 {
                    return Err(Error::Construction("explicit set needs dimension >= 1".into()));
                }
                for p in points {
                    if p.len() != *dim || p.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Construction(format!("explicit point {p:?} is not a finite {dim}-vector")));
                    }
                }
                Ok(())
            }
            StructuredSet::Lattice { dim, offset } => {
                if *dim == 0 {
                    return Err(Error::Construction("lattice needs dimension >= 1".into()));
                }
                if !offset.is_empty() && offset.len() != *dim {
                    return Err(Error::Construction(format!(
                        "lattice offset has length {}, expected {dim}",
                        offset.len()
                    )));
                }
                if offset.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Construction("lattice offset must be finite".into()));
                }
                Ok(())
            }
            StructuredSet::CubeTiling2D { strip_shift, offsets, .. } => {
                if !(0.0..1.0).contains(strip_shift) {
                    return Err(Error::Construction(format!("strip_shift {strip_shift} outside [0, 1)")));
                }
                offsets.validate("offsets", 1)
            }
            StructuredSet::Standard { d, time_set, spectra } => {
                if *d == 0 {
                    return Err(Error::Construction("standard set needs d >= 1".into()));
                }
                time_set.validate()?;
                if time_set.dim() != *d {
                    return Err(Error::Construction(format!(
                        "time set has dimension {}, expected {d}",
                        time_set.dim()
                    )));
                }
                spectra.validate("spectra", *d, *d)
            }
            StructuredSet::PseudoStandard { m, n, base, children } => {
                if *m == 0 || *n == 0 {
                    return Err(Error::Construction("pseudo-standard set needs m, n >= 1".into()));
                }
                base.validate()?;
                if base.dim() != 2 * m {
                    return Err(Error::Construction(format!("base has dimension {}, expected {}", base.dim(), 2 * m)));
                }
                children.validate("children", 2 * n, 2 * m)?;
                if children.default.is_none() {
                    if let StructuredSet::Explicit { points, .. } = base.as_ref() {
                        for p in points {
                            children.lookup(&cell_key(p), "child")?;
                        }
                    }
                }
                Ok(())
            }
            StructuredSet::TwoDTheorem(th) => th.validate(),
        }
    }

    /// Canonical form: offsets reduced to `[0, 1)`, defaults not repeated in tables.
    pub fn canonical(&self) -> Self {
        match self {
            StructuredSet::Explicit { dim, points } => {
                let mut points = points.clone();
                points.sort_by(|a, b| lex_cmp(a, b));
                points.dedup();
                StructuredSet::Explicit { dim: *dim, points }
            }
            StructuredSet::Lattice { dim, offset } => {
                let offset =
                    if offset.is_empty() { vec![0.0; *dim] } else { offset.iter().map(|v| frac(*v, 0.0)).collect() };
                StructuredSet::Lattice { dim: *dim, offset }
            }
            StructuredSet::CubeTiling2D { axis, strip_shift, offsets } => {
                let offsets = offsets.canonical();
                if offsets.table.is_empty() && offsets.default == 0.0 {
                    let offset = match axis {
                        TilingAxis::Rows => vec![0.0, *strip_shift],
                        TilingAxis::Columns => vec![*strip_shift, 0.0],
                    };
                    StructuredSet::Lattice { dim: 2, offset }
                } else {
                    StructuredSet::CubeTiling2D { axis: *axis, strip_shift: *strip_shift, offsets }
                }
            }
            StructuredSet::Standard { d, time_set, spectra } => StructuredSet::Standard {
                d: *d,
                time_set: Box::new(time_set.canonical()),
                spectra: spectra.canonical(),
            },
            StructuredSet::PseudoStandard { m, n, base, children } => StructuredSet::PseudoStandard {
                m: *m,
                n: *n,
                base: Box::new(base.canonical()),
                children: children.canonical(),
            },
            StructuredSet::TwoDTheorem(th) => StructuredSet::TwoDTheorem(Box::new(th.canonical())),
        }
    }

    /// Calls `f` on every point of the set inside `bx`, without materializing anything outside it.
    pub fn visit(&self, bx: &BoxRegion, f: &mut dyn FnMut(&[f64])) -> Result<()> {
        if bx.dim() != self.dim() {
            return Err(Error::domain(format!("box has dimension {}, set has dimension {}", bx.dim(), self.dim())));
        }
        match self {
            StructuredSet::Explicit { points, .. } => {
                for p in points.iter().filter(|p| bx.contains(p)) {
                    f(p);
                }
                Ok(())
            }
            StructuredSet::Lattice { dim, offset } => {
                let offset = if offset.is_empty() { vec![0.0; *dim] } else { offset.clone() };
                let mut buf = vec![0.0; *dim];
                visit_lattice(bx, &offset, 0, &mut buf, f);
                Ok(())
            }
            StructuredSet::CubeTiling2D { axis, strip_shift, offsets } => {
                // (strip coordinate, offset coordinate)
                let (s, o) = match axis {
                    TilingAxis::Rows => (1, 0),
                    TilingAxis::Columns => (0, 1),
                };
                let (lo, hi) = (bx.lo(), bx.hi());
                let mut p = [0.0; 2];
                for k in int_candidates(lo[s], hi[s], *strip_shift) {
                    let ys = k as f64 + strip_shift;
                    if !(lo[s] <= ys && ys < hi[s]) {
                        continue;
                    }
                    let a = offsets.get(&[k]);
                    for m in int_candidates(lo[o], hi[o], a) {
                        let xo = m as f64 + a;
                        if lo[o] <= xo && xo < hi[o] {
                            p[s] = ys;
                            p[o] = xo;
                            f(&p);
                        }
                    }
                }
                Ok(())
            }
            StructuredSet::Standard { d, time_set, spectra } => {
                let d = *d;
                let time_box = bx.select(&(0..d).collect::<Vec<_>>());
                let freq_box = bx.select(&(d..2 * d).collect::<Vec<_>>());
                let mut times = Vec::new();
                time_set.visit(&time_box, &mut |t| times.push(t.to_vec()))?;
                let mut buf = vec![0.0; 2 * d];
                for t in times {
                    let spectrum = spectra.lookup(&cell_key(&t), "spectrum")?;
                    buf[..d].copy_from_slice(&t);
                    spectrum.visit(&freq_box, &mut |l| {
                        buf[d..].copy_from_slice(l);
                        f(&buf);
                    })?;
                }
                Ok(())
            }
            StructuredSet::PseudoStandard { m, n, base, children } => {
                let (m, n) = (*m, *n);
                let d = m + n;
                let base_dims: Vec<usize> = (0..m).chain(d..d + m).collect();
                let child_dims: Vec<usize> = (m..d).chain(d + m..2 * d).collect();
                let base_box = bx.select(&base_dims);
                let child_box = bx.select(&child_dims);
                let mut bases = Vec::new();
                base.visit(&base_box, &mut |p| bases.push(p.to_vec()))?;
                let mut buf = vec![0.0; 2 * d];
                for sl in bases {
                    let child = children.lookup(&cell_key(&sl), "child")?;
                    for (i, &dim) in base_dims.iter().enumerate() {
                        buf[dim] = sl[i];
                    }
                    child.visit(&child_box, &mut |tn| {
                        for (i, &dim) in child_dims.iter().enumerate() {
                            buf[dim] = tn[i];
                        }
                        f(&buf);
                    })?;
                }
                Ok(())
            }
            StructuredSet::TwoDTheorem(th) => match th.axis {
                StripAxis::Horizontal => th.visit_horizontal(bx, f),
                StripAxis::Vertical => {
                    let swapped = bx.select(&SWAP_TIME_FREQ);
                    th.visit_horizontal(&swapped, &mut |p| f(&[p[1], p[0], p[3], p[2]]))
                }
            },
        }
    }

    /// Points inside `bx`, sorted lexicographically.
    pub fn enumerate(&self, bx: &BoxRegion) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        self.visit(bx, &mut |p| out.push(p.to_vec()))?;
        out.sort_by(|a, b| lex_cmp(a, b));
        out.dedup();
        Ok(out)
    }
}

/// Coordinate permutation exchanging the two time and the two frequency axes in `R^4`.
pub const SWAP_TIME_FREQ: [usize; 4] = [1, 0, 3, 2];

fn visit_lattice(bx: &BoxRegion, offset: &[f64], axis: usize, buf: &mut [f64], f: &mut dyn FnMut(&[f64])) {
    if axis == buf.len() {
        f(buf);
        return;
    }
    let (lo, hi) = (bx.lo()[axis], bx.hi()[axis]);
    for k in int_candidates(lo, hi, offset[axis]) {
        let x = k as f64 + offset[axis];
        if lo <= x && x < hi {
            buf[axis] = x;
            visit_lattice(bx, offset, axis + 1, buf, f);
        }
    }
}

impl fmt::Display for StructuredSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match serde_json::to_string(self) {
            Ok(s) => f.write_str(&s),
            Err(_) => write!(f, "{self:?}"),
        }
    }
}

/// `⋃_{t ∈ J} {t} × Λ_t` in `R^{2d}`.
pub fn make_standard(d: usize, time_set: StructuredSet, spectra: SetTable) -> Result<StructuredSet> {
    let s = StructuredSet::Standard { d, time_set: Box::new(time_set), spectra };
    s.validate()?;
    Ok(s)
}

/// Glues an ONB set `Λ_1 ⊂ R^{2m}` with ONB sets `Λ_{(s,λ)} ⊂ R^{2n}` into `R^{2(m+n)}`.
pub fn make_pseudo_standard(m: usize, n: usize, base: StructuredSet, children: SetTable) -> Result<StructuredSet> {
    let s = StructuredSet::PseudoStandard { m, n, base: Box::new(base), children };
    s.validate()?;
    Ok(s)
}

pub fn make_2d_theorem(params: TwoDTheorem) -> Result<StructuredSet> {
    let s = StructuredSet::TwoDTheorem(Box::new(params));
    s.validate()?;
    Ok(s)
}

/// Sets `params.overlap_strips`/`tiling_strips` from a partition and validates it.
pub fn with_partition(
    mut params: TwoDTheorem,
    overlap: impl IntoIterator<Item = i64>,
    tiling: impl IntoIterator<Item = i64>,
    default_strip: StripKind,
) -> Result<TwoDTheorem> {
    params.overlap_strips = overlap.into_iter().collect();
    params.tiling_strips = tiling.into_iter().collect();
    params.default_strip = default_strip;
    params.validate()?;
    Ok(params)
}

/// Sorts and removes points within `eps` (max-norm) of an earlier one.
pub fn dedup_within(mut points: Vec<Point>, eps: f64) -> Vec<Point> {
    points.sort_by(|a, b| lex_cmp(a, b));
    let mut kept: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        let dup = kept
            .iter()
            .rev()
            .take_while(|q| p[0] - q[0] <= eps)
            .any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).abs() <= eps));
        if !dup {
            kept.push(p);
        }
    }
    kept
}

/// All differences `p - q` of distinct enumerated points, deduplicated to `DEFAULT_INT_TOL`.
pub fn difference_samples(set: &StructuredSet, bx: &BoxRegion) -> Result<Vec<Point>> {
    difference_samples_with(set, bx, DEFAULT_INT_TOL)
}

pub fn difference_samples_with(set: &StructuredSet, bx: &BoxRegion, eps: f64) -> Result<Vec<Point>> {
    let pts = set.enumerate(bx)?;
    let mut diffs = Vec::with_capacity(pts.len() * pts.len().saturating_sub(1));
    for (i, p) in pts.iter().enumerate() {
        for (j, q) in pts.iter().enumerate() {
            if i != j {
                diffs.push(p.iter().zip(q).map(|(a, b)| a - b).collect());
            }
        }
    }
    Ok(dedup_within(diffs, eps))
}
