//! Seeded random members of the constructible families, with parameters on a 1/64 grid.

use rand::Rng;

use crate::error::Result;
use crate::sets::{
    make_2d_theorem, make_pseudo_standard, make_standard, IndexedParam, SetTable, StripAxis, StripKind, StructuredSet,
    TilingAxis, TwoDTheorem,
};

/// Denominator of the parameter grid.
pub const GRID: u32 = 64;

pub fn snapped<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(0..GRID) as f64 / GRID as f64
}

/// Random offsets keyed `[k]` for `k` in `range`.
pub fn random_offsets<R: Rng>(rng: &mut R, range: std::ops::RangeInclusive<i64>) -> IndexedParam {
    IndexedParam::from_entries(0.0, range.map(|k| (vec![k], snapped(rng))))
}

/// `⋃_k (Z + a_k) × {k}` or `⋃_k {k} × (Z + a_k)` with random `a_k` on `|k| <= reach`.
pub fn random_cube_tiling<R: Rng>(rng: &mut R, axis: TilingAxis, reach: i64, shifted: bool) -> Result<StructuredSet> {
    let strip_shift = if shifted { snapped(rng) } else { 0.0 };
    let s = StructuredSet::CubeTiling2D { axis, strip_shift, offsets: random_offsets(rng, -reach..=reach) };
    s.validate()?;
    Ok(s.canonical())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardDraw {
    pub time_offset: f64,
    pub spectra_offsets: IndexedParam,
    pub set: StructuredSet,
}

/// `⋃_{t ∈ Z + s} {t} × (Z + b_t)` with random `s` and `b_t` for time cells in `-reach..=reach`.
pub fn random_standard_1d<R: Rng>(rng: &mut R, reach: i64) -> Result<StandardDraw> {
    let time_offset = snapped(rng);
    let spectra_offsets = random_offsets(rng, -reach..=reach);
    let spectra = SetTable::from_entries(
        Some(StructuredSet::lattice(1)),
        spectra_offsets.table.iter().map(|(k, b)| (k.clone(), StructuredSet::shifted_lattice(vec![*b]))),
    );
    let set = make_standard(1, StructuredSet::shifted_lattice(vec![time_offset]), spectra)?;
    Ok(StandardDraw { time_offset, spectra_offsets, set })
}

/// A random member of the strip family: each strip in `-reach..=reach` is overlap- or
/// tiling-type with probability 1/2, and tiling-type spectra are random square tilings.
pub fn random_2d_theorem<R: Rng>(rng: &mut R, axis: StripAxis, reach: i64) -> Result<TwoDTheorem> {
    let mut p = TwoDTheorem::trivial(axis);
    p.strip_shift = snapped(rng);
    let range = -reach..=reach;
    for n in range.clone() {
        if rng.gen_bool(0.5) {
            p.overlap_strips.insert(n);
            p.strip_freq.set(vec![n], snapped(rng));
            for k in range.clone() {
                p.shift.set(vec![n, k], snapped(rng));
                for m in range.clone() {
                    p.freq_offset.set(vec![k, m, n], snapped(rng));
                }
            }
        } else {
            p.tiling_strips.insert(n);
            p.tile_shift.set(vec![n], snapped(rng));
            for m in range.clone() {
                let axis = if rng.gen_bool(0.5) { TilingAxis::Rows } else { TilingAxis::Columns };
                p.tile_spectra.table.insert(vec![m, n], random_cube_tiling(rng, axis, reach, true)?);
            }
        }
    }
    p.default_strip = StripKind::Tiling;
    make_2d_theorem(p.clone())?;
    Ok(p)
}

/// Glues a random standard base in `R²` with random standard children in `R²`.
pub fn random_pseudo_standard<R: Rng>(rng: &mut R, reach: i64) -> Result<StructuredSet> {
    let base = random_cube_tiling(rng, TilingAxis::Columns, reach, true)?;
    let mut children = Vec::new();
    for s in -reach - 1..=reach {
        for l in -reach - 1..=reach {
            children.push((vec![s, l], random_cube_tiling(rng, TilingAxis::Columns, reach, true)?));
        }
    }
    make_pseudo_standard(1, 1, base, SetTable::from_entries(Some(StructuredSet::lattice(2)), children))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_are_seeded() {
        let a = random_2d_theorem(&mut ChaCha8Rng::seed_from_u64(7), StripAxis::Horizontal, 3).unwrap();
        let b = random_2d_theorem(&mut ChaCha8Rng::seed_from_u64(7), StripAxis::Horizontal, 3).unwrap();
        assert_eq!(a, b);
        let v = snapped(&mut ChaCha8Rng::seed_from_u64(1));
        assert!((0.0..1.0).contains(&v) && (v * 64.0).fract() == 0.0);
    }
}
