//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero on failure.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use gabor_cube::classify::{check_pseudo_structure, classify_1d, classify_2d, gamma, t_slice, Outcome1D};
use gabor_cube::cli::parse_set;
use gabor_cube::frame::{check_onb, default_test_suite, parseval_sum, OnbOptions, TestFunction};
use gabor_cube::ortho::check_orthogonality;
use gabor_cube::random::{random_2d_theorem, random_cube_tiling, random_pseudo_standard, random_standard_1d};
use gabor_cube::sets::{lex_cmp, make_2d_theorem, StripAxis, TilingAxis, TwoDTheorem, SWAP_TIME_FREQ};
use gabor_cube::stft::{in_zero_set, secant_stft_magnitude, stft_1d, stft_quadrature};
use gabor_cube::tiling::{check_tiling, convolution_oracle, estimate_density, UnitCubeIndicator};
use gabor_cube::{BoxRegion, Point, StructuredSet, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const STFT_TOL: f64 = 1e-8;
const QUAD_TOL: f64 = 1e-10;
const VARIETY_MARGIN: f64 = 1e-4;
const PARAM_TOL: f64 = 1e-9;
const PARSEVAL_FREQ_RADIUS: f64 = 1000.0;

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

struct Fixture {
    name: String,
    path: PathBuf,
    doc: Value,
    set: StructuredSet,
}

impl Fixture {
    fn expect(&self, key: &str) -> Option<&Value> {
        self.doc.get("expect").and_then(|e| e.get(key))
    }

    fn expects_onb(&self) -> bool {
        self.expect("onb").and_then(Value::as_bool) == Some(true)
    }

    fn d(&self) -> usize {
        self.set.dim() / 2
    }
}

fn fixtures() -> Vec<Fixture> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .map(|e| e.expect("directory entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
            let set = parse_set(&doc).unwrap();
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            Fixture { name, path, doc, set }
        })
        .collect()
}

fn fixture(name: &str) -> Fixture {
    fixtures().into_iter().find(|f| f.name == name).unwrap_or_else(|| panic!("fixture {name}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same_points(a: &[Point], b: &[Point], tol: f64) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| lex_cmp(x, y));
    b.sort_by(|x, y| lex_cmp(x, y));
    a.len() == b.len() && a.iter().zip(&b).all(|(p, q)| p.iter().zip(q).all(|(x, y)| (x - y).abs() <= tol))
}

/// Distance from `(t, ν)` to the boundary of the zero set of the 1D cube window.
fn distance_to_cube_variety(t: f64, nu: f64) -> f64 {
    let edge = (t.abs() - 1.0).abs();
    if t.abs() >= 1.0 {
        return edge;
    }
    let x = nu * (1.0 - t.abs());
    let k = match x.round() {
        0.0 => x.signum(),
        r => r,
    };
    let grad = nu.hypot(1.0 - t.abs());
    edge.min((x - k).abs() / grad)
}

fn criterion_1() -> Check {
    let w = Window::unit_cube(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5757);
    let (mut n, mut zeros, mut worst) = (0, 0, 0.0_f64);
    while n < 10_000 {
        let t = rng.gen_range(-2.0..2.0);
        let nu = rng.gen_range(-20.0..20.0);
        if distance_to_cube_variety(t, nu) < VARIETY_MARGIN {
            continue;
        }
        n += 1;
        let closed = stft_1d(t, nu).map_err(|e| e.to_string())?;
        let quad = stft_quadrature(&w, &[t], &[nu], QUAD_TOL).map_err(|e| e.to_string())?;
        let diff = (closed - quad).norm();
        worst = worst.max(diff);
        ensure(diff <= STFT_TOL, || format!("closed form and quadrature differ by {diff:e} at ({t}, {nu})"))?;
        let zero = in_zero_set(&w, &[t], &[nu]).map_err(|e| e.to_string())?;
        ensure(zero == (closed.norm() <= STFT_TOL), || {
            format!("zero-set predicate {zero} but |V| = {:e} at ({t}, {nu})", closed.norm())
        })?;
        zeros += usize::from(zero);
    }
    Ok(format!("{n} samples ({zeros} in the zero set), max |closed - quadrature| = {worst:.2e}"))
}

/// Both detectors on a radius-4 enumeration; the verdict covers the radius-3 safe region.
fn tiling_detectors(points: &[Point]) -> Result<(bool, bool), String> {
    let bx = BoxRegion::centered(2, 4.0).unwrap();
    let exact = check_tiling(points, &bx).map_err(|e| e.to_string())?;
    let safe = exact.region.clone();
    let grid =
        convolution_oracle(&UnitCubeIndicator { dim: 2 }, points, &safe, 1.0 / 64.0).map_err(|e| e.to_string())?;
    Ok((exact.is_tiling(), grid.mismatches(&safe, 1.0, 0.0).is_empty()))
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3232);
    let bx = BoxRegion::centered(2, 4.0).unwrap();
    let safe = bx.shrunk(1.0).unwrap();
    let mut perturbed = 0;
    for i in 0..100 {
        let axis = if i % 2 == 0 { TilingAxis::Rows } else { TilingAxis::Columns };
        let set = random_cube_tiling(&mut rng, axis, 6, false).map_err(|e| e.to_string())?;
        let mut points = set.enumerate(&bx).map_err(|e| e.to_string())?;
        let (exact, grid) = tiling_detectors(&points)?;
        ensure(exact && grid, || format!("family {i} ({axis:?}): exact {exact}, convolution {grid}"))?;

        let inside: Vec<usize> = (0..points.len()).filter(|&j| safe.contains(&points[j])).collect();
        let j = inside[rng.gen_range(0..inside.len())];
        let how = if rng.gen_bool(0.5) {
            points.remove(j);
            "deleted"
        } else {
            points[j][rng.gen_range(0..2)] += 0.25;
            "shifted"
        };
        let (exact, grid) = tiling_detectors(&points)?;
        ensure(!exact && !grid, || format!("family {i}, {how} point: exact {exact}, convolution {grid}"))?;
        perturbed += 1;
    }
    Ok(format!("100 tilings accepted and {perturbed} perturbations rejected by both detectors"))
}

fn criterion_3() -> Check {
    let f = fixture("bad-rows");
    let bx = BoxRegion::centered(2, 3.0).unwrap();
    let tiling = check_tiling(&f.set.enumerate(&bx).unwrap(), &bx).map_err(|e| e.to_string())?;
    ensure(tiling.is_tiling(), || format!("tiling verdict {:?}", tiling.verdict))?;
    let ortho = check_orthogonality(&f.set, &Window::unit_cube(1).unwrap(), &bx).map_err(|e| e.to_string())?;
    ensure(!ortho.verdict, || "orthogonality passed".into())?;
    let first = &ortho.violations[0].difference;
    ensure(first.t == vec![0.5] && first.lambda == vec![1.0], || format!("first witness {first:?}"))?;

    let out = Command::new(env!("CARGO_BIN_EXE_gabor-cube"))
        .args(["check", "ortho"])
        .arg(&f.path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(1), || format!("CLI exit status {:?}", out.status.code()))?;
    let report: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let diff = &report["violations"][0]["difference"];
    ensure(diff["t"] == serde_json::json!([0.5]) && diff["lambda"] == serde_json::json!([1.0]), || {
        format!("CLI witness {diff}")
    })?;
    Ok(format!("tiles, {} violations, first witness (0.5, 1), CLI exit 1", ortho.violation_count))
}

fn criterion_4() -> Check {
    let mut checked = Vec::new();
    for f in fixtures().iter().filter(|f| f.expects_onb()) {
        let d = f.d();
        let w = Window::unit_cube(d).unwrap();
        let bx = BoxRegion::centered(2 * d, 3.0).unwrap();
        let suite = default_test_suite(d).unwrap();
        let onb = check_onb(&f.set, &w, &suite, &bx, OnbOptions::default()).map_err(|e| e.to_string())?;
        ensure(onb.verdict, || format!("{}: ortho {}, tiling {:?}", f.name, onb.ortho, onb.tiling.verdict))?;

        let test = TestFunction::cube_indicator("cube_0.3_0.8", vec![0.3; d], vec![0.8; d]).unwrap();
        let trunc = test.truncation_box(PARSEVAL_FREQ_RADIUS).unwrap();
        let sum = parseval_sum(&test, &f.set, &w, &trunc).map_err(|e| e.to_string())?;
        let (lo, hi) = (0.49_f64.powi(d as i32), 0.5_f64.powi(d as i32) + 1e-8);
        ensure((lo..=hi).contains(&sum), || format!("{}: Parseval sum {sum} outside [{lo}, {hi}]", f.name))?;
        checked.push(format!("{}={sum:.6}", f.name));
    }
    Ok(format!("{} fixtures are ONBs; sums at |λ| <= 1000: {}", checked.len(), checked.join(", ")))
}

/// Parameter keys, in horizontal coordinates, that the points of a strip-form set depend on.
fn observed_keys(p: &TwoDTheorem, points: &[Point]) -> Observed {
    let mut obs = Observed::default();
    for q in points {
        let h: Point = match p.axis {
            StripAxis::Horizontal => q.clone(),
            StripAxis::Vertical => SWAP_TIME_FREQ.iter().map(|&i| q[i]).collect(),
        };
        let n = (h[1] - p.strip_shift).round() as i64;
        if p.overlap_strips.contains(&n) {
            let k = (h[3] - p.strip_freq.get(&[n])).round() as i64;
            let m = (h[0] - p.shift.get(&[n, k])).round() as i64;
            obs.overlap.insert(n);
            obs.rows.insert((n, k));
            obs.cells.insert((k, m, n));
        } else {
            let m = (h[0] - p.tile_shift.get(&[n])).round() as i64;
            obs.tiling.insert(n);
            obs.tiles.insert((m, n));
        }
    }
    obs
}

#[derive(Default)]
struct Observed {
    overlap: BTreeSet<i64>,
    tiling: BTreeSet<i64>,
    rows: BTreeSet<(i64, i64)>,
    cells: BTreeSet<(i64, i64, i64)>,
    tiles: BTreeSet<(i64, i64)>,
}

fn compare_2d(truth: &TwoDTheorem, found: &TwoDTheorem, obs: &Observed) -> Result<(), String> {
    let close = |a: f64, b: f64| (a - b).abs() <= PARAM_TOL;
    ensure(found.axis == truth.axis, || format!("axis {:?} vs {:?}", found.axis, truth.axis))?;
    ensure(close(found.strip_shift, truth.strip_shift), || "strip shift".into())?;
    for &n in obs.overlap.iter().chain(&obs.tiling) {
        ensure(found.strip_kind(n) == truth.strip_kind(n), || format!("strip {n} is {:?}", found.strip_kind(n)))?;
    }
    for &n in &obs.overlap {
        ensure(close(found.strip_freq.get(&[n]), truth.strip_freq.get(&[n])), || format!("ν_{n}"))?;
    }
    for &(n, k) in &obs.rows {
        ensure(close(found.shift.get(&[n, k]), truth.shift.get(&[n, k])), || format!("t_{{{n},{k}}}"))?;
    }
    for &(k, m, n) in &obs.cells {
        let key = [k, m, n];
        ensure(close(found.freq_offset.get(&key), truth.freq_offset.get(&key)), || format!("μ_{{{k},{m},{n}}}"))?;
    }
    let freq_box = BoxRegion::centered(2, 3.0).unwrap();
    for &n in &obs.tiling {
        ensure(close(found.tile_shift.get(&[n]), truth.tile_shift.get(&[n])), || format!("t_{n}"))?;
    }
    for &(m, n) in &obs.tiles {
        let a = found.tile_spectra.get(&[m, n]).ok_or("missing found spectrum")?.enumerate(&freq_box);
        let b = truth.tile_spectra.get(&[m, n]).ok_or("missing true spectrum")?.enumerate(&freq_box);
        ensure(same_points(&a.unwrap(), &b.unwrap(), PARAM_TOL), || format!("Λ_{{{m},{n}}}"))?;
    }
    Ok(())
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5151);
    let bx2 = BoxRegion::centered(2, 3.0).unwrap();
    for i in 0..50 {
        let draw = random_standard_1d(&mut rng, 6).map_err(|e| e.to_string())?;
        let c = match classify_1d(&draw.set, &bx2).map_err(|e| format!("1D draw {i}: {e}"))? {
            Outcome1D::Standard(c) => c,
            Outcome1D::Failure { witness, .. } => return Err(format!("1D draw {i}: failure {witness:?}")),
        };
        ensure((c.time_offset - draw.time_offset).abs() <= PARAM_TOL, || format!("1D draw {i}: time offset"))?;
        for k in -3..3 {
            let (a, b) = (c.spectra_offsets.get(&[k]), draw.spectra_offsets.get(&[k]));
            ensure((a - b).abs() <= PARAM_TOL, || format!("1D draw {i}: b_{k} = {a} vs {b}"))?;
        }
        let (a, b) = (c.set.enumerate(&bx2).unwrap(), draw.set.enumerate(&bx2).unwrap());
        ensure(same_points(&a, &b, PARAM_TOL), || format!("1D draw {i}: re-enumeration differs"))?;
    }

    let bx4 = BoxRegion::centered(4, 3.0).unwrap();
    let mut labels = BTreeMap::new();
    for i in 0..50 {
        let axis = if i % 2 == 0 { StripAxis::Horizontal } else { StripAxis::Vertical };
        let truth = random_2d_theorem(&mut rng, axis, 4).map_err(|e| e.to_string())?;
        let set = make_2d_theorem(truth.clone()).unwrap();
        let points = set.enumerate(&bx4).unwrap();
        let c = classify_2d(&set, &bx4).map_err(|e| format!("2D draw {i}: {e}"))?;
        let obs = observed_keys(&truth, &points);
        ensure(c.overlap_strips.iter().copied().eq(obs.overlap.iter().copied()), || {
            format!("2D draw {i}: overlap strips {:?} vs {:?}", c.overlap_strips, obs.overlap)
        })?;
        ensure(c.tiling_strips.iter().copied().eq(obs.tiling.iter().copied()), || {
            format!("2D draw {i}: tiling strips {:?} vs {:?}", c.tiling_strips, obs.tiling)
        })?;
        compare_2d(&truth, &c.params, &obs).map_err(|e| format!("2D draw {i}: {e}"))?;
        ensure(same_points(&c.set.enumerate(&bx4).unwrap(), &points, PARAM_TOL), || {
            format!("2D draw {i}: re-enumeration differs")
        })?;
        *labels.entry(c.labels.join("+")).or_insert(0) += 1;
    }

    let mixed = fixture("mixed-strips");
    let c = classify_2d(&mixed.set, &bx4).map_err(|e| e.to_string())?;
    ensure(c.tiling_strips == vec![1], || format!("mixed fixture tiling strips {:?}", c.tiling_strips))?;
    ensure(c.overlap_strips.len() >= 4, || format!("mixed fixture overlap strips {:?}", c.overlap_strips))?;
    Ok(format!("50 + 50 round trips recovered ({labels:?}); mixed fixture has J′ = {{1}}, J = {:?}", c.overlap_strips))
}

fn criterion_6() -> Check {
    let freq_window = BoxRegion::centered(2, 4.0).unwrap();
    let mut cases = 0;
    for f in fixtures().iter().filter(|f| f.expects_onb() && f.d() == 2) {
        for i in 0..5 {
            for j in 0..5 {
                let lo = vec![-1.1 + 0.45 * i as f64, -1.1 + 0.45 * j as f64];
                let c = BoxRegion::new(lo.clone(), lo.iter().map(|x| x + 1.0).collect()).unwrap();
                let g = gamma(&f.set, &c, &freq_window).map_err(|e| e.to_string())?;
                let report = check_tiling(&g, &freq_window).map_err(|e| e.to_string())?;
                ensure(report.is_tiling(), || format!("{} at {lo:?}: Γ(C) verdict {:?}", f.name, report.verdict))?;
                for lambda in &g {
                    let slice = t_slice(&f.set, &c, lambda).map_err(|e| format!("{} at {lo:?}: {e}", f.name))?;
                    ensure(slice.len() <= 1, || format!("{} at {lo:?}: |T| = {}", f.name, slice.len()))?;
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (fixture, square) pairs: Γ(C) + [0,1)² tiles and every T-slice has at most one point"))
}

fn criterion_7() -> Check {
    let bx = BoxRegion::centered(4, 3.0).unwrap();
    let pseudo = fixture("pseudo-standard");
    let r = check_pseudo_structure(&pseudo.set, 1, &bx).map_err(|e| e.to_string())?;
    ensure(r.holds, || format!("pseudo fixture rejected: {:?}", r.reason))?;
    let rebuilt = r.decomposition.as_ref().ok_or("no decomposition")?.enumerate(&bx).map_err(|e| e.to_string())?;
    ensure(same_points(&rebuilt, &pseudo.set.enumerate(&bx).unwrap(), PARAM_TOL), || "decomposition differs".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7777);
    for i in 0..5 {
        let set = random_pseudo_standard(&mut rng, 4).map_err(|e| e.to_string())?;
        let r = check_pseudo_structure(&set, 1, &bx).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("random pseudo draw {i} rejected: {:?}", r.reason))?;
        let rebuilt = r.decomposition.as_ref().ok_or("no decomposition")?.enumerate(&bx).map_err(|e| e.to_string())?;
        ensure(same_points(&rebuilt, &set.enumerate(&bx).unwrap(), PARAM_TOL), || {
            format!("draw {i}: decomposition differs")
        })?;
    }
    let mixed = fixture("mixed-strips");
    let r = check_pseudo_structure(&mixed.set, 1, &bx).map_err(|e| e.to_string())?;
    ensure(!r.holds, || "mixed fixture accepted".into())?;
    Ok(format!("pseudo fixture and 5 draws accepted; mixed fixture rejected ({})", r.reason.unwrap_or_default()))
}

fn criterion_8() -> Check {
    let w = Window::HyperbolicSecant;
    let mut axis = 0;
    for i in 0..500 {
        let r = 10f64.powf(-3.0 + 4.0 * i as f64 / 499.0);
        for (t, nu) in [(r, 0.0), (-r, 0.0), (0.0, r), (0.0, -r)] {
            let zero = in_zero_set(&w, &[t], &[nu]).map_err(|e| e.to_string())?;
            let mag = secant_stft_magnitude(t, nu).map_err(|e| e.to_string())?;
            ensure(!zero && mag > 0.0, || format!("axis point ({t}, {nu}) flagged as a zero"))?;
            axis += 1;
        }
    }
    let mut zeros = 0;
    for i in 0..200 {
        for j in 0..200 {
            let t = (i as f64 - 100.0) / 20.0;
            let nu = (j as f64 - 100.0) / 20.0;
            let x = t * nu;
            let expected = (x - x.round()).abs() <= 1e-9 && x.round() != 0.0;
            let zero = in_zero_set(&w, &[t], &[nu]).map_err(|e| e.to_string())?;
            ensure(zero == expected, || format!("({t}, {nu}): predicate {zero}, expected {expected}"))?;
            let mag = secant_stft_magnitude(t, nu).map_err(|e| e.to_string())?;
            ensure(!zero || mag <= 1e-12, || format!("({t}, {nu}): zero with |V| = {mag:e}"))?;
            zeros += usize::from(zero);
        }
    }
    Ok(format!("{axis} axis points are non-zeros; {zeros} grid zeros out of 40000 match tν ∈ Z∖{{0}}"))
}

fn criterion_9() -> Check {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for f in fixtures().iter().filter(|f| f.expects_onb()) {
        let dim = f.set.dim();
        for t in [4.0, 8.0] {
            let points = f.set.enumerate(&BoxRegion::centered(dim, t).unwrap()).unwrap();
            let rho = estimate_density(&points, t).map_err(|e| e.to_string())?;
            let bound = 2.0 * dim as f64 / t;
            ensure((rho - 1.0).abs() <= bound, || format!("{} at T = {t}: density {rho}", f.name))?;
            worst = worst.max((rho - 1.0).abs());
            n += 1;
        }
    }
    Ok(format!("{n} estimates, max |density - 1| = {worst:.3e}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("closed-form STFT agrees with quadrature and the zero-set predicate", criterion_1),
        ("exact tiling check agrees with the convolution oracle", criterion_2),
        ("rows tiling with offset 1/2 tiles but is not orthogonal", criterion_3),
        ("generated sets are ONBs with Parseval evidence", criterion_4),
        ("classifiers recover generator parameters", criterion_5),
        ("Γ(C) tiles and T-slices are singletons", criterion_6),
        ("pseudo-standard structure detection", criterion_7),
        ("secant window zero set", criterion_8),
        ("density of ONB sets", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
