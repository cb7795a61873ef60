//! Helpers shared by the integration suites: synthetic images, independent
//! oracles, and the SOM invariant checks.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use somqe::imaging::RasterImage;
use somqe::pipeline::parse_covariates;
use somqe::som::{
    best_matching_unit, quantization_error, train, train_step, DecayMode, PixelVector, SomGrid, TrainingParams,
};
use somqe::stats::Series;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// `(city, north)` QE series as printed.
pub fn qe_table() -> (Series, Series) {
    let text = std::fs::read_to_string(data_path("las_vegas_qe.tsv")).unwrap();
    let mut set = parse_covariates(&text, true).unwrap().series;
    let north = set.pop().unwrap();
    let city = set.pop().unwrap();
    (city, north)
}

/// `(visitors, population)` series as printed.
pub fn demographics_table() -> (Series, Series) {
    let text = std::fs::read_to_string(data_path("las_vegas_demographics.tsv")).unwrap();
    let mut set = parse_covariates(&text, true).unwrap().series;
    let population = set.pop().unwrap();
    let visitors = set.pop().unwrap();
    (visitors, population)
}

/// Smooth RGB image built from a few random low-frequency plane waves.
pub fn smooth_image(width: usize, height: usize, seed: u64) -> RasterImage {
    let mut r = rng(seed);
    let waves: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            let wavelength = r.random_range(48.0..160.0);
            let dir = r.random_range(0.0..PI);
            let phase = r.random_range(0.0..2.0 * PI);
            let amp = r.random_range(15.0..30.0);
            (
                2.0 * PI / wavelength * dir.cos(),
                2.0 * PI / wavelength * dir.sin(),
                phase,
                amp,
            )
        })
        .collect();
    RasterImage::from_fn(width, height, |x, y| {
        let v: f64 = 128.0
            + waves
                .iter()
                .map(|&(kx, ky, ph, a)| a * (kx * x as f64 + ky * y as f64 + ph).sin())
                .sum::<f64>();
        let v = v.clamp(0.0, 255.0);
        [v, (255.0 - v) * 0.8 + 20.0, (0.5 * v + 60.0).clamp(0.0, 255.0)]
    })
    .unwrap()
}

/// Medium-frequency texture for rotation tests.
pub fn textured_image(width: usize, height: usize) -> RasterImage {
    RasterImage::from_fn(width, height, |x, y| {
        let (x, y) = (x as f64, y as f64);
        let v = 128.0
            + 40.0 * (x / 9.0).sin() * (y / 11.0).cos()
            + 30.0 * ((x + 2.0 * y) / 23.0).sin()
            + 20.0 * ((3.0 * x - y) / 31.0).cos();
        [v, 255.0 - v, 0.5 * v + 40.0]
    })
    .unwrap()
}

/// Two-sided Student-t tail probability by quadrature, independent of any
/// special function: with `s = sqrt(df) tan(u)` the density becomes
/// proportional to `cos(u)^(df-1)` on `(-pi/2, pi/2)`.
pub fn t_tail_by_quadrature(t: f64, df: usize) -> f64 {
    let kernel = |u: f64| u.cos().powi(df as i32 - 1);
    let u0 = (t.abs() / (df as f64).sqrt()).atan();
    let inner = simpson(kernel, 0.0, u0, 200_000);
    let whole = simpson(kernel, 0.0, PI / 2.0, 200_000);
    1.0 - inner / whole
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// OLS slope, intercept and r² from exact integer moments. Inputs are
/// `value * 1000` integers.
pub fn exact_ols(xs: &[i64], ys: &[i64]) -> (f64, f64, f64) {
    let n = xs.len() as i128;
    let sx: i128 = xs.iter().map(|&x| x as i128).sum();
    let sy: i128 = ys.iter().map(|&y| y as i128).sum();
    let sxx: i128 = xs.iter().map(|&x| (x as i128) * (x as i128)).sum();
    let syy: i128 = ys.iter().map(|&y| (y as i128) * (y as i128)).sum();
    let sxy: i128 = xs.iter().zip(ys).map(|(&x, &y)| (x as i128) * (y as i128)).sum();
    let dxx = n * sxx - sx * sx;
    let dyy = n * syy - sy * sy;
    let dxy = n * sxy - sx * sy;
    let slope = dxy as f64 / dxx as f64;
    // intercept * 1000 = (sy*dxx - dxy*sx) / (n*dxx)
    let num = sy * dxx - dxy * sx;
    let intercept = num as f64 / (n * dxx) as f64 / 1000.0;
    let r2 = (dxy as f64 / dxx as f64) * (dxy as f64 / dyy as f64);
    (slope, intercept, r2)
}

/// Spreadsheet-style Pearson r (sum-of-products form, two-pass free).
pub fn spreadsheet_pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    let saa: f64 = a.iter().map(|v| v * v).sum();
    let sbb: f64 = b.iter().map(|v| v * v).sum();
    let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (n * sab - sa * sb) / ((n * saa - sa * sa).sqrt() * (n * sbb - sb * sb).sqrt())
}

pub fn random_pixel(r: &mut ChaCha8Rng) -> PixelVector {
    PixelVector::new([r.random(), r.random(), r.random()]).unwrap()
}

pub fn random_grid(r: &mut ChaCha8Rng, width: usize, height: usize) -> SomGrid {
    SomGrid::new(width, height, (0..width * height).map(|_| random_pixel(r)).collect()).unwrap()
}

/// Runs every SOM invariant on one random instance. Returns the name of the
/// first violated invariant.
pub fn check_som_invariants(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (w, h) = (r.random_range(1..=5), r.random_range(1..=5));
    let n = r.random_range(1..=64);
    let pixels: Vec<PixelVector> = (0..n).map(|_| random_pixel(&mut r)).collect();
    let grid = random_grid(&mut r, w, h);

    // QE is non-negative and bounded by the cube diagonal.
    let base = quantization_error(&pixels, &grid).unwrap();
    if !(base.qe >= 0.0 && base.qe <= 3f64.sqrt()) {
        return Err(format!("qe range: {}", base.qe));
    }
    if base.assignment_counts.iter().sum::<usize>() != n {
        return Err("assignment counts".into());
    }

    // Zero-learning fixpoint.
    let frozen = TrainingParams {
        learning_rate: 0.0,
        iterations: r.random_range(1..=50),
        seed,
        ..Default::default()
    };
    if train(&grid, &pixels, &frozen).unwrap() != grid {
        return Err("zero-learning fixpoint".into());
    }

    // Single-pixel sensitivity.
    let k = r.random_range(0..n);
    let mut changed = pixels.clone();
    changed[k] = random_pixel(&mut r);
    let d_old = best_matching_unit(&pixels[k], &grid).1;
    let d_new = best_matching_unit(&changed[k], &grid).1;
    let after = quantization_error(&changed, &grid).unwrap().qe;
    let predicted = base.qe + (d_new - d_old) / n as f64;
    if (after - predicted).abs() > 1e-12 {
        return Err(format!("single-pixel delta: {after} vs {predicted}"));
    }

    // Pixel-order invariance.
    let mut shuffled = pixels.clone();
    for i in (1..shuffled.len()).rev() {
        let j = r.random_range(0..=i);
        shuffled.swap(i, j);
    }
    if (quantization_error(&shuffled, &grid).unwrap().qe - base.qe).abs() > 1e-12 {
        return Err("permutation invariance".into());
    }

    // Model-superset monotonicity.
    let extra = r.random_range(1..=6);
    let mut models = grid.models().to_vec();
    models.extend((0..extra).map(|_| random_pixel(&mut r)));
    let bigger = SomGrid::new(models.len(), 1, models).unwrap();
    if quantization_error(&pixels, &bigger).unwrap().qe > base.qe {
        return Err("superset monotonicity".into());
    }

    // Bubble-kernel locality.
    let mut stepped = grid.clone();
    let x = random_pixel(&mut r);
    let winner = train_step(&mut stepped, &x, r.random_range(0.01..1.0), r.random_range(0.0..0.999));
    for (i, (a, b)) in grid.models().iter().zip(stepped.models()).enumerate() {
        if i != winner && a != b {
            return Err("bubble locality".into());
        }
    }

    // Winner convergence for one repeated input.
    let alpha = r.random_range(0.05..0.95);
    let mut conv = grid.clone();
    let target = random_pixel(&mut r);
    let (win, _) = best_matching_unit(&target, &conv);
    let m0 = conv.models()[win].components();
    for _ in 0..100 {
        train_step(&mut conv, &target, alpha, 0.5);
    }
    let m = conv.models()[win].components();
    let decay = (1.0 - alpha).powi(100);
    for c in 0..3 {
        let closed = target.components()[c] + decay * (m0[c] - target.components()[c]);
        if (m[c] - closed).abs() > 1e-10 {
            return Err(format!("winner convergence: {} vs {closed}", m[c]));
        }
    }

    // Seed determinism of a full training run.
    let params = TrainingParams {
        iterations: 200,
        seed,
        decay: if seed.is_multiple_of(2) {
            DecayMode::Constant
        } else {
            DecayMode::LinearToZero
        },
        ..Default::default()
    };
    let a = train(&grid, &pixels, &params).unwrap();
    let b = train(&grid, &pixels, &params).unwrap();
    let qa = quantization_error(&pixels, &a).unwrap();
    let qb = quantization_error(&pixels, &b).unwrap();
    if a != b || qa.qe.to_bits() != qb.qe.to_bits() || qa != qb {
        return Err("seed determinism".into());
    }
    Ok(())
}

/// Ten-ish frames of a vegetated scene where frame k has a growing, nested
/// set of pixels switched to a bright built-up gray.
pub fn growth_series(frames: usize, width: usize, height: usize) -> Vec<RasterImage> {
    let base = RasterImage::from_fn(width, height, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        let v = 20.0 * (xf / 7.0).sin() * (yf / 5.0).cos() + 10.0 * ((xf + yf) / 13.0).sin();
        [60.0 + v, 110.0 + v, 50.0 + 0.5 * v]
    })
    .unwrap();
    // Fixed per-pixel rank so each frame's built-up set contains the previous one.
    let mut r = rng(4242);
    let rank: Vec<f64> = (0..width * height).map(|_| r.random()).collect();
    (0..frames)
        .map(|k| {
            let fraction = 0.03 * k as f64;
            RasterImage::from_fn(width, height, |x, y| {
                if rank[y * width + x] < fraction {
                    [215.0, 210.0, 205.0]
                } else {
                    base.pixel(x, y)
                }
            })
            .unwrap()
        })
        .collect()
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Noisy linear series on a 1e-3 lattice, returned as scaled integers for
/// [`exact_ols`] and as the matching `f64` points.
pub fn random_lattice_series(r: &mut ChaCha8Rng) -> (Vec<i64>, Vec<i64>, Vec<(f64, f64)>) {
    let n = r.random_range(3..=40);
    let slope = r.random_range(0.5..5.0) * if r.random() { 1.0 } else { -1.0 };
    let intercept = r.random_range(1.0..100.0) * if r.random() { 1.0 } else { -1.0 };
    let xs: Vec<i64> = (0..n).map(|_| r.random_range(0..100_000)).collect();
    let ys: Vec<i64> = xs
        .iter()
        .map(|&x| {
            let y = intercept + slope * (x as f64 / 1000.0) + r.random_range(-3.0..3.0);
            (y * 1000.0).round() as i64
        })
        .collect();
    let points = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| (x as f64 / 1000.0, y as f64 / 1000.0))
        .collect();
    (xs, ys, points)
}
