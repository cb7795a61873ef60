//! Intensity-based co-registration of an image stack against an anchor frame.
//!
//! The similarity measure is the mean-square difference of luminance over the
//! pixels whose mapped position lies inside the moving image. Parameters are
//! found with Levenberg-Marquardt on a 2x2 box-filter pyramid, coarse to fine,
//! with an analytic Jacobian from central-difference image gradients.

use std::io::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use thiserror::Error;

use super::pyramid::plane_pyramid;
use super::raster::{Plane, RasterImage};
use super::resample::resample;
use super::transform::{RegistrationTransform, TransformMode};
use crate::atomic::write_atomic;
use crate::numfmt::sig;

#[derive(Debug, Error)]
pub enum RegisterError {
    #[error("image {index} is {actual:?}, anchor is {expected:?}")]
    DimensionMismatch {
        index: usize,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("empty image stack")]
    EmptyStack,
    #[error("anchor index {anchor} out of range for {len} images")]
    AnchorOutOfRange { anchor: usize, len: usize },
    #[error("images do not overlap enough to register")]
    NoOverlap,
    #[error(
        "no convergence after {iterations} iterations (best dx={} dy={} theta={}, residual {residual})",
        best.dx, best.dy, best.theta
    )]
    NonConvergence {
        best: RegistrationTransform,
        residual: f64,
        iterations: usize,
    },
    #[error("image {index}: {source}")]
    Frame {
        index: usize,
        #[source]
        source: Box<RegisterError>,
    },
}

impl RegisterError {
    /// True when the failure is numerical rather than caused by bad input.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            RegisterError::NonConvergence { .. } => true,
            RegisterError::Frame { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RegistrationOptions {
    pub mode: TransformMode,
    /// Levenberg-Marquardt iterations allowed per pyramid level.
    pub max_iterations: usize,
    /// Convergence threshold on the translation update norm, in pixels.
    pub translation_tolerance: f64,
    /// Convergence threshold on the rotation update, in radians.
    pub rotation_tolerance: f64,
    pub initial_damping: f64,
}

impl Default for RegistrationOptions {
    fn default() -> Self {
        Self {
            mode: TransformMode::Translation,
            max_iterations: 50,
            translation_tolerance: 1e-4,
            rotation_tolerance: 1e-6,
            initial_damping: 1e-3,
        }
    }
}

impl RegistrationOptions {
    pub fn with_mode(mode: TransformMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }
}

/// Result of aligning one moving image to a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    /// Maps reference content onto the moving image: `test(T(p)) ≈ reference(p)`.
    pub transform: RegistrationTransform,
    /// Final mean-square luminance difference at full resolution.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct RegisteredFrame {
    pub transform: RegistrationTransform,
    pub residual: f64,
    /// The input image resampled into the anchor's frame.
    pub image: RasterImage,
}

/// Smallest fraction of reference pixels that must map inside the moving image.
const MIN_OVERLAP: f64 = 0.25;
const MAX_DAMPING: f64 = 1e12;
/// Passes of [`binomial_blur`] applied to both luminance planes; two passes
/// give the 5-tap [1 4 6 4 1]/16 kernel.
const BLUR_PASSES: usize = 2;

pub fn register_pair(
    reference: &RasterImage,
    test: &RasterImage,
    options: &RegistrationOptions,
) -> Result<Alignment, RegisterError> {
    let dims = (reference.width(), reference.height());
    if (test.width(), test.height()) != dims {
        return Err(RegisterError::DimensionMismatch {
            index: 0,
            expected: dims,
            actual: (test.width(), test.height()),
        });
    }
    let smoothed = |img: &RasterImage| (0..BLUR_PASSES).fold(img.luminance(), |p, _| binomial_blur(&p));
    let ref_levels = plane_pyramid(&smoothed(reference));
    let test_levels = plane_pyramid(&smoothed(test));
    let coarsest = ref_levels.len() - 1;

    let mut params = [0.0; 3];
    for level in (0..=coarsest).rev() {
        let problem = LevelProblem::new(&ref_levels[level], &test_levels[level], options.mode);
        let outcome = problem.solve(params, options)?;
        if level == 0 {
            let transform = RegistrationTransform::from_params(options.mode, &outcome.params);
            if !outcome.converged {
                return Err(RegisterError::NonConvergence {
                    best: transform,
                    residual: outcome.cost,
                    iterations: outcome.iterations,
                });
            }
            return Ok(Alignment {
                transform,
                residual: outcome.cost,
            });
        }
        params = outcome.params;
        params[0] *= 2.0;
        params[1] *= 2.0;
    }
    unreachable!("pyramid has at least one level")
}

/// Registers every image against the last one and resamples it into the
/// anchor's frame. Output order matches input order.
pub fn register_stack(
    images: &[RasterImage],
    options: &RegistrationOptions,
) -> Result<Vec<RegisteredFrame>, RegisterError> {
    if images.is_empty() {
        return Err(RegisterError::EmptyStack);
    }
    register_stack_to(images, images.len() - 1, options)
}

/// As [`register_stack`] with an explicit anchor index.
pub fn register_stack_to(
    images: &[RasterImage],
    anchor: usize,
    options: &RegistrationOptions,
) -> Result<Vec<RegisteredFrame>, RegisterError> {
    if images.is_empty() {
        return Err(RegisterError::EmptyStack);
    }
    let reference = images.get(anchor).ok_or(RegisterError::AnchorOutOfRange {
        anchor,
        len: images.len(),
    })?;
    let expected = (reference.width(), reference.height());
    for (index, img) in images.iter().enumerate() {
        if (img.width(), img.height()) != expected {
            return Err(RegisterError::DimensionMismatch {
                index,
                expected,
                actual: (img.width(), img.height()),
            });
        }
    }
    images
        .par_iter()
        .enumerate()
        .map(|(index, img)| {
            if index == anchor {
                return Ok(RegisteredFrame {
                    transform: RegistrationTransform::identity(options.mode),
                    residual: 0.0,
                    image: img.clone(),
                });
            }
            let alignment = register_pair(reference, img, options).map_err(|e| RegisterError::Frame {
                index,
                source: Box::new(e),
            })?;
            Ok(RegisteredFrame {
                transform: alignment.transform,
                residual: alignment.residual,
                image: resample(img, &alignment.transform.inverse()),
            })
        })
        .collect()
}

struct Evaluation {
    cost: f64,
    hessian: Matrix3<f64>,
    gradient: Vector3<f64>,
}

struct LevelOutcome {
    params: [f64; 3],
    cost: f64,
    iterations: usize,
    converged: bool,
}

struct LevelProblem<'a> {
    reference: &'a Plane,
    moving: &'a Plane,
    grad_x: Plane,
    grad_y: Plane,
    mode: TransformMode,
}

impl<'a> LevelProblem<'a> {
    fn new(reference: &'a Plane, moving: &'a Plane, mode: TransformMode) -> Self {
        let (grad_x, grad_y) = gradients(moving);
        Self {
            reference,
            moving,
            grad_x,
            grad_y,
            mode,
        }
    }

    fn evaluate(&self, params: &[f64; 3]) -> Option<Evaluation> {
        let t = RegistrationTransform::from_params(self.mode, params);
        let (w, h) = (self.reference.width, self.reference.height);
        let center = RegistrationTransform::center(w, h);
        let (xmax, ymax) = ((w - 1) as f64, (h - 1) as f64);
        let (s, c) = t.theta.sin_cos();
        let mut hess = [[0.0; 3]; 3];
        let mut grad = [0.0; 3];
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        for y in 0..h {
            for x in 0..w {
                let (qx, qy) = t.apply(x as f64, y as f64, center);
                if !(0.0..=xmax).contains(&qx) || !(0.0..=ymax).contains(&qy) {
                    continue;
                }
                let r = self.moving.sample(qx, qy) - self.reference.at(x, y);
                let gx = self.grad_x.sample(qx, qy);
                let gy = self.grad_y.sample(qx, qy);
                let (u, v) = (x as f64 - center.0, y as f64 - center.1);
                let jt = gx * (-s * u - c * v) + gy * (c * u - s * v);
                let row = [gx, gy, jt];
                for i in 0..3 {
                    grad[i] += row[i] * r;
                    for j in i..3 {
                        hess[i][j] += row[i] * row[j];
                    }
                }
                sum_sq += r * r;
                count += 1;
            }
        }
        if (count as f64) < MIN_OVERLAP * (w * h) as f64 || count == 0 {
            return None;
        }
        let n = count as f64;
        let mut hessian = Matrix3::from_fn(|i, j| hess[i.min(j)][i.max(j)] / n);
        let mut gradient = Vector3::from_fn(|i, _| grad[i] / n);
        if self.mode == TransformMode::Translation {
            for k in 0..2 {
                hessian[(2, k)] = 0.0;
                hessian[(k, 2)] = 0.0;
            }
            hessian[(2, 2)] = 1.0;
            gradient[2] = 0.0;
        }
        Some(Evaluation {
            cost: sum_sq / n,
            hessian,
            gradient,
        })
    }

    fn solve(&self, start: [f64; 3], opts: &RegistrationOptions) -> Result<LevelOutcome, RegisterError> {
        let mut params = start;
        let mut current = self.evaluate(&params).ok_or(RegisterError::NoOverlap)?;
        let mut damping = opts.initial_damping;
        let mut iterations = 0;
        let mut converged = false;
        while iterations < opts.max_iterations {
            iterations += 1;
            let mut system = current.hessian;
            for k in 0..3 {
                system[(k, k)] *= 1.0 + damping;
            }
            let Some(step) = system.lu().solve(&(-current.gradient)) else {
                // Flat cost surface: nothing left to improve.
                converged = true;
                break;
            };
            let trial = [params[0] + step[0], params[1] + step[1], params[2] + step[2]];
            match self.evaluate(&trial) {
                Some(e) if e.cost < current.cost => {
                    params = trial;
                    current = e;
                    damping *= 0.1;
                }
                _ => damping *= 10.0,
            }
            let small = step[0].hypot(step[1]) < opts.translation_tolerance && step[2].abs() < opts.rotation_tolerance;
            if small || damping > MAX_DAMPING {
                converged = true;
                break;
            }
        }
        Ok(LevelOutcome {
            params,
            cost: current.cost,
            iterations,
            converged,
        })
    }
}

/// Separable [1 2 1]/4 smoothing with clamped edges. Attenuates pixel noise
/// (8-bit quantization in particular), which otherwise biases bilinear
/// registration toward half-pixel offsets.
fn binomial_blur(p: &Plane) -> Plane {
    let (w, h) = (p.width, p.height);
    let pass = |at: &dyn Fn(usize, usize) -> f64, horizontal: bool| -> Vec<f64> {
        let mut out = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let (i, n) = if horizontal { (x, w) } else { (y, h) };
                let get = |k: usize| if horizontal { at(k, y) } else { at(x, k) };
                let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
                out.push(0.25 * get(lo) + 0.5 * get(i) + 0.25 * get(hi));
            }
        }
        out
    };
    let rows = pass(&|x, y| p.at(x, y), true);
    let cols = pass(&|x, y| rows[y * w + x], false);
    Plane::new(w, h, cols)
}

/// Central-difference gradients, one-sided at the borders.
fn gradients(p: &Plane) -> (Plane, Plane) {
    let (w, h) = (p.width, p.height);
    let mut gx = Vec::with_capacity(w * h);
    let mut gy = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            gx.push(diff(x, w, |i| p.at(i, y)));
            gy.push(diff(y, h, |j| p.at(x, j)));
        }
    }
    (Plane::new(w, h, gx), Plane::new(w, h, gy))
}

fn diff(i: usize, n: usize, at: impl Fn(usize) -> f64) -> f64 {
    if n < 2 {
        0.0
    } else if i == 0 {
        at(1) - at(0)
    } else if i == n - 1 {
        at(n - 1) - at(n - 2)
    } else {
        (at(i + 1) - at(i - 1)) / 2.0
    }
}

/// One transform record: `(index, transform, residual)`.
pub type TransformRecord = (usize, RegistrationTransform, f64);

/// Writes the sidecar file, one `index dx dy theta residual` line per frame.
pub fn write_transforms(records: &[TransformRecord], path: &Path) -> std::io::Result<()> {
    write_atomic(path, format_transforms(records).as_bytes())
}

pub fn format_transforms(records: &[TransformRecord]) -> String {
    let mut out = Vec::new();
    for (index, t, residual) in records {
        writeln!(
            out,
            "{index} {} {} {} {}",
            sig(t.dx, 15),
            sig(t.dy, 15),
            sig(t.theta, 15),
            sig(*residual, 15)
        )
        .unwrap();
    }
    String::from_utf8(out).unwrap()
}

/// Parses a sidecar file. Blank lines and `#` comments are ignored. A record
/// with a non-zero angle is reported as rigid.
pub fn read_transforms(text: &str) -> Result<Vec<TransformRecord>, String> {
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(format!("line {}: expected 5 fields, got {}", lineno + 1, fields.len()));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| format!("line {}: bad index '{}'", lineno + 1, fields[0]))?;
        let mut nums = [0.0; 4];
        for (slot, field) in nums.iter_mut().zip(&fields[1..]) {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("line {}: bad number '{field}'", lineno + 1))?;
        }
        let [dx, dy, theta, residual] = nums;
        let t = if theta == 0.0 {
            RegistrationTransform::translation(dx, dy)
        } else {
            RegistrationTransform::rigid(dx, dy, theta)
        };
        records.push((index, t, residual));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth(w: usize, h: usize) -> RasterImage {
        RasterImage::from_fn(w, h, |x, y| {
            let (x, y) = (x as f64, y as f64);
            let v = 128.0 + 45.0 * (x / 21.0 + 0.4).sin() * (y / 17.0).cos() + 30.0 * ((x + y) / 33.0).sin();
            [v, 200.0 - 0.5 * v, 0.3 * v + 10.0]
        })
        .unwrap()
    }

    #[test]
    fn self_registration_is_identity() {
        let img = smooth(96, 80);
        for mode in [TransformMode::Translation, TransformMode::Rigid] {
            let a = register_pair(&img, &img, &RegistrationOptions::with_mode(mode)).unwrap();
            assert!(a.transform.dx.abs() < 1e-6 && a.transform.dy.abs() < 1e-6 && a.transform.theta.abs() < 1e-6);
            assert!(a.residual < 1e-12);
        }
    }

    #[test]
    fn constant_images_register_to_identity() {
        let img = RasterImage::filled(40, 40, [9.0, 9.0, 9.0]).unwrap();
        let a = register_pair(&img, &img, &RegistrationOptions::default()).unwrap();
        assert!(a.transform.is_identity());
    }

    #[test]
    fn recovers_fractional_shift() {
        let reference = smooth(128, 128);
        let test = resample(&reference, &RegistrationTransform::translation(3.5, -2.25));
        let a = register_pair(&reference, &test, &RegistrationOptions::default()).unwrap();
        assert!((a.transform.dx - 3.5).abs() < 0.1, "{:?}", a.transform);
        assert!((a.transform.dy + 2.25).abs() < 0.1, "{:?}", a.transform);
    }

    #[test]
    fn dimension_mismatch() {
        let a = smooth(10, 10);
        let b = smooth(11, 10);
        assert!(matches!(
            register_pair(&a, &b, &RegistrationOptions::default()),
            Err(RegisterError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            register_stack(&[a, b], &RegistrationOptions::default()),
            Err(RegisterError::DimensionMismatch { index: 0, .. })
        ));
    }

    #[test]
    fn stack_anchor_and_identical_frames() {
        let img = smooth(64, 64);
        let out = register_stack(std::slice::from_ref(&img), &RegistrationOptions::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].transform.is_identity());
        assert_eq!(out[0].image, img);

        let out = register_stack(
            &[img.clone(), img.clone(), img.clone()],
            &RegistrationOptions::default(),
        )
        .unwrap();
        for frame in &out {
            assert!(frame.transform.dx.abs() < 1e-6 && frame.transform.dy.abs() < 1e-6);
        }
        assert!(out[2].transform.is_identity());
    }

    #[test]
    fn empty_stack() {
        assert!(matches!(
            register_stack(&[], &RegistrationOptions::default()),
            Err(RegisterError::EmptyStack)
        ));
    }

    #[test]
    fn sidecar_round_trip() {
        let records = vec![
            (0, RegistrationTransform::translation(3.5, -2.25), 0.125),
            (1, RegistrationTransform::rigid(1.0, -1.0, 0.02), 1.0 / 3.0),
            (2, RegistrationTransform::identity(TransformMode::Translation), 0.0),
        ];
        let text = format_transforms(&records);
        assert_eq!(
            text.lines().next().unwrap(),
            "0 3.50000000000000 -2.25000000000000 0 0.125000000000000"
        );
        let back = read_transforms(&text).unwrap();
        for ((i, t, r), (j, u, s)) in records.iter().zip(&back) {
            assert_eq!(i, j);
            assert!((t.dx - u.dx).abs() < 1e-12 && (t.dy - u.dy).abs() < 1e-12 && (t.theta - u.theta).abs() < 1e-12);
            assert!((r - s).abs() < 1e-12);
        }
        assert!(read_transforms("0 1 2 3").is_err());
        assert!(read_transforms("0 1 2 3 nan").is_err());
    }
}
