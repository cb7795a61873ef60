use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransformMode {
    #[default]
    Translation,
    Rigid,
}

impl TransformMode {
    pub fn param_count(self) -> usize {
        match self {
            TransformMode::Translation => 2,
            TransformMode::Rigid => 3,
        }
    }
}

impl fmt::Display for TransformMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformMode::Translation => "translation",
            TransformMode::Rigid => "rigid",
        })
    }
}

impl FromStr for TransformMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "translation" => Ok(TransformMode::Translation),
            "rigid" => Ok(TransformMode::Rigid),
            other => Err(format!("unknown registration mode '{other}'")),
        }
    }
}

/// Rigid-body map about the image center `c`:
/// `T(p) = R(theta) (p - c) + c + (dx, dy)`.
///
/// Resampling an image by `T` moves content by `T`, i.e. the output at `p`
/// reads the input at `T^-1(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegistrationTransform {
    pub mode: TransformMode,
    pub dx: f64,
    pub dy: f64,
    pub theta: f64,
}

impl RegistrationTransform {
    pub fn identity(mode: TransformMode) -> Self {
        Self {
            mode,
            dx: 0.0,
            dy: 0.0,
            theta: 0.0,
        }
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Self {
            mode: TransformMode::Translation,
            dx,
            dy,
            theta: 0.0,
        }
    }

    pub fn rigid(dx: f64, dy: f64, theta: f64) -> Self {
        Self {
            mode: TransformMode::Rigid,
            dx,
            dy,
            theta: wrap_angle(theta),
        }
    }

    pub(crate) fn from_params(mode: TransformMode, params: &[f64]) -> Self {
        match mode {
            TransformMode::Translation => Self::translation(params[0], params[1]),
            TransformMode::Rigid => Self::rigid(params[0], params[1], params[2]),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.dx == 0.0 && self.dy == 0.0 && self.theta == 0.0
    }

    /// Image center used as the rotation pivot for a `width` x `height` frame.
    pub fn center(width: usize, height: usize) -> (f64, f64) {
        ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0)
    }

    pub fn apply(&self, x: f64, y: f64, center: (f64, f64)) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        let (u, v) = (x - center.0, y - center.1);
        (c * u - s * v + center.0 + self.dx, s * u + c * v + center.1 + self.dy)
    }

    pub fn inverse(&self) -> Self {
        let (s, c) = self.theta.sin_cos();
        // -R(-theta) d
        Self {
            mode: self.mode,
            dx: -(c * self.dx + s * self.dy),
            dy: -(-s * self.dx + c * self.dy),
            theta: wrap_angle(-self.theta),
        }
    }

    /// `other ∘ self`: apply `self` first, then `other`.
    pub fn then(&self, other: &Self) -> Self {
        let (s, c) = other.theta.sin_cos();
        let mode = if self.mode == TransformMode::Rigid || other.mode == TransformMode::Rigid {
            TransformMode::Rigid
        } else {
            TransformMode::Translation
        };
        Self {
            mode,
            dx: c * self.dx - s * self.dy + other.dx,
            dy: s * self.dx + c * self.dy + other.dy,
            theta: wrap_angle(self.theta + other.theta),
        }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wrap_keeps_half_open_interval() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(dx in -50.0..50.0f64, dy in -50.0..50.0f64, th in -3.0..3.0f64) {
            let t = RegistrationTransform::rigid(dx, dy, th);
            for id in [t.then(&t.inverse()), t.inverse().then(&t)] {
                prop_assert!(id.dx.abs() < 1e-9 && id.dy.abs() < 1e-9 && id.theta.abs() < 1e-9);
            }
        }

        #[test]
        fn composition_matches_pointwise(a in -5.0..5.0f64, b in -5.0..5.0f64, th1 in -1.0..1.0f64,
                                          c in -5.0..5.0f64, d in -5.0..5.0f64, th2 in -1.0..1.0f64,
                                          x in 0.0..100.0f64, y in 0.0..80.0f64) {
            let t1 = RegistrationTransform::rigid(a, b, th1);
            let t2 = RegistrationTransform::rigid(c, d, th2);
            let center = RegistrationTransform::center(101, 81);
            let (x1, y1) = t1.apply(x, y, center);
            let direct = t2.apply(x1, y1, center);
            let composed = t1.then(&t2).apply(x, y, center);
            prop_assert!((direct.0 - composed.0).abs() < 1e-9 && (direct.1 - composed.1).abs() < 1e-9);
        }
    }
}
