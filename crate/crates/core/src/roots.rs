//! Deterministic bracketing root finder.

use crate::error::{Error, Result};

/// Bisection settings. The iteration is deterministic: identical inputs give
/// bit-identical roots.
#[derive(Debug, Clone, Copy)]
pub struct Bisection {
    pub max_iter: usize,
    /// Residual bound the returned root must satisfy.
    pub f_tol: f64,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection {
            max_iter: 200,
            f_tol: 1e-10,
        }
    }
}

impl Bisection {
    /// Finds a root of `f` in `[lo, hi]`, requiring a sign change between the
    /// endpoints. Bisects until the residual vanishes, the bracket can no
    /// longer shrink in floating point, or `max_iter` is reached; the returned
    /// point must then satisfy `|f| <= f_tol`.
    pub fn solve<F>(&self, mut f: F, lo: f64, hi: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let (mut a, mut b) = (lo, hi);
        let fa0 = f(a)?;
        let fb0 = f(b)?;
        if fa0 == 0.0 {
            return Ok(a);
        }
        if fb0 == 0.0 {
            return Ok(b);
        }
        if fa0.signum() == fb0.signum() || fa0.is_nan() || fb0.is_nan() {
            return Err(Error::NoSignChange {
                lo,
                hi,
                f_lo: fa0,
                f_hi: fb0,
            });
        }
        let mut fa = fa0;
        let mut best = (a, fa0.abs());
        if fb0.abs() < best.1 {
            best = (b, fb0.abs());
        }
        for _ in 0..self.max_iter {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = f(m)?;
            if fm.abs() < best.1 {
                best = (m, fm.abs());
            }
            if fm == 0.0 {
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        if best.1 <= self.f_tol {
            Ok(best.0)
        } else {
            Err(Error::RootTolerance {
                x: best.0,
                residual: best.1,
                tol: self.f_tol,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = Bisection::default()
            .solve(|x| Ok(x * x - 2.0), 0.0, 2.0)
            .unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn decreasing_function() {
        let r = Bisection::default()
            .solve(|x| Ok(0.3 - x), 0.0, 1.0)
            .unwrap();
        assert!((r - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_missing_bracket() {
        let e = Bisection::default().solve(|x| Ok(x * x + 1.0), -1.0, 1.0);
        assert!(matches!(e, Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn endpoint_root() {
        assert_eq!(Bisection::default().solve(Ok, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| Ok(x.cos() - x);
        let a = Bisection::default().solve(f, 0.0, 1.0).unwrap();
        let b = Bisection::default().solve(f, 0.0, 1.0).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn discontinuity_reports_residual() {
        let e = Bisection::default().solve(|x| Ok(if x < 0.5 { -1.0 } else { 1.0 }), 0.0, 1.0);
        assert!(matches!(e, Err(Error::RootTolerance { .. })));
    }
}
