//! Finite-difference stencils.
//!
//! Two families are provided: plain second-order central differences, used
//! by the ambient oracles with a tiny step, and fourth-order stencils used
//! along surfaces where the step is tied to the parametrization (and, for
//! sampled grids, to the node spacing).

use crate::Result;

/// Values that can be linearly combined by a stencil.
pub trait Linear: Copy {
    fn zero() -> Self;
    /// `self + a * x`
    fn axpy(self, a: f64, x: Self) -> Self;
}

impl Linear for f64 {
    fn zero() -> Self {
        0.0
    }
    fn axpy(self, a: f64, x: Self) -> Self {
        self + a * x
    }
}

impl<const N: usize> Linear for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn axpy(mut self, a: f64, x: Self) -> Self {
        for (s, xi) in self.iter_mut().zip(x) {
            *s += a * xi;
        }
        self
    }
}

fn combine<T: Linear>(mut f: impl FnMut(f64) -> Result<T>, offsets: &[(f64, f64)], h: f64, scale: f64) -> Result<T> {
    let mut acc = T::zero();
    for &(k, w) in offsets {
        acc = acc.axpy(w, f(k * h)?);
    }
    Ok(T::zero().axpy(1.0 / scale, acc))
}

/// `(f(h) - f(-h)) / 2h`, with `f` taking the offset.
pub fn central2<T: Linear>(f: impl FnMut(f64) -> Result<T>, h: f64) -> Result<T> {
    combine(f, &[(1.0, 1.0), (-1.0, -1.0)], h, 2.0 * h)
}

/// Fourth-order first derivative.
pub fn central4<T: Linear>(f: impl FnMut(f64) -> Result<T>, h: f64) -> Result<T> {
    combine(f, &[(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)], h, 12.0 * h)
}

/// Fourth-order second derivative.
pub fn second4<T: Linear>(f: impl FnMut(f64) -> Result<T>, h: f64) -> Result<T> {
    combine(
        f,
        &[(2.0, -1.0), (1.0, 16.0), (0.0, -30.0), (-1.0, 16.0), (-2.0, -1.0)],
        h,
        12.0 * h * h,
    )
}

/// Weights of [`central4`] indexed by node offset `-2..=2`.
pub const CENTRAL4_WEIGHTS: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
/// Weights of [`second4`] indexed by node offset `-2..=2`.
pub const SECOND4_WEIGHTS: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];

#[cfg(test)]
mod tests {
    use super::*;
    use libm::{cos, exp, sin};

    #[test]
    fn stencils_on_smooth_functions() {
        let x = 0.7;
        let d = central2(|t| Ok(sin(x + t)), 1e-5).unwrap();
        assert!((d - cos(x)).abs() < 1e-10);
        let d = central4(|t| Ok(exp(x + t)), 1e-3).unwrap();
        assert!((d - exp(x)).abs() < 1e-11);
        let d = second4(|t| Ok(sin(x + t)), 1e-3).unwrap();
        assert!((d + sin(x)).abs() < 1e-8);
    }

    #[test]
    fn stencils_are_exact_on_low_degree_polynomials() {
        let p = |t: f64| 3.0 - 2.0 * t + 0.5 * t * t * t * t;
        let d = central4(|t| Ok([p(t), 2.0 * p(t)]), 0.1).unwrap();
        assert!((d[0] + 2.0).abs() < 1e-12 && (d[1] + 4.0).abs() < 1e-12);
        let d2 = second4(|t| Ok(p(t) - 0.5 * t * t * t * t + t * t), 0.1).unwrap();
        assert!((d2 - 2.0).abs() < 1e-12);
    }
}
