//! Fixed-step classical Runge-Kutta integration.

use crate::grid::GridSpec;
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

pub const DEFAULT_STEP: f64 = 1e-3;

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    core::array::from_fn(|i| y[i] + a * k[i])
}

/// One classical RK4 step of size `h` for `y' = f(t, y)`.
pub fn rk4_step<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> Result<[f64; N]> {
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = f(t + h, &axpy(y, h, &k3))?;
    Ok(core::array::from_fn(|i| {
        y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

/// Integrates from `t0` to `t1` with the smallest number of equal steps not
/// exceeding `max_step`.
pub fn integrate<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    max_step: f64,
) -> Result<[f64; N]> {
    if !(max_step > 0.0) || !max_step.is_finite() {
        return Err(Error::InvalidStep(max_step));
    }
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let n = libm::ceil(libm::fabs(span) / max_step).max(1.0);
    if n > 1e9 {
        return Err(Error::InvalidStep(max_step));
    }
    let n = n as usize;
    let h = span / n as f64;
    let mut y = y0;
    for k in 0..n {
        y = rk4_step(&mut f, t0 + k as f64 * h, &y, h)?;
    }
    Ok(y)
}

/// Options for [`sweep`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    /// Parameter point carrying the initial value; defaults to the lower
    /// corner of the grid.
    pub anchor: Option<(f64, f64)>,
    pub max_step: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            anchor: None,
            max_step: DEFAULT_STEP,
        }
    }
}

/// Values at `nodes` (sorted ascending) of the flow started at `(t0, y0)`.
fn march<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    t0: f64,
    y0: [f64; N],
    nodes: impl Iterator<Item = f64> + Clone,
    max_step: f64,
) -> Result<Vec<[f64; N]>> {
    let all: Vec<f64> = nodes.collect();
    let mut out = alloc::vec![y0; all.len()];
    let split = all.partition_point(|&t| t < t0);
    let (mut t, mut y) = (t0, y0);
    for k in split..all.len() {
        y = integrate(&mut *f, t, all[k], y, max_step)?;
        t = all[k];
        out[k] = y;
    }
    let (mut t, mut y) = (t0, y0);
    for k in (0..split).rev() {
        y = integrate(&mut *f, t, all[k], y, max_step)?;
        t = all[k];
        out[k] = y;
    }
    Ok(out)
}

/// Integrates a two-parameter system on a grid: first `d/du` along the
/// anchor's `v`-line, then `d/dv` from there along every `u`-node.
/// Returns node values in row-major order (u outer, v inner).
pub fn sweep<const N: usize>(
    spec: &GridSpec,
    y0: [f64; N],
    options: SweepOptions,
    mut flow_u: impl FnMut(f64, f64, &[f64; N]) -> Result<[f64; N]>,
    mut flow_v: impl FnMut(f64, f64, &[f64; N]) -> Result<[f64; N]>,
) -> Result<Vec<[f64; N]>> {
    let (ua, va) = options.anchor.unwrap_or((spec.u.0, spec.v.0));
    if !spec.domain().contains(ua, va) {
        return Err(Error::Precondition(format!(
            "anchor ({ua}, {va}) lies outside the grid"
        )));
    }
    let line = march(
        &mut |u, y| flow_u(u, va, y),
        ua,
        y0,
        (0..spec.nu).map(|i| spec.u_at(i)),
        options.max_step,
    )?;
    let mut out = Vec::with_capacity(spec.len());
    for (i, start) in line.into_iter().enumerate() {
        let u = spec.u_at(i);
        out.extend(march(
            &mut |v, y| flow_v(u, v, y),
            va,
            start,
            (0..spec.nv).map(|j| spec.v_at(j)),
            options.max_step,
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let y = integrate(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, 1.0, [1.0], 1e-3).unwrap();
        assert!((y[0] - core::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let y = integrate(|_, y: &[f64; 2]| Ok([y[1], -y[0]]), 0.0, -2.0, [0.0, 1.0], 1e-3).unwrap();
        assert!((y[0] - libm::sin(-2.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_steps() {
        let f = |_: f64, y: &[f64; 1]| Ok(*y);
        assert!(matches!(integrate(f, 0.0, 1.0, [1.0], 0.0), Err(Error::InvalidStep(_))));
        assert!(matches!(
            integrate(f, 0.0, 1.0, [1.0], f64::NAN),
            Err(Error::InvalidStep(_))
        ));
    }

    #[test]
    fn sweep_reproduces_exact_flow() {
        // y = u + v^2 from the anchor value at (0.5, 0.0).
        let spec = GridSpec::new((0.0, 1.0), (-1.0, 1.0), 5, 9).unwrap();
        let opts = SweepOptions {
            anchor: Some((0.5, 0.0)),
            ..SweepOptions::default()
        };
        let out = sweep(&spec, [0.5], opts, |_, _, _| Ok([1.0]), |_, v, _| Ok([2.0 * v])).unwrap();
        for (k, (_, _, u, v)) in spec.nodes().enumerate() {
            assert!((out[k][0] - (u + v * v)).abs() < 1e-12);
        }
        let outside = SweepOptions {
            anchor: Some((2.0, 0.0)),
            ..opts
        };
        assert!(sweep(&spec, [0.0], outside, |_, _, _| Ok([1.0]), |_, _, _| Ok([1.0])).is_err());
    }
}
