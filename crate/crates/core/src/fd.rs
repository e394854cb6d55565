//! Central finite differences over spacetime points.
//!
//! These back the finite-difference partials of derived fields and the
//! independent Christoffel oracle; the analytic code paths never call them.

use crate::motion::SpacetimePoint;

/// Default step for first derivatives.
pub const FD_STEP: f64 = 1e-5;

/// Default base step for Richardson-extrapolated second derivatives.
///
/// A second difference at step `h` carries a rounding error of about
/// `ε|f|/h²`; at `h = 1e-5` that is already `1e-6`, so the base step is larger
/// and the truncation error is removed by one Richardson level instead.
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-3;

/// `∂f/∂x^j` for a scalar function, `j = 0..4`.
pub fn gradient<F>(f: F, p: SpacetimePoint, h: f64) -> [f64; 4]
where
    F: Fn(SpacetimePoint) -> f64,
{
    core::array::from_fn(|j| (f(p.shifted(j, h)) - f(p.shifted(j, -h))) / (2.0 * h))
}

/// `∂f^i/∂x^j` with row `i` the component and column `j` the derivative index.
pub fn jacobian<const N: usize, F>(f: F, p: SpacetimePoint, h: f64) -> [[f64; 4]; N]
where
    F: Fn(SpacetimePoint) -> [f64; N],
{
    let mut out = [[0.0; 4]; N];
    for j in 0..4 {
        let fp = f(p.shifted(j, h));
        let fm = f(p.shifted(j, -h));
        for i in 0..N {
            out[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    out
}

fn second_difference<const N: usize, F>(f: &F, p: SpacetimePoint, h: f64) -> [[[f64; 4]; 4]; N]
where
    F: Fn(SpacetimePoint) -> [f64; N],
{
    let mut out = [[[0.0; 4]; 4]; N];
    let f0 = f(p);
    for j in 0..4 {
        let fp = f(p.shifted(j, h));
        let fm = f(p.shifted(j, -h));
        for i in 0..N {
            out[i][j][j] = (fp[i] - 2.0 * f0[i] + fm[i]) / (h * h);
        }
        for k in (j + 1)..4 {
            let pp = f(p.shifted(j, h).shifted(k, h));
            let pm = f(p.shifted(j, h).shifted(k, -h));
            let mp = f(p.shifted(j, -h).shifted(k, h));
            let mm = f(p.shifted(j, -h).shifted(k, -h));
            for i in 0..N {
                let d = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
                out[i][j][k] = d;
                out[i][k][j] = d;
            }
        }
    }
    out
}

/// `∂²f^i/∂x^j∂x^k` by central differences at steps `h` and `h/2`, combined
/// with one level of Richardson extrapolation.
pub fn hessian<const N: usize, F>(f: F, p: SpacetimePoint, h: f64) -> [[[f64; 4]; 4]; N]
where
    F: Fn(SpacetimePoint) -> [f64; N],
{
    let coarse = second_difference(&f, p, h);
    let fine = second_difference(&f, p, 0.5 * h);
    let mut out = [[[0.0; 4]; 4]; N];
    for i in 0..N {
        for j in 0..4 {
            for k in 0..4 {
                out[i][j][k] = (4.0 * fine[i][j][k] - coarse[i][j][k]) / 3.0;
            }
        }
    }
    out
}
