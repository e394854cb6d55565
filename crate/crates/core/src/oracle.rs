//! Finite-difference evaluation of the Christoffel symbols straight from their
//! definition, using only the coordinate maps `x ↦ x̂` and `x̂ ↦ x`:
//!
//! ```text
//! first form:   Γ^i_{jk} =  ∂²x̂^m/∂x^j∂x^k · ∂x^i/∂x̂^m
//! second form:  Γ^i_{jk} = −∂²x^i/∂x̂^m∂x̂^l · ∂x̂^m/∂x^j · ∂x̂^l/∂x^k
//! ```
//!
//! Their agreement is the differentiated inverse-Jacobian identity
//! `J(x̂(x)) Ĵ(x) = I`.

use crate::error::Result;
use crate::fd::{self, FD_STEP, SECOND_DERIVATIVE_STEP};
use crate::linalg::Mat4;
use crate::motion::{Christoffel, Motion, SpacetimePoint};

pub type Gamma = [[[f64; 4]; 4]; 4];

#[derive(Clone, Copy, Debug)]
pub struct OracleSteps {
    pub first: f64,
    pub second: f64,
}

impl Default for OracleSteps {
    fn default() -> Self {
        OracleSteps { first: FD_STEP, second: SECOND_DERIVATIVE_STEP }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ChristoffelEstimate {
    pub first_form: Gamma,
    pub second_form: Gamma,
}

impl ChristoffelEstimate {
    /// Largest deviation of either form from the analytic symbols.
    pub fn max_abs_err(&self, analytic: &Christoffel) -> f64 {
        let a = analytic.to_array();
        max_diff(&self.first_form, &a).max(max_diff(&self.second_form, &a))
    }

    /// Largest gap between the two forms.
    pub fn form_disagreement(&self) -> f64 {
        max_diff(&self.first_form, &self.second_form)
    }
}

pub fn max_diff(a: &Gamma, b: &Gamma) -> f64 {
    a.iter().flatten().flatten().zip(b.iter().flatten().flatten()).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

/// `∂x̂^i/∂x^j` by central differences of the forward map.
pub fn fd_jacobian_hat(m: &Motion, p: SpacetimePoint, step: f64) -> Mat4 {
    Mat4(fd::jacobian(|q| m.transform_point(q).to_array(), p, step))
}

/// `∂x^i/∂x̂^j` by central differences of the inverse map.
pub fn fd_jacobian_inverse(m: &Motion, p_hat: SpacetimePoint, step: f64) -> Result<Mat4> {
    m.inverse_transform_point(p_hat)?;
    Ok(Mat4(fd::jacobian(|q| inverse_or_nan(m, q), p_hat, step)))
}

fn inverse_or_nan(m: &Motion, q: SpacetimePoint) -> [f64; 4] {
    m.inverse_transform_point(q).map(|x| x.to_array()).unwrap_or([f64::NAN; 4])
}

/// Both forms of the Christoffel symbols at the observer point `p`.
pub fn christoffel_fd(m: &Motion, p: SpacetimePoint, steps: OracleSteps) -> Result<ChristoffelEstimate> {
    let p_hat = m.transform_point(p);
    let j_hat = fd_jacobian_hat(m, p, steps.first).0;
    let j_inv = fd_jacobian_inverse(m, p_hat, steps.first)?.0;
    let h_fwd = fd::hessian(|q| m.transform_point(q).to_array(), p, steps.second);
    let h_inv = fd::hessian(|q| inverse_or_nan(m, q), p_hat, steps.second);

    let mut first_form = [[[0.0; 4]; 4]; 4];
    let mut second_form = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let mut a = 0.0;
                let mut b = 0.0;
                for mm in 0..4 {
                    a += h_fwd[mm][j][k] * j_inv[i][mm];
                    for l in 0..4 {
                        b -= h_inv[i][mm][l] * j_hat[mm][j] * j_hat[l][k];
                    }
                }
                first_form[i][j][k] = a;
                second_form[i][j][k] = b;
            }
        }
    }
    Ok(ChristoffelEstimate { first_form, second_form })
}
