//! Implicit differentiation of `y*(x) = argmin_y f(x, y)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Hessians with a larger condition estimate are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Second-order information at an optimum.
#[derive(Clone, Debug)]
pub struct ArgminDerivativeInputs {
    /// `∇²_yy f`, symmetric.
    pub hessian: DMatrix<f64>,
    /// `∇_x ∇_y f`, with rows indexed by `y`.
    pub mixed: DMatrix<f64>,
    /// Linear constraint `A·y = b` active at the optimum.
    pub constraint: Option<DMatrix<f64>>,
}

/// Ratio of extreme singular values; infinite for singular matrices.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn checked_inverse(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let condition = condition_number(m);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let inv = m.clone().lu().try_inverse().ok_or(Error::IllConditioned { condition })?;
    Ok((inv, condition))
}

fn check_shapes(inp: &ArgminDerivativeInputs) -> Result<()> {
    let n = inp.hessian.nrows();
    if inp.hessian.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: inp.hessian.ncols() });
    }
    if inp.mixed.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: inp.mixed.nrows() });
    }
    if let Some(a) = &inp.constraint {
        if a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
        }
    }
    Ok(())
}

/// `−H⁻¹·∇_x∇_y f`.
pub fn argmin_jacobian_unconstrained(inp: &ArgminDerivativeInputs) -> Result<DMatrix<f64>> {
    check_shapes(inp)?;
    let (hinv, _) = checked_inverse(&inp.hessian)?;
    Ok(-(hinv * &inp.mixed))
}

/// `(H⁻¹Aᵀ(AH⁻¹Aᵀ)⁻¹AH⁻¹ − H⁻¹)·∇_x∇_y f`.
pub fn argmin_jacobian_constrained(inp: &ArgminDerivativeInputs) -> Result<DMatrix<f64>> {
    check_shapes(inp)?;
    let a = inp
        .constraint
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("constrained Jacobian needs a constraint matrix".into()))?;
    let parts = ConstrainedSolve::new(&inp.hessian, a)?;
    Ok(&parts.projector * &inp.mixed)
}

/// Factorized pieces of the equality-constrained sensitivity system.
pub(crate) struct ConstrainedSolve {
    /// `H⁻¹Aᵀ(AH⁻¹Aᵀ)⁻¹AH⁻¹ − H⁻¹`.
    pub projector: DMatrix<f64>,
    /// `H⁻¹Aᵀ(AH⁻¹Aᵀ)⁻¹`, the response to a change of the constraint value.
    pub lift: DMatrix<f64>,
    pub condition: f64,
}

impl ConstrainedSolve {
    pub fn new(h: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<Self> {
        let (hinv, condition) = checked_inverse(h)?;
        let hinv_at = &hinv * a.transpose();
        let (schur_inv, _) = checked_inverse(&(a * &hinv_at))?;
        let lift = &hinv_at * schur_inv;
        let projector = &lift * a * &hinv - &hinv;
        Ok(ConstrainedSolve { projector, lift, condition })
    }

    /// Sensitivity `dy` for a gradient perturbation `m` and constraint change `r`.
    pub fn respond(&self, m: &DVector<f64>, r: &DVector<f64>) -> DVector<f64> {
        &self.projector * m + &self.lift * r
    }
}
