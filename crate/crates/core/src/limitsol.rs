//! The zero-mass-flux limit solution along the wedge and its formal
//! derivative pair, used as the asymptotic reference for perturbation
//! diagnostics.

use crate::gas::GasModel;
use crate::wedge::WedgeProfile;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LimitError {
    #[error("limit solution is undefined for negative wall slope f' = {0}")]
    NegativeSlope(f64),
    #[error("limit state is subsonic at x = {0}; formal derivatives are undefined there")]
    NotSupersonic(f64),
    #[error("limit state sits on the vacuum circle (f' = 0); reflection data is undefined")]
    VacuumBoundary,
    #[error("formal-derivative system is singular: |1 - g0| = {0:e}")]
    SingularSystem(f64),
}

/// Limit flow state on the wall, with the reflection coefficient and (when
/// defined) the formal characteristic derivatives of the sound speed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LimitState {
    pub u_s: f64,
    pub v_s: f64,
    pub q_s: f64,
    pub c_s: f64,
    pub rho_s: f64,
    /// Reflection coefficient at zero mass flux; None on the vacuum boundary.
    pub g0: Option<f64>,
    pub supersonic: bool,
    pub dplus_c: Option<f64>,
    pub dminus_c: Option<f64>,
}

/// The limit state at abscissa `x`: the intersection of the limit polar
/// circle with the wall slip line, `(u_s, v_s) = q̄ (1, f') / (1 + f'²)`.
pub fn limit_state(w: &WedgeProfile, x: f64, g: &GasModel) -> Result<LimitState, LimitError> {
    let fp = w.fp(x);
    if fp < 0.0 {
        return Err(LimitError::NegativeSlope(fp));
    }
    let denom = 1.0 + fp * fp;
    let u_s = g.qbar / denom;
    let v_s = g.qbar * fp / denom;
    let q_s = g.qbar / denom.sqrt();
    let kappa = g.kappa_const;
    let c_s = (kappa * fp * fp / denom).sqrt() * g.qbar;
    let rho_s = g.density(q_s * q_s);
    let slope_bound_sq = 2.0 / (g.gamma - 1.0);
    let supersonic = fp * fp < slope_bound_sq;
    // sin w = sqrt(kappa) f' on the limit circle, sin tau = f'/sqrt(1+f'^2)
    let g0 = if fp == 0.0 || !supersonic {
        None
    } else {
        let tau = fp.atan();
        let omega = (kappa.sqrt() * fp).asin();
        Some((tau - omega).sin() / (tau + omega).sin())
    };
    let (dplus_c, dminus_c) = match g0 {
        Some(g0v) if (1.0 - g0v).abs() >= 1e-10 => {
            let dm = (g.gamma - 1.0) * q_s * w.curvature(x) / (1.0 - g0v);
            (Some(g0v * dm), Some(dm))
        }
        _ => (None, None),
    };
    Ok(LimitState {
        u_s,
        v_s,
        q_s,
        c_s,
        rho_s,
        g0,
        supersonic,
        dplus_c,
        dminus_c,
    })
}

/// The formal derivative pair (∂̸⁺c, ∂̸⁻c): the solution of
/// ∂̸⁺c = g0 ∂̸⁻c and ∂̸⁻c − ∂̸⁺c = (γ−1) q_s κ_w.
pub fn formal_derivatives(
    w: &WedgeProfile,
    x: f64,
    g: &GasModel,
) -> Result<(f64, f64), LimitError> {
    let st = limit_state(w, x, g)?;
    if !st.supersonic {
        return Err(LimitError::NotSupersonic(x));
    }
    let g0 = st.g0.ok_or(LimitError::VacuumBoundary)?;
    if (1.0 - g0).abs() < 1e-10 {
        return Err(LimitError::SingularSystem((1.0 - g0).abs()));
    }
    let dminus = (g.gamma - 1.0) * st.q_s * w.curvature(x) / (1.0 - g0);
    Ok((g0 * dminus, dminus))
}
