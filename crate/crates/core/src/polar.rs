//! Shock polar algebra: the residual G and its gradient, shock angle,
//! polar tangent angle, reflection coefficient, the t± weights, the H/J
//! inner products and root finding on the polar.

use crate::charkern::{char_angles, CharError};
use crate::gas::{FlowState, FreeStream, GasModel, GasError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolarError {
    #[error(transparent)]
    Gas(#[from] GasError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("no attached supersonic shock exists on this ray (theta = {0})")]
    DetachedShock(f64),
    #[error("only subsonic roots remain on this ray (theta = {0})")]
    NotSupersonic(f64),
    #[error("state is not on the shock polar (|G| = {0:e})")]
    NotOnPolar(f64),
    #[error("zero-strength shock: angle is 0/0 at the freestream state")]
    DegenerateShock,
    #[error("no polar root for the given coordinate {0}")]
    NoPolarRoot(f64),
}

/// G and its analytic derivatives at a state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PolarResidual {
    pub g: f64,
    pub g_u: f64,
    pub g_v: f64,
    pub g_eps: f64,
}

/// One traced polar point with the attached shock quantities. Values that
/// are genuinely undefined at the zero-strength corner are NaN.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PolarPoint {
    pub state: FlowState,
    pub epsilon: f64,
    pub g_value: f64,
    pub g_u: f64,
    pub g_v: f64,
    pub g_eps: f64,
    pub s_angle: f64,
    pub k_angle: f64,
    pub g_refl: f64,
    pub t_plus: f64,
    pub t_minus: f64,
    pub h_inner: f64,
    pub j_inner: f64,
}

/// Reflection coefficient and the shock-derivative weights.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReflectionCoeff {
    pub g_value: f64,
    pub t_plus: f64,
    pub t_minus: f64,
    pub k_angle: f64,
}

/// G(U, ε) = (u − ε/ρ)(u − ū(ε)) + v² with its analytic gradient; the ε
/// derivative follows the sign convention that is negative on the physical
/// branch (entropy-satisfying, supersonic incoming flow).
pub fn polar_residual(
    s: FlowState,
    fs: &FreeStream,
    g: &GasModel,
) -> Result<PolarResidual, PolarError> {
    let q_sq = s.q_sq();
    let qb2 = g.qbar * g.qbar;
    let eps = fs.epsilon;
    if eps == 0.0 {
        // limit polar: a circle through the origin
        let ub = fs.u_inf;
        let slope = crate::gas::epsilon_slope(fs.u_inf, g);
        let ubar_prime = if slope == 0.0 {
            f64::NEG_INFINITY
        } else {
            1.0 / slope
        };
        let rho = g.density(q_sq.min(qb2));
        let g_eps = if rho == 0.0 {
            f64::NEG_INFINITY
        } else {
            -(ub - s.u) / rho - ubar_prime * (0.0 - s.u)
        };
        return Ok(PolarResidual {
            g: s.u * (s.u - ub) + s.v * s.v,
            g_u: 2.0 * s.u - ub,
            g_v: 2.0 * s.v,
            g_eps,
        });
    }
    if q_sq >= qb2 {
        return Err(GasError::SpeedExceedsLimit {
            q: q_sq.sqrt(),
            qbar: g.qbar,
        }
        .into());
    }
    let rho = g.density(q_sq);
    let c2 = g.sound_speed_sq(q_sq);
    let ub = fs.u_inf;
    let gval = (s.u - eps / rho) * (s.u - ub) + s.v * s.v;
    // rho_u = -rho u / c^2, rho_v = -rho v / c^2
    let g_u = (1.0 - eps * s.u / (rho * c2)) * (s.u - ub) + (s.u - eps / rho);
    let g_v = -(eps * s.v / (rho * c2)) * (s.u - ub) + 2.0 * s.v;
    let slope = crate::gas::epsilon_slope(ub, g);
    let ubar_prime = if slope == 0.0 {
        f64::NEG_INFINITY
    } else {
        1.0 / slope
    };
    let g_eps = -(ub - s.u) / rho - ubar_prime * (eps / rho - s.u);
    Ok(PolarResidual {
        g: gval,
        g_u,
        g_v,
        g_eps,
    })
}

fn g_only(u: f64, v: f64, fs: &FreeStream, g: &GasModel) -> f64 {
    let q_sq = u * u + v * v;
    if fs.epsilon == 0.0 {
        return u * (u - fs.u_inf) + v * v;
    }
    if q_sq >= g.qbar * g.qbar {
        // vacuum-circle limit of the mass-flux factor on the entropy side
        return f64::INFINITY;
    }
    let rho = g.density(q_sq);
    (u - fs.epsilon / rho) * (u - fs.u_inf) + v * v
}

/// Largest-u supersonic, entropy-satisfying root of G along the ray
/// v = u tan θ (the weak attached-shock state). Near-vacuum branches where
/// the mass-flux factor changes sign are rejected by the entropy screen.
pub fn downstream_from_ray(
    theta: f64,
    fs: &FreeStream,
    g: &GasModel,
) -> Result<FlowState, PolarError> {
    if theta == 0.0 {
        return Ok(FlowState::new(fs.u_inf, 0.0));
    }
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(PolarError::DetachedShock(theta));
    }
    let t = theta.tan();
    let sec2 = 1.0 + t * t;
    let u_hi = g.qbar / sec2.sqrt() * (1.0 - 1e-12);
    let u_lo = 1e-3 * g.qbar;
    let n = 8000;
    let h = |u: f64| g_only(u, u * t, fs, g);
    let mut prev_u = u_hi;
    let mut prev_h = h(prev_u);
    let mut saw_subsonic_root = false;
    for i in 1..=n {
        let u = u_hi + (u_lo - u_hi) * (i as f64) / (n as f64);
        let hu = h(u);
        if hu == 0.0 || (hu > 0.0) != (prev_h > 0.0) {
            // bracketed a root: bisect then polish
            let (mut lo, mut hi) = (u, prev_u);
            let mut f_lo = hu;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = h(mid);
                if (fm > 0.0) == (f_lo > 0.0) {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
            let mut ur = 0.5 * (lo + hi);
            for _ in 0..2 {
                let s = FlowState::new(ur, ur * t);
                if s.q_sq() >= g.qbar * g.qbar {
                    break;
                }
                let res = polar_residual(s, fs, g)?;
                let dh = res.g_u + res.g_v * t;
                if dh.abs() > 1e-300 {
                    let next = ur - res.g / dh;
                    if next > lo - (hi - lo) && next < hi + (hi - lo) {
                        ur = next;
                    }
                }
            }
            let state = FlowState::new(ur, ur * t);
            let q_sq = state.q_sq();
            let entropy_ok = q_sq < fs.u_inf * fs.u_inf * (1.0 + 1e-12);
            let supersonic = q_sq > g.sound_speed_sq(q_sq);
            if entropy_ok && supersonic {
                return Ok(state);
            }
            if entropy_ok && !supersonic {
                saw_subsonic_root = true;
            }
        }
        prev_u = u;
        prev_h = hu;
    }
    if saw_subsonic_root {
        Err(PolarError::NotSupersonic(theta))
    } else {
        Err(PolarError::DetachedShock(theta))
    }
}

/// Shock angle s = arctan(ρv / (ρu − ε)), branch (0, π/2) on physical
/// states. Errors at the zero-strength point where both components vanish.
pub fn shock_angle(s: FlowState, fs: &FreeStream, g: &GasModel) -> Result<f64, PolarError> {
    let q_sq = s.q_sq();
    let qb2 = g.qbar * g.qbar;
    if q_sq > qb2 {
        return Err(GasError::SpeedExceedsLimit {
            q: q_sq.sqrt(),
            qbar: g.qbar,
        }
        .into());
    }
    let rho = g.density(q_sq.min(qb2));
    let num = rho * s.v;
    let den = rho * s.u - fs.epsilon;
    let scale = (fs.epsilon + rho * g.qbar).max(1e-300);
    if num.abs() < 1e-13 * scale && den.abs() < 1e-13 * scale {
        return Err(PolarError::DegenerateShock);
    }
    Ok(num.atan2(den))
}

const ON_POLAR_TOL: f64 = 1e-9;

/// Reflection coefficient g, the shock-derivative weights t± and the polar
/// tangent angle k at a state on the polar.
pub fn reflection_coeff_g(
    s: FlowState,
    fs: &FreeStream,
    g: &GasModel,
) -> Result<ReflectionCoeff, PolarError> {
    let res = polar_residual(s, fs, g)?;
    if res.g.abs() > ON_POLAR_TOL {
        return Err(PolarError::NotOnPolar(res.g.abs()));
    }
    let ang = char_angles(s, g)?;
    let sang = shock_angle(s, fs, g)?;
    let k = (-res.g_u).atan2(res.g_v);
    let den = (ang.beta - ang.alpha).sin();
    if den.abs() < 1e-300 {
        return Err(PolarError::DegenerateShock);
    }
    let t_plus = (ang.beta - sang).sin() / den;
    let t_minus = (sang - ang.alpha).sin() / den;
    let g_den = (ang.beta - sang).sin() * (k - ang.beta).cos();
    let g_num = (sang - ang.alpha).sin() * (k - ang.alpha).cos();
    if g_den.abs() < 1e-300 {
        return Err(PolarError::DegenerateShock);
    }
    Ok(ReflectionCoeff {
        g_value: g_num / g_den,
        t_plus,
        t_minus,
        k_angle: k,
    })
}

/// H and J: inner products of the Riemann-invariant directions with the
/// inward polar normal (−G_u, −G_v).
pub fn inner_products_hj(
    s: FlowState,
    fs: &FreeStream,
    g: &GasModel,
) -> Result<(f64, f64), PolarError> {
    let res = polar_residual(s, fs, g)?;
    if res.g.abs() > ON_POLAR_TOL {
        return Err(PolarError::NotOnPolar(res.g.abs()));
    }
    let ang = char_angles(s, g)?;
    let h = ang.alpha.sin() * (-res.g_u) + (-ang.alpha.cos()) * (-res.g_v);
    let j = ang.beta.sin() * (-res.g_u) + (-ang.beta.cos()) * (-res.g_v);
    Ok((h, j))
}

/// The positive-v polar root at fixed u; unique because G is strictly
/// increasing in v > 0.
pub fn polar_v_root(u: f64, fs: &FreeStream, g: &GasModel) -> Result<f64, PolarError> {
    if g_only(u, 0.0, fs, g) >= 0.0 {
        return Err(PolarError::NoPolarRoot(u));
    }
    let mut lo = 0.0f64;
    let mut hi = ((g.qbar * g.qbar - u * u).max(0.0)).sqrt() * (1.0 - 1e-12);
    if g_only(u, hi, fs, g) <= 0.0 {
        return Err(PolarError::NoPolarRoot(u));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g_only(u, mid, fs, g) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The weak-branch root in u at fixed v > 0 (largest u below ū with G = 0).
pub fn polar_u_root(v: f64, fs: &FreeStream, g: &GasModel) -> Result<f64, PolarError> {
    let u_vac = ((g.qbar * g.qbar - v * v).max(0.0)).sqrt() * (1.0 - 1e-12);
    let ub = fs.u_inf.min(u_vac);
    let n = 4000;
    let mut prev_u = ub;
    let mut prev_h = g_only(prev_u, v, fs, g);
    for i in 1..=n {
        let u = ub * (1.0 - 0.999 * (i as f64) / (n as f64));
        let hu = g_only(u, v, fs, g);
        if hu == 0.0 || (hu > 0.0) != (prev_h > 0.0) {
            let (mut lo, mut hi) = (u, prev_u);
            let mut f_lo = hu;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = g_only(mid, v, fs, g);
                if (fm > 0.0) == (f_lo > 0.0) {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev_u = u;
        prev_h = hu;
    }
    Err(PolarError::NoPolarRoot(v))
}

/// Sweeps the physical branch from the zero-strength state (ū, 0) up to the
/// v-turning point of the polar, with n points monotone in v. Quantities
/// that have no value at the zero-strength corner are NaN there.
pub fn polar_trace(
    fs: &FreeStream,
    g: &GasModel,
    n: usize,
) -> Result<Vec<PolarPoint>, PolarError> {
    assert!(n >= 2, "trace needs at least two points");
    let ub = fs.u_inf;
    // locate the v-maximum of the polar graph v(u) by golden-section search
    let v_of = |u: f64| polar_v_root(u, fs, g).unwrap_or(0.0);
    let mut lo = 0.30 * ub;
    let mut hi = ub * (1.0 - 1e-9);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = v_of(x1);
    let mut f2 = v_of(x2);
    for _ in 0..200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = v_of(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = v_of(x1);
        }
    }
    let u_vmax = 0.5 * (lo + hi);
    let v_max = v_of(u_vmax) * (1.0 - 1e-9);

    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let v_j = v_max * (j as f64) / ((n - 1) as f64);
        let state = if j == 0 {
            FlowState::new(ub, 0.0)
        } else {
            // bisect in u on [u_vmax, ub]: G < 0 at u_vmax (v_j below the
            // turning value), G = v_j^2 > 0 at ub
            let (mut ulo, mut uhi) = (u_vmax, ub);
            for _ in 0..200 {
                let mid = 0.5 * (ulo + uhi);
                if g_only(mid, v_j, fs, g) < 0.0 {
                    ulo = mid;
                } else {
                    uhi = mid;
                }
            }
            FlowState::new(0.5 * (ulo + uhi), v_j)
        };
        let res = polar_residual(state, fs, g)?;
        let grad_scale = res.g_u.hypot(res.g_v);
        let k = if grad_scale < 1e-12 {
            f64::NAN
        } else {
            (-res.g_u).atan2(res.g_v)
        };
        let (s_angle, g_refl, t_plus, t_minus, h_inner, j_inner) = if j == 0 {
            let (h, jj) = match char_angles(state, g) {
                Ok(ang) => (
                    ang.alpha.sin() * (-res.g_u) + (-ang.alpha.cos()) * (-res.g_v),
                    ang.beta.sin() * (-res.g_u) + (-ang.beta.cos()) * (-res.g_v),
                ),
                Err(_) => (f64::NAN, f64::NAN),
            };
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN, h, jj)
        } else {
            let refl = reflection_coeff_g(state, fs, g)?;
            let sang = shock_angle(state, fs, g)?;
            let (h, jj) = inner_products_hj(state, fs, g)?;
            (sang, refl.g_value, refl.t_plus, refl.t_minus, h, jj)
        };
        out.push(PolarPoint {
            state,
            epsilon: fs.epsilon,
            g_value: res.g,
            g_u: res.g_u,
            g_v: res.g_v,
            g_eps: res.g_eps,
            s_angle,
            k_angle: k,
            g_refl,
            t_plus,
            t_minus,
            h_inner,
            j_inner,
        });
    }
    Ok(out)
}
