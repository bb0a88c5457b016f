//! Characteristic kernel: angles, slopes, compatibility and decomposition
//! residual evaluators, and the Riemann-invariant direction fields.

use crate::field::{FlowField, Point};
use crate::gas::{FlowState, FreeStream, GasModel};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CharError {
    #[error("state (q = {q}, c = {c}) is not strictly supersonic")]
    NotSupersonic { q: f64, c: f64 },
    #[error("state is on or beyond the vacuum circle (q = {0})")]
    VacuumState(f64),
    #[error("field stencil of step {0} leaves the sampled domain")]
    InsufficientStencil(f64),
}

/// Characteristic family label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CharFamily {
    Plus,
    Minus,
}

/// Characteristic and velocity angles of a supersonic state.
///
/// `tan α = λ₊`, `tan β = λ₋`, `ω = (α−β)/2` is the Mach angle and
/// `τ = (α+β)/2` the velocity angle; `Ξ = m − tan²ω`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CharAngles {
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub tau: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub xi_const: f64,
    /// tan²ω = c²/(q²−c²), kept explicitly for the decomposition coefficients.
    pub tan2_omega: f64,
}

/// Angles from the velocity state. The angle form τ ± ω is used throughout;
/// it agrees with the rational slope formula away from u = c and stays
/// defined across that pole.
pub fn char_angles(s: FlowState, g: &GasModel) -> Result<CharAngles, CharError> {
    let q_sq = s.q_sq();
    let qb2 = g.qbar * g.qbar;
    if q_sq >= qb2 {
        return Err(CharError::VacuumState(q_sq.sqrt()));
    }
    let c_sq = g.sound_speed_sq(q_sq);
    if q_sq <= c_sq {
        return Err(CharError::NotSupersonic {
            q: q_sq.sqrt(),
            c: c_sq.sqrt(),
        });
    }
    let tau = s.v.atan2(s.u);
    let omega = (c_sq / q_sq).sqrt().min(1.0).asin();
    let alpha = tau + omega;
    let beta = tau - omega;
    let tan2_omega = c_sq / (q_sq - c_sq);
    Ok(CharAngles {
        alpha,
        beta,
        omega,
        tau,
        lambda_plus: alpha.tan(),
        lambda_minus: beta.tan(),
        xi_const: g.m_const - tan2_omega,
        tan2_omega,
    })
}

/// Trapezoidal compatibility residual `(u_b − u_a) + λ̄∓ (v_b − v_a)` along a
/// segment of the given characteristic family, with λ̄∓ the arithmetic mean
/// of the endpoint values.
pub fn compat_residual(
    a: FlowState,
    b: FlowState,
    family: CharFamily,
    g: &GasModel,
) -> Result<f64, CharError> {
    let ang_a = char_angles(a, g)?;
    let ang_b = char_angles(b, g)?;
    let lam = match family {
        CharFamily::Plus => 0.5 * (ang_a.lambda_minus + ang_b.lambda_minus),
        CharFamily::Minus => 0.5 * (ang_a.lambda_plus + ang_b.lambda_plus),
    };
    Ok((b.u - a.u) + lam * (b.v - a.v))
}

fn sound_speed_at(field: &dyn FlowField, p: Point, g: &GasModel) -> Option<f64> {
    let s = field.state_at(p)?;
    let c2 = g.sound_speed_sq(s.q_sq());
    if c2 < 0.0 {
        return None;
    }
    Some(c2.sqrt())
}

/// Residuals of the second-order characteristic decomposition of `c`,
/// evaluated by central differences of step `h`. The stencil steps along
/// straight rays (no curve following); the outer arms use the directions
/// frozen at `p`, while each sampled ∂̄±c uses the characteristic direction
/// of its own sample point, which keeps the difference quotient consistent
/// with the varying-direction operator. Returns `(r_plus, r_minus)`; both
/// vanish under refinement on exact solutions.
pub fn decomposition_residual(
    field: &dyn FlowField,
    p: Point,
    h: f64,
    g: &GasModel,
) -> Result<(f64, f64), CharError> {
    let s0 = field
        .state_at(p)
        .ok_or(CharError::InsufficientStencil(h))?;
    let ang = char_angles(s0, g)?;
    let ea = (ang.alpha.cos(), ang.alpha.sin());
    let eb = (ang.beta.cos(), ang.beta.sin());
    let c_at = |q: Point| sound_speed_at(field, q, g);
    let shift = |q: Point, d: (f64, f64), k: f64| Point::new(q.x + k * d.0, q.y + k * d.1);

    let dplus = |q: Point| -> Option<f64> {
        let sq = field.state_at(q)?;
        let aq = char_angles(sq, g).ok()?;
        let e = (aq.alpha.cos(), aq.alpha.sin());
        Some((c_at(shift(q, e, h))? - c_at(shift(q, e, -h))?) / (2.0 * h))
    };
    let dminus = |q: Point| -> Option<f64> {
        let sq = field.state_at(q)?;
        let aq = char_angles(sq, g).ok()?;
        let e = (aq.beta.cos(), aq.beta.sin());
        Some((c_at(shift(q, e, h))? - c_at(shift(q, e, -h))?) / (2.0 * h))
    };

    let stencil = || CharError::InsufficientStencil(h);
    let c0 = c_at(p).ok_or_else(stencil)?;
    let dp0 = dplus(p).ok_or_else(stencil)?;
    let dm0 = dminus(p).ok_or_else(stencil)?;
    let dmdp = (dplus(shift(p, eb, h)).ok_or_else(stencil)?
        - dplus(shift(p, eb, -h)).ok_or_else(stencil)?)
        / (2.0 * h);
    let dpdm = (dminus(shift(p, ea, h)).ok_or_else(stencil)?
        - dminus(shift(p, ea, -h)).ok_or_else(stencil)?)
        / (2.0 * h);

    let t2 = ang.tan2_omega;
    let nu = g.nu;
    let lam_coeff = (nu * (t2 - 1.0) * (t2 - 1.0) + 2.0 * t2) / (t2 + 1.0);
    let r_plus = c0 * dmdp - dp0 * (nu * (1.0 + t2) * dp0 + lam_coeff * dm0);
    let r_minus = c0 * dpdm - dm0 * (nu * (1.0 + t2) * dm0 + lam_coeff * dp0);
    Ok((r_plus, r_minus))
}

/// Inner products of the minus-family Riemann-invariant direction
/// `(sin α, −cos α)` with the constant-speed tangent, the inward normal, and
/// (when a free stream is supplied) the inward polar normal `(−G_u, −G_v)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RiemannChecks {
    /// Equals cos ω identically.
    pub dot_tangent: f64,
    /// Equals −sin ω identically.
    pub dot_inward: f64,
    pub dot_polar_normal: Option<f64>,
}

pub fn riemann_direction_checks(
    s: FlowState,
    fs: Option<&FreeStream>,
    g: &GasModel,
) -> Result<RiemannChecks, CharError> {
    let ang = char_angles(s, g)?;
    let dir = (ang.alpha.sin(), -ang.alpha.cos());
    let tangent = (ang.tau.sin(), -ang.tau.cos());
    let inward = (-ang.tau.cos(), -ang.tau.sin());
    let dot_tangent = dir.0 * tangent.0 + dir.1 * tangent.1;
    let dot_inward = dir.0 * inward.0 + dir.1 * inward.1;
    let dot_polar_normal = match fs {
        None => None,
        Some(fs) => {
            let res = crate::polar::polar_residual(s, fs, g)
                .map_err(|_| CharError::VacuumState(s.q()))?;
            Some(dir.0 * (-res.g_u) + dir.1 * (-res.g_v))
        }
    };
    Ok(RiemannChecks {
        dot_tangent,
        dot_inward,
        dot_polar_normal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::gas::freestream_from_epsilon;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gamma2() -> GasModel {
        GasModel::from_qbar(2.0, 1.0).unwrap()
    }

    /// Rational slope formula, used as an independent oracle for the angles.
    fn lambda_rational(s: FlowState, g: &GasModel) -> (f64, f64) {
        let q2 = s.q_sq();
        let c2 = g.sound_speed_sq(q2);
        let disc = (q2 - c2).sqrt() * c2.sqrt();
        let den = s.u * s.u - c2;
        (
            (s.u * s.v + disc) / den,
            (s.u * s.v - disc) / den,
        )
    }

    #[test]
    fn angle_chain_example() {
        let g = gamma2();
        let s = FlowState::new(0.8, 0.4);
        let ang = char_angles(s, &g).unwrap();
        assert_relative_eq!(ang.tau, 0.5f64.atan(), max_relative = 1e-15);
        let sin_w = (0.1f64 / 0.8).sqrt();
        assert_relative_eq!(ang.omega.sin(), sin_w, max_relative = 1e-13);
        assert_relative_eq!(ang.alpha, ang.tau + ang.omega, max_relative = 1e-15);
        let (lp, lm) = lambda_rational(s, &g);
        assert_relative_eq!(ang.lambda_plus, lp, max_relative = 1e-12);
        assert_relative_eq!(ang.lambda_minus, lm, max_relative = 1e-12);
    }

    #[test]
    fn symmetric_when_v_is_zero() {
        let g = gamma2();
        let ang = char_angles(FlowState::new(0.8, 0.0), &g).unwrap();
        assert_eq!(ang.tau, 0.0);
        assert_relative_eq!(ang.alpha, ang.omega, max_relative = 1e-15);
        assert_relative_eq!(ang.beta, -ang.omega, max_relative = 1e-15);
    }

    #[test]
    fn vacuum_limit_closes_the_fan() {
        let g = gamma2();
        let tau = 0.3f64;
        let mut prev_omega = f64::INFINITY;
        for &q in &[0.9, 0.99, 0.999, 0.99999] {
            let s = FlowState::new(q * tau.cos(), q * tau.sin());
            let ang = char_angles(s, &g).unwrap();
            assert!(ang.omega < prev_omega);
            prev_omega = ang.omega;
            assert_relative_eq!(ang.tau, tau, max_relative = 1e-12);
        }
        assert!(prev_omega < 5e-3);
        assert!(matches!(
            char_angles(FlowState::new(1.0, 0.0), &g),
            Err(CharError::VacuumState(_))
        ));
        assert!(matches!(
            char_angles(FlowState::new(0.3, 0.0), &g),
            Err(CharError::NotSupersonic { .. })
        ));
    }

    #[test]
    fn compat_residual_trivial_cases() {
        let g = gamma2();
        let a = FlowState::new(0.8, 0.4);
        assert_eq!(compat_residual(a, a, CharFamily::Plus, &g).unwrap(), 0.0);
        assert_eq!(compat_residual(a, a, CharFamily::Minus, &g).unwrap(), 0.0);
    }

    #[test]
    fn compat_residual_constructed_step() {
        let g = gamma2();
        let a = FlowState::new(0.8, 0.4);
        let dv = 1e-6;
        // construct b to satisfy the trapezoidal relation exactly by fixed point
        let mut b = a;
        for _ in 0..60 {
            let ang_a = char_angles(a, &g).unwrap();
            let ang_b = char_angles(b, &g).unwrap();
            let lam = 0.5 * (ang_a.lambda_minus + ang_b.lambda_minus);
            b = FlowState::new(a.u - lam * dv, a.v + dv);
        }
        let r = compat_residual(a, b, CharFamily::Plus, &g).unwrap();
        assert!(r.abs() < 1e-15, "residual {r}");
    }

    #[test]
    fn decomposition_residual_constant_field() {
        let g = gamma2();
        let field = FnField(|_p| Some(FlowState::new(0.8, 0.2)));
        let (rp, rm) =
            decomposition_residual(&field, Point::new(1.0, 1.0), 1e-3, &g).unwrap();
        assert_eq!(rp, 0.0);
        assert_eq!(rm, 0.0);
    }

    #[test]
    fn decomposition_residual_needs_domain() {
        let g = gamma2();
        let field = FnField(|p: Point| {
            if p.x >= 0.0 {
                Some(FlowState::new(0.8, 0.2))
            } else {
                None
            }
        });
        let r = decomposition_residual(&field, Point::new(1e-5, 0.0), 1.0, &g);
        assert!(matches!(r, Err(CharError::InsufficientStencil(_))));
    }

    #[test]
    fn riemann_direction_identities() {
        let g = gamma2();
        for &(u, v) in &[(0.8, 0.2), (0.7, 0.35), (0.92, 0.05)] {
            let s = FlowState::new(u, v);
            let ang = char_angles(s, &g).unwrap();
            let rc = riemann_direction_checks(s, None, &g).unwrap();
            assert_relative_eq!(rc.dot_tangent, ang.omega.cos(), max_relative = 1e-14);
            assert_relative_eq!(rc.dot_inward, -ang.omega.sin(), max_relative = 1e-14);
        }
    }

    #[test]
    fn riemann_polar_normal_positive_in_theorem_region() {
        let g = gamma2();
        let fs = freestream_from_epsilon(1e-3, &g).unwrap();
        let v = 0.1;
        let u = crate::polar::polar_u_root(v, &fs, &g).unwrap();
        let rc = riemann_direction_checks(FlowState::new(u, v), Some(&fs), &g).unwrap();
        assert!(rc.dot_polar_normal.unwrap() > 0.0);
    }

    proptest! {
        #[test]
        fn angle_identities_hold(u in 0.05f64..0.99, vfrac in 0.0f64..1.0) {
            let g = gamma2();
            let vmax = (1.0f64 - u * u).max(0.0).sqrt();
            let v = vfrac * vmax * 0.999;
            let s = FlowState::new(u, v);
            let q2 = s.q_sq();
            let c2 = g.sound_speed_sq(q2);
            prop_assume!(q2 > c2 * 1.0001 && q2 < 0.999);
            let ang = char_angles(s, &g).unwrap();
            prop_assert!((ang.omega - 0.5 * (ang.alpha - ang.beta)).abs() < 1e-12);
            prop_assert!((ang.tau - 0.5 * (ang.alpha + ang.beta)).abs() < 1e-12);
            prop_assert!((ang.omega.sin() - c2.sqrt() / q2.sqrt()).abs() < 1e-12);
            let (lp, lm) = lambda_rational(s, &g);
            if (s.u * s.u - c2).abs() > 1e-8 {
                prop_assert!((ang.lambda_plus - lp).abs() <= 1e-9 * (1.0 + lp.abs()));
                prop_assert!((ang.lambda_minus - lm).abs() <= 1e-9 * (1.0 + lm.abs()));
            }
        }

        #[test]
        fn compat_is_antisymmetric(du in -0.05f64..0.05, dv in -0.05f64..0.05) {
            let g = gamma2();
            let a = FlowState::new(0.8, 0.3);
            let b = FlowState::new(0.8 + du, 0.3 + dv);
            let r_ab = compat_residual(a, b, CharFamily::Plus, &g).unwrap();
            let r_ba = compat_residual(b, a, CharFamily::Plus, &g).unwrap();
            prop_assert!((r_ab + r_ba).abs() < 1e-15);
        }
    }
}
