//! Polytropic-gas closures.
//!
//! Everything here is a pure function of a [`GasModel`] and a velocity pair.
//! Density, sound speed and pressure follow from the Bernoulli law
//! `q²/2 + c²/(γ−1) = B = q̄²/2`, with `p = Aρ^γ` and `c² = Aγρ^{γ−1}`
//! kept mutually consistent.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GasError {
    #[error("adiabatic index must lie in (1, 3), got {0}")]
    BadGamma(f64),
    #[error("Bernoulli constant must be positive, got {0}")]
    BadBernoulli(f64),
    #[error("pressure constant must be positive, got {0}")]
    BadPressureConst(f64),
    #[error("speed {q} exceeds the limit speed {qbar}")]
    SpeedExceedsLimit { q: f64, qbar: f64 },
    #[error("u = {0} is not on the supersonic branch (must exceed the critical speed {1})")]
    OutOfSupersonicBranch(f64, f64),
    #[error("mass flux {eps} admits no supersonic incoming state (max {max})")]
    EpsilonTooLarge { eps: f64, max: f64 },
}

/// Gas constants for a fixed adiabatic index and Bernoulli constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasModel {
    /// Adiabatic index γ ∈ (1, 3).
    pub gamma: f64,
    /// A in p = Aρ^γ.
    pub pressure_const: f64,
    /// Bernoulli constant B (speed squared units).
    pub bernoulli: f64,
    /// Limit speed q̄ = √(2B).
    pub qbar: f64,
    /// ν = (γ+1) / (2(γ−1)).
    pub nu: f64,
    /// m = (3−γ) / (γ+1).
    pub m_const: f64,
    /// κ = (γ−1) / 2.
    pub kappa_const: f64,
}

impl GasModel {
    /// Model with pressure constant A = 1.
    pub fn new(gamma: f64, bernoulli: f64) -> Result<Self, GasError> {
        Self::with_pressure_const(gamma, bernoulli, 1.0)
    }

    /// Model given the limit speed q̄ instead of B.
    pub fn from_qbar(gamma: f64, qbar: f64) -> Result<Self, GasError> {
        Self::new(gamma, 0.5 * qbar * qbar)
    }

    pub fn with_pressure_const(gamma: f64, bernoulli: f64, a: f64) -> Result<Self, GasError> {
        if !(gamma > 1.0 && gamma < 3.0) {
            return Err(GasError::BadGamma(gamma));
        }
        if !(bernoulli > 0.0) {
            return Err(GasError::BadBernoulli(bernoulli));
        }
        if !(a > 0.0) {
            return Err(GasError::BadPressureConst(a));
        }
        Ok(GasModel {
            gamma,
            pressure_const: a,
            bernoulli,
            qbar: (2.0 * bernoulli).sqrt(),
            nu: (gamma + 1.0) / (2.0 * (gamma - 1.0)),
            m_const: (3.0 - gamma) / (gamma + 1.0),
            kappa_const: (gamma - 1.0) / 2.0,
        })
    }

    /// Critical (sonic) speed q̄ √((γ−1)/(γ+1)).
    pub fn q_crit(&self) -> f64 {
        self.qbar * ((self.gamma - 1.0) / (self.gamma + 1.0)).sqrt()
    }

    /// c² as a function of q² from the Bernoulli law.
    pub fn sound_speed_sq(&self, q_sq: f64) -> f64 {
        0.5 * (self.gamma - 1.0) * (self.qbar * self.qbar - q_sq)
    }

    /// ρ as a function of q², normalised so that c² = Aγρ^{γ−1}.
    pub fn density(&self, q_sq: f64) -> f64 {
        let c2 = self.sound_speed_sq(q_sq);
        (c2 / (self.pressure_const * self.gamma)).powf(1.0 / (self.gamma - 1.0))
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.pressure_const * rho.powf(self.gamma)
    }

    /// dρ/dq² = −ρ / ((γ−1)(q̄²−q²)) · ... expressed through c²: dρ/du = −ρu/c².
    /// Returns ρ/c² for gradient assembly; callers multiply by −u or −v.
    pub fn rho_over_c2(&self, q_sq: f64) -> f64 {
        self.density(q_sq) / self.sound_speed_sq(q_sq)
    }
}

/// Velocity pair; all pointwise quantities derive from it plus a [`GasModel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowState {
    pub u: f64,
    pub v: f64,
}

impl FlowState {
    pub fn new(u: f64, v: f64) -> Self {
        FlowState { u, v }
    }

    pub fn q_sq(&self) -> f64 {
        self.u * self.u + self.v * self.v
    }

    pub fn q(&self) -> f64 {
        self.q_sq().sqrt()
    }
}

/// Pointwise thermodynamic quantities of a state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StateQuantities {
    pub rho: f64,
    pub c: f64,
    pub q: f64,
    /// q/c; infinite on the vacuum circle.
    pub mach: f64,
    pub p: f64,
}

/// ρ, c, q, M and p for a state. The vacuum circle q = q̄ is admitted as a
/// closed boundary; speeds beyond it are an error.
pub fn state_quantities(s: FlowState, g: &GasModel) -> Result<StateQuantities, GasError> {
    let q_sq = s.q_sq();
    let qb2 = g.qbar * g.qbar;
    if q_sq > qb2 * (1.0 + 1e-14) {
        return Err(GasError::SpeedExceedsLimit {
            q: q_sq.sqrt(),
            qbar: g.qbar,
        });
    }
    let q_sq = q_sq.min(qb2);
    let c2 = g.sound_speed_sq(q_sq);
    let rho = g.density(q_sq);
    let q = q_sq.sqrt();
    let c = c2.sqrt();
    let mach = if c == 0.0 { f64::INFINITY } else { q / c };
    Ok(StateQuantities {
        rho,
        c,
        q,
        mach,
        p: g.pressure(rho),
    })
}

/// Incoming flow at a fixed Bernoulli constant.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FreeStream {
    /// Incoming mass flux ε = ρ̲ ū.
    pub epsilon: f64,
    pub u_inf: f64,
    pub rho_inf: f64,
    pub c_inf: f64,
    pub mach_inf: f64,
}

/// ε(ū) = ρ(ū, 0) · ū on the supersonic branch ū ∈ (q_crit, q̄].
pub fn epsilon_of_u(u_inf: f64, g: &GasModel) -> Result<f64, GasError> {
    if u_inf <= g.q_crit() || u_inf > g.qbar * (1.0 + 1e-14) {
        return Err(GasError::OutOfSupersonicBranch(u_inf, g.q_crit()));
    }
    let u = u_inf.min(g.qbar);
    Ok(g.density(u * u) * u)
}

/// Supremum of ε on the supersonic branch (attained at the sonic point).
pub fn epsilon_max(g: &GasModel) -> f64 {
    let qc = g.q_crit();
    g.density(qc * qc) * qc
}

/// dε/dū = ρ − ū² ρ^{2−γ}/(Aγ) = ρ(1 − M̲²); strictly negative on the open
/// supersonic branch. Written in the power form so the vacuum endpoint
/// evaluates without 0·∞.
pub(crate) fn epsilon_slope(u: f64, g: &GasModel) -> f64 {
    let rho = g.density(u * u);
    rho - u * u * rho.powf(2.0 - g.gamma) / (g.pressure_const * g.gamma)
}

/// Inverts ε(ū) on the supersonic branch by bracketing bisection followed by
/// guarded Newton polish, then fills the derived incoming quantities.
pub fn freestream_from_epsilon(epsilon: f64, g: &GasModel) -> Result<FreeStream, GasError> {
    let max = epsilon_max(g);
    if !(epsilon >= 0.0) || epsilon >= max {
        return Err(GasError::EpsilonTooLarge { eps: epsilon, max });
    }
    if epsilon == 0.0 {
        return Ok(FreeStream {
            epsilon: 0.0,
            u_inf: g.qbar,
            rho_inf: 0.0,
            c_inf: 0.0,
            mach_inf: f64::INFINITY,
        });
    }
    let mut lo = g.q_crit();
    let mut hi = g.qbar;
    // eps is decreasing in u on (q_crit, qbar]
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let e = g.density(mid * mid) * mid;
        if e > epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 * g.qbar {
            break;
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..2 {
        let f = g.density(u * u) * u - epsilon;
        let df = epsilon_slope(u, g);
        if df.abs() < 1e-300 {
            break;
        }
        let next = u - f / df;
        if next > lo && next < hi {
            u = next;
        }
    }
    let rho = g.density(u * u);
    let c = g.sound_speed_sq(u * u).sqrt();
    Ok(FreeStream {
        epsilon,
        u_inf: u,
        rho_inf: rho,
        c_inf: c,
        mach_inf: u / c,
    })
}

impl FreeStream {
    /// Incoming pressure p̲ = Aρ̲^γ.
    pub fn pressure(&self, g: &GasModel) -> f64 {
        g.pressure(self.rho_inf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gamma2() -> GasModel {
        GasModel::from_qbar(2.0, 1.0).unwrap()
    }

    #[test]
    fn derived_constants_recompute_from_gamma() {
        for gamma in [1.4, 2.0, 2.5] {
            let g = GasModel::from_qbar(gamma, 1.0).unwrap();
            assert_eq!(g.nu, (gamma + 1.0) / (2.0 * (gamma - 1.0)));
            assert_eq!(g.m_const, (3.0 - gamma) / (gamma + 1.0));
            assert_eq!(g.kappa_const, (gamma - 1.0) / 2.0);
            assert_relative_eq!(g.qbar * g.qbar, 2.0 * g.bernoulli, max_relative = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_gamma() {
        assert!(GasModel::from_qbar(3.5, 1.0).is_err());
        assert!(GasModel::from_qbar(1.0, 1.0).is_err());
    }

    #[test]
    fn state_quantities_gamma2_09() {
        let g = gamma2();
        let sq = state_quantities(FlowState::new(0.9, 0.0), &g).unwrap();
        assert_relative_eq!(sq.c * sq.c, 0.095, max_relative = 1e-14);
        assert_relative_eq!(sq.rho, 0.0475, max_relative = 1e-14);
        assert_relative_eq!(sq.p, 0.0475 * 0.0475, max_relative = 1e-14);
    }

    #[test]
    fn state_quantities_vacuum_boundary() {
        let g = gamma2();
        let sq = state_quantities(FlowState::new(1.0, 0.0), &g).unwrap();
        assert_eq!(sq.c, 0.0);
        assert_eq!(sq.rho, 0.0);
        assert_eq!(sq.p, 0.0);
        assert!(sq.mach.is_infinite());
        assert!(state_quantities(FlowState::new(1.0 + 1e-9, 0.0), &g).is_err());
    }

    #[test]
    fn sonic_point_has_unit_mach() {
        let g = gamma2();
        let qc = 1.0 / 3.0f64.sqrt();
        assert_relative_eq!(g.q_crit(), qc, max_relative = 1e-15);
        let sq = state_quantities(FlowState::new(qc, 0.0), &g).unwrap();
        assert_relative_eq!(sq.mach, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn epsilon_of_u_matches_cubic_for_gamma2() {
        let g = gamma2();
        assert_relative_eq!(epsilon_of_u(0.9, &g).unwrap(), 0.04275, max_relative = 1e-14);
        assert_relative_eq!(
            epsilon_of_u(0.99, &g).unwrap(),
            0.00492525,
            max_relative = 1e-13
        );
        assert_relative_eq!(epsilon_of_u(1.0, &g).unwrap(), 0.0, epsilon = 1e-300);
        assert!(matches!(
            epsilon_of_u(0.5, &g),
            Err(GasError::OutOfSupersonicBranch(..))
        ));
    }

    #[test]
    fn freestream_inversion_hits_examples() {
        let g = gamma2();
        let fs = freestream_from_epsilon(0.04275, &g).unwrap();
        assert_relative_eq!(fs.u_inf, 0.9, max_relative = 1e-12);
        assert!((epsilon_of_u(fs.u_inf, &g).unwrap() - 0.04275).abs() < 1e-13);
        let fs = freestream_from_epsilon(0.00492525, &g).unwrap();
        assert_relative_eq!(fs.u_inf, 0.99, max_relative = 1e-12);
        let fs = freestream_from_epsilon(0.0, &g).unwrap();
        assert_eq!(fs.u_inf, 1.0);
        assert_eq!(fs.rho_inf, 0.0);
        assert!(freestream_from_epsilon(epsilon_max(&g) * 1.01, &g).is_err());
    }

    #[test]
    fn epsilon_is_strictly_decreasing_on_supersonic_branch() {
        for gamma in [1.4, 2.0, 2.5] {
            let g = GasModel::from_qbar(gamma, 1.0).unwrap();
            let qc = g.q_crit();
            let mut prev = f64::INFINITY;
            for i in 0..1000 {
                let u = qc + (g.qbar - qc) * (i as f64 + 0.5) / 1000.0;
                let e = epsilon_of_u(u, &g).unwrap();
                assert!(e < prev, "eps not decreasing at gamma={gamma} u={u}");
                prev = e;
            }
        }
    }

    proptest! {
        #[test]
        fn roundtrip_u_eps_u(gamma in 1.1f64..2.9, frac in 0.001f64..0.999) {
            let g = GasModel::from_qbar(gamma, 1.0).unwrap();
            let qc = g.q_crit();
            let u = qc + (g.qbar - qc) * frac;
            let e = epsilon_of_u(u, &g).unwrap();
            let fs = freestream_from_epsilon(e, &g).unwrap();
            prop_assert!((fs.u_inf - u).abs() <= 1e-12 * u.abs());
        }

        #[test]
        fn bernoulli_conservation(gamma in 1.1f64..2.9, uf in -0.99f64..0.99, vf in 0.0f64..0.99) {
            let g = GasModel::from_qbar(gamma, 1.0).unwrap();
            let scale = (uf * uf + vf * vf).sqrt();
            prop_assume!(scale < 0.999);
            let s = FlowState::new(uf, vf);
            let sq = state_quantities(s, &g).unwrap();
            let lhs = 0.5 * s.q_sq() + sq.c * sq.c / (gamma - 1.0);
            prop_assert!((lhs - g.bernoulli).abs() <= 1e-13 * g.bernoulli);
        }
    }
}
