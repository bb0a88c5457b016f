//! Wedge geometry: analytic profile families with exact derivatives,
//! curvature, arc length, wall coordinates and case classification.

use crate::gas::GasModel;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WedgeError {
    #[error("abscissa must be nonnegative, got {0}")]
    NegativeAbscissa(f64),
    #[error("invalid wedge parameters: {0}")]
    BadParams(String),
    #[error("point ({0}, {1}) is outside the tube where wall projection is unique")]
    OutsideTube(f64, f64),
}

/// Analytic wedge families. All satisfy f(0) = 0 and f(x) > 0 for x > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WedgeFamily {
    /// f = m x.
    Straight { slope: f64 },
    /// f' = m + b / (1+x)^a; monotone slope decay toward m.
    PowerDecayBend { m: f64, b: f64, a: f64 },
    /// f' = m + b cos(ln(1+x)) / (1+x)^{1+a}; non-convex bounded-slope wall.
    OscillatoryBend { m: f64, b: f64, a: f64 },
    /// f = a ln(1+x); bullet-like, slope decays to zero.
    LogBullet { a: f64 },
}

/// Wall frame at one abscissa.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WallPointFrame {
    pub x: f64,
    pub y: f64,
    /// Arc length from the origin along the wall.
    pub xi: f64,
    /// arctan f'.
    pub tangent_angle: f64,
    /// f'' / (1 + f'^2)^{3/2}.
    pub curvature: f64,
}

/// Case classification outcome; `Invalid` carries the violated condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CaseClass {
    CaseA,
    CaseB,
    Invalid(String),
}

/// A wedge profile with eagerly built arc-length breakpoints.
#[derive(Debug, Clone)]
pub struct WedgeProfile {
    family: WedgeFamily,
    f_infty: f64,
    /// Sorted (x, xi) breakpoints; queries integrate from the nearest one below.
    arc_table: Vec<(f64, f64)>,
}

const ARC_TABLE_HORIZON: f64 = 1.0e4;
const CLASSIFY_HORIZON: f64 = 1.0e4;
const QUAD_REL_TOL: f64 = 1e-12;

impl WedgeProfile {
    pub fn new(family: WedgeFamily) -> Result<Self, WedgeError> {
        match family {
            WedgeFamily::Straight { slope } => {
                if !(slope > 0.0) {
                    return Err(WedgeError::BadParams(format!(
                        "straight wedge needs positive slope, got {slope}"
                    )));
                }
            }
            WedgeFamily::PowerDecayBend { m, b, a } => {
                if !(m > 0.0 && a > 0.0 && m + b.min(0.0) > 0.0) {
                    return Err(WedgeError::BadParams(format!(
                        "power-decay bend needs m > 0, a > 0, m + min(b, 0) > 0; got m={m} b={b} a={a}"
                    )));
                }
            }
            WedgeFamily::OscillatoryBend { m, b, a } => {
                if !(m > b.abs() && a > 0.0) {
                    return Err(WedgeError::BadParams(format!(
                        "oscillatory bend needs m > |b|, a > 0; got m={m} b={b} a={a}"
                    )));
                }
            }
            WedgeFamily::LogBullet { a } => {
                if !(a > 0.0) {
                    return Err(WedgeError::BadParams(format!(
                        "log bullet needs a > 0, got {a}"
                    )));
                }
            }
        }
        let f_infty = match family {
            WedgeFamily::Straight { slope } => slope,
            WedgeFamily::PowerDecayBend { m, .. } => m,
            WedgeFamily::OscillatoryBend { m, .. } => m,
            WedgeFamily::LogBullet { .. } => 0.0,
        };
        let mut w = WedgeProfile {
            family,
            f_infty,
            arc_table: Vec::new(),
        };
        w.build_arc_table();
        Ok(w)
    }

    pub fn family(&self) -> WedgeFamily {
        self.family
    }

    /// Analytic limit of f' as x → ∞.
    pub fn f_infty(&self) -> f64 {
        self.f_infty
    }

    pub fn f(&self, x: f64) -> f64 {
        match self.family {
            WedgeFamily::Straight { slope } => slope * x,
            WedgeFamily::PowerDecayBend { m, b, a } => {
                if (a - 1.0).abs() < 1e-12 {
                    m * x + b * (1.0 + x).ln()
                } else {
                    m * x + b * ((1.0 + x).powf(1.0 - a) - 1.0) / (1.0 - a)
                }
            }
            WedgeFamily::OscillatoryBend { m, b, a } => {
                let s = (1.0 + x).ln();
                m * x
                    + b * ((1.0 + x).powf(-a) * (s.sin() - a * s.cos()) + a) / (1.0 + a * a)
            }
            WedgeFamily::LogBullet { a } => a * (1.0 + x).ln(),
        }
    }

    pub fn fp(&self, x: f64) -> f64 {
        match self.family {
            WedgeFamily::Straight { slope } => slope,
            WedgeFamily::PowerDecayBend { m, b, a } => m + b / (1.0 + x).powf(a),
            WedgeFamily::OscillatoryBend { m, b, a } => {
                m + b * (1.0 + x).ln().cos() / (1.0 + x).powf(1.0 + a)
            }
            WedgeFamily::LogBullet { a } => a / (1.0 + x),
        }
    }

    pub fn fpp(&self, x: f64) -> f64 {
        match self.family {
            WedgeFamily::Straight { .. } => 0.0,
            WedgeFamily::PowerDecayBend { b, a, .. } => -a * b / (1.0 + x).powf(1.0 + a),
            WedgeFamily::OscillatoryBend { b, a, .. } => {
                let s = (1.0 + x).ln();
                -b * (s.sin() + (1.0 + a) * s.cos()) / (1.0 + x).powf(2.0 + a)
            }
            WedgeFamily::LogBullet { a } => -a / ((1.0 + x) * (1.0 + x)),
        }
    }

    /// Decay exponent a with |f''|(1+x)^{1+a} bounded, known per family.
    fn decay_exponent(&self) -> f64 {
        match self.family {
            WedgeFamily::Straight { .. } => 1.0,
            WedgeFamily::PowerDecayBend { a, .. } => a,
            WedgeFamily::OscillatoryBend { a, .. } => a,
            WedgeFamily::LogBullet { .. } => 1.0,
        }
    }

    pub fn curvature(&self, x: f64) -> f64 {
        let fp = self.fp(x);
        self.fpp(x) / (1.0 + fp * fp).powf(1.5)
    }

    fn arc_integrand(&self, x: f64) -> f64 {
        let fp = self.fp(x);
        (1.0 + fp * fp).sqrt()
    }

    fn build_arc_table(&mut self) {
        let mut xs = vec![0.0f64];
        let mut x = 1e-4;
        while x < ARC_TABLE_HORIZON {
            xs.push(x);
            x *= 1.03;
        }
        xs.push(ARC_TABLE_HORIZON);
        let mut table = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &xk in &xs {
            if xk > prev {
                acc += adaptive_quad(|t| self.arc_integrand(t), prev, xk, QUAD_REL_TOL);
            }
            table.push((xk, acc));
            prev = xk;
        }
        self.arc_table = table;
    }

    /// Arc length ξ(x) from the origin, by adaptive quadrature from the
    /// nearest memoized breakpoint.
    pub fn arc_length(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let idx = self
            .arc_table
            .partition_point(|&(bx, _)| bx <= x)
            .saturating_sub(1);
        let (bx, bxi) = self.arc_table[idx];
        bxi + adaptive_quad(|t| self.arc_integrand(t), bx, x, QUAD_REL_TOL)
    }

    /// Inverse of [`Self::arc_length`] by Newton iteration.
    pub fn x_of_arc_length(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        let mut x = xi / self.arc_integrand(0.0);
        for _ in 0..60 {
            let res = self.arc_length(x) - xi;
            let step = res / self.arc_integrand(x);
            x -= step;
            if x < 0.0 {
                x = 0.0;
            }
            if step.abs() < 1e-14 * (1.0 + x) {
                break;
            }
        }
        x
    }

    pub fn eval_profile(&self, x: f64) -> Result<WallPointFrame, WedgeError> {
        if x < 0.0 {
            return Err(WedgeError::NegativeAbscissa(x));
        }
        Ok(WallPointFrame {
            x,
            y: self.f(x),
            xi: self.arc_length(x),
            tangent_angle: self.fp(x).atan(),
            curvature: self.curvature(x),
        })
    }

    /// Foot of the perpendicular from `p` onto the wall, with wall
    /// coordinates. `eta` is signed: positive above the wall.
    pub fn project_to_wall(&self, px: f64, py: f64) -> Result<(f64, f64, WallPointFrame), WedgeError> {
        // Newton on F(t) = (p - W(t)) . W'(t) with W(t) = (t, f(t))
        let mut t = px.max(0.0);
        let scale = 1.0 + px.abs() + py.abs();
        let mut converged = false;
        for _ in 0..100 {
            let f = self.f(t);
            let fp = self.fp(t);
            let fpp = self.fpp(t);
            let res = (px - t) + (py - f) * fp;
            let dres = -1.0 - fp * fp + (py - f) * fpp;
            if dres.abs() < 1e-300 {
                break;
            }
            let step = res / dres;
            t -= step;
            if t < 0.0 {
                t = 0.0;
            }
            if step.abs() <= 1e-14 * scale {
                converged = true;
                break;
            }
        }
        let foot = self.eval_profile(t)?;
        let dx = px - foot.x;
        let dy = py - foot.y;
        let dist = (dx * dx + dy * dy).sqrt();
        let fp = self.fp(t);
        let norm = (1.0 + fp * fp).sqrt();
        // residual of the orthogonality condition, as an angle
        let tang = (dx + dy * fp) / norm;
        if !converged && tang.abs() > 1e-10 * scale {
            return Err(WedgeError::OutsideTube(px, py));
        }
        if dist > 1e-13 * scale && tang.abs() > 1e-9 * dist.max(1e-13 * scale) {
            return Err(WedgeError::OutsideTube(px, py));
        }
        let eta = (-dx * fp + dy) / norm;
        Ok((foot.xi, eta, foot))
    }

    /// Case A / Case B classification by sampling the analytic conditions on
    /// a geometric grid up to a fixed horizon.
    pub fn classify_case(&self, g: &GasModel) -> CaseClass {
        let slope_bound = (2.0 / (g.gamma - 1.0)).sqrt();
        let convex_asym_bound = ((3.0 - g.gamma) / (g.gamma - 1.0)).sqrt();
        let mut xs = vec![0.0f64];
        let mut x = 1e-3;
        while x < CLASSIFY_HORIZON {
            xs.push(x);
            x *= 1.08;
        }
        xs.push(CLASSIFY_HORIZON);

        let mut fp_min = f64::INFINITY;
        let mut fp_max = f64::NEG_INFINITY;
        let mut fpp_max_pos = f64::NEG_INFINITY;
        let mut decay_sup = 0.0f64;
        let a_dec = self.decay_exponent();
        for &xk in &xs {
            let fp = self.fp(xk);
            let fpp = self.fpp(xk);
            fp_min = fp_min.min(fp);
            fp_max = fp_max.max(fp);
            fpp_max_pos = fpp_max_pos.max(fpp);
            decay_sup = decay_sup.max(fpp.abs() * (1.0 + xk).powf(1.0 + a_dec));
        }

        let case_a = self.f_infty > 0.0
            && fp_min > 0.0
            && fp_max < slope_bound
            && decay_sup.is_finite()
            && decay_sup < 1e6;
        if case_a {
            return CaseClass::CaseA;
        }
        let fp0 = self.fp(0.0);
        if fpp_max_pos <= 1e-14 {
            if !(fp0 > 0.0 && fp0 < slope_bound) {
                return CaseClass::Invalid(format!(
                    "tip slope f'(0) = {fp0} not in (0, {slope_bound})"
                ));
            }
            if !(self.f_infty >= 0.0 && self.f_infty < convex_asym_bound) {
                return CaseClass::Invalid(format!(
                    "limit slope {} not in [0, {convex_asym_bound})",
                    self.f_infty
                ));
            }
            return CaseClass::CaseB;
        }
        if fp_max >= slope_bound {
            return CaseClass::Invalid(format!(
                "max slope {fp_max} reaches the supersonic bound {slope_bound}"
            ));
        }
        CaseClass::Invalid(format!(
            "slope not bounded below by a positive constant (min {fp_min}, limit {})",
            self.f_infty
        ))
    }
}

// 15-point Kronrod rule with embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = 0.0;
    let mut gauss = 0.0;
    for i in 0..8 {
        if XGK[i] == 0.0 {
            let v = f(c);
            kron += WGK[i] * v;
            gauss += WG[3] * v;
        } else {
            let v1 = f(c - h * XGK[i]);
            let v2 = f(c + h * XGK[i]);
            kron += WGK[i] * (v1 + v2);
            if i % 2 == 1 {
                gauss += WG[i / 2] * (v1 + v2);
            }
        }
    }
    (kron * h, (kron - gauss) * h)
}

/// Adaptive bisection Gauss–Kronrod quadrature to a relative tolerance.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (val, err) = gk15(f, a, b);
        if err.abs() <= tol * val.abs().max(1e-300) || depth >= 40 {
            return val;
        }
        let c = 0.5 * (a + b);
        recurse(f, a, c, tol, depth + 1) + recurse(f, c, b, tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    recurse(&f, a, b, rel_tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tan_deg(d: f64) -> f64 {
        d.to_radians().tan()
    }

    #[test]
    fn straight_wedge_frame() {
        let w = WedgeProfile::new(WedgeFamily::Straight { slope: tan_deg(10.0) }).unwrap();
        let fr = w.eval_profile(1.0).unwrap();
        assert_relative_eq!(fr.tangent_angle.tan(), tan_deg(10.0), max_relative = 1e-15);
        assert_eq!(fr.curvature, 0.0);
        assert_relative_eq!(fr.xi, 1.0 / 10.0f64.to_radians().cos(), max_relative = 1e-11);
    }

    #[test]
    fn log_bullet_tip_derivatives() {
        let a = tan_deg(10.0);
        let w = WedgeProfile::new(WedgeFamily::LogBullet { a }).unwrap();
        assert_relative_eq!(w.fp(0.0), a, max_relative = 1e-15);
        assert_relative_eq!(w.fpp(0.0), -a, max_relative = 1e-15);
    }

    #[test]
    fn power_decay_slope_example() {
        let w = WedgeProfile::new(WedgeFamily::PowerDecayBend { m: 0.3, b: 0.1, a: 1.0 }).unwrap();
        assert_relative_eq!(w.fp(3.0), 0.325, max_relative = 1e-15);
    }

    #[test]
    fn negative_abscissa_rejected() {
        let w = WedgeProfile::new(WedgeFamily::Straight { slope: 0.2 }).unwrap();
        assert!(matches!(w.eval_profile(-0.5), Err(WedgeError::NegativeAbscissa(_))));
    }

    #[test]
    fn derivatives_match_central_differences() {
        let fams = [
            WedgeFamily::PowerDecayBend { m: 0.3, b: 0.1, a: 1.0 },
            WedgeFamily::PowerDecayBend { m: 0.2, b: -0.05, a: 0.7 },
            WedgeFamily::OscillatoryBend { m: 0.3, b: 0.1, a: 0.5 },
            WedgeFamily::LogBullet { a: 0.17 },
        ];
        for fam in fams {
            let w = WedgeProfile::new(fam).unwrap();
            for &x in &[0.1, 1.0, 5.0, 40.0] {
                let h = 1e-5 * (1.0 + x);
                let dfp = (w.f(x + h) - w.f(x - h)) / (2.0 * h);
                assert_relative_eq!(dfp, w.fp(x), max_relative = 1e-7);
                let dfpp = (w.fp(x + h) - w.fp(x - h)) / (2.0 * h);
                assert!((dfpp - w.fpp(x)).abs() <= 1e-7 * (1.0 + w.fpp(x).abs()));
            }
        }
    }

    #[test]
    fn arc_length_is_increasing_with_correct_slope() {
        let w = WedgeProfile::new(WedgeFamily::LogBullet { a: 0.3 }).unwrap();
        let mut prev = 0.0;
        for i in 1..60 {
            let x = 0.5 * i as f64;
            let xi = w.arc_length(x);
            assert!(xi > prev);
            prev = xi;
            let h = 1e-6 * (1.0 + x);
            let slope = (w.arc_length(x + h) - w.arc_length(x - h)) / (2.0 * h);
            assert_relative_eq!(slope, (1.0 + w.fp(x).powi(2)).sqrt(), max_relative = 1e-8);
        }
    }

    #[test]
    fn classify_cases() {
        let g = GasModel::from_qbar(2.0, 1.0).unwrap();
        let straight = WedgeProfile::new(WedgeFamily::Straight { slope: tan_deg(10.0) }).unwrap();
        assert_eq!(straight.classify_case(&g), CaseClass::CaseA);
        let bullet = WedgeProfile::new(WedgeFamily::LogBullet { a: tan_deg(10.0) }).unwrap();
        assert_eq!(bullet.classify_case(&g), CaseClass::CaseB);
        let steep = WedgeProfile::new(WedgeFamily::Straight { slope: 2.0 }).unwrap();
        assert!(matches!(steep.classify_case(&g), CaseClass::Invalid(_)));
        let bend = WedgeProfile::new(WedgeFamily::PowerDecayBend {
            m: tan_deg(15.0),
            b: 0.1,
            a: 1.0,
        })
        .unwrap();
        assert_eq!(bend.classify_case(&g), CaseClass::CaseA);
        let wavy = WedgeProfile::new(WedgeFamily::OscillatoryBend { m: 0.3, b: 0.1, a: 0.5 }).unwrap();
        assert_eq!(wavy.classify_case(&g), CaseClass::CaseA);
    }

    #[test]
    fn project_on_wall_points() {
        let th = 10.0f64.to_radians();
        let w = WedgeProfile::new(WedgeFamily::Straight { slope: th.tan() }).unwrap();
        let x0 = 2.0;
        let (xi, eta, foot) = w.project_to_wall(x0, w.f(x0)).unwrap();
        assert!(eta.abs() < 1e-12);
        assert_relative_eq!(xi, x0 / th.cos(), max_relative = 1e-10);
        assert_relative_eq!(foot.x, x0, max_relative = 1e-12);
    }

    #[test]
    fn project_flat_wall_like_case() {
        // near-flat wall: slope tiny so projection is essentially vertical
        let w = WedgeProfile::new(WedgeFamily::Straight { slope: 1e-14 }).unwrap();
        let (xi, eta, _) = w.project_to_wall(1.0, 0.2).unwrap();
        assert_relative_eq!(xi, 1.0, max_relative = 1e-9);
        assert_relative_eq!(eta, 0.2, max_relative = 1e-9);
    }

    #[test]
    fn project_normal_offset_roundtrip() {
        let a = tan_deg(10.0);
        let w = WedgeProfile::new(WedgeFamily::LogBullet { a }).unwrap();
        let x0 = 2.0;
        let fp = w.fp(x0);
        let n = (1.0 + fp * fp).sqrt();
        let eta0 = 1e-3;
        let p = (x0 - eta0 * fp / n, w.f(x0) + eta0 / n);
        let (xi, eta, foot) = w.project_to_wall(p.0, p.1).unwrap();
        assert_relative_eq!(eta, eta0, max_relative = 1e-10);
        assert_relative_eq!(foot.x, x0, max_relative = 1e-10);
        assert_relative_eq!(xi, w.arc_length(x0), max_relative = 1e-10);
    }
}
