//! The end-to-end verification suite: every release criterion as a runnable
//! check with its tolerance pinned in code, shared by the test suite and the
//! `verify` subcommand. Checks that need an independent oracle carry one in
//! [`oracle`], built from its own closures rather than the solver kernels.

use crate::diag;
use crate::field::Point;
use crate::gamma2;
use crate::gas::{epsilon_of_u, freestream_from_epsilon, FlowState, GasModel};
use crate::moc::{march, MarchResult, RunConfig};
use crate::polar::{downstream_from_ray, polar_residual, reflection_coeff_g};
use crate::wedge::{WedgeFamily, WedgeProfile};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:2} {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

/// Self-contained scan/bisection oracles, independent of the solver kernels.
pub mod oracle {
    /// Density from the Bernoulli law, normalised against the pressure law.
    pub fn density(gamma: f64, qbar: f64, q_sq: f64) -> f64 {
        let c2 = 0.5 * (gamma - 1.0) * (qbar * qbar - q_sq);
        (c2 / gamma).max(0.0).powf(1.0 / (gamma - 1.0))
    }

    /// Inverts the incoming mass flux on the supersonic branch by bisection.
    pub fn ubar_of_eps(gamma: f64, qbar: f64, eps: f64) -> f64 {
        let mut lo = qbar * ((gamma - 1.0) / (gamma + 1.0)).sqrt();
        let mut hi = qbar;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if density(gamma, qbar, mid * mid) * mid > eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn polar_g(gamma: f64, qbar: f64, eps: f64, ubar: f64, u: f64, v: f64) -> f64 {
        let q_sq = u * u + v * v;
        if q_sq >= qbar * qbar {
            return f64::INFINITY;
        }
        if eps == 0.0 {
            return u * (u - ubar) + v * v;
        }
        let rho = density(gamma, qbar, q_sq);
        (u - eps / rho) * (u - ubar) + v * v
    }

    /// Weak (largest-u, supersonic, entropy-satisfying) root on the ray
    /// v = u tan(theta), by a dense scan and plain bisection.
    pub fn ray_weak_root(gamma: f64, qbar: f64, eps: f64, theta: f64) -> Option<(f64, f64)> {
        let ubar = ubar_of_eps(gamma, qbar, eps);
        if theta == 0.0 {
            return Some((ubar, 0.0));
        }
        let t = theta.tan();
        let u_hi = qbar / (1.0 + t * t).sqrt() * (1.0 - 1e-12);
        let n = 20000;
        let mut prev_u = u_hi;
        let mut prev = polar_g(gamma, qbar, eps, ubar, prev_u, prev_u * t);
        for i in 1..=n {
            let u = u_hi * (1.0 - 0.999 * i as f64 / n as f64);
            let g = polar_g(gamma, qbar, eps, ubar, u, u * t);
            if g == 0.0 || (g > 0.0) != (prev > 0.0) {
                let (mut lo, mut hi) = (u, prev_u);
                let mut glo = g;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let gm = polar_g(gamma, qbar, eps, ubar, mid, mid * t);
                    if (gm > 0.0) == (glo > 0.0) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                let ur = 0.5 * (lo + hi);
                let vr = ur * t;
                let q_sq = ur * ur + vr * vr;
                let c2 = 0.5 * (gamma - 1.0) * (qbar * qbar - q_sq);
                if q_sq < ubar * ubar * (1.0 + 1e-12) && q_sq > c2 {
                    return Some((ur, vr));
                }
            }
            prev_u = u;
            prev = g;
        }
        None
    }
}

fn gamma2_gas() -> GasModel {
    GasModel::from_qbar(2.0, 1.0).expect("valid model")
}

fn tan_deg(d: f64) -> f64 {
    d.to_radians().tan()
}

fn run_cfg(cfg: &RunConfig) -> MarchResult {
    let res = march(cfg).expect("configuration is valid");
    assert!(
        res.breakdown.is_none(),
        "march broke down: {:?}",
        res.breakdown
    );
    res
}

/// Criterion 1: straight-wedge marches reproduce the constant tip state to
/// accumulated rounding over 500 lines.
pub fn criterion_1() -> CriterionResult {
    let gas = gamma2_gas();
    let wedge = WedgeProfile::new(WedgeFamily::Straight { slope: tan_deg(10.0) }).unwrap();
    let mut cfg = RunConfig::new(gas, wedge, 0.04275);
    cfg.n_across = 20;
    cfg.x_max = 1e30;
    cfg.max_lines = Some(500);
    let res = run_cfg(&cfg);
    let (u0, v0) = oracle::ray_weak_root(2.0, 1.0, 0.04275, tan_deg(10.0).atan())
        .expect("attached tip solution");
    let mut worst = 0.0f64;
    for line in &res.net.lines {
        for p in &line.points {
            worst = worst
                .max((p.state.u - u0).abs())
                .max((p.state.v - v0).abs());
        }
    }
    let s0 = res.shock.nodes[0].slope;
    let slope_drift = res
        .shock
        .nodes
        .iter()
        .map(|n| (n.slope - s0).abs())
        .fold(0.0f64, f64::max);
    let pass = res.net.lines.len() == 500 && worst < 1e-9 && slope_drift < 1e-9;
    CriterionResult {
        id: 1,
        name: "straight-wedge exactness".into(),
        pass,
        detail: format!(
            "lines={} max|U-U0|={worst:.3e} (tol 1e-9), slope drift={slope_drift:.3e} (tol 1e-9)",
            res.net.lines.len()
        ),
    }
}

/// Criterion 2: the ray solve matches an independent sign-scan bisection
/// oracle over 50 random admissible configurations.
pub fn criterion_2() -> CriterionResult {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x706f6c6172);
    let mut worst_gap = 0.0f64;
    let mut worst_res = 0.0f64;
    let mut tried = 0usize;
    while tried < 50 {
        let gamma = rng.gen_range(1.2..2.8);
        let gas = GasModel::from_qbar(gamma, 1.0).unwrap();
        let tfrac = rng.gen_range(0.3..0.995);
        let ubar = gas.q_crit() + (gas.qbar - gas.q_crit()) * tfrac;
        let eps = match epsilon_of_u(ubar, &gas) {
            Ok(e) => e,
            Err(_) => continue,
        };
        let fs = freestream_from_epsilon(eps, &gas).unwrap();
        // admissible deflection: a fraction of the polar's maximum ray angle
        let mut theta_max = 0.0f64;
        for j in 1..60 {
            let u = fs.u_inf * (1.0 - 0.9 * j as f64 / 60.0);
            if let Ok(v) = crate::polar::polar_v_root(u, &fs, &gas) {
                theta_max = theta_max.max((v / u).atan());
            }
        }
        if theta_max < 0.03 {
            continue;
        }
        let theta = rng.gen_range(0.02..0.85 * theta_max);
        let s = match downstream_from_ray(theta, &fs, &gas) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let (ou, ov) = match oracle::ray_weak_root(gamma, 1.0, eps, theta) {
            Some(r) => r,
            None => continue,
        };
        tried += 1;
        worst_gap = worst_gap.max((s.u - ou).abs()).max((s.v - ov).abs());
        worst_res = worst_res.max(polar_residual(s, &fs, &gas).unwrap().g.abs());
    }
    let pass = worst_gap < 1e-10 && worst_res < 1e-12;
    CriterionResult {
        id: 2,
        name: "oblique-shock oracle equivalence".into(),
        pass,
        detail: format!(
            "50 samples: max oracle gap={worst_gap:.3e} (tol 1e-10), max |G|={worst_res:.3e} (tol 1e-12)"
        ),
    }
}

/// Criterion 3: the reflection coefficient at the vacuum end of the limit
/// polar extrapolates to (√(2/(γ−1))−1)/(√(2/(γ−1))+1), and vanishes at
/// u = (γ−1)q̄/2.
pub fn criterion_3() -> CriterionResult {
    let mut detail = String::new();
    let mut pass = true;
    for gamma in [1.4, 2.0, 2.5] {
        let gas = GasModel::from_qbar(gamma, 1.0).unwrap();
        let fs = freestream_from_epsilon(0.0, &gas).unwrap();
        let g_at = |d: f64| {
            let u = gas.qbar - d;
            let v = (u * (gas.qbar - u)).sqrt();
            reflection_coeff_g(FlowState::new(u, v), &fs, &gas)
                .expect("on the limit polar")
                .g_value
        };
        let (a1, a2, a3) = (g_at(1e-4), g_at(5e-5), g_at(2.5e-5));
        let denom = (a3 - a2) - (a2 - a1);
        let extrap = if denom.abs() < 1e-300 {
            a3
        } else {
            a3 - (a3 - a2) * (a3 - a2) / denom
        };
        let r = (2.0 / (gamma - 1.0)).sqrt();
        let target = (r - 1.0) / (r + 1.0);
        let target = if gamma == 2.0 {
            3.0 - 2.0 * 2.0f64.sqrt()
        } else {
            target
        };
        let gap = (extrap - target).abs();
        // zero at the half-radius point
        let u_half = 0.5 * (gamma - 1.0) * gas.qbar;
        let v_half = (u_half * (gas.qbar - u_half)).sqrt();
        let g_zero = reflection_coeff_g(FlowState::new(u_half, v_half), &fs, &gas)
            .expect("on the limit polar")
            .g_value
            .abs();
        if gap >= 1e-6 || g_zero >= 1e-12 {
            pass = false;
        }
        detail.push_str(&format!(
            "gamma={gamma}: |extrap-target|={gap:.2e} (tol 1e-6), |g(half)|={g_zero:.2e} (tol 1e-12); "
        ));
    }
    CriterionResult {
        id: 3,
        name: "limit reflection coefficient".into(),
        pass,
        detail,
    }
}

fn power_bend() -> WedgeProfile {
    WedgeProfile::new(WedgeFamily::PowerDecayBend {
        m: tan_deg(15.0),
        b: 0.1,
        a: 1.0,
    })
    .unwrap()
}

fn log_bullet() -> WedgeProfile {
    WedgeProfile::new(WedgeFamily::LogBullet { a: tan_deg(10.0) }).unwrap()
}

/// Criterion 4: normalised layer-thickness curves superpose within 20% over
/// the reported range as the mass flux is halved twice.
pub fn criterion_4() -> CriterionResult {
    let gas = gamma2_gas();
    let mut curves: Vec<Vec<(f64, f64)>> = Vec::new();
    for eps in [0.04, 0.02, 0.01] {
        let mut cfg = RunConfig::new(gas, power_bend(), eps);
        cfg.n_across = 31;
        cfg.x_max = 30.0;
        let res = run_cfg(&cfg);
        let rows = diag::layer_thickness_report(&res.net, &res.freestream).unwrap();
        curves.push(rows.iter().map(|r| (r.xi, r.normalized)).collect());
    }
    // compare on a common log grid
    let xi_lo: f64 = 1.0;
    let xi_hi: f64 = 25.0;
    let interp = |curve: &[(f64, f64)], x: f64| -> f64 {
        let k = curve.partition_point(|p| p.0 <= x).clamp(1, curve.len() - 1);
        let (x0, y0) = curve[k - 1];
        let (x1, y1) = curve[k];
        y0 + (y1 - y0) * (x.ln() - x0.ln()) / (x1.ln() - x0.ln())
    };
    let mut worst = 0.0f64;
    for i in 0..=40 {
        let x = xi_lo * (xi_hi / xi_lo).powf(i as f64 / 40.0);
        let vals: Vec<f64> = curves.iter().map(|c| interp(c, x)).collect();
        for a in &vals {
            for b in &vals {
                worst = worst.max((a / b - 1.0).abs());
            }
        }
    }
    CriterionResult {
        id: 4,
        name: "narrow-estimate thickness superposition".into(),
        pass: worst <= 0.20,
        detail: format!("max pairwise deviation {worst:.3} over xi in [1, 25] (tol 0.20)"),
    }
}

/// Criterion 5: the bullet-wedge shock dissipates — the tail slope reaches
/// the incoming Mach-line slope and the pressure jump decays away.
pub fn criterion_5() -> CriterionResult {
    let gas = gamma2_gas();
    let mut cfg = RunConfig::new(gas, log_bullet(), 0.04275);
    cfg.n_across = 41;
    cfg.x_max = 200.0;
    let res = run_cfg(&cfg);
    let fs = res.freestream;
    let target = fs.c_inf / (fs.u_inf * fs.u_inf - fs.c_inf * fs.c_inf).sqrt();
    let phi_series: Vec<(f64, f64)> = res.shock.nodes.iter().map(|n| (n.x, n.slope)).collect();
    let tail = diag::aitken_tail(&phi_series).expect("enough nodes");
    let phi_gap = (tail - target).abs();

    let p_under = fs.pressure(&gas);
    let jumps: Vec<(f64, f64)> = res
        .net
        .lines
        .iter()
        .map(|l| {
            let last = l.points.last().unwrap();
            let sq = crate::gas::state_quantities(last.state, &gas).unwrap();
            (last.xi, sq.p - p_under)
        })
        .collect();
    let xi_max = jumps.last().unwrap().0;
    let mut decreasing = true;
    let mut prev = f64::INFINITY;
    let mut final_jump = f64::NAN;
    for &(xi, j) in &jumps {
        if xi < xi_max / 10.0 {
            continue;
        }
        if j > prev * (1.0 + 1e-9) + 1e-18 {
            decreasing = false;
        }
        prev = j;
        final_jump = j;
    }
    let pass = phi_gap < 5e-3 && decreasing && final_jump < 1e-3;
    CriterionResult {
        id: 5,
        name: "shock dissipation on the bullet wedge".into(),
        pass,
        detail: format!(
            "tail phi'={tail:.6} vs {target:.6} gap={phi_gap:.2e} (tol 5e-3); jump decreasing={decreasing}; final jump={final_jump:.2e} (tol 1e-3); cbar^2={:.6}",
            fs.c_inf * fs.c_inf
        ),
    }
}

/// Criterion 6: bounded-slope asymptote — the tail state and slope match
/// the polar-ray prediction.
pub fn criterion_6() -> CriterionResult {
    let gas = gamma2_gas();
    let mut cfg = RunConfig::new(gas, power_bend(), 0.04275);
    cfg.n_across = 31;
    cfg.x_max = 200.0;
    let res = run_cfg(&cfg);
    let asy = diag::asymptotic_report(&res.net, &res.shock, &cfg.wedge, &res.freestream, &gas)
        .expect("enough lines");
    let pass = asy.gap_u < 1e-4 && asy.gap_v < 1e-4 && asy.gap_phi < 1e-4;
    CriterionResult {
        id: 6,
        name: "bounded-slope asymptote".into(),
        pass,
        detail: format!(
            "gap_u={:.2e} gap_v={:.2e} gap_phi={:.2e} (tol 1e-4 each)",
            asy.gap_u, asy.gap_v, asy.gap_phi
        ),
    }
}

fn relation_pair(n: usize) -> (f64, f64) {
    let gas = gamma2_gas();
    let mut cfg = RunConfig::new(gas, log_bullet(), 0.04275);
    cfg.n_across = n;
    cfg.x_max = 20.0;
    let res = run_cfg(&cfg);
    let rr = diag::relation_residuals(
        &res.net,
        &res.shock,
        &cfg.wedge,
        &res.freestream,
        &gas,
        10.0 * cfg.x_start,
    );
    (rr.wall_max, rr.shock_max)
}

/// Criterion 7: the wall and shock differential-relation residuals shrink by
/// at least 1.7x under step halving.
pub fn criterion_7() -> CriterionResult {
    let (wall_h, shock_h) = relation_pair(31);
    let (wall_h2, shock_h2) = relation_pair(61);
    let ratio_wall = wall_h / wall_h2;
    let ratio_shock = shock_h / shock_h2;
    let pass = ratio_wall >= 1.7 && ratio_shock >= 1.7;
    CriterionResult {
        id: 7,
        name: "boundary relation residual refinement".into(),
        pass,
        detail: format!(
            "wall {wall_h:.3e}->{wall_h2:.3e} ratio {ratio_wall:.2}; shock {shock_h:.3e}->{shock_h2:.3e} ratio {ratio_shock:.2} (tol >= 1.7)"
        ),
    }
}

/// Criterion 8: the characteristic-decomposition finite-difference residual
/// shrinks by at least 1.7x under step halving on a smooth computed field.
pub fn criterion_8() -> CriterionResult {
    let gas = gamma2_gas();
    let solve = |n: usize| {
        let mut cfg = RunConfig::new(gas, power_bend(), 0.04275);
        cfg.n_across = n;
        cfg.x_max = 25.0;
        run_cfg(&cfg)
    };
    let res_h = solve(31);
    let res_h2 = solve(61);
    let wedge = power_bend();
    let probe_x = 8.0;
    let probe = Point::new(probe_x, wedge.f(probe_x) + 0.8);
    let eval = |res: &MarchResult, n: usize| -> (f64, f64) {
        let field = diag::NetField::new(&res.net, &wedge);
        // step tied to the local across-layer spacing
        let h = 0.8 * 3.0 / n as f64;
        crate::charkern::decomposition_residual(&field, probe, h, &gas)
            .expect("probe inside the field")
    };
    let (rp1, rm1) = eval(&res_h, 31);
    let (rp2, rm2) = eval(&res_h2, 61);
    let ratio_p = rp1.abs() / rp2.abs();
    let ratio_m = rm1.abs() / rm2.abs();
    let pass = ratio_p >= 1.7 && ratio_m >= 1.7;
    CriterionResult {
        id: 8,
        name: "characteristic decomposition residual refinement".into(),
        pass,
        detail: format!(
            "r+ {rp1:.3e}->{rp2:.3e} ratio {ratio_p:.2}; r- {rm1:.3e}->{rm2:.3e} ratio {ratio_m:.2} (tol >= 1.7)"
        ),
    }
}

/// Criterion 9: the exact rational identities hold and flip under any
/// coefficient mutation.
pub fn criterion_9() -> CriterionResult {
    use gamma2::poly::{rat, MultiPoly};
    let polys = gamma2::build_polynomials();
    let division_ok = gamma2::verify_division_identity(&polys);
    let leading_ok = gamma2::leading_form_roots(&polys);
    let certificate_ok = gamma2::no_real_solution_certificate(&polys).unwrap_or(false);
    // falsifiability probes
    let mut probe = polys.clone();
    probe.p = probe.p.add(&MultiPoly::from_int(1));
    let division_flips = !gamma2::verify_division_identity(&probe);
    let mut probe2 = polys.clone();
    probe2.r1 = probe2
        .r1
        .add(&MultiPoly::var(2).pow(2).scale(&rat(3, 1)));
    let leading_flips = !gamma2::leading_form_roots(&probe2);
    let wrong_product = gamma2::displayed_certificate_product()
        .mul(&MultiPoly::var(0).sub(&MultiPoly::var(2)));
    let certificate_flips =
        gamma2::certificate_check_against(&polys, &wrong_product).is_err();
    let pass = division_ok
        && leading_ok
        && certificate_ok
        && division_flips
        && leading_flips
        && certificate_flips;
    CriterionResult {
        id: 9,
        name: "exact quadratic-index algebra with falsifiability probes".into(),
        pass,
        detail: format!(
            "division={division_ok} leading={leading_ok} certificate={certificate_ok}; probes flip: {division_flips}/{leading_flips}/{certificate_flips}"
        ),
    }
}

/// Criterion 10: sign scans on the pinned grid — zero violations of H > 0,
/// J > 0 and 0 < g < 1 over eps in (0, 0.01], u in ((γ−1)q̄/2 + 1e−3, ū),
/// plus the corner bound |K| <= 1e6.
pub fn criterion_10() -> CriterionResult {
    let gas = gamma2_gas();
    let scan = gamma2::sign_scan(0.01, 200, 1e-3, &gas);
    let polys = gamma2::build_polynomials();
    let corner = gamma2::corner_k_scan(&polys, 4000, &gas);
    let pass = scan.violations_h == 0
        && scan.violations_j == 0
        && scan.violations_g == 0
        && corner.within_bound;
    CriterionResult {
        id: 10,
        name: "polar sign scans on the pinned grid".into(),
        pass,
        detail: format!(
            "violations H={} J={} g={} of {} samples (min H={:.2e}, min g={:.2e}, max g={:.4}); corner max|K|={:.3} (bound 1e6). The H and g sign claims hold only for eps small against the lower-u gap delta; the measured sign boundary sits near u = qbar/2 + 6.7 eps, so the pinned grid (delta=1e-3, eps up to 1e-2) crosses it.",
            scan.violations_h,
            scan.violations_j,
            scan.violations_g,
            scan.samples,
            scan.min_h,
            scan.min_g,
            scan.max_g,
            corner.max_abs_k
        ),
    }
}

/// Criterion 11: the gap between measured characteristic derivatives and the
/// zero-flux formal pair scales about linearly in epsilon.
pub fn criterion_11() -> CriterionResult {
    let gas = gamma2_gas();
    let wedge = log_bullet();
    let mut runs = Vec::new();
    for eps in [0.04, 0.02, 0.01] {
        let mut cfg = RunConfig::new(gas, wedge.clone(), eps);
        cfg.n_across = 41;
        cfg.x_max = 12.0;
        runs.push((eps, run_cfg(&cfg)));
    }
    let borrowed: Vec<(f64, &MarchResult)> = runs.iter().map(|(e, r)| (*e, r)).collect();
    let table = diag::formal_derivative_trend(&borrowed, &wedge, &gas, 5.0)
        .expect("three-epsilon sweep");
    let pass = (0.5..=1.5).contains(&table.order_plus)
        && (0.5..=1.5).contains(&table.order_minus);
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("eps={} gaps=({:.2e},{:.2e})", r.epsilon, r.gap_plus, r.gap_minus))
        .collect();
    CriterionResult {
        id: 11,
        name: "formal-derivative trend in epsilon".into(),
        pass,
        detail: format!(
            "order+={:.2} order-={:.2} (tol [0.5,1.5]); {}",
            table.order_plus,
            table.order_minus,
            rows.join("; ")
        ),
    }
}

/// Criterion 12: sign structure on the convex wedge — characteristic
/// derivatives of c below the straight-wedge noise floor everywhere beyond
/// the seed region, and monotone weakening along the shock.
pub fn criterion_12() -> CriterionResult {
    let gas = gamma2_gas();
    let mut cfg = RunConfig::new(gas, log_bullet(), 0.04275);
    cfg.n_across = 61;
    cfg.x_max = 30.0;
    let res = run_cfg(&cfg);
    // noise floor: same resolution, straight wedge at the tip slope
    let mut ncfg = RunConfig::new(
        gas,
        WedgeProfile::new(WedgeFamily::Straight { slope: tan_deg(10.0) }).unwrap(),
        0.04275,
    );
    ncfg.n_across = 61;
    ncfg.x_max = 30.0;
    let nres = run_cfg(&ncfg);
    let floor = {
        let derivs = diag::char_derivatives(&nres.net, &gas);
        let mut m = 0.0f64;
        for (k, line) in nres.net.lines.iter().enumerate() {
            if line.points[0].x < 10.0 * ncfg.x_start {
                continue;
            }
            for (i, _) in line.points.iter().enumerate() {
                if let Some((dp, dm)) = derivs[k][i] {
                    m = m.max(dp.abs()).max(dm.abs());
                }
            }
        }
        m
    };
    let derivs = diag::char_derivatives(&res.net, &gas);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_x = f64::NAN;
    for (k, line) in res.net.lines.iter().enumerate() {
        if line.points[0].x < 10.0 * cfg.x_start {
            continue;
        }
        for (i, _) in line.points.iter().enumerate() {
            if let Some((dp, dm)) = derivs[k][i] {
                if dp.max(dm) > worst {
                    worst = dp.max(dm);
                    worst_x = line.points[0].x;
                }
            }
        }
    }
    let signs_ok = worst < floor;
    let qs: Vec<f64> = res.shock.nodes.iter().map(|n| n.state.q()).collect();
    let start = res
        .shock
        .nodes
        .iter()
        .position(|n| n.x >= 10.0 * cfg.x_start)
        .unwrap_or(0);
    let mut q_monotone = true;
    for w in qs[start..].windows(2) {
        if w[1] < w[0] - 1e-12 {
            q_monotone = false;
        }
    }
    let pass = signs_ok && q_monotone;
    CriterionResult {
        id: 12,
        name: "convex-wedge sign structure".into(),
        pass,
        detail: format!(
            "max derivative {worst:.3e} at x={worst_x:.3} vs noise floor {floor:.3e}; q monotone along shock: {q_monotone}. Constant-state seeding launches startup reflection waves that damp geometrically per wall/shock cycle; within [10 x_start, ~2] they still exceed the straight-wedge floor."
        ),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(),
    ]
}
