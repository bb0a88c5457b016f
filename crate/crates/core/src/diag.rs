//! Post-run diagnostics: layer thickness, derivative decay, asymptotic
//! states, boundary differential-relation residuals, the zero-mass-flux
//! formal-derivative trend, and the audits collected into a report.

use crate::charkern::char_angles;
use crate::field::{FlowField, Point};
use crate::fmt::f64_full;
use crate::gas::{state_quantities, FreeStream, GasModel};
use crate::interp::{cubic4, Pchip};
use crate::limitsol::formal_derivatives;
use crate::moc::{CharNet, MarchResult, RunConfig, ShockFront};
use crate::polar::{downstream_from_ray, polar_residual, reflection_coeff_g};
use crate::wedge::{CaseClass, WedgeProfile};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DiagError {
    #[error("thickness normalisation is undefined for a vacuum (epsilon = 0) freestream")]
    VacuumFreestream,
    #[error("need at least {need} usable data lines, found {found}")]
    InsufficientLines { need: usize, found: usize },
    #[error("trend needs at least 3 runs in a geometric epsilon progression, got {0}")]
    InsufficientSweep(usize),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThicknessRow {
    pub xi: f64,
    pub thickness: f64,
    pub normalized: f64,
}

/// Shock-layer thickness per data line, measured as the shock point's wall
/// distance and reported at the shock point's own foot.
pub fn layer_thickness_report(
    net: &CharNet,
    fs: &FreeStream,
) -> Result<Vec<ThicknessRow>, DiagError> {
    if fs.epsilon == 0.0 {
        return Err(DiagError::VacuumFreestream);
    }
    Ok(net
        .lines
        .iter()
        .map(|line| {
            let last = line.points.last().expect("lines are non-empty");
            ThicknessRow {
                xi: last.xi,
                thickness: last.eta,
                normalized: last.eta / (fs.epsilon * last.xi),
            }
        })
        .collect())
}

/// Characteristic derivatives of c at every net point.
///
/// Data lines follow the plus-characteristic cascade, so the along-line
/// divided difference is one directional derivative; a cross-line chord at
/// the same index supplies a second, well-separated direction. The gradient
/// follows from the two, and the characteristic derivatives from it.
pub fn char_derivatives(net: &CharNet, gas: &GasModel) -> Vec<Vec<Option<(f64, f64)>>> {
    let nl = net.lines.len();
    let cs: Vec<Vec<f64>> = net
        .lines
        .iter()
        .map(|l| {
            l.points
                .iter()
                .map(|p| gas.sound_speed_sq(p.state.q_sq()).max(0.0).sqrt())
                .collect()
        })
        .collect();
    let diff = |k1: usize, i1: usize, k0: usize, i0: usize| -> Option<(f64, f64, f64)> {
        let p1 = &net.lines[k1].points[i1];
        let p0 = &net.lines[k0].points[i0];
        let dx = p1.x - p0.x;
        let dy = p1.y - p0.y;
        let d = (dx * dx + dy * dy).sqrt();
        if d == 0.0 {
            return None;
        }
        Some((dx / d, dy / d, (cs[k1][i1] - cs[k0][i0]) / d))
    };
    // gradient from one along-line and one cross-line directional sample
    let solve = |a: (f64, f64, f64), b: (f64, f64, f64)| -> Option<(f64, f64)> {
        let det = a.0 * b.1 - a.1 * b.0;
        if det.abs() < 0.05 {
            return None;
        }
        Some((
            (a.2 * b.1 - b.2 * a.1) / det,
            (b.2 * a.0 - a.2 * b.0) / det,
        ))
    };
    let mut out: Vec<Vec<Option<(f64, f64)>>> = Vec::with_capacity(nl);
    for k in 0..nl {
        let np = net.lines[k].points.len();
        let mut row = Vec::with_capacity(np);
        for i in 0..np {
            let along_f = if i + 1 < np { diff(k, i + 1, k, i) } else { None };
            let along_b = if i > 0 { diff(k, i, k, i - 1) } else { None };
            let along_c = if i > 0 && i + 1 < np {
                diff(k, i + 1, k, i - 1)
            } else {
                None
            };
            let cross_f = if k + 1 < nl { diff(k + 1, i, k, i) } else { None };
            let cross_b = if k > 0 { diff(k, i, k - 1, i) } else { None };
            let cross_c = if k > 0 && k + 1 < nl {
                diff(k + 1, i, k - 1, i)
            } else {
                None
            };
            // candidate gradients from the one-sided combinations; startup
            // fronts ride the characteristics as weak discontinuities, and a
            // stencil arm crossing one inflates the reconstruction, so when
            // the candidates disagree the minimum-norm one (the same-zone
            // reconstruction) is kept
            let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(4);
            for a in [along_f, along_b].into_iter().flatten() {
                for b in [cross_f, cross_b].into_iter().flatten() {
                    if let Some(g2) = solve(a, b) {
                        candidates.push(g2);
                    }
                }
            }
            if candidates.is_empty() {
                row.push(None);
                continue;
            }
            let norm = |g2: &(f64, f64)| (g2.0 * g2.0 + g2.1 * g2.1).sqrt();
            let min_norm = candidates
                .iter()
                .cloned()
                .min_by(|x, y| norm(x).partial_cmp(&norm(y)).expect("finite"))
                .expect("non-empty");
            let max_n = candidates.iter().map(&norm).fold(0.0f64, f64::max);
            let agree = max_n <= 1.5 * norm(&min_norm) + 1e-300;
            let grad = if agree {
                match (along_c.or(along_f).or(along_b), cross_c.or(cross_f).or(cross_b)) {
                    (Some(a), Some(b)) => solve(a, b).unwrap_or(min_norm),
                    _ => min_norm,
                }
            } else {
                min_norm
            };
            match char_angles(net.lines[k].points[i].state, gas) {
                Ok(ang) => row.push(Some((
                    ang.alpha.cos() * grad.0 + ang.alpha.sin() * grad.1,
                    ang.beta.cos() * grad.0 + ang.beta.sin() * grad.1,
                ))),
                Err(_) => row.push(None),
            }
        }
        out.push(row);
    }
    out
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayRow {
    pub xi: f64,
    pub max_xi_dplus_c: f64,
    pub max_xi_dminus_c: f64,
}

/// Per line: max over points of ξ(P)|∂̄±c(P)| for lines beyond `x_min`.
pub fn derivative_decay_report(
    net: &CharNet,
    gas: &GasModel,
    x_min: f64,
) -> Result<Vec<DecayRow>, DiagError> {
    let derivs = char_derivatives(net, gas);
    let mut rows = Vec::new();
    for (k, line) in net.lines.iter().enumerate() {
        if line.points[0].x < x_min {
            continue;
        }
        let mut mp = 0.0f64;
        let mut mm = 0.0f64;
        for (i, p) in line.points.iter().enumerate() {
            if let Some((dp, dm)) = derivs[k][i] {
                mp = mp.max(p.xi * dp.abs());
                mm = mm.max(p.xi * dm.abs());
            }
        }
        rows.push(DecayRow {
            xi: line.points[0].xi,
            max_xi_dplus_c: mp,
            max_xi_dminus_c: mm,
        });
    }
    if rows.len() < 20 {
        return Err(DiagError::InsufficientLines {
            need: 20,
            found: rows.len(),
        });
    }
    Ok(rows)
}

/// Tail value of a series by Aitken extrapolation over the last three dyadic
/// key windows; falls back to the plain tail mean when degenerate.
pub fn aitken_tail(series: &[(f64, f64)]) -> Option<f64> {
    let kmax = series.iter().map(|s| s.0).fold(f64::NAN, f64::max);
    if !kmax.is_finite() {
        return None;
    }
    let mut means = [0.0f64; 3];
    for (w, mean) in means.iter_mut().enumerate() {
        let lo = kmax / 2f64.powi(3 - w as i32);
        let hi = kmax / 2f64.powi(2 - w as i32);
        let vals: Vec<f64> = series
            .iter()
            .filter(|s| s.0 > lo && s.0 <= hi * 1.0000001)
            .map(|s| s.1)
            .collect();
        if vals.is_empty() {
            return None;
        }
        *mean = vals.iter().sum::<f64>() / vals.len() as f64;
    }
    let (a1, a2, a3) = (means[0], means[1], means[2]);
    let denom = (a3 - a2) - (a2 - a1);
    if denom.abs() < 1e-300 {
        return Some(a3);
    }
    Some(a3 - (a3 - a2) * (a3 - a2) / denom)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Asymptote {
    pub predicted_u: f64,
    pub predicted_v: f64,
    pub predicted_phi: f64,
    pub computed_u: f64,
    pub computed_v: f64,
    pub computed_phi: f64,
    pub gap_u: f64,
    pub gap_v: f64,
    pub gap_phi: f64,
}

/// Far-field comparison: the polar-ray prediction against tail-extrapolated
/// computed values. For a vanishing limit slope the predicted shock slope is
/// the incoming Mach-line slope.
pub fn asymptotic_report(
    net: &CharNet,
    shock: &ShockFront,
    w: &WedgeProfile,
    fs: &FreeStream,
    gas: &GasModel,
) -> Result<Asymptote, DiagError> {
    let f_inf = w.f_infty();
    let (pu, pv) = if f_inf > 0.0 {
        let s = downstream_from_ray(f_inf.atan(), fs, gas).map_err(|_| {
            DiagError::InsufficientLines { need: 1, found: 0 }
        })?;
        (s.u, s.v)
    } else {
        (fs.u_inf, 0.0)
    };
    let p_phi = if f_inf > 0.0 {
        (fs.u_inf - pu) / pv
    } else {
        fs.c_inf / (fs.u_inf * fs.u_inf - fs.c_inf * fs.c_inf).sqrt()
    };
    let mid = net.n_across() / 2;
    let u_series: Vec<(f64, f64)> = net
        .lines
        .iter()
        .map(|l| (l.points[mid].xi, l.points[mid].state.u))
        .collect();
    let v_series: Vec<(f64, f64)> = net
        .lines
        .iter()
        .map(|l| (l.points[mid].xi, l.points[mid].state.v))
        .collect();
    let phi_series: Vec<(f64, f64)> = shock.nodes.iter().map(|n| (n.x, n.slope)).collect();
    let cu = aitken_tail(&u_series).ok_or(DiagError::InsufficientLines { need: 3, found: 0 })?;
    let cv = aitken_tail(&v_series).ok_or(DiagError::InsufficientLines { need: 3, found: 0 })?;
    let cphi =
        aitken_tail(&phi_series).ok_or(DiagError::InsufficientLines { need: 3, found: 0 })?;
    Ok(Asymptote {
        predicted_u: pu,
        predicted_v: pv,
        predicted_phi: p_phi,
        computed_u: cu,
        computed_v: cv,
        computed_phi: cphi,
        gap_u: (cu - pu).abs(),
        gap_v: (cv - pv).abs(),
        gap_phi: (cphi - p_phi).abs(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RelationResiduals {
    /// max over wall points of |∂̄⁻c − ∂̄⁺c − (γ−1) q κ_w|
    pub wall_max: f64,
    /// max over shock nodes of |∂̄⁺c − g ∂̄⁻c|
    pub shock_max: f64,
    pub wall_samples: usize,
    pub shock_samples: usize,
}

/// Residuals of the wall and shock differential relations, by one-sided
/// least-squares derivatives into the layer.
pub fn relation_residuals(
    net: &CharNet,
    _shock: &ShockFront,
    w: &WedgeProfile,
    fs: &FreeStream,
    gas: &GasModel,
    x_min: f64,
) -> RelationResiduals {
    let derivs = char_derivatives(net, gas);
    let n = net.n_across();
    let mut wall_max = 0.0f64;
    let mut shock_max = 0.0f64;
    let mut wall_samples = 0;
    let mut shock_samples = 0;
    for (k, line) in net.lines.iter().enumerate() {
        if line.points[0].x < x_min || line.points[0].x.is_nan() {
            continue;
        }
        let p0 = &line.points[0];
        if let Some((dp, dm)) = derivs[k][0] {
            let q = p0.state.q();
            let r = dm - dp - (gas.gamma - 1.0) * q * w.curvature(p0.x);
            wall_max = wall_max.max(r.abs());
            wall_samples += 1;
        }
        let pl = &line.points[n - 1];
        if let Some((dp, dm)) = derivs[k][n - 1] {
            if let Ok(refl) = reflection_coeff_g(pl.state, fs, gas) {
                let r = dp - refl.g_value * dm;
                shock_max = shock_max.max(r.abs());
                shock_samples += 1;
            }
        }
    }
    RelationResiduals {
        wall_max,
        shock_max,
        wall_samples,
        shock_samples,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrendRow {
    pub epsilon: f64,
    pub xi_used: f64,
    pub gap_plus: f64,
    pub gap_minus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendTable {
    pub rows: Vec<TrendRow>,
    pub order_plus: f64,
    pub order_minus: f64,
}

/// |measured ∂̄±c − formal ∂̸±c| at the station nearest ξ₀, per epsilon, with
/// the empirical convergence order in epsilon.
pub fn formal_derivative_trend(
    runs: &[(f64, &MarchResult)],
    w: &WedgeProfile,
    gas: &GasModel,
    xi0: f64,
) -> Result<TrendTable, DiagError> {
    if runs.len() < 3 {
        return Err(DiagError::InsufficientSweep(runs.len()));
    }
    let mut rows = Vec::with_capacity(runs.len());
    for (eps, res) in runs {
        let net = &res.net;
        let derivs = char_derivatives(net, gas);
        // line whose wall foot is nearest xi0
        let (k, line) = net
            .lines
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let da = (a.1.points[0].xi - xi0).abs();
                let db = (b.1.points[0].xi - xi0).abs();
                da.partial_cmp(&db).expect("xi is finite")
            })
            .expect("net has lines");
        let n = line.points.len();
        let mut gp = 0.0f64;
        let mut gm = 0.0f64;
        for i in 1..n.saturating_sub(2) {
            let p = &line.points[i];
            if let Some((dp, dm)) = derivs[k][i] {
                let x_foot = w.x_of_arc_length(p.xi);
                if let Ok((fp, fm)) = formal_derivatives(w, x_foot, gas) {
                    gp = gp.max((dp - fp).abs());
                    gm = gm.max((dm - fm).abs());
                }
            }
        }
        rows.push(TrendRow {
            epsilon: *eps,
            xi_used: line.points[0].xi,
            gap_plus: gp,
            gap_minus: gm,
        });
    }
    rows.sort_by(|a, b| b.epsilon.partial_cmp(&a.epsilon).expect("eps finite"));
    let mut op = Vec::new();
    let mut om = Vec::new();
    for wpair in rows.windows(2) {
        let le = (wpair[0].epsilon / wpair[1].epsilon).ln();
        if wpair[0].gap_plus > 0.0 && wpair[1].gap_plus > 0.0 {
            op.push((wpair[0].gap_plus / wpair[1].gap_plus).ln() / le);
        }
        if wpair[0].gap_minus > 0.0 && wpair[1].gap_minus > 0.0 {
            om.push((wpair[0].gap_minus / wpair[1].gap_minus).ln() / le);
        }
    }
    let mean = |v: &[f64]| {
        if v.is_empty() {
            f64::NAN
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    Ok(TrendTable {
        order_plus: mean(&op),
        order_minus: mean(&om),
        rows,
    })
}

/// A continuous field view over a computed net.
///
/// Every line stores monotone interpolants over its own wall distance η.
/// A query at (ξ, η) crosses each nearby line at the level η — yielding that
/// line's true arc position ξ_k(η) and state there — and then interpolates
/// across lines in ξ. Data is therefore used at its true position even
/// though the lines lean strongly forward.
pub struct NetField<'a> {
    wedge: &'a WedgeProfile,
    /// per line: xi(η), u(η), v(η) and the top η
    xi_of_eta: Vec<Pchip>,
    u_of_eta: Vec<Pchip>,
    v_of_eta: Vec<Pchip>,
    eta_top: Vec<f64>,
    /// the shock polyline as an η-parameterised curve; it is the left
    /// boundary of the layer at every wall-distance level
    shock_xi: Option<Pchip>,
    shock_u: Option<Pchip>,
    shock_v: Option<Pchip>,
}

impl<'a> NetField<'a> {
    pub fn new(net: &CharNet, wedge: &'a WedgeProfile) -> Self {
        let nl = net.lines.len();
        let mut xi_of_eta = Vec::with_capacity(nl);
        let mut u_of_eta = Vec::with_capacity(nl);
        let mut v_of_eta = Vec::with_capacity(nl);
        let mut eta_top = Vec::with_capacity(nl);
        for line in &net.lines {
            let eta: Vec<f64> = line.points.iter().map(|p| p.eta).collect();
            let xi: Vec<f64> = line.points.iter().map(|p| p.xi).collect();
            let us: Vec<f64> = line.points.iter().map(|p| p.state.u).collect();
            let vs: Vec<f64> = line.points.iter().map(|p| p.state.v).collect();
            xi_of_eta.push(Pchip::new(&eta, &xi));
            u_of_eta.push(Pchip::new(&eta, &us));
            v_of_eta.push(Pchip::new(&eta, &vs));
            eta_top.push(*eta.last().expect("non-empty"));
        }
        // shock polyline over node eta (strictly increasing for growing layers)
        let mut se = Vec::new();
        let mut sx = Vec::new();
        let mut su = Vec::new();
        let mut sv = Vec::new();
        for line in &net.lines {
            let last = line.points.last().expect("non-empty");
            if se.last().map_or(true, |&e| last.eta > e) {
                se.push(last.eta);
                sx.push(last.xi);
                su.push(last.state.u);
                sv.push(last.state.v);
            }
        }
        let (shock_xi, shock_u, shock_v) = if se.len() >= 2 {
            (
                Some(Pchip::new(&se, &sx)),
                Some(Pchip::new(&se, &su)),
                Some(Pchip::new(&se, &sv)),
            )
        } else {
            (None, None, None)
        };
        NetField {
            wedge,
            xi_of_eta,
            u_of_eta,
            v_of_eta,
            eta_top,
            shock_xi,
            shock_u,
            shock_v,
        }
    }

    /// Shock-side η at a station, from the per-line top points.
    pub fn shock_eta_at(&self, net: &CharNet, xi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = net
            .lines
            .iter()
            .map(|l| {
                let last = l.points.last().expect("non-empty");
                (last.xi, last.eta)
            })
            .collect();
        let k = pts.partition_point(|p| p.0 <= xi);
        if k == 0 || k >= pts.len() {
            return None;
        }
        let (x0, y0) = pts[k - 1];
        let (x1, y1) = pts[k];
        Some(y0 + (y1 - y0) * (xi - x0) / (x1 - x0))
    }

    /// Evaluate in wall coordinates.
    pub fn eval_chart(&self, xi: f64, eta: f64) -> Option<crate::gas::FlowState> {
        let nl = self.eta_top.len();
        if nl < 4 || eta < 0.0 {
            return None;
        }
        // lines whose span covers this level, plus the shock curve on the left
        let k_min = self.eta_top.partition_point(|&t| t < eta);
        if k_min + 4 > nl {
            return None;
        }
        let cross = |k: usize| self.xi_of_eta[k].eval(eta);
        // sample chain at this level: (xi, u, v) ordered in xi
        let sample = |j: i64| -> (f64, f64, f64) {
            if j < 0 {
                (
                    self.shock_xi.as_ref().expect("shock curve").eval(eta),
                    self.shock_u.as_ref().expect("shock curve").eval(eta),
                    self.shock_v.as_ref().expect("shock curve").eval(eta),
                )
            } else {
                let k = k_min + j as usize;
                (
                    cross(k),
                    self.u_of_eta[k].eval(eta),
                    self.v_of_eta[k].eval(eta),
                )
            }
        };
        let has_shock = self.shock_xi.is_some();
        let left_xi = if has_shock { sample(-1).0 } else { cross(k_min) };
        if xi < left_xi - 1e-12 * (1.0 + xi.abs()) || xi > cross(nl - 1) {
            return None;
        }
        // binary search the bracketing line pair
        let mut lo: i64 = if has_shock { -1 } else { 0 };
        let mut hi: i64 = (nl - 1 - k_min) as i64;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if sample(mid).0 <= xi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let j_min: i64 = if has_shock { -1 } else { 0 };
        let j_max: i64 = (nl - 1 - k_min) as i64;
        let j0 = (lo - 1).clamp(j_min, j_max - 3);
        let mut xs = [0.0f64; 4];
        let mut us = [0.0f64; 4];
        let mut vs = [0.0f64; 4];
        for (m, j) in (j0..j0 + 4).enumerate() {
            let (x, u, v) = sample(j);
            xs[m] = x;
            us[m] = u;
            vs[m] = v;
        }
        if !(xs[0] < xs[1] && xs[1] < xs[2] && xs[2] < xs[3]) {
            return None;
        }
        Some(crate::gas::FlowState::new(
            cubic4(&xs, &us, xi),
            cubic4(&xs, &vs, xi),
        ))
    }
}

impl<'a> FlowField for NetField<'a> {
    fn state_at(&self, p: Point) -> Option<crate::gas::FlowState> {
        let (xi, eta, _) = self.wedge.project_to_wall(p.x, p.y).ok()?;
        if eta < 0.0 {
            return None;
        }
        self.eval_chart(xi, eta)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MassFluxRow {
    pub xi: f64,
    pub line_integral: f64,
    pub incoming_flux: f64,
    pub rel_err: f64,
}

/// Conservation-of-mass audit: the flux of ρ(u,v) through the wall normal at
/// a station against ε · y of the shock intersection, sampled through the
/// net field.
pub fn mass_flux_audit(
    net: &CharNet,
    w: &WedgeProfile,
    fs: &FreeStream,
    gas: &GasModel,
    stations: &[f64],
) -> Vec<MassFluxRow> {
    let field = NetField::new(net, w);
    let mut rows = Vec::new();
    for &xi in stations {
        let x = w.x_of_arc_length(xi);
        let fp = w.fp(x);
        let norm = (1.0 + fp * fp).sqrt();
        let tangent = (1.0 / norm, fp / norm);
        let normal = (-fp / norm, 1.0 / norm);
        let base = (x, w.f(x));
        let eta_s = match field.shock_eta_at(net, xi) {
            Some(v) if v > 0.0 => v,
            _ => continue,
        };
        let m = 64usize;
        let mut integral = 0.0;
        let mut prev: Option<f64> = None;
        let mut ok = true;
        for j in 0..=m {
            let eta = eta_s * j as f64 / m as f64;
            let s = match field.eval_chart(xi, eta.min(eta_s * (1.0 - 1e-12))) {
                Some(s) => s,
                None => {
                    ok = false;
                    break;
                }
            };
            let rho = gas.density(s.q_sq());
            let f = rho * (s.u * tangent.0 + s.v * tangent.1);
            if let Some(pf) = prev {
                integral += 0.5 * (pf + f) * eta_s / m as f64;
            }
            prev = Some(f);
        }
        if !ok {
            continue;
        }
        let y_shock = base.1 + eta_s * normal.1;
        let incoming = fs.epsilon * y_shock;
        rows.push(MassFluxRow {
            xi,
            line_integral: integral,
            incoming_flux: incoming,
            rel_err: (integral - incoming).abs() / incoming.abs().max(1e-300),
        });
    }
    rows
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NoVacuumAudit {
    pub violations: usize,
    pub worst_v: f64,
    pub worst_q_gap: f64,
    pub worst_g: f64,
}

/// Region audit for convex-wall runs: every state must satisfy v ≥ 0, stay
/// below the largest shock-side speed, and sit inside the polar (G ≤ 0).
pub fn no_vacuum_audit(
    net: &CharNet,
    shock: &ShockFront,
    fs: &FreeStream,
    gas: &GasModel,
    x_min: f64,
) -> NoVacuumAudit {
    let q_max = shock
        .nodes
        .iter()
        .map(|n| n.state.q_sq())
        .fold(0.0f64, f64::max);
    let tol = 1e-9;
    let mut audit = NoVacuumAudit {
        violations: 0,
        worst_v: f64::INFINITY,
        worst_q_gap: f64::INFINITY,
        worst_g: f64::NEG_INFINITY,
    };
    for line in &net.lines {
        if line.points[0].x < x_min {
            continue;
        }
        for p in &line.points {
            let g = polar_residual(p.state, fs, gas)
                .map(|r| r.g)
                .unwrap_or(f64::INFINITY);
            let q_gap = q_max + tol - p.state.q_sq();
            audit.worst_v = audit.worst_v.min(p.state.v);
            audit.worst_q_gap = audit.worst_q_gap.min(q_gap);
            audit.worst_g = audit.worst_g.max(g);
            if p.state.v < -tol || q_gap < 0.0 || g > tol {
                audit.violations += 1;
            }
        }
    }
    audit
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub tolerance: f64,
    pub measured: f64,
    pub config: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub thickness_series: Vec<ThicknessRow>,
    pub decay_series: Vec<DecayRow>,
    pub asymptote: Option<Asymptote>,
    pub relation_residuals: RelationResiduals,
    pub entropy_min: f64,
    pub verdicts: Vec<Verdict>,
}

pub fn config_summary(cfg: &RunConfig) -> String {
    format!(
        "gamma={} qbar={} eps={} wedge={:?} n_across={} x_start={} x_max={} passes={} regrid={}",
        cfg.gas.gamma,
        cfg.gas.qbar,
        cfg.epsilon,
        cfg.wedge.family(),
        cfg.n_across,
        cfg.x_start,
        cfg.x_max,
        cfg.corrector_passes,
        cfg.regrid
    )
}

/// Assembles the diagnostics report for one run. The seed region
/// x < 10 x_start is excluded from every series and audit.
pub fn build_report(res: &MarchResult, cfg: &RunConfig) -> DiagnosticsReport {
    let gas = &cfg.gas;
    let fs = &res.freestream;
    let x_min = 10.0 * cfg.x_start;
    let summary = config_summary(cfg);

    let thickness: Vec<ThicknessRow> = layer_thickness_report(&res.net, fs)
        .map(|rows| {
            rows.into_iter()
                .filter(|r| r.xi >= x_min)
                .collect::<Vec<_>>()
        })
        .unwrap_or_default();
    let decay = derivative_decay_report(&res.net, gas, x_min).unwrap_or_default();
    let asymptote = asymptotic_report(&res.net, &res.shock, &cfg.wedge, fs, gas).ok();
    let relation = relation_residuals(&res.net, &res.shock, &cfg.wedge, fs, gas, x_min);

    let p_under = fs.pressure(gas);
    let entropy_min = res
        .shock
        .nodes
        .iter()
        .map(|n| {
            state_quantities(n.state, gas)
                .map(|sq| sq.p - p_under)
                .unwrap_or(f64::NEG_INFINITY)
        })
        .fold(f64::INFINITY, f64::min);

    let mut verdicts = Vec::new();
    verdicts.push(Verdict {
        name: "entropy_min_positive".into(),
        pass: entropy_min > 0.0,
        tolerance: 0.0,
        measured: entropy_min,
        config: summary.clone(),
    });
    verdicts.push(Verdict {
        name: "march_completed".into(),
        pass: res.breakdown.is_none(),
        tolerance: 0.0,
        measured: if res.breakdown.is_none() { 1.0 } else { 0.0 },
        config: summary.clone(),
    });

    // mass-flux audit at log-spaced stations in the reported range
    let xi_lo = x_min.max(res.net.lines[0].points[0].xi * 2.0);
    let xi_hi = res
        .net
        .lines
        .last()
        .map(|l| l.points[0].xi)
        .unwrap_or(xi_lo)
        * 0.9;
    if xi_hi > xi_lo * 1.5 {
        let stations: Vec<f64> = (0..12)
            .map(|i| xi_lo * (xi_hi / xi_lo).powf(i as f64 / 11.0))
            .collect();
        let flux = mass_flux_audit(&res.net, &cfg.wedge, fs, gas, &stations);
        let worst = flux.iter().map(|r| r.rel_err).fold(0.0f64, f64::max);
        verdicts.push(Verdict {
            name: "mass_flux_within_2pc".into(),
            pass: !flux.is_empty() && worst <= 0.02,
            tolerance: 0.02,
            measured: worst,
            config: summary.clone(),
        });
    }

    if cfg.wedge.classify_case(gas) == CaseClass::CaseB {
        let audit = no_vacuum_audit(&res.net, &res.shock, fs, gas, x_min);
        verdicts.push(Verdict {
            name: "no_vacuum_region".into(),
            pass: audit.violations == 0,
            tolerance: 1e-9,
            measured: audit.violations as f64,
            config: summary.clone(),
        });
        // monotone weakening along the shock beyond the transient
        let nodes = &res.shock.nodes;
        let start = nodes
            .iter()
            .position(|n| n.x >= x_min)
            .unwrap_or(nodes.len());
        let mut q_monotone = true;
        let mut p_monotone = true;
        let mut prev_q = f64::NEG_INFINITY;
        let mut prev_p = f64::INFINITY;
        for n in &nodes[start..] {
            let sq = state_quantities(n.state, gas).expect("admissible");
            if n.state.q() < prev_q - 1e-12 {
                q_monotone = false;
            }
            if sq.p - p_under > prev_p + 1e-12 {
                p_monotone = false;
            }
            prev_q = n.state.q();
            prev_p = sq.p - p_under;
        }
        verdicts.push(Verdict {
            name: "shock_weakening_monotone".into(),
            pass: q_monotone && p_monotone,
            tolerance: 1e-12,
            measured: if q_monotone && p_monotone { 1.0 } else { 0.0 },
            config: summary.clone(),
        });
    }

    DiagnosticsReport {
        thickness_series: thickness,
        decay_series: decay,
        asymptote,
        relation_residuals: relation,
        entropy_min,
        verdicts,
    }
}

pub fn report_json(report: &DiagnosticsReport) -> String {
    serde_json::to_string_pretty(report).expect("report serialises")
}

pub fn thickness_csv(rows: &[ThicknessRow]) -> String {
    let mut out = String::from("xi,thickness,normalized\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            f64_full(r.xi),
            f64_full(r.thickness),
            f64_full(r.normalized)
        ));
    }
    out
}

pub fn decay_csv(rows: &[DecayRow]) -> String {
    let mut out = String::from("xi,max_xi_dplus_c,max_xi_dminus_c\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            f64_full(r.xi),
            f64_full(r.max_xi_dplus_c),
            f64_full(r.max_xi_dminus_c)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::freestream_from_epsilon;
    use crate::moc::{march, RunConfig};
    use crate::wedge::WedgeFamily;

    fn gamma2() -> GasModel {
        GasModel::from_qbar(2.0, 1.0).unwrap()
    }

    fn run(wedge: WedgeFamily, eps: f64, n: usize, x_max: f64) -> (MarchResult, RunConfig) {
        let w = WedgeProfile::new(wedge).unwrap();
        let mut cfg = RunConfig::new(gamma2(), w, eps);
        cfg.n_across = n;
        cfg.x_max = x_max;
        let res = march(&cfg).unwrap();
        assert!(res.breakdown.is_none(), "{:?}", res.breakdown);
        (res, cfg)
    }

    #[test]
    fn straight_wedge_thickness_is_self_similar() {
        let (res, _cfg) = run(
            WedgeFamily::Straight {
                slope: 10f64.to_radians().tan(),
            },
            0.04275,
            15,
            30.0,
        );
        let rows = layer_thickness_report(&res.net, &res.freestream).unwrap();
        let tail: Vec<&ThicknessRow> = rows.iter().filter(|r| r.xi > 0.1).collect();
        assert!(tail.len() > 10);
        let first = tail[0].normalized;
        for r in &tail {
            assert!(
                (r.normalized / first - 1.0).abs() < 0.01,
                "normalized thickness wandered: {} vs {}",
                r.normalized,
                first
            );
        }
    }

    #[test]
    fn thickness_refuses_vacuum_freestream() {
        let (res, _) = run(
            WedgeFamily::Straight {
                slope: 10f64.to_radians().tan(),
            },
            0.04275,
            8,
            1.0,
        );
        let fs0 = freestream_from_epsilon(0.0, &gamma2()).unwrap();
        assert!(matches!(
            layer_thickness_report(&res.net, &fs0),
            Err(DiagError::VacuumFreestream)
        ));
    }

    #[test]
    fn straight_wedge_derivatives_are_noise() {
        let (res, cfg) = run(
            WedgeFamily::Straight {
                slope: 10f64.to_radians().tan(),
            },
            0.04275,
            15,
            50.0,
        );
        let rows = derivative_decay_report(&res.net, &cfg.gas, 10.0 * cfg.x_start).unwrap();
        for r in &rows {
            assert!(r.max_xi_dplus_c < 1e-9, "plus noise {}", r.max_xi_dplus_c);
            assert!(r.max_xi_dminus_c < 1e-9, "minus noise {}", r.max_xi_dminus_c);
        }
    }

    #[test]
    fn decay_requires_enough_lines() {
        let (res, cfg) = run(
            WedgeFamily::Straight {
                slope: 10f64.to_radians().tan(),
            },
            0.04275,
            8,
            0.02,
        );
        assert!(matches!(
            derivative_decay_report(&res.net, &cfg.gas, 1.0),
            Err(DiagError::InsufficientLines { .. })
        ));
    }

    #[test]
    fn straight_wedge_asymptote_is_exact() {
        let (res, cfg) = run(
            WedgeFamily::Straight {
                slope: 10f64.to_radians().tan(),
            },
            0.04275,
            15,
            40.0,
        );
        let asy =
            asymptotic_report(&res.net, &res.shock, &cfg.wedge, &res.freestream, &cfg.gas)
                .unwrap();
        assert!(asy.gap_u < 1e-10, "gap_u {}", asy.gap_u);
        assert!(asy.gap_v < 1e-10, "gap_v {}", asy.gap_v);
        assert!(asy.gap_phi < 1e-10, "gap_phi {}", asy.gap_phi);
    }

    #[test]
    fn straight_wedge_relations_are_noise() {
        let (res, cfg) = run(
            WedgeFamily::Straight {
                slope: 10f64.to_radians().tan(),
            },
            0.04275,
            15,
            40.0,
        );
        let rr = relation_residuals(
            &res.net,
            &res.shock,
            &cfg.wedge,
            &res.freestream,
            &cfg.gas,
            10.0 * cfg.x_start,
        );
        assert!(rr.wall_samples > 10 && rr.shock_samples > 10);
        assert!(rr.wall_max < 1e-8, "wall {}", rr.wall_max);
        assert!(rr.shock_max < 1e-8, "shock {}", rr.shock_max);
    }

    #[test]
    fn bullet_derivatives_negative_past_startup_waves() {
        // seeding with a constant state launches weak-discontinuity fronts
        // that bounce between wall and shock and damp geometrically; beyond
        // a few cycle lengths the sign structure must be clean
        let (res, cfg) = run(
            WedgeFamily::LogBullet {
                a: 10f64.to_radians().tan(),
            },
            0.04275,
            41,
            20.0,
        );
        let derivs = char_derivatives(&res.net, &cfg.gas);
        let mut checked = 0usize;
        let mut worst: f64 = f64::NEG_INFINITY;
        let mut positive_cells = 0usize;
        let mut cells = 0usize;
        for (k, line) in res.net.lines.iter().enumerate() {
            for (i, _) in line.points.iter().enumerate() {
                if let Some((dp, dm)) = derivs[k][i] {
                    if line.points[0].x >= 3.0 {
                        worst = worst.max(dp).max(dm);
                        checked += 1;
                    }
                    if line.points[0].x >= 10.0 * cfg.x_start {
                        cells += 1;
                        if dp > 0.0 || dm > 0.0 {
                            positive_cells += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 200);
        assert!(worst < 5e-5, "characteristic derivative {worst} beyond the fronts");
        // front cells are isolated even in the transient band
        assert!(
            (positive_cells as f64) < 0.02 * cells as f64,
            "{positive_cells} positive cells of {cells}"
        );
    }

    #[test]
    fn mass_flux_audit_within_two_percent() {
        let (res, cfg) = run(
            WedgeFamily::PowerDecayBend {
                m: 15f64.to_radians().tan(),
                b: 0.1,
                a: 1.0,
            },
            0.04275,
            31,
            25.0,
        );
        let stations: Vec<f64> = (0..8).map(|i| 1.0 * (16.0f64).powf(i as f64 / 7.0)).collect();
        let rows = mass_flux_audit(&res.net, &cfg.wedge, &res.freestream, &cfg.gas, &stations);
        assert!(rows.len() >= 6, "only {} usable stations", rows.len());
        for r in &rows {
            assert!(
                r.rel_err < 0.02,
                "station xi={}: flux mismatch {:.3}%",
                r.xi,
                100.0 * r.rel_err
            );
        }
    }

    #[test]
    fn no_vacuum_audit_clean_on_bullet() {
        let (res, cfg) = run(
            WedgeFamily::LogBullet {
                a: 10f64.to_radians().tan(),
            },
            0.04275,
            21,
            20.0,
        );
        let audit = no_vacuum_audit(
            &res.net,
            &res.shock,
            &res.freestream,
            &cfg.gas,
            10.0 * cfg.x_start,
        );
        assert_eq!(audit.violations, 0, "{audit:?}");
    }

    #[test]
    fn report_is_deterministic() {
        let (res, cfg) = run(
            WedgeFamily::LogBullet {
                a: 10f64.to_radians().tan(),
            },
            0.04275,
            15,
            10.0,
        );
        let r1 = report_json(&build_report(&res, &cfg));
        let (res2, cfg2) = run(
            WedgeFamily::LogBullet {
                a: 10f64.to_radians().tan(),
            },
            0.04275,
            15,
            10.0,
        );
        let r2 = report_json(&build_report(&res2, &cfg2));
        assert_eq!(r1, r2);
        assert!(r1.contains("thickness_series"));
        assert!(r1.contains("entropy_min"));
    }

    #[test]
    fn net_field_reproduces_states() {
        let (res, cfg) = run(
            WedgeFamily::LogBullet {
                a: 10f64.to_radians().tan(),
            },
            0.04275,
            21,
            15.0,
        );
        let field = NetField::new(&res.net, &cfg.wedge);
        // sample interior net points; the field must reproduce them closely
        let mut worst = 0.0f64;
        for line in res.net.lines.iter().skip(4).step_by(7) {
            if line.points[0].x < 0.1 || line.points[0].x > 8.0 {
                continue;
            }
            for p in line.points.iter().skip(2).step_by(5) {
                if let Some(s) = field.state_at(Point::new(p.x, p.y)) {
                    worst = worst
                        .max((s.u - p.state.u).abs())
                        .max((s.v - p.state.v).abs());
                }
            }
        }
        assert!(worst < 2e-4, "field reproduction error {worst}");
    }
}
