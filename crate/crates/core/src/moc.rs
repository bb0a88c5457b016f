//! The marching solver: tip seeding, interior/wall/shock unit processes with
//! trapezoidal predictor–corrector compatibility relations, shock fitting on
//! the Rankine–Hugoniot polar, and net assembly.

use crate::charkern::{char_angles, CharError};
use crate::fmt::f64_full;
use crate::gas::{
    freestream_from_epsilon, state_quantities, FlowState, FreeStream, GasError, GasModel,
};
use crate::interp::Pchip;
use crate::polar::{downstream_from_ray, polar_residual, shock_angle, PolarError};
use crate::wedge::{CaseClass, WedgeError, WedgeProfile};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MocError {
    #[error(transparent)]
    Gas(#[from] GasError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Polar(#[from] PolarError),
    #[error(transparent)]
    Wedge(#[from] WedgeError),
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error("characteristics from the two parents do not intersect forward")]
    CharacteristicsDiverge,
    #[error("corrector did not converge within 10 passes (last change {0:e})")]
    CorrectorStall(f64),
    #[error("characteristic ordering violated at the candidate point (shock formation)")]
    ShockFormation,
    #[error("the minus characteristic does not reach the wall forward of its origin")]
    CharacteristicMissesWall,
    #[error("wall compatibility solve is singular")]
    WallSolveSingular,
    #[error("shock-point Newton iteration diverged")]
    NewtonDiverged,
    #[error("entropy condition violated at the fitted shock point (p <= incoming p)")]
    EntropyViolation,
    #[error("shock solution collapsed to the zero-strength state")]
    ShockDegenerate,
    #[error("seed line construction failed: {0}")]
    SeedFailed(String),
}

/// One computed net point with wall coordinates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NetPoint {
    pub x: f64,
    pub y: f64,
    pub state: FlowState,
    pub xi: f64,
    pub eta: f64,
    pub line_index: usize,
    pub point_index: usize,
}

/// One cross-layer data line, ordered from the wall point to the shock point.
#[derive(Debug, Clone, Serialize)]
pub struct DataLine {
    pub points: Vec<NetPoint>,
}

/// One fitted shock node with its slope and downstream state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShockNode {
    pub x: f64,
    pub y: f64,
    pub slope: f64,
    pub state: FlowState,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShockFront {
    pub nodes: Vec<ShockNode>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharNet {
    pub lines: Vec<DataLine>,
}

impl CharNet {
    pub fn n_across(&self) -> usize {
        self.lines.first().map_or(0, |l| l.points.len())
    }
}

/// Error location recorded when a march stops early.
#[derive(Debug, Clone, Serialize)]
pub struct Breakdown {
    pub line: usize,
    pub index: usize,
    pub message: String,
}

#[derive(Debug)]
pub struct MarchResult {
    pub net: CharNet,
    pub shock: ShockFront,
    pub freestream: FreeStream,
    pub breakdown: Option<Breakdown>,
}

/// Run configuration for a single march.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub gas: GasModel,
    pub wedge: WedgeProfile,
    pub epsilon: f64,
    pub n_across: usize,
    pub x_start: f64,
    pub x_max: f64,
    pub corrector_passes: u32,
    pub regrid: bool,
    pub max_lines: Option<usize>,
}

impl RunConfig {
    pub fn new(gas: GasModel, wedge: WedgeProfile, epsilon: f64) -> Self {
        RunConfig {
            gas,
            wedge,
            epsilon,
            n_across: 20,
            x_start: 1e-3,
            x_max: 50.0,
            corrector_passes: 2,
            regrid: true,
            max_lines: None,
        }
    }

    pub fn validate(&self) -> Result<(), MocError> {
        if self.n_across < 3 {
            return Err(MocError::InvalidConfig(format!(
                "n_across must be at least 3, got {}",
                self.n_across
            )));
        }
        if !(self.x_start > 0.0 && self.x_start < self.x_max) {
            return Err(MocError::InvalidConfig(format!(
                "need 0 < x_start < x_max, got x_start = {}, x_max = {}",
                self.x_start, self.x_max
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(MocError::InvalidConfig(
                "epsilon must be positive for a fitted run".into(),
            ));
        }
        if let CaseClass::Invalid(reason) = self.wedge.classify_case(&self.gas) {
            return Err(MocError::InvalidConfig(format!("wedge: {reason}")));
        }
        Ok(())
    }
}

const STATE_TOL: f64 = 1e-12;
const MAX_CORRECTOR: u32 = 10;

fn intersect_rays(
    ax: f64,
    ay: f64,
    a_angle: f64,
    bx: f64,
    by: f64,
    b_angle: f64,
) -> Option<(f64, f64, f64, f64)> {
    let (ca, sa) = (a_angle.cos(), a_angle.sin());
    let (cb, sb) = (b_angle.cos(), b_angle.sin());
    let det = cb * sa - ca * sb; // cross(db, da)
    if det.abs() < 1e-300 {
        return None;
    }
    let dx = bx - ax;
    let dy = by - ay;
    // a + t da = b + s db
    let t = (cb * dy - sb * dx) / det;
    let s = (ca * dy - sa * dx) / det;
    Some((ax + t * ca, ay + t * sa, t, s))
}

/// New interior point from a C⁺ parent `a` (below) and a C⁻ parent `b`
/// (above): position from the averaged characteristic directions, state from
/// the two trapezoidal compatibility relations.
pub fn interior_point(
    a: &NetPoint,
    b: &NetPoint,
    gas: &GasModel,
    passes: u32,
) -> Result<NetPoint, MocError> {
    let ang_a = char_angles(a.state, gas)?;
    let ang_b = char_angles(b.state, gas)?;
    let mut alpha_bar = ang_a.alpha;
    let mut beta_bar = ang_b.beta;
    let mut lam_minus = ang_a.lambda_minus;
    let mut lam_plus = ang_b.lambda_plus;
    let scale = (a.x.abs() + a.y.abs() + b.x.abs() + b.y.abs()).max(1.0);

    let sep = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
    let back_tol = 0.25 * sep + 1e-12 * scale;
    let eff = passes.min(MAX_CORRECTOR);
    let mut prev: Option<FlowState> = None;
    let mut out: Option<(f64, f64, FlowState)> = None;
    let mut last_change = f64::INFINITY;
    for _pass in 0..=eff {
        if alpha_bar.tan() <= beta_bar.tan() {
            return Err(MocError::ShockFormation);
        }
        let (px, py, t, s) = intersect_rays(a.x, a.y, alpha_bar, b.x, b.y, beta_bar)
            .ok_or(MocError::CharacteristicsDiverge)?;
        // near-collinear parents may cross a hair behind one of them; only a
        // crossing well behind a parent counts as divergence
        if t <= -back_tol || s <= -back_tol {
            return Err(MocError::CharacteristicsDiverge);
        }
        let denom = lam_minus - lam_plus;
        if denom.abs() < 1e-300 {
            return Err(MocError::ShockFormation);
        }
        let r1 = a.state.u + lam_minus * a.state.v;
        let r2 = b.state.u + lam_plus * b.state.v;
        let v_new = (r1 - r2) / denom;
        let u_new = r1 - lam_minus * v_new;
        let state = FlowState::new(u_new, v_new);
        let ang_p = char_angles(state, gas)?;
        out = Some((px, py, state));
        if let Some(p) = prev {
            last_change = (state.u - p.u).abs() + (state.v - p.v).abs();
            if last_change < STATE_TOL {
                break;
            }
        }
        prev = Some(state);
        alpha_bar = 0.5 * (ang_a.alpha + ang_p.alpha);
        beta_bar = 0.5 * (ang_b.beta + ang_p.beta);
        lam_minus = 0.5 * (ang_a.lambda_minus + ang_p.lambda_minus);
        lam_plus = 0.5 * (ang_b.lambda_plus + ang_p.lambda_plus);
    }
    if passes >= MAX_CORRECTOR && last_change > STATE_TOL {
        return Err(MocError::CorrectorStall(last_change));
    }
    let (px, py, state) = out.expect("at least the predictor pass ran");
    Ok(NetPoint {
        x: px,
        y: py,
        state,
        xi: f64::NAN,
        eta: f64::NAN,
        line_index: 0,
        point_index: 0,
    })
}

/// New wall point: the C⁻ from `b` is intersected with the wall by Newton,
/// and the state solves slip together with the plus-family compatibility.
pub fn wall_point(
    b: &NetPoint,
    w: &WedgeProfile,
    gas: &GasModel,
    passes: u32,
) -> Result<NetPoint, MocError> {
    let ang_b = char_angles(b.state, gas)?;
    let mut beta_bar = ang_b.beta;
    let mut lam_plus = ang_b.lambda_plus;
    let scale = (b.x.abs() + b.y.abs()).max(1.0);

    let eff = passes.min(MAX_CORRECTOR);
    let mut prev: Option<FlowState> = None;
    let mut out: Option<(f64, f64, FlowState)> = None;
    let mut last_change = f64::INFINITY;
    for _pass in 0..=eff {
        let (cb, sb) = (beta_bar.cos(), beta_bar.sin());
        // Newton for the arc parameter t with y_b + t sin = f(x_b + t cos)
        let mut t = {
            let gap = b.y - w.f(b.x);
            let d = w.fp(b.x) * cb - sb;
            if d.abs() < 1e-300 {
                return Err(MocError::CharacteristicMissesWall);
            }
            (gap / d).max(0.0)
        };
        let mut hit = false;
        for _ in 0..60 {
            let x = b.x + t * cb;
            let res = b.y + t * sb - w.f(x);
            let dres = sb - w.fp(x) * cb;
            if dres.abs() < 1e-300 {
                break;
            }
            let step = res / dres;
            t -= step;
            if step.abs() < 1e-15 * scale.max(t.abs()) {
                hit = true;
                break;
            }
        }
        if !hit || t <= 0.0 || !t.is_finite() {
            return Err(MocError::CharacteristicMissesWall);
        }
        let x_p = b.x + t * cb;
        let y_p = w.f(x_p);
        let fp = w.fp(x_p);
        let den = 1.0 + lam_plus * fp;
        if den.abs() < 1e-12 {
            return Err(MocError::WallSolveSingular);
        }
        let u_p = (b.state.u + lam_plus * b.state.v) / den;
        let state = FlowState::new(u_p, u_p * fp);
        let ang_p = char_angles(state, gas)?;
        out = Some((x_p, y_p, state));
        if let Some(p) = prev {
            last_change = (state.u - p.u).abs() + (state.v - p.v).abs();
            if last_change < STATE_TOL {
                break;
            }
        }
        prev = Some(state);
        beta_bar = 0.5 * (ang_b.beta + ang_p.beta);
        lam_plus = 0.5 * (ang_b.lambda_plus + ang_p.lambda_plus);
    }
    if passes >= MAX_CORRECTOR && last_change > STATE_TOL {
        return Err(MocError::CorrectorStall(last_change));
    }
    let (px, py, state) = out.expect("at least the predictor pass ran");
    Ok(NetPoint {
        x: px,
        y: py,
        state,
        xi: f64::NAN,
        eta: f64::NAN,
        line_index: 0,
        point_index: 0,
    })
}

/// New shock point: position from intersecting the C⁺ from `a` with the
/// shock line continued from `s_prev`; state from a 2-D Newton solve of the
/// polar condition together with the plus-family compatibility; the node
/// slope is re-fitted from the converged state.
pub fn shock_point(
    a: &NetPoint,
    s_prev: &ShockNode,
    fs: &FreeStream,
    gas: &GasModel,
    passes: u32,
) -> Result<(NetPoint, ShockNode), MocError> {
    let ang_a = char_angles(a.state, gas)?;
    let mut alpha_bar = ang_a.alpha;
    let mut lam_minus = ang_a.lambda_minus;
    let mut slope_bar = s_prev.slope;
    let scale = (a.x.abs() + a.y.abs() + s_prev.x.abs() + s_prev.y.abs()).max(1.0);

    let sep = ((s_prev.x - a.x).powi(2) + (s_prev.y - a.y).powi(2)).sqrt();
    let back_tol = 0.25 * sep + 1e-12 * scale;
    let eff = passes.min(MAX_CORRECTOR);
    let mut prev: Option<FlowState> = None;
    let mut out: Option<(f64, f64, FlowState, f64)> = None;
    let mut last_change = f64::INFINITY;
    for _pass in 0..=eff {
        let shock_angle_bar = slope_bar.atan();
        let (px, py, t, s) =
            intersect_rays(a.x, a.y, alpha_bar, s_prev.x, s_prev.y, shock_angle_bar)
                .ok_or(MocError::CharacteristicsDiverge)?;
        if t <= -back_tol || s <= -back_tol {
            return Err(MocError::CharacteristicsDiverge);
        }
        // 2-D Newton on (G = 0, compatibility along the C+ from a)
        let mut u = if let Some(p) = prev { p } else { s_prev.state };
        let mut converged = false;
        for _ in 0..50 {
            let res = polar_residual(u, fs, gas)?;
            let f1 = res.g;
            let f2 = (u.u - a.state.u) + lam_minus * (u.v - a.state.v);
            let det = res.g_u * lam_minus - res.g_v;
            if det.abs() < 1e-300 || !det.is_finite() {
                return Err(MocError::NewtonDiverged);
            }
            let du = (f1 * lam_minus - f2 * res.g_v) / det;
            let dv = (f2 * res.g_u - f1) / det;
            let next = FlowState::new(u.u - du, u.v - dv);
            if !(next.u.is_finite() && next.v.is_finite()) {
                return Err(MocError::NewtonDiverged);
            }
            let step = du.abs() + dv.abs();
            u = next;
            if step < 1e-13 * gas.qbar {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(MocError::NewtonDiverged);
        }
        if (u.u - fs.u_inf).abs() + u.v.abs() < 1e-10 * gas.qbar {
            return Err(MocError::ShockDegenerate);
        }
        if u.q_sq() >= fs.u_inf * fs.u_inf {
            return Err(MocError::EntropyViolation);
        }
        let ang_p = char_angles(u, gas)?;
        let slope_new = shock_angle(u, fs, gas)
            .map_err(|_| MocError::ShockDegenerate)?
            .tan();
        out = Some((px, py, u, slope_new));
        if let Some(p) = prev {
            last_change = (u.u - p.u).abs() + (u.v - p.v).abs();
            if last_change < STATE_TOL {
                break;
            }
        }
        prev = Some(u);
        alpha_bar = 0.5 * (ang_a.alpha + ang_p.alpha);
        lam_minus = 0.5 * (ang_a.lambda_minus + ang_p.lambda_minus);
        slope_bar = 0.5 * (s_prev.slope + slope_new);
    }
    if passes >= MAX_CORRECTOR && last_change > STATE_TOL {
        return Err(MocError::CorrectorStall(last_change));
    }
    let (px, py, state, slope) = out.expect("at least the predictor pass ran");
    let point = NetPoint {
        x: px,
        y: py,
        state,
        xi: f64::NAN,
        eta: f64::NAN,
        line_index: 0,
        point_index: 0,
    };
    let node = ShockNode {
        x: px,
        y: py,
        slope,
        state,
    };
    Ok((point, node))
}

/// Intersection of a backward ray from `(px, py)` with the polyline of a
/// data line; returns the interpolated foot state, position, and the ray
/// parameter (distance back along the ray).
fn ray_foot_on_line(
    px: f64,
    py: f64,
    back_dir: (f64, f64),
    line: &DataLine,
) -> Option<(FlowState, f64, f64, f64)> {
    let mut best: Option<(FlowState, f64, f64, f64)> = None;
    for w in line.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let sx = b.x - a.x;
        let sy = b.y - a.y;
        let det = back_dir.0 * (-sy) - back_dir.1 * (-sx);
        if det.abs() < 1e-300 {
            continue;
        }
        let rx = a.x - px;
        let ry = a.y - py;
        let t = (rx * (-sy) + ry * sx) / det;
        let sig = (back_dir.0 * ry - back_dir.1 * rx) / det;
        if t <= 0.0 || !(-1e-9..=1.0 + 1e-9).contains(&sig) {
            continue;
        }
        let state = FlowState::new(
            a.state.u + sig * (b.state.u - a.state.u),
            a.state.v + sig * (b.state.v - a.state.v),
        );
        let fx = a.x + sig * sx;
        let fy = a.y + sig * sy;
        if best.map_or(true, |bb| t < bb.3) {
            best = Some((state, fx, fy, t));
        }
    }
    best
}

/// March-internal shock advance. The fitted front moves forward by a bounded
/// x-step matched to the line advance; the downstream state solves the polar
/// condition with the plus-family compatibility anchored at the foot of the
/// backward plus characteristic, located on the stored data lines. Unlike
/// [`shock_point`], the node is not required to sit one mesh spacing up the
/// plus characteristic of the top point, which keeps the step bounded when
/// the shock weakens and the plus family runs nearly parallel to it.
#[allow(clippy::too_many_arguments)]
fn advance_shock_node(
    history: &[DataLine],
    new_points: &[NetPoint],
    dx_adv: f64,
    s_prev: &ShockNode,
    fs: &FreeStream,
    gas: &GasModel,
    passes: u32,
) -> Result<(NetPoint, ShockNode), MocError> {
    if !(dx_adv > 0.0) {
        return Err(MocError::CharacteristicsDiverge);
    }
    let mut slope_bar = s_prev.slope;
    let mut alpha_bar = char_angles(s_prev.state, gas)?.alpha;

    let eff = passes.min(MAX_CORRECTOR);
    let mut prev: Option<FlowState> = None;
    let mut out: Option<(f64, f64, FlowState, f64)> = None;
    let mut last_change = f64::INFINITY;
    for _pass in 0..=eff {
        let px = s_prev.x + dx_adv;
        let py = s_prev.y + slope_bar * dx_adv;
        // crossings of the backward plus characteristic with the line under
        // construction and the stored history, nearest first; the
        // compatibility invariant is accumulated segment by segment so the
        // per-chord truncation stays tied to the mesh
        let back = (-alpha_bar.cos(), -alpha_bar.sin());
        let scratch = DataLine {
            points: new_points.to_vec(),
        };
        let mut crossings: Vec<(FlowState, f64)> = Vec::new();
        if let Some((s, _, _, t)) = ray_foot_on_line(px, py, back, &scratch) {
            crossings.push((s, t));
        }
        let mut misses = 0usize;
        for line in history.iter().rev().take(400) {
            match ray_foot_on_line(px, py, back, line) {
                Some((s, _, _, t)) => {
                    crossings.push((s, t));
                    misses = 0;
                }
                None => {
                    misses += 1;
                    if misses >= 3 && !crossings.is_empty() {
                        break;
                    }
                }
            }
            if crossings.len() >= 64 {
                break;
            }
        }
        if crossings.is_empty() {
            return Err(MocError::CharacteristicsDiverge);
        }
        crossings.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite ray parameter"));
        crossings.dedup_by(|a, b| (a.1 - b.1).abs() < 1e-14 * (1.0 + b.1));
        // invariant accumulated over the known part of the path
        let mut chain = 0.0f64;
        for w in crossings.windows(2) {
            let (sa, sb) = (w[1].0, w[0].0);
            let lam = 0.5
                * (char_angles(sa, gas)?.lambda_minus + char_angles(sb, gas)?.lambda_minus);
            chain += (sb.u - sa.u) + lam * (sb.v - sa.v);
        }
        let foot_state = crossings[0].0;
        let ang_foot = char_angles(foot_state, gas)?;
        let mut lam_minus = match prev {
            Some(p) => 0.5 * (ang_foot.lambda_minus + char_angles(p, gas)?.lambda_minus),
            None => ang_foot.lambda_minus,
        };
        let mut u = if let Some(p) = prev { p } else { s_prev.state };
        let mut converged = false;
        for _ in 0..50 {
            let res = polar_residual(u, fs, gas)?;
            let f1 = res.g;
            let f2 = (u.u - foot_state.u) + lam_minus * (u.v - foot_state.v) + chain;
            let det = res.g_u * lam_minus - res.g_v;
            if det.abs() < 1e-300 || !det.is_finite() {
                return Err(MocError::NewtonDiverged);
            }
            let du = (f1 * lam_minus - f2 * res.g_v) / det;
            let dv = (f2 * res.g_u - f1) / det;
            let next = FlowState::new(u.u - du, u.v - dv);
            if !(next.u.is_finite() && next.v.is_finite()) {
                return Err(MocError::NewtonDiverged);
            }
            let step = du.abs() + dv.abs();
            u = next;
            if step < 1e-13 * gas.qbar {
                converged = true;
                break;
            }
            lam_minus = 0.5 * (ang_foot.lambda_minus + char_angles(u, gas)?.lambda_minus);
        }
        if !converged {
            return Err(MocError::NewtonDiverged);
        }
        if (u.u - fs.u_inf).abs() + u.v.abs() < 1e-10 * gas.qbar {
            return Err(MocError::ShockDegenerate);
        }
        if u.q_sq() >= fs.u_inf * fs.u_inf {
            return Err(MocError::EntropyViolation);
        }
        let ang_p = char_angles(u, gas)?;
        let slope_new = shock_angle(u, fs, gas)
            .map_err(|_| MocError::ShockDegenerate)?
            .tan();
        out = Some((px, py, u, slope_new));
        if let Some(p) = prev {
            last_change = (u.u - p.u).abs() + (u.v - p.v).abs();
            if last_change < STATE_TOL {
                break;
            }
        }
        prev = Some(u);
        alpha_bar = 0.5 * (ang_foot.alpha + ang_p.alpha);
        slope_bar = 0.5 * (s_prev.slope + slope_new);
    }
    if passes >= MAX_CORRECTOR && last_change > STATE_TOL {
        return Err(MocError::CorrectorStall(last_change));
    }
    let (px, py, state, slope) = out.expect("at least the predictor pass ran");
    let point = NetPoint {
        x: px,
        y: py,
        state,
        xi: f64::NAN,
        eta: f64::NAN,
        line_index: 0,
        point_index: 0,
    };
    let node = ShockNode {
        x: px,
        y: py,
        slope,
        state,
    };
    Ok((point, node))
}

/// The seed line: the tip constant state on a wall-normal segment at
/// `x_start`, reaching up to the initial shock ray from the origin.
pub fn seed_tip(cfg: &RunConfig) -> Result<DataLine, MocError> {
    cfg.validate()?;
    let fs = freestream_from_epsilon(cfg.epsilon, &cfg.gas)?;
    let theta0 = cfg.wedge.fp(0.0).atan();
    let u0 = downstream_from_ray(theta0, &fs, &cfg.gas)?;
    let s0 = shock_angle(u0, &fs, &cfg.gas)?;
    let x0 = cfg.x_start;
    let y0 = cfg.wedge.f(x0);
    let fp = cfg.wedge.fp(x0);
    let norm = (1.0 + fp * fp).sqrt();
    let (nx, ny) = (-fp / norm, 1.0 / norm);
    // wall-normal from (x0, y0) meets the ray y = tan(s0) x
    let tan_s = s0.tan();
    let den = ny - tan_s * nx;
    if den.abs() < 1e-300 {
        return Err(MocError::SeedFailed("normal parallel to the shock ray".into()));
    }
    let t_shock = (tan_s * x0 - y0) / den;
    if t_shock <= 0.0 {
        return Err(MocError::SeedFailed(format!(
            "shock ray does not clear the wall at x_start = {x0}"
        )));
    }
    let n = cfg.n_across;
    let mut points = Vec::with_capacity(n);
    for j in 0..n {
        let t = t_shock * (j as f64) / ((n - 1) as f64);
        points.push(NetPoint {
            x: x0 + t * nx,
            y: y0 + t * ny,
            state: u0,
            xi: f64::NAN,
            eta: f64::NAN,
            line_index: 0,
            point_index: j,
        });
    }
    Ok(DataLine { points })
}

fn project_line(
    line: &mut DataLine,
    w: &WedgeProfile,
    line_index: usize,
) -> Result<(), MocError> {
    for (j, p) in line.points.iter_mut().enumerate() {
        let (xi, eta, _) = w.project_to_wall(p.x, p.y)?;
        p.xi = xi;
        p.eta = eta;
        p.line_index = line_index;
        p.point_index = j;
    }
    Ok(())
}

fn check_line_invariants(
    line: &DataLine,
    fs: &FreeStream,
    gas: &GasModel,
    w: &WedgeProfile,
) -> Result<(), MocError> {
    let first = &line.points[0];
    let slip = first.state.v - first.state.u * w.fp(first.x);
    if slip.abs() > 1e-11 * gas.qbar {
        return Err(MocError::InvalidConfig(format!(
            "wall point violates slip by {slip:e}"
        )));
    }
    let last = &line.points[line.points.len() - 1];
    let res = polar_residual(last.state, fs, gas)?;
    if res.g.abs() > 1e-11 {
        return Err(MocError::InvalidConfig(format!(
            "shock point off the polar by {:e}",
            res.g
        )));
    }
    let mut prev_eta = f64::NEG_INFINITY;
    for p in &line.points {
        if !(p.eta > prev_eta) {
            return Err(MocError::InvalidConfig(
                "eta not strictly increasing along line".into(),
            ));
        }
        prev_eta = p.eta;
        if p.y < w.f(p.x) - 1e-12 {
            return Err(MocError::InvalidConfig("point below the wall".into()));
        }
        // hyperbolicity
        let ang = char_angles(p.state, gas)?;
        if ang.lambda_plus <= ang.lambda_minus {
            return Err(MocError::ShockFormation);
        }
    }
    Ok(())
}

/// Re-grids a computed line onto uniform eta fractions by monotone cubic
/// interpolation of position and state along the line; endpoints are kept.
fn regrid_line(line: &DataLine, w: &WedgeProfile) -> Result<DataLine, MocError> {
    let n = line.points.len();
    let eta: Vec<f64> = line.points.iter().map(|p| p.eta).collect();
    let xs: Vec<f64> = line.points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = line.points.iter().map(|p| p.y).collect();
    let us: Vec<f64> = line.points.iter().map(|p| p.state.u).collect();
    let vs: Vec<f64> = line.points.iter().map(|p| p.state.v).collect();
    let px = Pchip::new(&eta, &xs);
    let py = Pchip::new(&eta, &ys);
    let pu = Pchip::new(&eta, &us);
    let pv = Pchip::new(&eta, &vs);
    let eta_last = eta[n - 1];
    let mut points = Vec::with_capacity(n);
    for j in 0..n {
        if j == 0 || j == n - 1 {
            points.push(line.points[j]);
            continue;
        }
        let target = eta_last * (j as f64) / ((n - 1) as f64);
        let (x, y) = (px.eval(target), py.eval(target));
        let state = FlowState::new(pu.eval(target), pv.eval(target));
        let (xi, eta_new, _) = w.project_to_wall(x, y)?;
        points.push(NetPoint {
            x,
            y,
            state,
            xi,
            eta: eta_new,
            line_index: line.points[j].line_index,
            point_index: j,
        });
    }
    Ok(DataLine { points })
}

const DEFAULT_MAX_LINES: usize = 400_000;

/// Marches the characteristic net from the seed line until the wall point
/// passes `x_max`, a configured line cap, or a unit-process breakdown;
/// breakdowns end the march and are recorded with their location.
pub fn march(cfg: &RunConfig) -> Result<MarchResult, MocError> {
    cfg.validate()?;
    let gas = cfg.gas;
    let fs = freestream_from_epsilon(cfg.epsilon, &gas)?;
    let mut seed = seed_tip(cfg)?;
    project_line(&mut seed, &cfg.wedge, 0)?;
    let n = cfg.n_across;
    let seed_last = seed.points[n - 1];
    let seed_node = ShockNode {
        x: seed_last.x,
        y: seed_last.y,
        slope: shock_angle(seed_last.state, &fs, &gas)?.tan(),
        state: seed_last.state,
    };
    let mut lines = vec![seed];
    let mut nodes = vec![seed_node];
    let max_lines = cfg.max_lines.unwrap_or(DEFAULT_MAX_LINES);
    let mut breakdown = None;

    'march: while lines.len() < max_lines {
        let prev = lines.last().expect("seeded");
        if prev.points[0].x >= cfg.x_max {
            break;
        }
        let line_index = lines.len();
        // The new line is a plus-characteristic cascade: the wall point comes
        // off the minus characteristic of old point 1, each interior point
        // continues the cascade against the next old minus characteristic,
        // and the shock point continues the topmost plus characteristic onto
        // the fitted front. This keeps every data line a coherent transversal
        // from wall to shock.
        let build = || -> Result<(DataLine, ShockNode), (usize, MocError)> {
            let mut points = Vec::with_capacity(n);
            let wall = wall_point(&prev.points[1], &cfg.wedge, &gas, cfg.corrector_passes)
                .map_err(|e| (0usize, e))?;
            points.push(wall);
            for i in 1..=n - 2 {
                let below = points[i - 1];
                let p = interior_point(
                    &below,
                    &prev.points[i + 1],
                    &gas,
                    cfg.corrector_passes,
                )
                .map_err(|e| (i, e))?;
                points.push(p);
            }
            let top = points[n - 2];
            let dx_adv = top.x - prev.points[n - 2].x;
            let (sp, node) = advance_shock_node(
                &lines,
                &points,
                dx_adv,
                nodes.last().expect("seeded"),
                &fs,
                &gas,
                cfg.corrector_passes,
            )
            .map_err(|e| (n - 1, e))?;
            points.push(sp);
            Ok((DataLine { points }, node))
        };
        let (mut line, node) = match build() {
            Ok(v) => v,
            Err((index, e)) => {
                breakdown = Some(Breakdown {
                    line: line_index,
                    index,
                    message: e.to_string(),
                });
                break 'march;
            }
        };
        if let Err(e) = project_line(&mut line, &cfg.wedge, line_index) {
            breakdown = Some(Breakdown {
                line: line_index,
                index: 0,
                message: e.to_string(),
            });
            break;
        }
        if cfg.regrid {
            match regrid_line(&line, &cfg.wedge) {
                Ok(l) => line = l,
                Err(e) => {
                    breakdown = Some(Breakdown {
                        line: line_index,
                        index: 0,
                        message: e.to_string(),
                    });
                    break;
                }
            }
        }
        if let Err(e) = check_line_invariants(&line, &fs, &gas, &cfg.wedge) {
            breakdown = Some(Breakdown {
                line: line_index,
                index: 0,
                message: e.to_string(),
            });
            break;
        }
        lines.push(line);
        nodes.push(node);
    }

    Ok(MarchResult {
        net: CharNet { lines },
        shock: ShockFront { nodes },
        freestream: fs,
        breakdown,
    })
}

/// Net dump with one row per point:
/// line, index, x, y, xi, eta, u, v, rho, c, q, mach.
pub fn net_csv(net: &CharNet, gas: &GasModel) -> String {
    let mut out = String::from("line,index,x,y,xi,eta,u,v,rho,c,q,mach\n");
    for line in &net.lines {
        for p in &line.points {
            let sq = state_quantities(p.state, gas).expect("net states are admissible");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                p.line_index,
                p.point_index,
                f64_full(p.x),
                f64_full(p.y),
                f64_full(p.xi),
                f64_full(p.eta),
                f64_full(p.state.u),
                f64_full(p.state.v),
                f64_full(sq.rho),
                f64_full(sq.c),
                f64_full(sq.q),
                f64_full(sq.mach),
            ));
        }
    }
    out
}

/// Shock dump with one row per node: x, y, slope, u, v, p_jump.
pub fn shock_csv(shock: &ShockFront, fs: &FreeStream, gas: &GasModel) -> String {
    let p_under = fs.pressure(gas);
    let mut out = String::from("x,y,slope,u,v,p_jump\n");
    for nd in &shock.nodes {
        let sq = state_quantities(nd.state, gas).expect("shock states are admissible");
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            f64_full(nd.x),
            f64_full(nd.y),
            f64_full(nd.slope),
            f64_full(nd.state.u),
            f64_full(nd.state.v),
            f64_full(sq.p - p_under),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wedge::WedgeFamily;
    use approx::assert_relative_eq;

    fn gamma2() -> GasModel {
        GasModel::from_qbar(2.0, 1.0).unwrap()
    }

    fn straight10() -> WedgeProfile {
        WedgeProfile::new(WedgeFamily::Straight {
            slope: 10f64.to_radians().tan(),
        })
        .unwrap()
    }

    fn bullet10() -> WedgeProfile {
        WedgeProfile::new(WedgeFamily::LogBullet {
            a: 10f64.to_radians().tan(),
        })
        .unwrap()
    }

    fn tip_state(cfg: &RunConfig) -> FlowState {
        let fs = freestream_from_epsilon(cfg.epsilon, &cfg.gas).unwrap();
        downstream_from_ray(cfg.wedge.fp(0.0).atan(), &fs, &cfg.gas).unwrap()
    }

    #[test]
    fn seed_line_carries_the_tip_state() {
        let mut cfg = RunConfig::new(gamma2(), bullet10(), 0.04275);
        cfg.n_across = 3;
        let line = seed_tip(&cfg).unwrap();
        assert_eq!(line.points.len(), 3);
        let u0 = tip_state(&cfg);
        let fs = freestream_from_epsilon(0.04275, &gamma2()).unwrap();
        for p in &line.points {
            assert_eq!(p.state.u, u0.u);
            assert_eq!(p.state.v, u0.v);
        }
        let res = polar_residual(u0, &fs, &gamma2()).unwrap();
        assert!(res.g.abs() < 1e-12);
        // eta strictly increasing along the normal
        let mut prev = -1.0;
        for p in &line.points {
            let (_, eta, _) = cfg.wedge.project_to_wall(p.x, p.y).unwrap();
            assert!(eta > prev || (prev < 0.0 && eta.abs() < 1e-15));
            prev = eta;
        }
    }

    #[test]
    fn interior_point_preserves_constant_state() {
        let g = gamma2();
        let u0 = FlowState::new(0.82, 0.1446);
        let a = NetPoint {
            x: 1.0,
            y: 0.2,
            state: u0,
            xi: f64::NAN,
            eta: f64::NAN,
            line_index: 0,
            point_index: 0,
        };
        let b = NetPoint {
            x: 1.0,
            y: 0.25,
            state: u0,
            ..a
        };
        let p = interior_point(&a, &b, &g, 2).unwrap();
        assert_relative_eq!(p.state.u, u0.u, max_relative = 1e-14);
        assert_relative_eq!(p.state.v, u0.v, max_relative = 1e-14);
        assert!(p.x > 1.0);
        assert!(p.y > 0.2 && p.y < 0.25);
    }

    #[test]
    fn interior_point_refinement_on_smooth_data() {
        // manufactured smooth variation between the parents; halving the
        // separation must shrink the state defect about 4x (second order)
        let g = gamma2();
        let base = FlowState::new(0.82, 0.14);
        let smooth = |s: f64| FlowState::new(0.82 - 0.01 * s, 0.14 + 0.02 * s - 0.004 * s * s);
        let mk = |x: f64, y: f64, st: FlowState| NetPoint {
            x,
            y,
            state: st,
            xi: f64::NAN,
            eta: f64::NAN,
            line_index: 0,
            point_index: 0,
        };
        let solve_gap = |h: f64| -> f64 {
            let a = mk(1.0, 0.2, smooth(0.0));
            let b = mk(1.0, 0.2 + h, smooth(h / 0.05));
            let coarse = interior_point(&a, &b, &g, 6).unwrap();
            // reference: three nested half steps from the same data
            let m_state = smooth(0.5 * h / 0.05);
            let m = mk(1.0, 0.2 + 0.5 * h, m_state);
            let lo = interior_point(&a, &m, &g, 6).unwrap();
            let hi = interior_point(&m, &b, &g, 6).unwrap();
            let fine = interior_point(&lo, &hi, &g, 6).unwrap();
            ((coarse.state.u - fine.state.u).powi(2)
                + (coarse.state.v - fine.state.v).powi(2))
            .sqrt()
        };
        let _ = base;
        let g1 = solve_gap(0.02);
        let g2 = solve_gap(0.01);
        assert!(g1 / g2 > 3.0, "ratio {} ({} vs {})", g1 / g2, g1, g2);
    }

    #[test]
    fn wall_point_enforces_slip() {
        let g = gamma2();
        let w = straight10();
        let u0 = tip_state(&RunConfig::new(g, w.clone(), 0.04275));
        let b = NetPoint {
            x: 1.0,
            y: w.f(1.0) + 0.05,
            state: u0,
            xi: f64::NAN,
            eta: f64::NAN,
            line_index: 0,
            point_index: 1,
        };
        let p = wall_point(&b, &w, &g, 2).unwrap();
        assert_relative_eq!(p.state.v, p.state.u * w.fp(p.x), max_relative = 1e-14);
        assert_relative_eq!(p.state.u, u0.u, max_relative = 1e-13);
        assert!(p.x > b.x);
        assert_relative_eq!(p.y, w.f(p.x), max_relative = 1e-12);
    }

    #[test]
    fn wall_point_flattens_small_v_on_flat_wall() {
        let g = gamma2();
        let w = WedgeProfile::new(WedgeFamily::Straight { slope: 1e-12 }).unwrap();
        let b = NetPoint {
            x: 1.0,
            y: 0.05,
            state: FlowState::new(0.82, 0.001),
            xi: f64::NAN,
            eta: f64::NAN,
            line_index: 0,
            point_index: 1,
        };
        let p = wall_point(&b, &w, &g, 4).unwrap();
        assert!(p.state.v.abs() < 1e-12);
    }

    #[test]
    fn shock_point_preserves_constant_state() {
        let g = gamma2();
        let fs = freestream_from_epsilon(0.04275, &g).unwrap();
        let cfg = RunConfig::new(g, straight10(), 0.04275);
        let u0 = tip_state(&cfg);
        let s0 = shock_angle(u0, &fs, &g).unwrap().tan();
        let a = NetPoint {
            x: 1.0,
            y: 0.5,
            state: u0,
            xi: f64::NAN,
            eta: f64::NAN,
            line_index: 0,
            point_index: 18,
        };
        let node = ShockNode {
            x: 0.98,
            y: 0.98 * s0,
            slope: s0,
            state: u0,
        };
        let (p, new_node) = shock_point(&a, &node, &fs, &g, 2).unwrap();
        assert_relative_eq!(p.state.u, u0.u, max_relative = 1e-12);
        assert_relative_eq!(p.state.v, u0.v, max_relative = 1e-12);
        assert_relative_eq!(new_node.slope, s0, max_relative = 1e-12);
        let res = polar_residual(p.state, &fs, &g).unwrap();
        assert!(res.g.abs() < 1e-12);
    }

    #[test]
    fn shock_point_is_locally_lipschitz() {
        let g = gamma2();
        let fs = freestream_from_epsilon(0.04275, &g).unwrap();
        let cfg = RunConfig::new(g, straight10(), 0.04275);
        let u0 = tip_state(&cfg);
        let s0 = shock_angle(u0, &fs, &g).unwrap().tan();
        let node = ShockNode {
            x: 0.98,
            y: 0.98 * s0,
            slope: s0,
            state: u0,
        };
        let mk = |du: f64| NetPoint {
            x: 1.0,
            y: 0.5,
            state: FlowState::new(u0.u + du, u0.v + du * 0.5),
            xi: f64::NAN,
            eta: f64::NAN,
            line_index: 0,
            point_index: 18,
        };
        let (p0, _) = shock_point(&mk(0.0), &node, &fs, &g, 2).unwrap();
        let (p1, _) = shock_point(&mk(1e-8), &node, &fs, &g, 2).unwrap();
        let gap = (p0.state.u - p1.state.u).abs() + (p0.state.v - p1.state.v).abs();
        assert!(gap < 1e-6, "perturbation response {gap}");
    }

    #[test]
    fn straight_wedge_march_is_exact() {
        let g = gamma2();
        let mut cfg = RunConfig::new(g, straight10(), 0.04275);
        cfg.n_across = 8;
        cfg.x_max = 1e30;
        cfg.max_lines = Some(120);
        let res = march(&cfg).unwrap();
        assert!(res.breakdown.is_none(), "{:?}", res.breakdown);
        assert_eq!(res.net.lines.len(), 120);
        let u0 = tip_state(&cfg);
        let mut worst = 0.0f64;
        for line in &res.net.lines {
            for p in &line.points {
                worst = worst
                    .max((p.state.u - u0.u).abs())
                    .max((p.state.v - u0.v).abs());
            }
        }
        assert!(worst < 1e-11, "state drift {worst}");
        let s0 = res.shock.nodes[0].slope;
        for nd in &res.shock.nodes {
            assert!((nd.slope - s0).abs() < 1e-11);
        }
    }

    #[test]
    fn bullet_march_weakens_the_shock() {
        let g = gamma2();
        let mut cfg = RunConfig::new(g, bullet10(), 0.04275);
        cfg.n_across = 12;
        cfg.x_max = 20.0;
        let res = march(&cfg).unwrap();
        assert!(res.breakdown.is_none(), "{:?}", res.breakdown);
        assert!(res.net.lines.len() > 40);
        // slope decreases monotonically after a short transient
        let slopes: Vec<f64> = res.shock.nodes.iter().map(|n| n.slope).collect();
        let start = 10.min(slopes.len() / 4);
        for w in slopes[start..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "slope rose: {} -> {}", w[0], w[1]);
        }
        // q increases along the shock (weakening), entropy holds
        let fs = res.freestream;
        let qs: Vec<f64> = res.shock.nodes.iter().map(|n| n.state.q()).collect();
        for w in qs[start..].windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        let p_under = fs.pressure(&g);
        for nd in &res.shock.nodes {
            let sq = state_quantities(nd.state, &g).unwrap();
            assert!(sq.p > p_under);
        }
    }

    #[test]
    fn march_respects_line_topology() {
        let g = gamma2();
        let mut cfg = RunConfig::new(g, bullet10(), 0.04275);
        cfg.n_across = 9;
        cfg.x_max = 5.0;
        let res = march(&cfg).unwrap();
        for line in &res.net.lines {
            assert_eq!(line.points.len(), 9);
            let mut prev = f64::NEG_INFINITY;
            for p in &line.points {
                assert!(p.eta > prev);
                prev = p.eta;
                assert!(p.y >= cfg.wedge.f(p.x) - 1e-12);
            }
        }
    }
}
