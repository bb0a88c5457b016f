use shocklayer::charkern::{char_angles, decomposition_residual};
use shocklayer::diag::{self, NetField};
use shocklayer::field::{FlowField, Point};
use shocklayer::gas::*;
use shocklayer::moc::*;
use shocklayer::polar::*;
use shocklayer::wedge::*;

fn g2() -> GasModel { GasModel::from_qbar(2.0, 1.0).unwrap() }
fn td(d: f64) -> f64 { d.to_radians().tan() }

fn main() {
    let gas = g2();
    println!("== g(v; eps) ==");
    for eps in [0.04f64, 0.01, 0.0025] {
        let fs = freestream_from_epsilon(eps, &gas).unwrap();
        print!("eps={eps:7}: ");
        for v in [0.05f64, 0.1, 0.15, 0.2, 0.3] {
            if let Ok(u) = polar_u_root(v, &fs, &gas) {
                let g = reflection_coeff_g(FlowState::new(u, v), &fs, &gas).map(|r| r.g_value).unwrap_or(f64::NAN);
                print!("v={v}:{g:.4} ");
            }
        }
        println!();
    }

    // #8: bend probe near shock
    println!("== c8 near-shock probe ==");
    let bend = WedgeProfile::new(WedgeFamily::PowerDecayBend { m: td(15.0), b: 0.1, a: 1.0 }).unwrap();
    let mut fields = Vec::new();
    for n in [31usize, 61] {
        let mut cfg = RunConfig::new(gas, bend.clone(), 0.04275);
        cfg.n_across = n;
        cfg.x_max = 25.0;
        fields.push((n, march(&cfg).unwrap()));
    }
    for frac in [0.5f64, 0.85] {
        for (n, res) in &fields {
            let field = NetField::new(&res.net, &bend);
            // probe at x=8, given eta fraction of local thickness
            let (xi, _, _) = bend.project_to_wall(8.0, bend.f(8.0) + 0.1).unwrap();
            let eta_s = field.shock_eta_at(&res.net, xi).unwrap();
            let x = 8.0;
            let fp = bend.fp(x);
            let nrm = (1.0 + fp * fp).sqrt();
            let probe = Point::new(x - frac * eta_s * fp / nrm, bend.f(x) + frac * eta_s / nrm);
            print!("  frac={frac} n={n}: ");
            for h in [0.4, 0.2, 0.1] {
                match decomposition_residual(&field, probe, h, &gas) {
                    Ok((rp, rm)) => print!("h={h}:({rp:+.2e},{rm:+.2e}) "),
                    Err(e) => print!("h={h}:err({e}) "),
                }
            }
            println!();
        }
    }

    // #11 near-wall station-matched gaps
    println!("== c11 near-wall cells (i=1..3 max) ==");
    let bullet = WedgeProfile::new(WedgeFamily::LogBullet { a: td(10.0) }).unwrap();
    for eps in [0.04f64, 0.02, 0.01] {
        let mut cfg = RunConfig::new(gas, bullet.clone(), eps);
        cfg.n_across = 41;
        cfg.x_max = 12.0;
        let res = march(&cfg).unwrap();
        let derivs = diag::char_derivatives(&res.net, &gas);
        let (k, line) = res.net.lines.iter().enumerate()
            .min_by(|a, b| ((a.1.points[0].xi - 5.0).abs()).partial_cmp(&(b.1.points[0].xi - 5.0).abs()).unwrap()).unwrap();
        let mut gp = 0.0f64; let mut gm = 0.0f64;
        for i in 1..=3usize {
            if let Some((dp, dm)) = derivs[k][i] {
                let xf = bullet.x_of_arc_length(line.points[i].xi);
                let (fp_, fm_) = shocklayer::limitsol::formal_derivatives(&bullet, xf, &gas).unwrap();
                gp = gp.max((dp - fp_).abs());
                gm = gm.max((dm - fm_).abs());
            }
        }
        println!("  eps={eps}: gap+={gp:.3e} gap-={gm:.3e}");
    }

    // #12 spikes after closure fix
    println!("== c12 spikes eps=0.005 n=61 ==");
    let mut cfg = RunConfig::new(gas, bullet.clone(), 0.005);
    cfg.n_across = 61;
    cfg.x_max = 30.0;
    let res = march(&cfg).unwrap();
    let derivs = diag::char_derivatives(&res.net, &gas);
    let mut pos = 0usize; let mut worst = f64::NEG_INFINITY; let mut wx = 0.0; let mut wi = 0usize;
    for (k, line) in res.net.lines.iter().enumerate() {
        if line.points[0].x < 0.01 { continue; }
        for (i, _) in line.points.iter().enumerate() {
            if let Some((dp, dm)) = derivs[k][i] {
                if dp > 0.0 || dm > 0.0 { pos += 1; }
                if dp.max(dm) > worst { worst = dp.max(dm); wx = line.points[0].x; wi = i; }
            }
        }
    }
    println!("  positive cells {pos}, worst {worst:+.3e} at x={wx:.3} i={wi}");

    // #7 via NetField one-sided FD at nodes
    println!("== c7 shock residual via field one-sided FD ==");
    for n in [31usize, 61] {
        let mut cfg = RunConfig::new(gas, bullet.clone(), 0.01);
        cfg.n_across = n;
        cfg.x_max = 20.0;
        let res = march(&cfg).unwrap();
        let field = NetField::new(&res.net, &bullet);
        let nn = res.net.n_across();
        let mut worst = (0.0f64, 0.0f64);
        for line in res.net.lines.iter() {
            if line.points[0].x < 0.01 { continue; }
            let nd = &line.points[nn - 1];
            let ang = match char_angles(nd.state, &gas) { Ok(a) => a, Err(_) => continue };
            let h = (nd.eta / (nn as f64 - 1.0)) * 0.9;
            let cs = |p: Point| field.state_at(p).map(|s| gas.sound_speed_sq(s.q_sq()).sqrt());
            let c0 = gas.sound_speed_sq(nd.state.q_sq()).sqrt();
            let pa = Point::new(nd.x - h * ang.alpha.cos(), nd.y - h * ang.alpha.sin());
            let pb = Point::new(nd.x - h * ang.beta.cos(), nd.y - h * ang.beta.sin());
            if let (Some(ca), Some(cb), Ok(refl)) = (cs(pa), cs(pb), reflection_coeff_g(nd.state, &res.freestream, &gas)) {
                let dp = (c0 - ca) / h;
                let dm = (c0 - cb) / h;
                let r = (dp - refl.g_value * dm).abs();
                if r > worst.0 { worst = (r, nd.xi); }
            }
        }
        println!("  n={n}: worst {:.3e} at xi={:.3}", worst.0, worst.1);
    }
}
