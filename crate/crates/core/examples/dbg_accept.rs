use shocklayer::charkern::decomposition_residual;
use shocklayer::diag::{self, NetField};
use shocklayer::field::Point;
use shocklayer::gas::*;
use shocklayer::moc::*;
use shocklayer::wedge::*;

fn g2() -> GasModel { GasModel::from_qbar(2.0, 1.0).unwrap() }
fn tan_deg(d: f64) -> f64 { d.to_radians().tan() }

fn main() {
    let gas = g2();
    // --- #8 with local-direction sampling
    println!("== c8 r(h) with local directions ==");
    let wedge = WedgeProfile::new(WedgeFamily::PowerDecayBend { m: tan_deg(15.0), b: 0.1, a: 1.0 }).unwrap();
    for n in [31usize, 61] {
        let mut cfg = RunConfig::new(gas, wedge.clone(), 0.04275);
        cfg.n_across = n;
        cfg.x_max = 25.0;
        let res = march(&cfg).unwrap();
        let field = NetField::new(&res.net, &wedge);
        let probe = Point::new(8.0, wedge.f(8.0) + 0.8);
        print!("  n={n}: ");
        for h in [0.4, 0.2, 0.1, 0.05] {
            match decomposition_residual(&field, probe, h, &gas) {
                Ok((rp, rm)) => print!("h={h}: ({rp:+.2e},{rm:+.2e})  "),
                Err(e) => print!("h={h}: err {e}  "),
            }
        }
        println!();
    }
    // --- #11 anatomy: raw measured vs formal at i=20, n- and eps-dependence
    println!("== c11 anatomy at xi0=5, i=20 ==");
    let bullet = WedgeProfile::new(WedgeFamily::LogBullet { a: tan_deg(10.0) }).unwrap();
    for (eps, n) in [(0.04, 41usize), (0.01, 41), (0.0025, 41), (0.01, 81)] {
        let mut cfg = RunConfig::new(gas, bullet.clone(), eps);
        cfg.n_across = n;
        cfg.x_max = 12.0;
        let res = march(&cfg).unwrap();
        let derivs = diag::char_derivatives(&res.net, &gas);
        let (k, line) = res.net.lines.iter().enumerate()
            .min_by(|a, b| ((a.1.points[0].xi - 5.0).abs()).partial_cmp(&(b.1.points[0].xi - 5.0).abs()).unwrap()).unwrap();
        let i = n / 2;
        if let Some((dp, dm)) = derivs[k][i] {
            let p = &line.points[i];
            let xf = bullet.x_of_arc_length(p.xi);
            let (fp, fm) = shocklayer::limitsol::formal_derivatives(&bullet, xf, &gas).unwrap();
            println!("  eps={eps} n={n}: foot_xi={:.3} dp={dp:+.4e} fp={fp:+.4e} gap={:+.2e} | dm={dm:+.4e} fm={fm:+.4e} gap={:+.2e}",
                p.xi, dp - fp, dm - fm);
        }
    }
    // --- #12 spike anatomy at eps=0.005
    println!("== c12 spike anatomy eps=0.005 n=61 ==");
    let mut cfg = RunConfig::new(gas, bullet.clone(), 0.005);
    cfg.n_across = 61;
    cfg.x_max = 30.0;
    let res = march(&cfg).unwrap();
    let derivs = diag::char_derivatives(&res.net, &gas);
    let mut spikes: Vec<(f64, usize, usize, f64)> = Vec::new();
    for (k, line) in res.net.lines.iter().enumerate() {
        if line.points[0].x < 0.01 { continue; }
        for (i, _) in line.points.iter().enumerate() {
            if let Some((dp, dm)) = derivs[k][i] {
                let w = dp.max(dm);
                if w > 0.0 { spikes.push((w, k, i, line.points[0].x)); }
            }
        }
    }
    spikes.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    println!("  {} positive cells; top:", spikes.len());
    for s in spikes.iter().take(8) {
        println!("    val={:+.2e} line={} i={} x0={:.4}", s.0, s.1, s.2, s.3);
    }
    // --- #7 shock residual profile
    println!("== c7 shock residual profile eps=0.01 ==");
    for n in [31usize, 61] {
        let mut cfg = RunConfig::new(gas, bullet.clone(), 0.01);
        cfg.n_across = n;
        cfg.x_max = 20.0;
        let res = march(&cfg).unwrap();
        let derivs = diag::char_derivatives(&res.net, &gas);
        let nn = res.net.n_across();
        print!("  n={n}: ");
        let mut worst = (0.0f64, 0.0f64);
        for (k, line) in res.net.lines.iter().enumerate() {
            if line.points[0].x < 0.01 { continue; }
            let pl = &line.points[nn - 1];
            if let Some((dp, dm)) = derivs[k][nn - 1] {
                if let Ok(refl) = shocklayer::polar::reflection_coeff_g(pl.state, &res.freestream, &gas) {
                    let r = (dp - refl.g_value * dm).abs();
                    if r > worst.0 { worst = (r, pl.xi); }
                }
            }
        }
        println!("worst shock residual {:.3e} at xi={:.4}", worst.0, worst.1);
    }
}
