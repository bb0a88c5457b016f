use shocklayer::diag;
use shocklayer::gas::*;
use shocklayer::moc::*;
use shocklayer::polar::*;
use shocklayer::wedge::*;

fn main() {
    let gas = GasModel::from_qbar(2.0, 1.0).unwrap();
    // g(v; eps) transition on the polar
    println!("== g(v; eps) on the polar ==");
    for eps in [0.04f64, 0.01, 0.0025, 0.000625] {
        let fs = freestream_from_epsilon(eps, &gas).unwrap();
        print!("eps={eps:9}: ");
        for v in [0.01f64, 0.03, 0.05, 0.1, 0.2, 0.3] {
            match polar_u_root(v, &fs, &gas) {
                Ok(u) => {
                    let g = reflection_coeff_g(FlowState::new(u, v), &fs, &gas)
                        .map(|r| r.g_value)
                        .unwrap_or(f64::NAN);
                    print!("v={v}: {g:.4}  ");
                }
                Err(_) => print!("v={v}: -  "),
            }
        }
        println!();
    }
    // limit-circle reference g0 at those v (u on circle with same v? use state with v/u ratio)
    let fs0 = freestream_from_epsilon(0.0, &gas).unwrap();
    print!("eps=0 circle: ");
    for v in [0.01f64, 0.03, 0.05, 0.1, 0.2, 0.3] {
        let u = 0.5 + (0.25f64 - v * v).max(0.0).sqrt();
        let g = reflection_coeff_g(FlowState::new(u, v), &fs0, &gas)
            .map(|r| r.g_value)
            .unwrap_or(f64::NAN);
        print!("v={v}: {g:.4}  ");
    }
    println!();

    // shock-relation residual profile, bullet eps=0.01
    println!("== shock residual profile (estimator-based), bullet eps=0.01 ==");
    let bullet = WedgeProfile::new(WedgeFamily::LogBullet { a: 10f64.to_radians().tan() }).unwrap();
    for n in [31usize, 61] {
        let mut cfg = RunConfig::new(gas, bullet.clone(), 0.01);
        cfg.n_across = n;
        cfg.x_max = 20.0;
        let res = march(&cfg).unwrap();
        let derivs = diag::char_derivatives(&res.net, &gas);
        let nn = res.net.n_across();
        println!("  n={n}:");
        let mut shown = 0;
        for (k, line) in res.net.lines.iter().enumerate() {
            let pl = &line.points[nn - 1];
            if line.points[0].x < 0.01 { continue; }
            if let (Some((dp, dm)), Ok(refl)) = (
                derivs[k][nn - 1],
                reflection_coeff_g(pl.state, &res.freestream, &gas),
            ) {
                let r = (dp - refl.g_value * dm).abs();
                if shown % (res.net.lines.len() / 12).max(1) == 0 || r > 1e-2 {
                    println!(
                        "    xi={:8.4} r={r:.3e} dp={dp:+.3e} dm={dm:+.3e} g={:.4}",
                        pl.xi, refl.g_value
                    );
                }
                shown += 1;
            }
        }
    }
}
