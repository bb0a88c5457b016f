use shocklayer::diag;
use shocklayer::gas::*;
use shocklayer::moc::*;
use shocklayer::polar::reflection_coeff_g;
use shocklayer::wedge::*;

fn main() {
    let gas = GasModel::from_qbar(2.0, 1.0).unwrap();
    let bullet = WedgeProfile::new(WedgeFamily::LogBullet { a: 10f64.to_radians().tan() }).unwrap();
    for (regrid, passes, n) in [
        (true, 2u32, 31usize), (true, 2, 61),
        (false, 2, 31), (false, 2, 61),
        (true, 6, 31), (true, 6, 61),
    ] {
        let mut cfg = RunConfig::new(gas, bullet.clone(), 0.01);
        cfg.n_across = n;
        cfg.x_max = 20.0;
        cfg.regrid = regrid;
        cfg.corrector_passes = passes;
        let res = match march(&cfg) {
            Ok(r) => r,
            Err(e) => { println!("regrid={regrid} passes={passes} n={n}: march cfg err {e}"); continue; }
        };
        if let Some(b) = &res.breakdown {
            println!("regrid={regrid} passes={passes} n={n}: breakdown line {} idx {}: {}", b.line, b.index, b.message);
            continue;
        }
        let derivs = diag::char_derivatives(&res.net, &gas);
        let nn = res.net.n_across();
        let mut worst = (0.0f64, 0.0f64);
        let mut at2 = 0.0f64;
        for (k, line) in res.net.lines.iter().enumerate() {
            if line.points[0].x < 0.01 { continue; }
            let pl = &line.points[nn - 1];
            if let (Some((dp, dm)), Ok(refl)) = (derivs[k][nn - 1], reflection_coeff_g(pl.state, &res.freestream, &gas)) {
                let r = (dp - refl.g_value * dm).abs();
                if r > worst.0 { worst = (r, pl.xi); }
                if (pl.xi - 2.0).abs() < 0.3 { at2 = at2.max(r); }
            }
        }
        println!("regrid={regrid} passes={passes} n={n}: worst shock resid {:.3e} at xi={:.3}; near xi=2: {:.3e}", worst.0, worst.1, at2);
    }
}
