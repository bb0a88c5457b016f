use shocklayer::charkern::char_angles;
use shocklayer::gas::*;
use shocklayer::moc::*;
use shocklayer::polar::reflection_coeff_g;
use shocklayer::wedge::*;

fn main() {
    let gas = GasModel::from_qbar(2.0, 1.0).unwrap();
    let bullet = WedgeProfile::new(WedgeFamily::LogBullet { a: 10f64.to_radians().tan() }).unwrap();
    for (eps, n) in [(0.04f64, 61usize), (0.01, 61), (0.01, 121)] {
        let mut cfg = RunConfig::new(gas, bullet.clone(), eps);
        cfg.n_across = n;
        cfg.x_max = 15.0;
        let res = march(&cfg).unwrap();
        println!("eps={eps} n={n}: {} lines", res.net.lines.len());
        // construction-native shock-relation audit at selected nodes:
        // dp along the top segment (the C+ chord into the node),
        // dm along the next line's top segment C- ... instead use:
        // dm from the node to the PREVIOUS node along the shock combined with
        // dp to eliminate: ds c = t+ dp + t- dm  =>  dm = (ds c - t+ dp)/t-
        let nn = res.net.n_across();
        let lines = &res.net.lines;
        for target in [1.0f64, 4.0, 10.0] {
            let k = (0..lines.len())
                .min_by(|a, b| {
                    let da = (lines[*a].points[0].x - target).abs();
                    let db = (lines[*b].points[0].x - target).abs();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            if k == 0 || k + 1 >= lines.len() { continue; }
            let node = lines[k].points[nn - 1];
            let below = lines[k].points[nn - 2];
            // dp: along the top segment (built as the C+ compat chord)
            let dc = |a: &NetPoint, b: &NetPoint| {
                let ca = gas.sound_speed_sq(a.state.q_sq()).sqrt();
                let cb = gas.sound_speed_sq(b.state.q_sq()).sqrt();
                let d = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
                (cb - ca) / d
            };
            let dp_chord = dc(&below, &node);
            // ds c: along the shock between adjacent nodes (central)
            let prev = lines[k - 1].points[nn - 1];
            let next = lines[k + 1].points[nn - 1];
            let ds_c = dc(&prev, &next);
            let refl = reflection_coeff_g(node.state, &res.freestream, &gas).unwrap();
            // shock relation: ds c = t+ dp + t- dm and dp = g dm
            // => implied dm from ds: dm_ds = ds_c / (t+ g + t-)
            let dm_ds = ds_c / (refl.t_plus * refl.g_value + refl.t_minus);
            let dp_implied = refl.g_value * dm_ds;
            let ang = char_angles(node.state, &gas).unwrap();
            println!(
                "  x={:6.2} xi={:7.3}: dp_chord={dp_chord:+.3e} vs g*dm(ds)={dp_implied:+.3e}  (ds_c={ds_c:+.3e}, g={:.4}, t+={:.3}, t-={:.3}, alpha-s={:+.4})",
                node.x, node.xi, refl.g_value, refl.t_plus, refl.t_minus,
                ang.alpha - refl.k_angle * 0.0 - node.state.v.atan2(node.state.u) // placeholder
            );
        }
    }
}
