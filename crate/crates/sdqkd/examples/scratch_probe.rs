use sdqkd::keyrate::{joint_ab, joint_be, postprocess_ab, postprocess_be, shannon_entropy};
use sdqkd::optics::{noisy_joints, noisy_secret_key_rate, noisy_success_prob, NoiseParams};
use sdqkd::scenario::{NoiseKind, ScenarioParams};

// K variant with proper mutual informations: I(B:A) - I(B:E) including the
// H(B) marginal entropy of each table.
fn k_proper(
    ab: &sdqkd::keyrate::JointDistribution,
    be: &sdqkd::keyrate::JointDistribution,
) -> f64 {
    let abp = postprocess_ab(ab).unwrap();
    let h_a = shannon_entropy([0.5, 0.5]);
    let h_b_ab = abp.marginal(&["b"]).unwrap().entropy();
    let i_ba = h_a + h_b_ab - abp.entropy();
    let bep = postprocess_be(be).unwrap();
    let h_b_be = bep.marginal(&["b"]).unwrap().entropy();
    let h_e = bep.marginal(&["e"]).unwrap().entropy();
    let i_be = h_b_be + h_e - bep.entropy();
    (i_ba - i_be).max(0.0)
}

fn main() {
    // where does the proper-MI variant put the Fig-5 peak (eta=0.9)?
    let mut best = (0.0, -1.0);
    let mut s = 0.05;
    while s <= 0.95 {
        let p = ScenarioParams::symmetric(s, 0.9).unwrap();
        let k = k_proper(&joint_ab(&p), &joint_be(&p).unwrap());
        if k > best.1 {
            best = (s, k);
        }
        s += 0.005;
    }
    println!("proper-MI K peak for eta=0.9 at s={:.4} (K={:.4})", best.0, best.1);

    // proper-MI K on the fig7b configs
    for kind in [NoiseKind::White, NoiseKind::Colored] {
        for d0 in [0.1, 0.2] {
            let n = NoiseParams::new(0.5, kind, d0, 0.4, 0.8, 0.0).unwrap();
            print!("K' {kind:?} d0={d0}: ");
            for s in [0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
                let p = ScenarioParams::symmetric(s, 0.5).unwrap();
                let (ab, be) = noisy_joints(&p, &n).unwrap();
                print!("{:.5} ", k_proper(&ab, &be));
            }
            println!();
        }
    }
    // Small-s behavior of the fig7b series
    for kind in [NoiseKind::White, NoiseKind::Colored] {
        for d0 in [0.1, 0.2] {
            let n = NoiseParams::new(0.5, kind, d0, 0.4, 0.8, 0.0).unwrap();
            print!("K {kind:?} d0={d0}: ");
            for s in [1e-6, 1e-4, 0.001, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.1] {
                let p = ScenarioParams::symmetric(s, 0.5).unwrap();
                let k = noisy_secret_key_rate(&p, &n).unwrap();
                print!("{:.5} ", k);
            }
            println!();
        }
    }
    // D0 = De = D: does K depend on D, under each convention?
    for kind in [NoiseKind::White, NoiseKind::Colored] {
        for d in [0.0, 0.1, 0.2, 0.3] {
            let n = NoiseParams::new(0.5, kind, d, d, 0.8, 0.0).unwrap();
            let p = ScenarioParams::symmetric(0.45, 0.5).unwrap();
            let k = noisy_secret_key_rate(&p, &n).unwrap();
            let (ab, be) = noisy_joints(&p, &n).unwrap();
            println!(
                "D0=De={d} {kind:?}: K_literal={k:.10}  K_properMI={:.10}",
                k_proper(&ab, &be)
            );
        }
    }
    // colored <= white over full fig7a grid
    let mut worst: f64 = f64::NEG_INFINITY;
    for d in [0.1, 0.2, 0.3] {
        let w = NoiseParams::new(0.5, NoiseKind::White, d, d, 0.8, 0.0).unwrap();
        let c = NoiseParams::new(0.5, NoiseKind::Colored, d, d, 0.8, 0.0).unwrap();
        let mut s = 0.05;
        while s <= 0.901 {
            let p = ScenarioParams::symmetric(s, 0.5).unwrap();
            let pw = noisy_success_prob(&p, &w).unwrap();
            let pc = noisy_success_prob(&p, &c).unwrap();
            worst = worst.max(pc - pw);
            s += 0.05;
        }
    }
    println!("max (colored - white) over fig7a grid: {worst:e}");
}
