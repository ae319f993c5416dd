//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them). Tolerances are pinned in code, not configurable.

use std::time::Instant;

use sdqkd::eavesdrop::{
    branch_report, brute_force_optimum, brute_force_optimum_2d, optimal_params,
    optimal_success_prob, root_of_f1, success_prob_type1, success_prob_type2, Branch,
};
use sdqkd::keyrate::{joint_ab, joint_abe, secret_key_rate, secret_key_rate_via, Outcome};
use sdqkd::optics::{
    detection_chain, noisy_joints, noisy_secret_key_rate, noisy_success_prob, sagnac_bob,
    sagnac_eve, NoiseParams,
};
use sdqkd::qmath::ComplexMatrix;
use sdqkd::scenario::{
    bob_kraus, eve_povm, eve_signature_state, NoiseKind, ScenarioParams, Structure,
};

fn assert_runtime(start: Instant, limit_s: f64, criterion: &str) {
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < limit_s,
        "{criterion}: runtime {elapsed:.2}s exceeds {limit_s}s"
    );
}

/// Weak unimodality: non-decreasing up to the argmax, non-increasing after.
fn is_unimodal(values: &[f64], tol: f64) -> bool {
    let peak = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    values[..peak].windows(2).all(|w| w[1] >= w[0] - tol)
        && values[peak..].windows(2).all(|w| w[1] <= w[0] + tol)
}

#[test]
fn criterion_1_branch_point() {
    let start = Instant::now();
    let root = root_of_f1(0.4, 0.6, 0.5, 0.75).unwrap();
    assert!(
        (root - 0.6538).abs() <= 1e-3,
        "f1 root {root} not within 1e-3 of 0.6538"
    );
    let below = branch_report(0.4, 0.6, root - 1e-6).unwrap();
    let above = branch_report(0.4, 0.6, root + 1e-6).unwrap();
    assert_eq!(below.branch, Branch::Interior, "below the root must be interior");
    assert_eq!(above.branch, Branch::Boundary, "above the root must be boundary");
    let (p_below, _) = optimal_success_prob(0.4, 0.6, root - 1e-6, 0.5).unwrap();
    let (p_above, _) = optimal_success_prob(0.4, 0.6, root + 1e-6, 0.5).unwrap();
    assert!(
        (p_below - p_above).abs() <= 1e-6,
        "optimum jumps by {} across the branch point",
        (p_below - p_above).abs()
    );
    assert_runtime(start, 1.0, "criterion 1");
    println!(
        "PASS criterion 1: branch point at s = {root:.4} ± 1e-3 with continuous optimum (gap {:.2e})",
        (p_below - p_above).abs()
    );
}

#[test]
fn criterion_2_optimization_oracle() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &q0 in &[0.4, 0.5] {
        let mut s = 0.05;
        while s <= 0.75 + 1e-9 {
            let (closed, _) = optimal_success_prob(q0, 1.0 - q0, s, 0.5).unwrap();
            let boundary = brute_force_optimum(q0, 1.0 - q0, s, 0.5, 100_000).unwrap();
            let audit = brute_force_optimum_2d(q0, 1.0 - q0, s, 0.5, 1_000).unwrap();
            let grid = boundary.max(audit);
            worst = worst.max((closed - grid).abs());
            assert!(
                (closed - grid).abs() <= 1e-4,
                "closed form {closed} vs grid {grid} at q0={q0}, s={s}"
            );
            s += 0.05;
        }
    }
    assert_runtime(start, 30.0, "criterion 2");
    println!("PASS criterion 2: closed-form optimum matches grid oracles, worst gap {worst:.2e}");
}

#[test]
fn criterion_3_structure_equivalence() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &q0 in &[0.4, 0.45, 0.5] {
        for si in 0..10 {
            let s = 0.05 + 0.08 * si as f64;
            for ei in 0..10 {
                let eta = 0.05 + 0.1 * ei as f64;
                let (p, _) = optimal_params(q0, 1.0 - q0, s, eta).unwrap();
                let p1 = success_prob_type1(&p).unwrap();
                let p2 = success_prob_type2(&p).unwrap();
                worst = worst.max((p1 - p2).abs());
                let t1 = joint_abe(&p, Structure::TypeI).unwrap();
                let t2 = joint_abe(&p, Structure::TypeII).unwrap();
                worst = worst.max(t1.max_abs_diff(&t2));
                let k1 = secret_key_rate_via(&p, Structure::TypeI).unwrap();
                let k2 = secret_key_rate_via(&p, Structure::TypeII).unwrap();
                worst = worst.max((k1 - k2).abs());
                assert!(
                    worst <= 1e-12,
                    "structures differ by {worst} at q0={q0}, s={s}, eta={eta}"
                );
            }
        }
    }
    assert_runtime(start, 10.0, "criterion 3");
    println!("PASS criterion 3: type-I and type-II agree entrywise, worst gap {worst:.2e}");
}

#[test]
fn criterion_4_secret_key_peak() {
    let start = Instant::now();
    let mut peak_at = 0.0;
    for &eta in &[0.6, 0.7, 0.8, 0.9] {
        let mut values = Vec::new();
        let mut grid = Vec::new();
        let mut s = 0.01;
        while s <= 0.95 + 1e-9 {
            let p = ScenarioParams::symmetric(s, eta).unwrap();
            values.push(secret_key_rate(&p).unwrap());
            grid.push(s);
            s += 0.005;
        }
        assert!(
            is_unimodal(&values, 1e-12),
            "K(s) series for eta={eta} is not unimodal"
        );
        if (eta - 0.9).abs() < 1e-12 {
            let argmax = values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            peak_at = grid[argmax];
            assert!(
                (peak_at - 0.4585).abs() <= 0.01,
                "eta=0.9 peak at {peak_at}, expected 0.4585 ± 0.01"
            );
        }
    }
    assert_runtime(start, 10.0, "criterion 4");
    println!("PASS criterion 4: key-rate series unimodal; eta=0.9 peak at s = {peak_at:.4}");
}

#[test]
fn criterion_5_optics_ideal_limit() {
    let start = Instant::now();
    let ideal = NoiseParams::ideal();
    let mut worst = 0.0f64;
    for i in 0..10 {
        let s = 0.05 + 0.09 * i as f64;
        for &eta in &[0.5, 0.7] {
            let p = ScenarioParams::symmetric(s, eta).unwrap();
            // conditional receiver tables
            let coeff = (1.0 - eta) / (2.0 * (1.0 - s * s));
            for a in 0..2 {
                let chain = detection_chain(&p, &ideal, a).unwrap();
                for b in 0..2 {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    let expected = eta * p.alpha(b) * delta + coeff * p.alpha(b);
                    worst = worst.max((chain.receiver[b] - expected).abs());
                }
                let expected_inc = 1.0
                    - (eta * p.alpha(a) + coeff * (p.alpha0() + p.alpha1()));
                worst = worst.max((chain.receiver[2] - expected_inc).abs());
            }
            // joint tables, success probability, key rate
            let (ab, be) = noisy_joints(&p, &ideal).unwrap();
            worst = worst.max(ab.max_abs_diff(&joint_ab(&p)));
            let analytic_be = joint_abe(&p, Structure::TypeI)
                .unwrap()
                .marginal(&["b", "e"])
                .unwrap();
            worst = worst.max(be.max_abs_diff(&analytic_be));
            let (p_opt, _) = optimal_success_prob(0.5, 0.5, s, eta).unwrap();
            worst = worst.max((noisy_success_prob(&p, &ideal).unwrap() - p_opt).abs());
            let k = secret_key_rate(&p).unwrap();
            worst = worst.max((noisy_secret_key_rate(&p, &ideal).unwrap() - k).abs());
            assert!(worst <= 1e-10, "ideal-limit gap {worst} at s={s}, eta={eta}");
        }
    }
    assert_runtime(start, 30.0, "criterion 5");
    println!("PASS criterion 5: ideal-limit detection chain matches analytic layer, worst gap {worst:.2e}");
}

#[test]
fn criterion_6_colored_vs_white() {
    let start = Instant::now();
    let mut printed_worst = f64::NEG_INFINITY;
    for &d in &[0.1, 0.2, 0.3] {
        let white = NoiseParams::new(0.5, NoiseKind::White, d, d, 0.8, 0.0).unwrap();
        let colored = NoiseParams::new(0.5, NoiseKind::Colored, d, d, 0.8, 0.0).unwrap();
        let mut s = 0.05;
        while s <= 0.90 + 1e-9 {
            let p = ScenarioParams::symmetric(s, 0.5).unwrap();
            let pw = noisy_success_prob(&p, &white).unwrap();
            let pc = noisy_success_prob(&p, &colored).unwrap();
            assert!(
                pc <= pw + 1e-12,
                "colored {pc} exceeds white {pw} at s={s}, D={d}"
            );
            printed_worst = printed_worst.max(pc - pw);
            s += 0.05;
        }
    }
    assert_runtime(start, 60.0, "criterion 6");
    println!("PASS criterion 6: colored-noise leakage ≤ white pointwise (max colored−white = {printed_worst:.2e})");
}

#[test]
fn criterion_7_noisy_key_rate_shape() {
    let start = Instant::now();
    // Exactly one interior maximum is asserted for each noisy key-rate
    // series at eta_ab = 0.5, eta_ent = 0.5, eta_det = 0.8, De = 0.4,
    // D0 ∈ {0.1, 0.2}. Under the key-rate convention this library pins via
    // criteria 4 and 5 (term-by-term entropies on the post-processed
    // tables), these series are strictly decreasing in s down to s → 0, so
    // their maximum sits on the boundary of the sweep rather than inside
    // it. The alternative convention built from per-table mutual
    // informations does produce a single interior maximum, but moves the
    // criterion-4 reference peak away from 0.4585. See the repository
    // README ("Known discrepancies") for the numbers.
    let mut all_pass = true;
    let mut detail = String::new();
    for kind in [NoiseKind::White, NoiseKind::Colored] {
        for &d0 in &[0.1, 0.2] {
            let n = NoiseParams::new(0.5, kind, d0, 0.4, 0.8, 0.0).unwrap();
            let mut values = Vec::new();
            let mut grid = Vec::new();
            let mut s = 0.005;
            while s <= 0.90 + 1e-9 {
                let p = ScenarioParams::symmetric(s, 0.5).unwrap();
                values.push(noisy_secret_key_rate(&p, &n).unwrap());
                grid.push(s);
                s += 0.005;
            }
            let argmax = values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            let interior = argmax > 0 && argmax < values.len() - 1;
            let unimodal = is_unimodal(&values, 1e-12);
            if !(interior && unimodal) {
                all_pass = false;
                detail.push_str(&format!(
                    "\n  {kind} D0={d0}: maximum K={:.5} at s={:.3} (grid edge: {}), unimodal: {}",
                    values[argmax],
                    grid[argmax],
                    !interior,
                    unimodal
                ));
            }
        }
    }
    assert_runtime(start, 60.0, "criterion 7");
    if all_pass {
        println!("PASS criterion 7: noisy key-rate series each have one interior maximum");
    } else {
        println!("FAIL criterion 7: noisy key-rate series lack an interior maximum:{detail}");
        panic!(
            "criterion 7 failed: the noisy key-rate series are monotone decreasing in s \
             under the pinned key-rate convention, so no interior maximum exists.{detail}"
        );
    }
}

#[test]
fn criterion_8_invariant_suite() {
    let start = Instant::now();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2024);
    for draw in 0..100 {
        let p = ScenarioParams::sample_feasible(&mut rng);
        // POVM/Kraus completeness
        let kraus = bob_kraus(p.s(), p.alpha0(), p.alpha1()).unwrap();
        assert!(kraus.completeness_residual() < 1e-10, "draw {draw}: Kraus completeness");
        let povm = eve_povm(p.s(), p.u0(), p.u1()).unwrap();
        assert!(povm.completeness_residual() < 1e-10, "draw {draw}: POVM completeness");
        for e in 0..3 {
            assert!(povm.element(e).is_psd(1e-10), "draw {draw}: POVM element {e} PSD");
        }
        // unitarity of the interferometers at this overlap
        for u in [sagnac_bob(p.s()).unwrap(), sagnac_eve(p.s()).unwrap()] {
            let residual = u
                .adjoint()
                .matmul(&u)
                .max_abs_diff(&ComplexMatrix::identity(6));
            assert!(residual < 1e-12, "draw {draw}: unitarity {residual}");
        }
        // signature-state overlap
        let t0 = eve_signature_state(p.s(), 0).unwrap();
        let t1 = eve_signature_state(p.s(), 1).unwrap();
        assert!(
            (t0.inner(&t1).re + p.s()).abs() < 1e-12,
            "draw {draw}: overlap identity"
        );
        // distribution normalization and entropy bounds
        let abe = joint_abe(&p, Structure::TypeI).unwrap();
        abe.validate().unwrap();
        assert!((abe.total_mass() - 1.0).abs() < 1e-12, "draw {draw}: normalization");
        let ab = joint_ab(&p);
        let h = ab.entropy();
        assert!(
            (0.0..=(6.0f64).log2() + 1e-12).contains(&h),
            "draw {draw}: entropy bound"
        );
        // K ≥ 0
        let k = secret_key_rate(&p).unwrap();
        assert!(k >= 0.0 && k.is_finite(), "draw {draw}: K = {k}");
        // trace preservation through the noisy chain (masses sum to 1);
        // detection_chain errors out internally on >1e-8 leakage
        let n = NoiseParams::new(
            0.3 + 0.007 * draw as f64,
            if draw % 2 == 0 { NoiseKind::White } else { NoiseKind::Colored },
            0.004 * draw as f64,
            0.005 * draw as f64,
            0.2 + 0.008 * draw as f64,
            0.0,
        )
        .unwrap();
        let chain = detection_chain(&p, &n, draw % 2).unwrap();
        let mass: f64 = chain.receiver.iter().sum();
        assert!((mass - 1.0).abs() < 1e-10, "draw {draw}: chain mass {mass}");
        for &x in chain.receiver.iter().chain(chain.joint.iter().flatten()) {
            assert!((-1e-12..=1.0 + 1e-12).contains(&x), "draw {draw}: probability {x}");
        }
        // marginal of the ABE table reproduces the AB table
        assert!(
            abe.marginal(&["a", "b"]).unwrap().max_abs_diff(&ab) < 1e-12,
            "draw {draw}: AB marginal"
        );
        let _ = Outcome::Inconclusive; // alphabet sanity anchor
    }
    assert_runtime(start, 30.0, "criterion 8");
    println!("PASS criterion 8: invariant suite green on 100 randomized feasible draws");
}

#[test]
fn criterion_9_determinism() {
    let bin = env!("CARGO_BIN_EXE_sdqkd");
    let run = |args: &[&str]| -> Vec<u8> {
        let out = std::process::Command::new(bin)
            .args(args)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "command {args:?} failed: {out:?}");
        out.stdout
    };
    for args in [
        vec!["fig3", "--steps", "101", "--stop", "0.8"],
        vec!["fig5", "--steps", "11"],
        vec!["fig7", "--steps", "4", "--panel", "b"],
        vec!["fig7", "--steps", "3", "--panel", "a"],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first, second, "output of {args:?} differs between runs");
        assert!(!first.is_empty());
    }
    // parallel evaluation must not change a single byte
    let serial = run(&["fig3", "--steps", "101", "--stop", "0.8"]);
    let parallel = run(&["fig3", "--steps", "101", "--stop", "0.8", "--parallel"]);
    assert_eq!(serial, parallel, "parallel evaluation changed the output");
    println!("PASS criterion 9: repeated and parallel runs are byte-identical");
}
