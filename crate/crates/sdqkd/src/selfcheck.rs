//! Runtime invariant suite behind the `selfcheck` CLI subcommand: every
//! module's structural invariants evaluated on fixed-seed randomized draws
//! and reference grids, reported one line per check.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eavesdrop::{
    branch_report, brute_force_optimum, optimal_params, optimal_success_prob, root_of_f1,
    success_prob_closed_form, success_prob_type1, success_prob_type2,
};
use crate::keyrate::{
    joint_ab, joint_abe, postprocess_ab, postprocess_be, secret_key_rate, shannon_entropy,
};
use crate::optics::{
    detection_chain, hwp, noisy_joints, noisy_secret_key_rate, noisy_success_prob, pbs,
    sagnac_bob, sagnac_eve, NoiseParams,
};
use crate::qmath::{partial_trace, ComplexMatrix, HilbertLabel, Subsystem};
use crate::scenario::{
    bob_kraus, depolarized_state, eve_povm, eve_signature_state, type1_joint_state,
    type2_joint_state, NoiseKind, ScenarioParams, Structure,
};

/// One named invariant check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Collected outcome of the whole suite.
#[derive(Debug, Clone, Default)]
pub struct SelfCheckReport {
    pub checks: Vec<CheckResult>,
}

impl SelfCheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => self.checks.push(CheckResult {
                name: name.into(),
                passed: true,
                detail,
            }),
            Err(detail) => self.checks.push(CheckResult {
                name: name.into(),
                passed: false,
                detail,
            }),
        }
    }
}

fn random_psd(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let b = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    b.adjoint().matmul(&b)
}

fn check_tensor_trace_duality() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let da = rng.gen_range(2..4usize);
        let db = rng.gen_range(2..4usize);
        let a = random_psd(&mut rng, da);
        let b = random_psd(&mut rng, db);
        let basis_a: Vec<String> = (0..da).map(|i| i.to_string()).collect();
        let basis_b: Vec<String> = (0..db).map(|i| i.to_string()).collect();
        let label = HilbertLabel::new(vec![
            Subsystem::new("A", &basis_a.iter().map(String::as_str).collect::<Vec<_>>()),
            Subsystem::new("B", &basis_b.iter().map(String::as_str).collect::<Vec<_>>()),
        ])
        .map_err(|e| e.to_string())?;
        let joint = a.kron(&b);
        let reduced = partial_trace(&joint, &label, &["A"]).map_err(|e| e.to_string())?;
        let expected = a.scale(b.trace());
        worst = worst.max(reduced.max_abs_diff(&expected));
        if reduced.rows() != da {
            return Err("partial trace lost dimension bookkeeping".into());
        }
    }
    if worst < 1e-10 {
        Ok(format!("100 random PSD draws, worst residual {worst:.2e}"))
    } else {
        Err(format!("worst residual {worst:.2e} exceeds 1e-10"))
    }
}

fn check_measurement_completeness() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = ScenarioParams::sample_feasible(&mut rng);
        let kraus = bob_kraus(p.s(), p.alpha0(), p.alpha1()).map_err(|e| e.to_string())?;
        let povm = eve_povm(p.s(), p.u0(), p.u1()).map_err(|e| e.to_string())?;
        worst = worst.max(kraus.completeness_residual());
        worst = worst.max(povm.completeness_residual());
        for m in kraus.povm_elements().iter() {
            if !m.is_psd(1e-10) {
                return Err("receiver POVM element not PSD".into());
            }
        }
        for e in 0..3 {
            if !povm.element(e).is_psd(1e-10) {
                return Err("eavesdropper POVM element not PSD".into());
            }
        }
    }
    if worst < 1e-10 {
        Ok(format!("100 random draws, worst completeness residual {worst:.2e}"))
    } else {
        Err(format!("worst completeness residual {worst:.2e}"))
    }
}

fn check_signature_overlap() -> Result<String, String> {
    let mut worst = 0.0f64;
    for i in 0..10 {
        let s = 0.1 * i as f64;
        let t0 = eve_signature_state(s, 0).map_err(|e| e.to_string())?;
        let t1 = eve_signature_state(s, 1).map_err(|e| e.to_string())?;
        worst = worst.max((t0.inner(&t1).re + s).abs());
    }
    if worst < 1e-12 {
        Ok(format!("overlap grid, worst |⟨ψ̃₀|ψ̃₁⟩ + s| = {worst:.2e}"))
    } else {
        Err(format!("overlap deviates by {worst:.2e}"))
    }
}

fn check_marginal_consistency() -> Result<String, String> {
    let mut worst = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let s = 0.18 * i as f64;
            let eta = 0.25 * j as f64;
            for a in 0..2 {
                let direct = depolarized_state(s, eta, a).map_err(|e| e.to_string())?;
                let gamma = type1_joint_state(s, eta, a)
                    .map_err(|e| e.to_string())?
                    .to_density()
                    .partial_trace(&["B"])
                    .map_err(|e| e.to_string())?;
                let sigma = type2_joint_state(s, eta, a)
                    .map_err(|e| e.to_string())?
                    .partial_trace(&["B"])
                    .map_err(|e| e.to_string())?;
                worst = worst.max(gamma.matrix().max_abs_diff(direct.matrix()));
                worst = worst.max(sigma.matrix().max_abs_diff(direct.matrix()));
            }
        }
    }
    if worst < 1e-12 {
        Ok(format!("5×5 grid, worst marginal deviation {worst:.2e}"))
    } else {
        Err(format!("marginal deviation {worst:.2e}"))
    }
}

fn check_structure_equivalence() -> Result<String, String> {
    let mut worst = 0.0f64;
    for qi in 0..3 {
        let q0 = 0.3 + 0.1 * qi as f64;
        for si in 0..10 {
            let s = 0.05 + 0.06 * si as f64;
            for ei in 0..10 {
                let eta = 0.05 + 0.1 * ei as f64;
                let (p, _) = optimal_params(q0, 1.0 - q0, s, eta).map_err(|e| e.to_string())?;
                let t1 = success_prob_type1(&p).map_err(|e| e.to_string())?;
                let t2 = success_prob_type2(&p).map_err(|e| e.to_string())?;
                worst = worst.max((t1 - t2).abs());
            }
        }
    }
    if worst < 1e-12 {
        Ok(format!("10×10×3 grid, worst |type1 − type2| = {worst:.2e}"))
    } else {
        Err(format!("structures differ by {worst:.2e}"))
    }
}

fn check_closed_form_vs_evolution() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = ScenarioParams::sample_feasible(&mut rng);
        let closed = success_prob_closed_form(&p);
        let evolved = success_prob_type1(&p).map_err(|e| e.to_string())?;
        worst = worst.max((closed - evolved).abs());
    }
    if worst < 1e-12 {
        Ok(format!("50 random draws, worst deviation {worst:.2e}"))
    } else {
        Err(format!("closed form deviates by {worst:.2e}"))
    }
}

fn check_optimum_properties() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..100 {
        let q0: f64 = rng.gen_range(0.2..0.8);
        let q1 = 1.0 - q0;
        let edge = (q0 / q1).sqrt().min((q1 / q0).sqrt());
        let s: f64 = rng.gen_range(0.0..(0.95 * edge).min(0.9));
        let report = branch_report(q0, q1, s).map_err(|e| e.to_string())?;
        let (u0, u1) = report.optimal_u;
        if (1.0 - u0) * (1.0 - u1) < s * s - 1e-12 {
            return Err(format!("reported optimum infeasible at q0={q0}, s={s}"));
        }
        let (base, _) = optimal_success_prob(q0, q1, s, 0.0).map_err(|e| e.to_string())?;
        let (half, _) = optimal_success_prob(q0, q1, s, 0.5).map_err(|e| e.to_string())?;
        if (half / 0.5 - base).abs() > 1e-12 {
            return Err(format!("optimum not proportional to 1−η at q0={q0}, s={s}"));
        }
    }
    Ok("100 random points: feasibility and η-proportionality hold".into())
}

fn check_branch_continuity() -> Result<String, String> {
    let root = root_of_f1(0.4, 0.6, 0.5, 0.75).map_err(|e| e.to_string())?;
    let (below, _) = optimal_success_prob(0.4, 0.6, root - 1e-6, 0.5).map_err(|e| e.to_string())?;
    let (above, _) = optimal_success_prob(0.4, 0.6, root + 1e-6, 0.5).map_err(|e| e.to_string())?;
    let jump = (below - above).abs();
    if jump < 1e-6 {
        Ok(format!("root at {root:.4}, jump {jump:.2e}"))
    } else {
        Err(format!("discontinuity {jump:.2e} at the branch root"))
    }
}

fn check_brute_force_agreement() -> Result<String, String> {
    let mut worst = 0.0f64;
    for &q0 in &[0.4, 0.5] {
        let mut s = 0.05;
        while s <= 0.75 {
            let (exact, _) = optimal_success_prob(q0, 1.0 - q0, s, 0.5).map_err(|e| e.to_string())?;
            let grid = brute_force_optimum(q0, 1.0 - q0, s, 0.5, 20_000).map_err(|e| e.to_string())?;
            worst = worst.max((exact - grid).abs());
            s += 0.1;
        }
    }
    if worst < 1e-4 {
        Ok(format!("boundary grid oracle agrees, worst {worst:.2e}"))
    } else {
        Err(format!("oracle deviates by {worst:.2e}"))
    }
}

fn check_distributions() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..25 {
        let p = ScenarioParams::sample_feasible(&mut rng);
        let abe = joint_abe(&p, Structure::TypeI).map_err(|e| e.to_string())?;
        abe.validate().map_err(|e| e.to_string())?;
        let be = abe.marginal(&["b", "e"]).map_err(|e| e.to_string())?;
        let ab = joint_ab(&p);
        let ab_from_abe = abe.marginal(&["a", "b"]).map_err(|e| e.to_string())?;
        if ab.max_abs_diff(&ab_from_abe) > 1e-12 {
            return Err("P_AB inconsistent with P_ABE marginal".into());
        }
        let h_a = shannon_entropy([p.q0(), p.q1()]);
        if !(0.0..=1.0 + 1e-12).contains(&h_a) {
            return Err("prior entropy out of bounds".into());
        }
        if let Ok(post) = postprocess_ab(&ab) {
            let h = post.entropy();
            if !(0.0..=2.0 + 1e-12).contains(&h) {
                return Err("joint entropy out of bounds".into());
            }
            let h_a_post = post.marginal(&["a"]).map_err(|e| e.to_string())?.entropy();
            let h_b_post = post.marginal(&["b"]).map_err(|e| e.to_string())?.entropy();
            if h_a_post + h_b_post - h < -1e-10 {
                return Err("negative mutual information I(B:A)".into());
            }
        }
        if let Ok(post) = postprocess_be(&be) {
            let h_be = post.entropy();
            let h_b = post.marginal(&["b"]).map_err(|e| e.to_string())?.entropy();
            let h_e = post.marginal(&["e"]).map_err(|e| e.to_string())?.entropy();
            if h_b + h_e - h_be < -1e-10 {
                return Err("negative mutual information I(B:E)".into());
            }
        }
        let k = secret_key_rate(&p).map_err(|e| e.to_string())?;
        if !k.is_finite() || k < 0.0 {
            return Err(format!("key rate {k} out of range"));
        }
    }
    Ok("25 random draws: normalization, entropy bounds, K ≥ 0".into())
}

fn check_optical_elements() -> Result<String, String> {
    let mut worst = 0.0f64;
    for i in 0..10 {
        let s = 0.099 * i as f64;
        for u in [sagnac_bob(s).map_err(|e| e.to_string())?, sagnac_eve(s).map_err(|e| e.to_string())?] {
            worst = worst.max(
                u.adjoint()
                    .matmul(&u)
                    .max_abs_diff(&ComplexMatrix::identity(6)),
            );
        }
    }
    let v = pbs();
    worst = worst.max(
        v.adjoint()
            .matmul(&v)
            .max_abs_diff(&ComplexMatrix::identity(3)),
    );
    let h = hwp(std::f64::consts::FRAC_PI_8);
    worst = worst.max(h.matmul(&h).max_abs_diff(&ComplexMatrix::identity(3)));
    if worst < 1e-12 {
        Ok(format!("unitarity/isometry residuals ≤ {worst:.2e}"))
    } else {
        Err(format!("unitarity residual {worst:.2e}"))
    }
}

fn check_chain_probability_bounds() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..10 {
        let s: f64 = rng.gen_range(0.0..0.9);
        let eta: f64 = rng.gen_range(0.0..1.0);
        let p = ScenarioParams::symmetric(s, eta).map_err(|e| e.to_string())?;
        let kind = if rng.gen_bool(0.5) {
            NoiseKind::White
        } else {
            NoiseKind::Colored
        };
        let n = NoiseParams::new(
            rng.gen_range(0.0..1.0),
            kind,
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            0.0,
        )
        .map_err(|e| e.to_string())?;
        for a in 0..2 {
            let t = detection_chain(&p, &n, a).map_err(|e| e.to_string())?;
            for &x in t.receiver.iter().chain(t.joint.iter().flatten()) {
                if !(-1e-12..=1.0 + 1e-12).contains(&x) {
                    return Err(format!("probability {x} out of bounds"));
                }
            }
        }
    }
    Ok("10 random noisy chains: branch masses conserved, probabilities in [0, 1]".into())
}

fn check_optics_ideal_limit() -> Result<String, String> {
    let n = NoiseParams::ideal();
    let mut worst = 0.0f64;
    for i in 0..10 {
        let s = 0.05 + 0.09 * i as f64;
        let p = ScenarioParams::symmetric(s, 0.5).map_err(|e| e.to_string())?;
        let (expected, _) = optimal_success_prob(0.5, 0.5, s, 0.5).map_err(|e| e.to_string())?;
        let got = noisy_success_prob(&p, &n).map_err(|e| e.to_string())?;
        worst = worst.max((expected - got).abs());
        let k_expected = secret_key_rate(&p).map_err(|e| e.to_string())?;
        let k = noisy_secret_key_rate(&p, &n).map_err(|e| e.to_string())?;
        worst = worst.max((k - k_expected).abs());
    }
    if worst < 1e-10 {
        Ok(format!("10-point s grid, worst deviation {worst:.2e}"))
    } else {
        Err(format!("ideal-limit deviation {worst:.2e}"))
    }
}

fn check_colored_vs_white() -> Result<String, String> {
    let mut worst = f64::NEG_INFINITY;
    for &d in &[0.1, 0.2, 0.3] {
        let white = NoiseParams::new(0.5, NoiseKind::White, d, d, 0.8, 0.0).map_err(|e| e.to_string())?;
        let colored =
            NoiseParams::new(0.5, NoiseKind::Colored, d, d, 0.8, 0.0).map_err(|e| e.to_string())?;
        let mut s = 0.05;
        while s <= 0.9 + 1e-9 {
            let p = ScenarioParams::symmetric(s, 0.5).map_err(|e| e.to_string())?;
            let pw = noisy_success_prob(&p, &white).map_err(|e| e.to_string())?;
            let pc = noisy_success_prob(&p, &colored).map_err(|e| e.to_string())?;
            worst = worst.max(pc - pw);
            s += 0.05;
        }
    }
    if worst <= 1e-12 {
        Ok(format!("colored ≤ white pointwise, max gap violation {worst:.2e}"))
    } else {
        Err(format!("colored exceeds white by {worst:.2e}"))
    }
}

fn check_noisy_joint_consistency() -> Result<String, String> {
    let p = ScenarioParams::symmetric(0.4, 0.5).map_err(|e| e.to_string())?;
    let n = NoiseParams::new(0.6, NoiseKind::Colored, 0.2, 0.3, 0.8, 0.0).map_err(|e| e.to_string())?;
    let (ab, be) = noisy_joints(&p, &n).map_err(|e| e.to_string())?;
    let mass_ab = ab.total_mass();
    let mass_be = be.total_mass();
    if (mass_ab - 1.0).abs() > 1e-10 || (mass_be - 1.0).abs() > 1e-10 {
        return Err(format!("noisy joints not normalized: {mass_ab}, {mass_be}"));
    }
    Ok("noisy joint tables normalized".into())
}

/// Runs the whole invariant suite; `inject_failure` adds a deliberately
/// failing check so callers can exercise their failure paths.
pub fn run_all(inject_failure: bool) -> SelfCheckReport {
    let mut report = SelfCheckReport::default();
    report.push("tensor/partial-trace duality", check_tensor_trace_duality());
    report.push("measurement completeness", check_measurement_completeness());
    report.push("signature-state overlap", check_signature_overlap());
    report.push("channel marginal consistency", check_marginal_consistency());
    report.push("attack-structure equivalence", check_structure_equivalence());
    report.push("closed form vs evolution", check_closed_form_vs_evolution());
    report.push("optimum feasibility and scaling", check_optimum_properties());
    report.push("branch continuity", check_branch_continuity());
    report.push("grid-search oracle agreement", check_brute_force_agreement());
    report.push("distribution invariants", check_distributions());
    report.push("optical element unitarity", check_optical_elements());
    report.push("detection-chain probability bounds", check_chain_probability_bounds());
    report.push("optics ideal limit", check_optics_ideal_limit());
    report.push("colored vs white ordering", check_colored_vs_white());
    report.push("noisy joint normalization", check_noisy_joint_consistency());
    if inject_failure {
        report.push(
            "injected failure (test hook)",
            Err("deliberate tolerance violation requested".into()),
        );
    }
    report
}
