//! Analytic model objects: the two signal states, the depolarizing channel,
//! the joint receiver–eavesdropper states of both attack structures, the
//! receiver's unambiguous-discrimination Kraus set, and the eavesdropper's
//! POVM.
//!
//! Conventions: Bob's qubit carries basis {|1⟩,|2⟩}; Eve's system is a single
//! qutrit {|0⟩,|1⟩,|2⟩} whose flag state |0⟩ is orthogonal to the qubit span
//! on which her discrimination runs. All constructed vectors use the real,
//! positive-leading-amplitude convention so entrywise golden comparisons are
//! deterministic.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{
    ComplexMatrix, ComplexVector, DensityOperator, HilbertLabel, PureState, TOL_PSD,
};

/// Slack applied to feasibility surfaces so exactly-saturating optima pass.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

/// Label for Bob's qubit.
pub fn bob_label() -> HilbertLabel {
    HilbertLabel::single("B", &["1", "2"])
}

/// Label for Eve's qutrit (flag |0⟩ plus the discrimination span {|1⟩,|2⟩}).
pub fn eve_label() -> HilbertLabel {
    HilbertLabel::single("E", &["0", "1", "2"])
}

fn joint_label() -> HilbertLabel {
    bob_label().tensor(&eve_label()).expect("distinct tags")
}

fn check_bit(name: &str, a: usize) -> Result<()> {
    if a > 1 {
        return Err(Error::Parameter(format!("{name} must be 0 or 1, got {a}")));
    }
    Ok(())
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || !x.is_finite() {
        return Err(Error::Parameter(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

fn check_overlap(s: f64) -> Result<()> {
    if !s.is_finite() || !(0.0..1.0).contains(&s) {
        return Err(Error::Parameter(format!("overlap s must lie in [0, 1), got {s}")));
    }
    Ok(())
}

/// Which of the two attack structures produced a joint state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    /// Deterministic entangling-machine attack (pure joint state).
    TypeI,
    /// Probabilistic intercept-and-share attack (mixed joint state).
    TypeII,
}

impl std::fmt::Display for Structure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Structure::TypeI => write!(f, "type1"),
            Structure::TypeII => write!(f, "type2"),
        }
    }
}

/// Corruption model for the entangled resource in the optical layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// Isotropic admixture of the fully mixed two-photon state.
    White,
    /// Populations-only admixture of |hh⟩ and |vv⟩.
    Colored,
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoiseKind::White => write!(f, "white"),
            NoiseKind::Colored => write!(f, "colored"),
        }
    }
}

/// Free parameters of the analytic model.
///
/// Constructed only through validating constructors, so every instance
/// satisfies the prior normalization and both measurement feasibility
/// surfaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioParams {
    q0: f64,
    q1: f64,
    s: f64,
    eta_ab: f64,
    alpha0: f64,
    alpha1: f64,
    u0: f64,
    u1: f64,
}

impl ScenarioParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        q0: f64,
        q1: f64,
        s: f64,
        eta_ab: f64,
        alpha0: f64,
        alpha1: f64,
        u0: f64,
        u1: f64,
    ) -> Result<Self> {
        check_unit("q0", q0)?;
        check_unit("q1", q1)?;
        if (q0 + q1 - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "priors must satisfy q0 + q1 = 1, got {q0} + {q1}"
            )));
        }
        check_overlap(s)?;
        check_unit("eta_ab", eta_ab)?;
        check_unit("alpha0", alpha0)?;
        check_unit("alpha1", alpha1)?;
        check_unit("u0", u0)?;
        check_unit("u1", u1)?;
        let s2 = s * s;
        if (1.0 - alpha0) * (1.0 - alpha1) < s2 - FEASIBILITY_SLACK {
            return Err(Error::Constraint(format!(
                "receiver weights infeasible: (1-{alpha0})(1-{alpha1}) < s^2 = {s2}"
            )));
        }
        if (1.0 - u0) * (1.0 - u1) < s2 - FEASIBILITY_SLACK {
            return Err(Error::Constraint(format!(
                "eavesdropper weights infeasible: (1-{u0})(1-{u1}) < s^2 = {s2}"
            )));
        }
        Ok(Self {
            q0,
            q1,
            s,
            eta_ab,
            alpha0,
            alpha1,
            u0,
            u1,
        })
    }

    /// Equal priors with the symmetric optimal weights α = u = 1 − s.
    pub fn symmetric(s: f64, eta_ab: f64) -> Result<Self> {
        check_overlap(s)?;
        let w = 1.0 - s;
        Self::new(0.5, 0.5, s, eta_ab, w, w, w, w)
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn eta_ab(&self) -> f64 {
        self.eta_ab
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn u1(&self) -> f64 {
        self.u1
    }

    pub fn prior(&self, a: usize) -> f64 {
        if a == 0 {
            self.q0
        } else {
            self.q1
        }
    }

    pub fn alpha(&self, b: usize) -> f64 {
        if b == 0 {
            self.alpha0
        } else {
            self.alpha1
        }
    }

    pub fn u(&self, e: usize) -> f64 {
        if e == 0 {
            self.u0
        } else {
            self.u1
        }
    }

    pub fn has_equal_priors(&self) -> bool {
        (self.q0 - self.q1).abs() <= 1e-12
    }

    /// Draws a uniformly random feasible parameter set (used by the
    /// self-check suite and property sweeps).
    pub fn sample_feasible<R: Rng>(rng: &mut R) -> Self {
        let q0: f64 = rng.gen_range(0.05..0.95);
        let s: f64 = rng.gen_range(0.0..0.9);
        let eta_ab: f64 = rng.gen_range(0.0..1.0);
        let s2 = s * s;
        let alpha0: f64 = rng.gen_range(0.0..(1.0 - s2));
        let alpha1_max = 1.0 - s2 / (1.0 - alpha0);
        let alpha1: f64 = rng.gen_range(0.0..alpha1_max);
        let u0: f64 = rng.gen_range(0.0..(1.0 - s2));
        let u1_max = 1.0 - s2 / (1.0 - u0);
        let u1: f64 = rng.gen_range(0.0..u1_max);
        Self::new(q0, 1.0 - q0, s, eta_ab, alpha0, alpha1, u0, u1)
            .expect("sampled inside the feasible region")
    }
}

/// Signal state √((1+s)/2)|1⟩ + (−1)^a √((1−s)/2)|2⟩.
pub fn alice_state(s: f64, a: usize) -> Result<PureState> {
    check_overlap(s)?;
    check_bit("a", a)?;
    let sign = if a == 0 { 1.0 } else { -1.0 };
    let amps = ComplexVector::from_real(&[
        ((1.0 + s) / 2.0).sqrt(),
        sign * ((1.0 - s) / 2.0).sqrt(),
    ]);
    PureState::new(amps, bob_label())
}

/// Depolarized signal η|ψ_a⟩⟨ψ_a| + (1 − η) I/2 as seen by the receiver.
pub fn depolarized_state(s: f64, eta_ab: f64, a: usize) -> Result<DensityOperator> {
    check_unit("eta_ab", eta_ab)?;
    let psi = alice_state(s, a)?;
    let mixed = DensityOperator::new(ComplexMatrix::identity(2).scale_re(0.5), bob_label())?;
    psi.to_density().scale(eta_ab).add(&mixed.scale(1.0 - eta_ab))
}

/// Maximally entangled state (|11⟩ + |22⟩)/√2 on Bob ⊗ Eve, with Eve's
/// components living on her qubit span {|1⟩,|2⟩}.
pub fn maximally_entangled() -> PureState {
    let mut amps = ComplexVector::zeros(6);
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps.set(1, w); // |1⟩_B |1⟩_E
    amps.set(5, w); // |2⟩_B |2⟩_E
    PureState::new(amps, joint_label()).expect("dimensions match")
}

/// Pure joint state of the deterministic (type-I) attack:
/// √η |ψ_a⟩⊗|0⟩ + √((1−η)/2)(|11⟩ + |22⟩).
pub fn type1_joint_state(s: f64, eta_ab: f64, a: usize) -> Result<PureState> {
    check_unit("eta_ab", eta_ab)?;
    let psi = alice_state(s, a)?;
    let mut amps = ComplexVector::zeros(6);
    let direct = eta_ab.sqrt();
    for b in 0..2 {
        amps.set(b * 3, psi.amplitudes().get(b) * direct);
    }
    let shared = Complex64::new(((1.0 - eta_ab) / 2.0).sqrt(), 0.0);
    amps.set(1, amps.get(1) + shared);
    amps.set(5, amps.get(5) + shared);
    PureState::new(amps, joint_label())
}

/// Mixed joint state of the probabilistic (type-II) attack:
/// η |ψ_a⟩⟨ψ_a| ⊗ |0⟩⟨0| + (1−η)|φ₊⟩⟨φ₊|.
pub fn type2_joint_state(s: f64, eta_ab: f64, a: usize) -> Result<DensityOperator> {
    check_unit("eta_ab", eta_ab)?;
    let psi = alice_state(s, a)?;
    let flag = PureState::new(ComplexVector::basis(3, 0), eve_label())?;
    let direct = psi.tensor(&flag)?.to_density().scale(eta_ab);
    let shared = maximally_entangled().to_density().scale(1.0 - eta_ab);
    direct.add(&shared)
}

/// Unnormalized dual vector |α_b⟩ with ⟨ψ_a|α_b⟩ = δ_ab (2-dim, Bob basis).
pub fn bob_dual_vector(s: f64, b: usize) -> Result<ComplexVector> {
    check_overlap(s)?;
    check_bit("b", b)?;
    let sign = if b == 0 { 1.0 } else { -1.0 };
    Ok(ComplexVector::from_real(&[
        1.0 / (2.0 * (1.0 + s)).sqrt(),
        sign / (2.0 * (1.0 - s)).sqrt(),
    ]))
}

/// Unit state √(1−s²)|α_b⟩ that labels Bob's conclusive outcome on Eve's
/// side, embedded in her qutrit with zero flag component.
pub fn eve_signature_state(s: f64, b: usize) -> Result<PureState> {
    check_overlap(s)?;
    check_bit("b", b)?;
    let sign = if b == 0 { 1.0 } else { -1.0 };
    let amps = ComplexVector::from_real(&[
        0.0,
        ((1.0 - s) / 2.0).sqrt(),
        sign * ((1.0 + s) / 2.0).sqrt(),
    ]);
    PureState::new(amps, eve_label())
}

/// Unnormalized dual vector |u_e⟩ with ⟨ψ̃_b|u_e⟩ = δ_be, orthogonal to the
/// flag |0⟩ (3-dim, Eve basis).
pub fn eve_dual_vector(s: f64, e: usize) -> Result<ComplexVector> {
    check_overlap(s)?;
    check_bit("e", e)?;
    let sign = if e == 0 { 1.0 } else { -1.0 };
    Ok(ComplexVector::from_real(&[
        0.0,
        1.0 / (2.0 * (1.0 - s)).sqrt(),
        sign / (2.0 * (1.0 + s)).sqrt(),
    ]))
}

/// Bob's three-outcome Kraus set {K₀, K₁, K_?}.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub k0: ComplexMatrix,
    pub k1: ComplexMatrix,
    pub k_inconclusive: ComplexMatrix,
}

impl KrausSet {
    pub fn conclusive(&self, b: usize) -> &ComplexMatrix {
        if b == 0 {
            &self.k0
        } else {
            &self.k1
        }
    }

    /// POVM elements M_b = K_b† K_b in outcome order (0, 1, ?).
    pub fn povm_elements(&self) -> [ComplexMatrix; 3] {
        [
            self.k0.adjoint().matmul(&self.k0),
            self.k1.adjoint().matmul(&self.k1),
            self.k_inconclusive.adjoint().matmul(&self.k_inconclusive),
        ]
    }

    /// Max-abs deviation of Σ_b K_b†K_b from the identity.
    pub fn completeness_residual(&self) -> f64 {
        let [m0, m1, mq] = self.povm_elements();
        m0.add(&m1).add(&mq).max_abs_diff(&ComplexMatrix::identity(2))
    }
}

/// Builds Bob's Kraus set K_b = √α_b |φ_b⟩⟨α_b| with explicit post-measurement
/// states `phi0`, `phi1` (unit vectors on his qubit).
///
/// All probabilities downstream are invariant to the choice of outputs, but
/// Σ_b K_b†K_b = 𝟙 only holds when ⟨φ₀|φ₁⟩·√((1−α₀)(1−α₁)) = s; use
/// [`bob_kraus`] for the completing choice.
pub fn bob_kraus_with_outputs(
    s: f64,
    alpha0: f64,
    alpha1: f64,
    phi0: &ComplexVector,
    phi1: &ComplexVector,
) -> Result<KrausSet> {
    check_overlap(s)?;
    check_unit("alpha0", alpha0)?;
    check_unit("alpha1", alpha1)?;
    if (1.0 - alpha0) * (1.0 - alpha1) < s * s - FEASIBILITY_SLACK {
        return Err(Error::Constraint(format!(
            "receiver weights infeasible: (1-{alpha0})(1-{alpha1}) < s^2"
        )));
    }
    let a0 = bob_dual_vector(s, 0)?;
    let a1 = bob_dual_vector(s, 1)?;
    let k0 = phi0.outer(&a0).scale_re(alpha0.sqrt());
    let k1 = phi1.outer(&a1).scale_re(alpha1.sqrt());
    let k_inconclusive = phi0
        .outer(&a0)
        .scale_re((1.0 - alpha0).sqrt())
        .add(&phi1.outer(&a1).scale_re((1.0 - alpha1).sqrt()));
    Ok(KrausSet {
        k0,
        k1,
        k_inconclusive,
    })
}

/// Bob's Kraus set with the symmetric post-measurement pair that makes the
/// set complete (Σ_b K_b†K_b = 𝟙 to machine precision).
pub fn bob_kraus(s: f64, alpha0: f64, alpha1: f64) -> Result<KrausSet> {
    // Completeness pins ⟨φ₀|φ₁⟩ = s/√((1−α₀)(1−α₁)); feasibility keeps it ≤ 1.
    let slack = (1.0 - alpha0) * (1.0 - alpha1);
    let overlap = if s == 0.0 || slack <= 0.0 {
        0.0
    } else {
        (s / slack.sqrt()).min(1.0)
    };
    let theta = 0.5 * overlap.acos();
    let phi0 = ComplexVector::from_real(&[theta.cos(), theta.sin()]);
    let phi1 = ComplexVector::from_real(&[theta.cos(), -theta.sin()]);
    bob_kraus_with_outputs(s, alpha0, alpha1, &phi0, &phi1)
}

/// Optimal unambiguous-discrimination weights for the receiver:
/// α₀ = 1 − √(q₁/q₀)·s, α₁ = 1 − √(q₀/q₁)·s.
///
/// Errors outside the validity window s < min(√(q₀/q₁), √(q₁/q₀)); the
/// optimization layer handles that branch explicitly rather than clamping
/// here.
pub fn optimal_bob_alphas(q0: f64, q1: f64, s: f64) -> Result<(f64, f64)> {
    check_unit("q0", q0)?;
    check_unit("q1", q1)?;
    check_overlap(s)?;
    if (q0 + q1 - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(format!(
            "priors must satisfy q0 + q1 = 1, got {q0} + {q1}"
        )));
    }
    if q0 == 0.0 || q1 == 0.0 {
        return Err(Error::Parameter("priors must both be positive".into()));
    }
    let ratio = (q1 / q0).sqrt();
    if s >= 1.0 / ratio || s >= ratio {
        return Err(Error::Constraint(format!(
            "s = {s} is outside the optimal-weight validity window s < min(√(q0/q1), √(q1/q0)); \
             handle the measure-one-state branch at the optimization layer"
        )));
    }
    Ok((1.0 - ratio * s, 1.0 - s / ratio))
}

/// Eve's three-outcome POVM on her qutrit.
#[derive(Debug, Clone)]
pub struct Povm {
    pub m0: ComplexMatrix,
    pub m1: ComplexMatrix,
    pub m_inconclusive: ComplexMatrix,
}

impl Povm {
    pub fn element(&self, e: usize) -> &ComplexMatrix {
        match e {
            0 => &self.m0,
            1 => &self.m1,
            _ => &self.m_inconclusive,
        }
    }

    pub fn completeness_residual(&self) -> f64 {
        self.m0
            .add(&self.m1)
            .add(&self.m_inconclusive)
            .max_abs_diff(&ComplexMatrix::identity(3))
    }
}

/// Eve's POVM {M₀, M₁, M_?} with M_e = u_e |u_e⟩⟨u_e| on the span {|1⟩,|2⟩}
/// and M_? completing to the identity.
pub fn eve_povm(s: f64, u0: f64, u1: f64) -> Result<Povm> {
    check_overlap(s)?;
    check_unit("u0", u0)?;
    check_unit("u1", u1)?;
    if (1.0 - u0) * (1.0 - u1) < s * s - FEASIBILITY_SLACK {
        return Err(Error::Constraint(format!(
            "eavesdropper weights infeasible: (1-{u0})(1-{u1}) < s^2"
        )));
    }
    let v0 = eve_dual_vector(s, 0)?;
    let v1 = eve_dual_vector(s, 1)?;
    let m0 = v0.outer(&v0).scale_re(u0);
    let m1 = v1.outer(&v1).scale_re(u1);
    let m_inconclusive = ComplexMatrix::identity(3).sub(&m0).sub(&m1);
    if !m_inconclusive.is_psd(TOL_PSD) {
        return Err(Error::Constraint(
            "inconclusive POVM element is not positive semidefinite".into(),
        ));
    }
    Ok(Povm {
        m0,
        m1,
        m_inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{partial_trace, TOL_ALGEBRAIC};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alice_state_degenerate_limit() {
        let psi = alice_state(0.999999, 0).unwrap();
        assert!((psi.amplitudes().get(0).re - 1.0).abs() < 1e-6);
        assert!(psi.amplitudes().get(1).norm() < 1e-3);
    }

    #[test]
    fn alice_states_orthogonal_at_zero_overlap() {
        let p0 = alice_state(0.0, 0).unwrap();
        let p1 = alice_state(0.0, 1).unwrap();
        assert!(p0.inner(&p1).norm() < TOL_ALGEBRAIC);
    }

    #[test]
    fn alice_overlap_matches_parameter() {
        for &s in &[0.1, 0.5, 0.9] {
            let p0 = alice_state(s, 0).unwrap();
            let p1 = alice_state(s, 1).unwrap();
            assert!((p0.inner(&p1).re - s).abs() < TOL_ALGEBRAIC);
            assert!((p0.norm() - 1.0).abs() < TOL_ALGEBRAIC);
        }
    }

    #[test]
    fn alice_state_rejects_bad_overlap() {
        assert!(alice_state(1.0, 0).is_err());
        assert!(alice_state(-0.1, 0).is_err());
    }

    #[test]
    fn depolarized_limits() {
        let pure = depolarized_state(0.3, 1.0, 0).unwrap();
        let psi = alice_state(0.3, 0).unwrap();
        assert!(pure.matrix().approx_eq(psi.to_density().matrix(), TOL_ALGEBRAIC));
        let mixed = depolarized_state(0.3, 0.0, 1).unwrap();
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(mixed.matrix().approx_eq(&half, TOL_ALGEBRAIC));
    }

    #[test]
    fn channel_marginal_matches_purification() {
        // Both routes to Bob's marginal at s = 0.3, η = 0.5 agree entrywise.
        let gamma = type1_joint_state(0.3, 0.5, 0).unwrap();
        let marginal =
            partial_trace(gamma.to_density().matrix(), gamma.label(), &["B"]).unwrap();
        let direct = depolarized_state(0.3, 0.5, 0).unwrap();
        assert!(marginal.approx_eq(direct.matrix(), TOL_ALGEBRAIC));
    }

    #[test]
    fn type1_state_limits_and_norm() {
        let product = type1_joint_state(0.4, 1.0, 0).unwrap();
        let expected = alice_state(0.4, 0)
            .unwrap()
            .tensor(&PureState::new(ComplexVector::basis(3, 0), eve_label()).unwrap())
            .unwrap();
        assert!((product.inner(&expected).norm() - 1.0).abs() < TOL_ALGEBRAIC);
        let entangled = type1_joint_state(0.4, 0.0, 0).unwrap();
        assert!((entangled.inner(&maximally_entangled()).norm() - 1.0).abs() < TOL_ALGEBRAIC);
        let generic = type1_joint_state(0.4, 0.7, 1).unwrap();
        assert!((generic.norm() - 1.0).abs() < TOL_ALGEBRAIC);
    }

    #[test]
    fn type2_marginal_and_rank() {
        let sigma = type2_joint_state(0.3, 0.5, 0).unwrap();
        assert!((sigma.trace_re() - 1.0).abs() < TOL_ALGEBRAIC);
        let marginal = sigma.partial_trace(&["B"]).unwrap();
        let direct = depolarized_state(0.3, 0.5, 0).unwrap();
        assert!(marginal.matrix().approx_eq(direct.matrix(), TOL_ALGEBRAIC));
        // mixture of two pure states
        let rank = sigma.matrix().hermitian_rank(1e-10).unwrap();
        assert!(rank <= 2, "rank {rank} exceeds 2");
    }

    #[test]
    fn type2_pure_at_full_efficiency() {
        let sigma = type2_joint_state(0.3, 1.0, 1).unwrap();
        let purity = sigma.matrix().matmul(sigma.matrix()).trace().re;
        assert!((purity - 1.0).abs() < TOL_ALGEBRAIC);
    }

    #[test]
    fn kraus_unambiguity_weights() {
        let set = bob_kraus(0.5, 0.5, 0.5).unwrap();
        for a in 0..2 {
            let psi = alice_state(0.5, a).unwrap().to_density();
            for b in 0..2 {
                let m = set.conclusive(b).adjoint().matmul(set.conclusive(b));
                let p = m.matmul(psi.matrix()).trace().re;
                let expected = if a == b { 0.5 } else { 0.0 };
                assert!((p - expected).abs() < TOL_ALGEBRAIC, "a={a} b={b} p={p}");
            }
        }
    }

    #[test]
    fn kraus_zero_weights_complete_unitarily() {
        let set = bob_kraus(0.5, 0.0, 0.0).unwrap();
        assert!(set.k0.max_abs() < TOL_ALGEBRAIC);
        assert!(set.k1.max_abs() < TOL_ALGEBRAIC);
        let u = &set.k_inconclusive;
        let residual = u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(2));
        assert!(residual < TOL_ALGEBRAIC, "residual {residual}");
    }

    #[test]
    fn kraus_completeness_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = ScenarioParams::sample_feasible(&mut rng);
            let set = bob_kraus(p.s(), p.alpha0(), p.alpha1()).unwrap();
            assert!(
                set.completeness_residual() < 1e-10,
                "residual {} at {:?}",
                set.completeness_residual(),
                p
            );
        }
    }

    #[test]
    fn kraus_rejects_infeasible_weights() {
        assert!(bob_kraus(0.8, 0.9, 0.9).is_err());
    }

    #[test]
    fn optimal_alphas_branches() {
        let (a0, a1) = optimal_bob_alphas(0.5, 0.5, 0.3).unwrap();
        assert!((a0 - 0.7).abs() < TOL_ALGEBRAIC);
        assert!((a1 - 0.7).abs() < TOL_ALGEBRAIC);
        let (b0, b1) = optimal_bob_alphas(0.5, 0.5, 0.0).unwrap();
        assert!((b0 - 1.0).abs() < TOL_ALGEBRAIC && (b1 - 1.0).abs() < TOL_ALGEBRAIC);
        let (c0, c1) = optimal_bob_alphas(0.4, 0.6, 0.5).unwrap();
        assert!((c0 - (1.0 - 1.5f64.sqrt() * 0.5)).abs() < TOL_ALGEBRAIC);
        assert!((c1 - (1.0 - (2.0f64 / 3.0).sqrt() * 0.5)).abs() < TOL_ALGEBRAIC);
        assert!(optimal_bob_alphas(0.4, 0.6, 0.9).is_err());
    }

    #[test]
    fn eve_povm_structure() {
        let povm = eve_povm(0.5, 0.0, 0.0).unwrap();
        assert!(povm
            .m_inconclusive
            .approx_eq(&ComplexMatrix::identity(3), TOL_ALGEBRAIC));

        let povm = eve_povm(0.5, 0.5, 0.5).unwrap();
        assert!(povm.completeness_residual() < 1e-10);
        let sig1 = eve_signature_state(0.5, 1).unwrap().to_density();
        let leak = povm.m0.matmul(sig1.matrix()).trace().re;
        assert!(leak.abs() < TOL_ALGEBRAIC, "unambiguity violated: {leak}");
        // supports orthogonal to the flag state
        let flag = ComplexVector::basis(3, 0);
        assert!(povm.m0.mul_vec(&flag).norm() < TOL_ALGEBRAIC);
        assert!(povm.m1.mul_vec(&flag).norm() < TOL_ALGEBRAIC);
    }

    #[test]
    fn eve_povm_boundary_is_psd_with_null_direction() {
        // (1-u0)(1-u1) = s^2 exactly at s = 0.6
        let s = 0.6;
        let u = 1.0 - s;
        let povm = eve_povm(s, u, u).unwrap();
        let min = povm.m_inconclusive.min_eigenvalue().unwrap();
        assert!(min.abs() < 1e-10, "boundary eigenvalue {min}");
    }

    #[test]
    fn eve_povm_rejects_infeasible() {
        assert!(eve_povm(0.6, 0.9, 0.9).is_err());
    }

    #[test]
    fn signature_states_overlap_is_minus_s() {
        for i in 0..10 {
            let s = 0.1 * i as f64;
            let t0 = eve_signature_state(s, 0).unwrap();
            let t1 = eve_signature_state(s, 1).unwrap();
            assert!((t0.inner(&t1).re + s).abs() < TOL_ALGEBRAIC);
        }
    }

    #[test]
    fn dual_vectors_are_dual() {
        let s = 0.37;
        for e in 0..2 {
            let u = eve_dual_vector(s, e).unwrap();
            for b in 0..2 {
                let sig = eve_signature_state(s, b).unwrap();
                let expected = if b == e { 1.0 } else { 0.0 };
                assert!((u.inner(sig.amplitudes()).re - expected).abs() < TOL_ALGEBRAIC);
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(ScenarioParams::new(0.6, 0.5, 0.3, 0.5, 0.5, 0.5, 0.5, 0.5).is_err());
        assert!(ScenarioParams::new(0.5, 0.5, 0.8, 0.5, 0.9, 0.9, 0.1, 0.1).is_err());
        assert!(ScenarioParams::symmetric(0.4, 0.5).is_ok());
    }
}
