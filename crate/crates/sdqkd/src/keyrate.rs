//! Joint outcome distributions for sender, receiver, and eavesdropper, the
//! inconclusive-discard post-processing each party is allowed, and the
//! resulting secret key rate K = max{0, I(B:A) − I(B:E)}.
//!
//! The receiver may discard his inconclusive rounds outright. The
//! eavesdropper is spatially separated, so she can only discard her own
//! inconclusive results; the receiver's stay in her table.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::DensityOperator;
use crate::scenario::{
    bob_kraus, eve_povm, type1_joint_state, type2_joint_state, KrausSet, Povm, ScenarioParams,
    Structure,
};

/// Mass below which a post-selected table is treated as degenerate.
const DEGENERATE_MASS: f64 = 1e-14;

/// One measurement outcome on a ternary conclusive/inconclusive alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "?")]
    Inconclusive,
}

impl Outcome {
    pub fn conclusive(value: usize) -> Self {
        match value {
            0 => Outcome::Zero,
            _ => Outcome::One,
        }
    }

    pub fn is_conclusive(&self) -> bool {
        !matches!(self, Outcome::Inconclusive)
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Zero => write!(f, "0"),
            Outcome::One => write!(f, "1"),
            Outcome::Inconclusive => write!(f, "?"),
        }
    }
}

/// A named axis with its outcome alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    name: String,
    outcomes: Vec<Outcome>,
}

impl Axis {
    /// Conclusive-only axis {0, 1}.
    pub fn bit(name: &str) -> Self {
        Self {
            name: name.to_string(),
            outcomes: vec![Outcome::Zero, Outcome::One],
        }
    }

    /// Three-outcome axis {0, 1, ?}.
    pub fn ternary(name: &str) -> Self {
        Self {
            name: name.to_string(),
            outcomes: vec![Outcome::Zero, Outcome::One, Outcome::Inconclusive],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// Labeled probability table over outcome tuples.
///
/// Entries are non-negative; `normalized` marks a table whose total mass is
/// 1 within tolerance, while conditional or partially contracted tables are
/// carried sub-normalized with the flag unset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    axes: Vec<Axis>,
    table: Vec<f64>,
    normalized: bool,
}

impl JointDistribution {
    pub fn zeros(axes: Vec<Axis>) -> Self {
        let size = axes.iter().map(Axis::len).product();
        Self {
            axes,
            table: vec![0.0; size],
            normalized: false,
        }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn axis_position(&self, name: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.name == name)
    }

    fn flat_index(&self, outcomes: &[Outcome]) -> usize {
        assert_eq!(outcomes.len(), self.axes.len(), "outcome arity mismatch");
        let mut idx = 0;
        for (axis, out) in self.axes.iter().zip(outcomes) {
            let pos = axis
                .outcomes
                .iter()
                .position(|o| o == out)
                .unwrap_or_else(|| panic!("outcome {out} not on axis '{}'", axis.name));
            idx = idx * axis.len() + pos;
        }
        idx
    }

    pub fn get(&self, outcomes: &[Outcome]) -> f64 {
        self.table[self.flat_index(outcomes)]
    }

    pub fn set(&mut self, outcomes: &[Outcome], value: f64) {
        let idx = self.flat_index(outcomes);
        self.table[idx] = value;
    }

    pub fn add_to(&mut self, outcomes: &[Outcome], value: f64) {
        let idx = self.flat_index(outcomes);
        self.table[idx] += value;
    }

    pub fn total_mass(&self) -> f64 {
        self.table.iter().sum()
    }

    /// Iterates over (outcome tuple, probability) pairs in table order.
    pub fn entries(&self) -> Vec<(Vec<Outcome>, f64)> {
        let mut out = Vec::with_capacity(self.table.len());
        let mut multi = vec![0usize; self.axes.len()];
        for &value in &self.table {
            let outcomes: Vec<Outcome> = multi
                .iter()
                .zip(&self.axes)
                .map(|(&i, a)| a.outcomes[i])
                .collect();
            out.push((outcomes, value));
            for slot in (0..multi.len()).rev() {
                multi[slot] += 1;
                if multi[slot] < self.axes[slot].len() {
                    break;
                }
                multi[slot] = 0;
            }
        }
        out
    }

    /// Marginal distribution onto the named axes (in this table's order);
    /// total mass is preserved.
    pub fn marginal(&self, keep: &[&str]) -> Result<Self> {
        for name in keep {
            if self.axis_position(name).is_none() {
                return Err(Error::Label(format!("axis '{name}' not present")));
            }
        }
        let kept_axes: Vec<Axis> = self
            .axes
            .iter()
            .filter(|a| keep.contains(&a.name.as_str()))
            .cloned()
            .collect();
        let mut out = Self::zeros(kept_axes);
        for (outcomes, value) in self.entries() {
            let kept: Vec<Outcome> = outcomes
                .iter()
                .zip(&self.axes)
                .filter(|(_, a)| keep.contains(&a.name.as_str()))
                .map(|(o, _)| *o)
                .collect();
            out.add_to(&kept, value);
        }
        out.normalized = self.normalized;
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.axes.len(), other.axes.len(), "table shape mismatch");
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Checks non-negativity and, if flagged normalized, unit mass.
    pub fn validate(&self) -> Result<()> {
        for (outcomes, value) in self.entries() {
            if value < -1e-12 || !value.is_finite() {
                return Err(Error::Consistency(format!(
                    "negative probability {value} at {outcomes:?}"
                )));
            }
        }
        if self.normalized {
            let mass = self.total_mass();
            if (mass - 1.0).abs() > 1e-12 {
                return Err(Error::Consistency(format!(
                    "normalized table has mass {mass}"
                )));
            }
        }
        Ok(())
    }

    fn into_normalized(mut self) -> Result<Self> {
        self.normalized = true;
        self.validate()?;
        Ok(self)
    }

    /// Shannon entropy of the table in bits, with 0·log 0 := 0.
    pub fn entropy(&self) -> f64 {
        shannon_entropy(self.table.iter().copied())
    }
}

/// Shannon entropy in bits of a probability assignment; 0·log 0 := 0 and
/// non-positive entries contribute nothing.
pub fn shannon_entropy(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Joint sender–receiver distribution P_AB(a, b) with the inconclusive
/// column completing each prior's mass.
pub fn joint_ab(p: &ScenarioParams) -> JointDistribution {
    let s = p.s();
    let coeff = (1.0 - p.eta_ab()) / (2.0 * (1.0 - s * s));
    let mut d = JointDistribution::zeros(vec![Axis::bit("a"), Axis::ternary("b")]);
    for a in 0..2 {
        let mut conclusive = 0.0;
        for b in 0..2 {
            let delta = if a == b { 1.0 } else { 0.0 };
            let value = p.prior(a) * (p.eta_ab() * p.alpha(b) * delta + coeff * p.alpha(b));
            d.set(&[Outcome::conclusive(a), Outcome::conclusive(b)], value);
            conclusive += value;
        }
        d.set(
            &[Outcome::conclusive(a), Outcome::Inconclusive],
            (p.prior(a) - conclusive).max(0.0),
        );
    }
    d.into_normalized().expect("analytic table is normalized")
}

fn eve_branch_state(
    p: &ScenarioParams,
    kraus: &KrausSet,
    structure: Structure,
    a: usize,
    b_slot: usize,
) -> Result<DensityOperator> {
    let op = match b_slot {
        0 => &kraus.k0,
        1 => &kraus.k1,
        _ => &kraus.k_inconclusive,
    };
    match structure {
        Structure::TypeI => {
            let gamma = type1_joint_state(p.s(), p.eta_ab(), a)?;
            let branch = gamma.apply_on(op, &["B"])?;
            branch.to_density().partial_trace(&["E"])
        }
        Structure::TypeII => {
            let sigma = type2_joint_state(p.s(), p.eta_ab(), a)?;
            let after = sigma.conjugate_on(op, &["B"])?;
            after.partial_trace(&["E"])
        }
    }
}

pub(crate) fn joint_abe_with(
    p: &ScenarioParams,
    structure: Structure,
    kraus: &KrausSet,
    povm: &Povm,
) -> Result<JointDistribution> {
    let axes = vec![Axis::bit("a"), Axis::ternary("b"), Axis::ternary("e")];
    let mut d = JointDistribution::zeros(axes);
    let b_outcomes = [Outcome::Zero, Outcome::One, Outcome::Inconclusive];
    let e_outcomes = b_outcomes;
    for a in 0..2 {
        for (b_slot, b_out) in b_outcomes.iter().enumerate() {
            // Sub-normalized Eve state whose trace is P(b|a).
            let eve = eve_branch_state(p, kraus, structure, a, b_slot)?;
            for (e_slot, e_out) in e_outcomes.iter().enumerate() {
                let prob = eve.expectation(povm.element(e_slot), &["E"])?;
                d.set(
                    &[Outcome::conclusive(a), *b_out, *e_out],
                    p.prior(a) * prob.max(0.0),
                );
            }
        }
    }
    d.into_normalized()
}

/// Full three-party distribution P_ABE(a, b, e), built by explicit state
/// evolution in the requested attack structure. Both structures produce
/// identical tables.
pub fn joint_abe(p: &ScenarioParams, structure: Structure) -> Result<JointDistribution> {
    let kraus = bob_kraus(p.s(), p.alpha0(), p.alpha1())?;
    let povm = eve_povm(p.s(), p.u0(), p.u1())?;
    joint_abe_with(p, structure, &kraus, &povm)
}

/// Receiver–eavesdropper distribution P_BE(b, e), the sender marginal of
/// [`joint_abe`].
pub fn joint_be(p: &ScenarioParams) -> Result<JointDistribution> {
    joint_abe(p, Structure::TypeI)?.marginal(&["b", "e"])
}

/// Receiver post-processing: drop his inconclusive outcomes and renormalize
/// over the conclusive (a, b) block.
pub fn postprocess_ab(d: &JointDistribution) -> Result<JointDistribution> {
    let b_pos = d
        .axis_position("b")
        .ok_or_else(|| Error::Label("expected an axis named 'b'".into()))?;
    let retained: f64 = d
        .entries()
        .iter()
        .filter(|(o, _)| o[b_pos].is_conclusive())
        .map(|(_, v)| *v)
        .sum();
    if retained <= DEGENERATE_MASS {
        return Err(Error::Degenerate(
            "no conclusive receiver outcomes to keep".into(),
        ));
    }
    let mut out = JointDistribution::zeros(vec![Axis::bit("a"), Axis::bit("b")]);
    for (o, v) in d.entries() {
        if o[b_pos].is_conclusive() {
            out.set(&o, v / retained);
        }
    }
    out.into_normalized()
}

/// Eavesdropper post-processing: she discards only her own inconclusive
/// outcomes; the receiver's stay. Renormalizes over b ∈ {0,1,?}, e ∈ {0,1}.
pub fn postprocess_be(d: &JointDistribution) -> Result<JointDistribution> {
    let e_pos = d
        .axis_position("e")
        .ok_or_else(|| Error::Label("expected an axis named 'e'".into()))?;
    let retained: f64 = d
        .entries()
        .iter()
        .filter(|(o, _)| o[e_pos].is_conclusive())
        .map(|(_, v)| *v)
        .sum();
    if retained <= DEGENERATE_MASS {
        return Err(Error::Degenerate(
            "no conclusive eavesdropper outcomes to keep".into(),
        ));
    }
    let mut out = JointDistribution::zeros(vec![Axis::ternary("b"), Axis::bit("e")]);
    for (o, v) in d.entries() {
        if o[e_pos].is_conclusive() {
            out.set(&o, v / retained);
        }
    }
    out.into_normalized()
}

/// Which sender entropy enters the key rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KeyRateConvention {
    /// H(A) from the raw priors, all other terms from post-processed tables
    /// (the term-by-term construction used for the reference curves).
    RawPriors,
    /// H(A) from the post-selected sender marginal, for comparison.
    PostSelectedPriors,
}

/// Secret key rate from explicit joint tables.
///
/// `ab` must span (a, b ∈ {0,1,?}) and `be` must span (b, e ∈ {0,1,?}).
/// When the eavesdropper has no conclusive mass at all her information is
/// structurally zero and the rate reduces to the post-selected mutual
/// information between sender and receiver.
pub fn secret_key_rate_from_joints(
    q0: f64,
    q1: f64,
    ab: &JointDistribution,
    be: &JointDistribution,
    convention: KeyRateConvention,
) -> Result<f64> {
    let ab_post = postprocess_ab(ab)?;
    let h_ba = ab_post.entropy();
    let h_a = match convention {
        KeyRateConvention::RawPriors => shannon_entropy([q0, q1]),
        KeyRateConvention::PostSelectedPriors => ab_post.marginal(&["a"])?.entropy(),
    };
    let e_pos = be
        .axis_position("e")
        .ok_or_else(|| Error::Label("expected an axis named 'e'".into()))?;
    let eve_mass: f64 = be
        .entries()
        .iter()
        .filter(|(o, _)| o[e_pos].is_conclusive())
        .map(|(_, v)| *v)
        .sum();
    if eve_mass <= DEGENERATE_MASS {
        let h_b = ab_post.marginal(&["b"])?.entropy();
        return Ok((h_a + h_b - h_ba).max(0.0));
    }
    let be_post = postprocess_be(be)?;
    let h_be = be_post.entropy();
    let h_e = be_post.marginal(&["e"])?.entropy();
    Ok((h_a - h_ba - h_e + h_be).max(0.0))
}

/// Secret key rate of the analytic model at the given parameters.
pub fn secret_key_rate(p: &ScenarioParams) -> Result<f64> {
    secret_key_rate_with(p, KeyRateConvention::RawPriors)
}

/// Secret key rate with the (b, e) table built through the requested attack
/// structure; both give the same value.
pub fn secret_key_rate_via(p: &ScenarioParams, structure: Structure) -> Result<f64> {
    let ab = joint_ab(p);
    let be = joint_abe(p, structure)?.marginal(&["b", "e"])?;
    secret_key_rate_from_joints(p.q0(), p.q1(), &ab, &be, KeyRateConvention::RawPriors)
}

pub fn secret_key_rate_with(p: &ScenarioParams, convention: KeyRateConvention) -> Result<f64> {
    let ab = joint_ab(p);
    let be = joint_be(p)?;
    secret_key_rate_from_joints(p.q0(), p.q1(), &ab, &be, convention)
}

/// Success probability of eavesdropping read off a (b, e) table:
/// Σ_b P_BE(b, e = b) over conclusive b.
pub fn success_prob_from_joint(d: &JointDistribution) -> f64 {
    d.get(&[Outcome::Zero, Outcome::Zero]) + d.get(&[Outcome::One, Outcome::One])
}
