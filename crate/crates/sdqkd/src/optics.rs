//! Imperfect linear-optics implementation of the protocol: photon loss,
//! noisy entangled resource, Sagnac-like interferometers, half-wave plates,
//! polarizing beam splitters, and inefficient on/off detectors.
//!
//! Each party's leg is a three-level polarization-or-vacuum system
//! {vac, h, v}; the analytic flag state |0⟩ of the eavesdropper corresponds
//! to vacuum on her leg (no photon was shared). The interferometers realize
//! the symmetric optimal unambiguous discrimination, so their reflectivities
//! depend only on the overlap s. Detector ports are photon-number spaces
//! truncated at one photon, which is exact here because sources emit single
//! photons and dark counts are out of scope.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::keyrate::{
    secret_key_rate_from_joints, success_prob_from_joint, Axis, JointDistribution,
    KeyRateConvention, Outcome,
};
use crate::qmath::{
    ComplexMatrix, ComplexVector, DensityOperator, HilbertLabel, PureState, Subsystem,
};
use crate::scenario::{alice_state, NoiseKind, ScenarioParams};

/// Labeled density operator of the optical pipeline; conditional branches
/// are carried sub-normalized.
pub type OpticalState = DensityOperator;

/// Imperfection parameters of the optical bench.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseParams {
    eta_ent: f64,
    kind: NoiseKind,
    d0: f64,
    de: f64,
    eta_det: f64,
    nu: f64,
}

impl NoiseParams {
    pub fn new(
        eta_ent: f64,
        kind: NoiseKind,
        d0: f64,
        de: f64,
        eta_det: f64,
        nu: f64,
    ) -> Result<Self> {
        for (name, value) in [
            ("eta_ent", eta_ent),
            ("d0", d0),
            ("de", de),
            ("eta_det", eta_det),
        ] {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(Error::Parameter(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        if nu != 0.0 {
            return Err(Error::Parameter(format!(
                "dark counts are out of scope; nu must be 0, got {nu}"
            )));
        }
        Ok(Self {
            eta_ent,
            kind,
            d0,
            de,
            eta_det,
            nu,
        })
    }

    /// Noise-free bench: perfect resource, no damping, unit-efficiency
    /// detectors.
    pub fn ideal() -> Self {
        Self {
            eta_ent: 1.0,
            kind: NoiseKind::White,
            d0: 0.0,
            de: 0.0,
            eta_det: 1.0,
            nu: 0.0,
        }
    }

    pub fn eta_ent(&self) -> f64 {
        self.eta_ent
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn de(&self) -> f64 {
        self.de
    }

    pub fn eta_det(&self) -> f64 {
        self.eta_det
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

const VAC: usize = 0;
const H: usize = 1;
const V: usize = 2;

fn leg(tag: &str) -> HilbertLabel {
    HilbertLabel::single(tag, &["vac", "h", "v"])
}

fn path_subsystem(tag: &str) -> Subsystem {
    Subsystem::new(tag, &["p0", "p1"])
}

fn port_subsystem(tag: &str) -> Subsystem {
    Subsystem::new(tag, &["0", "1"])
}

/// Photon-loss Kraus operators on one {vac, h, v} leg with rate `d`.
pub fn amplitude_damping_kraus(d: f64) -> Vec<ComplexMatrix> {
    let keep = (1.0 - d).sqrt();
    let lose = d.sqrt();
    let mut a0 = ComplexMatrix::zeros(3, 3);
    a0.set(VAC, VAC, 1.0.into());
    a0.set(H, H, keep.into());
    a0.set(V, V, keep.into());
    let mut ah = ComplexMatrix::zeros(3, 3);
    ah.set(VAC, H, lose.into());
    let mut av = ComplexMatrix::zeros(3, 3);
    av.set(VAC, V, lose.into());
    vec![a0, ah, av]
}

/// Applies photon loss with rate `d` to the given leg: with probability `d`
/// the single photon disappears into vacuum. Trace preserving; `d = 0` is
/// the identity.
pub fn amplitude_damping(state: &OpticalState, d: f64, leg_tag: &str) -> Result<OpticalState> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Parameter(format!("damping rate must lie in [0, 1], got {d}")));
    }
    let pos = state
        .label()
        .position(leg_tag)
        .ok_or_else(|| Error::Label(format!("tag '{leg_tag}' not present")))?;
    if state.label().subsystems()[pos].dim() != 3 {
        return Err(Error::Label(format!(
            "amplitude damping acts on a 3-level leg, but '{leg_tag}' is not one"
        )));
    }
    state.apply_channel_on(&amplitude_damping_kraus(d), leg_tag)
}

/// Noisy two-photon entangled resource on {h, v} ⊗ {h, v}.
///
/// White noise mixes in the fully mixed state; colored noise mixes in the
/// |hh⟩/|vv⟩ populations only, preserving the correlations.
pub fn entangled_resource(eta_ent: f64, kind: NoiseKind) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&eta_ent) {
        return Err(Error::Parameter(format!(
            "eta_ent must lie in [0, 1], got {eta_ent}"
        )));
    }
    let label = HilbertLabel::single("Bpol", &["h", "v"])
        .tensor(&HilbertLabel::single("Epol", &["h", "v"]))?;
    let phi = {
        let mut amps = ComplexVector::zeros(4);
        amps.set(0, std::f64::consts::FRAC_1_SQRT_2.into()); // |hh⟩
        amps.set(3, std::f64::consts::FRAC_1_SQRT_2.into()); // |vv⟩
        PureState::new(amps, label.clone())?
    };
    let noise = match kind {
        NoiseKind::White => ComplexMatrix::identity(4).scale_re(0.25),
        NoiseKind::Colored => {
            let mut m = ComplexMatrix::zeros(4, 4);
            m.set(0, 0, 0.5.into());
            m.set(3, 3, 0.5.into());
            m
        }
    };
    let noise = DensityOperator::new(noise, label)?;
    phi.to_density()
        .scale(eta_ent)
        .add(&noise.scale(1.0 - eta_ent))
}

/// Completes a partially specified unitary by Gram–Schmidt over the
/// remaining basis vectors in index order. `assigned` lists (input index,
/// column) pairs; the rest are filled deterministically.
fn complete_unitary(dim: usize, assigned: &[(usize, ComplexVector)]) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(dim, dim);
    let mut columns: Vec<Option<ComplexVector>> = vec![None; dim];
    for (idx, col) in assigned {
        columns[*idx] = Some(col.clone());
    }
    for j in 0..dim {
        if columns[j].is_some() {
            continue;
        }
        let mut chosen = None;
        for k in 0..dim {
            let mut v = ComplexVector::basis(dim, k);
            for col in columns.iter().flatten() {
                let overlap = col.inner(&v);
                v = v.add(&col.scale(-overlap));
            }
            let norm = v.norm();
            if norm > 1e-9 {
                chosen = Some(v.scale((1.0 / norm).into()));
                break;
            }
        }
        columns[j] = Some(chosen.expect("orthogonal complement is non-empty"));
    }
    for (j, col) in columns.iter().enumerate() {
        let col = col.as_ref().expect("all columns assigned");
        for i in 0..dim {
            u.set(i, j, col.get(i));
        }
    }
    u
}

fn pol_path_index(pol: usize, path: usize) -> usize {
    pol * 2 + path
}

/// The receiver's Sagnac-like interferometer on polarization ⊗ path:
/// |h⟩⊗|p₀⟩ → √((1−s)/(1+s))|h⟩⊗|p₀⟩ + √(2s/(1+s))|v⟩⊗|p₁⟩, |v⟩⊗|p₀⟩ fixed,
/// vacuum fixed, completed to a full unitary.
pub fn sagnac_bob(s: f64) -> Result<ComplexMatrix> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Parameter(format!("overlap s must lie in [0, 1), got {s}")));
    }
    let stay = ((1.0 - s) / (1.0 + s)).sqrt();
    let hop = (2.0 * s / (1.0 + s)).sqrt();
    let mut h_col = ComplexVector::zeros(6);
    h_col.set(pol_path_index(H, 0), stay.into());
    h_col.set(pol_path_index(V, 1), hop.into());
    let assigned = vec![
        (pol_path_index(VAC, 0), ComplexVector::basis(6, pol_path_index(VAC, 0))),
        (pol_path_index(VAC, 1), ComplexVector::basis(6, pol_path_index(VAC, 1))),
        (pol_path_index(H, 0), h_col),
        (pol_path_index(V, 0), ComplexVector::basis(6, pol_path_index(V, 0))),
    ];
    Ok(complete_unitary(6, &assigned))
}

/// The eavesdropper's Sagnac-like interferometer: |h⟩⊗|p₀⟩ fixed and
/// |v⟩⊗|p₀⟩ → √(2s/(1+s))|h⟩⊗|p₁⟩ + √((1−s)/(1+s))|v⟩⊗|p₀⟩.
pub fn sagnac_eve(s: f64) -> Result<ComplexMatrix> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Parameter(format!("overlap s must lie in [0, 1), got {s}")));
    }
    let stay = ((1.0 - s) / (1.0 + s)).sqrt();
    let hop = (2.0 * s / (1.0 + s)).sqrt();
    let mut v_col = ComplexVector::zeros(6);
    v_col.set(pol_path_index(H, 1), hop.into());
    v_col.set(pol_path_index(V, 0), stay.into());
    let assigned = vec![
        (pol_path_index(VAC, 0), ComplexVector::basis(6, pol_path_index(VAC, 0))),
        (pol_path_index(VAC, 1), ComplexVector::basis(6, pol_path_index(VAC, 1))),
        (pol_path_index(H, 0), ComplexVector::basis(6, pol_path_index(H, 0))),
        (pol_path_index(V, 0), v_col),
    ];
    Ok(complete_unitary(6, &assigned))
}

/// Half-wave plate at angle γ on one leg: |h⟩ → cos2γ|h⟩ + sin2γ|v⟩,
/// |v⟩ → sin2γ|h⟩ − cos2γ|v⟩, vacuum fixed. γ = π/8 gives the Hadamard.
pub fn hwp(gamma: f64) -> ComplexMatrix {
    let c = (2.0 * gamma).cos();
    let s = (2.0 * gamma).sin();
    let mut m = ComplexMatrix::zeros(3, 3);
    m.set(VAC, VAC, 1.0.into());
    m.set(H, H, c.into());
    m.set(V, H, s.into());
    m.set(H, V, s.into());
    m.set(V, V, (-c).into());
    m
}

/// Polarizing beam splitter isometry {vac, h, v} → two photon-number ports:
/// |h⟩ → |1,0⟩, |v⟩ → −|0,1⟩, |vac⟩ → |0,0⟩.
pub fn pbs() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 3);
    m.set(0, VAC, 1.0.into()); // |0,0⟩
    m.set(2, H, 1.0.into()); // |1,0⟩
    m.set(1, V, (-1.0).into()); // −|0,1⟩
    m
}

/// On/off detector POVM {Π_off, Π_on} on a one-photon-truncated port.
pub fn onoff_detector(eta_det: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !(0.0..=1.0).contains(&eta_det) {
        return Err(Error::Parameter(format!(
            "eta_det must lie in [0, 1], got {eta_det}"
        )));
    }
    let off = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0 - eta_det]]);
    let on = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, eta_det]]);
    Ok((off, on))
}

fn embed_pol_pair_to_legs(rho4: &ComplexMatrix) -> ComplexMatrix {
    // {h,v}⊗{h,v} → {vac,h,v}⊗{vac,h,v}: shift each factor's index by one.
    let mut out = ComplexMatrix::zeros(9, 9);
    for rb in 0..2 {
        for re in 0..2 {
            for cb in 0..2 {
                for ce in 0..2 {
                    out.set(
                        (rb + 1) * 3 + (re + 1),
                        (cb + 1) * 3 + (ce + 1),
                        rho4.get(rb * 2 + re, cb * 2 + ce),
                    );
                }
            }
        }
    }
    out
}

/// The ensemble shared by receiver and eavesdropper before any measurement:
/// with probability η_AB the (damped) signal reaches the receiver and the
/// eavesdropper holds vacuum; otherwise both hold one leg of the (damped)
/// noisy entangled resource.
pub fn shared_state(p: &ScenarioParams, n: &NoiseParams, a: usize) -> Result<OpticalState> {
    let label = leg("B").tensor(&leg("E"))?;
    let psi = alice_state(p.s(), a)?;
    let mut amps = ComplexVector::zeros(3);
    amps.set(H, psi.amplitudes().get(0));
    amps.set(V, psi.amplitudes().get(1));
    let signal = PureState::new(amps, leg("B"))?.to_density();
    let vacuum_e = {
        let mut m = ComplexMatrix::zeros(3, 3);
        m.set(VAC, VAC, 1.0.into());
        DensityOperator::new(m, leg("E"))?
    };
    let direct = amplitude_damping(&signal, n.d0, "B")?.tensor(&vacuum_e)?;

    let resource = entangled_resource(n.eta_ent, n.kind)?;
    let embedded = DensityOperator::new(embed_pol_pair_to_legs(resource.matrix()), label.clone())?;
    let shared = amplitude_damping(&amplitude_damping(&embedded, n.de, "B")?, n.de, "E")?;

    direct
        .scale(p.eta_ab())
        .add(&shared.scale(1.0 - p.eta_ab()))
}

/// Conditional outcome tables produced by one run of the detection chain.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionalTables {
    /// P(b | a), indexed by b ∈ {0, 1, ?}.
    pub receiver: [f64; 3],
    /// P(e, b | a), indexed `joint[b][e]` with both alphabets {0, 1, ?}.
    pub joint: [[f64; 3]; 3],
}

struct BenchOps {
    sagnac_bob: ComplexMatrix,
    sagnac_eve: ComplexMatrix,
}

impl BenchOps {
    fn standard(s: f64) -> Result<Self> {
        Ok(Self {
            sagnac_bob: sagnac_bob(s)?,
            sagnac_eve: sagnac_eve(s)?,
        })
    }
}

fn basis_bra(dim: usize, index: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(1, dim);
    m.set(0, index, 1.0.into());
    m
}

/// Contracts two detector ports with the √Π ⊗ √Π pattern and traces them
/// out, leaving the remaining subsystems' sub-normalized state.
fn contract_ports(
    state: &OpticalState,
    tags: (&str, &str),
    pi0: &ComplexMatrix,
    pi1: &ComplexMatrix,
    keep: &[&str],
) -> Result<OpticalState> {
    let sqrt_diag = |m: &ComplexMatrix| {
        ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                m.get(i, j).re.max(0.0).sqrt().into()
            } else {
                0.0.into()
            }
        })
    };
    let weighted = state
        .conjugate_on(&sqrt_diag(pi0), &[tags.0])?
        .conjugate_on(&sqrt_diag(pi1), &[tags.1])?;
    weighted.partial_trace(keep)
}

/// One party's measurement arm: attach a fresh path, interfere, split the
/// conclusive path through HWP and PBS onto two detector ports, and leave
/// the inconclusive path unmeasured. Returns the sub-normalized remainder
/// states keyed by click pattern plus the inconclusive-path remainder.
struct ArmOutcome {
    /// Remainders for (first port only, second port only, no click, both).
    patterns: [OpticalState; 4],
    inconclusive_path: OpticalState,
}

fn measurement_arm(
    state: &OpticalState,
    leg_tag: &str,
    sagnac: &ComplexMatrix,
    eta_det: f64,
    path_tag: &str,
    port_tags: (&str, &str),
    keep: &[&str],
) -> Result<ArmOutcome> {
    let path = {
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 0, 1.0.into());
        DensityOperator::new(m, HilbertLabel::new(vec![path_subsystem(path_tag)])?)?
    };
    let with_path = state.tensor(&path)?;
    let interfered = with_path.conjugate_on(sagnac, &[leg_tag, path_tag])?;
    let conclusive = interfered.map_replacing(path_tag, &basis_bra(2, 0), &[])?;
    let inconclusive = interfered.map_replacing(path_tag, &basis_bra(2, 1), &[])?;

    let rotated = conclusive.conjugate_on(&hwp(std::f64::consts::FRAC_PI_8), &[leg_tag])?;
    let ports = rotated.map_replacing(
        leg_tag,
        &pbs(),
        &[port_subsystem(port_tags.0), port_subsystem(port_tags.1)],
    )?;
    let (off, on) = onoff_detector(eta_det)?;
    let patterns = [
        contract_ports(&ports, port_tags, &on, &off, keep)?,
        contract_ports(&ports, port_tags, &off, &on, keep)?,
        contract_ports(&ports, port_tags, &off, &off, keep)?,
        contract_ports(&ports, port_tags, &on, &on, keep)?,
    ];
    let inconclusive_path = inconclusive.partial_trace(keep)?;
    Ok(ArmOutcome {
        patterns,
        inconclusive_path,
    })
}

fn detection_chain_with_ops(
    p: &ScenarioParams,
    n: &NoiseParams,
    a: usize,
    ops: &BenchOps,
) -> Result<ConditionalTables> {
    let zeta = shared_state(p, n, a)?;
    let bob = measurement_arm(
        &zeta,
        "B",
        &ops.sagnac_bob,
        n.eta_det,
        "PB",
        ("B0", "B1"),
        &["E"],
    )?;
    // Outcome classification: exactly one port clicking is conclusive; no
    // click or both ports clicking joins the inconclusive path.
    let [b0, b1, none, both] = bob.patterns;
    let b_inc = none.add(&both)?.add(&bob.inconclusive_path)?;
    let eve_inputs = [b0, b1, b_inc];

    let mut receiver = [0.0; 3];
    let mut joint = [[0.0; 3]; 3];
    for (b, eve_in) in eve_inputs.iter().enumerate() {
        receiver[b] = eve_in.trace_re();
        let eve = measurement_arm(eve_in, "E", &ops.sagnac_eve, n.eta_det, "PE", ("E0", "E1"), &[])?;
        let [e0, e1, none, both] = eve.patterns;
        joint[b][0] = e0.trace_re();
        joint[b][1] = e1.trace_re();
        joint[b][2] = none.trace_re() + both.trace_re() + eve.inconclusive_path.trace_re();
    }

    let total: f64 = receiver.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Consistency(format!(
            "receiver branch masses sum to {total}, trace leaked"
        )));
    }
    for b in 0..3 {
        let row: f64 = joint[b].iter().sum();
        if (row - receiver[b]).abs() > 1e-8 {
            return Err(Error::Consistency(format!(
                "eavesdropper branch masses for b={b} sum to {row} ≠ {}",
                receiver[b]
            )));
        }
    }
    Ok(ConditionalTables { receiver, joint })
}

/// Runs the full detection chain for input `a`: the receiver's interferometer,
/// path selection, HWP, PBS, and detector pair, then the eavesdropper's chain
/// on every receiver branch (she is spatially separated and measures
/// unconditionally).
pub fn detection_chain(p: &ScenarioParams, n: &NoiseParams, a: usize) -> Result<ConditionalTables> {
    detection_chain_with_ops(p, n, a, &BenchOps::standard(p.s())?)
}

/// Joint (a, b) and (b, e) tables of the noisy bench under the priors in `p`.
pub fn noisy_joints(
    p: &ScenarioParams,
    n: &NoiseParams,
) -> Result<(JointDistribution, JointDistribution)> {
    let outcomes = [Outcome::Zero, Outcome::One, Outcome::Inconclusive];
    let mut ab = JointDistribution::zeros(vec![Axis::bit("a"), Axis::ternary("b")]);
    let mut be = JointDistribution::zeros(vec![Axis::ternary("b"), Axis::ternary("e")]);
    for a in 0..2 {
        let tables = detection_chain(p, n, a)?;
        for (b, &b_out) in outcomes.iter().enumerate() {
            ab.add_to(
                &[Outcome::conclusive(a), b_out],
                p.prior(a) * tables.receiver[b],
            );
            for (e, &e_out) in outcomes.iter().enumerate() {
                be.add_to(&[b_out, e_out], p.prior(a) * tables.joint[b][e]);
            }
        }
    }
    ab.validate()?;
    be.validate()?;
    Ok((ab, be))
}

/// Success probability of eavesdropping on the noisy bench,
/// Σ_b P_BE(b, e = b).
pub fn noisy_success_prob(p: &ScenarioParams, n: &NoiseParams) -> Result<f64> {
    let (_, be) = noisy_joints(p, n)?;
    Ok(success_prob_from_joint(&be))
}

/// Secret key rate on the noisy bench, using the same inconclusive-discard
/// post-processing as the analytic pipeline.
pub fn noisy_secret_key_rate(p: &ScenarioParams, n: &NoiseParams) -> Result<f64> {
    let (ab, be) = noisy_joints(p, n)?;
    secret_key_rate_from_joints(p.q0(), p.q1(), &ab, &be, KeyRateConvention::RawPriors)
}
