//! Eve's success probability of eavesdropping: closed form, explicit state
//! evolution for both attack structures, the piecewise closed-form optimum
//! with its branch logic, and an independent grid-search oracle.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::DensityOperator;
use crate::scenario::{
    bob_kraus, eve_povm, optimal_bob_alphas, type1_joint_state, type2_joint_state, KrausSet, Povm,
    ScenarioParams,
};

/// Which branch of the optimization is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Both branch functions positive; the stationary point is feasible.
    Interior,
    /// A branch function is ≤ 0; the optimum sits at a feasibility corner.
    Boundary,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::Interior => write!(f, "interior"),
            Branch::Boundary => write!(f, "boundary"),
        }
    }
}

/// Outcome of the branch analysis at one (q₀, q₁, s) point.
#[derive(Debug, Clone, Serialize)]
pub struct BranchReport {
    pub f0: f64,
    pub f1: f64,
    pub branch: Branch,
    /// Optimal eavesdropper weights. On the boundary branch these saturate
    /// the feasibility surface at (1−s², 0) or (0, 1−s²), concentrating all
    /// weight on the side with the larger receiver weight.
    pub optimal_u: (f64, f64),
}

/// The two cubics whose signs select the optimization branch:
/// f₀(s) = q₁s³ − √(q₀q₁)s² − q₀s + √(q₀q₁) and the prior-swapped f₁.
pub fn branch_functions(q0: f64, q1: f64, s: f64) -> (f64, f64) {
    let root = (q0 * q1).sqrt();
    let f0 = q1 * s.powi(3) - root * s * s - q0 * s + root;
    let f1 = q0 * s.powi(3) - root * s * s - q1 * s + root;
    (f0, f1)
}

/// Evaluates the branch functions and the corresponding optimal
/// eavesdropper weights for the receiver's optimal discrimination.
///
/// Ties (f₀ = 0 or f₁ = 0 exactly) are classified as boundary; an exact
/// receiver-weight tie on the boundary picks the u₀-side corner.
pub fn branch_report(q0: f64, q1: f64, s: f64) -> Result<BranchReport> {
    let (alpha0, alpha1) = optimal_bob_alphas(q0, q1, s)?;
    let (f0, f1) = branch_functions(q0, q1, s);
    if f0 > 0.0 && f1 > 0.0 {
        let u0 = 1.0 - (alpha1 / alpha0).sqrt() * s;
        let u1 = 1.0 - (alpha0 / alpha1).sqrt() * s;
        Ok(BranchReport {
            f0,
            f1,
            branch: Branch::Interior,
            optimal_u: (u0, u1),
        })
    } else {
        let corner = 1.0 - s * s;
        let optimal_u = if alpha0 >= alpha1 {
            (corner, 0.0)
        } else {
            (0.0, corner)
        };
        Ok(BranchReport {
            f0,
            f1,
            branch: Branch::Boundary,
            optimal_u,
        })
    }
}

/// Closed-form success probability of eavesdropping,
/// (1−η)/(2(1−s²)) · (α₀u₀ + α₁u₁).
pub fn success_prob_closed_form(p: &ScenarioParams) -> f64 {
    let s = p.s();
    (1.0 - p.eta_ab()) / (2.0 * (1.0 - s * s)) * (p.alpha0() * p.u0() + p.alpha1() * p.u1())
}

/// Success probability via explicit type-I state evolution: apply each
/// conclusive Kraus operator to the pure joint state, reduce to Eve, and
/// contract with her POVM. Never uses the closed form.
pub fn success_prob_type1(p: &ScenarioParams) -> Result<f64> {
    let kraus = bob_kraus(p.s(), p.alpha0(), p.alpha1())?;
    let povm = eve_povm(p.s(), p.u0(), p.u1())?;
    success_prob_type1_with(p, &kraus, &povm)
}

pub(crate) fn success_prob_type1_with(
    p: &ScenarioParams,
    kraus: &KrausSet,
    povm: &Povm,
) -> Result<f64> {
    let mut total = 0.0;
    for a in 0..2 {
        let gamma = type1_joint_state(p.s(), p.eta_ab(), a)?;
        for b in 0..2 {
            let branch = gamma.apply_on(kraus.conclusive(b), &["B"])?;
            let eve = branch.to_density().partial_trace(&["E"])?;
            // q_a ⟨Γ|K†K⊗𝟙|Γ⟩ ⟨γ_ab|M_b|γ_ab⟩ = q_a Tr(M_b Tr_B[KΓΓ†K†])
            total += p.prior(a) * eve.expectation(povm.element(b), &["E"])?;
        }
    }
    Ok(total)
}

/// Eve's normalized conditional state after the receiver's conclusive
/// outcome `b` in the type-II structure.
pub fn type2_conditional_eve_state(
    p: &ScenarioParams,
    a: usize,
    b: usize,
) -> Result<DensityOperator> {
    let kraus = bob_kraus(p.s(), p.alpha0(), p.alpha1())?;
    let sigma = type2_joint_state(p.s(), p.eta_ab(), a)?;
    let after = sigma.conjugate_on(kraus.conclusive(b), &["B"])?;
    let mass = after.trace_re();
    if mass <= 1e-15 {
        return Err(Error::Degenerate(format!(
            "outcome b={b} has zero probability on input a={a}"
        )));
    }
    Ok(after.partial_trace(&["E"])?.scale(1.0 / mass))
}

/// Success probability via explicit type-II evolution: conjugate the mixed
/// joint state by each conclusive Kraus operator and contract Eve's
/// conditional state with her POVM.
pub fn success_prob_type2(p: &ScenarioParams) -> Result<f64> {
    let kraus = bob_kraus(p.s(), p.alpha0(), p.alpha1())?;
    let povm = eve_povm(p.s(), p.u0(), p.u1())?;
    success_prob_type2_with(p, &kraus, &povm)
}

pub(crate) fn success_prob_type2_with(
    p: &ScenarioParams,
    kraus: &KrausSet,
    povm: &Povm,
) -> Result<f64> {
    let mut total = 0.0;
    for a in 0..2 {
        let sigma = type2_joint_state(p.s(), p.eta_ab(), a)?;
        for b in 0..2 {
            let after = sigma.conjugate_on(kraus.conclusive(b), &["B"])?;
            let eve = after.partial_trace(&["E"])?;
            total += p.prior(a) * eve.expectation(povm.element(b), &["E"])?;
        }
    }
    Ok(total)
}

/// Piecewise closed-form optimum of the success probability over Eve's
/// weights, with the receiver at his optimal discrimination.
pub fn optimal_success_prob(q0: f64, q1: f64, s: f64, eta_ab: f64) -> Result<(f64, BranchReport)> {
    if !(0.0..=1.0).contains(&eta_ab) {
        return Err(Error::Parameter(format!(
            "eta_ab must lie in [0, 1], got {eta_ab}"
        )));
    }
    let report = branch_report(q0, q1, s)?;
    let (alpha0, alpha1) = optimal_bob_alphas(q0, q1, s)?;
    let p = match report.branch {
        Branch::Interior => {
            (1.0 - eta_ab) / (2.0 * (1.0 - s * s))
                * (alpha0 + alpha1 - 2.0 * (alpha0 * alpha1).sqrt() * s)
        }
        Branch::Boundary => (1.0 - eta_ab) / 2.0 * alpha0.max(alpha1),
    };
    Ok((p, report))
}

/// Scenario parameters with both parties at their optimal weights.
pub fn optimal_params(q0: f64, q1: f64, s: f64, eta_ab: f64) -> Result<(ScenarioParams, BranchReport)> {
    let report = branch_report(q0, q1, s)?;
    let (alpha0, alpha1) = optimal_bob_alphas(q0, q1, s)?;
    let (u0, u1) = report.optimal_u;
    let params = ScenarioParams::new(q0, q1, s, eta_ab, alpha0, alpha1, u0, u1)?;
    Ok((params, report))
}

fn objective(q0: f64, q1: f64, s: f64, eta_ab: f64) -> Result<impl Fn(f64, f64) -> f64> {
    let (alpha0, alpha1) = optimal_bob_alphas(q0, q1, s)?;
    let c = (1.0 - eta_ab) / (2.0 * (1.0 - s * s));
    Ok(move |u0: f64, u1: f64| c * (alpha0 * u0 + alpha1 * u1))
}

/// Independent oracle: maximizes the objective along the active feasibility
/// boundary (1−u₀)(1−u₁) = s², sweeping u₀ through its feasible range
/// [0, 1−s²] in `grid_n` steps, plus the saturated corner points.
pub fn brute_force_optimum(q0: f64, q1: f64, s: f64, eta_ab: f64, grid_n: usize) -> Result<f64> {
    if grid_n < 100 {
        return Err(Error::Parameter(format!("grid_n must be ≥ 100, got {grid_n}")));
    }
    let f = objective(q0, q1, s, eta_ab)?;
    let s2 = s * s;
    let u0_max = 1.0 - s2;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=grid_n {
        let u0 = u0_max * i as f64 / grid_n as f64;
        // On the constraint surface; at s = 0 the surface degenerates and the
        // whole unit square is feasible, so the top edge u₁ = 1 is the boundary.
        let u1 = if s == 0.0 {
            1.0
        } else {
            (1.0 - s2 / (1.0 - u0)).max(0.0)
        };
        best = best.max(f(u0, u1));
    }
    best = best.max(f(u0_max, 0.0)).max(f(0.0, u0_max));
    Ok(best)
}

/// Audit oracle: full 2-D grid over the feasible set (grid_n² points). This
/// does not assume the optimum lies on the constraint surface.
pub fn brute_force_optimum_2d(q0: f64, q1: f64, s: f64, eta_ab: f64, grid_n: usize) -> Result<f64> {
    if grid_n < 100 {
        return Err(Error::Parameter(format!("grid_n must be ≥ 100, got {grid_n}")));
    }
    let f = objective(q0, q1, s, eta_ab)?;
    let s2 = s * s;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=grid_n {
        let u0 = i as f64 / grid_n as f64;
        for j in 0..=grid_n {
            let u1 = j as f64 / grid_n as f64;
            if (1.0 - u0) * (1.0 - u1) + 1e-15 < s2 {
                continue;
            }
            best = best.max(f(u0, u1));
        }
    }
    Ok(best)
}

/// Locates the root of f₁ by bisection on a sign-changing bracket.
pub fn root_of_f1(q0: f64, q1: f64, lo: f64, hi: f64) -> Result<f64> {
    let f = |s: f64| branch_functions(q0, q1, s).1;
    let (mut lo, mut hi) = (lo, hi);
    if f(lo) * f(hi) > 0.0 {
        return Err(Error::Parameter(format!(
            "f1 does not change sign on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
