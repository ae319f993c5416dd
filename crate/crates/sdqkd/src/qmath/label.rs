//! Labeled tensor-product structure over small Hilbert spaces.
//!
//! A [`HilbertLabel`] records an ordered list of subsystems, each with a tag
//! and a named basis. Operators and states carry a label alongside their raw
//! matrix so that tensor products, partial traces, and subsystem-local maps
//! never lose track of which factor is which.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::matrix::{ComplexMatrix, ComplexVector, TOL_PSD};

/// One tensor factor: a tag plus its named basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    tag: String,
    basis: Vec<String>,
}

impl Subsystem {
    pub fn new(tag: &str, basis: &[&str]) -> Self {
        Self {
            tag: tag.to_string(),
            basis: basis.iter().map(|b| b.to_string()).collect(),
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }
}

/// Ordered list of subsystem factors describing a full tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertLabel {
    subsystems: Vec<Subsystem>,
}

impl HilbertLabel {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        for (i, a) in subsystems.iter().enumerate() {
            if a.dim() == 0 {
                return Err(Error::Label(format!("subsystem '{}' has dimension 0", a.tag)));
            }
            for b in subsystems.iter().skip(i + 1) {
                if a.tag == b.tag {
                    return Err(Error::Label(format!("duplicate subsystem tag '{}'", a.tag)));
                }
            }
        }
        Ok(Self { subsystems })
    }

    pub fn single(tag: &str, basis: &[&str]) -> Self {
        Self {
            subsystems: vec![Subsystem::new(tag, basis)],
        }
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim()).collect()
    }

    /// Total tensor-product dimension.
    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim()).product()
    }

    pub fn position(&self, tag: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.tag == tag)
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.position(tag).is_some()
    }

    /// Concatenates two labels, rejecting duplicate tags.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut subsystems = self.subsystems.clone();
        subsystems.extend(other.subsystems.clone());
        Self::new(subsystems)
    }

    /// Sub-label containing only `tags`, in this label's order.
    pub fn keep(&self, tags: &[&str]) -> Result<Self> {
        for t in tags {
            if !self.contains(t) {
                return Err(Error::Label(format!("tag '{t}' not present in label")));
            }
        }
        Ok(Self {
            subsystems: self
                .subsystems
                .iter()
                .filter(|s| tags.contains(&s.tag.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Replaces `tag` in place by zero or more new subsystems.
    pub fn replace(&self, tag: &str, replacement: &[Subsystem]) -> Result<Self> {
        let pos = self
            .position(tag)
            .ok_or_else(|| Error::Label(format!("tag '{tag}' not present in label")))?;
        let mut subsystems = Vec::with_capacity(self.subsystems.len() + replacement.len());
        subsystems.extend_from_slice(&self.subsystems[..pos]);
        subsystems.extend_from_slice(replacement);
        subsystems.extend_from_slice(&self.subsystems[pos + 1..]);
        Self::new(subsystems)
    }

    fn index_to_multi(&self, mut index: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut multi = vec![0usize; dims.len()];
        for (slot, &d) in dims.iter().enumerate().rev() {
            multi[slot] = index % d;
            index /= d;
        }
        multi
    }

    fn multi_to_index(&self, multi: &[usize]) -> usize {
        let mut index = 0usize;
        for (slot, &d) in self.dims().iter().enumerate() {
            index = index * d + multi[slot];
        }
        index
    }
}

/// Kronecker product of two labeled operators, concatenating labels.
pub fn tensor(
    a: &ComplexMatrix,
    la: &HilbertLabel,
    b: &ComplexMatrix,
    lb: &HilbertLabel,
) -> Result<(ComplexMatrix, HilbertLabel)> {
    Ok((a.kron(b), la.tensor(lb)?))
}

/// Partial trace keeping only the subsystems in `keep` (label order).
///
/// The result's trace equals the input's trace, and Hermiticity is
/// preserved entrywise.
pub fn partial_trace(
    rho: &ComplexMatrix,
    label: &HilbertLabel,
    keep: &[&str],
) -> Result<ComplexMatrix> {
    if !rho.is_square() || rho.rows() != label.dim() {
        return Err(Error::Label(format!(
            "operator is {}x{} but label dimension is {}",
            rho.rows(),
            rho.cols(),
            label.dim()
        )));
    }
    let kept_label = label.keep(keep)?;
    let kept_slots: Vec<usize> = label
        .subsystems
        .iter()
        .enumerate()
        .filter(|(_, s)| keep.contains(&s.tag()))
        .map(|(i, _)| i)
        .collect();
    let traced_slots: Vec<usize> = (0..label.subsystems.len())
        .filter(|i| !kept_slots.contains(i))
        .collect();
    let mut out = ComplexMatrix::zeros(kept_label.dim(), kept_label.dim());
    let n = label.dim();
    for r in 0..n {
        let rm = label.index_to_multi(r);
        for c in 0..n {
            let cm = label.index_to_multi(c);
            if traced_slots.iter().any(|&t| rm[t] != cm[t]) {
                continue;
            }
            let rk: Vec<usize> = kept_slots.iter().map(|&k| rm[k]).collect();
            let ck: Vec<usize> = kept_slots.iter().map(|&k| cm[k]).collect();
            let i = kept_label.multi_to_index(&rk);
            let j = kept_label.multi_to_index(&ck);
            let v = out.get(i, j) + rho.get(r, c);
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Expands `op`, acting on `acting_on` (in the listed order), to the full
/// space described by `label`, with identity on every other subsystem.
pub fn embed_operator(
    op: &ComplexMatrix,
    label: &HilbertLabel,
    acting_on: &[&str],
) -> Result<ComplexMatrix> {
    let mut slots = Vec::with_capacity(acting_on.len());
    for t in acting_on {
        let pos = label
            .position(t)
            .ok_or_else(|| Error::Label(format!("tag '{t}' not present in label")))?;
        slots.push(pos);
    }
    let sub_dims: Vec<usize> = slots.iter().map(|&i| label.subsystems[i].dim()).collect();
    let sub_dim: usize = sub_dims.iter().product();
    if op.rows() != sub_dim || op.cols() != sub_dim {
        return Err(Error::Label(format!(
            "operator is {}x{} but tags {:?} span dimension {}",
            op.rows(),
            op.cols(),
            acting_on,
            sub_dim
        )));
    }
    let n = label.dim();
    let other_slots: Vec<usize> = (0..label.subsystems.len())
        .filter(|i| !slots.contains(i))
        .collect();
    let sub_index = |multi: &[usize]| -> usize {
        let mut idx = 0usize;
        for (k, &slot) in slots.iter().enumerate() {
            idx = idx * sub_dims[k] + multi[slot];
        }
        idx
    };
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let rm = label.index_to_multi(r);
        for c in 0..n {
            let cm = label.index_to_multi(c);
            if other_slots.iter().any(|&t| rm[t] != cm[t]) {
                continue;
            }
            out.set(r, c, op.get(sub_index(&rm), sub_index(&cm)));
        }
    }
    Ok(out)
}

/// Applies `K ρ K†` where `K` maps the space of `tag` into the space spanned
/// by `replacement` (possibly empty, removing the factor entirely).
///
/// This is the one primitive behind isometries that split a subsystem into
/// several (beam-splitter ports) and projection-contractions that remove one
/// (path selection).
pub fn apply_map_replacing(
    rho: &ComplexMatrix,
    label: &HilbertLabel,
    tag: &str,
    k: &ComplexMatrix,
    replacement: &[Subsystem],
) -> Result<(ComplexMatrix, HilbertLabel)> {
    let pos = label
        .position(tag)
        .ok_or_else(|| Error::Label(format!("tag '{tag}' not present in label")))?;
    let d_in = label.subsystems[pos].dim();
    let d_out: usize = replacement.iter().map(|s| s.dim()).product();
    if k.cols() != d_in || k.rows() != d_out {
        return Err(Error::Label(format!(
            "map is {}x{} but expected {}x{} for tag '{tag}'",
            k.rows(),
            k.cols(),
            d_out,
            d_in
        )));
    }
    let new_label = label.replace(tag, replacement)?;
    // Build the full-space rectangular map, then K ρ K†.
    let n_in = label.dim();
    let n_out = new_label.dim();
    let mut full = ComplexMatrix::zeros(n_out, n_in);
    // Slots before and after `tag` keep their positions; the replacement block
    // occupies `replacement.len()` slots starting at `pos` in the new label.
    for r in 0..n_out {
        let rm = new_label.index_to_multi(r);
        let mut r_block = 0usize;
        for (k_i, sub) in replacement.iter().enumerate() {
            r_block = r_block * sub.dim() + rm[pos + k_i];
        }
        for c in 0..n_in {
            let cm = label.index_to_multi(c);
            let mut same_rest = true;
            for (slot, &cv) in cm.iter().enumerate() {
                if slot == pos {
                    continue;
                }
                let new_slot = if slot < pos {
                    slot
                } else {
                    slot - 1 + replacement.len()
                };
                if rm[new_slot] != cv {
                    same_rest = false;
                    break;
                }
            }
            if same_rest {
                full.set(r, c, k.get(r_block, cm[pos]));
            }
        }
    }
    let out = full.matmul(rho).matmul(&full.adjoint());
    Ok((out, new_label))
}

/// A unit-norm (or explicitly sub-normalized) labeled state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
    label: HilbertLabel,
}

impl PureState {
    pub fn new(amplitudes: ComplexVector, label: HilbertLabel) -> Result<Self> {
        if amplitudes.dim() != label.dim() {
            return Err(Error::Label(format!(
                "state has {} amplitudes but label dimension is {}",
                amplitudes.dim(),
                label.dim()
            )));
        }
        Ok(Self { amplitudes, label })
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn label(&self) -> &HilbertLabel {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.inner(&other.amplitudes)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.amplitudes.tensor(&other.amplitudes),
            self.label.tensor(&other.label)?,
        )
    }

    /// |ψ⟩⟨ψ| as a labeled density operator.
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            matrix: self.amplitudes.outer(&self.amplitudes),
            label: self.label.clone(),
        }
    }

    /// Applies an operator acting on the listed tags (identity elsewhere).
    pub fn apply_on(&self, op: &ComplexMatrix, tags: &[&str]) -> Result<Self> {
        let full = embed_operator(op, &self.label, tags)?;
        Ok(Self {
            amplitudes: full.mul_vec(&self.amplitudes),
            label: self.label.clone(),
        })
    }
}

/// A labeled Hermitian PSD operator; sub-normalized traces are allowed for
/// conditional branches, so the trace is not forced to 1 here.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    label: HilbertLabel,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, label: HilbertLabel) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != label.dim() {
            return Err(Error::Label(format!(
                "operator is {}x{} but label dimension is {}",
                matrix.rows(),
                matrix.cols(),
                label.dim()
            )));
        }
        Ok(Self { matrix, label })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &HilbertLabel {
        &self.label
    }

    pub fn trace_re(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.matrix.is_psd(tol)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale_re(factor),
            label: self.label.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.label != other.label {
            return Err(Error::Label("adding operators with different labels".into()));
        }
        Ok(Self {
            matrix: self.matrix.add(&other.matrix),
            label: self.label.clone(),
        })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.kron(&other.matrix),
            label: self.label.tensor(&other.label)?,
        })
    }

    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let matrix = partial_trace(&self.matrix, &self.label, keep)?;
        Ok(Self {
            matrix,
            label: self.label.keep(keep)?,
        })
    }

    /// Conjugates by an operator acting on the listed tags: U ρ U†.
    pub fn conjugate_on(&self, op: &ComplexMatrix, tags: &[&str]) -> Result<Self> {
        let full = embed_operator(op, &self.label, tags)?;
        Ok(Self {
            matrix: full.matmul(&self.matrix).matmul(&full.adjoint()),
            label: self.label.clone(),
        })
    }

    /// Applies a Kraus channel Σᵢ Kᵢ ρ Kᵢ† where each Kᵢ acts on one tag.
    pub fn apply_channel_on(&self, kraus: &[ComplexMatrix], tag: &str) -> Result<Self> {
        let mut acc = ComplexMatrix::zeros(self.matrix.rows(), self.matrix.cols());
        for k in kraus {
            let full = embed_operator(k, &self.label, &[tag])?;
            acc = acc.add(&full.matmul(&self.matrix).matmul(&full.adjoint()));
        }
        Ok(Self {
            matrix: acc,
            label: self.label.clone(),
        })
    }

    /// K ρ K† with a map that replaces `tag` by new subsystems (see
    /// [`apply_map_replacing`]).
    pub fn map_replacing(
        &self,
        tag: &str,
        k: &ComplexMatrix,
        replacement: &[Subsystem],
    ) -> Result<Self> {
        let (matrix, label) = apply_map_replacing(&self.matrix, &self.label, tag, k, replacement)?;
        Ok(Self { matrix, label })
    }

    /// Expectation value Tr(op ρ) of an operator acting on the listed tags.
    pub fn expectation(&self, op: &ComplexMatrix, tags: &[&str]) -> Result<f64> {
        let full = embed_operator(op, &self.label, tags)?;
        Ok(full.matmul(&self.matrix).trace().re)
    }

    /// Checks Hermiticity, positivity, and trace against an expected value.
    pub fn check_physical(&self, expected_trace: f64, tol: f64) -> Result<()> {
        if (self.trace_re() - expected_trace).abs() > tol {
            return Err(Error::Consistency(format!(
                "trace {} differs from expected {}",
                self.trace_re(),
                expected_trace
            )));
        }
        if !self.is_psd(TOL_PSD) {
            return Err(Error::Consistency("operator is not PSD".into()));
        }
        Ok(())
    }
}
