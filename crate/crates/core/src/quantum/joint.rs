//! Multi-register states: system, detector, observer and environment.
//!
//! Amplitudes are stored densely in mixed radix with the first register as
//! the most significant digit. Detector and observer registers reserve label
//! 0 for the "nothing registered" pointer state; the pointer for outcome
//! position `b` is label `b + 1`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use super::state::{BasisLabel, StateVector, NORM_TOL};
use crate::error::{Error, Result};

/// Largest joint dimension any constructor here will allocate.
pub const MAX_JOINT_DIM: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegisterKind {
    System,
    Detector,
    Observer,
    Environment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    pub kind: RegisterKind,
    pub labels: Vec<BasisLabel>,
}

impl Register {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    fn pointer(kind: RegisterKind, prefix: &str, outcomes: &[String], dim: usize) -> Self {
        let labels = (0..dim)
            .map(|i| match i {
                0 => BasisLabel::tagged(0, format!("{prefix}_null")),
                i if i <= outcomes.len() => {
                    BasisLabel::tagged(i, format!("{prefix}_{}", outcomes[i - 1]))
                }
                i => BasisLabel::tagged(i, format!("{prefix}_unused{i}")),
            })
            .collect();
        Self { kind, labels }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    registers: Vec<Register>,
    amplitudes: Vec<Complex64>,
}

fn checked_product(dims: impl Iterator<Item = usize>) -> Result<usize> {
    let mut total: usize = 1;
    for d in dims {
        total = total
            .checked_mul(d)
            .filter(|&t| t <= MAX_JOINT_DIM)
            .ok_or(Error::SizeGuard {
                what: "joint dimension",
                bound: MAX_JOINT_DIM as u64,
            })?;
    }
    Ok(total)
}

impl JointState {
    pub fn new(registers: Vec<Register>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if registers.is_empty() || registers.iter().any(|r| r.dim() == 0) {
            return Err(Error::InvalidParameter(
                "every register needs at least one basis state".into(),
            ));
        }
        let total = checked_product(registers.iter().map(Register::dim))?;
        if total != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: amplitudes.len(),
            });
        }
        let joint = Self {
            registers,
            amplitudes,
        };
        let norm_sq = joint.norm_sq();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(joint)
    }

    /// A lone system register.
    pub fn from_system(state: &StateVector) -> Result<Self> {
        let reg = Register {
            kind: RegisterKind::System,
            labels: state.labels().to_vec(),
        };
        Self::new(vec![reg], state.amplitudes().to_vec())
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register_dims(&self) -> Vec<usize> {
        self.registers.iter().map(Register::dim).collect()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Positions of registers of the given kind.
    pub fn registers_of(&self, kind: RegisterKind) -> Vec<usize> {
        self.registers
            .iter()
            .enumerate()
            .filter(|(_, r)| r.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    /// Per-register positions of a flat index.
    fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.registers.len()];
        for (slot, reg) in out.iter_mut().zip(&self.registers).rev() {
            *slot = flat % reg.dim();
            flat /= reg.dim();
        }
        out
    }

    /// Nonzero amplitudes keyed by the tuple of basis-label indices.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(move |(flat, &a)| {
                let digits = self.digits(flat);
                let labels = digits
                    .iter()
                    .zip(&self.registers)
                    .map(|(&d, r)| r.labels[d].index)
                    .collect();
                (labels, a)
            })
    }

    /// `|a⟩ ⊗ |b⟩` with `self`'s registers first.
    pub fn tensor(&self, other: &JointState) -> Result<JointState> {
        checked_product([self.amplitudes.len(), other.amplitudes.len()].into_iter())?;
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        let mut registers = self.registers.clone();
        registers.extend(other.registers.iter().cloned());
        Ok(JointState {
            registers,
            amplitudes,
        })
    }

    /// Presence summed over everything except the listed registers, keyed by
    /// the label indices of those registers.
    pub fn marginal_presence(&self, keep: &[usize]) -> Result<BTreeMap<Vec<usize>, f64>> {
        for &k in keep {
            if k >= self.registers.len() {
                return Err(Error::InvalidRegister {
                    index: k,
                    count: self.registers.len(),
                });
            }
        }
        let mut out = BTreeMap::new();
        for (flat, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let digits = self.digits(flat);
            let key = keep
                .iter()
                .map(|&k| self.registers[k].labels[digits[k]].index)
                .collect();
            *out.entry(key).or_insert(0.0) += p;
        }
        Ok(out)
    }

    /// Presence of each record held by the detector registers.
    pub fn branch_presences(&self) -> Result<BTreeMap<Vec<usize>, f64>> {
        let detectors = self.registers_of(RegisterKind::Detector);
        if detectors.is_empty() {
            return Err(Error::MissingRegister("detector"));
        }
        self.marginal_presence(&detectors)
    }
}

impl Serialize for JointState {
    /// A list of `[label-tuple, re, im]` triples over nonzero amplitudes.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<_> = self.entries().collect();
        let mut seq = serializer.serialize_seq(Some(entries.len()))?;
        for (labels, a) in entries {
            seq.serialize_element(&(labels, a.re, a.im))?;
        }
        seq.end()
    }
}

/// `Σ_b c_b |b⟩|M_∅⟩ ↦ Σ_b c_b |b⟩|M_b⟩` with orthonormal pointer states.
pub fn measure_entangle(system: &StateVector, detector_dim: usize) -> Result<JointState> {
    let dim = system.dimension();
    if detector_dim < dim + 1 {
        return Err(Error::DetectorTooSmall {
            required: dim + 1,
            given: detector_dim,
        });
    }
    checked_product([dim, detector_dim].into_iter())?;
    let names: Vec<String> = system.labels().iter().map(ToString::to_string).collect();
    let sys = Register {
        kind: RegisterKind::System,
        labels: system.labels().to_vec(),
    };
    let det = Register::pointer(RegisterKind::Detector, "M", &names, detector_dim);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim * detector_dim];
    for (b, &c) in system.amplitudes().iter().enumerate() {
        amplitudes[b * detector_dim + b + 1] = c;
    }
    JointState::new(vec![sys, det], amplitudes)
}

/// Appends an observer register that copies the joint detector record:
/// `Σ c |…⟩|M_r⟩|O_∅⟩ ↦ Σ c |…⟩|M_r⟩|O_r⟩`. With several detectors the
/// observer's label encodes the whole reading sequence.
pub fn observe_entangle(joint: &JointState) -> Result<JointState> {
    if !joint.registers_of(RegisterKind::Observer).is_empty() {
        return Err(Error::ObserverPresent);
    }
    if joint.registers_of(RegisterKind::System).is_empty() {
        return Err(Error::MissingRegister("system"));
    }
    let detectors = joint.registers_of(RegisterKind::Detector);
    if detectors.is_empty() {
        return Err(Error::MissingRegister("detector"));
    }
    let records = checked_product(detectors.iter().map(|&d| joint.registers[d].dim()))?;
    let observer_dim = records + 1;
    checked_product([joint.amplitudes.len(), observer_dim].into_iter())?;

    let names: Vec<String> = (0..records)
        .map(|r| {
            let mut rest = r;
            let mut parts = Vec::with_capacity(detectors.len());
            for &d in detectors.iter().rev() {
                let reg = &joint.registers[d];
                parts.push(reg.labels[rest % reg.dim()].to_string());
                rest /= reg.dim();
            }
            parts.reverse();
            parts.join("+")
        })
        .collect();
    let observer = Register::pointer(RegisterKind::Observer, "O", &names, observer_dim);

    let mut amplitudes = vec![Complex64::new(0.0, 0.0); joint.amplitudes.len() * observer_dim];
    for (flat, &a) in joint.amplitudes.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let digits = joint.digits(flat);
        let record = detectors
            .iter()
            .fold(0, |acc, &d| acc * joint.registers[d].dim() + digits[d]);
        amplitudes[flat * observer_dim + record + 1] = a;
    }
    let mut registers = joint.registers.clone();
    registers.push(observer);
    JointState::new(registers, amplitudes)
}

/// Reduced density matrix: Hermitian, unit trace, nonnegative diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || n != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: n.max(1),
                found: entries.ncols(),
            });
        }
        for i in 0..n {
            for j in i..n {
                let deviation = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if !(deviation <= 1e-12) {
                    return Err(Error::NotHermitian { deviation });
                }
            }
            if entries[(i, i)].re < -1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "negative population {}",
                    entries[(i, i)].re
                )));
            }
        }
        let trace = entries.trace().re;
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq: trace });
        }
        Ok(Self { entries })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &StateVector) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self::new(&v * v.adjoint())
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `tr ρ²`; 1 for pure states.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }
}

/// Trace out every register except `keep`.
pub fn partial_trace(joint: &JointState, keep: usize) -> Result<DensityMatrix> {
    let count = joint.registers.len();
    if keep >= count {
        return Err(Error::InvalidRegister { index: keep, count });
    }
    let dims = joint.register_dims();
    let before: usize = dims[..keep].iter().product();
    let k = dims[keep];
    let after: usize = dims[keep + 1..].iter().product();
    let psi = &joint.amplitudes;
    let mut rho = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
    for x in 0..before {
        for y in 0..after {
            let at = |i: usize| psi[(x * k + i) * after + y];
            for i in 0..k {
                let a = at(i);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..k {
                    rho[(i, j)] += a * at(j).conj();
                }
            }
        }
    }
    DensityMatrix::new(rho)
}

/// ℓ1 norm of the off-diagonal part.
pub fn coherence(rho: &DensityMatrix) -> f64 {
    let n = rho.dimension();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += rho.entries[(i, j)].norm();
            }
        }
    }
    total
}

/// Entangles `system` with `qubits` environment qubits. Each qubit stays in
/// `|0⟩` on the branch at position 0 and moves to `g|0⟩ + √(1-|g|²)|1⟩` on
/// every other branch, so the branch-0 / branch-b overlap per qubit is `g`.
pub fn entangle_environment(
    system: &StateVector,
    overlap: Complex64,
    qubits: usize,
) -> Result<JointState> {
    if !(overlap.norm() <= 1.0 + 1e-15) {
        return Err(Error::InvalidParameter(format!(
            "|g| = {} exceeds 1",
            overlap.norm()
        )));
    }
    let env_dim = checked_product(std::iter::repeat_n(2, qubits))?;
    checked_product([system.dimension(), env_dim].into_iter())?;

    let moved = [
        overlap,
        Complex64::new((1.0 - overlap.norm_sqr()).max(0.0).sqrt(), 0.0),
    ];
    let mut amplitudes = Vec::with_capacity(system.dimension() * env_dim);
    for (b, &c) in system.amplitudes().iter().enumerate() {
        for e in 0..env_dim {
            let amp = if b == 0 {
                if e == 0 {
                    c
                } else {
                    Complex64::new(0.0, 0.0)
                }
            } else {
                (0..qubits).fold(c, |acc, q| acc * moved[(e >> (qubits - 1 - q)) & 1])
            };
            amplitudes.push(amp);
        }
    }

    let mut registers = vec![Register {
        kind: RegisterKind::System,
        labels: system.labels().to_vec(),
    }];
    for _ in 0..qubits {
        registers.push(Register {
            kind: RegisterKind::Environment,
            labels: vec![BasisLabel::tagged(0, "e0"), BasisLabel::tagged(1, "e1")],
        });
    }
    // renormalize away rounding from the √(1-|g|²) factor
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amplitudes {
        *a /= norm;
    }
    JointState::new(registers, amplitudes)
}
