//! Two-qubit gates from two-component links.
//!
//! Each over-crossing between the components contributes `σ_x ⊗ σ_z` and
//! each under-crossing `−σ_z ⊗ σ_x`; the gate is `exp(itH)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{herm_exp, tensor, AlgebraError, Mat2, Mat4, C64};
use crate::diagram::{catalog, DiagramError};

#[derive(Debug, Error)]
pub enum LinkGateError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("catalog entry {0:?} has no crossing data")]
    NotALink(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkGateSpec {
    pub name: String,
    pub over_count: usize,
    pub under_count: usize,
}

impl LinkGateSpec {
    pub fn new(name: impl Into<String>, over_count: usize, under_count: usize) -> Self {
        LinkGateSpec { name: name.into(), over_count, under_count }
    }

    /// Crossing counts stored with a catalog link.
    pub fn from_catalog(name: &str) -> Result<Self, LinkGateError> {
        let entry = catalog(name)?;
        let counts = entry.crossing_counts.ok_or_else(|| LinkGateError::NotALink(name.to_string()))?;
        Ok(LinkGateSpec::new(entry.name, counts.over, counts.under))
    }

    /// Crossing counts add componentwise.
    pub fn combine(&self, other: &LinkGateSpec) -> LinkGateSpec {
        LinkGateSpec::new(
            format!("{}+{}", self.name, other.name),
            self.over_count + other.over_count,
            self.under_count + other.under_count,
        )
    }
}

/// `over·(σ_x ⊗ σ_z) − under·(σ_z ⊗ σ_x)`.
pub fn link_hamiltonian(spec: &LinkGateSpec) -> Mat4 {
    let xz = tensor(&Mat2::pauli_x(), &Mat2::pauli_z());
    let zx = tensor(&Mat2::pauli_z(), &Mat2::pauli_x());
    xz.scale(C64::new(spec.over_count as f64, 0.0)) - zx.scale(C64::new(spec.under_count as f64, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoQubitGate {
    pub hamiltonian: Mat4,
    pub time: f64,
    pub unitary: Mat4,
}

/// `U = exp(i t H)` for the link Hamiltonian.
pub fn evolve(spec: &LinkGateSpec, t: f64) -> Result<TwoQubitGate, LinkGateError> {
    let hamiltonian = link_hamiltonian(spec);
    let unitary = herm_exp(&hamiltonian, t)?;
    Ok(TwoQubitGate { hamiltonian, time: t, unitary })
}

/// Smaller squared Schmidt coefficient of `ψ`, a normalized two-qubit state
/// with first-qubit-major indexing.
pub fn schmidt_min(psi: [C64; 4]) -> f64 {
    let det = psi[0] * psi[3] - psi[1] * psi[2];
    let d2 = det.norm_sqr();
    let disc = (1.0 - 4.0 * d2).max(0.0).sqrt();
    // (1 − √(1 − 4|det|²)) / 2 without cancellation
    (2.0 * d2 / (1.0 + disc)).clamp(0.0, 0.5)
}

/// `λ_min` of `U|00⟩`; zero exactly when the output is a product state.
pub fn entangling_power(gate: &TwoQubitGate) -> f64 {
    schmidt_min(gate.unitary.column(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub lambda_min: f64,
}

/// `λ_min` on `steps + 1` equally spaced times in `[t0, t1]`.
pub fn scan_entangling(spec: &LinkGateSpec, t0: f64, t1: f64, steps: usize) -> Result<Vec<ScanRow>, LinkGateError> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|k| {
            let t = t0 + (t1 - t0) * k as f64 / steps as f64;
            Ok(ScanRow { t, lambda_min: entangling_power(&evolve(spec, t)?) })
        })
        .collect()
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Times in `[t0, t1]` where `U(t)|00⟩` is a product state.
///
/// Local minima of a `steps`-point scan are refined by golden-section search
/// and kept when the refined `λ_min` is at most `tol`.
pub fn local_times(spec: &LinkGateSpec, t0: f64, t1: f64, steps: usize, tol: f64) -> Result<Vec<ScanRow>, LinkGateError> {
    let rows = scan_entangling(spec, t0, t1, steps)?;
    let h = (t1 - t0) / steps.max(1) as f64;
    let lam = |t: f64| evolve(spec, t).map(|g| entangling_power(&g)).unwrap_or(f64::INFINITY);
    let mut out: Vec<ScanRow> = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let left = if k > 0 { rows[k - 1].lambda_min } else { f64::INFINITY };
        let right = rows.get(k + 1).map_or(f64::INFINITY, |r| r.lambda_min);
        if row.lambda_min > left || row.lambda_min > right {
            continue;
        }
        let t = if row.lambda_min == 0.0 {
            row.t
        } else {
            golden_section(lam, (row.t - h).max(t0), (row.t + h).min(t1), 1e-12)
        };
        let lambda_min = lam(t);
        if lambda_min <= tol && out.last().is_none_or(|p| (p.t - t).abs() > h) {
            out.push(ScanRow { t, lambda_min });
        }
    }
    Ok(out)
}
