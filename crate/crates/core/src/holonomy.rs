//! Holonomy of flat connections.
//!
//! Two settings live here. On the presentation 2-complex of a group a flat
//! SU(2) connection is just a choice of edge images whose relator products
//! are trivial, and [`word_holonomy`] is the ordered product along a word.
//! For a two-level Hamiltonian family `h(x)` the eigenframe defines the
//! matrix-valued connection `ω_nm = ⟨k_n|d k_m⟩`; it is pure gauge, so its
//! curvature `dω + ω∧ω` vanishes while the single-band (abelian) Berry
//! connection does not.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Mat2, Quaternion, C64, TOL_HERM};
use crate::fpgroup::{Presentation, Word};
use crate::reps::{evaluate_word, Representation, TOL_REP};

pub const GAP_MIN: f64 = 1e-6;
pub const DEFAULT_DELTA: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HolonomyError {
    #[error("face constraint violated: relator {relator} has residual {residual:e}")]
    InvalidConnection { relator: String, residual: f64 },
    #[error("representation residual {0:e} exceeds tolerance")]
    InvalidRepresentation(f64),
    #[error("spectral gap {gap:e} below minimum at {point:?}")]
    DegenerateSpectrum { point: Vec<f64>, gap: f64 },
    #[error("family takes {expected} parameters, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("family is not Hermitian at {point:?} (defect {defect:e})")]
    NotHermitian { point: Vec<f64>, defect: f64 },
    #[error("loop is not closed")]
    OpenLoop,
    #[error("loop needs at least one point")]
    EmptyLoop,
    #[error("band index {0} out of range")]
    InvalidBand(usize),
}

// ---------------------------------------------------------------------------
// presentation complex

/// Edge images on the presentation 2-complex satisfying every face.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatConnection {
    presentation: Presentation,
    edge_images: Vec<Mat2>,
}

impl FlatConnection {
    pub fn new(presentation: Presentation, edge_images: Vec<Mat2>, tol: f64) -> Result<Self, HolonomyError> {
        let mut worst: Option<(f64, &Word)> = None;
        for r in presentation.relators() {
            let res = (evaluate_word(&edge_images, r) - Mat2::identity()).op_norm();
            if worst.is_none_or(|(w, _)| res > w) {
                worst = Some((res, r));
            }
        }
        if let Some((residual, r)) = worst {
            if !(residual <= tol) {
                return Err(HolonomyError::InvalidConnection { relator: r.to_string(), residual });
            }
        }
        Ok(FlatConnection { presentation, edge_images })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn edge_images(&self) -> &[Mat2] {
        &self.edge_images
    }
}

/// The flat connection whose edge holonomies are the images of `rep`.
pub fn connection_from_rep(rep: &Representation) -> Result<FlatConnection, HolonomyError> {
    if !(rep.residual() <= TOL_REP) {
        return Err(HolonomyError::InvalidRepresentation(rep.residual()));
    }
    FlatConnection::new(rep.presentation().clone(), rep.images().to_vec(), TOL_REP)
}

/// Ordered product of edge images along `w`. The word is freely reduced
/// first, so inserting `g g⁻¹` never changes the result.
pub fn word_holonomy(conn: &FlatConnection, w: &Word) -> Mat2 {
    evaluate_word(&conn.edge_images, &w.free_reduce())
}

// ---------------------------------------------------------------------------
// two-level Hamiltonian families

/// A smooth map from parameter points to 2×2 Hermitian matrices.
pub trait HamiltonianFamily: Sync {
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Mat2;
    fn name(&self) -> String;
}

/// `n̂(θ, φ)·σ` with `n̂ = (sin θ cos φ, sin θ sin φ, cos θ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpinFamily;

impl HamiltonianFamily for SpinFamily {
    fn dim(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Mat2 {
        let (st, ct) = x[0].sin_cos();
        let (sp, cp) = x[1].sin_cos();
        let n = [st * cp, st * sp, ct];
        Mat2::pauli_x().scale(C64::new(n[0], 0.0))
            + Mat2::pauli_y().scale(C64::new(n[1], 0.0))
            + Mat2::pauli_z().scale(C64::new(n[2], 0.0))
    }

    fn name(&self) -> String {
        "spin".into()
    }
}

/// A family that ignores its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantFamily {
    pub h: Mat2,
    pub dim: usize,
}

impl HamiltonianFamily for ConstantFamily {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, _x: &[f64]) -> Mat2 {
        self.h
    }

    fn name(&self) -> String {
        "constant".into()
    }
}

/// Eigen-decomposition of a 2×2 Hermitian matrix at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenframe {
    /// Ascending energies.
    pub energies: [f64; 2],
    /// Columns are the gauge-fixed eigenvectors `|k_0⟩, |k_1⟩`.
    pub frame: Mat2,
}

impl Eigenframe {
    pub fn vector(&self, n: usize) -> [C64; 2] {
        [self.frame.0[0][n], self.frame.0[1][n]]
    }

    pub fn gap(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }
}

/// Rescale so the largest-magnitude component is real and positive.
fn gauge_fix(v: [C64; 2]) -> [C64; 2] {
    let big = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let phase = big.conj() / (big.norm() * n);
    [v[0] * phase, v[1] * phase]
}

fn eigenvector(h: &Mat2, e: f64) -> [C64; 2] {
    let (p, q, r) = (h.0[0][0].re, h.0[0][1], h.0[1][1].re);
    // rows of (h − e) give two candidate null vectors; keep the larger
    let u = [q, C64::new(e - p, 0.0)];
    let w = [C64::new(e - r, 0.0), q.conj()];
    let nu = u[0].norm_sqr() + u[1].norm_sqr();
    let nw = w[0].norm_sqr() + w[1].norm_sqr();
    gauge_fix(if nu >= nw { u } else { w })
}

/// Closed-form eigenframe; fails when the gap is below `gap_min`.
pub fn eigenframe(h: &Mat2, gap_min: f64, point: &[f64]) -> Result<Eigenframe, HolonomyError> {
    let defect = (*h - h.adjoint()).frobenius_norm();
    if defect > TOL_HERM {
        return Err(HolonomyError::NotHermitian { point: point.to_vec(), defect });
    }
    let (p, r) = (h.0[0][0].re, h.0[1][1].re);
    let q = h.0[0][1];
    let mid = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
    if 2.0 * rad < gap_min {
        return Err(HolonomyError::DegenerateSpectrum { point: point.to_vec(), gap: 2.0 * rad });
    }
    let energies = [mid - rad, mid + rad];
    let (v0, v1) = (eigenvector(h, energies[0]), eigenvector(h, energies[1]));
    Ok(Eigenframe { energies, frame: Mat2::new(v0[0], v1[0], v0[1], v1[1]) })
}

fn frame_at<F: HamiltonianFamily + ?Sized>(fam: &F, x: &[f64], gap_min: f64) -> Result<Eigenframe, HolonomyError> {
    if x.len() != fam.dim() {
        return Err(HolonomyError::DimensionMismatch { expected: fam.dim(), got: x.len() });
    }
    eigenframe(&fam.evaluate(x), gap_min, x)
}

fn inner(u: [C64; 2], v: [C64; 2]) -> C64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

fn offset(x: &[f64], dir: &[f64], s: f64) -> Vec<f64> {
    x.iter().zip(dir).map(|(a, d)| a + s * d).collect()
}

/// Connection matrix `ω(v) = Σ v_μ ω_μ` along direction `dir`.
///
/// Diagonal entries come from central differences of the gauge-fixed
/// eigenvectors, off-diagonal ones from
/// `⟨k_n|∂k_m⟩ = ⟨k_n|∂h|k_m⟩ / (E_m − E_n)`.
pub fn connection_along<F: HamiltonianFamily + ?Sized>(
    fam: &F,
    x: &[f64],
    dir: &[f64],
    delta: f64,
) -> Result<Mat2, HolonomyError> {
    let here = frame_at(fam, x, GAP_MIN)?;
    let (xp, xm) = (offset(x, dir, delta), offset(x, dir, -delta));
    let plus = frame_at(fam, &xp, GAP_MIN)?;
    let minus = frame_at(fam, &xm, GAP_MIN)?;
    let dh = (fam.evaluate(&xp) - fam.evaluate(&xm)).scale(C64::new(0.5 / delta, 0.0));
    let mut w = Mat2::zero();
    for n in 0..2 {
        let k = here.vector(n);
        let (kp, km) = (plus.vector(n), minus.vector(n));
        let d = [(kp[0] - km[0]) / (2.0 * delta), (kp[1] - km[1]) / (2.0 * delta)];
        w.0[n][n] = inner(k, d);
    }
    for (n, m) in [(0, 1), (1, 0)] {
        let km = here.vector(m);
        let dhk = [dh.0[0][0] * km[0] + dh.0[0][1] * km[1], dh.0[1][0] * km[0] + dh.0[1][1] * km[1]];
        w.0[n][m] = inner(here.vector(n), dhk) / (here.energies[m] - here.energies[n]);
    }
    Ok(w)
}

/// Every entry of `ω(v)` by central differences of the eigenvectors; an
/// independent route to the off-diagonal entries of [`connection_along`].
pub fn connection_along_direct<F: HamiltonianFamily + ?Sized>(
    fam: &F,
    x: &[f64],
    dir: &[f64],
    delta: f64,
) -> Result<Mat2, HolonomyError> {
    let here = frame_at(fam, x, GAP_MIN)?;
    let plus = frame_at(fam, &offset(x, dir, delta), GAP_MIN)?;
    let minus = frame_at(fam, &offset(x, dir, -delta), GAP_MIN)?;
    let d = (plus.frame - minus.frame).scale(C64::new(0.5 / delta, 0.0));
    Ok(here.frame.adjoint() * d)
}

fn unit(dim: usize, mu: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[mu] = 1.0;
    e
}

/// Connection components at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionSample {
    pub point: Vec<f64>,
    /// `ω_μ` for each coordinate direction.
    pub omega: Vec<Mat2>,
    /// `‖∂₀ω₁ − ∂₁ω₀ + [ω₀, ω₁]‖₂` by finite differences (0 in one dimension).
    pub curvature_residual: f64,
}

impl ConnectionSample {
    /// Largest `‖ω_μ + ω_μ†‖₂`.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        self.omega.iter().map(|w| (*w + w.adjoint()).op_norm()).fold(0.0, f64::max)
    }
}

fn components<F: HamiltonianFamily + ?Sized>(fam: &F, x: &[f64], delta: f64) -> Result<Vec<Mat2>, HolonomyError> {
    (0..fam.dim()).map(|mu| connection_along(fam, x, &unit(fam.dim(), mu), delta)).collect()
}

/// Connection components at `x` and a finite-difference curvature check.
pub fn berry_connection<F: HamiltonianFamily + ?Sized>(
    fam: &F,
    x: &[f64],
    delta: f64,
) -> Result<ConnectionSample, HolonomyError> {
    let omega = components(fam, x, delta)?;
    let curvature_residual = if fam.dim() >= 2 {
        let eta = 10.0 * delta;
        let dim = fam.dim();
        let w1p = connection_along(fam, &offset(x, &unit(dim, 0), eta), &unit(dim, 1), delta)?;
        let w1m = connection_along(fam, &offset(x, &unit(dim, 0), -eta), &unit(dim, 1), delta)?;
        let w0p = connection_along(fam, &offset(x, &unit(dim, 1), eta), &unit(dim, 0), delta)?;
        let w0m = connection_along(fam, &offset(x, &unit(dim, 1), -eta), &unit(dim, 0), delta)?;
        let s = C64::new(0.5 / eta, 0.0);
        let d0w1 = (w1p - w1m).scale(s);
        let d1w0 = (w0p - w0m).scale(s);
        (d0w1 - d1w0 + omega[0] * omega[1] - omega[1] * omega[0]).op_norm()
    } else {
        0.0
    };
    Ok(ConnectionSample { point: x.to_vec(), omega, curvature_residual })
}

// ---------------------------------------------------------------------------
// loops

/// A closed polygonal path in parameter space.
///
/// Closure is checked against a family ([`Loop::is_closed_for`]), so loops
/// in periodic coordinates may end at a different coordinate value of the
/// same physical point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loop {
    points: Vec<Vec<f64>>,
}

impl Loop {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, HolonomyError> {
        if points.is_empty() {
            return Err(HolonomyError::EmptyLoop);
        }
        Ok(Loop { points })
    }

    /// The latitude `θ = theta` of the spin family, `steps` segments.
    pub fn latitude(theta: f64, steps: usize) -> Loop {
        let steps = steps.max(1);
        let points = (0..=steps).map(|k| vec![theta, 2.0 * PI * k as f64 / steps as f64]).collect();
        Loop { points }
    }

    pub fn equator(steps: usize) -> Loop {
        Loop::latitude(PI / 2.0, steps)
    }

    /// Counter-clockwise square of side `side` with corner `x` in the plane
    /// of coordinates 0 and 1, `per_side` segments per side.
    pub fn square(x: &[f64], side: f64, per_side: usize) -> Loop {
        let corners = [[0.0, 0.0], [side, 0.0], [side, side], [0.0, side], [0.0, 0.0]];
        let mut points = vec![x.to_vec()];
        for c in corners.windows(2) {
            for k in 1..=per_side {
                let t = k as f64 / per_side as f64;
                let mut p = x.to_vec();
                p[0] += c[0][0] + t * (c[1][0] - c[0][0]);
                p[1] += c[0][1] + t * (c[1][1] - c[0][1]);
                points.push(p);
            }
        }
        *points.last_mut().expect("nonempty") = x.to_vec();
        Loop { points }
    }

    /// Parse `x0,x1,...` lines; blank lines and `#` comments are skipped.
    pub fn from_csv(text: &str) -> Result<Loop, String> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| format!("line {}: {e}", i + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            points.push(p);
        }
        Loop::new(points).map_err(|e| e.to_string())
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Number of segments.
    pub fn refinement(&self) -> usize {
        self.points.len() - 1
    }

    pub fn max_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Split every segment into `k` equal pieces.
    pub fn refine(&self, k: usize) -> Loop {
        let k = k.max(1);
        let mut points = vec![self.points[0].clone()];
        for w in self.points.windows(2) {
            for j in 1..=k {
                let t = j as f64 / k as f64;
                if j == k {
                    points.push(w[1].clone());
                } else {
                    points.push(w[0].iter().zip(&w[1]).map(|(a, b)| a + t * (b - a)).collect());
                }
            }
        }
        Loop { points }
    }

    pub fn is_closed_for<F: HamiltonianFamily + ?Sized>(&self, fam: &F) -> bool {
        let (first, last) = (&self.points[0], &self.points[self.points.len() - 1]);
        first.len() == last.len() && (fam.evaluate(first) - fam.evaluate(last)).frobenius_norm() <= TOL_HERM
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransportMode {
    /// Product of polar-unitarized 2×2 overlap matrices.
    Full,
    /// Product of normalized diagonal overlaps of one band.
    Abelian(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Transport {
    Full(Mat2),
    Abelian(C64),
}

/// Discrete parallel transport of the eigenframe around `lp`.
pub fn loop_transport<F: HamiltonianFamily + ?Sized>(
    fam: &F,
    lp: &Loop,
    mode: TransportMode,
) -> Result<Transport, HolonomyError> {
    if let TransportMode::Abelian(n) = mode {
        if n > 1 {
            return Err(HolonomyError::InvalidBand(n));
        }
    }
    if !lp.is_closed_for(fam) {
        return Err(HolonomyError::OpenLoop);
    }
    let mut prev = frame_at(fam, &lp.points[0], GAP_MIN)?;
    let mut full = Mat2::identity();
    let mut phase = C64::new(1.0, 0.0);
    for p in &lp.points[1..] {
        let next = frame_at(fam, p, GAP_MIN)?;
        match mode {
            TransportMode::Full => full = full * (prev.frame.adjoint() * next.frame).polar_unitary(),
            TransportMode::Abelian(n) => {
                let o = inner(prev.vector(n), next.vector(n));
                phase *= o / o.norm();
            }
        }
        prev = next;
    }
    Ok(match mode {
        TransportMode::Full => Transport::Full(full),
        TransportMode::Abelian(_) => Transport::Abelian(phase),
    })
}

/// Exponential of a 2×2 anti-Hermitian matrix.
pub fn exp_anti_hermitian(w: &Mat2) -> Mat2 {
    let tr = w.trace() * 0.5;
    let traceless = *w - Mat2::identity().scale(tr);
    // a traceless anti-Hermitian 2×2 matrix is a pure quaternion
    let q = traceless.quaternion_part();
    let e = Quaternion::exp_pure([q.b, q.c, q.d]).to_matrix();
    e.scale(tr.exp())
}

fn plaquette_corners(x: &[f64], delta: f64) -> [Vec<f64>; 5] {
    let mut c = [x.to_vec(), x.to_vec(), x.to_vec(), x.to_vec(), x.to_vec()];
    c[1][0] += delta;
    c[2][0] += delta;
    c[2][1] += delta;
    c[3][1] += delta;
    c
}

fn fd_step(delta: f64) -> f64 {
    delta / 8.0
}

/// Holonomy of `ω` around the square plaquette of side `delta` at `x`
/// (coordinates 0 and 1, counter-clockwise), each edge transported by
/// `exp(ω(midpoint)·Δx)`.
pub fn plaquette_holonomy<F: HamiltonianFamily + ?Sized>(fam: &F, x: &[f64], delta: f64) -> Result<Mat2, HolonomyError> {
    if fam.dim() < 2 {
        return Err(HolonomyError::DimensionMismatch { expected: 2, got: fam.dim() });
    }
    let corners = plaquette_corners(x, delta);
    let mut hol = Mat2::identity();
    for w in corners.windows(2) {
        let step: Vec<f64> = w[1].iter().zip(&w[0]).map(|(b, a)| b - a).collect();
        let mid: Vec<f64> = w[0].iter().zip(&w[1]).map(|(a, b)| 0.5 * (a + b)).collect();
        let omega = connection_along(fam, &mid, &step, fd_step(delta) / delta)?;
        hol = hol * exp_anti_hermitian(&omega);
    }
    Ok(hol)
}

/// `‖plaquette holonomy − 1‖₂`.
pub fn plaquette_defect<F: HamiltonianFamily + ?Sized>(fam: &F, x: &[f64], delta: f64) -> Result<f64, HolonomyError> {
    Ok((plaquette_holonomy(fam, x, delta)? - Mat2::identity()).op_norm())
}

/// Curvature density estimate: plaquette defect divided by `delta²`.
pub fn flatness_residual<F: HamiltonianFamily + ?Sized>(fam: &F, x: &[f64], delta: f64) -> Result<f64, HolonomyError> {
    Ok(plaquette_defect(fam, x, delta)? / (delta * delta))
}

/// Phase angle of the single-band holonomy `exp(∮ ω_nn)` around the same
/// plaquette. For the spin ground state it approximates minus half the
/// enclosed solid angle.
pub fn abelian_plaquette_phase<F: HamiltonianFamily + ?Sized>(
    fam: &F,
    x: &[f64],
    delta: f64,
    band: usize,
) -> Result<f64, HolonomyError> {
    if band > 1 {
        return Err(HolonomyError::InvalidBand(band));
    }
    let corners = plaquette_corners(x, delta);
    let mut total = C64::new(0.0, 0.0);
    for w in corners.windows(2) {
        let step: Vec<f64> = w[1].iter().zip(&w[0]).map(|(b, a)| b - a).collect();
        let mid: Vec<f64> = w[0].iter().zip(&w[1]).map(|(a, b)| 0.5 * (a + b)).collect();
        total += connection_along(fam, &mid, &step, fd_step(delta) / delta)?.0[band][band];
    }
    Ok(total.im)
}

/// A U(2) element as `e^{iα}` times a rotation by `angle` about `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisAngle {
    pub phase: f64,
    pub axis: [f64; 3],
    pub angle: f64,
}

/// Split `u = e^{iα} q` with `q ∈ SU(2)`, `q = cos(angle/2) + sin(angle/2) n̂`.
pub fn axis_angle(u: &Mat2) -> AxisAngle {
    let d = u.det();
    let alpha = 0.5 * d.arg();
    let q = u.scale(C64::from_polar(1.0, -alpha)).quaternion_part();
    let v = q.vector();
    let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let angle = 2.0 * s.atan2(q.a);
    let axis = if s > 0.0 { [v[0] / s, v[1] / s, v[2] / s] } else { [0.0, 0.0, 1.0] };
    AxisAngle { phase: alpha, axis, angle }
}
