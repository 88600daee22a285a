//! SU(2) representations of finitely presented groups.
//!
//! A [`Representation`] stores one SU(2) image per generator together with
//! its relator residual, the largest operator-norm distance `‖φ(r) − 1‖`
//! over all relators. Constructions here (the rotation family, the
//! Fibonacci representation, the numeric solver) are all checked through
//! that single number.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, IntMatrix2, Mat2, Quaternion, C64};
use crate::fpgroup::{Presentation, Word};

/// Default validity threshold on the relator residual.
pub const TOL_REP: f64 = 1e-10;

#[derive(Debug, Error, Clone)]
pub enum RepError {
    #[error("no image given for generator {0:?}")]
    MissingGeneratorImage(String),
    #[error("image of generator {name:?} is not in SU(2) (defect {defect:e})")]
    NotSpecialUnitary { name: String, defect: f64 },
    #[error("rotation-family parameters infeasible at theta = {theta}: {reason}")]
    InfeasibleParams { theta: f64, reason: String },
    #[error("solver stopped at residual {:e} above tolerance", best.residual())]
    NoConvergence { best: Box<Representation> },
    #[error("solver supports at most 4 generators, presentation has {0}")]
    TooManyGenerators(usize),
    #[error("operation needs a 2-generator presentation, got {0}")]
    NotTwoGenerator(usize),
    #[error("letter {0} is not a 3-strand braid generator")]
    NotBraidWord(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Product of generator images along `w`, left to right. Inverse letters use
/// the adjoint, so images are assumed unitary.
pub fn evaluate_word(images: &[Mat2], w: &Word) -> Mat2 {
    w.letters().iter().fold(Mat2::identity(), |acc, l| {
        let m = images[l.gen];
        acc * if l.inv { m.adjoint() } else { m }
    })
}

/// `max_r ‖φ(r) − 1‖₂`; zero for a presentation without relators.
pub fn relator_residual(p: &Presentation, images: &[Mat2]) -> f64 {
    p.relators()
        .iter()
        .map(|r| (evaluate_word(images, r) - Mat2::identity()).op_norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    name: Option<String>,
    presentation: Presentation,
    images: Vec<Mat2>,
    residual: f64,
}

impl Representation {
    /// Images in generator order. Every image must lie in SU(2).
    pub fn new(presentation: Presentation, images: Vec<Mat2>) -> Result<Self, RepError> {
        if images.len() < presentation.generator_count() {
            let missing = presentation.generators()[images.len()].clone();
            return Err(RepError::MissingGeneratorImage(missing));
        }
        for (name, m) in presentation.generators().iter().zip(&images) {
            let defect = m.su2_defect();
            if defect > 1e-9 {
                return Err(RepError::NotSpecialUnitary { name: name.clone(), defect });
            }
        }
        let residual = relator_residual(&presentation, &images);
        Ok(Representation { name: None, presentation, images, residual })
    }

    pub fn from_named(presentation: Presentation, images: &BTreeMap<String, Mat2>) -> Result<Self, RepError> {
        let ordered = presentation
            .generators()
            .iter()
            .map(|g| images.get(g).copied().ok_or_else(|| RepError::MissingGeneratorImage(g.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Representation::new(presentation, ordered)
    }

    pub fn from_quaternions(presentation: Presentation, qs: &[Quaternion]) -> Result<Self, RepError> {
        Representation::new(presentation, qs.iter().map(Quaternion::to_matrix).collect())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn images(&self) -> &[Mat2] {
        &self.images
    }

    pub fn image(&self, g: usize) -> Mat2 {
        self.images[g]
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.residual <= tol
    }

    pub fn evaluate(&self, w: &Word) -> Mat2 {
        evaluate_word(&self.images, w)
    }

    pub fn quaternions(&self) -> Vec<Quaternion> {
        self.images.iter().map(Mat2::quaternion_part).collect()
    }

    /// Conjugate every image by `g`: `φ(x) ↦ g φ(x) g⁻¹`.
    pub fn conjugate(&self, g: &Mat2) -> Representation {
        let images: Vec<Mat2> = self.images.iter().map(|m| *g * *m * g.adjoint()).collect();
        let residual = relator_residual(&self.presentation, &images);
        Representation { name: self.name.clone(), presentation: self.presentation.clone(), images, residual }
    }

    /// `‖[φ(a), φ(b)] − 1‖` for the first two generators.
    pub fn commutator_defect(&self) -> f64 {
        let (a, b) = (self.images[0], self.images[1]);
        (a * b * a.adjoint() * b.adjoint() - Mat2::identity()).op_norm()
    }

    /// Trace coordinates `(tr φ(a), tr φ(b), tr φ(ab))`.
    pub fn character_point(&self) -> Result<CharacterPoint, RepError> {
        if self.images.len() != 2 {
            return Err(RepError::NotTwoGenerator(self.images.len()));
        }
        let (a, b) = (self.images[0], self.images[1]);
        Ok(CharacterPoint { x: a.trace().re, y: b.trace().re, z: (a * b).trace().re, residual: self.residual })
    }
}

/// Recompute the relator residual from scratch.
pub fn verify(rep: &Representation) -> Result<f64, RepError> {
    if rep.images.len() < rep.presentation.generator_count() {
        return Err(RepError::MissingGeneratorImage(rep.presentation.generators()[rep.images.len()].clone()));
    }
    Ok(relator_residual(&rep.presentation, &rep.images))
}

#[derive(Serialize, Deserialize)]
struct RepJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    presentation: Presentation,
    images: BTreeMap<String, Mat2>,
    #[serde(default)]
    residual: f64,
}

impl Serialize for Representation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RepJson {
            name: self.name.clone(),
            presentation: self.presentation.clone(),
            images: self.presentation.generators().iter().cloned().zip(self.images.iter().copied()).collect(),
            residual: self.residual,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Representation {
    /// The stored residual is ignored and recomputed.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RepJson::deserialize(d)?;
        let rep = Representation::from_named(raw.presentation, &raw.images).map_err(serde::de::Error::custom)?;
        Ok(match raw.name {
            Some(n) => rep.with_name(n),
            None => rep,
        })
    }
}

// ---------------------------------------------------------------------------
// B₃ constructions

/// `⟨a, b | bab = aba⟩`.
pub fn b3_presentation() -> Presentation {
    Presentation::parse(2, &["babABA"]).expect("static relator")
}

/// Parameters of the rotation family `G = exp(θ i)`, `H = F G F†`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KLParams {
    pub theta: f64,
    pub c: f64,
    pub s: f64,
}

impl KLParams {
    /// Principal branch `c, s ≥ 0` of `c² + s² = 1`, `c² − s² = (a² − b²)/(2b²)`.
    pub fn from_theta(theta: f64) -> Result<Self, RepError> {
        Self::with_branch(theta, false, false)
    }

    /// Same as [`KLParams::from_theta`] with the signs of `c` and/or `s` flipped.
    pub fn with_branch(theta: f64, negate_c: bool, negate_s: bool) -> Result<Self, RepError> {
        let target = Self::required_difference(theta)?;
        let mut c = (0.5 * (1.0 + target)).max(0.0).sqrt();
        let mut s = (0.5 * (1.0 - target)).max(0.0).sqrt();
        if negate_c {
            c = -c;
        }
        if negate_s {
            s = -s;
        }
        Ok(KLParams { theta, c, s })
    }

    /// `(a² − b²) / (2b²)` with `a = cos θ`, `b = sin θ`; errors when it
    /// leaves `[-1, 1]` (no real `c, s`).
    pub fn required_difference(theta: f64) -> Result<f64, RepError> {
        let (b, a) = theta.sin_cos();
        if b.abs() < 1e-12 {
            return Err(RepError::InfeasibleParams { theta, reason: "sin(theta) = 0".into() });
        }
        let target = (a * a - b * b) / (2.0 * b * b);
        if target.abs() > 1.0 + TOL_REP {
            return Err(RepError::InfeasibleParams { theta, reason: format!("|c^2 - s^2| = {target:.6} > 1") });
        }
        Ok(target.clamp(-1.0, 1.0))
    }

    /// Violation of the two defining equations.
    pub fn feasibility_defect(&self) -> f64 {
        let (b, a) = self.theta.sin_cos();
        let norm = (self.c * self.c + self.s * self.s - 1.0).abs();
        if b == 0.0 {
            return f64::INFINITY;
        }
        let diff = (self.c * self.c - self.s * self.s - (a * a - b * b) / (2.0 * b * b)).abs();
        norm.max(diff)
    }

    /// Diagnostic for the condition `bu·bv = a² − 1/2`, reading `·` as the
    /// dot product of the vector parts of `g − a` and `h − a`.
    pub fn dot_condition_defect(&self) -> f64 {
        let (b, a) = self.theta.sin_cos();
        let u = [1.0, 0.0, 0.0];
        let v = [self.c * self.c - self.s * self.s, 0.0, 2.0 * self.c * self.s];
        let dot: f64 = u.iter().zip(&v).map(|(x, y)| b * x * b * y).sum();
        (dot - (a * a - 0.5)).abs()
    }
}

/// The rotation family: `σ₁ ↦ diag(e^{iθ}, e^{-iθ})`, `σ₂ ↦ F G F†` with
/// `F = [[ic, is], [is, -ic]]`.
pub fn kl_family(p: &KLParams) -> Result<Representation, RepError> {
    let defect = p.feasibility_defect();
    if !(defect <= TOL_REP) {
        return Err(RepError::InfeasibleParams { theta: p.theta, reason: format!("constraint defect {defect:e}") });
    }
    let g = Mat2::diag(C64::from_polar(1.0, p.theta), C64::from_polar(1.0, -p.theta));
    let i = C64::new(0.0, 1.0);
    let f = Mat2::new(i * p.c, i * p.s, i * p.s, -i * p.c);
    let h = f * g * f.adjoint();
    Ok(Representation::new(b3_presentation(), vec![g, h])?.with_name(format!("kl(theta={})", p.theta)))
}

/// Positive root of `τ² + τ = 1`.
pub fn golden_tau() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// The Fibonacci representation: `g = e^{7πi/10}`, `f = iτ + k√τ`,
/// `h = f g f⁻¹`.
pub fn fibonacci_rep() -> Representation {
    let tau = golden_tau();
    let theta = 7.0 * PI / 10.0;
    let g = Quaternion::new(theta.cos(), theta.sin(), 0.0, 0.0);
    let f = Quaternion::new(0.0, tau, 0.0, tau.sqrt());
    let h = f * g * f.inverse();
    Representation::from_quaternions(b3_presentation(), &[g, h.normalized()])
        .expect("unit quaternions")
        .with_name("fibonacci")
}

/// The trivial representation of `p`.
pub fn trivial_rep(p: &Presentation) -> Representation {
    Representation::new(p.clone(), vec![Mat2::identity(); p.generator_count()]).expect("identity images").with_name("trivial")
}

// ---------------------------------------------------------------------------
// SL(2, Z)

/// `σ₁ ↦ [[1, 1], [0, 1]]`, `σ₂ ↦ [[1, 0], [-1, 1]]`.
pub const MODULAR_GENERATORS: [IntMatrix2; 2] = [IntMatrix2([[1, 1], [0, 1]]), IntMatrix2([[1, 0], [-1, 1]])];

/// Image of a braid word in SL(2,ℤ).
///
/// Braid words act right to left: the image of `w₁ w₂ … wₙ` is
/// `M(wₙ) ⋯ M(w₂) M(w₁)`. With this convention `σ₁σ₂σ₁ ↦ S` and
/// `σ₁σ₂ ↦ U = [[1, 1], [-1, 0]]`, and `image(uv) = image(v) · image(u)`.
pub fn modular_image(w: &Word) -> Result<IntMatrix2, RepError> {
    let mut acc = IntMatrix2::IDENTITY;
    for l in w.letters() {
        let m = MODULAR_GENERATORS.get(l.gen).ok_or_else(|| RepError::NotBraidWord(l.to_string()))?;
        let m = if l.inv { m.sl2_inverse() } else { *m };
        acc = m.checked_mul(&acc)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// numeric solver

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Stop when the gradient norm falls below this.
    pub grad_tol: f64,
    /// Residual threshold for success.
    pub tol_rep: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_iter: 500, grad_tol: 1e-12, tol_rep: TOL_REP }
    }
}

/// Haar-random unit quaternion.
pub fn haar_quaternion<R: rand::Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let q = Quaternion::from(v);
        let n = q.norm();
        if n > 1e-8 {
            return q.scale(1.0 / n);
        }
    }
}

/// Residual vector (4 entries per relator) and Jacobian (row-major,
/// `3 · generators` columns) for right-multiplicative perturbations
/// `q ↦ q · exp(δ)`.
fn residuals_and_jacobian(p: &Presentation, qs: &[Quaternion]) -> (Vec<f64>, Vec<f64>) {
    let n = 3 * qs.len();
    let rows = 4 * p.relators().len();
    let mut res = vec![0.0; rows];
    let mut jac = vec![0.0; rows * n];
    let basis = [Quaternion::I, Quaternion::J, Quaternion::K];
    for (ri, r) in p.relators().iter().enumerate() {
        let factors: Vec<Quaternion> = r.letters().iter().map(|l| if l.inv { qs[l.gen].conj() } else { qs[l.gen] }).collect();
        let m = factors.len();
        let mut prefix = vec![Quaternion::ONE; m + 1];
        for t in 0..m {
            prefix[t + 1] = prefix[t] * factors[t];
        }
        let mut suffix = vec![Quaternion::ONE; m + 1];
        for t in (0..m).rev() {
            suffix[t] = factors[t] * suffix[t + 1];
        }
        let prod = prefix[m] - Quaternion::ONE;
        res[4 * ri..4 * ri + 4].copy_from_slice(&<[f64; 4]>::from(prod));
        for (t, l) in r.letters().iter().enumerate() {
            for (e_idx, e) in basis.iter().enumerate() {
                // d(q e) = q e; d(conj(q e)) = -e q̄
                let dx = if l.inv { -(*e * factors[t]) } else { factors[t] * *e };
                let d: [f64; 4] = (prefix[t] * dx * suffix[t + 1]).into();
                let col = 3 * l.gen + e_idx;
                for (k, v) in d.iter().enumerate() {
                    jac[(4 * ri + k) * n + col] += v;
                }
            }
        }
    }
    (res, jac)
}

/// Solve the symmetric positive definite system `a x = b` (row-major `a`).
fn solve_spd(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    // Cholesky, lower triangle in place
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Some(b)
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Damped Gauss–Newton (Levenberg–Marquardt) on the summed squared relator
/// residuals, starting from `start`. Rejected steps raise the damping and
/// are retried, which acts as the backtracking line search.
pub fn solve_from(p: &Presentation, start: &[Quaternion], opts: &SolveOptions) -> Result<Representation, RepError> {
    let ngen = p.generator_count();
    if ngen > 4 {
        return Err(RepError::TooManyGenerators(ngen));
    }
    let mut qs: Vec<Quaternion> = start.iter().map(Quaternion::normalized).collect();
    if qs.len() < ngen {
        return Err(RepError::MissingGeneratorImage(p.generators()[qs.len()].clone()));
    }
    qs.truncate(ngen);
    let n = 3 * ngen;
    let mut lambda = 1e-3;
    let (mut res, mut jac) = residuals_and_jacobian(p, &qs);
    let mut cost = sum_sq(&res);

    'outer: for _ in 0..opts.max_iter {
        if cost == 0.0 {
            break;
        }
        let rows = res.len();
        let mut grad = vec![0.0; n];
        let mut normal = vec![0.0; n * n];
        for r in 0..rows {
            let row = &jac[r * n..(r + 1) * n];
            for i in 0..n {
                grad[i] += row[i] * res[r];
                for j in 0..n {
                    normal[i * n + j] += row[i] * row[j];
                }
            }
        }
        if sum_sq(&grad).sqrt() <= opts.grad_tol {
            break;
        }
        loop {
            let mut damped = normal.clone();
            for i in 0..n {
                damped[i * n + i] += lambda * (1.0 + normal[i * n + i]);
            }
            let step = match solve_spd(damped, grad.iter().map(|g| -g).collect()) {
                Some(s) => s,
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<Quaternion> = qs
                .iter()
                .enumerate()
                .map(|(g, q)| (*q * Quaternion::exp_pure([step[3 * g], step[3 * g + 1], step[3 * g + 2]])).normalized())
                .collect();
            let (tres, tjac) = residuals_and_jacobian(p, &trial);
            let tcost = sum_sq(&tres);
            if tcost < cost {
                qs = trial;
                res = tres;
                jac = tjac;
                cost = tcost;
                lambda = (lambda / 3.0).max(1e-12);
                break;
            }
            lambda *= 4.0;
            if lambda > 1e12 {
                break 'outer;
            }
        }
    }

    let rep = Representation::from_quaternions(p.clone(), &qs)?;
    if rep.residual() <= opts.tol_rep {
        Ok(rep)
    } else {
        Err(RepError::NoConvergence { best: Box::new(rep) })
    }
}

/// [`solve_from`] from a Haar-random start drawn from `seed`.
pub fn rep_solve(p: &Presentation, seed: u64, opts: &SolveOptions) -> Result<Representation, RepError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<Quaternion> = (0..p.generator_count()).map(|_| haar_quaternion(&mut rng)).collect();
    solve_from(p, &start, opts)
}

/// Outcome of one seed in a multi-start run.
#[derive(Debug, Clone, Serialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub residual: f64,
    pub accepted: bool,
}

/// Run [`rep_solve`] over `seeds` in parallel. Returns the accepted
/// representation with the lowest residual (ties broken by seed order) and
/// the per-seed log; `accept` filters valid results (e.g. non-abelian).
pub fn rep_solve_multi<F>(
    p: &Presentation,
    seeds: &[u64],
    opts: &SolveOptions,
    accept: F,
) -> (Option<(u64, Representation)>, Vec<SeedOutcome>)
where
    F: Fn(&Representation) -> bool + Sync,
{
    let results: Vec<(u64, Result<Representation, RepError>)> =
        seeds.par_iter().map(|&s| (s, rep_solve(p, s, opts))).collect();
    let mut best: Option<(u64, Representation)> = None;
    let mut log = Vec::with_capacity(results.len());
    for (seed, r) in results {
        match r {
            Ok(rep) => {
                let ok = accept(&rep);
                log.push(SeedOutcome { seed, residual: rep.residual(), accepted: ok });
                let better = best.as_ref().is_none_or(|(_, b)| rep.residual() < b.residual());
                if ok && better {
                    best = Some((seed, rep));
                }
            }
            Err(RepError::NoConvergence { best: attempt }) => {
                log.push(SeedOutcome { seed, residual: attempt.residual(), accepted: false });
            }
            Err(_) => log.push(SeedOutcome { seed, residual: f64::INFINITY, accepted: false }),
        }
    }
    (best, log)
}

// ---------------------------------------------------------------------------
// character variety sampling

/// Trace coordinates of a 2-generator representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacterPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub residual: f64,
}

/// Structured starting grid: `φ(a) = exp(α i)`,
/// `φ(b) = exp(β (cos γ i + sin γ j))` with `α, β, γ` on `steps` equally
/// spaced values in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub steps: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid { steps: 6 }
    }
}

impl ScanGrid {
    pub fn starts(&self) -> Vec<[Quaternion; 2]> {
        let n = self.steps.max(1);
        let angle = |k: usize| if n == 1 { 0.0 } else { PI * k as f64 / (n - 1) as f64 };
        let mut out = Vec::with_capacity(n * n * n);
        for ia in 0..n {
            for ib in 0..n {
                for ig in 0..n {
                    let (alpha, beta, gamma) = (angle(ia), angle(ib), angle(ig));
                    let a = Quaternion::exp_pure([alpha, 0.0, 0.0]);
                    let b = Quaternion::exp_pure([beta * gamma.cos(), beta * gamma.sin(), 0.0]);
                    out.push([a, b]);
                }
            }
        }
        out
    }
}

pub const CHARACTER_DEDUP_TOL: f64 = 1e-6;

/// Solve from every grid start and collect distinct character points of the
/// valid results, sorted by `(x, y, z)`.
pub fn character_scan(p: &Presentation, grid: &ScanGrid, opts: &SolveOptions) -> Result<Vec<CharacterPoint>, RepError> {
    if p.generator_count() != 2 {
        return Err(RepError::NotTwoGenerator(p.generator_count()));
    }
    let mut points: Vec<CharacterPoint> = grid
        .starts()
        .par_iter()
        .filter_map(|start| solve_from(p, start, opts).ok())
        .map(|rep| rep.character_point().expect("two generators"))
        .collect();
    points.sort_by(|u, v| {
        u.x.total_cmp(&v.x).then(u.y.total_cmp(&v.y)).then(u.z.total_cmp(&v.z)).then(u.residual.total_cmp(&v.residual))
    });
    let mut kept: Vec<CharacterPoint> = Vec::new();
    for pt in points {
        let dup = kept.iter().any(|k| {
            (k.x - pt.x).abs() <= CHARACTER_DEDUP_TOL
                && (k.y - pt.y).abs() <= CHARACTER_DEDUP_TOL
                && (k.z - pt.z).abs() <= CHARACTER_DEDUP_TOL
        });
        if !dup {
            kept.push(pt);
        }
    }
    Ok(kept)
}
