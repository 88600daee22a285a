//! Small dense numeric kernel: quaternions, 2×2 and 4×4 complex matrices,
//! SL(2,ℤ) integer matrices, Kronecker products and the Hermitian
//! exponential.
//!
//! Unit quaternions are identified with SU(2) through the basis
//!
//! ```text
//!   1 = [[1, 0], [0, 1]]     i = [[i, 0], [0, -i]]
//!   j = [[0, 1], [-1, 0]]    k = [[0, i], [i, 0]]
//! ```
//!
//! so that `a + bi + cj + dk` becomes `[[z, w], [-conj(w), conj(z)]]` with
//! `z = a + bi`, `w = c + di`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Tolerance on input normalization checks (unit quaternions).
pub const TOL_NORM: f64 = 1e-9;
/// Tolerance on input Hermiticity checks.
pub const TOL_HERM: f64 = 1e-9;
/// Tolerance on unitarity of produced matrices.
pub const TOL_UNITARY: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("quaternion is not unit: |q| = {0}")]
    NotUnit(f64),
    #[error("matrix is not Hermitian: max |H - H^dagger| = {0}")]
    NotHermitian(f64),
    #[error("matrix is not in SU(2): defect {0}")]
    NotSpecialUnitary(f64),
    #[error("integer overflow in SL(2,Z) product")]
    Overflow,
}

// ---------------------------------------------------------------------------
// Quaternion

/// Real quaternion `a + b i + c j + d k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[f64; 4]> for Quaternion {
    fn from(v: [f64; 4]) -> Self {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        [q.a, q.b, q.c, q.d]
    }
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion { a: 1.0, b: 0.0, c: 0.0, d: 0.0 };
    pub const I: Quaternion = Quaternion { a: 0.0, b: 1.0, c: 0.0, d: 0.0 };
    pub const J: Quaternion = Quaternion { a: 0.0, b: 0.0, c: 1.0, d: 0.0 };
    pub const K: Quaternion = Quaternion { a: 0.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    /// Pure quaternion with vector part `v`.
    pub const fn pure(v: [f64; 3]) -> Self {
        Quaternion::new(0.0, v[0], v[1], v[2])
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.b, self.c, self.d]
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Euclidean inner product on ℝ⁴.
    pub fn dot(&self, other: &Quaternion) -> f64 {
        self.a * other.a + self.b * other.b + self.c * other.c + self.d * other.d
    }

    pub fn scale(&self, s: f64) -> Self {
        Quaternion::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn inverse(&self) -> Self {
        self.conj().scale(1.0 / self.norm_sqr())
    }

    pub fn normalized(&self) -> Self {
        self.scale(1.0 / self.norm())
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.a.abs() <= tol
    }

    /// `exp(v)` for the pure quaternion with vector part `v`.
    pub fn exp_pure(v: [f64; 3]) -> Self {
        let theta = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if theta == 0.0 {
            return Quaternion::ONE;
        }
        let s = theta.sin() / theta;
        Quaternion::new(theta.cos(), v[0] * s, v[1] * s, v[2] * s)
    }

    /// `cos(angle) + sin(angle) * axis` for a unit pure axis.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let s = angle.sin() / n;
        Quaternion::new(angle.cos(), axis[0] * s, axis[1] * s, axis[2] * s)
    }

    /// The matrix `a·1 + b·i + c·j + d·k` without any normalization check.
    pub fn to_matrix(&self) -> Mat2 {
        let z = C64::new(self.a, self.b);
        let w = C64::new(self.c, self.d);
        Mat2([[z, w], [-w.conj(), z.conj()]])
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product.
    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self.a + q.a, self.b + q.b, self.c + q.c, self.d + q.d)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self.a - q.a, self.b - q.b, self.c - q.c, self.d - q.d)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

/// Unit quaternion to its SU(2) matrix.
pub fn quat_to_su2(q: Quaternion) -> Result<Mat2, AlgebraError> {
    if !q.is_unit(TOL_NORM) {
        return Err(AlgebraError::NotUnit(q.norm()));
    }
    Ok(q.to_matrix())
}

/// Inverse of [`quat_to_su2`]; fails if `m` is not special unitary.
pub fn su2_to_quat(m: &Mat2) -> Result<Quaternion, AlgebraError> {
    let defect = m.su2_defect();
    if defect > TOL_UNITARY.max(TOL_NORM) {
        return Err(AlgebraError::NotSpecialUnitary(defect));
    }
    Ok(m.quaternion_part())
}

// ---------------------------------------------------------------------------
// 2×2 complex matrices

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2(pub [[C64; 2]; 2]);

/// SU(2) / U(2) element. Unitarity is a runtime property, checked where it matters.
pub type UnitaryMatrix2 = Mat2;

impl Mat2 {
    pub const fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Mat2([[m00, m01], [m10, m11]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn diag(d0: C64, d1: C64) -> Self {
        Mat2([[d0, ZERO], [ZERO, d1]])
    }

    pub const fn pauli_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub const fn pauli_y() -> Self {
        Mat2([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]])
    }

    pub const fn pauli_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]])
    }

    /// Quaternion basis matrix `i = diag(i, -i)`.
    pub const fn basis_i() -> Self {
        Mat2([[I, ZERO], [ZERO, C64::new(0.0, -1.0)]])
    }

    /// Quaternion basis matrix `j = [[0, 1], [-1, 0]]`.
    pub const fn basis_j() -> Self {
        Mat2([[ZERO, ONE], [C64::new(-1.0, 0.0), ZERO]])
    }

    /// Quaternion basis matrix `k = [[0, i], [i, 0]]`.
    pub const fn basis_k() -> Self {
        Mat2([[ZERO, I], [I, ZERO]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Spectral (operator 2-) norm: the largest singular value.
    pub fn op_norm(&self) -> f64 {
        let g = self.adjoint() * *self;
        let p = g.0[0][0].re;
        let r = g.0[1][1].re;
        let q = g.0[0][1];
        let mid = 0.5 * (p + r);
        let half = 0.5 * (p - r);
        (mid + (half * half + q.norm_sqr()).sqrt()).max(0.0).sqrt()
    }

    /// `‖U†U − 1‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::identity()).frobenius_norm()
    }

    /// Combined SU(2) defect: unitarity plus `|det − 1|`.
    pub fn su2_defect(&self) -> f64 {
        self.unitarity_defect() + (self.det() - ONE).norm()
    }

    pub fn is_special_unitary(&self, tol: f64) -> bool {
        self.su2_defect() <= tol
    }

    /// Read `(a, b, c, d)` from the first row, assuming SU(2) structure.
    pub fn quaternion_part(&self) -> Quaternion {
        let z = self.0[0][0];
        let w = self.0[0][1];
        Quaternion::new(z.re, z.im, w.re, w.im)
    }

    /// Inverse assuming the matrix is unitary.
    pub fn unitary_inverse(&self) -> Self {
        self.adjoint()
    }

    /// Unitary factor `W` of the polar decomposition `M = W P`.
    ///
    /// For invertible 2×2 `M` with singular values `s1, s2`,
    /// `M + |det M| (M⁻¹)† = (s1 + s2) W`.
    pub fn polar_unitary(&self) -> Self {
        let m = &self.0;
        let d = self.det();
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        // e^{iφ} adj(M)† with adj(M) = [[m11, -m01], [-m10, m00]]
        let adj_dag = Mat2([[m[1][1].conj(), -m[1][0].conj()], [-m[0][1].conj(), m[0][0].conj()]]);
        let n = *self + adj_dag.scale(phase);
        let s = (self.frobenius_norm().powi(2) + 2.0 * d.norm()).sqrt();
        n.scale(C64::new(1.0 / s, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut out = self;
        for (r, orow) in out.0.iter_mut().zip(o.0.iter()) {
            for (x, y) in r.iter_mut().zip(orow.iter()) {
                *x += *y;
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Projective distance on SU(2): `min(‖u − v‖₂, ‖u + v‖₂)`.
pub fn distance(u: &Mat2, v: &Mat2) -> f64 {
    (*u - *v).op_norm().min((*u + *v).op_norm())
}

// ---------------------------------------------------------------------------
// SL(2,ℤ)

/// 2×2 integer matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntMatrix2(pub [[i64; 2]; 2]);

impl IntMatrix2 {
    pub const IDENTITY: IntMatrix2 = IntMatrix2([[1, 0], [0, 1]]);

    pub fn det(&self) -> i64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn is_sl2z(&self) -> bool {
        self.det() == 1
    }

    /// Inverse of an SL(2,ℤ) element.
    pub fn sl2_inverse(&self) -> IntMatrix2 {
        let m = &self.0;
        IntMatrix2([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    pub fn neg(&self) -> IntMatrix2 {
        let m = &self.0;
        IntMatrix2([[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]])
    }

    pub fn checked_mul(&self, o: &IntMatrix2) -> Result<IntMatrix2, AlgebraError> {
        let a = &self.0;
        let b = &o.0;
        let entry = |i: usize, j: usize| -> Result<i64, AlgebraError> {
            a[i][0]
                .checked_mul(b[0][j])
                .and_then(|x| a[i][1].checked_mul(b[1][j]).and_then(|y| x.checked_add(y)))
                .ok_or(AlgebraError::Overflow)
        };
        Ok(IntMatrix2([[entry(0, 0)?, entry(0, 1)?], [entry(1, 0)?, entry(1, 1)?]]))
    }
}

// ---------------------------------------------------------------------------
// 4×4 complex matrices

/// Dense 4×4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat4(pub [[C64; 4]; 4]);

pub type UnitaryMatrix4 = Mat4;
pub type HermitianMatrix4 = Mat4;

impl Mat4 {
    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Mat4(m)
    }

    pub const fn zero() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn adjoint(&self) -> Self {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.0[j][i].conj();
            }
        }
        Mat4(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|x| *x *= s);
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    /// `‖U†U − 1‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat4::identity()).frobenius_norm()
    }

    pub fn column(&self, j: usize) -> [C64; 4] {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }

    /// Matrix power series `Σ_{n ≤ order} (X)^n / n!`; intended as a test oracle.
    pub fn exp_series(&self, order: usize) -> Mat4 {
        let mut term = Mat4::identity();
        let mut sum = Mat4::identity();
        for n in 1..=order {
            term = (term * *self).scale(C64::new(1.0 / n as f64, 0.0));
            sum = sum + term;
        }
        sum
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, o: Mat4) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat4(out)
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, o: Mat4) -> Mat4 {
        let mut out = self;
        for (x, y) in out.0.iter_mut().flatten().zip(o.0.iter().flatten()) {
            *x += *y;
        }
        out
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, o: Mat4) -> Mat4 {
        let mut out = self;
        for (x, y) in out.0.iter_mut().flatten().zip(o.0.iter().flatten()) {
            *x -= *y;
        }
        out
    }
}

/// Kronecker product; `(u ⊗ v)[2i + k][2j + l] = u[i][j] · v[k][l]`.
pub fn tensor(u: &Mat2, v: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = u.0[i][j] * v.0[k][l];
                }
            }
        }
    }
    Mat4(out)
}

/// Eigen-decomposition of a Hermitian 4×4 matrix by cyclic complex Jacobi
/// rotations. Returns ascending eigenvalues and the unitary whose columns
/// are the matching eigenvectors.
pub fn hermitian_eigen(h: &Mat4) -> Result<([f64; 4], Mat4), AlgebraError> {
    let defect = h.hermiticity_defect();
    if defect > TOL_HERM {
        return Err(AlgebraError::NotHermitian(defect));
    }
    // symmetrize away sub-tolerance asymmetry
    let mut a = (*h + h.adjoint()).scale(C64::new(0.5, 0.0));
    let mut v = Mat4::identity();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let off: f64 = (0..4)
            .flat_map(|p| ((p + 1)..4).map(move |q| (p, q)))
            .map(|(p, q)| a.0[p][q].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a.0[p][q];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let phase = apq / b;
                let theta = 0.5 * (2.0 * b).atan2(a.0[q][q].re - a.0[p][p].re);
                let (s, c) = theta.sin_cos();
                let mut rot = Mat4::identity();
                rot.0[p][p] = C64::new(c, 0.0);
                rot.0[p][q] = C64::new(s, 0.0);
                rot.0[q][p] = -phase.conj() * s;
                rot.0[q][q] = phase.conj() * c;
                a = rot.adjoint() * a * rot;
                v = v * rot;
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
    let mut values = [0.0; 4];
    let mut vectors = Mat4::zero();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = a.0[src][src].re;
        for r in 0..4 {
            vectors.0[r][dst] = v.0[r][src];
        }
    }
    Ok((values, vectors))
}

/// `exp(i t H)` for Hermitian `H`, via spectral decomposition.
pub fn herm_exp(h: &Mat4, t: f64) -> Result<Mat4, AlgebraError> {
    let (values, vectors) = hermitian_eigen(h)?;
    let mut phased = vectors;
    for (j, &lambda) in values.iter().enumerate() {
        let e = C64::from_polar(1.0, t * lambda);
        for r in 0..4 {
            phased.0[r][j] *= e;
        }
    }
    Ok(phased * vectors.adjoint())
}
