//! Dependency-light exact 3x3 linear algebra.
//!
//! Everything a finite-strain constitutive law needs from a matrix library,
//! specialized to dimension three: determinants, cofactors, inverses,
//! symmetric/skew splits, principal invariants, closed-form symmetric
//! eigendecomposition and the heat-flux orientation sign `s(B, K)`.

use std::ops::{Add, AddAssign, Deref, Div, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Operations reject deformation gradients closer to singular than this.
pub const MIN_DET: f64 = 1e-12;

/// Default relative eigenvalue-separation deadband for [`heat_signature`].
///
/// `s(B, K)` is discontinuous at eigenvalue collisions; a documented deadband
/// keeps randomized tests deterministic.
pub const DEFAULT_DISTINCTNESS_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Vec3
// ---------------------------------------------------------------------------

/// A vector in R^3 (temperature gradients, heat fluxes).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        let a = &self.0;
        let b = &other.0;
        Vec3([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    pub fn normalized(&self) -> Vec3 {
        let n = self.norm();
        Vec3([self.0[0] / n, self.0[1] / n, self.0[2] / n])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self * -1.0
    }
}

// ---------------------------------------------------------------------------
// Mat3
// ---------------------------------------------------------------------------

/// A general 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn identity() -> Mat3 {
        Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn from_rows(r0: [f64; 3], r1: [f64; 3], r2: [f64; 3]) -> Mat3 {
        Mat3([r0, r1, r2])
    }

    pub fn from_diag(d0: f64, d1: f64, d2: f64) -> Mat3 {
        Mat3([[d0, 0.0, 0.0], [0.0, d1, 0.0], [0.0, 0.0, d2]])
    }

    /// Columns-to-matrix constructor (used by the eigen solver).
    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Mat3 {
        Mat3([
            [c0[0], c1[0], c2[0]],
            [c0[1], c1[1], c2[1]],
            [c0[2], c1[2], c2[2]],
        ])
    }

    /// Outer product `a b^T`.
    pub fn outer(a: &Vec3, b: &Vec3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = a[i] * b[j];
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3(self.0[i])
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Frobenius inner product `A : B`.
    pub fn ddot(&self, other: &Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[i][j];
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    /// Inverse via the cofactor formula. The caller is responsible for
    /// invertibility; entries become non-finite for singular input.
    pub fn inverse(&self) -> Mat3 {
        let d = self.det();
        cofactor(self).transpose() * (1.0 / d)
    }

    /// Removes the spherical part: `M - (tr M / 3) I`.
    pub fn deviatoric(&self) -> Mat3 {
        let t = self.trace() / 3.0;
        let mut m = *self;
        for i in 0..3 {
            m.0[i][i] -= t;
        }
        m
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        Vec3([
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|r| r.iter().all(|x| x.is_finite()))
    }

    pub fn to_flat(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
        ]
    }

    pub fn from_flat(a: &[f64]) -> Mat3 {
        assert!(a.len() >= 9, "need 9 entries for a 3x3 matrix");
        Mat3([[a[0], a[1], a[2]], [a[3], a[4], a[5]], [a[6], a[7], a[8]]])
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] + o.0[i][j];
            }
        }
        m
    }
}

impl AddAssign for Mat3 {
    fn add_assign(&mut self, o: Mat3) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += o.0[i][j];
            }
        }
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, o: Mat3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] - o.0[i][j];
            }
        }
        m
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += self.0[i][k] * o.0[k][j];
                }
                m.0[i][j] = s;
            }
        }
        m
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] *= s;
            }
        }
        m
    }
}

impl Div<f64> for Mat3 {
    type Output = Mat3;
    fn div(self, s: f64) -> Mat3 {
        self * (1.0 / s)
    }
}

impl Neg for Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        self * -1.0
    }
}

// ---------------------------------------------------------------------------
// Sym3
// ---------------------------------------------------------------------------

/// A symmetric 3x3 matrix, stored as its six independent entries.
///
/// Symmetry is enforced by the storage layout. Frobenius products count
/// off-diagonal entries twice, as for the full matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym3 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub yz: f64,
    pub zx: f64,
}

impl Sym3 {
    pub const ZERO: Sym3 = Sym3 {
        xx: 0.0,
        yy: 0.0,
        zz: 0.0,
        xy: 0.0,
        yz: 0.0,
        zx: 0.0,
    };

    pub fn identity() -> Sym3 {
        Sym3 {
            xx: 1.0,
            yy: 1.0,
            zz: 1.0,
            ..Sym3::ZERO
        }
    }

    pub fn from_diag(d0: f64, d1: f64, d2: f64) -> Sym3 {
        Sym3 {
            xx: d0,
            yy: d1,
            zz: d2,
            ..Sym3::ZERO
        }
    }

    /// Symmetrizes a general matrix: `(M + M^T) / 2`.
    pub fn from_mat_symmetrized(m: &Mat3) -> Sym3 {
        Sym3 {
            xx: m.0[0][0],
            yy: m.0[1][1],
            zz: m.0[2][2],
            xy: 0.5 * (m.0[0][1] + m.0[1][0]),
            yz: 0.5 * (m.0[1][2] + m.0[2][1]),
            zx: 0.5 * (m.0[2][0] + m.0[0][2]),
        }
    }

    pub fn to_mat(&self) -> Mat3 {
        Mat3([
            [self.xx, self.xy, self.zx],
            [self.xy, self.yy, self.yz],
            [self.zx, self.yz, self.zz],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    /// Frobenius inner product of the full matrices.
    pub fn ddot(&self, o: &Sym3) -> f64 {
        self.xx * o.xx
            + self.yy * o.yy
            + self.zz * o.zz
            + 2.0 * (self.xy * o.xy + self.yz * o.yz + self.zx * o.zx)
    }

    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        self.to_mat().mul_vec(v)
    }

    /// Packs the six independent entries as `[xx, yy, zz, xy, yz, zx]`.
    pub fn to_array(&self) -> [f64; 6] {
        [self.xx, self.yy, self.zz, self.xy, self.yz, self.zx]
    }

    pub fn from_array(a: &[f64]) -> Sym3 {
        assert!(a.len() >= 6, "need 6 entries for a symmetric 3x3 matrix");
        Sym3 {
            xx: a[0],
            yy: a[1],
            zz: a[2],
            xy: a[3],
            yz: a[4],
            zx: a[5],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

impl Add for Sym3 {
    type Output = Sym3;
    fn add(self, o: Sym3) -> Sym3 {
        Sym3 {
            xx: self.xx + o.xx,
            yy: self.yy + o.yy,
            zz: self.zz + o.zz,
            xy: self.xy + o.xy,
            yz: self.yz + o.yz,
            zx: self.zx + o.zx,
        }
    }
}

impl Sub for Sym3 {
    type Output = Sym3;
    fn sub(self, o: Sym3) -> Sym3 {
        self + o * -1.0
    }
}

impl Mul<f64> for Sym3 {
    type Output = Sym3;
    fn mul(self, s: f64) -> Sym3 {
        Sym3 {
            xx: self.xx * s,
            yy: self.yy * s,
            zz: self.zz * s,
            xy: self.xy * s,
            yz: self.yz * s,
            zx: self.zx * s,
        }
    }
}

// ---------------------------------------------------------------------------
// DefGrad
// ---------------------------------------------------------------------------

/// A deformation gradient: a 3x3 matrix with strictly positive determinant.
///
/// Construction checks `det > MIN_DET`; the open set of orientation-preserving
/// matrices is never extrapolated past.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefGrad(Mat3);

impl DefGrad {
    pub fn new(m: Mat3) -> Result<DefGrad> {
        let d = m.det();
        if !(d > MIN_DET) {
            return Err(Error::NonPositiveDeterminant(d));
        }
        Ok(DefGrad(m))
    }

    /// Skips the determinant check. For internal use where positivity is
    /// structurally guaranteed (e.g. tiny finite-difference perturbations of
    /// an already-valid gradient).
    pub fn new_unchecked(m: Mat3) -> DefGrad {
        DefGrad(m)
    }

    pub fn identity() -> DefGrad {
        DefGrad(Mat3::identity())
    }

    pub fn from_diag(d0: f64, d1: f64, d2: f64) -> Result<DefGrad> {
        DefGrad::new(Mat3::from_diag(d0, d1, d2))
    }

    pub fn as_mat(&self) -> &Mat3 {
        &self.0
    }

    /// Right Cauchy-Green tensor `C = F^T F`.
    pub fn right_cauchy_green(&self) -> Sym3 {
        Sym3::from_mat_symmetrized(&(self.0.transpose() * self.0))
    }

    /// Left Cauchy-Green tensor `B = F F^T`.
    pub fn left_cauchy_green(&self) -> Sym3 {
        Sym3::from_mat_symmetrized(&(self.0 * self.0.transpose()))
    }
}

impl Deref for DefGrad {
    type Target = Mat3;
    fn deref(&self) -> &Mat3 {
        &self.0
    }
}

// ---------------------------------------------------------------------------
// Free operations
// ---------------------------------------------------------------------------

/// Splits `M` into its symmetric part (the stretching tensor when `M` is a
/// velocity gradient) and skew part (the spin tensor): `M = sym + skew`.
pub fn sym_skew(m: &Mat3) -> (Sym3, Mat3) {
    let sym = Sym3::from_mat_symmetrized(m);
    let skew = (*m - m.transpose()) * 0.5;
    (sym, skew)
}

/// Cofactor matrix: `(cof F)_ij` is the signed 2x2 minor obtained by deleting
/// row `i` and column `j`. For invertible `F`, `cof F = det(F) F^{-T}`.
/// Defined for singular input as well.
pub fn cofactor(f: &Mat3) -> Mat3 {
    let m = &f.0;
    Mat3([
        [
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            m[1][2] * m[2][0] - m[1][0] * m[2][2],
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
        ],
        [
            m[0][2] * m[2][1] - m[0][1] * m[2][2],
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            m[0][1] * m[2][0] - m[0][0] * m[2][1],
        ],
        [
            m[0][1] * m[1][2] - m[0][2] * m[1][1],
            m[0][2] * m[1][0] - m[0][0] * m[1][2],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        ],
    ])
}

/// Principal invariants `(tr B, tr(cof B), det B)` of a symmetric matrix.
pub fn principal_invariants(b: &Sym3) -> (f64, f64, f64) {
    let m = b.to_mat();
    (m.trace(), cofactor(&m).trace(), m.det())
}

/// Eigendecomposition of a symmetric 3x3 matrix.
///
/// Returns eigenvalues in ascending order and the matrix whose columns are
/// the corresponding unit eigenvectors, forming a right-handed basis
/// (determinant +1; the third column's sign is flipped when needed).
///
/// Closed-form path: trigonometric (Cardano) eigenvalues plus cross-product
/// eigenvectors. Near-degenerate spectra fall back to cyclic Jacobi
/// rotations, which handle repeated eigenvalues robustly.
pub fn sym_eigen(b: &Sym3) -> ([f64; 3], Mat3) {
    let scale = b.norm().max(1e-300);
    let evals = cardano_eigenvalues(b);
    let gap = (evals[1] - evals[0]).min(evals[2] - evals[1]);
    let (mut vals, mut vecs) = if gap > 1e-3 * scale {
        (evals, eigenvectors_cross(b, &evals))
    } else {
        jacobi_eigen(b)
    };

    // Sort ascending (Jacobi does not order its output).
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let sorted_vals = [vals[idx[0]], vals[idx[1]], vals[idx[2]]];
    let sorted_vecs = Mat3::from_cols(vecs.col(idx[0]), vecs.col(idx[1]), vecs.col(idx[2]));
    vals = sorted_vals;
    vecs = sorted_vecs;

    // Right-handedness: flip the third eigenvector if det < 0.
    if vecs.det() < 0.0 {
        for i in 0..3 {
            vecs.0[i][2] = -vecs.0[i][2];
        }
    }
    (vals, vecs)
}

/// Eigenvalues of a symmetric 3x3 matrix by the scale-invariant trigonometric
/// form of Cardano's method, ascending.
fn cardano_eigenvalues(a: &Sym3) -> [f64; 3] {
    let q = a.trace() / 3.0;
    let p1 = a.xy * a.xy + a.yz * a.yz + a.zx * a.zx;
    if p1 == 0.0 {
        let mut d = [a.xx, a.yy, a.zz];
        d.sort_by(|x, y| x.partial_cmp(y).unwrap());
        return d;
    }
    let p2 = (a.xx - q).powi(2) + (a.yy - q).powi(2) + (a.zz - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut bm = a.to_mat();
    for i in 0..3 {
        bm.0[i][i] -= q;
    }
    let r = (bm.det() / 2.0 / (p * p * p)).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e3 = q + 2.0 * p * phi.cos();
    let e1 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let e2 = 3.0 * q - e1 - e3;
    [e1, e2, e3]
}

/// Eigenvectors for well-separated eigenvalues: the eigenspace of `lambda` is
/// the null space of `B - lambda I`, recovered as the largest cross product
/// of two of its rows. The basis is re-orthogonalized and completed by a
/// cross product, then eigenvalues are polished by Rayleigh quotients.
fn eigenvectors_cross(b: &Sym3, evals: &[f64; 3]) -> Mat3 {
    let bm = b.to_mat();
    let null_vector = |lambda: f64| -> Vec3 {
        let mut m = bm;
        for i in 0..3 {
            m.0[i][i] -= lambda;
        }
        let r0 = m.row(0);
        let r1 = m.row(1);
        let r2 = m.row(2);
        let c01 = r0.cross(&r1);
        let c02 = r0.cross(&r2);
        let c12 = r1.cross(&r2);
        let mut best = c01;
        if c02.norm() > best.norm() {
            best = c02;
        }
        if c12.norm() > best.norm() {
            best = c12;
        }
        best.normalized()
    };

    let v0 = null_vector(evals[0]);
    let mut v1 = null_vector(evals[1]);
    v1 = (v1 - v0 * v0.dot(&v1)).normalized();
    let v2 = v0.cross(&v1);
    Mat3::from_cols(v0, v1, v2)
}

/// Cyclic Jacobi rotations; unconditionally robust, used for near-degenerate
/// spectra. Returns unordered eigenvalues and eigenvector columns.
fn jacobi_eigen(b: &Sym3) -> ([f64; 3], Mat3) {
    let mut a = b.to_mat();
    let mut v = Mat3::identity();
    for _ in 0..50 {
        let off = a.0[0][1] * a.0[0][1] + a.0[0][2] * a.0[0][2] + a.0[1][2] * a.0[1][2];
        if off < 1e-34 * (1.0 + a.norm() * a.norm()) {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a.0[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a.0[q][q] - a.0[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A <- J^T A J with the (p,q) Givens rotation J.
            let mut j = Mat3::identity();
            j.0[p][p] = c;
            j.0[q][q] = c;
            j.0[p][q] = s;
            j.0[q][p] = -s;
            a = j.transpose() * a * j;
            a.0[p][q] = 0.0;
            a.0[q][p] = 0.0;
            v = v * j;
        }
    }
    ([a.0[0][0], a.0[1][1], a.0[2][2]], v)
}

/// Orientation sign `s(B, K)` of a vector relative to the eigenframe of a
/// symmetric positive definite matrix.
///
/// When the three eigenvalues of `B` are pairwise separated by more than
/// `distinctness_tol * ||B||`, returns `sign(prod_i K . v_i)` over the
/// right-handed ascending eigenbasis, with `sign(0) = 0`. Returns `0`
/// otherwise. The value is independent of the admissible basis choice.
pub fn heat_signature(b: &Sym3, k: &Vec3, distinctness_tol: f64) -> Result<i8> {
    let (vals, vecs) = sym_eigen(b);
    if vals[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let scale = b.norm();
    if vals[1] - vals[0] <= distinctness_tol * scale
        || vals[2] - vals[1] <= distinctness_tol * scale
    {
        return Ok(0);
    }
    let p = k.dot(&vecs.col(0)) * k.dot(&vecs.col(1)) * k.dot(&vecs.col(2));
    Ok(if p > 0.0 {
        1
    } else if p < 0.0 {
        -1
    } else {
        0
    })
}
