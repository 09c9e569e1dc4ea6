//! Two-qubit spin algebra: Pauli operators, the singlet state and the CHSH
//! functional.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;

use crate::{Error, Result};

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;

/// Detector orientation on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(format!(
                "vector ({x}, {y}, {z}) has squared norm {n2}, expected 1"
            )));
        }
        Ok(UnitVector3 { x, y, z })
    }

    /// Normalizes any nonzero vector.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::validation("cannot normalize a zero or non-finite vector"));
        }
        UnitVector3::new(x / n, y / n, z / n)
    }

    /// Alice-side coplanar vector `a = (cos α, 0, sin α)`.
    pub fn coplanar_a(alpha: f64) -> Self {
        UnitVector3 { x: alpha.cos(), y: 0.0, z: alpha.sin() }
    }

    /// Bob-side coplanar vector `b = (−cos β, 0, −sin β)`, so that
    /// `−a·b = cos(α − β)`.
    pub fn coplanar_b(beta: f64) -> Self {
        UnitVector3 { x: -beta.cos(), y: 0.0, z: -beta.sin() }
    }

    /// Uniform on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        let r = (1.0 - z * z).sqrt();
        UnitVector3 { x: r * phi.cos(), y: r * phi.sin(), z }
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &UnitVector3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{rows}x{cols} = {} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    fn real(rows: usize, cols: usize, data: &[f64]) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("inner dimension {}", self.cols),
                got: format!("{}", other.rows),
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] =
                            a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && (self - &self.adjoint()).max_abs() <= tol
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("vector of length {}", self.cols),
                got: format!("{}", v.len()),
            });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect())
    }

    /// `⟨ψ|M|ψ⟩`.
    pub fn expectation(&self, psi: &[Complex64]) -> Result<Complex64> {
        let m_psi = self.apply(psi)?;
        Ok(psi.iter().zip(&m_psi).map(|(a, b)| a.conj() * b).sum())
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::validation("matrix is not Hermitian"));
        }
        let m = nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j));
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in subtraction");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in addition");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: f64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }
}

pub fn sigma_1() -> ComplexMatrix {
    ComplexMatrix::real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_2() -> ComplexMatrix {
    let i = Complex64::i();
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix { rows: 2, cols: 2, data: vec![z, -i, i, z] }
}

pub fn sigma_3() -> ComplexMatrix {
    ComplexMatrix::real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// `σ·a = a₁σ₁ + a₂σ₂ + a₃σ₃`.
pub fn pauli_dot(a: &UnitVector3) -> ComplexMatrix {
    let s = &(&(&sigma_1() * a.x) + &(&sigma_2() * a.y)) + &(&sigma_3() * a.z);
    debug_assert!(s.is_hermitian(HERMITIAN_TOL));
    s
}

/// `(1/√2)((0,1)ᵀ ⊗ (1,0)ᵀ − (1,0)ᵀ ⊗ (0,1)ᵀ) = (0, −1, 1, 0)/√2`.
pub fn singlet_state() -> [Complex64; 4] {
    let h = FRAC_1_SQRT_2;
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(-h, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(0.0, 0.0),
    ]
}

/// `⟨ψ_spin| σ·a ⊗ σ·b |ψ_spin⟩` by explicit 4×4 contraction; equals `−a·b`.
pub fn singlet_correlation(a: &UnitVector3, b: &UnitVector3) -> f64 {
    let op = pauli_dot(a).kron(&pauli_dot(b));
    op.expectation(&singlet_state())
        .expect("4x4 operator on a 4-vector")
        .re
}

/// `|P(a,b) − P(a,b')| + |P(a',b) + P(a',b')|`.
pub fn chsh_value<C>(
    a: &UnitVector3,
    a_prime: &UnitVector3,
    b: &UnitVector3,
    b_prime: &UnitVector3,
    correlator: C,
) -> f64
where
    C: Fn(&UnitVector3, &UnitVector3) -> f64,
{
    (correlator(a, b) - correlator(a, b_prime)).abs()
        + (correlator(a_prime, b) + correlator(a_prime, b_prime)).abs()
}

/// CHSH combination of a correlation table `p[i][j]` for two settings per side.
pub fn chsh_combination(p: [[f64; 2]; 2]) -> f64 {
    (p[0][0] - p[0][1]).abs() + (p[1][0] + p[1][1]).abs()
}

/// Measurement angles for the two sides, stored in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSet {
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl AngleSet {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() || betas.is_empty() {
            return Err(Error::validation("angle set needs at least one alpha and one beta"));
        }
        if alphas.iter().chain(&betas).any(|a| !a.is_finite()) {
            return Err(Error::validation("angles must be finite"));
        }
        let wrap = |v: Vec<f64>| {
            v.into_iter()
                .map(|a| {
                    let w = a.rem_euclid(2.0 * PI);
                    // rem_euclid can round up to exactly 2π for tiny negative input
                    if w >= 2.0 * PI { 0.0 } else { w }
                })
                .collect()
        };
        Ok(AngleSet { alphas: wrap(alphas), betas: wrap(betas) })
    }

    /// `α₁ = π/2, α₂ = 0, β₁ = π/4, β₂ = −π/4`, the maximally violating set.
    pub fn chsh_optimal() -> Self {
        AngleSet::new(vec![PI / 2.0, 0.0], vec![PI / 4.0, -PI / 4.0]).unwrap()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// `M(α) = [[sin α, cos α], [cos α, −sin α]]`, equal to `σ·a` for the
/// coplanar `a(α)`.
pub fn rotation_m(alpha: f64) -> ComplexMatrix {
    let (s, c) = alpha.sin_cos();
    ComplexMatrix::real(2, 2, &[s, c, c, -s])
}

/// `N(β) = [[−sin β, −cos β], [−cos β, sin β]]`, equal to `σ·b` for the
/// coplanar `b(β)`.
pub fn rotation_n(beta: f64) -> ComplexMatrix {
    let (s, c) = beta.sin_cos();
    ComplexMatrix::real(2, 2, &[-s, -c, -c, s])
}

/// `A_i = M(α_i) ⊗ I`.
pub fn alice_operator(alpha: f64) -> ComplexMatrix {
    rotation_m(alpha).kron(&ComplexMatrix::identity(2))
}

/// `B_j = I ⊗ N(β_j)`.
pub fn bob_operator(beta: f64) -> ComplexMatrix {
    ComplexMatrix::identity(2).kron(&rotation_n(beta))
}

/// `⟨ψ_spin| A_i B_j |ψ_spin⟩` for 1-based indices. Checks `[A_i, B_j] = 0`
/// before contracting; the result equals `cos(α_i − β_j)`.
pub fn pair_expectation(i: usize, j: usize, angles: &AngleSet) -> Result<f64> {
    let alpha = *angles
        .alphas
        .get(i.wrapping_sub(1))
        .ok_or(Error::IndexOutOfRange { index: i, len: angles.alphas.len() })?;
    let beta = *angles
        .betas
        .get(j.wrapping_sub(1))
        .ok_or(Error::IndexOutOfRange { index: j, len: angles.betas.len() })?;
    let a = alice_operator(alpha);
    let b = bob_operator(beta);
    let comm = a.commutator(&b)?.max_abs();
    if comm > HERMITIAN_TOL {
        return Err(Error::Numerical {
            message: format!("[A_{i}, B_{j}] does not vanish"),
            estimate: comm,
            tolerance: HERMITIAN_TOL,
        });
    }
    Ok(a.matmul(&b)?.expectation(&singlet_state())?.re)
}
