//! Dense complex matrices for an 8-dimensional Hilbert space and its
//! 64-dimensional Liouville space.
//!
//! Storage is row-major. Vectorization is row-major too:
//! `vec(rho)[i * d + j] = rho[i, j]`, so that `vec(A rho B) = (A ⊗ Bᵀ) vec(rho)`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// One of the three qubits of the ring, left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    L,
    M,
    R,
}

impl Site {
    pub const ALL: [Site; 3] = [Site::L, Site::M, Site::R];

    pub fn index(self) -> usize {
        match self {
            Site::L => 0,
            Site::M => 1,
            Site::R => 2,
        }
    }

    /// Bit position of this qubit in a computational-basis index
    /// (L is the most significant bit).
    pub fn bit(self) -> usize {
        2 - self.index()
    }

    pub fn label(self) -> char {
        match self {
            Site::L => 'L',
            Site::M => 'M',
            Site::R => 'R',
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Polarization axis of a Pauli matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn label(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Square complex matrix.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out[(i, i)] = ONE;
        }
        out
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut out = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                out.data[r * dim + c] = f(r, c);
            }
        }
        out
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut out = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            out[(i, i)] = C64::new(d, 0.0);
        }
        out
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::BadDim {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &[C64], bra: &[C64]) -> Self {
        assert_eq!(ket.len(), bra.len());
        Self::from_fn(ket.len(), |r, c| ket[r] * bra[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: C64, other: &Operator) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diag_re(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs()
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Row-vector product `v · self`.
    pub fn apply_left(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        let mut out = vec![ZERO; self.dim];
        for (r, row) in self.data.chunks_exact(self.dim).enumerate() {
            let vr = v[r];
            if vr == ZERO {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                *o += vr * a;
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    /// Expectation value `⟨v|self|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let av = self.apply(v);
        v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_fn(self.dim, self.dim, |r, c| self[(r, c)])
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for r in 0..n {
            let out_row = &mut out.data[r * n..(r + 1) * n];
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        let mut out = self.clone();
        out.add_scaled(-ONE, rhs);
        out
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale(-ONE)
    }
}

/// Kronecker product: `(a ⊗ b)[i*nb + k, j*nb + l] = a[i,j] * b[k,l]`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let nb = b.dim;
    let n = a.dim * nb;
    let mut out = Operator::zeros(n);
    for i in 0..a.dim {
        for j in 0..a.dim {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Single-qubit Pauli matrix, with `σ^z = diag(1, -1)`.
pub fn pauli(axis: Axis) -> Operator {
    let z = ZERO;
    let o = ONE;
    let data = match axis {
        Axis::X => vec![z, o, o, z],
        Axis::Y => vec![z, -I, I, z],
        Axis::Z => vec![o, z, z, -o],
    };
    Operator { dim: 2, data }
}

/// `σ^axis` acting on one qubit of the ring, identity elsewhere.
pub fn pauli_on_site(site: Site, axis: Axis) -> Operator {
    let id = Operator::identity(2);
    let factors: Vec<Operator> = Site::ALL
        .iter()
        .map(|&s| if s == site { pauli(axis) } else { id.clone() })
        .collect();
    kron(&kron(&factors[0], &factors[1]), &factors[2])
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: Operator,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V† A V`: the matrix of `a` in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &Operator) -> Operator {
        let v = &self.eigenvectors;
        &(&v.adjoint() * a) * v
    }

    /// `V A V†`: back from the eigenbasis.
    pub fn from_eigenbasis(&self, a: &Operator) -> Operator {
        let v = &self.eigenvectors;
        &(v * a) * &v.adjoint()
    }

    /// `V diag(f(ε)) V†`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Operator {
        let d: Vec<f64> = self.eigenvalues.iter().map(|&e| f(e)).collect();
        self.from_eigenbasis(&Operator::from_diag(&d))
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-13;
const HERMITIAN_REL_TOL: f64 = 1e-12;
const DEGENERACY_REL_TOL: f64 = 1e-10;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eig_hermitian(h: &Operator) -> Result<Spectrum> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_REL_TOL * h.max_abs() {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let n = h.dim;
    // symmetrize so the rotations see an exactly Hermitian matrix
    let mut a = Operator::from_fn(n, |r, c| 0.5 * (h[(r, c)] + h[(c, r)].conj()));
    let mut v = Operator::identity(n);
    let target = JACOBI_REL_TOL * a.frobenius();

    let off_norm = |a: &Operator| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += a[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 || mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let g00 = C64::new(c, 0.0);
                let g01 = C64::new(s, 0.0);
                let g10 = -phase.conj() * s;
                let g11 = phase.conj() * c;
                // A <- A G
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * g00 + arq * g10;
                    a[(r, q)] = arp * g01 + arq * g11;
                }
                // A <- G† A
                for col in 0..n {
                    let apc = a[(p, col)];
                    let aqc = a[(q, col)];
                    a[(p, col)] = g00.conj() * apc + g10.conj() * aqc;
                    a[(q, col)] = g01.conj() * apc + g11.conj() * aqc;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                // V <- V G
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * g00 + vrq * g10;
                    v[(r, q)] = vrp * g01 + vrq * g11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = a.diag_re();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut columns: Vec<Vec<C64>> = order.iter().map(|&k| v.column(k)).collect();

    let scale = eigenvalues
        .iter()
        .fold(0.0_f64, |m, e| m.max(e.abs()))
        .max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] <= DEGENERACY_REL_TOL * scale {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut columns[start..end]);
        }
        start = end;
    }

    let eigenvectors = Operator::from_fn(n, |r, c| columns[c][r]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Modified Gram–Schmidt, in place.
pub(crate) fn gram_schmidt(vectors: &mut [Vec<C64>]) {
    for k in 0..vectors.len() {
        for j in 0..k {
            let (done, rest) = vectors.split_at_mut(k);
            let proj: C64 = done[j]
                .iter()
                .zip(rest[0].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            for (x, y) in rest[0].iter_mut().zip(done[j].iter()) {
                *x -= proj * y;
            }
        }
        let norm = vectors[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in vectors[k].iter_mut() {
                *x /= norm;
            }
        }
    }
}

/// Reduced state of one qubit of a three-qubit density matrix.
pub fn partial_trace(rho: &Operator, keep: Site) -> Result<Operator> {
    if rho.dim != 8 {
        return Err(Error::BadDim {
            expected: 8,
            got: rho.dim,
        });
    }
    let bit = keep.bit();
    let mask = 1usize << bit;
    let mut out = Operator::zeros(2);
    for rest in 0..8usize {
        if rest & mask != 0 {
            continue;
        }
        for a in 0..2 {
            for b in 0..2 {
                let r = rest | (a << bit);
                let c = rest | (b << bit);
                out[(a, b)] += rho[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Row-major vectorization.
pub fn vectorize(rho: &Operator) -> Vec<C64> {
    rho.data.clone()
}

pub fn devectorize(v: &[C64]) -> Result<Operator> {
    let dim = (v.len() as f64).sqrt().round() as usize;
    Operator::from_rows(dim, v.to_vec())
}

/// Superoperator of `rho -> left * rho * right` acting on `vectorize(rho)`.
pub fn superop_of(left: &Operator, right: &Operator) -> Operator {
    kron(left, &right.transpose())
}

/// The row vector `t` with `t · vec(rho) = tr(rho)`.
pub fn trace_functional(dim: usize) -> Vec<C64> {
    let mut t = vec![ZERO; dim * dim];
    for i in 0..dim {
        t[i * dim + i] = ONE;
    }
    t
}
