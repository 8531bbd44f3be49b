//! Dense real matrix core.
//!
//! A row-major `f64` matrix with the handful of operations the rest of the
//! crate is built on: arithmetic, Kronecker and block Kronecker products,
//! base-`n` digit index manipulation, integer powers, and eigenvalues of
//! real (possibly nonsymmetric) matrices.
//!
//! Everything here is an immutable value after construction; operations are
//! pure functions. Storage is `data[i * cols + j] = A[i, j]`, indices are
//! 0-based throughout.
//!
//! The *block Kronecker product* `B ⊙ C` is the Kronecker product composed
//! with a cyclic left rotation of the row index's base-`n` digits:
//! `(B ⊙ C)[p, q] = (B ⊗ C)[σᵗ(p), q]` where `C` is `nᵗ × nᵗ` and `σ`
//! rotates the digit string one place to the left. It is the algebra behind
//! the block Kronecker consensus construction in [`crate::strategies`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Caps;

mod eigen;
mod io;

pub use io::{read_matrix_text, write_matrix_text};

/// Comparison tolerance for matrix identities, scaled by `max(1, ‖·‖∞)`.
pub const CMP_TOL: f64 = 1e-9;

/// A dense real matrix in row-major order.
///
/// Invariants: `data.len() == rows * cols`, `rows ≥ 1`, `cols ≥ 1`, and all
/// entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Creates a matrix from row-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dim(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Size(format!("{rows}x{cols} overflows")))?;
        if data.len() != len {
            return Err(Error::Dim(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite entry {bad}")));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from nested row slices. Panics on ragged input.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        assert!(!rows.is_empty(), "at least one row required");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data).expect("from_rows: invalid entries")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be non-empty");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// The matrix with every entry equal to `value`.
    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows >= 1 && cols >= 1 && value.is_finite());
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dim(format!(
                "vector length {} does not match {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dim(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn trace(&self) -> f64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Operator ∞-norm: maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sum of squared entries, `Tr(AᵀA)`.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Frobenius inner product `Tr(AᵀB)`.
    pub fn frobenius_dot(&self, other: &Matrix) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dim("frobenius_dot: shape mismatch".into()));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// Entrywise comparison within `tol` scaled by `max(1, ‖self‖∞)`.
    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        let scale = self.norm_inf().max(1.0);
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| (a - b).abs() <= tol * scale)
    }

    /// Whether `AᵀA = AAᵀ` within the given entrywise tolerance.
    pub fn is_normal(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let t = self.transpose();
        let ata = t.matmul(self).unwrap();
        let aat = self.matmul(&t).unwrap();
        ata.sub(&aat).unwrap().max_abs() <= tol
    }

    /// Number of entries with magnitude above `zero_tol` in row `i`.
    pub fn row_nonzeros(&self, i: usize, zero_tol: f64) -> usize {
        self.row(i).iter().filter(|v| v.abs() > zero_tol).count()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        sums
    }

    /// Whether every entry is ≥ `-tol`.
    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.data.iter().all(|v| *v >= -tol)
    }
}

/// Kronecker product `a ⊗ b` with the default entry cap.
pub fn kron(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    kron_with_caps(a, b, &Caps::default())
}

/// Kronecker product `a ⊗ b`.
///
/// Entry `(i·b.rows + p, j·b.cols + q)` of the result is `a[i,j] · b[p,q]`.
pub fn kron_with_caps(a: &Matrix, b: &Matrix, caps: &Caps) -> Result<Matrix> {
    let rows = a
        .rows
        .checked_mul(b.rows)
        .ok_or_else(|| Error::Size("kron: row count overflows".into()))?;
    let cols = a
        .cols
        .checked_mul(b.cols)
        .ok_or_else(|| Error::Size("kron: column count overflows".into()))?;
    let entries = rows
        .checked_mul(cols)
        .filter(|e| *e <= caps.max_product_entries)
        .ok_or_else(|| {
            Error::Size(format!(
                "kron: {rows}x{cols} exceeds the {} entry cap",
                caps.max_product_entries
            ))
        })?;
    let mut data = vec![0.0; entries];
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            if aij == 0.0 {
                continue;
            }
            for p in 0..b.rows {
                let out_row = (i * b.rows + p) * cols + j * b.cols;
                let src = b.row(p);
                for (q, v) in src.iter().enumerate() {
                    data[out_row + q] = aij * v;
                }
            }
        }
    }
    Matrix::new(rows, cols, data)
}

/// Kronecker product of a list of square matrices, left to right.
///
/// An empty list yields the `1 × 1` identity (the empty product).
pub fn kron_list(ms: &[&Matrix]) -> Result<Matrix> {
    let mut acc = Matrix::identity(1);
    for m in ms {
        acc = kron(&acc, m)?;
    }
    Ok(acc)
}

/// An index in `{0, …, n^k − 1}` viewed as `k` base-`n` digits.
///
/// Digits are most-significant first: `value = Σ dᵢ · n^(width−1−i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitIndex {
    value: usize,
    base: usize,
    width: usize,
}

impl DigitIndex {
    pub fn new(value: usize, base: usize, width: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::Domain(format!("digit base must be ≥ 2, got {base}")));
        }
        if width == 0 {
            return Err(Error::Domain("digit width must be ≥ 1".into()));
        }
        let cap = checked_pow(base, width)
            .ok_or_else(|| Error::Size(format!("{base}^{width} overflows")))?;
        if value >= cap {
            return Err(Error::Domain(format!(
                "value {value} not below {base}^{width}"
            )));
        }
        Ok(DigitIndex { value, base, width })
    }

    pub fn value(&self) -> usize {
        self.value
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// The digit string, most significant first.
    pub fn digits(&self) -> Vec<usize> {
        let mut out = vec![0; self.width];
        let mut v = self.value;
        for d in out.iter_mut().rev() {
            *d = v % self.base;
            v /= self.base;
        }
        out
    }

    /// Rotates the digit string left by `shift` places.
    ///
    /// `shift` must be strictly less than the width; larger shifts are
    /// rejected rather than wrapped.
    pub fn rotate_left(&self, shift: usize) -> Result<DigitIndex> {
        if shift >= self.width {
            return Err(Error::Domain(format!(
                "shift {shift} must be below digit width {}",
                self.width
            )));
        }
        let value = rotate_digits_left(self.value, shift, self.width, self.base);
        Ok(DigitIndex {
            value,
            base: self.base,
            width: self.width,
        })
    }
}

/// [`DigitIndex::rotate_left`] as a free function.
pub fn digit_rotate_left(p: DigitIndex, shift: usize) -> Result<DigitIndex> {
    p.rotate_left(shift)
}

/// Unchecked digit rotation on a raw index. `shift < width` required.
fn rotate_digits_left(value: usize, shift: usize, width: usize, base: usize) -> usize {
    // Splitting (d₀…d_{s-1} | d_s…d_{w-1}) and swapping the halves is the
    // whole rotation: low · base^shift + high.
    let low_width = width - shift;
    let modulus = base.pow(low_width as u32);
    let high = value / modulus;
    let low = value % modulus;
    low * base.pow(shift as u32) + high
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Exponent `e` with `base^e == dim`, if one exists.
fn exact_log(dim: usize, base: usize) -> Option<usize> {
    let mut e = 0;
    let mut acc: usize = 1;
    while acc < dim {
        acc = acc.checked_mul(base)?;
        e += 1;
    }
    (acc == dim).then_some(e)
}

/// Block Kronecker product `b ⊙ c` with the default entry cap.
pub fn block_kron(b: &Matrix, c: &Matrix, n: usize) -> Result<Matrix> {
    block_kron_with_caps(b, c, n, &Caps::default())
}

/// Block Kronecker product `b ⊙ c` over base `n`.
///
/// Both factors must be square with dimensions `n^u` and `n^t`. The result
/// is `n^(u+t)` square with `(b ⊙ c)[p, q] = (b ⊗ c)[σᵗ(p), q]`, where `σᵗ`
/// rotates the `u+t` base-`n` digits of `p` left by `t` places.
pub fn block_kron_with_caps(b: &Matrix, c: &Matrix, n: usize, caps: &Caps) -> Result<Matrix> {
    if n < 2 {
        return Err(Error::Domain(format!("block base must be ≥ 2, got {n}")));
    }
    if !b.is_square() || !c.is_square() {
        return Err(Error::Domain(
            "block Kronecker factors must be square".into(),
        ));
    }
    let u = exact_log(b.rows, n)
        .ok_or_else(|| Error::Domain(format!("{} is not a power of {n}", b.rows)))?;
    let t = exact_log(c.rows, n)
        .ok_or_else(|| Error::Domain(format!("{} is not a power of {n}", c.rows)))?;
    let plain = kron_with_caps(b, c, caps)?;
    let width = u + t;
    if width == 0 {
        // 1x1 ⊙ 1x1
        return Ok(plain);
    }
    let dim = plain.rows;
    let mut out = Matrix::zeros(dim, dim);
    for p in 0..dim {
        let src = if t == 0 {
            p
        } else {
            rotate_digits_left(p, t, width, n)
        };
        out.data[p * dim..(p + 1) * dim].copy_from_slice(plain.row(src));
    }
    Ok(out)
}

/// `m^t` by repeated squaring; `m⁰ = I`.
pub fn mat_pow(m: &Matrix, t: usize) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::Dim("mat_pow: matrix must be square".into()));
    }
    let mut result = Matrix::identity(m.rows);
    let mut base = m.clone();
    let mut e = t;
    while e > 0 {
        if e & 1 == 1 {
            result = result.matmul(&base)?;
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base)?;
        }
    }
    Ok(result)
}

/// Full eigenvalue set of a real square matrix.
///
/// `residual` is `max ‖Av − λv‖₂ / ‖v‖₂` over the computed eigenpairs.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub residual: f64,
}

impl Spectrum {
    /// Moduli of all eigenvalues.
    pub fn moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.norm()).collect()
    }

    /// Sum of eigenvalues (equals the trace up to roundoff).
    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }
}

/// All eigenvalues of `m`, with the default dimension cap.
pub fn eigenvalues(m: &Matrix) -> Result<Spectrum> {
    eigenvalues_with_caps(m, &Caps::default())
}

/// All eigenvalues of `m` as complex numbers.
///
/// Balances the matrix, reduces to Hessenberg form with Householder
/// reflections, and runs Francis double-shift QR with a budget of 100
/// iterations per eigenvalue. Non-convergence returns
/// [`Error::EigenNonConvergence`] carrying the eigenvalues found so far.
pub fn eigenvalues_with_caps(m: &Matrix, caps: &Caps) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::Dim("eigenvalues: matrix must be square".into()));
    }
    if m.rows > caps.max_eigen_dim {
        return Err(Error::Size(format!(
            "eigensolve dimension {} exceeds the cap {}",
            m.rows, caps.max_eigen_dim
        )));
    }
    eigen::solve(m)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn matrix_rejects_bad_input() {
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::new(0, 2, vec![]).is_err());
        assert!(Matrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(Matrix::new(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn matmul_and_transpose() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let ab = a.matmul(&b).unwrap();
        assert_eq!(ab, Matrix::from_rows(&[&[2.0, 1.0], &[4.0, 3.0]]));
        assert_eq!(a.transpose().get(0, 1), 3.0);
        assert!(a.matmul(&Matrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn kron_identity_case() {
        let i2 = Matrix::identity(2);
        let i3 = Matrix::identity(3);
        let k = kron(&i2, &i3).unwrap();
        assert!(k.approx_eq(&Matrix::identity(6), 0.0));
    }

    // Direct expansion of the definitional formula, worked by hand.
    #[test]
    fn kron_hand_expanded() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let expect = Matrix::from_rows(&[
            &[0.0, 1.0, 0.0, 2.0],
            &[1.0, 0.0, 2.0, 0.0],
            &[0.0, 3.0, 0.0, 4.0],
            &[3.0, 0.0, 4.0, 0.0],
        ]);
        assert_eq!(kron(&a, &b).unwrap(), expect);
    }

    #[test]
    fn kron_trace_multiplies() {
        let mut rng = crate::rng::seeded(7);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 3, 3);
            let b = random_matrix(&mut rng, 3, 3);
            let k = kron(&a, &b).unwrap();
            assert!(approx(k.trace(), a.trace() * b.trace(), 1e-10));
        }
    }

    #[test]
    fn kron_respects_cap() {
        let caps = Caps {
            max_product_entries: 8,
            ..Caps::default()
        };
        let a = Matrix::identity(2);
        let b = Matrix::identity(3);
        assert!(matches!(kron_with_caps(&a, &b, &caps), Err(Error::Size(_))));
    }

    pub(crate) fn random_matrix(rng: &mut impl rand::Rng, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols)
            .map(|_| rng.random::<f64>() * 1.6 - 0.8)
            .collect();
        Matrix::new(rows, cols, data).unwrap()
    }

    // σ(A ⊗ B) is the multiset of all pairwise eigenvalue products.
    #[test]
    fn kron_eigenvalue_products() {
        let mut rng = crate::rng::seeded(19);
        for (da, db) in [(2usize, 3usize), (3, 3), (4, 2), (5, 3)] {
            let a = random_matrix(&mut rng, da, da);
            let b = random_matrix(&mut rng, db, db);
            let sa = eigenvalues(&a).unwrap().eigenvalues;
            let sb = eigenvalues(&b).unwrap().eigenvalues;
            let products: Vec<_> = sa
                .iter()
                .flat_map(|x| sb.iter().map(move |y| x * y))
                .collect();
            let skron = eigenvalues(&kron(&a, &b).unwrap()).unwrap().eigenvalues;
            assert!(
                crate::spectral::multisets_match(&products, &skron, 1e-7),
                "eigenvalue products mismatch at {da}x{da} ⊗ {db}x{db}"
            );
        }
    }

    // Mixed product: (A·B) ⊗ (C·D) = (A ⊗ C)(B ⊗ D), rectangular shapes included.
    #[test]
    fn kron_mixed_product() {
        let mut rng = crate::rng::seeded(11);
        for _ in 0..15 {
            let a = random_matrix(&mut rng, 2, 3);
            let b = random_matrix(&mut rng, 3, 2);
            let c = random_matrix(&mut rng, 2, 2);
            let d = random_matrix(&mut rng, 2, 4);
            let lhs = kron(&a.matmul(&b).unwrap(), &c.matmul(&d).unwrap()).unwrap();
            let rhs = kron(&a, &c)
                .unwrap()
                .matmul(&kron(&b, &d).unwrap())
                .unwrap();
            assert!(lhs.approx_eq(&rhs, 1e-10));
        }
    }

    #[test]
    fn digit_index_basics() {
        // 5 = (1,2) in base 3; one left rotation gives (2,1) = 7.
        let p = DigitIndex::new(5, 3, 2).unwrap();
        assert_eq!(p.digits(), vec![1, 2]);
        assert_eq!(p.rotate_left(1).unwrap().value(), 7);
        assert_eq!(p.rotate_left(0).unwrap(), p);
        assert!(p.rotate_left(2).is_err());
        assert!(DigitIndex::new(9, 3, 2).is_err());
        assert!(DigitIndex::new(0, 1, 2).is_err());
    }

    #[test]
    fn digit_rotation_full_cycle_is_identity() {
        for value in 0..27 {
            let mut p = DigitIndex::new(value, 3, 3).unwrap();
            for _ in 0..3 {
                p = p.rotate_left(1).unwrap();
            }
            assert_eq!(p.value(), value);
        }
    }

    #[test]
    fn digit_rotation_is_a_bijection() {
        for (n, k) in [(2usize, 4usize), (3, 3), (5, 2)] {
            let size = n.pow(k as u32);
            for shift in 0..k {
                let mut seen = vec![false; size];
                for v in 0..size {
                    let img = DigitIndex::new(v, n, k)
                        .unwrap()
                        .rotate_left(shift)
                        .unwrap();
                    assert!(!seen[img.value()]);
                    seen[img.value()] = true;
                }
            }
        }
    }

    #[test]
    fn digit_round_trip() {
        for v in 0..16 {
            let p = DigitIndex::new(v, 2, 4).unwrap();
            let back: usize = p.digits().iter().fold(0, |acc, d| acc * 2 + d);
            assert_eq!(back, v);
        }
    }

    #[test]
    fn block_kron_with_unit_left_factor() {
        let mut rng = crate::rng::seeded(3);
        let c = random_matrix(&mut rng, 4, 4);
        let one = Matrix::identity(1);
        let out = block_kron(&one, &c, 2).unwrap();
        assert!(out.approx_eq(&c, 0.0));
        // and a unit right factor degenerates to the plain product
        let out = block_kron(&c, &one, 2).unwrap();
        assert!(out.approx_eq(&c, 0.0));
    }

    #[test]
    fn block_kron_rejects_non_powers() {
        let b = Matrix::identity(3);
        let c = Matrix::identity(2);
        assert!(matches!(block_kron(&b, &c, 2), Err(Error::Domain(_))));
        assert!(matches!(block_kron(&c, &c, 1), Err(Error::Domain(_))));
        let r = Matrix::zeros(2, 3);
        assert!(block_kron(&r, &c, 2).is_err());
    }

    // The stacked 8x8 matrix from the 2x2 symmetric seed with k = 3,
    // written out by hand.
    #[test]
    fn block_kron_eight_by_eight() {
        let (al, be) = (0.6, 0.4);
        let a = Matrix::from_rows(&[&[al, be], &[be, al]]);
        let i4 = Matrix::identity(4);
        let m = block_kron(&i4, &a, 2).unwrap();
        let z = 0.0;
        let expect = Matrix::from_rows(&[
            &[al, be, z, z, z, z, z, z],
            &[z, z, al, be, z, z, z, z],
            &[z, z, z, z, al, be, z, z],
            &[z, z, z, z, z, z, al, be],
            &[be, al, z, z, z, z, z, z],
            &[z, z, be, al, z, z, z, z],
            &[z, z, z, z, be, al, z, z],
            &[z, z, z, z, z, z, be, al],
        ]);
        assert!(m.approx_eq(&expect, 0.0));
    }

    // (B ⊙ C)ᵀ = Cᵀ ⊙ Bᵀ
    #[test]
    fn block_kron_transpose_identity() {
        let mut rng = crate::rng::seeded(21);
        for (bu, cu) in [(1usize, 1usize), (2, 1), (1, 2), (2, 2)] {
            let b = random_matrix(&mut rng, 1 << bu, 1 << bu);
            let c = random_matrix(&mut rng, 1 << cu, 1 << cu);
            let lhs = block_kron(&b, &c, 2).unwrap().transpose();
            let rhs = block_kron(&c.transpose(), &b.transpose(), 2).unwrap();
            assert!(lhs.approx_eq(&rhs, 1e-12));
        }
    }

    // ((A ⊗ B) ⊙ C)((D ⊗ E) ⊙ F) = BD ⊙ (CE ⊗ AF), plus its two specializations.
    #[test]
    fn block_kron_product_lemma() {
        let mut rng = crate::rng::seeded(33);
        let n = 2usize;
        for _ in 0..12 {
            let a = random_matrix(&mut rng, n, n);
            let b = random_matrix(&mut rng, n * n, n * n);
            let c = random_matrix(&mut rng, n, n);
            let d = random_matrix(&mut rng, n * n, n * n);
            let e = random_matrix(&mut rng, n, n);
            let f = random_matrix(&mut rng, n, n);

            let lhs = block_kron(&kron(&a, &b).unwrap(), &c, n)
                .unwrap()
                .matmul(&block_kron(&kron(&d, &e).unwrap(), &f, n).unwrap())
                .unwrap();
            let rhs = block_kron(
                &b.matmul(&d).unwrap(),
                &kron(&c.matmul(&e).unwrap(), &a.matmul(&f).unwrap()).unwrap(),
                n,
            )
            .unwrap();
            assert!(lhs.approx_eq(&rhs, 1e-10));

            // (A ⊙ C)(E ⊙ F) = CE ⊗ AF
            let lhs = block_kron(&a, &c, n)
                .unwrap()
                .matmul(&block_kron(&e, &f, n).unwrap())
                .unwrap();
            let rhs = kron(&c.matmul(&e).unwrap(), &a.matmul(&f).unwrap()).unwrap();
            assert!(lhs.approx_eq(&rhs, 1e-10));

            // (A ⊗ B')(D' ⊙ F) = B'D' ⊙ AF  with n-sized B', D'
            let b2 = random_matrix(&mut rng, n, n);
            let d2 = random_matrix(&mut rng, n, n);
            let lhs = kron(&a, &b2)
                .unwrap()
                .matmul(&block_kron(&d2, &f, n).unwrap())
                .unwrap();
            let rhs = block_kron(&b2.matmul(&d2).unwrap(), &a.matmul(&f).unwrap(), n).unwrap();
            assert!(lhs.approx_eq(&rhs, 1e-10));
        }
    }

    // Tr((B₀ ⊗ … ⊗ B_{l-1}) ⊙ (B_l ⊗ … ⊗ B_{k-1})) = Tr(B₀ B_l B_{2l} ⋯), indices mod k.
    #[test]
    fn block_kron_trace_lemma() {
        let mut rng = crate::rng::seeded(52);
        for (n, k, l) in [
            (2usize, 2usize, 1usize),
            (2, 3, 1),
            (2, 3, 2),
            (3, 2, 1),
            (2, 4, 3),
        ] {
            for _ in 0..8 {
                let bs: Vec<Matrix> = (0..k).map(|_| random_matrix(&mut rng, n, n)).collect();
                let left = kron_list(&bs[..l].iter().collect::<Vec<_>>()).unwrap();
                let right = kron_list(&bs[l..].iter().collect::<Vec<_>>()).unwrap();
                let lhs = block_kron(&left, &right, n).unwrap().trace();
                let mut prod = bs[0].clone();
                for j in 1..k {
                    prod = prod.matmul(&bs[(j * l) % k]).unwrap();
                }
                assert!(
                    approx(lhs, prod.trace(), 1e-9),
                    "trace lemma failed for n={n} k={k} l={l}: {lhs} vs {}",
                    prod.trace()
                );
            }
        }
    }

    #[test]
    fn mat_pow_basics() {
        let mut rng = crate::rng::seeded(9);
        let m = random_matrix(&mut rng, 4, 4);
        assert!(mat_pow(&m, 0).unwrap().approx_eq(&Matrix::identity(4), 0.0));
        let m5 = mat_pow(&m, 5).unwrap();
        let m4m = m.matmul(&mat_pow(&m, 4).unwrap()).unwrap();
        assert!(m5.approx_eq(&m4m, 1e-10));
        assert!(mat_pow(&Matrix::zeros(2, 3), 2).is_err());
    }

    #[test]
    fn mat_pow_deadbeat_reaches_uniform() {
        let seed = Matrix::filled(3, 3, 1.0 / 3.0);
        let m = crate::strategies::block_kron_strategy(&seed, 4).unwrap();
        let m4 = mat_pow(m.matrix(), 4).unwrap();
        let uniform = Matrix::filled(81, 81, 1.0 / 81.0);
        assert!(m4.approx_eq(&uniform, 1e-13));
    }
}
