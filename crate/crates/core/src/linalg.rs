//! Dense complex linear algebra helpers shared across the crate.
//!
//! Everything here is a thin layer over [`nalgebra`]: hermitian
//! eigendecomposition with sorted eigenvalues, eigenphases of unitary
//! matrices, matrix functions of hermitian matrices, column-stacking
//! vectorisation and the superoperator building blocks of Lindblad
//! generators, trace distance and von Neumann entropy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

/// Complex double-precision scalar.
pub type C64 = Complex<f64>;
/// Dynamically sized complex matrix.
pub type CMat = DMatrix<C64>;
/// Dynamically sized complex column vector.
pub type CVec = DVector<C64>;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Complex scalar from a real number.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Frobenius norm of a matrix.
#[inline]
pub fn frobenius(m: &CMat) -> f64 {
    m.norm()
}

/// Largest entry magnitude of a matrix.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian part `(m + m†)/2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * re(0.5)
}

/// Deviation from hermiticity, `‖m − m†‖_F`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

/// Deviation from unitarity, `‖m†m − 1‖_F`.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let d = m.nrows();
    (m.adjoint() * m - CMat::identity(d, d)).norm()
}

/// Eigendecomposition of a hermitian matrix with eigenvalues sorted in
/// ascending order. Returns `(eigenvalues, eigenvectors)`, eigenvectors as
/// columns matching the eigenvalue order.
///
/// The input is symmetrised first so that tiny anti-hermitian numerical noise
/// cannot poison the decomposition; callers that need to detect genuinely
/// non-hermitian input should check [`hermiticity_defect`] themselves.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let sym = hermitian_part(m);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let d = m.nrows();
    let mut vectors = CMat::zeros(d, order.len());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// `f(m)` for hermitian `m`, applying `f` to the eigenvalues.
pub fn hermitian_function(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, vectors) = hermitian_eigen(m);
    let d = m.nrows();
    let diag = CMat::from_diagonal(&CVec::from_iterator(d, values.iter().map(|&v| re(f(v)))));
    &vectors * diag * vectors.adjoint()
}

/// Unitary one-step propagator `exp(−i t h)` of a hermitian generator `h`.
///
/// Built from the eigendecomposition, so the result is unitary to rounding
/// accuracy regardless of `t`.
pub fn phase_evolution(h: &CMat, t: f64) -> CMat {
    let (values, vectors) = hermitian_eigen(h);
    let d = h.nrows();
    let diag = CMat::from_diagonal(&CVec::from_iterator(
        d,
        values.iter().map(|&v| (-I * re(v * t)).exp()),
    ));
    &vectors * diag * vectors.adjoint()
}

/// Eigenphase decomposition of a unitary matrix.
///
/// Returns phases `θ_k ∈ [0, 2π)` with `u v_k = e^{−i θ_k} v_k` and the
/// eigenvector matrix (columns `v_k`), both sorted by ascending phase.
///
/// The decomposition diagonalises the commuting hermitian pair
/// `A = (u + u†)/2`, `B = (u − u†)/(2i)`; eigenvalue clusters of `A` closer
/// than `cluster_tol` are split by diagonalising `B` restricted to the
/// cluster. This stays numerically stable where phases `θ` and `2π − θ`
/// share the same cosine.
pub fn unitary_eigenphases(u: &CMat, cluster_tol: f64) -> (Vec<f64>, CMat) {
    let d = u.nrows();
    let a = (u + u.adjoint()) * re(0.5);
    let b = (u - u.adjoint()) * (re(0.5) / I);
    let (a_values, mut vectors) = hermitian_eigen(&a);

    // Split cosine-degenerate clusters with the sine part.
    let mut start = 0;
    while start < d {
        let mut stop = start + 1;
        while stop < d && (a_values[stop] - a_values[stop - 1]).abs() <= cluster_tol {
            stop += 1;
        }
        if stop - start > 1 {
            let sub = vectors.columns(start, stop - start).into_owned();
            let b_sub = sub.adjoint() * &b * &sub;
            let (_, rot) = hermitian_eigen(&b_sub);
            let replacement = &sub * rot;
            for (offset, col) in replacement.column_iter().enumerate() {
                vectors.set_column(start + offset, &col);
            }
        }
        start = stop;
    }

    // Phases from Rayleigh quotients; the convention u v = e^{−iθ} v means
    // θ = −arg(v† u v) wrapped into [0, 2π).
    let two_pi = std::f64::consts::TAU;
    let mut phases: Vec<f64> = (0..d)
        .map(|k| {
            let v = vectors.column(k).into_owned();
            let lambda = v.dotc(&(u * &v));
            let mut theta = (-lambda.arg()).rem_euclid(two_pi);
            if theta >= two_pi {
                theta = 0.0;
            }
            theta
        })
        .collect();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| phases[x].total_cmp(&phases[y]));
    let mut sorted_vectors = CMat::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        sorted_vectors.set_column(dst, &vectors.column(src));
    }
    phases = order.iter().map(|&i| phases[i]).collect();
    (phases, sorted_vectors)
}

/// Column-stacking vectorisation of a matrix.
pub fn vectorize(m: &CMat) -> CVec {
    CVec::from_iterator(m.nrows() * m.ncols(), m.iter().copied())
}

/// Inverse of [`vectorize`] for a square `d × d` matrix.
pub fn unvectorize(v: &CVec, d: usize) -> CMat {
    CMat::from_iterator(d, d, v.iter().copied())
}

/// Superoperator of the map `ρ ↦ a ρ b` in column-stacking convention:
/// `vec(a ρ b) = (bᵀ ⊗ a) vec(ρ)`.
pub fn sandwich_superop(a: &CMat, b: &CMat) -> CMat {
    b.transpose().kronecker(a)
}

/// Superoperator of the commutator map `ρ ↦ −i [h, ρ]`.
pub fn commutator_superop(h: &CMat) -> CMat {
    let d = h.nrows();
    let id = CMat::identity(d, d);
    (id.kronecker(h) - h.transpose().kronecker(&id)) * (-I)
}

/// Superoperator of the dissipator `D[s]ρ = s ρ s† − ½{s†s, ρ}`.
pub fn dissipator_superop(s: &CMat) -> CMat {
    let d = s.nrows();
    let id = CMat::identity(d, d);
    let sts = s.adjoint() * s;
    s.conjugate().kronecker(s)
        - (id.kronecker(&sts) + sts.transpose().kronecker(&id)) * re(0.5)
}

/// Trace distance `½ ‖a − b‖₁` between hermitian matrices.
pub fn trace_distance(a: &CMat, b: &CMat) -> f64 {
    let (values, _) = hermitian_eigen(&(a - b));
    0.5 * values.iter().map(|v| v.abs()).sum::<f64>()
}

/// Von Neumann entropy `−Tr ρ ln ρ` of a positive semidefinite matrix.
/// Eigenvalues below `1e−300` are treated as exact zeros (0·ln 0 = 0).
pub fn von_neumann_entropy(rho: &CMat) -> f64 {
    let (values, _) = hermitian_eigen(rho);
    -values
        .iter()
        .filter(|&&p| p > 1e-300)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Matrix logarithm of a hermitian positive matrix with an eigenvalue floor:
/// eigenvalues are clamped from below at `floor` before taking logs, keeping
/// the result finite for numerically rank-deficient states.
pub fn hermitian_log_floored(rho: &CMat, floor: f64) -> CMat {
    hermitian_function(rho, |p| p.max(floor).ln())
}

/// Null-space information of a square matrix, from a singular value
/// decomposition.
pub struct NullSpace {
    /// Unit-norm right singular vector of the smallest singular value.
    pub vector: CVec,
    /// Number of singular values at or below the relative rank tolerance.
    pub kernel_dim: usize,
    /// Smallest singular value, in units of the largest.
    pub smallest: f64,
    /// Second-smallest singular value, in units of the largest (spectral
    /// separation of the kernel; 0 for matrices of dimension < 2).
    pub gap: f64,
}

/// Relative singular-value threshold below which directions count as kernel.
pub const KERNEL_REL_TOL: f64 = 1e-10;

/// Compute the (approximate) null space of `m` via SVD.
///
/// Singular values are measured relative to the largest one; those at or
/// below [`KERNEL_REL_TOL`] count towards the kernel dimension.
pub fn null_space(m: &CMat) -> NullSpace {
    let svd = m.clone().svd(false, true);
    let sigma = &svd.singular_values;
    let v_t = svd.v_t.expect("SVD with v_t requested");
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[a].total_cmp(&sigma[b]));
    let largest = sigma[order[order.len() - 1]].max(f64::MIN_POSITIVE);
    let kernel_dim = order
        .iter()
        .filter(|&&i| sigma[i] <= KERNEL_REL_TOL * largest)
        .count();
    let vector = v_t.row(order[0]).conjugate().transpose();
    NullSpace {
        vector,
        kernel_dim,
        smallest: sigma[order[0]] / largest,
        gap: if order.len() > 1 {
            sigma[order[1]] / largest
        } else {
            0.0
        },
    }
}
