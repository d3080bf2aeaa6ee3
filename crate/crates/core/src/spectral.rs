//! Dense verification core: symmetric eigendecomposition, pseudoinverse
//! square roots, spectral-gap measurement and the (directed) spectral
//! approximation measures.
//!
//! Everything here is pure and desk-scale; the eigensolver is cyclic
//! Jacobi, which is plenty for the n <= ~512 matrices the verifiers see
//! and keeps eigenvectors orthonormal by construction.

use crate::error::{Error, Result};
use crate::graph::LabeledMultigraph;
use crate::matrix::{Matrix, SymmetricMatrix};
use crate::scalar::Scalar;

/// Absolute tolerance for kernel-inclusion checks.
const KERNEL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct EigenDecomposition<S> {
    /// Ascending.
    pub eigenvalues: Vec<S>,
    /// Orthonormal columns, `eigenvectors.column(k)` pairs with
    /// `eigenvalues[k]`.
    pub eigenvectors: Matrix<S>,
}

/// Cyclic Jacobi. Converges to machine precision; the returned
/// decomposition satisfies `V diag(w) V^T = M` to ~1e-14 relative.
pub fn eigen_sym<S: Scalar>(m: &SymmetricMatrix<S>) -> EigenDecomposition<S> {
    let n = m.n();
    let mut a = m.as_matrix().clone();
    let mut v = Matrix::identity(n);
    if n > 1 {
        let mut scale = S::zero();
        for i in 0..n {
            for j in 0..n {
                scale = scale.max(a[(i, j)].abs());
            }
        }
        if scale > S::zero() {
            let stop = scale * S::epsilon() * S::from_f64(n as f64);
            for _sweep in 0..64 {
                let mut off = S::zero();
                for i in 0..n {
                    for j in (i + 1)..n {
                        off = off.max(a[(i, j)].abs());
                    }
                }
                if off <= stop {
                    break;
                }
                for p in 0..n {
                    for q in (p + 1)..n {
                        let apq = a[(p, q)];
                        if apq.abs() <= stop * S::from_f64(1e-3) {
                            continue;
                        }
                        let theta = (a[(q, q)] - a[(p, p)]) / (S::from_f64(2.0) * apq);
                        let t = {
                            let denom = theta.abs() + (theta * theta + S::one()).sqrt();
                            let t = S::one() / denom;
                            if theta < S::zero() {
                                -t
                            } else {
                                t
                            }
                        };
                        let c = S::one() / (t * t + S::one()).sqrt();
                        let s = t * c;
                        // Update A = J^T A J on rows/columns p, q.
                        for k in 0..n {
                            let akp = a[(k, p)];
                            let akq = a[(k, q)];
                            a[(k, p)] = c * akp - s * akq;
                            a[(k, q)] = s * akp + c * akq;
                        }
                        for k in 0..n {
                            let apk = a[(p, k)];
                            let aqk = a[(q, k)];
                            a[(p, k)] = c * apk - s * aqk;
                            a[(q, k)] = s * apk + c * aqk;
                        }
                        for k in 0..n {
                            let vkp = v[(k, p)];
                            let vkq = v[(k, q)];
                            v[(k, p)] = c * vkp - s * vkq;
                            v[(k, q)] = s * vkp + c * vkq;
                        }
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let eigenvalues: Vec<S> = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = Matrix::from_fn(n, |i, j| v[(i, order[j])]);
    EigenDecomposition { eigenvalues, eigenvectors }
}

impl<S: Scalar> EigenDecomposition<S> {
    /// `V f(diag) V^T`, written exactly symmetric.
    pub fn map_rebuild(&self, f: impl Fn(S) -> S) -> SymmetricMatrix<S> {
        let n = self.eigenvalues.len();
        let mapped: Vec<S> = self.eigenvalues.iter().map(|&w| f(w)).collect();
        SymmetricMatrix::from_fn_upper(n, |i, j| {
            mapped.iter().enumerate().fold(S::zero(), |acc, (k, &w)| {
                acc + w * self.eigenvectors[(i, k)] * self.eigenvectors[(j, k)]
            })
        })
    }

    pub fn max_abs_eigenvalue(&self) -> S {
        self.eigenvalues.iter().fold(S::zero(), |m, &w| m.max(w.abs()))
    }

    pub fn min_eigenvalue(&self) -> S {
        self.eigenvalues.first().copied().unwrap_or_else(S::zero)
    }
}

/// Default kernel threshold: `1e-9 * n * ||L||`.
pub fn default_rank_tol<S: Scalar>(n: usize, spectral_norm: S) -> S {
    S::from_f64(1e-9) * S::from_f64(n as f64) * spectral_norm
}

/// Spectral norm (largest singular value) of a possibly asymmetric matrix,
/// via the symmetrized Gram matrix.
pub fn spectral_norm<S: Scalar>(m: &Matrix<S>) -> S {
    let gram = m.transpose().matmul(m).symmetrized();
    let eig = eigen_sym(&gram);
    eig.max_abs_eigenvalue().max(S::zero()).sqrt()
}

/// `L^{dagger/2}`: eigenvalues above `rank_tol` map to `1/sqrt(w)`, the
/// rest to 0. Errors if an eigenvalue lies below `-rank_tol`.
pub fn pseudo_sqrt_inv<S: Scalar>(
    l: &SymmetricMatrix<S>,
    rank_tol: S,
) -> Result<SymmetricMatrix<S>> {
    let eig = eigen_sym(l);
    if eig.min_eigenvalue() < -rank_tol {
        return Err(Error::NotPsd(eig.min_eigenvalue().to_f64_lossy()));
    }
    Ok(eig.map_rebuild(|w| if w > rank_tol { S::one() / w.sqrt() } else { S::zero() }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Symmetric,
    Directed,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Symmetric => write!(f, "sym"),
            Direction::Directed => write!(f, "dir"),
        }
    }
}

/// Result of measuring (directed) spectral approximation: the smallest
/// `eps >= 0` such that `L~` eps-approximates `L`, or `+inf` when the
/// kernel condition fails.
#[derive(Clone, Copy, Debug)]
pub struct ApproxReport<S> {
    pub epsilon: S,
    pub kernel_ok: bool,
    pub direction: Direction,
}

impl<S: Scalar> ApproxReport<S> {
    fn kernel_failure(direction: Direction) -> Self {
        ApproxReport { epsilon: S::infinity(), kernel_ok: false, direction }
    }
}

impl<S: Scalar> std::fmt::Display for ApproxReport<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "epsilon={} kernel_ok={} direction={}",
            crate::textio::g17(self.epsilon.to_f64_lossy()),
            self.kernel_ok,
            self.direction
        )
    }
}

/// Smallest `eps` with `(1-eps) v^T L v <= v^T L~ v <= (1+eps) v^T L v`
/// for all `v`, measured as `|| L^{d/2} (L~ - L) L^{d/2} ||` once the
/// kernel of `L` is verified to be annihilated by the difference.
pub fn measure_sym_approx<S: Scalar>(
    l: &SymmetricMatrix<S>,
    l_tilde: &SymmetricMatrix<S>,
) -> Result<ApproxReport<S>> {
    if l.n() != l_tilde.n() {
        return Err(Error::VertexCountMismatch(l.n(), l_tilde.n()));
    }
    let n = l.n();
    let eig = eigen_sym(l);
    let tol = default_rank_tol(n, eig.max_abs_eigenvalue());
    if eig.min_eigenvalue() < -tol {
        return Err(Error::NotPsd(eig.min_eigenvalue().to_f64_lossy()));
    }
    let eig_t = eigen_sym(l_tilde);
    let tol_t = default_rank_tol(n, eig_t.max_abs_eigenvalue());
    if eig_t.min_eigenvalue() < -tol_t {
        return Err(Error::NotPsd(eig_t.min_eigenvalue().to_f64_lossy()));
    }

    let diff = l_tilde.as_matrix().sub(l.as_matrix());
    let kernel_tol = S::from_f64(KERNEL_TOL);
    for k in 0..n {
        if eig.eigenvalues[k].abs() <= tol {
            let basis = eig.eigenvectors.column(k);
            let image = diff.mul_vec(&basis);
            if norm2(&image) > kernel_tol {
                return Ok(ApproxReport::kernel_failure(Direction::Symmetric));
            }
        }
    }

    let p = eig.map_rebuild(|w| if w > tol { S::one() / w.sqrt() } else { S::zero() });
    let conjugated = p.as_matrix().matmul(&diff).matmul(p.as_matrix()).symmetrized();
    let epsilon = eigen_sym(&conjugated).max_abs_eigenvalue();
    Ok(ApproxReport { epsilon, kernel_ok: true, direction: Direction::Symmetric })
}

/// Directed approximation: kernel conditions on both sides of the
/// difference plus `|| U^{d/2} (L~ - L) U^{d/2} ||_2 <= eps` with
/// `U = (L + L^T)/2`. Agrees with [`measure_sym_approx`] on symmetric PSD
/// pairs.
pub fn measure_dir_approx<S: Scalar>(
    l: &Matrix<S>,
    l_tilde: &Matrix<S>,
) -> Result<ApproxReport<S>> {
    if l.n() != l_tilde.n() {
        return Err(Error::VertexCountMismatch(l.n(), l_tilde.n()));
    }
    let n = l.n();
    let u = l.symmetrized();
    let eig = eigen_sym(&u);
    let tol = default_rank_tol(n, eig.max_abs_eigenvalue());
    if eig.min_eigenvalue() < -tol {
        return Err(Error::NotPsd(eig.min_eigenvalue().to_f64_lossy()));
    }

    let diff = l_tilde.sub(l);
    let diff_t = diff.transpose();
    let kernel_tol = S::from_f64(KERNEL_TOL);
    for k in 0..n {
        if eig.eigenvalues[k].abs() <= tol {
            let basis = eig.eigenvectors.column(k);
            if norm2(&diff.mul_vec(&basis)) > kernel_tol
                || norm2(&diff_t.mul_vec(&basis)) > kernel_tol
            {
                return Ok(ApproxReport::kernel_failure(Direction::Directed));
            }
        }
    }

    let p = eig.map_rebuild(|w| if w > tol { S::one() / w.sqrt() } else { S::zero() });
    let conjugated = p.as_matrix().matmul(&diff).matmul(p.as_matrix());
    let epsilon = spectral_norm(&conjugated);
    Ok(ApproxReport { epsilon, kernel_ok: true, direction: Direction::Directed })
}

/// `lambda(G)`: second largest absolute eigenvalue of the transition
/// matrix of a regular graph, computed as `||T - J||`.
pub fn lambda_of<S: Scalar>(g: &LabeledMultigraph) -> Result<S> {
    let n = g.vertex_count();
    let c = g.degrees()[0];
    if g.degrees().iter().any(|&d| d != c) {
        return Err(Error::invalid("lambda(G) requires a regular graph"));
    }
    if n == 1 {
        return Ok(S::zero());
    }
    let t: Matrix<S> = g.transition_matrix();
    Ok(lambda_of_transition(&t))
}

/// `lambda` from an explicitly given doubly stochastic symmetric
/// transition matrix.
pub fn lambda_of_transition<S: Scalar>(t: &Matrix<S>) -> S {
    let n = t.n();
    let inv_n = S::one() / S::from_f64(n as f64);
    let shifted = Matrix::from_fn(n, |i, j| t[(i, j)] - inv_n).symmetrized();
    eigen_sym(&shifted).max_abs_eigenvalue()
}

/// Prop. composition: approximating through an intermediate at `e1` then
/// `e2` costs `e1 + e2 + e1*e2`.
pub fn compose_eps<S: Scalar>(e1: S, e2: S) -> S {
    e1 + e2 + e1 * e2
}

/// Reversal: if `X` eps-approximates `Y` then `Y` approximates `X` at
/// `eps / (1 - eps)`.
pub fn reverse_eps<S: Scalar>(e: S) -> Result<S> {
    if e >= S::one() {
        return Err(Error::invalid(format!("reverse_eps requires eps < 1, got {e}")));
    }
    Ok(e / (S::one() - e))
}

fn norm2<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |acc, &x| acc + x * x).sqrt()
}
