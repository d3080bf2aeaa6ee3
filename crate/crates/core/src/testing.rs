//! Deterministic corpus generators used by the property and acceptance
//! suites. Everything is driven by [`SplitMix64`] so a fixed seed pins the
//! whole corpus.

use crate::graph::LabeledMultigraph;
use crate::matrix::{Matrix, SymmetricMatrix};
use crate::rng::SplitMix64;

pub fn random_vector(n: usize, rng: &mut SplitMix64) -> Vec<f64> {
    (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect()
}

/// Random symmetric matrix with entries in `[-scale, scale]`.
pub fn random_symmetric(n: usize, rng: &mut SplitMix64, scale: f64) -> SymmetricMatrix<f64> {
    SymmetricMatrix::from_fn_upper(n, |_, _| scale * (2.0 * rng.next_f64() - 1.0))
}

/// Random symmetric matrix with spectral norm at most `max_norm`.
pub fn random_contraction(n: usize, rng: &mut SplitMix64, max_norm: f64) -> SymmetricMatrix<f64> {
    let raw = random_symmetric(n, rng, 1.0);
    let norm = crate::spectral::eigen_sym(&raw).max_abs_eigenvalue();
    if norm == 0.0 {
        return raw;
    }
    let target = max_norm * rng.next_f64();
    raw.scale(target / norm)
}

/// Random PSD matrix `B B^T / n`, full rank almost surely.
pub fn random_psd(n: usize, rng: &mut SplitMix64) -> SymmetricMatrix<f64> {
    let b = Matrix::from_fn(n, |_, _| 2.0 * rng.next_f64() - 1.0);
    b.matmul(&b.transpose()).scale(1.0 / n as f64).symmetrized()
}

/// A PSD matrix and a multiplicative perturbation of it. The pair is full
/// rank, so the kernel condition is vacuous and the measured epsilon is
/// finite and roughly `strength`.
pub fn random_psd_pair(
    n: usize,
    rng: &mut SplitMix64,
    strength: f64,
) -> (SymmetricMatrix<f64>, SymmetricMatrix<f64>) {
    let l = {
        let mut m = random_psd(n, rng);
        for i in 0..n {
            let bump = m[(i, i)] + 0.1;
            m.set_sym(i, i, bump);
        }
        m
    };
    // L~ = S^T L S with S = I + small random; keeps PSD and kernel.
    let s = Matrix::from_fn(n, |i, j| {
        let noise = strength / n as f64 * (2.0 * rng.next_f64() - 1.0);
        if i == j {
            1.0 + noise
        } else {
            noise
        }
    });
    let lt = s.transpose().matmul(l.as_matrix()).matmul(&s).symmetrized();
    (l, lt)
}

/// Random connected-ish multigraph on `n` vertices with `extra` additional
/// random edges beyond a spanning path; loops allowed.
pub fn random_multigraph(n: usize, extra: usize, rng: &mut SplitMix64) -> LabeledMultigraph {
    let mut edges = Vec::with_capacity(n - 1 + extra);
    for v in 1..n {
        edges.push((v, v + 1));
    }
    for _ in 0..extra {
        let u = 1 + rng.next_below(n as u64) as usize;
        let v = 1 + rng.next_below(n as u64) as usize;
        edges.push((u, v));
    }
    LabeledMultigraph::from_edge_list(n, &edges).expect("generator produces valid graphs")
}

/// Random multigraph with exactly the prescribed degrees (configuration
/// model). Each same-vertex stub pairing is realized as two one-slot
/// loops, so slot counts match the prescription exactly. The degree sum
/// must be even.
pub fn random_multigraph_with_degrees(degrees: &[u64], rng: &mut SplitMix64) -> LabeledMultigraph {
    let n = degrees.len();
    let total: u64 = degrees.iter().sum();
    assert!(total.is_multiple_of(2), "degree sum must be even");
    let mut stubs: Vec<usize> = Vec::with_capacity(total as usize);
    for (i, &d) in degrees.iter().enumerate() {
        for _ in 0..d {
            stubs.push(i + 1);
        }
    }
    // Fisher-Yates, then pair consecutive stubs.
    for i in (1..stubs.len()).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        stubs.swap(i, j);
    }
    let mut edges = Vec::with_capacity(stubs.len() / 2);
    for pair in stubs.chunks_exact(2) {
        if pair[0] == pair[1] {
            // Two degree units at one vertex: two one-slot loops.
            edges.push((pair[0], pair[0]));
            edges.push((pair[0], pair[0]));
        } else {
            edges.push((pair[0], pair[1]));
        }
    }
    LabeledMultigraph::from_edge_list(n, &edges).expect("prescribed degrees are positive")
}
