//! The derandomized product of two multigraphs with proportional degrees.
//!
//! From a vertex, the product takes one step in one input graph, moves the
//! arrival label through an expander on the arrival vertex's edge slots,
//! then takes one step in the other input graph. The direction bit is part
//! of the label, so the result is an undirected multigraph whose
//! normalized Laplacian approximates `I - (M0 M1 + M1 M0)/2` with the
//! family's spectral bound.
//!
//! Label packing for degree `2 c d_v`: slot `((b*c + (a-1)) * d_v) + j`
//! encodes inner label `j` in `[d_v]`, expander label `a` in `[c]` and
//! direction bit `b`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expander::ExpanderFamily;
use crate::graph::{EdgeSlot, LabeledMultigraph};
use crate::matrix::SymmetricMatrix;
use crate::rotgraph::RotationGraph;

pub struct DerandProduct {
    g0: Arc<dyn RotationGraph>,
    g1: Arc<dyn RotationGraph>,
    /// Degree ratio: `deg_g0(v) = k * deg_g1(v)`; `g1` is implicitly
    /// duplicated k-fold.
    k: u64,
    c: u64,
    /// Expander per distinct common degree, prefetched so rot stays
    /// infallible.
    members: HashMap<u64, Arc<dyn RotationGraph>>,
    depth: usize,
}

#[derive(Clone, Copy)]
struct ProductLabel {
    j: u64,
    a: u64,
    b: bool,
}

impl DerandProduct {
    /// Integer degree ratio between the inputs (`g1` is implicitly
    /// duplicated this many times).
    pub fn degree_ratio(&self) -> u64 {
        self.k
    }

    fn decode(&self, label: u64, d: u64) -> ProductLabel {
        let z = label - 1;
        let j = z % d + 1;
        let q = z / d;
        let a = q % self.c + 1;
        let b = q / self.c == 1;
        ProductLabel { j, a, b }
    }

    fn encode(&self, l: ProductLabel, d: u64) -> u64 {
        let b = if l.b { 1u64 } else { 0 };
        (b * self.c + (l.a - 1)) * d + l.j
    }

    /// One step in `g0` (b = 0) or in the k-duplicated `g1` (b = 1).
    fn step(&self, b: bool, v: usize, j: u64) -> (usize, u64) {
        if !b {
            let t = self.g0.rot(EdgeSlot::new(v, j));
            (t.vertex, t.label)
        } else {
            let d = self.g1.degree(v);
            let copy = (j - 1) / d;
            let orig = (j - 1) % d + 1;
            let t = self.g1.rot(EdgeSlot::new(v, orig));
            (t.vertex, copy * self.g1.degree(t.vertex) + t.label)
        }
    }
}

impl RotationGraph for DerandProduct {
    fn vertex_count(&self) -> usize {
        self.g0.vertex_count()
    }

    fn degree(&self, v: usize) -> u64 {
        2 * self.c * self.g0.degree(v)
    }

    fn rot(&self, s: EdgeSlot) -> EdgeSlot {
        let d0 = self.g0.degree(s.vertex);
        let l = self.decode(s.label, d0);
        let (v1, j1) = self.step(l.b, s.vertex, l.j);
        let h = &self.members[&self.g0.degree(v1)];
        let ht = h.rot(EdgeSlot::new(j1 as usize, l.a));
        let (j2, a1) = (ht.vertex as u64, ht.label);
        let (v2, j3) = self.step(!l.b, v1, j2);
        EdgeSlot::new(v2, self.encode(ProductLabel { j: j3, a: a1, b: !l.b }, self.g0.degree(v2)))
    }

    fn recursion_depth(&self) -> usize {
        self.depth
    }
}

/// `G0 (p)_H G1` for inputs with per-vertex degree ratio
/// `deg_G0(v) = k * deg_G1(v)`; the family must provide members of every
/// size among `deg_G0(v)`.
pub fn derand_product(
    g0: Arc<dyn RotationGraph>,
    g1: Arc<dyn RotationGraph>,
    family: &ExpanderFamily,
) -> Result<DerandProduct> {
    let n = g0.vertex_count();
    if n != g1.vertex_count() {
        return Err(Error::VertexCountMismatch(n, g1.vertex_count()));
    }
    let k = {
        let d0 = g0.degree(1);
        let d1 = g1.degree(1);
        if d1 == 0 || !d0.is_multiple_of(d1) {
            return Err(Error::DegreeMismatch { vertex: 1, d0, d1 });
        }
        d0 / d1
    };
    let mut members: HashMap<u64, Arc<dyn RotationGraph>> = HashMap::new();
    for v in 1..=n {
        let d0 = g0.degree(v);
        let d1 = g1.degree(v);
        if d1 == 0 || d0 != k * d1 {
            return Err(Error::DegreeMismatch { vertex: v, d0, d1 });
        }
        if let std::collections::hash_map::Entry::Vacant(e) = members.entry(d0) {
            e.insert(family.member(d0)?);
        }
        // Product degree 2*c*d0 must stay representable.
        d0.checked_mul(2 * family.degree()).ok_or(Error::DegreeOverflow)?;
    }
    let depth = g0.recursion_depth().max(g1.recursion_depth()) + 1;
    Ok(DerandProduct { g0, g1, k, c: family.degree(), members, depth })
}

/// The derandomized square `G (p)_H G`.
pub fn derand_square(g: Arc<dyn RotationGraph>, family: &ExpanderFamily) -> Result<DerandProduct> {
    derand_product(g.clone(), g, family)
}

/// Dense oracle for the approximated object:
/// `I - (M0 M1 + M1 M0)/2` from explicit inputs with proportional degrees.
pub fn true_product_laplacian(
    g0: &LabeledMultigraph,
    g1: &LabeledMultigraph,
) -> Result<SymmetricMatrix<f64>> {
    if g0.vertex_count() != g1.vertex_count() {
        return Err(Error::VertexCountMismatch(g0.vertex_count(), g1.vertex_count()));
    }
    let (d0, d1) = (g0.degrees(), g1.degrees());
    let k = if d0[0] % d1[0] == 0 { d0[0] / d1[0] } else { 0 };
    for v in 0..d0.len() {
        if k == 0 || d0[v] != k * d1[v] {
            return Err(Error::DegreeMismatch { vertex: v + 1, d0: d0[v], d1: d1[v] });
        }
    }
    let m0 = g0.normalized_adjacency::<f64>();
    let m1 = g1.normalized_adjacency::<f64>();
    let anti = m0
        .as_matrix()
        .matmul(m1.as_matrix())
        .add(&m1.as_matrix().matmul(m0.as_matrix()))
        .scale(0.5);
    let n = g0.vertex_count();
    Ok(crate::matrix::Matrix::identity(n).sub(&anti).symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expander::{build_family, FamilyConfig, FamilyMode};
    use crate::rng::SplitMix64;
    use crate::rotgraph::{check_involution_lazy, materialize};
    use crate::spectral::measure_sym_approx;
    use crate::testing;

    #[test]
    fn product_degrees_and_involution() {
        let mut rng = SplitMix64::new(41);
        let g = Arc::new(testing::random_multigraph(6, 5, &mut rng));
        let family =
            build_family(0.5, FamilyMode::VerifiedRandom, 5, FamilyConfig::default()).unwrap();
        let p = derand_square(g.clone(), &family).unwrap();
        for v in 1..=6 {
            assert_eq!(p.degree(v), 2 * family.degree() * g.degree_of(v));
        }
        check_involution_lazy(&p, 1 << 22).unwrap();
    }

    #[test]
    fn square_with_complete_family_is_exact() {
        // Regular input + perfect expander family: the derandomized square
        // IS the true two-step product.
        let g = Arc::new(
            LabeledMultigraph::from_edge_list(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap(),
        );
        let family = ExpanderFamily::complete(2);
        let p = derand_square(g.clone(), &family).unwrap();
        let mat = materialize(&p, 100_000).unwrap();
        let l_tilde = mat.normalized_laplacian::<f64>();
        let l_true = true_product_laplacian(&g, &g).unwrap();
        let eps = measure_sym_approx(&l_true, &l_tilde).unwrap().epsilon;
        assert!(eps < 1e-9, "perfect-family square eps {eps}");
    }

    #[test]
    fn square_c4_random_family() {
        let g = Arc::new(
            LabeledMultigraph::from_edge_list(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap(),
        );
        let family = build_family(
            0.35,
            FamilyMode::VerifiedRandom,
            11,
            FamilyConfig { c_override: Some(4), ..FamilyConfig::default() },
        )
        .unwrap();
        let p = derand_square(g.clone(), &family).unwrap();
        let mat = materialize(&p, 100_000).unwrap();
        let eps = measure_sym_approx(
            &true_product_laplacian(&g, &g).unwrap(),
            &mat.normalized_laplacian::<f64>(),
        )
        .unwrap()
        .epsilon;
        assert!(eps <= 0.35 + 1e-9, "measured {eps}");
        // Stationary distribution preserved: output degrees proportional
        // to the input's.
        for v in 1..=4 {
            assert_eq!(mat.degree_of(v), 2 * family.degree() * g.degree_of(v));
        }
    }

    #[test]
    fn true_product_examples() {
        let k2 = LabeledMultigraph::from_edge_list(2, &[(1, 2)]).unwrap();
        let l = true_product_laplacian(&k2, &k2).unwrap();
        assert!(l.max_abs() < 1e-15, "I - M^2 of K2 is the zero matrix");

        let tri = LabeledMultigraph::from_edge_list(3, &[(1, 2), (2, 3), (3, 1)]).unwrap();
        let l = true_product_laplacian(&tri, &tri).unwrap();
        // M = (J3 - I)/2 gives M^2 = (J3 + I)/4, so I - M^2 has 1/2 on
        // the diagonal and -1/4 off.
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.5 } else { -0.25 };
                assert!((l[(i, j)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn product_spectral_guarantee_random_pairs() {
        let mut rng = SplitMix64::new(2024);
        let family =
            build_family(0.35, FamilyMode::VerifiedRandom, 13, FamilyConfig::default()).unwrap();
        for trial in 0..10 {
            let n = 3 + rng.next_below(5) as usize;
            let k = 1 + rng.next_below(2);
            let mut base: Vec<u64> = (0..n).map(|_| 1 + rng.next_below(3)).collect();
            if base.iter().sum::<u64>() % 2 == 1 {
                base[0] += 1;
            }
            let scaled: Vec<u64> = base.iter().map(|&d| d * k).collect();
            let g1 = Arc::new(testing::random_multigraph_with_degrees(&base, &mut rng));
            let g0 = Arc::new(testing::random_multigraph_with_degrees(&scaled, &mut rng));
            let p = derand_product(g0.clone(), g1.clone(), &family).unwrap();
            let mat = materialize(&p, 1 << 22).unwrap();
            let l_true = true_product_laplacian(&g0, &g1).unwrap();
            let eps =
                measure_sym_approx(&l_true, &mat.normalized_laplacian::<f64>()).unwrap().epsilon;
            assert!(
                eps <= family.lambda_bound() + 1e-8,
                "trial {trial}: eps {eps} vs lambda {}",
                family.lambda_bound()
            );
        }
    }

    #[test]
    fn involution_with_degree_four_family() {
        // Small-degree family on a 6-vertex irregular multigraph: the
        // whole slot space stays involutive.
        let mut rng = SplitMix64::new(64);
        let g = Arc::new(testing::random_multigraph(6, 4, &mut rng));
        let family = build_family(
            0.9,
            FamilyMode::VerifiedRandom,
            17,
            FamilyConfig { c_override: Some(4), ..FamilyConfig::default() },
        )
        .unwrap();
        let p = derand_square(g, &family).unwrap();
        check_involution_lazy(&p, 1 << 20).unwrap();
    }

    #[test]
    fn degree_mismatch_rejected() {
        let g0 = Arc::new(LabeledMultigraph::from_edge_list(3, &[(1, 2), (2, 3)]).unwrap());
        let g1 = Arc::new(LabeledMultigraph::from_edge_list(3, &[(1, 2), (2, 3), (3, 1)]).unwrap());
        let family =
            build_family(0.5, FamilyMode::VerifiedRandom, 1, FamilyConfig::default()).unwrap();
        assert!(derand_product(g0, g1, &family).is_err());
    }
}
