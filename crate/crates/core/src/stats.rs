//! Conductance of vertex sets under the r-step walk, and random-walk
//! matrix polynomials, each with an exact dense oracle and an
//! approximation path through the walk-power pipeline.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::LabeledMultigraph;
use crate::matrix::{Matrix, SymmetricMatrix};
use crate::rng::SplitMix64;
use crate::walk::{approx_power, ErrorLedger, PowerParams, RotationOracle};

/// A nonempty subset of `[n]`, sorted, with the sum of member degrees.
#[derive(Clone, Debug)]
pub struct VertexSet {
    ids: Vec<usize>,
    d_s: u64,
}

impl VertexSet {
    pub fn new(mut ids: Vec<usize>, g: &LabeledMultigraph) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::invalid("conductance needs a nonempty vertex set"));
        }
        ids.sort_unstable();
        ids.dedup();
        let n = g.vertex_count();
        for &v in &ids {
            if v < 1 || v > n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
        }
        let d_s = ids.iter().map(|&v| g.degree_of(v)).sum();
        Ok(VertexSet { ids, d_s })
    }

    /// Comma-separated 1-indexed ids, e.g. `"1,4,7"`.
    pub fn parse(text: &str, g: &LabeledMultigraph) -> Result<Self> {
        let ids = text
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("vertex set entry {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        VertexSet::new(ids, g)
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn degree_sum(&self) -> u64 {
        self.d_s
    }

    pub fn contains(&self, v: usize) -> bool {
        self.ids.binary_search(&v).is_ok()
    }
}

/// Probability that an r-step walk started in `S` (at stationarity) ends
/// outside `S`, computed exactly: `1 - e_S^T T^r (D e_S / d_S)`.
pub fn conductance_exact(g: &LabeledMultigraph, s: &VertexSet, r: u64) -> f64 {
    let n = g.vertex_count();
    let t: Matrix<f64> = g.transition_matrix();
    let d_s = s.degree_sum() as f64;
    let mut p = vec![0.0f64; n];
    for &v in s.ids() {
        p[v - 1] = g.degree_of(v) as f64 / d_s;
    }
    let tr = t.pow(r);
    let p_r = tr.mul_vec(&p);
    let stay: f64 = s.ids().iter().map(|&v| p_r[v - 1]).sum();
    1.0 - stay
}

/// Estimate through a materialized walk-power approximation:
/// `(1/d_S) v^T L~ v` with `v = D^{1/2} e_S` in input-graph degrees.
/// Returns the estimate and the certified ledger bounding its relative
/// error.
pub fn conductance_estimate(
    g: Arc<LabeledMultigraph>,
    s: &VertexSet,
    params: &PowerParams,
    max_slots: u64,
) -> Result<(f64, ErrorLedger)> {
    let oracle = approx_power(g.clone(), params)?;
    let estimate = conductance_from_oracle(&g, s, &oracle, max_slots)?;
    Ok((estimate, oracle.ledger.clone()))
}

/// The quadratic form against an already-built oracle.
pub fn conductance_from_oracle(
    g: &LabeledMultigraph,
    s: &VertexSet,
    oracle: &RotationOracle,
    max_slots: u64,
) -> Result<f64> {
    let l = oracle.dense_normalized_laplacian(max_slots)?;
    Ok(quadratic_conductance(g, s, &l))
}

/// `(1/d_S) (D^{1/2} e_S)^T L (D^{1/2} e_S)` with input-graph degrees.
pub fn quadratic_conductance(
    g: &LabeledMultigraph,
    s: &VertexSet,
    l: &SymmetricMatrix<f64>,
) -> f64 {
    let n = g.vertex_count();
    let mut v = vec![0.0f64; n];
    for &id in s.ids() {
        v[id - 1] = (g.degree_of(id) as f64).sqrt();
    }
    l.quadratic_form(&v) / s.degree_sum() as f64
}

/// Coefficients of a random-walk matrix polynomial: nonnegative, summing
/// to 1 within 1e-12.
#[derive(Clone, Debug)]
pub struct PolySpec {
    alphas: Vec<f64>,
}

impl PolySpec {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::invalid("polynomial needs at least one coefficient"));
        }
        if alphas.iter().any(|&a| a < 0.0) {
            return Err(Error::invalid("polynomial coefficients must be nonnegative"));
        }
        let sum: f64 = alphas.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "polynomial coefficients must sum to 1, got {sum}"
            )));
        }
        Ok(PolySpec { alphas })
    }

    /// Comma-separated coefficients, e.g. `"0.5,0.5"`.
    pub fn parse(text: &str) -> Result<Self> {
        let alphas = text
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("coefficient {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PolySpec::new(alphas)
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
}

/// Dense `L_alpha(G) = I - sum_r alpha_r M^r`.
pub fn rw_poly_exact(g: &LabeledMultigraph, poly: &PolySpec) -> SymmetricMatrix<f64> {
    let n = g.vertex_count();
    let m = g.normalized_adjacency::<f64>();
    let mut acc = Matrix::zeros(n);
    let mut power = Matrix::identity(n);
    for &alpha in poly.alphas() {
        power = power.matmul(m.as_matrix());
        if alpha != 0.0 {
            acc = acc.add(&power.scale(alpha));
        }
    }
    Matrix::identity(n).sub(&acc).symmetrized()
}

pub struct PolyApprox {
    pub laplacian: SymmetricMatrix<f64>,
    /// Ledger of each materialized term, keyed by the power.
    pub term_ledgers: Vec<(u64, ErrorLedger)>,
}

/// Approximate `L_alpha(G)` as `sum alpha_r L_r` with each `L_r` a
/// materialized walk-power approximation of `I - M^r`; the quality of the
/// sum is bounded by the worst term.
pub fn rw_poly_approx(
    g: Arc<LabeledMultigraph>,
    poly: &PolySpec,
    params: &PowerParams,
    max_slots: u64,
) -> Result<PolyApprox> {
    let n = g.vertex_count();
    let mut acc = SymmetricMatrix::zeros(n);
    let mut term_ledgers = Vec::new();
    for (idx, &alpha) in poly.alphas().iter().enumerate() {
        if alpha == 0.0 {
            continue;
        }
        let r = idx as u64 + 1;
        let mut term_params = params.clone();
        term_params.r = r;
        term_params.seed = SplitMix64::derive(params.seed, &[r]).next_u64();
        let oracle = approx_power(g.clone(), &term_params)?;
        let l_r = oracle.dense_normalized_laplacian(max_slots)?;
        acc = acc.add(&l_r.scale(alpha));
        term_ledgers.push((r, oracle.ledger.clone()));
    }
    Ok(PolyApprox { laplacian: acc, term_ledgers })
}
