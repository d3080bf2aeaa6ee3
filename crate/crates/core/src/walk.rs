//! The walk-power pipeline: start from a PSD base graph approximating the
//! two-step walk, then drive the exponent to `r` with derandomized squares
//! and plus-one products, never materializing intermediate graphs.
//!
//! The error ledger replays the composition algebra over the schedule and
//! reports a certified bound for the final approximation, in both the
//! strict parameterization (family quality tied to `eps/(32 z)`) and the
//! relaxed mode where any family quality is accepted and the achieved
//! bound is certified instead.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expander::{build_family, ExpanderFamily, FamilyConfig, FamilyMode};
use crate::graph::{EdgeSlot, LabeledMultigraph};
use crate::matrix::SymmetricMatrix;
use crate::rotgraph::{
    check_slot, dense_normalized_adjacency, dense_transition, materialize, AllLoopsGraph,
    DuplicatedGraph, RotationGraph, SelfLoopedGraph,
};
use crate::spectral::{compose_eps, eigen_sym, reverse_eps};

/// Bytes of live auxiliary state per recursion level when evaluating a
/// composite rotation map: the inner label, the expander label and the
/// direction bit, padded to three words.
pub const FRAME_BYTES: usize = 3 * std::mem::size_of::<u64>() * 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Derandomized square: doubles the exponent.
    Sq,
    /// Plus-one product with the base graph: adds 2 to the exponent.
    PlusG0,
    /// Final plus-one product with the input graph: adds 1.
    PlusG,
}

impl std::fmt::Display for Step {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Step::Sq => write!(f, "SQ"),
            Step::PlusG0 => write!(f, "PLUS_G0"),
            Step::PlusG => write!(f, "PLUS_G"),
        }
    }
}

/// Expanded bit sequence of `r` driving the product schedule.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub r: u64,
    /// Index of the most significant bit of `r`.
    pub z: u32,
    pub steps: Vec<Step>,
    /// Expander quality used by the products.
    pub mu: f64,
    /// Target approximation quality.
    pub eps: f64,
}

impl Schedule {
    /// Replay the steps from exponent 2; must land on `r` (for `r >= 2`).
    pub fn final_exponent(&self) -> u128 {
        let mut e: u128 = 2;
        for step in &self.steps {
            match step {
                Step::Sq => e *= 2,
                Step::PlusG0 => e += 2,
                Step::PlusG => e += 1,
            }
        }
        e
    }

    pub fn exponent_ok(&self) -> bool {
        if self.r < 2 {
            return self.steps.is_empty();
        }
        self.final_exponent() == self.r as u128
    }
}

/// Expand the bits of `r`: one square per remaining bit, a plus-one with
/// the base graph after each set bit, and a final plus-one with the input
/// graph when `r` is odd. `r = 1` yields the empty schedule (the oracle is
/// the input graph itself).
///
/// The expansion contains `z - 1` squares and `w` plus-ones (`w` = set
/// bits below the most significant, plus the final input-graph product
/// when `r` is odd); iteration-counting conventions that quote `z + w`
/// levels count the base graph as its own level.
pub fn bit_schedule(r: u64, mu: f64, eps: f64) -> Result<Schedule> {
    if r == 0 {
        return Err(Error::invalid("r = 0 has no schedule; the all-loops graph realizes I - M^0"));
    }
    let z = 63 - r.leading_zeros();
    let mut steps = Vec::new();
    if r >= 2 {
        for i in 1..z {
            steps.push(Step::Sq);
            if (r >> (z - i)) & 1 == 1 {
                steps.push(Step::PlusG0);
            }
        }
        if r & 1 == 1 {
            steps.push(Step::PlusG);
        }
    }
    let schedule = Schedule { r, z, steps, mu, eps };
    debug_assert!(schedule.exponent_ok(), "schedule exponent drift for r={r}");
    Ok(schedule)
}

/// Composed error bound for a schedule replay.
#[derive(Clone, Debug)]
pub struct ErrorLedger {
    /// Bound after each schedule step, in order.
    pub per_step: Vec<(Step, f64)>,
    /// The power-conversion term from the base graph's two-step walk to
    /// the full power.
    pub conversion: f64,
    pub eps_total: f64,
}

/// Replay the composition algebra over the schedule: squares compose the
/// family quality once, base-graph plus-ones twice; the conversion term
/// `2 l(r >> 1) max(e0, e0/(1-e0))` carries the base-graph quality to the
/// power, and a final input-graph plus-one composes once more.
pub fn certified_bound(schedule: &Schedule, mu: f64, eps0_fwd: f64) -> Result<ErrorLedger> {
    if mu < 0.0 || eps0_fwd < 0.0 {
        return Err(Error::invalid("bounds must be nonnegative"));
    }
    if schedule.steps.iter().rposition(|&s| s == Step::PlusG).is_some_and(|p| {
        p != schedule.steps.len() - 1
            || schedule.steps.iter().filter(|&&s| s == Step::PlusG).count() > 1
    }) {
        return Err(Error::invalid("the input-graph product may only appear once, last"));
    }
    if schedule.r <= 1 {
        return Ok(ErrorLedger { per_step: Vec::new(), conversion: 0.0, eps_total: 0.0 });
    }
    let mut per_step = Vec::with_capacity(schedule.steps.len());
    let mut b = 0.0f64;
    for &step in &schedule.steps {
        match step {
            Step::Sq => b = compose_eps(mu, b),
            Step::PlusG0 => b = compose_eps(mu, compose_eps(mu, b)),
            Step::PlusG => {
                // Handled after the conversion.
                per_step.push((step, f64::NAN));
                continue;
            }
        }
        per_step.push((step, b));
    }
    let s = schedule.r >> 1;
    let ell = (64 - s.leading_zeros()) as f64;
    let conversion = 2.0 * ell * eps0_fwd.max(reverse_eps(eps0_fwd)?);
    let mut total = compose_eps(b, conversion);
    if let Some(last) = per_step.last_mut() {
        if last.0 == Step::PlusG {
            total = compose_eps(mu, total);
            last.1 = total;
        }
    }
    Ok(ErrorLedger { per_step, conversion, eps_total: total })
}

/// The PSD base graph: derandomized square of the input, every edge
/// duplicated `t` times, then one self loop per pre-duplication slot.
/// `M0 = (t M~ + I)/(t + 1)` is PSD whenever `t * lambda <= 1`.
pub struct G0Build {
    pub graph: Arc<dyn RotationGraph>,
    pub t: u64,
    /// Smallest eigenvalue of `M0`, measured densely.
    pub psd_certificate: f64,
    /// Certified forward bound of `I - M0` against `I - M^2`:
    /// `(1 + t lambda)/(t + 1)`.
    pub eps0_fwd: f64,
}

/// Core construction at an explicit duplication factor `t`.
pub fn build_g0_with(
    g: Arc<LabeledMultigraph>,
    family: &ExpanderFamily,
    t: u64,
    cert_budget: u64,
) -> Result<G0Build> {
    if t == 0 {
        return Err(Error::invalid("duplication factor t must be >= 1"));
    }
    let lambda = family.lambda_bound();
    if t as f64 * lambda > 1.0 + 1e-12 {
        return Err(Error::invalid(format!(
            "family quality {lambda} cannot certify PSD at t={t} (needs t*lambda <= 1)"
        )));
    }
    let square =
        Arc::new(crate::derand::derand_square(g.clone() as Arc<dyn RotationGraph>, family)?);
    let counts: Vec<u64> = (1..=square.vertex_count()).map(|v| square.degree(v)).collect();
    let duplicated = Arc::new(DuplicatedGraph::new(square.clone(), t)?);
    let g0: Arc<dyn RotationGraph> = Arc::new(SelfLoopedGraph::new(duplicated, counts)?);

    // PSD certificate: M0 = (t M~ + I)/(t+1) assembled densely.
    let m_tilde = dense_normalized_adjacency(&*square, cert_budget)?;
    let n = m_tilde.n();
    let m0 =
        m_tilde.scale(t as f64).add(&SymmetricMatrix::identity(n)).scale(1.0 / (t as f64 + 1.0));
    let psd_certificate = eigen_sym(&m0).min_eigenvalue();

    let eps0_fwd = (1.0 + t as f64 * lambda) / (t as f64 + 1.0);
    Ok(G0Build { graph: g0, t, psd_certificate, eps0_fwd })
}

/// Strict parameterization: `t = ceil(4/eps)` and a family with
/// `lambda <= 1/t`.
pub fn build_g0(
    g: Arc<LabeledMultigraph>,
    eps: f64,
    mode: FamilyMode,
    seed: u64,
    config: FamilyConfig,
    cert_budget: u64,
) -> Result<(G0Build, Arc<ExpanderFamily>)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    let t = (4.0 / eps).ceil() as u64;
    let family = Arc::new(build_family(1.0 / t as f64, mode, seed, config)?);
    let built = build_g0_with(g, &family, t, cert_budget)?;
    Ok((built, family))
}

#[derive(Clone, Copy, Debug)]
pub enum LambdaMode {
    /// `mu = eps/(32 z)`, base-graph target `eps/(16 z)`.
    Strict,
    /// Accept a family at the given quality and certify the achieved
    /// bound; the base graph uses `t = 1`, which is unconditionally PSD.
    Relaxed(f64),
}

#[derive(Clone, Debug)]
pub struct PowerParams {
    pub r: u64,
    pub eps: f64,
    pub lambda: LambdaMode,
    pub mode: FamilyMode,
    pub seed: u64,
    pub family_config: FamilyConfig,
    /// Slot budget for the dense PSD certificate of the base graph.
    pub cert_budget: u64,
}

impl PowerParams {
    pub fn new(r: u64, eps: f64) -> Self {
        PowerParams {
            r,
            eps,
            lambda: LambdaMode::Strict,
            mode: FamilyMode::VerifiedRandom,
            seed: 0,
            family_config: FamilyConfig::default(),
            cert_budget: 100_000_000,
        }
    }

    pub fn relaxed(mut self, lambda: f64) -> Self {
        self.lambda = LambdaMode::Relaxed(lambda);
        self
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Lazily evaluable recipe for the output graph of the walk-power
/// pipeline, together with its certified error ledger.
pub struct RotationOracle {
    root: Arc<dyn RotationGraph>,
    pub schedule: Schedule,
    pub ledger: ErrorLedger,
    /// Min eigenvalue of the base graph's `M0` (absent for r <= 1).
    pub psd_certificate: Option<f64>,
    pub family_degree: u64,
    pub family_lambda: f64,
    pub g0_t: u64,
    input: Arc<LabeledMultigraph>,
}

impl RotationOracle {
    pub fn root(&self) -> Arc<dyn RotationGraph> {
        self.root.clone()
    }

    pub fn input(&self) -> Arc<LabeledMultigraph> {
        self.input.clone()
    }

    /// Validated rotation at the root graph.
    pub fn rot(&self, s: EdgeSlot) -> Result<EdgeSlot> {
        check_slot(&*self.root, s)?;
        Ok(self.root.rot(s))
    }

    pub fn vertex_count(&self) -> usize {
        self.root.vertex_count()
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.root.degree(v)
    }

    pub fn total_slots(&self) -> u128 {
        self.root.total_slots()
    }

    pub fn recursion_depth(&self) -> usize {
        self.root.recursion_depth()
    }

    /// Bytes of live recursion state for one rotation evaluation; the
    /// empirical stand-in for the space accounting.
    pub fn peak_state_bytes(&self) -> usize {
        self.root.recursion_depth() * FRAME_BYTES
    }

    pub fn materialize(&self, max_slots: u64) -> Result<LabeledMultigraph> {
        materialize(&*self.root, max_slots)
    }

    /// Dense normalized Laplacian of the output by slot enumeration,
    /// without building the rotation table.
    pub fn dense_normalized_laplacian(&self, max_slots: u64) -> Result<SymmetricMatrix<f64>> {
        let m = dense_normalized_adjacency(&*self.root, max_slots)?;
        Ok(SymmetricMatrix::identity(m.n()).sub(&m))
    }

    pub fn dense_transition(&self, max_slots: u64) -> Result<crate::matrix::Matrix<f64>> {
        dense_transition(&*self.root, max_slots)
    }
}

/// Algorithm entry point: an oracle for a multigraph whose normalized
/// Laplacian approximates `I - M^r`, with a replayed certified bound.
pub fn approx_power(g: Arc<LabeledMultigraph>, params: &PowerParams) -> Result<RotationOracle> {
    let n = g.vertex_count();
    let r = params.r;
    if r == 0 {
        let schedule = Schedule { r, z: 0, steps: Vec::new(), mu: 0.0, eps: params.eps };
        return Ok(RotationOracle {
            root: Arc::new(AllLoopsGraph { n }),
            schedule,
            ledger: ErrorLedger { per_step: Vec::new(), conversion: 0.0, eps_total: 0.0 },
            psd_certificate: None,
            family_degree: 0,
            family_lambda: 0.0,
            g0_t: 0,
            input: g,
        });
    }
    if r == 1 {
        let schedule = Schedule { r, z: 0, steps: Vec::new(), mu: 0.0, eps: params.eps };
        return Ok(RotationOracle {
            root: g.clone(),
            schedule,
            ledger: ErrorLedger { per_step: Vec::new(), conversion: 0.0, eps_total: 0.0 },
            psd_certificate: None,
            family_degree: 0,
            family_lambda: 0.0,
            g0_t: 0,
            input: g,
        });
    }

    if !(params.eps > 0.0 && params.eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    let z = 63 - r.leading_zeros();
    let (family, g0_family, t, mu): (Arc<ExpanderFamily>, Arc<ExpanderFamily>, u64, f64) =
        match params.lambda {
            LambdaMode::Relaxed(lambda) => {
                let family = Arc::new(build_family(
                    lambda,
                    params.mode,
                    params.seed,
                    params.family_config.clone(),
                )?);
                let mu = family.lambda_bound();
                (family.clone(), family, 1, mu)
            }
            LambdaMode::Strict => {
                let mu = params.eps / (32.0 * z as f64);
                let family = Arc::new(build_family(
                    mu,
                    params.mode,
                    params.seed,
                    params.family_config.clone(),
                )?);
                let eps0_target = params.eps / (16.0 * z as f64);
                let t = (4.0 / eps0_target).ceil() as u64;
                let g0_family = Arc::new(build_family(
                    1.0 / t as f64,
                    params.mode,
                    params.seed.wrapping_add(1),
                    params.family_config.clone(),
                )?);
                (family, g0_family, t, mu)
            }
        };

    let g0b = build_g0_with(g.clone(), &g0_family, t, params.cert_budget)?;
    let schedule = bit_schedule(r, mu, params.eps)?;
    let ledger = certified_bound(&schedule, mu, g0b.eps0_fwd)?;

    let mut node: Arc<dyn RotationGraph> = g0b.graph.clone();
    for &step in &schedule.steps {
        let next = match step {
            Step::Sq => crate::derand::derand_product(node.clone(), node.clone(), &family)?,
            Step::PlusG0 => {
                crate::derand::derand_product(node.clone(), g0b.graph.clone(), &family)?
            }
            Step::PlusG => crate::derand::derand_product(
                node.clone(),
                g.clone() as Arc<dyn RotationGraph>,
                &family,
            )?,
        };
        node = Arc::new(next);
    }

    Ok(RotationOracle {
        root: node,
        schedule,
        ledger,
        psd_certificate: Some(g0b.psd_certificate),
        family_degree: family.degree(),
        family_lambda: family.lambda_bound(),
        g0_t: t,
        input: g,
    })
}
