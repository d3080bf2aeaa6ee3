//! Acceptance suite: one test per criterion, each checking the stated
//! property at its stated tolerance against dense oracles and printing a
//! pass line (visible with `--nocapture`).

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use walkspace::derand::{derand_product, true_product_laplacian};
use walkspace::expander::{
    any_size_rot, build_family, merged_dense_transition, square_side_for, AffineBase, FamilyConfig,
    FamilyMode, QuarterBase,
};
use walkspace::graph::{EdgeSlot, LabeledMultigraph};
use walkspace::matrix::{Matrix, SymmetricMatrix};
use walkspace::rng::SplitMix64;
use walkspace::rotgraph::{dense_transition, materialize, RotationGraph};
use walkspace::spectral::{
    compose_eps, eigen_sym, lambda_of, lambda_of_transition, measure_dir_approx,
    measure_sym_approx, reverse_eps,
};
use walkspace::stats::{conductance_exact, quadratic_conductance, VertexSet};
use walkspace::testing;
use walkspace::walk::{approx_power, bit_schedule, certified_bound, PowerParams};

fn walk_laplacian(g: &LabeledMultigraph, r: u64) -> SymmetricMatrix<f64> {
    let m = g.normalized_adjacency::<f64>();
    Matrix::identity(g.vertex_count()).sub(&m.as_matrix().pow(r)).symmetrized()
}

/// Random multigraph pair with per-vertex degree ratio k.
fn proportional_pair(
    n: usize,
    k: u64,
    rng: &mut SplitMix64,
) -> (Arc<LabeledMultigraph>, Arc<LabeledMultigraph>) {
    let mut base: Vec<u64> = (0..n).map(|_| 1 + rng.next_below(3)).collect();
    if base.iter().sum::<u64>() % 2 == 1 {
        base[0] += 1;
    }
    let scaled: Vec<u64> = base.iter().map(|&d| d * k).collect();
    let g1 = Arc::new(testing::random_multigraph_with_degrees(&base, rng));
    let g0 = Arc::new(testing::random_multigraph_with_degrees(&scaled, rng));
    (g0, g1)
}

fn irregular_multigraph(n: usize, extra: usize, rng: &mut SplitMix64) -> LabeledMultigraph {
    loop {
        let g = testing::random_multigraph(n, extra, rng);
        let d0 = g.degrees()[0];
        if g.degrees().iter().any(|&d| d != d0) {
            return g;
        }
    }
}

/// The walk-power corpus: five small irregular multigraphs whose total
/// degree keeps every r <= 5 materialization inside the 1e7 slot budget.
fn walk_power_corpus() -> Vec<Arc<LabeledMultigraph>> {
    vec![
        Arc::new(LabeledMultigraph::from_edge_list(2, &[(1, 2), (1, 1)]).unwrap()),
        Arc::new(LabeledMultigraph::from_edge_list(2, &[(1, 2), (2, 2)]).unwrap()),
        Arc::new(LabeledMultigraph::from_edge_list(3, &[(1, 2), (1, 3)]).unwrap()),
        Arc::new(LabeledMultigraph::from_edge_list(3, &[(1, 2), (2, 3)]).unwrap()),
        Arc::new(LabeledMultigraph::from_edge_list(3, &[(1, 1), (1, 2), (2, 3)]).unwrap()),
    ]
}

#[test]
fn criterion_01_derandomized_product_guarantee() {
    let start = Instant::now();
    let family = build_family(0.35, FamilyMode::VerifiedRandom, 1001, FamilyConfig::default())
        .expect("family at lambda 0.35");
    let mut rng = SplitMix64::new(0xC1);
    for trial in 0..25 {
        let n = 3 + rng.next_below(8) as usize; // n <= 10
        let k = 1 + rng.next_below(2);
        let (g0, g1) = proportional_pair(n, k, &mut rng);
        let product = derand_product(g0.clone(), g1.clone(), &family).expect("product");
        let mat = materialize(&product, 10_000_000).expect("materialize");
        let l_true = true_product_laplacian(&g0, &g1).expect("dense oracle");
        let eps = measure_sym_approx(&l_true, &mat.normalized_laplacian::<f64>())
            .expect("measure")
            .epsilon;
        assert!(
            eps <= family.lambda_bound() + 1e-8,
            "trial {trial}: measured {eps} above certified lambda {}",
            family.lambda_bound()
        );
    }
    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 60.0, "criterion 1 took {dt:.1}s, budget 60s");
    println!("acceptance 1 (derandomized-product guarantee): pass in {dt:.1}s");
}

/// Rectangular dense matrix helper for the proof-decomposition oracle.
#[derive(Clone)]
struct Rect {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Rect {
    fn zeros(rows: usize, cols: usize) -> Self {
        Rect { rows, cols, data: vec![0.0; rows * cols] }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    fn matmul(&self, other: &Rect) -> Rect {
        assert_eq!(self.cols, other.rows);
        let mut out = Rect::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    fn add(&self, other: &Rect) -> Rect {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    fn scale(&self, c: f64) -> Rect {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    fn max_abs_diff_sq(&self, m: &Matrix<f64>) -> f64 {
        assert_eq!((self.rows, self.cols), (m.n(), m.n()));
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self.get(i, j) - m[(i, j)]).abs());
            }
        }
        worst
    }
}

#[test]
fn criterion_02_proof_decomposition_oracle() {
    let start = Instant::now();
    let family =
        build_family(0.5, FamilyMode::VerifiedRandom, 77, FamilyConfig::default()).expect("family");
    let mut rng = SplitMix64::new(0xC2);
    for trial in 0..5 {
        let n = 3 + rng.next_below(5) as usize;
        let d = 2 + rng.next_below(2); // regular degree 2 or 3
        let degrees = vec![d; n];
        let degrees = {
            let mut ds = degrees;
            if ds.iter().sum::<u64>() % 2 == 1 {
                // Odd total: bump the degree uniformly to keep it regular.
                for v in ds.iter_mut() {
                    *v += 1;
                }
            }
            ds
        };
        let d = degrees[0];
        let g0 = Arc::new(testing::random_multigraph_with_degrees(&degrees, &mut rng));
        let g1 = Arc::new(testing::random_multigraph_with_degrees(&degrees, &mut rng));
        let product = derand_product(g0.clone(), g1.clone(), &family).expect("product");
        let mat = materialize(&product, 10_000_000).expect("materialize");
        let t_product = mat.transition_matrix::<f64>();

        // Proof matrices in slot coordinates (u, i), vertex-major.
        let dbar = n * d as usize;
        let idx = |u: usize, i: u64| (u - 1) * d as usize + (i as usize - 1);
        let mut q = Rect::zeros(dbar, n);
        let mut p = Rect::zeros(n, dbar);
        for u in 1..=n {
            for i in 1..=d {
                q.set(idx(u, i), u - 1, 1.0 / d as f64);
                p.set(u - 1, idx(u, i), 1.0);
            }
        }
        let rot_matrix = |g: &LabeledMultigraph| {
            let mut r = Rect::zeros(dbar, dbar);
            for u in 1..=n {
                for i in 1..=d {
                    let t = g.rot(EdgeSlot::new(u, i)).unwrap();
                    r.set(idx(u, i), idx(t.vertex, t.label), 1.0);
                }
            }
            r
        };
        let r0 = rot_matrix(&g0);
        let r1 = rot_matrix(&g1);
        let member = family.member(d).expect("member");
        let t_h = dense_transition(&*member, 1_000_000).expect("member transition");
        let mut b_tilde = Rect::zeros(dbar, dbar);
        let mut j_tilde = Rect::zeros(dbar, dbar);
        for u in 1..=n {
            for i in 1..=d {
                for j in 1..=d {
                    b_tilde.set(idx(u, i), idx(u, j), t_h[(i as usize - 1, j as usize - 1)]);
                    j_tilde.set(idx(u, i), idx(u, j), 1.0 / d as f64);
                }
            }
        }

        let assemble = |mid: &Rect| {
            let term0 = p.matmul(&r0.matmul(&mid.matmul(&r1.matmul(&q))));
            let term1 = p.matmul(&r1.matmul(&mid.matmul(&r0.matmul(&q))));
            term0.add(&term1).scale(0.5)
        };

        let diff = assemble(&b_tilde).max_abs_diff_sq(&t_product);
        assert!(diff <= 1e-10, "trial {trial}: decomposition differs by {diff}");

        let t0 = g0.transition_matrix::<f64>();
        let t1 = g1.transition_matrix::<f64>();
        let anti = t0.matmul(&t1).add(&t1.matmul(&t0)).scale(0.5);
        let diff = assemble(&j_tilde).max_abs_diff_sq(&anti);
        assert!(diff <= 1e-10, "trial {trial}: J-block form differs by {diff}");
    }
    let dt = start.elapsed().as_secs_f64();
    println!("acceptance 2 (proof-decomposition oracle): pass in {dt:.1}s");
}

#[test]
fn criterion_03_g0_contract() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xC3);
    let graphs: Vec<Arc<LabeledMultigraph>> = (0..10)
        .map(|_| {
            let n = 3 + rng.next_below(6) as usize; // n <= 8
            Arc::new(irregular_multigraph(n, rng.next_below(3) as usize, &mut rng))
        })
        .collect();
    for &eps in &[0.3f64, 0.75] {
        let t_expect = (4.0 / eps).ceil() as u64;
        for (gi, g) in graphs.iter().enumerate() {
            let (built, family) = walkspace::walk::build_g0(
                g.clone(),
                eps,
                FamilyMode::VerifiedRandom,
                900 + gi as u64,
                FamilyConfig::default(),
                100_000_000,
            )
            .expect("build_g0");
            assert_eq!(built.t, t_expect, "t = ceil(4/eps)");
            assert!(
                built.psd_certificate >= -1e-9,
                "graph {gi}: M0 min eigenvalue {}",
                built.psd_certificate
            );
            for v in 1..=g.vertex_count() {
                assert_eq!(
                    built.graph.degree(v),
                    (built.t + 1) * 2 * family.degree() * g.degree_of(v),
                    "graph {gi}: degree law at vertex {v}"
                );
            }
            let mat = materialize(&*built.graph, 100_000_000).expect("materialize G0");
            let measured = measure_sym_approx(&walk_laplacian(g, 2), &mat.normalized_laplacian())
                .expect("measure")
                .epsilon;
            assert!(measured <= eps, "graph {gi}: measured {measured} above eps {eps}");
        }
    }
    let dt = start.elapsed().as_secs_f64();
    println!("acceptance 3 (base-graph contract): pass in {dt:.1}s");
}

#[test]
fn criterion_04_end_to_end_walk_power() {
    let start = Instant::now();
    let corpus = walk_power_corpus();
    for &lambda in &[0.3f64, 0.5] {
        for &r in &[2u64, 3, 4, 5] {
            for (gi, g) in corpus.iter().enumerate() {
                let params = PowerParams::new(r, 0.9).relaxed(lambda).seeded(40 + gi as u64);
                let oracle = approx_power(g.clone(), &params).expect("oracle");
                let mat = oracle.materialize(10_000_000).expect("materialize under 1e7 budget");
                // Degree law: (2c)^steps * (t+1) * 2c * d_v per vertex.
                let c = oracle.family_degree;
                let steps = oracle.schedule.steps.len() as u32;
                let expected_slots: u128 = (1..=g.vertex_count())
                    .map(|v| {
                        let d0 = (oracle.g0_t + 1) * 2 * c * g.degree_of(v);
                        let want = (2 * c).pow(steps) * d0;
                        assert_eq!(mat.degree_of(v), want, "degree law at vertex {v}");
                        want as u128
                    })
                    .sum();
                assert_eq!(mat.total_slot_count() as u128, expected_slots);
                let measured =
                    measure_sym_approx(&walk_laplacian(g, r), &mat.normalized_laplacian())
                        .expect("measure")
                        .epsilon;
                assert!(
                    measured <= oracle.ledger.eps_total + 1e-8,
                    "lambda {lambda} r {r} graph {gi}: measured {measured} above certified {}",
                    oracle.ledger.eps_total
                );
            }
        }
    }
    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 600.0, "criterion 4 took {dt:.1}s, budget 600s");
    println!("acceptance 4 (end-to-end walk power): pass in {dt:.1}s");
}

#[test]
fn criterion_05_strict_parameter_bound_replay() {
    let start = Instant::now();
    for &eps in &[0.1f64, 0.5, 0.9] {
        for r in 2..=(1u64 << 16) {
            let z = (63 - r.leading_zeros()).max(1) as f64;
            let mu = eps / (32.0 * z);
            let eps0 = eps / (16.0 * z);
            let schedule = bit_schedule(r, mu, eps).expect("schedule");
            let ledger = certified_bound(&schedule, mu, eps0).expect("bound");
            assert!(
                ledger.eps_total <= eps,
                "r={r} eps={eps}: certified total {} exceeds eps",
                ledger.eps_total
            );
        }
    }
    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 5.0, "criterion 5 took {dt:.2}s, budget 5s");
    println!("acceptance 5 (strict-parameter bound replay): pass in {dt:.2}s");
}

#[test]
fn criterion_06_expander_family_any_size() {
    let start = Instant::now();
    let quarter = QuarterBase::new(40);
    let mut base_powers: HashMap<u64, Matrix<f64>> = HashMap::new();
    let mut rng = SplitMix64::new(0xC6);
    for n in 2..=200usize {
        let (member, certified) = any_size_rot(n, &quarter).expect("any-size member");
        assert!(certified <= 7.0 / 8.0, "n={n}: certified bound {certified}");
        // Regularity (degree 2c') and label ranges.
        let degree = member.degree(1);
        for v in 1..=n {
            assert_eq!(member.degree(v), degree, "n={n}: regularity at {v}");
        }
        // Involution: exhaustive when affordable, sampled otherwise.
        let slots = member.total_slots();
        if slots <= 2_000_000 {
            for v in 1..=n {
                for label in 1..=degree {
                    let s = EdgeSlot::new(v, label);
                    let t = member.rot(s);
                    assert!(t.vertex >= 1 && t.vertex <= n && t.label >= 1 && t.label <= degree);
                    assert_eq!(member.rot(t), s, "n={n}: involution at {v}:{label}");
                }
            }
        } else {
            for _ in 0..10_000 {
                let v = 1 + rng.next_below(n as u64) as usize;
                let label = 1 + rng.next_below(degree);
                let s = EdgeSlot::new(v, label);
                let t = member.rot(s);
                assert!(t.vertex >= 1 && t.vertex <= n && t.label >= 1 && t.label <= degree);
                assert_eq!(member.rot(t), s, "n={n}: involution at {v}:{label}");
            }
        }
        // Measured lambda through the dense transition bridge.
        let side = square_side_for(n);
        let (_, k1) = quarter.side_parameters(side).expect("side parameters");
        let t_base = base_powers.entry(side).or_insert_with(|| {
            dense_transition(&AffineBase::new(side).unwrap(), u64::MAX).unwrap().pow(k1 as u64)
        });
        let t_merged = merged_dense_transition(t_base, n);
        let lam = lambda_of_transition(&t_merged);
        assert!(lam <= 7.0 / 8.0 + 1e-8, "n={n}: measured lambda {lam}");
        assert!(lam <= certified + 1e-8, "n={n}: measured above certified");
        // Bridge agreement with slot enumeration where affordable.
        if slots <= 200_000 {
            let enumerated = dense_transition(&*member, 200_000).unwrap();
            assert!(
                enumerated.max_abs_diff(&t_merged) < 1e-12,
                "n={n}: bridge disagrees with enumeration"
            );
        }
        // Powering drives the measured lambda to 0.35.
        let mut k2 = 1u32;
        let mut bound = lam.max(1e-6);
        while bound > 0.35 {
            k2 += 1;
            bound *= lam;
        }
        let lam_pow = lambda_of_transition(&t_merged.pow(k2 as u64));
        assert!(lam_pow <= 0.35 + 1e-8, "n={n}: powered lambda {lam_pow} at k2={k2}");
    }
    let dt = start.elapsed().as_secs_f64();
    println!("acceptance 6 (any-size expander family): pass in {dt:.1}s");
}

#[test]
fn criterion_07_conductance() {
    let start = Instant::now();
    // Exact oracles.
    let c4 = LabeledMultigraph::from_edge_list(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
    let all = VertexSet::new(vec![1, 2, 3, 4], &c4).unwrap();
    assert!(conductance_exact(&c4, &all, 5).abs() < 1e-12, "S = V gives 0");
    let one = VertexSet::new(vec![1], &c4).unwrap();
    assert!((conductance_exact(&c4, &one, 2) - 0.5).abs() < 1e-12, "C4 r=2 gives 1/2");
    let tri = LabeledMultigraph::from_edge_list(3, &[(1, 2), (2, 3), (3, 1)]).unwrap();
    let one_t = VertexSet::new(vec![1], &tri).unwrap();
    assert!(
        (conductance_exact(&tri, &one_t, 20) - 2.0 / 3.0).abs() < 1e-6,
        "triangle r=20 gives 2/3"
    );

    // Estimate sandwich on the walk-power corpus.
    let corpus = walk_power_corpus();
    for &lambda in &[0.3f64, 0.5] {
        for &r in &[2u64, 3, 4, 5] {
            for (gi, g) in corpus.iter().enumerate() {
                let params = PowerParams::new(r, 0.9).relaxed(lambda).seeded(70 + gi as u64);
                let oracle = approx_power(g.clone(), &params).expect("oracle");
                let l_apx = oracle
                    .dense_normalized_laplacian(10_000_000)
                    .expect("dense laplacian under budget");
                let s = VertexSet::new(vec![1], g).unwrap();
                let estimate = quadratic_conductance(g, &s, &l_apx);
                let exact = conductance_exact(g, &s, r);
                let eps = oracle.ledger.eps_total;
                assert!(
                    estimate >= (1.0 - eps) * exact - 1e-9
                        && estimate <= (1.0 + eps) * exact + 1e-9,
                    "lambda {lambda} r {r} graph {gi}: estimate {estimate} outside (1±{eps})*{exact}"
                );
            }
        }
    }
    let dt = start.elapsed().as_secs_f64();
    println!("acceptance 7 (conductance): pass in {dt:.1}s");
}

#[test]
fn criterion_08_spectral_property_suites() {
    let start = Instant::now();
    let trials = 100;
    let tol = 1e-9;
    let mut rng = SplitMix64::new(0xC8);

    // Composition properties on random PSD quadruples.
    for _ in 0..trials {
        let n = 2 + rng.next_below(7) as usize; // n <= 8
        let (y, x) = testing::random_psd_pair(n, &mut rng, 0.3);
        let (w_ref, w) = testing::random_psd_pair(n, &mut rng, 0.2);
        // Keep Z comfortably positive definite so rank detection stays
        // unambiguous across sums and conjugations.
        let z = testing::random_psd(n, &mut rng).add(&SymmetricMatrix::identity(n).scale(0.05));

        let e_xy = measure_sym_approx(&y, &x).unwrap().epsilon;

        // Part 1: reversal.
        if e_xy < 1.0 {
            let e_rev = measure_sym_approx(&x, &y).unwrap().epsilon;
            assert!(e_rev <= reverse_eps(e_xy).unwrap() + tol, "part 1");
        }

        // Part 2: transitivity through Y.
        let e_yz = measure_sym_approx(&z, &y).unwrap().epsilon;
        if e_yz.is_finite() {
            let e_xz = measure_sym_approx(&z, &x).unwrap().epsilon;
            assert!(e_xz <= compose_eps(e_xy, e_yz) + tol, "part 2");
        }

        // Part 3: conjugation. The property holds for every V; draw a
        // well-conditioned one so the rank cutoff in the measurement does
        // not misclassify near-kernel directions.
        let v = loop {
            let cand = Matrix::from_fn(n, |_, _| 2.0 * rng.next_f64() - 1.0);
            let gram = cand.transpose().matmul(&cand).symmetrized();
            if eigen_sym(&gram).min_eigenvalue() >= 0.05 {
                break cand;
            }
        };
        let conj =
            |m: &SymmetricMatrix<f64>| v.transpose().matmul(m.as_matrix()).matmul(&v).symmetrized();
        let e_conj = measure_sym_approx(&conj(&y), &conj(&x)).unwrap().epsilon;
        assert!(e_conj <= e_xy + tol, "part 3: {e_conj} vs {e_xy}");

        // Part 4: adding a common PSD term.
        let e_add = measure_sym_approx(&y.add(&z), &x.add(&z)).unwrap().epsilon;
        assert!(e_add <= e_xy + tol, "part 4");

        // Part 5: summing two approximations.
        let e_w = measure_sym_approx(&w_ref, &w).unwrap().epsilon;
        let e_sum = measure_sym_approx(&y.add(&w_ref), &x.add(&w)).unwrap().epsilon;
        assert!(e_sum <= e_xy.max(e_w) + tol, "part 5");

        // Part 6: nonnegative scaling.
        let c = 0.25 + 2.0 * rng.next_f64();
        let e_scaled = measure_sym_approx(&y.scale(c), &x.scale(c)).unwrap().epsilon;
        assert!((e_scaled - e_xy).abs() <= tol, "part 6");
    }

    // Expander bridge: measured approximation of the complete graph
    // equals lambda.
    for _ in 0..trials {
        let n = 2 + rng.next_below(7) as usize;
        let mut d = 2 + rng.next_below(3);
        if (n as u64 * d) % 2 == 1 {
            d += 1;
        }
        let h = testing::random_multigraph_with_degrees(&vec![d; n], &mut rng);
        let lam: f64 = lambda_of(&h).unwrap();
        let j = Matrix::from_fn(n, |_, _| 1.0 / n as f64).symmetrized();
        let l_j = SymmetricMatrix::identity(n).sub(&j);
        let l_h = SymmetricMatrix::identity(n).sub(&h.normalized_adjacency());
        let measured = measure_sym_approx(&l_j, &l_h).unwrap().epsilon;
        assert!((measured - lam).abs() <= 1e-8, "expander bridge: {measured} vs {lam}");
    }

    // Symmetric/directed equivalence on symmetric PSD pairs.
    for _ in 0..trials {
        let n = 2 + rng.next_below(7) as usize;
        let (l, lt) = testing::random_psd_pair(n, &mut rng, 0.4);
        let sym = measure_sym_approx(&l, &lt).unwrap().epsilon;
        let dir = measure_dir_approx(l.as_matrix(), lt.as_matrix()).unwrap().epsilon;
        assert!((sym - dir).abs() <= tol, "directed equivalence: {sym} vs {dir}");
    }

    // Squaring, plus-one and power-stability properties.
    let clamp =
        |m: &SymmetricMatrix<f64>, lo: f64, hi: f64| eigen_sym(m).map_rebuild(|w| w.clamp(lo, hi));
    for _ in 0..trials {
        let n = 2 + rng.next_below(7) as usize;
        let id = SymmetricMatrix::<f64>::identity(n);

        // Square preservation: N PSD contraction, N~ symmetric contraction.
        let n_mat = clamp(&testing::random_symmetric(n, &mut rng, 1.0), 0.0, 0.95);
        let noise = testing::random_symmetric(n, &mut rng, 0.1);
        let n_tilde = clamp(&n_mat.add(&noise), -1.0, 1.0);
        let e = measure_sym_approx(&id.sub(&n_mat), &id.sub(&n_tilde)).unwrap().epsilon;
        let sq = |m: &SymmetricMatrix<f64>| m.as_matrix().matmul(m.as_matrix()).symmetrized();
        let e_sq =
            measure_sym_approx(&id.sub(&sq(&n_mat)), &id.sub(&sq(&n_tilde))).unwrap().epsilon;
        assert!(e_sq <= e + tol, "square preservation: {e_sq} vs {e}");

        // Plus preservation on I + N.
        let e_plus = measure_sym_approx(&id.add(&n_mat), &id.add(&n_tilde)).unwrap().epsilon;
        assert!(e_plus <= e + tol, "shift preservation: {e_plus} vs {e}");

        // Block quadratic form: min over y is attained at y = Nx.
        let x = testing::random_vector(n, &mut rng);
        let block = |yv: &[f64]| {
            let nm = n_mat.as_matrix();
            let xx: f64 = x.iter().map(|a| a * a).sum();
            let yy: f64 = yv.iter().map(|a| a * a).sum();
            let cross: f64 = nm.mul_vec(&x).iter().zip(yv).map(|(a, b)| a * b).sum();
            xx + yy - 2.0 * cross
        };
        let y_star = n_mat.mul_vec(&x);
        let want = {
            let n2 = sq(&n_mat);
            let image = n2.mul_vec(&x);
            x.iter().zip(&image).map(|(a, b)| a * b).sum::<f64>()
        };
        let at_min = block(&y_star);
        assert!((at_min - (x.iter().map(|a| a * a).sum::<f64>() - want)).abs() <= 1e-8);
        for _ in 0..5 {
            let y = testing::random_vector(n, &mut rng);
            assert!(block(&y) + 1e-8 >= at_min, "block form below its minimum");
        }

        // Plus-one with a commuting pair built from one base matrix.
        let s = clamp(&testing::random_symmetric(n, &mut rng, 1.0), -0.92, 0.92);
        let n1 = sq(&s);
        let n2 = s.clone();
        let noise = testing::random_symmetric(n, &mut rng, 0.08);
        let n_tilde = clamp(&n1.add(&noise), -1.0, 1.0);
        let e = measure_sym_approx(&id.sub(&n1), &id.sub(&n_tilde)).unwrap().epsilon;
        let anti = n_tilde
            .as_matrix()
            .matmul(n2.as_matrix())
            .add(&n2.as_matrix().matmul(n_tilde.as_matrix()))
            .scale(0.5);
        let target = id.sub(&n2.as_matrix().matmul(n1.as_matrix()).symmetrized());
        let e_plus1 =
            measure_sym_approx(&target, &id.as_matrix().sub(&anti).symmetrized()).unwrap().epsilon;
        assert!(e_plus1 <= e + tol, "plus-one preservation: {e_plus1} vs {e}");

        // Power stability under mutual approximation.
        let a = clamp(&testing::random_symmetric(n, &mut rng, 1.0), 0.0, 0.9);
        let tiny = testing::random_symmetric(n, &mut rng, 0.004);
        let b = clamp(&a.add(&tiny), 0.0, 0.9);
        let e_fwd = measure_sym_approx(&id.sub(&a), &id.sub(&b)).unwrap().epsilon;
        let e_bwd = measure_sym_approx(&id.sub(&b), &id.sub(&a)).unwrap().epsilon;
        let e_mut = e_fwd.max(e_bwd);
        let r = 2 + rng.next_below(63);
        let ell = (64 - r.leading_zeros()) as f64;
        if e_mut <= 1.0 / (2.0 * ell) {
            let pow = |m: &SymmetricMatrix<f64>| m.as_matrix().pow(r).symmetrized();
            let e_pow = measure_sym_approx(&id.sub(&pow(&b)), &id.sub(&pow(&a))).unwrap().epsilon;
            assert!(
                e_pow <= 2.0 * e_mut * ell + tol,
                "power stability: {e_pow} vs 2*{e_mut}*{ell}"
            );
        }
    }

    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 60.0, "criterion 8 took {dt:.1}s, budget 60s");
    println!("acceptance 8 (spectral property suites): pass in {dt:.1}s");
}

#[test]
fn criterion_09_odd_step_pipeline() {
    let start = Instant::now();

    // No-sampling regime: the pipeline reproduces I - (M~M + MM~)/2
    // exactly and lands within the even input's quality of I - M^3.
    let g = LabeledMultigraph::from_edge_list(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 1)])
        .unwrap();
    let g = Arc::new(g);
    let params = PowerParams::new(2, 0.9).relaxed(0.3).seeded(90);
    let oracle = approx_power(g.clone(), &params).expect("even oracle");
    let even = oracle.materialize(10_000_000).expect("materialize even");
    let e_in = measure_sym_approx(&walk_laplacian(&g, 2), &even.normalized_laplacian())
        .expect("even quality")
        .epsilon;
    let a_even = even.adjacency::<f64>();
    let outcome =
        walkspace::sparsify::odd_step(&g, &a_even, 0.75, 9, 1e12, 1e12).expect("odd step");
    assert!(outcome.exact, "expected the no-sampling regime");
    let m = g.normalized_adjacency::<f64>();
    let m_tilde = even.normalized_adjacency::<f64>();
    let anti = m_tilde
        .as_matrix()
        .matmul(m.as_matrix())
        .add(&m.as_matrix().matmul(m_tilde.as_matrix()))
        .scale(0.5);
    let expected = Matrix::identity(5).sub(&anti).symmetrized();
    assert!(
        outcome.normalized.max_abs_diff(expected.as_matrix()) <= 1e-10,
        "exact regime should reproduce the anticommutator form"
    );
    let measured = measure_sym_approx(&walk_laplacian(&g, 3), &outcome.normalized)
        .expect("measure vs I - M^3")
        .epsilon;
    assert!(
        measured <= e_in + 1e-9,
        "plus-one preservation: measured {measured} vs input quality {e_in}"
    );

    // Sampled regime: n = 32 with budgets small enough to force genuine
    // sampling in both stages; >= 90/100 seeds must pass the directed and
    // symmetric checks, and the output must respect the nonzero budget.
    let n = 32usize;
    let edges: Vec<(usize, usize)> =
        (1..=n).flat_map(|u| ((u + 1)..=n).map(move |v| (u, v))).collect();
    let k32 = LabeledMultigraph::from_edge_list(n, &edges).unwrap();
    let a_even = walkspace::sparsify::exact_even_adjacency(&k32, 2);
    let (factors, _) = walkspace::sparsify::product_decompose(&k32, &a_even).expect("decompose");
    let q_exact = factors.iter().fold(Matrix::zeros(n), |acc, f| acc.add(&f.laplacian()));
    let l_true = walk_laplacian(&k32, 3);
    let eps = 0.75;
    let (c_factor, c_final) = (0.02, 0.05);
    let mut passes = 0;
    let mut sampled_runs = 0;
    let trials = 100u64;
    for seed in 0..trials {
        let outcome = walkspace::sparsify::odd_step(&k32, &a_even, eps, seed, c_factor, c_final)
            .expect("odd step");
        if !outcome.exact {
            sampled_runs += 1;
        }
        let budget = 8.0 * n as f64 * ((n + 1) as f64).ln() / (eps * eps);
        assert!(
            (outcome.nnz as f64) <= budget,
            "seed {seed}: nnz {} above budget {budget}",
            outcome.nnz
        );
        // Reconstruct the sampled product sum from the same seed split.
        let q_tilde = factors.iter().fold(Matrix::zeros(n), |acc, f| {
            let s = SplitMix64::derive(seed, &[f.index as u64]).next_u64();
            acc.add(&walkspace::sparsify::sparsify_product(f, eps / 8.0, s, c_factor).unwrap())
        });
        let dir_ok = match measure_dir_approx(&q_exact, &q_tilde) {
            Ok(report) => report.kernel_ok && report.epsilon <= eps,
            Err(_) => false,
        };
        let sym_ok = match measure_sym_approx(&l_true, &outcome.normalized) {
            Ok(report) => report.kernel_ok && report.epsilon <= eps,
            Err(_) => false,
        };
        if dir_ok && sym_ok {
            passes += 1;
        }
    }
    assert_eq!(sampled_runs, trials, "every run should leave the exact regime");
    assert!(passes >= 90, "pass rate {passes}/{trials}");

    let dt = start.elapsed().as_secs_f64();
    println!(
        "acceptance 9 (odd-step pipeline): pass in {dt:.1}s (sampled-regime rate {passes}/{trials})"
    );
}
