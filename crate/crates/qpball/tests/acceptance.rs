//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`). Heavy
//! shared computations (the ordering and oracle suites) run once and are
//! reused across criteria, including the certificate audit.

use std::panic::AssertUnwindSafe;
use std::time::{Duration, Instant};

use once_cell::sync::Lazy;
use rayon::prelude::*;

use qpball::bench::{gen_instance, run_campaign, BenchConfig, BenchSummary, Dist};
use qpball::bounds::{
    eigenvalue_bound, l1_bound_cop, lp_cop_bound, lp_upper_bound, nesterov_bound,
    small_cop_bound, verify_certificate, Certificate,
};
use qpball::conic::SolverOptions;
use qpball::linalg::min_eigenvalue;
use qpball::local_search::{reference_solution, ReplicatorOptions};
use qpball::oracle::{l1_exact, simplex_restricted_exact};
use qpball::reformulation::{flip_off_diagonal_blocks, lift_to_stqp, L1Instance};
use qpball::rng::SplitMix64;
use qpball::SymMatrix;

fn criterion<F: FnOnce()>(n: usize, desc: &str, body: F) {
    let outcome = std::panic::catch_unwind(AssertUnwindSafe(body));
    match outcome {
        Ok(()) => println!("criterion {n} ({desc}): PASS"),
        Err(e) => {
            println!("criterion {n} ({desc}): FAIL");
            std::panic::resume_unwind(e);
        }
    }
}

fn strictex(a: f64) -> SymMatrix {
    SymMatrix::from_rows(&[
        vec![-1.0, a, -1.0],
        vec![a, -1.0, -1.0],
        vec![-1.0, -1.0, -1.0],
    ])
    .unwrap()
}

fn pnormex() -> SymMatrix {
    SymMatrix::from_rows(&[
        vec![1.0, -1.0, 1.0],
        vec![-1.0, 1.0, 1.0],
        vec![1.0, 1.0, 1.0],
    ])
    .unwrap()
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

struct CertCase {
    q: SymMatrix,
    cert: Certificate,
    tag: String,
}

// ---- paper instances (criteria 1-4) ----

struct SmallResults {
    c1_nest: f64,
    c1_cop: f64,
    c1_exact: f64,
    c1_elapsed: Duration,
    c2_nest: f64,
    c2_cop: f64,
    c2_small: f64,
    c3_small: f64,
    c3_small_warned: bool,
    c3_exact: f64,
    c4_cop: f64,
    c4_lam_min: f64,
    /// (p, lower, upper) over the 11-point grid.
    c4_grid: Vec<(f64, f64, f64)>,
    certs: Vec<CertCase>,
}

static SMALL: Lazy<SmallResults> = Lazy::new(|| {
    let mut certs = Vec::new();
    let opts = opts();

    let a1 = L1Instance::homogeneous(strictex(1.0));
    let q1 = lift_to_stqp(&a1).q;
    let t0 = Instant::now();
    let c1_nest = nesterov_bound(&strictex(1.0), &opts).unwrap();
    let c1_cop = l1_bound_cop(&a1, &opts).unwrap();
    let c1_exact = l1_exact(&a1).unwrap().0;
    let c1_elapsed = t0.elapsed();
    certs.push(CertCase {
        q: q1,
        cert: c1_cop.certificate.clone().unwrap(),
        tag: "criterion1 cop".into(),
    });

    let a0 = L1Instance::homogeneous(strictex(0.0));
    let q0 = lift_to_stqp(&a0).q;
    let c2_nest = nesterov_bound(&strictex(0.0), &opts).unwrap();
    let c2_cop = l1_bound_cop(&a0, &opts).unwrap();
    let c2_small = small_cop_bound(&strictex(0.0), &opts).unwrap();
    certs.push(CertCase {
        q: q0,
        cert: c2_cop.certificate.clone().unwrap(),
        tag: "criterion2 cop".into(),
    });
    certs.push(CertCase {
        q: strictex(0.0),
        cert: c2_small.certificate.clone().unwrap(),
        tag: "criterion2 smallcop".into(),
    });

    let a2 = L1Instance::homogeneous(strictex(2.0));
    let c3_small = small_cop_bound(&strictex(2.0), &opts).unwrap();
    let c3_exact = l1_exact(&a2).unwrap().0;
    certs.push(CertCase {
        q: strictex(2.0),
        cert: c3_small.certificate.clone().unwrap(),
        tag: "criterion3 smallcop".into(),
    });

    let c16 = pnormex();
    let q16 = lift_to_stqp(&L1Instance::homogeneous(c16.clone())).q;
    let c4_cop = qpball::bounds::cop_bound(&q16, &opts).unwrap();
    let c4_lam_min = eigenvalue_bound(&c16).unwrap().value;
    certs.push(CertCase {
        q: q16.clone(),
        cert: c4_cop.certificate.clone().unwrap(),
        tag: "criterion4 cop".into(),
    });
    let mut c4_grid = Vec::new();
    for k in 0..=10 {
        let p = 1.0 + 0.1 * k as f64;
        let lower = lp_cop_bound(&c16, p, &opts).unwrap();
        let upper = lp_upper_bound(&c16, p).unwrap();
        certs.push(CertCase {
            q: q16.clone(),
            cert: lower.certificate.clone().unwrap(),
            tag: format!("criterion4 lp p={p}"),
        });
        c4_grid.push((p, lower.value, upper.value));
    }

    SmallResults {
        c1_nest: c1_nest.value,
        c1_cop: c1_cop.value,
        c1_exact,
        c1_elapsed,
        c2_nest: c2_nest.value,
        c2_cop: c2_cop.value,
        c2_small: c2_small.value,
        c3_small: c3_small.value,
        c3_small_warned: c3_small.warning.is_some(),
        c3_exact,
        c4_cop: c4_cop.value,
        c4_lam_min,
        c4_grid,
        certs,
    }
});

// ---- ordering suite (criterion 5) ----

struct OrderingRow {
    scale: f64,
    nest: f64,
    cop: f64,
    reference: f64,
}

struct OrderingSuite {
    rows: Vec<OrderingRow>,
    certs: Vec<CertCase>,
    elapsed: Duration,
}

const SUITE5_SEED_N5: u64 = 1001;
const SUITE5_SEED_N10: u64 = 1002;

static SUITE5: Lazy<OrderingSuite> = Lazy::new(|| {
    let t0 = Instant::now();
    let opts = opts();
    let eval = |seed: u64, dim: usize, index: usize| {
        let c = gen_instance(seed, index, dim, Dist::NormalUnit);
        let inst = L1Instance::homogeneous(c.clone());
        let q = lift_to_stqp(&inst).q;
        let cop = l1_bound_cop(&inst, &opts).unwrap();
        let nest = nesterov_bound(&c, &opts).unwrap();
        let rep = ReplicatorOptions {
            restarts: 20,
            seed: SplitMix64::derive(seed, index as u64).next_u64(),
            ..Default::default()
        };
        let reference = reference_solution(&q, &rep);
        let row = OrderingRow {
            scale: c.max_abs().max(1.0),
            nest: nest.value,
            cop: cop.value,
            reference: reference.value,
        };
        let cert = CertCase {
            q,
            cert: cop.certificate.unwrap(),
            tag: format!("suite5 dim={dim} index={index}"),
        };
        (row, cert)
    };

    let mut results: Vec<(OrderingRow, CertCase)> = (0..1000usize)
        .into_par_iter()
        .map(|i| eval(SUITE5_SEED_N5, 5, i))
        .collect();
    results.extend(
        (0..200usize)
            .into_par_iter()
            .map(|i| eval(SUITE5_SEED_N10, 10, i))
            .collect::<Vec<_>>(),
    );

    let mut rows = Vec::with_capacity(results.len());
    let mut certs = Vec::with_capacity(results.len());
    for (row, cert) in results {
        rows.push(row);
        certs.push(cert);
    }
    OrderingSuite {
        rows,
        certs,
        elapsed: t0.elapsed(),
    }
});

// ---- oracle-equivalence suite (criterion 6) ----

struct OracleRow {
    cop: f64,
    exact: f64,
    reference: f64,
}

struct OracleSuite {
    rows: Vec<OracleRow>,
    certs: Vec<CertCase>,
}

const SUITE6_SEED: u64 = 1003;

static SUITE6: Lazy<OracleSuite> = Lazy::new(|| {
    let opts = opts();
    let results: Vec<(OracleRow, CertCase)> = (0..300usize)
        .into_par_iter()
        .map(|i| {
            let n = 2 + i % 3;
            let c = gen_instance(SUITE6_SEED, i, n, Dist::NormalUnit);
            let inst = L1Instance::homogeneous(c.clone());
            let q = lift_to_stqp(&inst).q;
            let cop = l1_bound_cop(&inst, &opts).unwrap();
            let exact = l1_exact(&inst).unwrap().0;
            let rep = ReplicatorOptions {
                seed: SplitMix64::derive(SUITE6_SEED, i as u64).next_u64(),
                ..Default::default()
            };
            let reference = reference_solution(&q, &rep);
            (
                OracleRow {
                    cop: cop.value,
                    exact,
                    reference: reference.value,
                },
                CertCase {
                    q,
                    cert: cop.certificate.unwrap(),
                    tag: format!("suite6 index={i}"),
                },
            )
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut certs = Vec::with_capacity(results.len());
    for (row, cert) in results {
        rows.push(row);
        certs.push(cert);
    }
    OracleSuite { rows, certs }
});

// ---- soft Table-1 reproduction (criterion 8) ----

static SUITE8_DIM10: Lazy<BenchSummary> =
    Lazy::new(|| run_campaign(&BenchConfig::new(10, 1000, 42)).1);
static SUITE8_DIM20: Lazy<BenchSummary> =
    Lazy::new(|| run_campaign(&BenchConfig::new(20, 200, 42)).1);

// ---- the criteria ----

#[test]
fn criterion_1_strict_instance_a1() {
    criterion(1, "a=1 instance: nest -4/3, cop -1, exact -1, under 1s", || {
        let r = &*SMALL;
        assert!(
            (r.c1_nest + 4.0 / 3.0).abs() <= 1e-4,
            "nest {} vs -4/3",
            r.c1_nest
        );
        assert!((r.c1_cop + 1.0).abs() <= 1e-4, "cop {}", r.c1_cop);
        assert!((r.c1_exact + 1.0).abs() <= 1e-9, "exact {}", r.c1_exact);
        assert!(
            r.c1_elapsed < Duration::from_secs(1),
            "took {:?}",
            r.c1_elapsed
        );
    });
}

#[test]
fn criterion_2_strict_instance_a0() {
    criterion(2, "a=0 instance: nest -8/7, lifted == small == -1", || {
        let r = &*SMALL;
        assert!(
            (r.c2_nest + 8.0 / 7.0).abs() <= 1e-3,
            "nest {} vs -8/7",
            r.c2_nest
        );
        assert!((r.c2_cop + 1.0).abs() <= 1e-4, "cop {}", r.c2_cop);
        assert!((r.c2_small + 1.0).abs() <= 1e-4, "small {}", r.c2_small);
    });
}

#[test]
fn criterion_3_strict_instance_a2() {
    criterion(3, "a=2 instance: small bound -1 exceeds exact -1.5, warned", || {
        let r = &*SMALL;
        assert!((r.c3_small + 1.0).abs() <= 1e-4, "small {}", r.c3_small);
        assert!((r.c3_exact + 1.5).abs() <= 1e-9, "exact {}", r.c3_exact);
        assert!(
            r.c3_small > r.c3_exact,
            "small bound failed to demonstrate invalidity"
        );
        assert!(r.c3_small_warned, "missing invalidity warning");
    });
}

#[test]
fn criterion_4_lp_equality_instance() {
    criterion(4, "lp instance: cop -1/3, eig -1, lower == upper on the grid", || {
        let r = &*SMALL;
        assert!((r.c4_cop + 1.0 / 3.0).abs() <= 1e-4, "cop {}", r.c4_cop);
        assert!((r.c4_lam_min + 1.0).abs() <= 1e-9, "eig {}", r.c4_lam_min);
        assert_eq!(r.c4_grid.len(), 11);
        for &(p, lower, upper) in &r.c4_grid {
            assert!(
                (lower - upper).abs() <= 1e-4,
                "p={p}: lower {lower} vs upper {upper}"
            );
        }
    });
}

#[test]
fn criterion_5_ordering_suite() {
    criterion(5, "1000 5x5 + 200 10x10: zero ordering violations", || {
        let s = &*SUITE5;
        assert_eq!(s.rows.len(), 1200);
        for (i, row) in s.rows.iter().enumerate() {
            let tol = 1e-6 * row.scale;
            assert!(
                row.nest <= row.cop + tol,
                "instance {i}: nest {} > cop {}",
                row.nest,
                row.cop
            );
            assert!(
                row.cop <= row.reference + tol,
                "instance {i}: cop {} > ref {}",
                row.cop,
                row.reference
            );
        }
        assert!(
            s.elapsed < Duration::from_secs(600),
            "suite took {:?}",
            s.elapsed
        );
    });
}

#[test]
fn criterion_6_oracle_equivalence_suite() {
    criterion(6, "300 instances n<=4: bound valid, heuristic tight >=90%", || {
        let s = &*SUITE6;
        assert_eq!(s.rows.len(), 300);
        let mut tight = 0usize;
        for (i, row) in s.rows.iter().enumerate() {
            assert!(
                row.cop <= row.exact + 1e-6,
                "instance {i}: cop {} above exact {}",
                row.cop,
                row.exact
            );
            assert!(
                row.reference >= row.exact - 1e-9,
                "instance {i}: heuristic {} below exact {}",
                row.reference,
                row.exact
            );
            if (row.reference - row.exact).abs() <= 1e-6 * row.exact.abs().max(1.0) {
                tight += 1;
            }
        }
        assert!(
            tight >= 270,
            "heuristic matched the oracle on only {tight}/300 instances"
        );
    });
}

#[test]
fn criterion_7_certificate_audit() {
    criterion(7, "all emitted certificates verify and bound sampled minima", || {
        let mut all: Vec<&CertCase> = Vec::new();
        all.extend(SMALL.certs.iter());
        all.extend(SUITE5.certs.iter());
        all.extend(SUITE6.certs.iter());
        assert!(all.len() > 1500);

        all.par_iter().enumerate().for_each(|(idx, case)| {
            assert!(
                verify_certificate(&case.q, &case.cert, 1e-8).unwrap(),
                "certificate failed verification: {}",
                case.tag
            );
            let m = case.q.dim();
            let mut g = SplitMix64::derive(7777, idx as u64);
            let mut sample_min = f64::INFINITY;
            for _ in 0..10_000 {
                let x = g.next_simplex_point(m);
                sample_min = sample_min.min(case.q.quad_form(&x));
            }
            assert!(
                case.cert.lambda <= sample_min,
                "{}: lambda {} above sampled minimum {sample_min}",
                case.tag,
                case.cert.lambda
            );
        });
    });
}

#[test]
fn criterion_8_table_reproduction() {
    criterion(8, "campaign statistics land in the published ranges", || {
        let s10 = &*SUITE8_DIM10;
        assert_eq!(s10.count, 1000);
        assert_eq!(s10.ordering_violations, 0);
        assert!(
            s10.frac_cop_exact >= 0.90,
            "frac_cop_exact {}",
            s10.frac_cop_exact
        );
        assert!(
            s10.frac_nest_exact <= 0.5,
            "frac_nest_exact {}",
            s10.frac_nest_exact
        );
        let mean10 = s10.mean_ratio.unwrap();
        assert!((0.90..=0.99).contains(&mean10), "mean ratio {mean10}");
        let min10 = s10.min_ratio.unwrap();
        assert!(min10 >= 0.6, "min ratio {min10}");

        let s20 = &*SUITE8_DIM20;
        assert_eq!(s20.count, 200);
        assert_eq!(s20.ordering_violations, 0);
        let mean20 = s20.mean_ratio.unwrap();
        assert!((0.85..=0.95).contains(&mean20), "mean ratio {mean20}");
    });
}

#[test]
fn criterion_9_block_structure_suite() {
    criterion(9, "500 doubly nonnegative blocks: flip and laplacian stay PSD", || {
        let mut g = SplitMix64::new(2026);
        for trial in 0..500 {
            let n = 2 + trial % 3;
            let m = 2 * n;
            let mut x = SymMatrix::zeros(m);
            for _ in 0..m {
                let y: Vec<f64> = (0..m).map(|_| g.next_f64()).collect();
                for i in 0..m {
                    for j in i..m {
                        x.set(i, j, x.get(i, j) + y[i] * y[j]);
                    }
                }
            }
            let tol = 1e-8 * x.frob_norm();
            let flipped = flip_off_diagonal_blocks(&x).unwrap();
            let lam_flip = min_eigenvalue(&flipped).unwrap();
            assert!(lam_flip >= -tol, "trial {trial}: flipped min eig {lam_flip}");
            let d = SymMatrix::from_diag(&x.row_sums());
            let lam_lap = min_eigenvalue(&d.sub(&flipped)).unwrap();
            assert!(lam_lap >= -tol, "trial {trial}: laplacian min eig {lam_lap}");
        }
    });
}

#[test]
fn criterion_10_sign_constrained_suite() {
    criterion(10, "500 sign-constrained instances: ball equals simplex exactly", || {
        let mut g = SplitMix64::new(2027);
        for trial in 0..500 {
            let n = 2 + trial % 5;
            let mut c = SymMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    c.set(i, j, -g.next_f64());
                }
            }
            let (ball, _) = l1_exact(&L1Instance::homogeneous(c.clone())).unwrap();
            let (simplex, _) = simplex_restricted_exact(&c).unwrap();
            assert!(
                (ball - simplex).abs() <= 1e-9,
                "trial {trial} (n={n}): ball {ball} vs simplex {simplex}"
            );
        }
    });
}
