//! Heuristic upper bounds for StQPs: fixed-step exponential replicator
//! dynamics with seeded multistart.
//!
//! The multiplicative update
//!
//! ```text
//! xᵢ ← xᵢ · exp(−θ(Qx)ᵢ) / Σⱼ xⱼ · exp(−θ(Qx)ⱼ)
//! ```
//!
//! keeps iterates on the simplex and, in its maximization form, is the
//! classical exponential replicator; applying it to −Q turns it into a
//! descent heuristic. Fixed steps carry no monotonicity guarantee, so the
//! reported value is the best iterate encountered rather than the last one.

use crate::bounds::{BoundMethod, BoundResult};
use crate::linalg::SymMatrix;
use crate::rng::SplitMix64;

#[derive(Debug, Clone)]
pub struct ReplicatorOptions {
    /// Fixed step θ of the exponential update.
    pub theta: f64,
    pub max_iter: usize,
    /// Stop when the sup-norm change of the iterate falls below this.
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ReplicatorOptions {
    fn default() -> Self {
        ReplicatorOptions {
            theta: 0.05,
            max_iter: 50_000,
            tol: 1e-12,
            restarts: 10,
            seed: 0,
        }
    }
}

/// Runs the replicator dynamics from `x0` (must lie on the simplex within
/// 1e-12). Returns the best point encountered and its objective value.
pub fn replicator_run(q: &SymMatrix, x0: &[f64], opts: &ReplicatorOptions) -> (Vec<f64>, f64) {
    let m = q.dim();
    assert_eq!(x0.len(), m, "start point has wrong dimension");
    debug_assert!(
        x0.iter().all(|&v| v >= -1e-12) && (x0.iter().sum::<f64>() - 1.0).abs() <= 1e-12,
        "start point is not on the simplex"
    );

    let mut x = x0.to_vec();
    let mut best_x = x.clone();
    let mut best_val = f64::INFINITY;

    for _ in 0..opts.max_iter {
        let g = q.matvec(&x);
        let val = crate::linalg::dot(&g, &x); // xᵀQx from the same matvec
        if val < best_val {
            best_val = val;
            best_x.copy_from_slice(&x);
        }
        // shifting the exponent by its minimum cancels in the normalization
        // and keeps exp() in range for badly scaled matrices
        let gmin = g.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut sum = 0.0;
        let mut next: Vec<f64> = x
            .iter()
            .zip(&g)
            .map(|(&xi, &gi)| {
                let w = xi * (-opts.theta * (gi - gmin)).exp();
                sum += w;
                w
            })
            .collect();
        let mut delta = 0.0f64;
        for (nv, xv) in next.iter_mut().zip(&x) {
            *nv /= sum;
            delta = delta.max((*nv - xv).abs());
        }
        x = next;
        if delta <= opts.tol {
            break;
        }
    }
    let val = q.quad_form(&x);
    if val < best_val {
        best_val = val;
        best_x = x;
    }
    (best_x, best_val)
}

/// Best value over `opts.restarts` random simplex starts plus the
/// barycenter; an upper bound on the exact StQP optimum. Restart r draws
/// its start from the PRNG stream `(seed, r)`, so the result does not
/// depend on evaluation order.
pub fn reference_solution(q: &SymMatrix, opts: &ReplicatorOptions) -> BoundResult {
    let m = q.dim();
    let barycenter = vec![1.0 / m as f64; m];
    let (_, mut best_val) = replicator_run(q, &barycenter, opts);

    for r in 0..opts.restarts {
        let mut g = SplitMix64::derive(opts.seed, r as u64);
        let x0 = g.next_simplex_point(m);
        let (_, v) = replicator_run(q, &x0, opts);
        if v < best_val {
            best_val = v;
        }
    }

    BoundResult {
        value: best_val,
        method: BoundMethod::RefUpper,
        certificate: None,
        stats: None,
        warning: None,
    }
}
