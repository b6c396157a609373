//! First-order splitting (ADMM) solver for the two SDP shapes the bounds
//! need:
//!
//! * the doubly-nonnegative StQP relaxation
//!   `min { Q•X : E•X = 1, X ∈ P ∩ N }`, split as a PSD block and an
//!   entrywise-simplex block, and
//! * the comparison SDP `min { C•W : Diag(u) ⪰ W ⪰ O, u ∈ Δⁿ }`, split as
//!   consensus over three cone copies of (W, u).
//!
//! Both solvers use only closed-form projections (PSD projection via the
//! eigendecomposition, sort-based simplex projection), over-relaxation 1.6,
//! and residual-balancing adaptation of the penalty parameter. A solver
//! invocation is single-threaded and deterministic.

use std::time::Instant;

use crate::error::Result;
use crate::linalg::{dot, norm2, project_psd, project_psd_in_place, SymMatrix};

/// Over-relaxation factor applied to the first-block iterate.
const OVER_RELAX: f64 = 1.6;
/// Penalty adaptation: rescale when the residual ratio exceeds this.
const RHO_RATIO: f64 = 10.0;
const RHO_FACTOR: f64 = 2.0;
const RHO_MIN: f64 = 1e-4;
const RHO_MAX: f64 = 1e4;
/// Penalty adaptation happens at most every this many iterations.
const RHO_INTERVAL: usize = 100;

/// Options shared by both solvers.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    /// Initial penalty parameter (adapted during the run).
    pub rho: f64,
    /// Convergence is tested every `check_interval` iterations.
    pub check_interval: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            eps_abs: 1e-9,
            eps_rel: 1e-8,
            max_iter: 200_000,
            rho: 1.0,
            check_interval: 50,
        }
    }
}

impl SolverOptions {
    fn validate(&self) {
        assert!(self.eps_abs > 0.0 && self.eps_rel > 0.0, "tolerances must be positive");
        assert!(self.max_iter >= 1, "max_iter must be at least 1");
        assert!(self.rho > 0.0, "rho must be positive");
        assert!(self.check_interval >= 1, "check_interval must be at least 1");
    }
}

/// Iteration outcome reported alongside every solution.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize, PartialEq)]
pub struct SolverStats {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub converged: bool,
    pub runtime_ms: f64,
}

/// Solution of the doubly-nonnegative StQP relaxation.
///
/// `x` is entrywise nonnegative with entries summing to one (exactly, by
/// construction) and positive semidefinite up to the primal residual.
/// `lambda_hat` and `s_hat` are multiplier estimates recovered from the
/// simplex-projection threshold and the scaled dual variable; they seed the
/// certificate construction downstream and need not be exact here.
#[derive(Debug, Clone)]
pub struct DnnSolution {
    pub x: SymMatrix,
    pub objective: f64,
    pub lambda_hat: f64,
    pub s_hat: SymMatrix,
    pub stats: SolverStats,
}

/// Solution of the comparison SDP: `w` with `0 ⪯ w ⪯ Diag(u)`, `u ∈ Δⁿ`,
/// all within the reported residuals.
#[derive(Debug, Clone)]
pub struct NesterovSolution {
    pub w: SymMatrix,
    pub u: Vec<f64>,
    pub objective: f64,
    pub stats: SolverStats,
}

/// Projects `v` onto the probability simplex, writing into `out` and
/// returning the threshold τ of the sort-based projection
/// (`out[i] = max(v[i] − τ, 0)`).
pub fn project_simplex_with_threshold(v: &[f64], out: &mut [f64]) -> f64 {
    debug_assert_eq!(v.len(), out.len());
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut tau = f64::NEG_INFINITY;
    for (j, &uj) in sorted.iter().enumerate() {
        cumsum += uj;
        let cand = (cumsum - 1.0) / (j + 1) as f64;
        if uj - cand > 0.0 {
            tau = cand;
        } else {
            break;
        }
    }
    for (o, &vi) in out.iter_mut().zip(v) {
        *o = (vi - tau).max(0.0);
    }
    tau
}

/// Frobenius-nearest symmetric matrix with nonnegative entries summing to
/// one. Symmetry of the input is preserved because equal entries project to
/// equal values.
pub fn project_entrywise_simplex(a: &SymMatrix) -> SymMatrix {
    let n = a.dim();
    let mut out = vec![0.0; n * n];
    project_simplex_with_threshold(a.as_slice(), &mut out);
    SymMatrix::new(n, out).expect("projection preserves symmetry and finiteness")
}

/// Solves `min { Q•X : E•X = 1, X ∈ P ∩ N }` by two-block ADMM:
/// PSD projection for the X block, entrywise-simplex projection for the Z
/// block, scaled dual update in between.
///
/// On iteration exhaustion the best iterate seen (smallest relative
/// residual) is returned with `stats.converged == false`; callers that need
/// a guaranteed lower bound must go through the certificate shift in the
/// bounds module rather than trusting the raw objective.
pub fn solve_dnn_stqp(q: &SymMatrix, opts: &SolverOptions) -> Result<DnnSolution> {
    opts.validate();
    let start = Instant::now();
    let m = q.dim();
    let mm = m * m;

    // work on data scaled to max|Q| = 1 so tolerances mean the same thing
    // across instances; unscale the outputs at the end
    let t = if q.max_abs() > 0.0 { q.max_abs() } else { 1.0 };
    let qs: Vec<f64> = q.as_slice().iter().map(|v| v / t).collect();

    let mut rho = opts.rho;
    let mut z = vec![1.0 / mm as f64; mm];
    let mut z_prev = vec![0.0; mm];
    let mut u = vec![0.0; mm];
    let mut x = vec![0.0; mm];
    let mut xhat = vec![0.0; mm];
    let mut buf = vec![0.0; mm];
    let mut tau;
    let mut lambda_scaled = 0.0;

    let mut stats = SolverStats {
        iterations: 0,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
        converged: false,
        runtime_ms: 0.0,
    };
    // best iterate (by worst relative residual) for the non-converged path:
    // (score, z, y = rho·u, lambda_scaled, primal, dual)
    let mut best: Option<(f64, Vec<f64>, Vec<f64>, f64, f64, f64)> = None;

    for iter in 1..=opts.max_iter {
        stats.iterations = iter;

        for i in 0..mm {
            x[i] = z[i] - u[i];
        }
        project_psd_in_place(&mut x, m)?;
        for i in 0..mm {
            xhat[i] = OVER_RELAX * x[i] + (1.0 - OVER_RELAX) * z[i];
        }
        z_prev.copy_from_slice(&z);
        for i in 0..mm {
            buf[i] = xhat[i] + u[i] - qs[i] / rho;
        }
        tau = project_simplex_with_threshold(&buf, &mut z);
        lambda_scaled = -rho * tau;
        for i in 0..mm {
            u[i] += xhat[i] - z[i];
        }

        if iter % opts.check_interval == 0 || iter == opts.max_iter {
            let r: f64 = x
                .iter()
                .zip(&z)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let s = rho
                * z.iter()
                    .zip(&z_prev)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
            let eps_pri = opts.eps_abs + opts.eps_rel * norm2(&x).max(norm2(&z));
            let eps_dual = opts.eps_abs + opts.eps_rel * rho * norm2(&u);
            stats.primal_residual = r;
            stats.dual_residual = s;

            let score = (r / eps_pri).max(s / eps_dual);
            if best.as_ref().map_or(true, |b| score < b.0) {
                let y: Vec<f64> = u.iter().map(|v| v * rho).collect();
                best = Some((score, z.clone(), y, lambda_scaled, r, s));
            }
            if r <= eps_pri && s <= eps_dual {
                stats.converged = true;
                break;
            }

            if iter % RHO_INTERVAL == 0 {
                if r > RHO_RATIO * s && rho < RHO_MAX {
                    rho *= RHO_FACTOR;
                    for v in &mut u {
                        *v /= RHO_FACTOR;
                    }
                } else if s > RHO_RATIO * r && rho > RHO_MIN {
                    rho /= RHO_FACTOR;
                    for v in &mut u {
                        *v *= RHO_FACTOR;
                    }
                }
            }
        }
    }

    let (z_out, y_out, lambda_out) = if stats.converged {
        (z, u.iter().map(|v| v * rho).collect::<Vec<f64>>(), lambda_scaled)
    } else {
        let (_, bz, by, blam, br, bs) = best.expect("at least one check ran");
        stats.primal_residual = br;
        stats.dual_residual = bs;
        (bz, by, blam)
    };

    let x_mat = SymMatrix::new(m, z_out)?;
    let objective = q.inner(&x_mat);
    let s_hat = project_psd(&SymMatrix::new(m, y_out)?)?.scale(t);
    stats.runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    Ok(DnnSolution {
        x: x_mat,
        objective,
        lambda_hat: lambda_out * t,
        s_hat,
        stats,
    })
}

/// Solves `min { C•W : Diag(u) ⪰ W ⪰ O, u ∈ Δⁿ }` by consensus ADMM.
///
/// The three cone copies are: W ⪰ 0 (PSD projection of W), M ⪰ 0 for the
/// rotated copy M = Diag(u) − W (plain PSD projection of M — the coupling
/// to (W, u) is linear and is resolved exactly in the consensus update, see
/// below), and u ∈ Δⁿ (sort-based projection). The consensus step minimizes
/// C•W plus the three quadratic coupling terms, which decouples into a
/// per-entry average carrying −C/ρ on the W component and a 2×2 solve per
/// diagonal index for (Wᵢᵢ, uᵢ).
pub fn solve_nesterov(c: &SymMatrix, opts: &SolverOptions) -> Result<NesterovSolution> {
    opts.validate();
    let start = Instant::now();
    let n = c.dim();
    let nn = n * n;

    let t = if c.max_abs() > 0.0 { c.max_abs() } else { 1.0 };
    let cs: Vec<f64> = c.as_slice().iter().map(|v| v / t).collect();

    let mut rho = opts.rho;
    // consensus variables
    let mut w = vec![0.0; nn];
    let mut uv = vec![1.0 / n as f64; n];
    for i in 0..n {
        w[i * n + i] = 1.0 / (2 * n) as f64;
    }
    // cone copies and scaled duals
    let mut g1 = w.clone();
    let mut g2: Vec<f64> = diag_minus(&uv, &w, n);
    let mut g3 = uv.clone();
    let mut d1 = vec![0.0; nn];
    let mut d2 = vec![0.0; nn];
    let mut d3 = vec![0.0; n];
    // scratch
    let mut h1 = vec![0.0; nn];
    let mut h2 = vec![0.0; nn];
    let mut h3 = vec![0.0; n];
    let mut w_prev = vec![0.0; nn];
    let mut m_prev;
    let mut u_prev = vec![0.0; n];

    let mut stats = SolverStats {
        iterations: 0,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
        converged: false,
        runtime_ms: 0.0,
    };
    let mut best: Option<(f64, Vec<f64>, Vec<f64>, f64, f64)> = None;

    for iter in 1..=opts.max_iter {
        stats.iterations = iter;
        let m_cur = diag_minus(&uv, &w, n);

        // cone copies
        for i in 0..nn {
            g1[i] = w[i] - d1[i];
            g2[i] = m_cur[i] - d2[i];
        }
        project_psd_in_place(&mut g1, n)?;
        project_psd_in_place(&mut g2, n)?;
        for i in 0..n {
            h3[i] = uv[i] - d3[i];
        }
        project_simplex_with_threshold(&h3.clone(), &mut g3);

        // over-relaxation against the previous consensus point
        for i in 0..nn {
            h1[i] = OVER_RELAX * g1[i] + (1.0 - OVER_RELAX) * w[i];
            h2[i] = OVER_RELAX * g2[i] + (1.0 - OVER_RELAX) * m_cur[i];
        }
        for i in 0..n {
            h3[i] = OVER_RELAX * g3[i] + (1.0 - OVER_RELAX) * uv[i];
        }

        // consensus update: minimize C•W + (ρ/2)(‖A1−W‖² + ‖A2−(Diag(u)−W)‖²
        // + ‖a3−u‖²) with A1 = ĝ1+D1, A2 = ĝ2+D2, a3 = ĝ3+d3
        w_prev.copy_from_slice(&w);
        m_prev = m_cur;
        u_prev.copy_from_slice(&uv);
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                let a1 = h1[idx] + d1[idx];
                let a2 = h2[idx] + d2[idx];
                if i != j {
                    w[idx] = 0.5 * (a1 - a2 - cs[idx] / rho);
                } else {
                    let r1 = a1 - a2 - cs[idx] / rho;
                    let r2 = a2 + (h3[i] + d3[i]);
                    w[idx] = (2.0 * r1 + r2) / 3.0;
                    uv[i] = (r1 + 2.0 * r2) / 3.0;
                }
            }
        }
        let m_new = diag_minus(&uv, &w, n);

        // dual updates
        for i in 0..nn {
            d1[i] += h1[i] - w[i];
            d2[i] += h2[i] - m_new[i];
        }
        for i in 0..n {
            d3[i] += h3[i] - uv[i];
        }

        if iter % opts.check_interval == 0 || iter == opts.max_iter {
            let r = (sq_dist(&g1, &w) + sq_dist(&g2, &m_new) + sq_dist(&g3, &uv)).sqrt();
            // dual residual ρ·‖Aᵀ(Az⁺ − Az)‖ with Aᵀ(P1,P2,p3) = (P1−P2, diag(P2)+p3)
            let mut s_sq = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let idx = i * n + j;
                    let p1 = w[idx] - w_prev[idx];
                    let p2 = m_new[idx] - m_prev[idx];
                    s_sq += (p1 - p2) * (p1 - p2);
                    if i == j {
                        let v = p2 + (uv[i] - u_prev[i]);
                        s_sq += v * v;
                    }
                }
            }
            let s = rho * s_sq.sqrt();

            let x_norm = (dot(&g1, &g1) + dot(&g2, &g2) + dot(&g3, &g3)).sqrt();
            let az_norm = (dot(&w, &w) + dot(&m_new, &m_new) + dot(&uv, &uv)).sqrt();
            let d_norm = (dot(&d1, &d1) + dot(&d2, &d2) + dot(&d3, &d3)).sqrt();
            let eps_pri = opts.eps_abs + opts.eps_rel * x_norm.max(az_norm);
            let eps_dual = opts.eps_abs + opts.eps_rel * rho * d_norm;
            stats.primal_residual = r;
            stats.dual_residual = s;

            let score = (r / eps_pri).max(s / eps_dual);
            if best.as_ref().map_or(true, |b| score < b.0) {
                best = Some((score, w.clone(), uv.clone(), r, s));
            }
            if r <= eps_pri && s <= eps_dual {
                stats.converged = true;
                break;
            }

            if iter % RHO_INTERVAL == 0 {
                if r > RHO_RATIO * s && rho < RHO_MAX {
                    rho *= RHO_FACTOR;
                    rescale(&mut d1, &mut d2, &mut d3, 1.0 / RHO_FACTOR);
                } else if s > RHO_RATIO * r && rho > RHO_MIN {
                    rho /= RHO_FACTOR;
                    rescale(&mut d1, &mut d2, &mut d3, RHO_FACTOR);
                }
            }
        }
    }

    let (w_out, u_out) = if stats.converged {
        (w, uv)
    } else {
        let (_, bw, bu, br, bs) = best.expect("at least one check ran");
        stats.primal_residual = br;
        stats.dual_residual = bs;
        (bw, bu)
    };

    let w_mat = SymMatrix::new(n, w_out)?;
    let objective = c.inner(&w_mat);
    stats.runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    Ok(NesterovSolution {
        w: w_mat,
        u: u_out,
        objective,
        stats,
    })
}

/// Diag(u) − W on raw buffers.
fn diag_minus(u: &[f64], w: &[f64], n: usize) -> Vec<f64> {
    let mut m: Vec<f64> = w.iter().map(|v| -v).collect();
    for i in 0..n {
        m[i * n + i] += u[i];
    }
    m
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn rescale(d1: &mut [f64], d2: &mut [f64], d3: &mut [f64], f: f64) {
    for v in d1.iter_mut().chain(d2.iter_mut()).chain(d3.iter_mut()) {
        *v *= f;
    }
}
