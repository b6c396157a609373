//! The bound zoo: copositive-relaxation (DNN) bounds on the ball problem
//! and on the plain simplex problem, the comparison SDP bound, the
//! eigenvalue bound, the ℓᵖ lower/upper bounds, and certificate machinery
//! that turns approximate solver output into a mathematically valid lower
//! bound.

use serde::{Deserialize, Serialize};

use crate::conic::{solve_dnn_stqp, solve_nesterov, SolverOptions, SolverStats};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, norm_p, project_psd, sym_eig, SymMatrix};
use crate::reformulation::{is_sign_constrained, lift_to_stqp, L1Instance};

/// Which bound produced a [`BoundResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    /// DNN relaxation of the lifted (2n-dimensional) StQP.
    Cop,
    /// DNN relaxation of the n-dimensional matrix itself.
    CopSmall,
    /// The comparison SDP bound.
    Nesterov,
    /// Smallest eigenvalue (the ℓ²-ball optimum).
    Eigenvalue,
    /// Hölder-scaled DNN bound for the ℓᵖ-ball.
    LpCop,
    /// Rescaled-eigenvector upper bound for the ℓᵖ-ball.
    LpUpper,
    /// Multistart local-search upper bound.
    RefUpper,
    /// Exact enumeration value.
    Oracle,
}

/// A lower-bound certificate: the decomposition Q − λE = S + N with S
/// positive semidefinite and N entrywise nonnegative (N is implied, not
/// stored), witnessing λ ≤ min{xᵀQx : x ∈ Δ}.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub lambda: f64,
    pub s: SymMatrix,
}

/// A bound value with provenance, optional certificate, and solver stats.
#[derive(Debug, Clone)]
pub struct BoundResult {
    pub value: f64,
    pub method: BoundMethod,
    pub certificate: Option<Certificate>,
    pub stats: Option<SolverStats>,
    /// Set when the value must not be taken at face value (invalid lower
    /// bound in general, non-converged solver, degenerate input).
    pub warning: Option<String>,
}

/// Turns multiplier estimates into a valid certificate: S is the PSD
/// projection of the estimate, and λ is shifted down by the most negative
/// entry of Q − λ̂E − S (E is all-ones, so the shift moves every entry of
/// the implied N up uniformly). The result is a valid lower bound on the
/// StQP optimum regardless of how rough the estimates were.
pub fn certify_lower_bound(q: &SymMatrix, lambda_hat: f64, s_hat: &SymMatrix) -> Result<Certificate> {
    let s = project_psd(s_hat)?;
    let m = q.dim();
    let mut min_n = f64::INFINITY;
    for i in 0..m {
        for j in 0..m {
            min_n = min_n.min(q.get(i, j) - lambda_hat - s.get(i, j));
        }
    }
    let lambda = lambda_hat + min_n.min(0.0);
    Ok(Certificate { lambda, s })
}

/// Checks the certificate against Q: S must be PSD and N = Q − λE − S
/// entrywise nonnegative, both within `tol`.
pub fn verify_certificate(q: &SymMatrix, cert: &Certificate, tol: f64) -> Result<bool> {
    if cert.s.dim() != q.dim() {
        return Err(Error::DimensionMismatch(format!(
            "certificate S is {}x{} but Q is {}x{}",
            cert.s.dim(),
            cert.s.dim(),
            q.dim(),
            q.dim()
        )));
    }
    if min_eigenvalue(&cert.s)? < -tol {
        return Ok(false);
    }
    let m = q.dim();
    for i in 0..m {
        for j in 0..m {
            if q.get(i, j) - cert.lambda - cert.s.get(i, j) < -tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn non_convergence_warning(stats: &SolverStats) -> Option<String> {
    if stats.converged {
        None
    } else {
        Some(format!(
            "solver stopped after {} iterations without converging (residuals {:.2e}/{:.2e}); certificate remains valid but may be loose",
            stats.iterations, stats.primal_residual, stats.dual_residual
        ))
    }
}

/// DNN relaxation bound for an arbitrary StQP matrix, with certificate.
pub fn cop_bound(q: &SymMatrix, opts: &SolverOptions) -> Result<BoundResult> {
    let sol = solve_dnn_stqp(q, opts)?;
    let cert = certify_lower_bound(q, sol.lambda_hat, &sol.s_hat)?;
    Ok(BoundResult {
        value: sol.objective,
        method: BoundMethod::Cop,
        certificate: Some(cert),
        warning: non_convergence_warning(&sol.stats),
        stats: Some(sol.stats),
    })
}

/// Copositive-relaxation lower bound on the ℓ¹-ball problem (inhomogeneous
/// instances included): the DNN bound of the lifted 2n×2n StQP.
pub fn l1_bound_cop(inst: &L1Instance, opts: &SolverOptions) -> Result<BoundResult> {
    cop_bound(&lift_to_stqp(inst).q, opts)
}

/// The comparison SDP bound for the homogeneous ball problem. Always at
/// most the copositive bound, with strict gap on some instances.
pub fn nesterov_bound(c: &SymMatrix, opts: &SolverOptions) -> Result<BoundResult> {
    let sol = solve_nesterov(c, opts)?;
    Ok(BoundResult {
        value: sol.objective,
        method: BoundMethod::Nesterov,
        certificate: None,
        warning: non_convergence_warning(&sol.stats),
        stats: Some(sol.stats),
    })
}

/// DNN bound of the n×n matrix itself — same size as the comparison SDP
/// instead of the doubled dimension. NOT a valid lower bound on the ball
/// optimum in general; only when C has no positive entries. The returned
/// certificate bounds the simplex-restricted problem.
pub fn small_cop_bound(c: &SymMatrix, opts: &SolverOptions) -> Result<BoundResult> {
    let sol = solve_dnn_stqp(c, opts)?;
    let cert = certify_lower_bound(c, sol.lambda_hat, &sol.s_hat)?;
    let sign_ok = is_sign_constrained(&L1Instance::homogeneous(c.clone()));
    let mut warning = non_convergence_warning(&sol.stats);
    if !sign_ok {
        let w = "matrix has positive entries: this value can exceed the true ball optimum"
            .to_string();
        warning = Some(match warning {
            Some(prev) => format!("{prev}; {w}"),
            None => w,
        });
    }
    Ok(BoundResult {
        value: sol.objective,
        method: BoundMethod::CopSmall,
        certificate: Some(cert),
        warning,
        stats: Some(sol.stats),
    })
}

/// Sign-constrained fast path: for C with no positive entries (and no
/// linear term) the small DNN bound already equals the lifted bound, so the
/// n×n SDP replaces the 2n×2n one as a valid lower bound.
pub fn sign_constrained_bound(inst: &L1Instance, opts: &SolverOptions) -> Result<BoundResult> {
    if !is_sign_constrained(inst) {
        return Err(Error::NotSignConstrained);
    }
    let mut r = small_cop_bound(&inst.c_matrix, opts)?;
    r.method = BoundMethod::Cop;
    r.warning = r.stats.as_ref().and_then(non_convergence_warning);
    Ok(r)
}

/// The eigenvalue bound λ_min(C), which is the exact ℓ²-ball optimum and
/// hence a valid lower bound for every p ≤ 2. The raw eigenvalue is
/// reported; as a ball bound it should be clamped to min(λ_min, 0) since
/// the origin is always feasible (see [`eigenvalue_ball_bound`]).
pub fn eigenvalue_bound(c: &SymMatrix) -> Result<BoundResult> {
    Ok(BoundResult {
        value: min_eigenvalue(c)?,
        method: BoundMethod::Eigenvalue,
        certificate: None,
        stats: None,
        warning: None,
    })
}

/// min(λ_min(C), 0): the eigenvalue bound clamped for use as a ball bound.
pub fn eigenvalue_ball_bound(c: &SymMatrix) -> Result<f64> {
    Ok(min_eigenvalue(c)?.min(0.0))
}

fn check_exponent(p: f64) -> Result<()> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::ExponentOutOfRange(p));
    }
    Ok(())
}

/// Hölder scaling factor n^{2(p−1)/p} relating the ℓᵖ-ball to the blown-up
/// ℓ¹-ball under a degree-2 objective.
pub fn lp_scaling(n: usize, p: f64) -> f64 {
    (n as f64).powf(2.0 * (p - 1.0) / p)
}

/// ℓᵖ-ball lower bound n^{2(p−1)/p} · (lifted DNN bound), 1 ≤ p ≤ 2.
pub fn lp_cop_bound(c: &SymMatrix, p: f64, opts: &SolverOptions) -> Result<BoundResult> {
    check_exponent(p)?;
    let base = l1_bound_cop(&L1Instance::homogeneous(c.clone()), opts)?;
    Ok(BoundResult {
        value: lp_scaling(c.dim(), p) * base.value,
        method: BoundMethod::LpCop,
        certificate: base.certificate,
        stats: base.stats,
        warning: base.warning,
    })
}

/// Upper bound λ_min(C)/‖v_min‖²_p from the rescaled minimal eigenvector,
/// which is ℓᵖ-feasible; 0 for PSD matrices (minimum at the origin).
pub fn lp_upper_bound(c: &SymMatrix, p: f64) -> Result<BoundResult> {
    check_exponent(p)?;
    let eig = sym_eig(c)?;
    let lam = eig.values[0];
    if lam >= 0.0 {
        return Ok(BoundResult {
            value: 0.0,
            method: BoundMethod::LpUpper,
            certificate: None,
            stats: None,
            warning: Some("matrix is positive semidefinite: minimum attained at the origin".into()),
        });
    }
    let v = eig.eigenvector(0);
    let np = norm_p(&v, p);
    Ok(BoundResult {
        value: lam / (np * np),
        method: BoundMethod::LpUpper,
        certificate: None,
        stats: None,
        warning: None,
    })
}

/// Best of the two valid ℓᵖ lower bounds: the Hölder-scaled DNN bound and
/// the clamped eigenvalue bound.
pub fn combined_lp_lower(c: &SymMatrix, p: f64, opts: &SolverOptions) -> Result<BoundResult> {
    let cop = lp_cop_bound(c, p, opts)?;
    let eig = eigenvalue_ball_bound(c)?;
    let value = cop.value.max(eig);
    Ok(BoundResult { value, ..cop })
}
