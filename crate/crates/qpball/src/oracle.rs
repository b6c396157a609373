//! Exact solver for small standard quadratic programs by enumeration of
//! KKT support sets, and the exact ℓ¹-ball optimum it yields through the
//! simplex lift.
//!
//! For every nonempty support T the stationarity system on the relative
//! interior of the face is the bordered linear system
//!
//! ```text
//! [ Q_TT  -e ] [x_T]   [0]
//! [  eᵀ    0 ] [ λ ] = [1]
//! ```
//!
//! Every local minimizer satisfies this system on its own support, and all
//! singleton supports (the vertices) are enumerated too, so the minimum over
//! all accepted candidates is the global minimum. Singular systems are
//! skipped: a face whose system is singular has a direction of constant
//! objective, so its infimum is reproduced by a sub-support candidate.

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::reformulation::{lift_to_stqp, simplex_to_ball, L1Instance};

/// Largest simplex dimension accepted by [`stqp_exact`] (2ᵐ − 1 supports).
pub const MAX_EXACT_DIM: usize = 16;

/// Candidates with coordinates below this threshold are rejected; tiny
/// negative entries above it are clipped to zero and renormalized.
const NEG_CLIP: f64 = 1e-12;

/// Solves a dense linear system by Gaussian elimination with partial
/// pivoting. Returns `None` if a pivot falls below `1e-12 · scale`.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<()> {
    let scale = a
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() <= 1e-12 * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
            b[r] -= f * b[col];
        }
    }
    for r in (0..n).rev() {
        let mut acc = b[r];
        for k in (r + 1)..n {
            acc -= a[r * n + k] * b[k];
        }
        b[r] = acc / a[r * n + r];
    }
    Some(())
}

/// Exact global minimum of xᵀQx over the simplex Δᵐ, m ≤ 16.
///
/// Returns the optimal value and a minimizer; ties between supports are
/// broken toward the lexicographically smallest support.
pub fn stqp_exact(q: &SymMatrix) -> Result<(f64, Vec<f64>)> {
    let m = q.dim();
    if m > MAX_EXACT_DIM {
        return Err(Error::TooLargeForExact {
            got: m,
            max: MAX_EXACT_DIM,
        });
    }
    assert!(m >= 1, "empty problem");

    let mut best_value = f64::INFINITY;
    let mut best_x: Vec<f64> = Vec::new();
    let mut best_support: u32 = 0;

    let mut support: Vec<usize> = Vec::with_capacity(m);
    for mask in 1u32..(1u32 << m) {
        support.clear();
        for i in 0..m {
            if mask & (1 << i) != 0 {
                support.push(i);
            }
        }
        let k = support.len();

        let x_t: Vec<f64> = if k == 1 {
            vec![1.0]
        } else {
            // bordered system in (x_T, λ)
            let dim = k + 1;
            let mut a = vec![0.0; dim * dim];
            let mut b = vec![0.0; dim];
            for (r, &i) in support.iter().enumerate() {
                for (c, &j) in support.iter().enumerate() {
                    a[r * dim + c] = q.get(i, j);
                }
                a[r * dim + k] = -1.0;
                a[k * dim + r] = 1.0;
            }
            b[k] = 1.0;
            if solve_dense(&mut a, &mut b, dim).is_none() {
                continue;
            }
            b.truncate(k);
            b
        };

        if x_t.iter().any(|&v| v < -NEG_CLIP) {
            continue;
        }
        let mut x = vec![0.0; m];
        let mut sum = 0.0;
        for (&i, &v) in support.iter().zip(&x_t) {
            let v = v.max(0.0);
            x[i] = v;
            sum += v;
        }
        if sum <= 0.0 {
            continue;
        }
        for v in &mut x {
            *v /= sum;
        }
        let value = q.quad_form(&x);

        let better = value < best_value
            || (value == best_value && lex_smaller(mask, best_support));
        if better {
            best_value = value;
            best_x = x;
            best_support = mask;
        }
    }

    Ok((best_value, best_x))
}

/// True if the support encoded by `a` precedes the one encoded by `b`
/// lexicographically (as sorted index lists; a proper prefix comes first).
fn lex_smaller(a: u32, b: u32) -> bool {
    let (mut a, mut b) = (a, b);
    loop {
        if a == 0 {
            return b != 0;
        }
        if b == 0 {
            return false;
        }
        let ia = a.trailing_zeros();
        let ib = b.trailing_zeros();
        if ia != ib {
            return ia < ib;
        }
        a &= a - 1;
        b &= b - 1;
    }
}

/// Exact minimum of yᵀCy + 2cᵀy over the ℓ¹-ball, n ≤ 8, via the simplex
/// lift. Returns the value and an optimal ball point.
pub fn l1_exact(inst: &L1Instance) -> Result<(f64, Vec<f64>)> {
    let n = inst.dim();
    if n > MAX_EXACT_DIM / 2 {
        return Err(Error::TooLargeForExact {
            got: n,
            max: MAX_EXACT_DIM / 2,
        });
    }
    let lifted = lift_to_stqp(inst);
    let (value, x) = stqp_exact(&lifted.q)?;
    let y = simplex_to_ball(&x)?;
    let direct = inst.objective(&y);
    debug_assert!(
        (value - direct).abs() <= 1e-9 * value.abs().max(1.0),
        "lift objective {value} disagrees with ball objective {direct}"
    );
    Ok((direct, y))
}

/// Exact minimum of xᵀCx over the simplex Δⁿ (n ≤ 16). For matrices with no
/// positive entries this coincides with the ℓ¹-ball optimum.
pub fn simplex_restricted_exact(c: &SymMatrix) -> Result<(f64, Vec<f64>)> {
    stqp_exact(c)
}
