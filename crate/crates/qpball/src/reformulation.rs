//! Reformulation of quadratic minimization over the ℓ¹-ball as a standard
//! quadratic program over the simplex, plus the block transformations used
//! by the structural property tests.
//!
//! The ℓ¹-ball is the convex hull of ±e₁, …, ±eₙ, so with the vertex matrix
//! V = [Iₙ, −Iₙ] every ball point is Vx for some x on the simplex Δ^{2n},
//! and the objective yᵀCy + 2cᵀy becomes a quadratic form in x.

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Quadratic-over-ℓ¹-ball problem data: minimize yᵀCy + 2cᵀy over ‖y‖₁ ≤ 1.
#[derive(Debug, Clone)]
pub struct L1Instance {
    pub c_matrix: SymMatrix,
    pub c_linear: Vec<f64>,
}

impl L1Instance {
    pub fn new(c_matrix: SymMatrix, c_linear: Vec<f64>) -> Result<Self> {
        if c_linear.len() != c_matrix.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {0}x{0} but linear term has length {1}",
                c_matrix.dim(),
                c_linear.len()
            )));
        }
        for (i, &v) in c_linear.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: 0 });
            }
        }
        Ok(L1Instance { c_matrix, c_linear })
    }

    /// Homogeneous instance (no linear term).
    pub fn homogeneous(c_matrix: SymMatrix) -> Self {
        let n = c_matrix.dim();
        L1Instance {
            c_matrix,
            c_linear: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.c_matrix.dim()
    }

    /// Objective yᵀCy + 2cᵀy.
    pub fn objective(&self, y: &[f64]) -> f64 {
        self.c_matrix.quad_form(y) + 2.0 * crate::linalg::dot(&self.c_linear, y)
    }
}

/// Where the StQP matrix came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StqpOrigin {
    /// Lifted from an n-dimensional ℓ¹-ball instance (dimension doubled).
    BallLift { n: usize },
    /// Supplied directly.
    Direct,
}

/// Standard quadratic program: minimize xᵀQx over the simplex Δᵐ.
#[derive(Debug, Clone)]
pub struct StqpInstance {
    pub q: SymMatrix,
    pub origin: StqpOrigin,
}

impl StqpInstance {
    pub fn direct(q: SymMatrix) -> Self {
        StqpInstance {
            q,
            origin: StqpOrigin::Direct,
        }
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }
}

/// Builds the 2n×2n StQP matrix of an ℓ¹-ball instance:
///
/// ```text
/// [  C  -C ]   [ ecᵀ+ceᵀ   ceᵀ-ecᵀ ]
/// [ -C   C ] + [ ecᵀ-ceᵀ  -ecᵀ-ceᵀ ]
/// ```
///
/// so that xᵀQx = (Vx)ᵀC(Vx) + 2cᵀ(Vx) for every x ∈ Δ^{2n}.
pub fn lift_to_stqp(inst: &L1Instance) -> StqpInstance {
    let n = inst.dim();
    let m = 2 * n;
    let mut data = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let cij = inst.c_matrix.get(i, j);
            let lin_pp = inst.c_linear[j] + inst.c_linear[i]; // (ecᵀ + ceᵀ)ᵢⱼ
            let lin_pm = inst.c_linear[i] - inst.c_linear[j]; // (ceᵀ - ecᵀ)ᵢⱼ
            data[i * m + j] = cij + lin_pp;
            data[i * m + (n + j)] = -cij + lin_pm;
            data[(n + i) * m + j] = -cij - lin_pm;
            data[(n + i) * m + (n + j)] = cij - lin_pp;
        }
    }
    let q = SymMatrix::new(m, data).expect("lifted matrix is symmetric and finite");
    StqpInstance {
        q,
        origin: StqpOrigin::BallLift { n },
    }
}

/// Tolerance for simplex membership in [`simplex_to_ball`].
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Maps a simplex point x ∈ Δ^{2n} to the ball point y = Vx with
/// V = [Iₙ, −Iₙ]. Points outside the simplex (beyond `SIMPLEX_TOL`) are
/// rejected rather than repaired.
pub fn simplex_to_ball(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() % 2 != 0 {
        return Err(Error::OddDimension(x.len()));
    }
    let n = x.len() / 2;
    if let Some((i, &v)) = x.iter().enumerate().find(|(_, &v)| v < -SIMPLEX_TOL) {
        return Err(Error::SimplexViolation(format!(
            "coordinate {i} is negative ({v:.3e})"
        )));
    }
    let sum: f64 = x.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::SimplexViolation(format!(
            "coordinates sum to {sum} instead of 1"
        )));
    }
    Ok((0..n).map(|i| x[i] - x[n + i]).collect())
}

/// Negates the off-diagonal n×n blocks of an even-dimensional matrix:
/// [[U, Y], [Yᵀ, V]] becomes [[U, −Y], [−Yᵀ, V]].
pub fn flip_off_diagonal_blocks(x: &SymMatrix) -> Result<SymMatrix> {
    let m = x.dim();
    if m % 2 != 0 {
        return Err(Error::OddDimension(m));
    }
    let n = m / 2;
    let mut out = x.clone();
    for i in 0..n {
        for j in 0..n {
            out.set(i, n + j, -x.get(i, n + j));
        }
    }
    Ok(out)
}

/// Graph-Laplacian shift D − X, where D is the diagonal matrix of row sums.
pub fn laplacian_shift(x: &SymMatrix) -> SymMatrix {
    let d = SymMatrix::from_diag(&x.row_sums());
    d.sub(x)
}

/// True iff the instance has no linear term and no positive entry in C,
/// which enables the simplex-sized fast path for the relaxation bound.
pub fn is_sign_constrained(inst: &L1Instance) -> bool {
    inst.c_linear.iter().all(|&v| v == 0.0) && inst.c_matrix.max_entry() <= 0.0
}
