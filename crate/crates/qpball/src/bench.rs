//! Seeded random-instance campaigns comparing the lifted DNN bound, the
//! comparison SDP bound, and the multistart reference solution, with
//! summary statistics, histogram data, and ℓᵖ bound curves.
//!
//! Output formats (stable, for downstream plotting):
//!
//! * campaign CSV: `index,cop,nest,ref,ratio,cop_exact,nest_exact,ordering_ok,converged`
//! * p-curve CSV: `p,eig_bound,lp_cop,combined_lower,upper`
//! * summary JSON: `dim,count,seed,dist,mean_ratio,std_ratio,min_ratio,`
//!   `median_ratio,frac_cop_exact,frac_nest_exact,ordering_violations`
//!
//! Floats are printed with 12 significant digits, booleans as 0/1, skipped
//! ratios as `nan`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{eigenvalue_ball_bound, eigenvalue_bound, l1_bound_cop, lp_scaling, lp_upper_bound, nesterov_bound};
use crate::conic::SolverOptions;
use crate::error::Result;
use crate::linalg::SymMatrix;
use crate::local_search::{reference_solution, ReplicatorOptions};
use crate::reformulation::{lift_to_stqp, L1Instance};
use crate::rng::SplitMix64;

/// Matrix entry distribution for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dist {
    /// i.i.d. standard normals on the upper triangle (diagonal included).
    NormalUnit,
    /// i.i.d. uniform on [−1, 1], same layout.
    UniformSym,
}

impl std::fmt::Display for Dist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dist::NormalUnit => write!(f, "normal"),
            Dist::UniformSym => write!(f, "uniform"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub dist: Dist,
    /// Relative tolerance for classifying a bound as exact.
    pub exact_tol: f64,
}

impl BenchConfig {
    pub fn new(dim: usize, count: usize, seed: u64) -> Self {
        BenchConfig {
            dim,
            count,
            seed,
            dist: Dist::NormalUnit,
            exact_tol: 1e-5,
        }
    }

    fn validate(&self) {
        assert!(self.dim >= 2, "dim must be at least 2");
        assert!(self.count >= 1, "count must be at least 1");
        assert!(self.exact_tol > 0.0);
    }
}

/// Replicator restarts used by campaigns (more than the module default, to
/// keep the reference solution trustworthy as an exactness yardstick).
pub const BENCH_RESTARTS: usize = 20;
/// Ratios are formed only when the comparison bound is decisively negative.
const RATIO_CUTOFF: f64 = -1e-9;
/// Ordering tolerance, relative to the bound scale.
const ORDER_TOL: f64 = 1e-6;

/// One evaluated instance.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub instance_index: usize,
    pub cop: f64,
    pub nest: f64,
    pub reference: f64,
    /// cop/nest, present only when nest < −1e-9 and both solves converged.
    pub ratio: Option<f64>,
    pub cop_exact: bool,
    pub nest_exact: bool,
    pub ordering_ok: bool,
    pub converged: bool,
}

/// Campaign statistics over the valid ratios.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchSummary {
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub dist: Dist,
    pub mean_ratio: Option<f64>,
    pub std_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
    pub median_ratio: Option<f64>,
    pub frac_cop_exact: f64,
    pub frac_nest_exact: f64,
    pub ordering_violations: usize,
}

/// Deterministic instance generator: entries depend only on
/// `(seed, index, dim, dist)`, bit-identically across platforms.
pub fn gen_instance(seed: u64, index: usize, dim: usize, dist: Dist) -> SymMatrix {
    let mut g = SplitMix64::derive(seed, index as u64);
    let mut m = SymMatrix::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            let v = match dist {
                Dist::NormalUnit => g.next_normal(),
                Dist::UniformSym => 2.0 * g.next_f64() - 1.0,
            };
            m.set(i, j, v);
        }
    }
    m
}

fn eval_instance(cfg: &BenchConfig, index: usize, opts: &SolverOptions) -> BenchRow {
    let c = gen_instance(cfg.seed, index, cfg.dim, cfg.dist);
    let inst = L1Instance::homogeneous(c.clone());
    let scale = c.max_abs().max(1.0);

    let cop = l1_bound_cop(&inst, opts);
    let nest = nesterov_bound(&c, opts);
    let rep_opts = ReplicatorOptions {
        restarts: BENCH_RESTARTS,
        seed: SplitMix64::derive(cfg.seed, index as u64).next_u64(),
        ..Default::default()
    };
    let reference = reference_solution(&lift_to_stqp(&inst).q, &rep_opts);

    let (cop_val, cop_ok) = match &cop {
        Ok(r) => (r.value, r.stats.as_ref().map_or(true, |s| s.converged)),
        Err(_) => (f64::NAN, false),
    };
    let (nest_val, nest_ok) = match &nest {
        Ok(r) => (r.value, r.stats.as_ref().map_or(true, |s| s.converged)),
        Err(_) => (f64::NAN, false),
    };
    let ref_val = reference.value;
    let converged = cop_ok && nest_ok;

    let ratio = if converged && nest_val < RATIO_CUTOFF {
        Some(cop_val / nest_val)
    } else {
        None
    };
    let near = |a: f64, b: f64| (a - b).abs() <= cfg.exact_tol * b.abs().max(1.0);
    let cop_exact = converged && near(cop_val, ref_val);
    let nest_exact = converged && near(nest_val, ref_val);
    let ordering_ok = !converged
        || (nest_val <= cop_val + ORDER_TOL * scale && cop_val <= ref_val + ORDER_TOL * scale);

    BenchRow {
        instance_index: index,
        cop: cop_val,
        nest: nest_val,
        reference: ref_val,
        ratio,
        cop_exact,
        nest_exact,
        ordering_ok,
        converged,
    }
}

/// Runs a full campaign. Instances are evaluated in parallel (each one is a
/// pure function of the config and its index) and aggregated in index
/// order, so results are independent of thread count.
pub fn run_campaign(cfg: &BenchConfig) -> (Vec<BenchRow>, BenchSummary) {
    cfg.validate();
    let opts = SolverOptions::default();
    let rows: Vec<BenchRow> = (0..cfg.count)
        .into_par_iter()
        .map(|i| eval_instance(cfg, i, &opts))
        .collect();
    let summary = summarize(cfg, &rows);
    (rows, summary)
}

/// Recomputes the summary statistics from rows (also used by tests as an
/// independent pass over the data).
pub fn summarize(cfg: &BenchConfig, rows: &[BenchRow]) -> BenchSummary {
    let mut ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = ratios.len();
    let (mean, std, min, median) = if k == 0 {
        (None, None, None, None)
    } else {
        let mean = ratios.iter().sum::<f64>() / k as f64;
        let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / k as f64;
        let median = if k % 2 == 1 {
            ratios[k / 2]
        } else {
            0.5 * (ratios[k / 2 - 1] + ratios[k / 2])
        };
        (Some(mean), Some(var.sqrt()), Some(ratios[0]), Some(median))
    };
    let n = rows.len().max(1) as f64;
    BenchSummary {
        dim: cfg.dim,
        count: rows.len(),
        seed: cfg.seed,
        dist: cfg.dist,
        mean_ratio: mean,
        std_ratio: std,
        min_ratio: min,
        median_ratio: median,
        frac_cop_exact: rows.iter().filter(|r| r.cop_exact).count() as f64 / n,
        frac_nest_exact: rows.iter().filter(|r| r.nest_exact).count() as f64 / n,
        ordering_violations: rows.iter().filter(|r| !r.ordering_ok).count(),
    }
}

/// Equal-width histogram of the valid ratios over [min ratio, 1].
/// Returns (bin_low, bin_high, count) triples; counts sum to the number of
/// valid ratios.
pub fn histogram(rows: &[BenchRow], bins: usize) -> Vec<(f64, f64, usize)> {
    assert!(bins >= 1, "bins must be at least 1");
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    if ratios.is_empty() {
        return Vec::new();
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = 1.0f64.max(lo);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &r in &ratios {
        let b = if width > 0.0 {
            (((r - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, c)| (lo + b as f64 * width, lo + (b + 1) as f64 * width, c))
        .collect()
}

/// One row of the ℓᵖ bound curve.
#[derive(Debug, Clone)]
pub struct PCurveRow {
    pub p: f64,
    pub eig: f64,
    pub lp_cop: f64,
    pub combined: f64,
    pub upper: f64,
}

/// Evaluates the ℓᵖ bounds on a grid. The lifted DNN bound is solved once
/// and rescaled across the grid.
pub fn p_curve(c: &SymMatrix, p_grid: &[f64], opts: &SolverOptions) -> Result<Vec<PCurveRow>> {
    for &p in p_grid {
        if !(1.0..=2.0).contains(&p) {
            return Err(crate::error::Error::ExponentOutOfRange(p));
        }
    }
    let n = c.dim();
    let base = l1_bound_cop(&L1Instance::homogeneous(c.clone()), opts)?;
    let eig = eigenvalue_bound(c)?.value;
    let eig_clamped = eigenvalue_ball_bound(c)?;
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let lp_cop = lp_scaling(n, p) * base.value;
        let upper = lp_upper_bound(c, p)?.value;
        rows.push(PCurveRow {
            p,
            eig,
            lp_cop,
            combined: lp_cop.max(eig_clamped),
            upper,
        });
    }
    Ok(rows)
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.11e}")
    }
}

/// Campaign rows in the documented CSV format.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("index,cop,nest,ref,ratio,cop_exact,nest_exact,ordering_ok,converged\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.instance_index,
            fmt_f64(r.cop),
            fmt_f64(r.nest),
            fmt_f64(r.reference),
            fmt_f64(r.ratio.unwrap_or(f64::NAN)),
            r.cop_exact as u8,
            r.nest_exact as u8,
            r.ordering_ok as u8,
            r.converged as u8,
        ));
    }
    out
}

/// p-curve rows in the documented CSV format.
pub fn p_curve_to_csv(rows: &[PCurveRow]) -> String {
    let mut out = String::from("p,eig_bound,lp_cop,combined_lower,upper\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.p),
            fmt_f64(r.eig),
            fmt_f64(r.lp_cop),
            fmt_f64(r.combined),
            fmt_f64(r.upper),
        ));
    }
    out
}
