//! Unbalanced optimal-transport barycenters on fixed supports, solved by
//! block majorization-minimization with multiplicative plan updates.
//!
//! The objective for `P` inputs with weights `a_p`, plans `T_p`, barycenter
//! weights `g` and sparse cost patterns `C_p` is
//!
//! `F = sum_p lambda_p [ <C_p, T_p> + eta1_p KL(T_p 1, a_p) + eta2_p KL(T_p^T 1, g) ]`
//!
//! with all inner products and marginals taken over the finite-cost pattern
//! only. One iteration updates every plan (given the previous `g`), then `g`
//! in closed form; each block update can only decrease `F`. Plan entries off
//! the pattern do not exist, which realizes `exp(-inf) = 0` structurally.
//!
//! Accumulations run in pattern order, so a solve is bitwise deterministic.

use std::sync::Arc;

use crate::cost::SparseCostMatrix;
use crate::error::{Error, Result};

/// Solver configuration. `lambda` are the barycentric weights (sum to 1),
/// `eta[p] = (eta1, eta2)` the marginal relaxation parameters of input `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct UotConfig {
    pub lambda: Vec<f64>,
    pub eta: Vec<(f64, f64)>,
    /// Relative objective-decrease threshold `|F_k - F_{k-1}| / F_0 < tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for UotConfig {
    fn default() -> Self {
        UotConfig::uniform(2, 10.0)
    }
}

impl UotConfig {
    /// Equal barycentric weights `1/p` and all relaxation parameters `eta`.
    pub fn uniform(p: usize, eta: f64) -> Self {
        UotConfig {
            lambda: vec![1.0 / p as f64; p],
            eta: vec![(eta, eta); p],
            tol: 1e-6,
            max_iter: 100_000,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.lambda.len();
        if p == 0 || self.eta.len() != p {
            return Err(Error::InvalidArgument(
                "lambda and eta must both have one entry per input".into(),
            ));
        }
        if self.lambda.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
            return Err(Error::InvalidArgument(
                "barycentric weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = self.lambda.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "barycentric weights must sum to 1, got {sum}"
            )));
        }
        if self.eta.iter().any(|&(a, b)| !(a > 0.0) || !(b > 0.0)) {
            return Err(Error::InvalidArgument(
                "relaxation parameters must be positive".into(),
            ));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidArgument(
                "tolerance must be positive and max_iter >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Nonnegative values on exactly the finite pattern of a cost matrix.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pattern: Arc<SparseCostMatrix>,
    values: Vec<f64>,
}

impl TransportPlan {
    /// All-ones plan on the pattern (the Algorithm 1 initialization).
    pub fn ones(pattern: Arc<SparseCostMatrix>) -> Self {
        let values = vec![1.0; pattern.nnz()];
        TransportPlan { pattern, values }
    }

    pub fn from_values(pattern: Arc<SparseCostMatrix>, values: Vec<f64>) -> Result<Self> {
        if values.len() != pattern.nnz() {
            return Err(Error::InvalidArgument(format!(
                "plan has {} values for a pattern with {} entries",
                values.len(),
                pattern.nnz()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain(
                "plan values must be finite and nonnegative".into(),
            ));
        }
        Ok(TransportPlan { pattern, values })
    }

    pub fn pattern(&self) -> &SparseCostMatrix {
        &self.pattern
    }

    pub fn shared_pattern(&self) -> &Arc<SparseCostMatrix> {
        &self.pattern
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row sums over the pattern (length `n_rows`).
    pub fn row_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.pattern.n_rows()];
        for r in 0..self.pattern.n_rows() {
            let range = self.pattern.row_ptr()[r]..self.pattern.row_ptr()[r + 1];
            out[r] = self.values[range].iter().sum();
        }
        out
    }

    /// Column sums over the pattern (length `n_cols`).
    pub fn col_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.pattern.n_cols()];
        for (&c, &v) in self.pattern.col_idx().iter().zip(&self.values) {
            out[c as usize] += v;
        }
        out
    }

    /// `<C, T>` over the pattern.
    pub fn inner_cost(&self) -> f64 {
        self.pattern
            .costs()
            .iter()
            .zip(&self.values)
            .map(|(c, v)| c * v)
            .sum()
    }
}

/// Barycenter weights, final plans, and the objective history of a solve.
#[derive(Debug, Clone)]
pub struct BarycenterResult {
    pub weights: Vec<f64>,
    pub plans: Vec<TransportPlan>,
    /// `F` at initialization and after every full iteration; non-increasing.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Generalized KL divergence `sum_i a_i log(a_i / b_i) - a_i + b_i` with the
/// conventions `0 log 0 = 0` and `KL = +inf` when some `a_i > 0` meets
/// `b_i = 0`; pairs with `a_i = b_i = 0` contribute nothing.
pub fn kl_div(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (&ai, &bi) in a.iter().zip(b) {
        if ai > 0.0 {
            if bi <= 0.0 {
                return f64::INFINITY;
            }
            // (b - a) is exact for nearby values; adding it before the large
            // terms keeps the near-cancellation at a ~ b out of the sum
            acc += ai * (ai / bi).ln() + (bi - ai);
        } else {
            acc += bi; // 0 log 0 = 0 leaves the +b_i term
        }
    }
    acc.max(0.0)
}

/// Full objective `F` at the given plans and barycenter weights.
pub fn uot_objective(
    plans: &[TransportPlan],
    g: &[f64],
    inputs: &[&[f64]],
    cfg: &UotConfig,
) -> f64 {
    let mut total = 0.0;
    for (p, plan) in plans.iter().enumerate() {
        let (eta1, eta2) = cfg.eta[p];
        let term = plan.inner_cost()
            + eta1 * kl_div(&plan.row_marginal(), inputs[p])
            + eta2 * kl_div(&plan.col_marginal(), g);
        total += cfg.lambda[p] * term;
    }
    total
}

/// One multiplicative MM update of a single plan for fixed `a` and `g`:
///
/// `T_ik <- (a_i / r_i)^(eta1/eta) * T_ik * exp(-C_ik / eta) * (g_k / c_k)^(eta2/eta)`
///
/// with `eta = eta1 + eta2`, `r`/`c` the current row/column marginals, and
/// ratios with a zero numerator or denominator resolved to 0. The update
/// never increases `<C,T> + eta1 KL(T1, a) + eta2 KL(T^T 1, g)`.
pub fn mm_update_plan(
    plan: &TransportPlan,
    a: &[f64],
    g: &[f64],
    eta1: f64,
    eta2: f64,
) -> TransportPlan {
    let pat = plan.pattern.clone();
    let eta = eta1 + eta2;
    let kernel: Vec<f64> = pat.costs().iter().map(|c| (-c / eta).exp()).collect();
    let mut state = PlanState {
        kernel,
        values: plan.values.clone(),
        row_marg: plan.row_marginal(),
        cols: plan
            .col_marginal()
            .into_iter()
            .map(|c| ColSlot { factor: 0.0, sum: c })
            .collect(),
        inner_cost: 0.0,
        pattern: pat,
    };
    state.update(a, g, eta1, eta2);
    TransportPlan {
        pattern: state.pattern,
        values: state.values,
    }
}

/// Closed-form barycenter update
/// `g = sum_p lambda_p eta2_p (T_p^T 1) / sum_p lambda_p eta2_p`.
pub fn mm_update_barycenter(plans: &[TransportPlan], cfg: &UotConfig) -> Vec<f64> {
    let k = plans[0].pattern.n_cols();
    let mut g = vec![0.0; k];
    let mut denom = 0.0;
    for (p, plan) in plans.iter().enumerate() {
        let w = cfg.lambda[p] * cfg.eta[p].1;
        denom += w;
        for (gk, ck) in g.iter_mut().zip(plan.col_marginal()) {
            *gk += w * ck;
        }
    }
    for gk in &mut g {
        *gk /= denom;
    }
    g
}

/// Per-column scratch: the multiplicative factor for the current update and
/// the accumulator for the next column marginal, kept adjacent so the inner
/// loop touches one cache line per entry.
#[derive(Clone, Copy)]
struct ColSlot {
    factor: f64,
    sum: f64,
}

struct PlanState {
    pattern: Arc<SparseCostMatrix>,
    kernel: Vec<f64>,
    values: Vec<f64>,
    row_marg: Vec<f64>,
    cols: Vec<ColSlot>,
    inner_cost: f64,
}

impl PlanState {
    fn init(pattern: Arc<SparseCostMatrix>, eta: f64) -> Self {
        let kernel = pattern.costs().iter().map(|c| (-c / eta).exp()).collect();
        let values = vec![1.0; pattern.nnz()];
        let mut row_marg = vec![0.0; pattern.n_rows()];
        for r in 0..pattern.n_rows() {
            row_marg[r] = (pattern.row_ptr()[r + 1] - pattern.row_ptr()[r]) as f64;
        }
        let mut cols = vec![ColSlot { factor: 0.0, sum: 0.0 }; pattern.n_cols()];
        for &c in pattern.col_idx() {
            cols[c as usize].sum += 1.0;
        }
        PlanState {
            pattern,
            kernel,
            values,
            row_marg,
            cols,
            inner_cost: f64::NAN,
        }
    }

    /// One in-place MM plan update; refreshes marginals and `<C, T>`.
    fn update(&mut self, a: &[f64], g: &[f64], eta1: f64, eta2: f64) {
        let eta = eta1 + eta2;
        let p1 = eta1 / eta;
        let p2 = eta2 / eta;
        for (slot, &gk) in self.cols.iter_mut().zip(g) {
            slot.factor = if gk > 0.0 && slot.sum > 0.0 {
                (gk / slot.sum).powf(p2)
            } else {
                0.0
            };
            slot.sum = 0.0;
        }
        let row_ptr = self.pattern.row_ptr();
        let col_idx = self.pattern.col_idx();
        let costs = self.pattern.costs();
        let mut inner = 0.0;
        for r in 0..self.pattern.n_rows() {
            let rm = self.row_marg[r];
            let rf = if a[r] > 0.0 && rm > 0.0 {
                (a[r] / rm).powf(p1)
            } else {
                0.0
            };
            let mut new_rm = 0.0;
            for e in row_ptr[r]..row_ptr[r + 1] {
                let slot = &mut self.cols[col_idx[e] as usize];
                let v = rf * self.values[e] * self.kernel[e] * slot.factor;
                self.values[e] = v;
                new_rm += v;
                slot.sum += v;
                inner += costs[e] * v;
            }
            self.row_marg[r] = new_rm;
        }
        self.inner_cost = inner;
    }

    fn objective_term(&self, a: &[f64], g: &[f64], eta1: f64, eta2: f64) -> f64 {
        let col_marg: Vec<f64> = self.cols.iter().map(|s| s.sum).collect();
        self.inner_cost + eta1 * kl_div(&self.row_marg, a) + eta2 * kl_div(&col_marg, g)
    }

    fn initial_objective_term(&self, a: &[f64], g: &[f64], eta1: f64, eta2: f64) -> f64 {
        let col_marg: Vec<f64> = self.cols.iter().map(|s| s.sum).collect();
        let inner = self.pattern.costs().iter().sum::<f64>(); // T = 1
        inner + eta1 * kl_div(&self.row_marg, a) + eta2 * kl_div(&col_marg, g)
    }
}

/// Solves the fixed-support UOT barycenter problem by block MM.
///
/// `inputs[p]` are the weights of input `p` (length `costs[p].n_rows()`) and
/// all cost matrices must share the same column count. Initialization is all
/// ones for every plan and for `g`; iterations run until the relative
/// objective decrease drops below `cfg.tol` or `max_iter` is reached (then
/// `converged = false`). An input set with zero total mass short-circuits to
/// the all-zero barycenter.
pub fn solve_barycenter(
    inputs: &[&[f64]],
    costs: &[Arc<SparseCostMatrix>],
    cfg: &UotConfig,
) -> Result<BarycenterResult> {
    cfg.validate()?;
    let p_count = inputs.len();
    if p_count == 0 || costs.len() != p_count || cfg.lambda.len() != p_count {
        return Err(Error::InvalidArgument(format!(
            "need matching inputs/costs/config lengths, got {}/{}/{}",
            p_count,
            costs.len(),
            cfg.lambda.len()
        )));
    }
    let k = costs[0].n_cols();
    for (p, c) in costs.iter().enumerate() {
        if c.n_cols() != k {
            return Err(Error::InvalidArgument(format!(
                "cost {} targets {} columns, expected {k}",
                p + 1,
                c.n_cols()
            )));
        }
        if inputs[p].len() != c.n_rows() {
            return Err(Error::InvalidArgument(format!(
                "input {} has {} weights for {} source rows",
                p + 1,
                inputs[p].len(),
                c.n_rows()
            )));
        }
        if inputs[p].iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain(
                "input weights must be finite and nonnegative".into(),
            ));
        }
    }

    if inputs.iter().all(|a| a.iter().all(|&v| v == 0.0)) {
        let plans = costs
            .iter()
            .map(|c| TransportPlan {
                pattern: c.clone(),
                values: vec![0.0; c.nnz()],
            })
            .collect();
        return Ok(BarycenterResult {
            weights: vec![0.0; k],
            plans,
            objective_trace: vec![0.0],
            iterations: 0,
            converged: true,
        });
    }

    let mut states: Vec<PlanState> = costs
        .iter()
        .enumerate()
        .map(|(p, c)| PlanState::init(c.clone(), cfg.eta[p].0 + cfg.eta[p].1))
        .collect();
    let mut g = vec![1.0f64; k];

    let f0: f64 = states
        .iter()
        .enumerate()
        .map(|(p, s)| cfg.lambda[p] * s.initial_objective_term(inputs[p], &g, cfg.eta[p].0, cfg.eta[p].1))
        .sum();
    let mut trace = vec![f0];
    // The relative criterion divides by the first finite objective: with
    // exact zero-mass rows the initial all-ones plans give F_0 = +inf, and
    // one update makes F finite.
    let mut denom = if f0.is_finite() { Some(f0) } else { None };
    let mut converged = f0 == 0.0;
    let mut iterations = 0usize;

    if !converged {
        let lam_eta2: Vec<f64> = (0..p_count).map(|p| cfg.lambda[p] * cfg.eta[p].1).collect();
        let g_denom: f64 = lam_eta2.iter().sum();
        for iter in 1..=cfg.max_iter {
            iterations = iter;
            for (p, s) in states.iter_mut().enumerate() {
                s.update(inputs[p], &g, cfg.eta[p].0, cfg.eta[p].1);
            }
            for gk in &mut g {
                *gk = 0.0;
            }
            for (s, &w) in states.iter().zip(&lam_eta2) {
                for (gk, slot) in g.iter_mut().zip(&s.cols) {
                    *gk += w * slot.sum;
                }
            }
            for gk in &mut g {
                *gk /= g_denom;
            }
            let f: f64 = states
                .iter()
                .enumerate()
                .map(|(p, s)| {
                    cfg.lambda[p] * s.objective_term(inputs[p], &g, cfg.eta[p].0, cfg.eta[p].1)
                })
                .sum();
            let f_prev = *trace.last().unwrap();
            trace.push(f);
            if denom.is_none() && f.is_finite() {
                denom = Some(f);
            }
            if let Some(d) = denom {
                if f.is_finite() && f_prev.is_finite() && (f - f_prev).abs() <= cfg.tol * d {
                    converged = true;
                    break;
                }
            }
        }
    }

    let plans = states
        .into_iter()
        .map(|s| TransportPlan {
            pattern: s.pattern,
            values: s.values,
        })
        .collect();
    Ok(BarycenterResult {
        weights: g,
        plans,
        objective_trace: trace,
        iterations,
        converged,
    })
}

/// Per-entry objective gradient of plan `p` at the solution state:
/// `dF/dT_ik = lambda_p (C_ik + eta1 ln(r_i / a_i) + eta2 ln(c_k / g_k))`,
/// one value per pattern entry. Entries whose row or column carries no mass
/// get `-inf` (growing them from zero would decrease nothing yet the log
/// diverges); callers filter by activity.
pub fn plan_gradient(plan: &TransportPlan, a: &[f64], g: &[f64], lambda: f64, eta1: f64, eta2: f64) -> Vec<f64> {
    let row = plan.row_marginal();
    let col = plan.col_marginal();
    let pat = &plan.pattern;
    let mut out = vec![0.0; pat.nnz()];
    for r in 0..pat.n_rows() {
        for e in pat.row_ptr()[r]..pat.row_ptr()[r + 1] {
            let k = pat.col_idx()[e] as usize;
            let row_term = if a[r] > 0.0 && row[r] > 0.0 {
                (row[r] / a[r]).ln()
            } else {
                f64::NEG_INFINITY
            };
            let col_term = if g[k] > 0.0 && col[k] > 0.0 {
                (col[k] / g[k]).ln()
            } else {
                f64::NEG_INFINITY
            };
            out[e] = lambda * (pat.costs()[e] + eta1 * row_term + eta2 * col_term);
        }
    }
    out
}

/// First-order stationarity certificate over active plan entries.
///
/// For every entry with `T_ik > tau` (`tau = 1e-12 * max(T_p)`) the gradient
/// `dF/dT_ik = lambda_p (C_ik + eta1 ln(r_i/a_i) + eta2 ln(c_k/g_k))` is
/// scored against the nonnegativity constraint `T >= 0`: a negative gradient
/// is a violation outright (mass should still grow there), a positive one is
/// weighted by `T_ik / max(T_p)` (complementary slackness: entries sliding
/// to the zero bound legitimately keep a positive gradient while their mass
/// vanishes). A zero `a_i` or `g_k` facing positive transported mass yields
/// `+inf`. Small residuals certify that the solve reached a minimizer of `F`.
pub fn kkt_residual(result: &BarycenterResult, inputs: &[&[f64]], cfg: &UotConfig) -> f64 {
    let mut worst = 0.0f64;
    for (p, plan) in result.plans.iter().enumerate() {
        let (eta1, eta2) = cfg.eta[p];
        let lambda = cfg.lambda[p];
        let row = plan.row_marginal();
        let col = plan.col_marginal();
        let max_v = plan.values.iter().cloned().fold(0.0f64, f64::max);
        if max_v == 0.0 {
            continue;
        }
        let tau = 1e-12 * max_v;
        let pat = &plan.pattern;
        let a = inputs[p];
        for r in 0..pat.n_rows() {
            for e in pat.row_ptr()[r]..pat.row_ptr()[r + 1] {
                let v = plan.values[e];
                if v <= tau {
                    continue;
                }
                let k = pat.col_idx()[e] as usize;
                if a[r] <= 0.0 || result.weights[k] <= 0.0 {
                    return f64::INFINITY;
                }
                let grad = lambda
                    * (pat.costs()[e]
                        + eta1 * (row[r] / a[r]).ln()
                        + eta2 * (col[k] / result.weights[k]).ln());
                let violation = if grad < 0.0 { -grad } else { grad * (v / max_v) };
                worst = worst.max(violation);
            }
        }
    }
    worst
}
