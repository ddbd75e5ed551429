//! Mixed Gauss-Seidel/Jacobian ADMM for the low-rank + sparse
//! pseudo-full-space model, plus two-block variants for the sparse-only and
//! low-rank-only models.
//!
//! The low-rank + sparse iteration updates `Z` first (linearized, so the
//! nuclear-norm step is a single singular value thresholding), then `A` and
//! `E` as one Jacobian block (their constraint columns `(0; -I)` and
//! `(I; 0)` are orthogonal, so the joint minimization separates), then the
//! multipliers `(T1, T2)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{ModelKind, ProblemSpec};
use crate::prox::{soft_threshold, spectral_norm, svt, zero_diagonal_in_place};
use crate::Matrix;

/// Margin applied on top of the spectral norm when `eta` is resolved
/// automatically.
pub const ETA_SAFETY: f64 = 1.01;

/// Majorization constant of the linearized `Z` step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eta {
    /// `1.01 * ||mu1 V^T V + mu2 I||_2`.
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for Eta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Eta::Auto);
        }
        s.parse::<f64>()
            .map(Eta::Fixed)
            .map_err(|_| Error::InvalidParameter(format!("eta must be 'auto' or a number, got '{s}'")))
    }
}

impl std::fmt::Display for Eta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Eta::Auto => f.write_str("auto"),
            Eta::Fixed(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Penalty on `X = VZ + E`.
    pub mu1: f64,
    /// Penalty on `Z = A`.
    pub mu2: f64,
    pub eta: Eta,
    pub max_iter: usize,
    /// Stop once the relative residual of `X = VZ + E` is at most this ...
    pub tol_r1: f64,
    /// ... the relative residual of `Z = A` is at most this ...
    pub tol_r2: f64,
    /// ... and the relative change in `Z` is at most this.
    ///
    /// The fixed 500-iteration budget is the only stopping rule with a
    /// published value; the three tolerances are local choices.
    pub tol_dz: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mu1: 0.6,
            mu2: 0.05,
            eta: Eta::Auto,
            max_iter: 500,
            tol_r1: 1e-6,
            tol_r2: 1e-6,
            tol_dz: 1e-7,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive("mu1", self.mu1)?;
        positive("mu2", self.mu2)?;
        positive("tol_r1", self.tol_r1)?;
        positive("tol_r2", self.tol_r2)?;
        positive("tol_dz", self.tol_dz)?;
        if let Eta::Fixed(v) = self.eta {
            positive("eta", v)?;
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Copy of this config with `eta` made concrete for `p`.
    pub fn resolved(&self, p: &ProblemSpec) -> Result<Self> {
        self.validate()?;
        Ok(Self {
            eta: Eta::Fixed(resolve_eta(p, self)?),
            ..*self
        })
    }

    fn eta_value(&self) -> Result<f64> {
        match self.eta {
            Eta::Fixed(v) => Ok(v),
            Eta::Auto => Err(Error::InvalidParameter(
                "eta must be resolved before stepping the solver".into(),
            )),
        }
    }
}

/// Iterates of one ADMM run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub z: Matrix,
    pub a: Matrix,
    pub e: Matrix,
    pub t1: Matrix,
    pub t2: Matrix,
    pub k: usize,
}

impl SolverState {
    pub fn zeros(p: &ProblemSpec) -> Self {
        let (d, s_c, n) = (p.dim(), p.n_labeled(), p.n_atoms());
        Self {
            z: DMatrix::zeros(n, s_c),
            a: DMatrix::zeros(n, s_c),
            e: DMatrix::zeros(d, s_c),
            t1: DMatrix::zeros(d, s_c),
            t2: DMatrix::zeros(n, s_c),
            k: 0,
        }
    }

    fn check(&self, p: &ProblemSpec) -> Result<()> {
        let coeff = (p.n_atoms(), p.n_labeled());
        let err = (p.dim(), p.n_labeled());
        if self.z.shape() != coeff
            || self.a.shape() != coeff
            || self.t2.shape() != coeff
            || self.e.shape() != err
            || self.t1.shape() != err
        {
            return Err(Error::InvalidInput("solver state does not match problem shape".into()));
        }
        Ok(())
    }
}

/// One row of the convergence trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub objective: f64,
    pub r1: f64,
    pub r2: f64,
    /// `||Z^{k+1} - Z^k||_F / max(||Z^k||_F, 1)`.
    pub dz: f64,
    pub h_diff: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub z: Matrix,
    pub a: Matrix,
    pub e: Matrix,
    pub converged: bool,
    pub iterations: usize,
    pub eta: f64,
    pub trace: Vec<TraceRecord>,
}

impl Solution {
    pub fn last(&self) -> &TraceRecord {
        self.trace.last().expect("a solve runs at least one iteration")
    }
}

/// `1.01 * ||mu1 V^T V + mu2 I||_2` for the three-block model; the
/// two-block models majorize only `mu1 V^T V`. An explicit `Eta::Fixed`
/// is returned unchanged.
pub fn resolve_eta(p: &ProblemSpec, cfg: &SolverConfig) -> Result<f64> {
    if let Eta::Fixed(v) = cfg.eta {
        return Ok(v);
    }
    let v = p.dictionary();
    let n = p.n_atoms();
    let mut gram = v.transpose() * v * cfg.mu1;
    if p.model == ModelKind::LowRankSparse {
        gram += DMatrix::<f64>::identity(n, n) * cfg.mu2;
    }
    let norm = spectral_norm(&gram)?;
    if norm > 0.0 {
        Ok(ETA_SAFETY * norm)
    } else {
        // all-zero dictionary: any positive step works
        Ok(ETA_SAFETY * cfg.mu1.max(f64::MIN_POSITIVE))
    }
}

/// Gradient of the smooth part of the augmented Lagrangian in `Z`:
/// `mu1 V^T (VZ + E - X - T1/mu1) + mu2 Z - mu2 A - T2`.
fn z_gradient(st: &SolverState, p: &ProblemSpec, cfg: &SolverConfig, with_a_block: bool) -> Matrix {
    let v = p.dictionary();
    let inner = v * &st.z + &st.e - p.target() - &st.t1 / cfg.mu1;
    let mut b = v.transpose() * inner * cfg.mu1;
    if with_a_block {
        b += &st.z * cfg.mu2 - &st.a * cfg.mu2 - &st.t2;
    }
    b
}

/// `P(D_{1/eta}(Z^k - B^k / eta))`.
pub fn update_z(st: &SolverState, p: &ProblemSpec, cfg: &SolverConfig) -> Result<Matrix> {
    st.check(p)?;
    let eta = cfg.eta_value()?;
    let b = z_gradient(st, p, cfg, true);
    let mut z = svt(&(&st.z - b / eta), 1.0 / eta)?;
    zero_diagonal_in_place(&mut z, p.n_labeled())?;
    Ok(z)
}

/// `P(S_{lambda1/mu2}(Z^{k+1} - T2^k / mu2))`; `st.z` must already hold
/// `Z^{k+1}`.
pub fn update_a(st: &SolverState, p: &ProblemSpec, cfg: &SolverConfig) -> Result<Matrix> {
    st.check(p)?;
    let mut a = soft_threshold(&(&st.z - &st.t2 / cfg.mu2), p.reg.lambda1 / cfg.mu2)?;
    zero_diagonal_in_place(&mut a, p.n_labeled())?;
    Ok(a)
}

/// `S_{w/mu1}(X - V Z^{k+1} + T1^k / mu1)` where `w` is `lambda2`, or
/// `delta` for the low-rank-only model.
pub fn update_e(st: &SolverState, p: &ProblemSpec, cfg: &SolverConfig) -> Result<Matrix> {
    st.check(p)?;
    let weight = match p.model {
        ModelKind::LowRank => p.reg.delta,
        _ => p.reg.lambda2,
    };
    let arg = p.target() - p.dictionary() * &st.z + &st.t1 / cfg.mu1;
    soft_threshold(&arg, weight / cfg.mu1)
}

/// `T1 - mu1 (VZ + E - X)` and `T2 - mu2 (Z - A)` from the freshly updated
/// primal blocks in `st`.
pub fn update_t(st: &SolverState, p: &ProblemSpec, cfg: &SolverConfig) -> Result<(Matrix, Matrix)> {
    st.check(p)?;
    let r1 = p.dictionary() * &st.z + &st.e - p.target();
    let t1 = &st.t1 - r1 * cfg.mu1;
    let t2 = &st.t2 - (&st.z - &st.a) * cfg.mu2;
    Ok((t1, t2))
}

/// `sqrt(mu2 ||dA - dT2/mu2||_F^2 + mu1 ||dE||_F^2)` between consecutive
/// states.
pub fn h_norm_diff(prev: &SolverState, cur: &SolverState, cfg: &SolverConfig) -> f64 {
    let da = &prev.a - &cur.a;
    let dt2 = &prev.t2 - &cur.t2;
    let de = &prev.e - &cur.e;
    let a_part = (da - dt2 / cfg.mu2).norm_squared();
    (cfg.mu2 * a_part + cfg.mu1 * de.norm_squared()).sqrt()
}

fn relative_change(prev: &Matrix, cur: &Matrix) -> f64 {
    (cur - prev).norm() / prev.norm().max(1.0)
}

/// Dispatches on `p.model`.
pub fn solve(p: &ProblemSpec, cfg: &SolverConfig) -> Result<Solution> {
    solve_observed(p, cfg, |_| {})
}

/// Like [`solve`], calling `observer` with the state after every iteration.
pub fn solve_observed<O>(p: &ProblemSpec, cfg: &SolverConfig, observer: O) -> Result<Solution>
where
    O: FnMut(&SolverState),
{
    match p.model {
        ModelKind::LowRankSparse => lr_s_pfsr(p, cfg, observer),
        ModelKind::Sparse => s_pfsr(p, cfg, observer),
        ModelKind::LowRank => lr_pfsr(p, cfg, observer),
    }
}

/// Runs `step` from the zero state until the residual tolerances are met or
/// the iteration budget is spent.
fn run<F, O>(p: &ProblemSpec, cfg: &SolverConfig, mut step: F, mut observer: O) -> Result<Solution>
where
    F: FnMut(&mut SolverState) -> Result<()>,
    O: FnMut(&SolverState),
{
    let mut st = SolverState::zeros(p);
    let mut trace = Vec::with_capacity(cfg.max_iter.min(4096));
    let mut converged = false;
    while st.k < cfg.max_iter {
        let prev = st.clone();
        step(&mut st)?;
        st.k += 1;
        observer(&st);

        let (r1, r2) = p.feasibility_residuals(&st.z, &st.a, &st.e)?;
        let dz = relative_change(&prev.z, &st.z);
        let record = TraceRecord {
            iter: st.k,
            objective: p.objective_value(&st.z, &st.a, &st.e)?,
            r1,
            r2,
            dz,
            h_diff: h_norm_diff(&prev, &st, cfg),
        };
        trace.push(record);
        if r1 <= cfg.tol_r1 && r2 <= cfg.tol_r2 && dz <= cfg.tol_dz {
            converged = true;
            break;
        }
    }
    Ok(Solution {
        z: st.z,
        a: st.a,
        e: st.e,
        converged,
        iterations: st.k,
        eta: cfg.eta_value()?,
        trace,
    })
}

fn require_model(p: &ProblemSpec, want: ModelKind) -> Result<()> {
    if p.model == want {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "problem is configured for model '{}', not '{}'",
            p.model.as_str(),
            want.as_str()
        )))
    }
}

/// Low-rank + sparse model: `Z -> (A, E) -> T` per iteration.
pub fn solve_lr_s_pfsr(p: &ProblemSpec, cfg: &SolverConfig) -> Result<Solution> {
    require_model(p, ModelKind::LowRankSparse)?;
    lr_s_pfsr(p, cfg, |_| {})
}

fn lr_s_pfsr(p: &ProblemSpec, cfg: &SolverConfig, observer: impl FnMut(&SolverState)) -> Result<Solution> {
    let cfg = cfg.resolved(p)?;
    run(p, &cfg, |st| {
        st.z = update_z(st, p, &cfg)?;
        // A and E both read Z^{k+1} and the old multipliers only.
        let a = update_a(st, p, &cfg)?;
        let e = update_e(st, p, &cfg)?;
        st.a = a;
        st.e = e;
        let (t1, t2) = update_t(st, p, &cfg)?;
        st.t1 = t1;
        st.t2 = t2;
        Ok(())
    }, observer)
}

/// Sparse-only model `min ||Z||_1 s.t. X = VZ, Z_ii = 0`.
///
/// Linearized ADMM on the single equality constraint: a soft-threshold step
/// on `Z` (projected onto the zero-diagonal set) followed by the `T1`
/// ascent. `A` mirrors `Z` and `E` stays zero, so `r2` is always 0.
pub fn solve_s_pfsr(p: &ProblemSpec, cfg: &SolverConfig) -> Result<Solution> {
    require_model(p, ModelKind::Sparse)?;
    s_pfsr(p, cfg, |_| {})
}

fn s_pfsr(p: &ProblemSpec, cfg: &SolverConfig, observer: impl FnMut(&SolverState)) -> Result<Solution> {
    let cfg = cfg.resolved(p)?;
    let eta = cfg.eta_value()?;
    run(p, &cfg, |st| {
        let b = z_gradient(st, p, &cfg, false);
        let mut z = soft_threshold(&(&st.z - b / eta), 1.0 / eta)?;
        zero_diagonal_in_place(&mut z, p.n_labeled())?;
        st.z = z;
        st.a = st.z.clone();
        let (t1, _) = update_t(st, p, &cfg)?;
        st.t1 = t1;
        Ok(())
    }, observer)
}

/// Low-rank-only model `min ||Z||_* + delta ||E||_1 s.t. X = VZ + E,
/// Z_ii = 0`: the three-block iteration with the `A` block removed.
pub fn solve_lr_pfsr(p: &ProblemSpec, cfg: &SolverConfig) -> Result<Solution> {
    require_model(p, ModelKind::LowRank)?;
    lr_pfsr(p, cfg, |_| {})
}

fn lr_pfsr(p: &ProblemSpec, cfg: &SolverConfig, observer: impl FnMut(&SolverState)) -> Result<Solution> {
    let cfg = cfg.resolved(p)?;
    let eta = cfg.eta_value()?;
    run(p, &cfg, |st| {
        let b = z_gradient(st, p, &cfg, false);
        let mut z = svt(&(&st.z - b / eta), 1.0 / eta)?;
        zero_diagonal_in_place(&mut z, p.n_labeled())?;
        st.z = z;
        st.a = st.z.clone();
        st.e = update_e(st, p, &cfg)?;
        let (t1, _) = update_t(st, p, &cfg)?;
        st.t1 = t1;
        Ok(())
    }, observer)
}
