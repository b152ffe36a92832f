//! Cyclic Hitchin system on a periodic square grid.
//!
//! The unknowns are `v1 = log g1`, `v2 = log g2`; the squared norms of the
//! Higgs field entries are `‖β‖² = b0 e^{v1}`, `‖α‖² = a0 e^{v2 - v1}` and
//! `‖δ‖² = d0 e^{-v1 - 2 v2}`. The α- and β-equations
//!
//! ```text
//! Δ log‖α‖² = 2‖α‖² - 3‖β‖² - ‖δ‖² + κ
//! Δ log‖β‖² = 2‖β‖² -  ‖α‖²         + κ
//! ```
//!
//! are discretized with the periodic 5-point Laplacian and solved by damped
//! Newton iteration. Each linear step is GMRES, preconditioned by the exact
//! Fourier inverse of the Jacobian with coefficients replaced by their means.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HitchinError {
    #[error("grid size {0} is below the minimum of 8")]
    GridTooSmall(usize),
    #[error("field `{0}` does not have n*n entries")]
    DimensionMismatch(&'static str),
    #[error("field `{0}` has a non-finite or negative entry")]
    InvalidField(&'static str),
    #[error("alpha0sq and beta0sq both vanish identically")]
    DegenerateData,
    #[error("field `{0}` vanishes somewhere but not everywhere; mask its zeros first")]
    MaskedZeros(&'static str),
    #[error("tolerance must be positive")]
    InvalidTolerance,
    #[error("linear solve failed to make progress (relative residual {0:e})")]
    SingularJacobian(f64),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Divergence { iterations: usize, residual: f64 },
    #[error("inconsistent flags: {0}")]
    InconsistentFlags(String),
}

/// Prescribed data on an `n × n` periodic grid with spacing `length / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HitchinData {
    pub n: usize,
    pub length: f64,
    pub alpha0sq: Vec<f64>,
    pub beta0sq: Vec<f64>,
    pub delta0sq: Vec<f64>,
    pub kappa: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Activity {
    Active,
    Off,
}

fn activity(name: &'static str, f: &[f64]) -> Result<Activity, HitchinError> {
    let pos = f.iter().filter(|&&x| x > 0.0).count();
    match pos {
        0 => Ok(Activity::Off),
        p if p == f.len() => Ok(Activity::Active),
        _ => Err(HitchinError::MaskedZeros(name)),
    }
}

pub const DEFAULT_LENGTH: f64 = 2.0 * PI;

impl HitchinData {
    pub fn new(
        n: usize,
        length: f64,
        alpha0sq: Vec<f64>,
        beta0sq: Vec<f64>,
        delta0sq: Vec<f64>,
        kappa: Vec<f64>,
    ) -> Result<Self, HitchinError> {
        if n < 8 {
            return Err(HitchinError::GridTooSmall(n));
        }
        for (name, f, signed) in [
            ("alpha0sq", &alpha0sq, false),
            ("beta0sq", &beta0sq, false),
            ("delta0sq", &delta0sq, false),
            ("kappa", &kappa, true),
        ] {
            if f.len() != n * n {
                return Err(HitchinError::DimensionMismatch(name));
            }
            if f.iter().any(|x| !x.is_finite() || (!signed && *x < 0.0)) {
                return Err(HitchinError::InvalidField(name));
            }
        }
        let d = HitchinData { n, length, alpha0sq, beta0sq, delta0sq, kappa };
        let (a, b) = d.activity()?;
        if a == Activity::Off && b == Activity::Off {
            return Err(HitchinError::DegenerateData);
        }
        activity("delta0sq", &d.delta0sq)?;
        Ok(d)
    }

    pub fn constant(n: usize, a0: f64, b0: f64, d0: f64, kappa: f64) -> Result<Self, HitchinError> {
        let c = |x: f64| vec![x; n * n];
        HitchinData::new(n, DEFAULT_LENGTH, c(a0), c(b0), c(d0), c(kappa))
    }

    /// Unit data on a flat torus.
    pub fn flat_constant(n: usize) -> Self {
        Self::constant(n, 1.0, 1.0, 1.0, 0.0).unwrap()
    }

    /// `α = β = 1`, `δ = 0`, `κ = -1`.
    pub fn hitchin(n: usize) -> Self {
        Self::constant(n, 1.0, 1.0, 0.0, -1.0).unwrap()
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    fn activity(&self) -> Result<(Activity, Activity), HitchinError> {
        Ok((activity("alpha0sq", &self.alpha0sq)?, activity("beta0sq", &self.beta0sq)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitchinState {
    pub n: usize,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
}

/// Squared norms `(‖α‖², ‖β‖², ‖δ‖²)` as grid fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Norms {
    pub alpha_sq: Vec<f64>,
    pub beta_sq: Vec<f64>,
    pub delta_sq: Vec<f64>,
}

impl HitchinState {
    pub fn zero(n: usize) -> Self {
        HitchinState { n, v1: vec![0.0; n * n], v2: vec![0.0; n * n] }
    }

    pub fn constant(n: usize, v1: f64, v2: f64) -> Self {
        HitchinState { n, v1: vec![v1; n * n], v2: vec![v2; n * n] }
    }

    fn check(&self, data: &HitchinData) -> Result<(), HitchinError> {
        if self.n != data.n || self.v1.len() != data.n * data.n {
            return Err(HitchinError::DimensionMismatch("v1"));
        }
        if self.v2.len() != data.n * data.n {
            return Err(HitchinError::DimensionMismatch("v2"));
        }
        Ok(())
    }

    pub fn norms(&self, data: &HitchinData) -> Norms {
        let m = self.v1.len();
        Norms {
            alpha_sq: (0..m).map(|i| data.alpha0sq[i] * (self.v2[i] - self.v1[i]).exp()).collect(),
            beta_sq: (0..m).map(|i| data.beta0sq[i] * self.v1[i].exp()).collect(),
            delta_sq: (0..m).map(|i| data.delta0sq[i] * (-self.v1[i] - 2.0 * self.v2[i]).exp()).collect(),
        }
    }
}

/// Periodic 5-point Laplacian.
pub fn laplacian(f: &[f64], n: usize, h: f64) -> Vec<f64> {
    let s = 1.0 / (h * h);
    let mut out = vec![0.0; n * n];
    for r in 0..n {
        let (up, dn) = ((r + n - 1) % n, (r + 1) % n);
        for c in 0..n {
            let (lf, rt) = ((c + n - 1) % n, (c + 1) % n);
            out[r * n + c] = s * (f[up * n + c] + f[dn * n + c] + f[r * n + lf] + f[r * n + rt] - 4.0 * f[r * n + c]);
        }
    }
    out
}

fn log_field(f: &[f64]) -> Vec<f64> {
    f.iter().map(|x| x.ln()).collect()
}

/// Residuals of the α- and β-equations; an equation whose data vanish
/// identically is inactive and reports zero.
pub fn residual(data: &HitchinData, state: &HitchinState) -> Result<[Vec<f64>; 2], HitchinError> {
    state.check(data)?;
    let (act_a, act_b) = data.activity()?;
    let h = data.spacing();
    let nm = state.norms(data);
    let m = data.n * data.n;
    let r_alpha = if act_a == Activity::Active {
        let la: Vec<f64> = (0..m).map(|i| data.alpha0sq[i].ln() + state.v2[i] - state.v1[i]).collect();
        let lap = laplacian(&la, data.n, h);
        (0..m)
            .map(|i| lap[i] - (2.0 * nm.alpha_sq[i] - 3.0 * nm.beta_sq[i] - nm.delta_sq[i] + data.kappa[i]))
            .collect()
    } else {
        vec![0.0; m]
    };
    let r_beta = if act_b == Activity::Active {
        let lb: Vec<f64> = (0..m).map(|i| data.beta0sq[i].ln() + state.v1[i]).collect();
        let lap = laplacian(&lb, data.n, h);
        (0..m).map(|i| lap[i] - (2.0 * nm.beta_sq[i] - nm.alpha_sq[i] + data.kappa[i])).collect()
    } else {
        vec![0.0; m]
    };
    Ok([r_alpha, r_beta])
}

/// Residual of the dependent δ-equation `Δ log‖δ‖² = 2‖δ‖² - ‖α‖² + κ`.
pub fn delta_residual(data: &HitchinData, state: &HitchinState) -> Result<Vec<f64>, HitchinError> {
    state.check(data)?;
    if activity("delta0sq", &data.delta0sq)? == Activity::Off {
        return Err(HitchinError::InvalidField("delta0sq"));
    }
    let nm = state.norms(data);
    let ld: Vec<f64> = nm.delta_sq.iter().map(|x| x.ln()).collect();
    let lap = laplacian(&ld, data.n, data.spacing());
    Ok((0..ld.len()).map(|i| lap[i] - (2.0 * nm.delta_sq[i] - nm.alpha_sq[i] + data.kappa[i])).collect())
}

fn max_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn norm2(f: &[f64]) -> f64 {
    f.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Linearization.

/// Jacobian of the residual in the variables `(y1, y2)`: `y1 = log‖α‖²` if
/// the α-equation is active and `v2` otherwise, `y2 = log‖β‖²` or `v1`.
/// Active rows are `Δ y_i + d_ii y_i + d_ij y_j`; inactive rows are identity.
struct Jacobian {
    n: usize,
    h: f64,
    active: [bool; 2],
    d: [[Vec<f64>; 2]; 2],
}

impl Jacobian {
    fn new(data: &HitchinData, state: &HitchinState, active: [bool; 2]) -> Self {
        let nm = state.norms(data);
        let m = data.n * data.n;
        let (a, b, dd) = (&nm.alpha_sq, &nm.beta_sq, &nm.delta_sq);
        let f = |g: &dyn Fn(usize) -> f64| (0..m).map(g).collect::<Vec<f64>>();
        let zero = vec![0.0; m];
        let d = match active {
            [true, true] => [
                [f(&|i| -2.0 * a[i] - 2.0 * dd[i]), f(&|i| 3.0 * b[i] - 3.0 * dd[i])],
                [a.clone(), f(&|i| -2.0 * b[i])],
            ],
            [true, false] => [[f(&|i| -2.0 * a[i] - 2.0 * dd[i]), zero.clone()], [zero.clone(), zero]],
            [false, true] => [[zero.clone(), zero.clone()], [zero, f(&|i| -2.0 * b[i])]],
            [false, false] => unreachable!("data validated"),
        };
        Jacobian { n: data.n, h: data.spacing(), active, d }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.n * self.n;
        let (x1, x2) = x.split_at(m);
        let mut out = vec![0.0; 2 * m];
        for (row, (xi, xj)) in [(x1, x2), (x2, x1)].into_iter().enumerate() {
            let o = &mut out[row * m..(row + 1) * m];
            if !self.active[row] {
                o.copy_from_slice(xi);
                continue;
            }
            let lap = laplacian(xi, self.n, self.h);
            let (dii, dij) = (&self.d[row][row], &self.d[row][1 - row]);
            for k in 0..m {
                o[k] = lap[k] + dii[k] * xi[k] + dij[k] * xj[k];
            }
        }
        out
    }
}

/// Fourier inverse of the Jacobian with mean coefficients.
struct Preconditioner {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Per mode 2x2 inverse.
    blocks: Vec<[[f64; 2]; 2]>,
}

impl Preconditioner {
    fn new(j: &Jacobian, planner: &mut FftPlanner<f64>) -> Result<Self, HitchinError> {
        let n = j.n;
        let mean = |f: &Vec<f64>| f.iter().sum::<f64>() / f.len() as f64;
        let m: [[f64; 2]; 2] = std::array::from_fn(|r| std::array::from_fn(|c| mean(&j.d[r][c])));
        let s = 4.0 / (j.h * j.h);
        let mut blocks = Vec::with_capacity(n * n);
        for kr in 0..n {
            for kc in 0..n {
                let lam = s * ((PI * kr as f64 / n as f64).sin().powi(2) + (PI * kc as f64 / n as f64).sin().powi(2));
                let e = |r: usize, c: usize| {
                    if j.active[r] {
                        m[r][c] - if r == c { lam } else { 0.0 }
                    } else if r == c {
                        1.0
                    } else {
                        0.0
                    }
                };
                let (a, b, c, d) = (e(0, 0), e(0, 1), e(1, 0), e(1, 1));
                let det = a * d - b * c;
                if det.abs() < 1e-300 || !det.is_finite() {
                    return Err(HitchinError::SingularJacobian(f64::INFINITY));
                }
                blocks.push([[d / det, -b / det], [-c / det, a / det]]);
            }
        }
        Ok(Preconditioner { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n), blocks })
    }

    fn fft2(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        fft.process(buf);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = buf[r * n + c];
            }
            fft.process(&mut col);
            for r in 0..n {
                buf[r * n + c] = col[r];
            }
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.n * self.n;
        let mut f: [Vec<Complex64>; 2] =
            std::array::from_fn(|k| x[k * m..(k + 1) * m].iter().map(|&v| Complex64::new(v, 0.0)).collect());
        for buf in f.iter_mut() {
            self.fft2(buf, &self.fwd);
        }
        for k in 0..m {
            let b = &self.blocks[k];
            let (p, q) = (f[0][k], f[1][k]);
            f[0][k] = p * b[0][0] + q * b[0][1];
            f[1][k] = p * b[1][0] + q * b[1][1];
        }
        let mut out = vec![0.0; 2 * m];
        let scale = 1.0 / m as f64;
        for (k, buf) in f.iter_mut().enumerate() {
            self.fft2(buf, &self.inv);
            for i in 0..m {
                out[k * m + i] = buf[i].re * scale;
            }
        }
        out
    }
}

/// Right-preconditioned restarted GMRES for `J x = b` from `x = 0`.
fn gmres(j: &Jacobian, p: &Preconditioner, b: &[f64], rtol: f64, restart: usize, max_iter: usize) -> (Vec<f64>, f64) {
    let dim = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; dim];
    if bnorm == 0.0 {
        return (x, 0.0);
    }
    let mut total = 0;
    let mut rel = 1.0;
    while total < max_iter {
        let ax = j.apply(&x);
        let r: Vec<f64> = (0..dim).map(|i| b[i] - ax[i]).collect();
        let beta = norm2(&r);
        rel = beta / bnorm;
        if rel <= rtol {
            break;
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut hcols: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<f64> = Vec::new();
        let mut g = vec![beta];
        for k in 0..restart {
            total += 1;
            let mut w = j.apply(&p.apply(&basis[k]));
            let mut hcol = vec![0.0; k + 2];
            for (i, v) in basis.iter().enumerate() {
                hcol[i] = dot(&w, v);
                for t in 0..dim {
                    w[t] -= hcol[i] * v[t];
                }
            }
            hcol[k + 1] = norm2(&w);
            for i in 0..k {
                let t = cs[i] * hcol[i] + sn[i] * hcol[i + 1];
                hcol[i + 1] = -sn[i] * hcol[i] + cs[i] * hcol[i + 1];
                hcol[i] = t;
            }
            let den = hcol[k].hypot(hcol[k + 1]);
            let (c, s) = if den == 0.0 { (1.0, 0.0) } else { (hcol[k] / den, hcol[k + 1] / den) };
            cs.push(c);
            sn.push(s);
            let hk1 = hcol[k + 1];
            hcol[k] = c * hcol[k] + s * hk1;
            hcol[k + 1] = 0.0;
            g.push(-s * g[k]);
            g[k] *= c;
            let next = if hk1 > 0.0 { w.iter().map(|v| v / hk1).collect() } else { vec![0.0; dim] };
            hcols.push(hcol);
            basis.push(next);
            rel = g[k + 1].abs() / bnorm;
            if rel <= rtol || total >= max_iter || hk1 == 0.0 {
                break;
            }
        }
        // back substitution
        let kdim = hcols.len();
        let mut y = vec![0.0; kdim];
        for i in (0..kdim).rev() {
            let mut acc = g[i];
            for c in i + 1..kdim {
                acc -= hcols[c][i] * y[c];
            }
            y[i] = acc / hcols[i][i];
        }
        let mut u = vec![0.0; dim];
        for (c, yc) in y.iter().enumerate() {
            for t in 0..dim {
                u[t] += yc * basis[c][t];
            }
        }
        let dx = p.apply(&u);
        for t in 0..dim {
            x[t] += dx[t];
        }
        if rel <= rtol {
            break;
        }
    }
    (x, rel)
}

// ---------------------------------------------------------------------------
// Newton iteration.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-10, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub state: HitchinState,
    pub iterations: usize,
    pub final_residual: f64,
}

fn residual_vec(data: &HitchinData, state: &HitchinState) -> Result<Vec<f64>, HitchinError> {
    let [a, b] = residual(data, state)?;
    Ok(a.into_iter().chain(b).collect())
}

/// Apply a step in the `(y1, y2)` variables to `(v1, v2)`.
fn step_state(state: &HitchinState, dy: &[f64], t: f64, active: [bool; 2]) -> HitchinState {
    let m = state.v1.len();
    let (d1, d2) = dy.split_at(m);
    let mut s = state.clone();
    for i in 0..m {
        // y2 is v1 up to a constant; y1 is v2 - v1 or v2 up to a constant
        s.v1[i] += t * d2[i];
        s.v2[i] += t * (d1[i] + if active[0] { d2[i] } else { 0.0 });
    }
    s
}

/// Damped Newton iteration from `init`.
pub fn solve(data: &HitchinData, init: &HitchinState, opts: SolveOptions) -> Result<SolveReport, HitchinError> {
    if !(opts.tol > 0.0) {
        return Err(HitchinError::InvalidTolerance);
    }
    init.check(data)?;
    let (a, b) = data.activity()?;
    let active = [a == Activity::Active, b == Activity::Active];
    let mut planner = FftPlanner::new();
    let mut state = init.clone();
    let mut r = residual_vec(data, &state)?;
    let mut rmax = max_abs(&r);
    let mut it = 0;
    while rmax >= opts.tol {
        if it >= opts.max_iter || !rmax.is_finite() {
            return Err(HitchinError::Divergence { iterations: it, residual: rmax });
        }
        it += 1;
        let j = Jacobian::new(data, &state, active);
        let p = Preconditioner::new(&j, &mut planner)?;
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let rtol = (1e-2 * rmax).clamp(1e-12, 1e-4);
        let (dy, rel) = gmres(&j, &p, &rhs, rtol, 40, 400);
        if !(rel < 0.5) {
            return Err(HitchinError::SingularJacobian(rel));
        }
        let r0 = norm2(&r);
        let mut t = 1.0;
        loop {
            let trial = step_state(&state, &dy, t, active);
            let rt = residual_vec(data, &trial)?;
            let n2 = norm2(&rt);
            if n2.is_finite() && n2 <= (1.0 - 1e-4 * t) * r0 {
                state = trial;
                r = rt;
                break;
            }
            t *= 0.5;
            if t < 1e-6 {
                return Err(HitchinError::Divergence { iterations: it, residual: rmax });
            }
        }
        rmax = max_abs(&r);
    }
    Ok(SolveReport { state, iterations: it, final_residual: rmax })
}

// ---------------------------------------------------------------------------
// Maximum principles.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Beta,
    Alpha,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCheck {
    pub name: &'static str,
    pub sup: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxPrincipleReport {
    pub family: Family,
    pub checks: Vec<RatioCheck>,
    pub pass: bool,
}

pub const MAX_PRINCIPLE_SLACK: f64 = 1e-8;

fn sup_ratio(num: &[f64], den: &[f64]) -> f64 {
    num.iter()
        .zip(den)
        .map(|(a, b)| if *a == 0.0 { 0.0 } else if *b == 0.0 { f64::INFINITY } else { (a / b).sqrt() })
        .fold(0.0, f64::max)
}

/// Suprema of `‖α‖/‖β‖` and `‖δ‖/‖β‖` (β-family, bounds `√2` and `1`) or of
/// `‖β‖/‖α‖` (α-family, bound `√(3/5)`).
pub fn check_max_principles(state: &HitchinState, data: &HitchinData, family: Family) -> MaxPrincipleReport {
    let nm = state.norms(data);
    let mk = |name, sup: f64, bound: f64| RatioCheck { name, sup, bound, pass: sup <= bound + MAX_PRINCIPLE_SLACK };
    let checks = match family {
        Family::Beta => vec![
            mk("alpha_over_beta", sup_ratio(&nm.alpha_sq, &nm.beta_sq), 2f64.sqrt()),
            mk("delta_over_beta", sup_ratio(&nm.delta_sq, &nm.beta_sq), 1.0),
        ],
        Family::Alpha => vec![mk("beta_over_alpha", sup_ratio(&nm.beta_sq, &nm.alpha_sq), (3.0f64 / 5.0).sqrt())],
    };
    let pass = checks.iter().all(|c| c.pass);
    MaxPrincipleReport { family, checks, pass }
}

// ---------------------------------------------------------------------------
// Stability tables.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    StrictlyPolystable,
    NotPolystable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilityInput {
    pub family: Family,
    pub genus: i64,
    /// `deg B` for the β-family, `deg T` for the α-family.
    pub degree: i64,
    pub alpha_nonzero: bool,
    pub beta_nonzero: bool,
    pub delta_nonzero: bool,
    pub same_divisor: bool,
}

pub fn classify_stability(s: &StabilityInput) -> Result<Stability, HitchinError> {
    use Stability::*;
    let bad = |m: &str| Err(HitchinError::InconsistentFlags(m.to_string()));
    if s.genus < 2 {
        return bad("genus must be at least 2");
    }
    let (g, d) = (s.genus, s.degree);
    match s.family {
        Family::Beta => {
            // α ∈ H^0(K^3 B^{-1}), δ ∈ H^0(B^2)
            if !s.beta_nonzero {
                return bad("beta is fixed to 1 for the beta family");
            }
            if s.same_divisor {
                return bad("same_divisor applies to the alpha family only");
            }
            if s.alpha_nonzero && d > 6 * g - 6 {
                return bad("alpha nonzero needs deg B <= 6g-6");
            }
            if s.delta_nonzero && d < 0 {
                return bad("delta nonzero needs deg B >= 0");
            }
            if d < 0 || d > 6 * g - 6 {
                return Ok(NotPolystable);
            }
            Ok(match (s.alpha_nonzero, s.delta_nonzero) {
                (true, _) if d > g - 1 => Stable,
                (true, true) if d > 0 => Stable,
                (true, false) if d > 0 => NotPolystable,
                (true, true) => StrictlyPolystable,
                (true, false) => NotPolystable,
                (false, false) if d == g - 1 => StrictlyPolystable,
                (false, false) => NotPolystable,
                (false, true) if d == 0 => StrictlyPolystable,
                (false, true) if d < 2 * g - 2 => Stable,
                (false, true) => NotPolystable,
            })
        }
        Family::Alpha => {
            // β ∈ H^0(K T^{-1}), δ ∈ H^0(T^3 K^3)
            if !s.alpha_nonzero {
                return bad("alpha is fixed to 1 for the alpha family");
            }
            if s.beta_nonzero && d > 2 * g - 2 {
                return bad("beta nonzero needs deg T <= 2g-2");
            }
            if s.delta_nonzero && d < 2 - 2 * g {
                return bad("delta nonzero needs deg T >= -2g+2");
            }
            if s.same_divisor && !(s.beta_nonzero && s.delta_nonzero) {
                return bad("same_divisor needs beta and delta nonzero");
            }
            if d < 2 - 2 * g || d > 2 * g - 2 {
                return Ok(NotPolystable);
            }
            Ok(match (s.beta_nonzero, s.delta_nonzero) {
                (true, true) if d == 1 - g && s.same_divisor => StrictlyPolystable,
                (true, true) => Stable,
                (true, false) if d > 1 - g => Stable,
                (true, false) => NotPolystable,
                (false, true) if d < 1 - g => StrictlyPolystable,
                (false, true) => NotPolystable,
                (false, false) if d == 1 - g => StrictlyPolystable,
                (false, false) => NotPolystable,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Random data.

/// Random trigonometric polynomial with frequencies up to `modes`, scaled to
/// sup norm `amplitude`.
pub fn random_smooth_field<R: Rng + ?Sized>(rng: &mut R, n: usize, modes: i32, amplitude: f64) -> Vec<f64> {
    let mut f = vec![0.0; n * n];
    for kx in -modes..=modes {
        for ky in 0..=modes {
            if kx == 0 && ky == 0 {
                continue;
            }
            let (c, s): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for r in 0..n {
                for col in 0..n {
                    let ph = 2.0 * PI * (kx as f64 * r as f64 + ky as f64 * col as f64) / n as f64;
                    f[r * n + col] += c * ph.cos() + s * ph.sin();
                }
            }
        }
    }
    let m = max_abs(&f).max(1e-300);
    f.iter().map(|x| amplitude * x / m).collect()
}

/// β-family data with nonconstant positive `α, β, δ` and curvature
/// `κ = Δ log(a0^2 b0^3 d0) / 6`, which makes the δ-equation a consequence
/// of the other two.
pub fn random_beta_family_data<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HitchinData {
    let mut field = |c: f64| -> Vec<f64> { random_smooth_field(rng, n, 2, 0.4).iter().map(|x| c * x.exp()).collect() };
    let (a, b, d) = (field(1.0), field(1.0), field(0.5));
    let prod: Vec<f64> = (0..n * n).map(|i| a[i].powi(2) * b[i].powi(3) * d[i]).collect();
    let kappa = laplacian(&log_field(&prod), n, DEFAULT_LENGTH / n as f64).iter().map(|x| x / 6.0).collect();
    HitchinData::new(n, DEFAULT_LENGTH, a, b, d, kappa).unwrap()
}

/// α-family data: `δ = 0` and curvature `-1` plus a smooth perturbation.
pub fn random_alpha_family_data<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HitchinData {
    let mut field = || -> Vec<f64> { random_smooth_field(rng, n, 2, 0.4).iter().map(|x| x.exp()).collect() };
    let (a, b) = (field(), field());
    let kappa = random_smooth_field(rng, n, 2, 0.3).iter().map(|x| x - 1.0).collect();
    HitchinData::new(n, DEFAULT_LENGTH, a, b, vec![0.0; n * n], kappa).unwrap()
}

/// State with `‖α‖² = alpha_sq`, `‖β‖² = beta_sq` everywhere.
pub fn state_with_norms(data: &HitchinData, alpha_sq: f64, beta_sq: f64) -> HitchinState {
    let m = data.n * data.n;
    let v1: Vec<f64> = (0..m).map(|i| (beta_sq / data.beta0sq[i]).ln()).collect();
    let v2 = (0..m).map(|i| (alpha_sq / data.alpha0sq[i]).ln() + v1[i]).collect();
    HitchinState { n: data.n, v1, v2 }
}
