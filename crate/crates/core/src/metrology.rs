//! Estimators and bounds: squeezing frame, error propagation, cat readout,
//! the f(t) bound, exposure schedules, exact QFI and the optimizers used by
//! the scaling studies.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::dephasing::{
    coherent_sandwich_with_derivative, collective_moments, CollectiveMoments, DephasingModel,
    NoiseKind,
};
use crate::dicke::{check_unit_axis, CMatrix, DickeState, Vec3, C64};
use crate::error::{Error, Result};
use crate::fit::{fit_exponent, FitResult};
use crate::states::{oat_state, spin_coherent, StateKind, TwoAxisPath};

const ORTHO_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-9;
/// Eigenvalue pairs below this are dropped from the QFI sum.
pub const QFI_CUTOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MomentPropagation,
    CatClosedForm,
    FBound,
    QfiBound,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UncertaintyRecord {
    pub delta_omega: f64,
    pub variance_used: f64,
    pub signal_slope: f64,
    pub mu: f64,
    pub method: Method,
}

impl UncertaintyRecord {
    /// `sqrt(var / mu) / |slope|`; a vanishing slope gives `+inf`.
    pub fn propagate(variance: f64, slope: f64, mu: f64, method: Method) -> Self {
        let variance = variance.max(0.0);
        let delta_omega = if slope == 0.0 || !slope.is_finite() {
            f64::INFINITY
        } else {
            (variance / mu).sqrt() / slope.abs()
        };
        Self {
            delta_omega,
            variance_used: variance,
            signal_slope: slope,
            mu,
            method,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.delta_omega.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensingConfig {
    pub sense_axis: Vec3,
    pub estimator_axis: Vec3,
    pub mean_axis: Vec3,
    pub t: f64,
    pub total_time: f64,
    pub omega: f64,
}

impl SensingConfig {
    pub fn from_frame(frame: &SqueezingFrame, t: f64, total_time: f64) -> Self {
        Self {
            sense_axis: frame.n,
            estimator_axis: frame.r,
            mean_axis: frame.m,
            t,
            total_time,
            omega: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_axis(&self.sense_axis, "sensing axis")?;
        check_unit_axis(&self.estimator_axis, "estimator axis")?;
        check_unit_axis(&self.mean_axis, "mean axis")?;
        if self.estimator_axis.dot(&self.mean_axis).abs() > ORTHO_TOL {
            return Err(Error::Validation(
                "estimator axis must be orthogonal to the mean axis".into(),
            ));
        }
        check_times(self.t, self.total_time)?;
        if !self.omega.is_finite() {
            return Err(Error::Validation("field must be finite".into()));
        }
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.total_time / self.t
    }
}

fn check_times(t: f64, total_time: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Validation(format!("exposure time must be > 0, got {t}")));
    }
    if !(total_time.is_finite() && total_time >= t) {
        return Err(Error::Validation(format!(
            "total time {total_time} must be >= exposure time {t}"
        )));
    }
    Ok(())
}

/// Picks whichever of `v`, `-v` is lexicographically larger.
fn canonical_sign(v: Vec3) -> Vec3 {
    for i in 0..3 {
        if v[i].abs() > 1e-12 {
            return if v[i] > 0.0 { v } else { -v };
        }
    }
    v
}

fn lex_greater(a: &Vec3, b: &Vec3) -> bool {
    for i in 0..3 {
        if (a[i] - b[i]).abs() > 1e-12 {
            return a[i] > b[i];
        }
    }
    false
}

/// Lexicographically largest unit projection of a coordinate axis onto the
/// plane orthogonal to `normal`.
fn tie_break_in_plane(normal: &Vec3) -> Vec3 {
    let mut best: Option<Vec3> = None;
    for e in [Vec3::x(), Vec3::y(), Vec3::z()] {
        for cand in [e, -e] {
            let p = cand - normal * normal.dot(&cand);
            if p.norm() < 1e-6 {
                continue;
            }
            let p = p.normalize();
            if best.map_or(true, |b| lex_greater(&p, &b)) {
                best = Some(p);
            }
        }
    }
    best.expect("some coordinate axis leaves the plane normal")
}

fn plane_basis(normal: &Vec3) -> (Vec3, Vec3) {
    let e = [Vec3::x(), Vec3::y(), Vec3::z()]
        .into_iter()
        .min_by(|a, b| {
            a.dot(normal)
                .abs()
                .partial_cmp(&b.dot(normal).abs())
                .unwrap()
        })
        .unwrap();
    let u = (e - normal * normal.dot(&e)).normalize();
    (u, normal.cross(&u))
}

pub fn mean_spin_direction(moments: &CollectiveMoments) -> Result<Vec3> {
    let norm = moments.first.norm();
    if norm <= 1e-9 * moments.n_qubits as f64 {
        return Err(Error::NoMeanSpin(norm));
    }
    Ok(moments.first / norm)
}

/// Direction of least variance in the plane orthogonal to `m`.
pub fn min_variance_direction(moments: &CollectiveMoments, m: &Vec3) -> Vec3 {
    let cov = moments.covariance();
    let (u, v) = plane_basis(m);
    let a = (u.transpose() * cov * u)[(0, 0)];
    let b = (u.transpose() * cov * v)[(0, 0)];
    let c = (v.transpose() * cov * v)[(0, 0)];
    let half_gap = (((a - c) / 2.0).powi(2) + b * b).sqrt();
    let scale = (a.abs() + c.abs()).max(f64::MIN_POSITIVE);
    if 2.0 * half_gap <= TIE_TOL * scale {
        return tie_break_in_plane(m);
    }
    let lambda = (a + c) / 2.0 - half_gap;
    let first = (b, lambda - a);
    let second = (lambda - c, b);
    let (x, y) = if first.0.hypot(first.1) >= second.0.hypot(second.1) {
        first
    } else {
        second
    };
    canonical_sign((u * x + v * y).normalize())
}

/// Direction of largest variance of `J_n` over all unit vectors.
///
/// A two-fold degenerate top eigenspace resolves to `w x r`, with `w` the
/// remaining eigenvector; a fully isotropic covariance resolves to `m x r`.
/// Without the optional axes the in-plane tie-break is used.
pub fn sensing_direction(
    moments: &CollectiveMoments,
    m: Option<&Vec3>,
    r: Option<&Vec3>,
) -> Vec3 {
    let eig = SymmetricEigen::new(moments.covariance());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let lam: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vec = |i: usize| -> Vec3 { eig.eigenvectors.column(order[i]).into_owned() };
    let tol = TIE_TOL * lam[0].abs().max(f64::MIN_POSITIVE);
    if lam[0] - lam[1] > tol {
        return canonical_sign(vec(0));
    }
    if lam[1] - lam[2] > tol {
        let w = vec(2);
        if let Some(r) = r {
            let n = w.cross(r);
            if n.norm() > 1e-6 {
                return canonical_sign(n.normalize());
            }
        }
        return tie_break_in_plane(&w);
    }
    if let (Some(m), Some(r)) = (m, r) {
        let n = m.cross(r);
        if n.norm() > 1e-6 {
            return canonical_sign(n.normalize());
        }
    }
    Vec3::z()
}

/// Mean direction `m`, least-variance direction `r` and sensing direction
/// `n` of a noiseless state, with the quantities entering the squeezing
/// parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezingFrame {
    pub m: Vec3,
    pub r: Vec3,
    pub n: Vec3,
    pub mean_m: f64,
    pub var_r: f64,
    pub var_n: f64,
    pub xi2: f64,
}

pub fn frame_from_moments(moments: &CollectiveMoments) -> Result<SqueezingFrame> {
    let m = mean_spin_direction(moments)?;
    let r = min_variance_direction(moments, &m);
    let n = sensing_direction(moments, Some(&m), Some(&r));
    let mean_m = moments.mean(&m);
    let var_r = moments.variance(&r);
    Ok(SqueezingFrame {
        m,
        r,
        n,
        mean_m,
        var_r,
        var_n: moments.variance(&n),
        xi2: moments.n_qubits as f64 * var_r / (mean_m * mean_m),
    })
}

pub fn noiseless_moments(state: &DickeState) -> Result<CollectiveMoments> {
    collective_moments(state, &DephasingModel::none(), &Vec3::z(), 0.0, 0.0)
}

pub fn squeezing_frame(state: &DickeState) -> Result<SqueezingFrame> {
    frame_from_moments(&noiseless_moments(state)?)
}

/// `N Var(J_r) / <J_m>^2`.
pub fn squeezing_parameter(state: &DickeState) -> Result<f64> {
    squeezing_frame(state).map(|f| f.xi2)
}

/// Error propagation for the estimator `J_r` after exposure.
///
/// The noise acts along the configured sensing axis whatever axis `model`
/// carries.
pub fn uncertainty_moment_propagation(
    state: &DickeState,
    model: &DephasingModel,
    config: &SensingConfig,
) -> Result<UncertaintyRecord> {
    config.validate()?;
    let model = model.with_axis(config.sense_axis);
    let moments = collective_moments(state, &model, &config.sense_axis, config.omega, config.t)?;
    let r = &config.estimator_axis;
    Ok(UncertaintyRecord::propagate(
        moments.variance(r),
        moments.dmean(r),
        config.mu(),
        Method::MomentPropagation,
    ))
}

/// `sqrt(2 {Var + N (exp(2 (gamma t)^2) - 1)/4} / (T t <J_m>^2))`.
pub fn f_bound_from_moments(
    var_r: f64,
    mean_m: f64,
    n: usize,
    t: f64,
    gamma: f64,
    total_time: f64,
) -> f64 {
    let excess = n as f64 * (2.0 * (gamma * t).powi(2)).exp_m1() / 4.0;
    (2.0 * (var_r + excess) / (total_time * t * mean_m * mean_m)).sqrt()
}

pub fn f_bound(state: &DickeState, t: f64, gamma: f64, total_time: f64) -> Result<f64> {
    check_times(t, total_time)?;
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::Validation(format!("gamma must be >= 0, got {gamma}")));
    }
    let frame = squeezing_frame(state)?;
    Ok(f_bound_from_moments(
        frame.var_r,
        frame.mean_m,
        state.n_qubits(),
        t,
        gamma,
        total_time,
    ))
}

/// `t = alpha N^(-s1)`.
pub fn schedule_exposure(n: usize, s1: f64, alpha: f64) -> f64 {
    alpha * (n as f64).powf(-s1)
}

/// Probability of `sigma_y = +1` on the control qubit after exposure and
/// readout of `|g> (|0,N> + |z,N>)`, with its field derivative.
pub fn cat_readout_with_slope(
    z: C64,
    n: usize,
    omega: f64,
    t: f64,
    model: &DephasingModel,
) -> Result<(f64, f64)> {
    if z.norm() == 0.0 {
        return Err(Error::DegenerateCat);
    }
    let model = model.with_axis(Vec3::z());
    let zero = C64::new(0.0, 0.0);
    let mut value = C64::new(0.0, 0.0);
    let mut slope = C64::new(0.0, 0.0);
    for a in [zero, z] {
        for b in [zero, z] {
            let (v, d) = coherent_sandwich_with_derivative([zero, a, b, z], n, &model, omega, t)?;
            value += v;
            slope += d;
        }
    }
    let c0 = (-(n as f64) / 2.0 * z.norm_sqr().ln_1p()).exp();
    let norm = 2.0 * (1.0 + c0);
    Ok((0.5 - value.im / norm, -slope.im / norm))
}

pub fn cat_readout_probability(
    z: C64,
    n: usize,
    omega: f64,
    t: f64,
    model: &DephasingModel,
) -> Result<f64> {
    cat_readout_with_slope(z, n, omega, t, model).map(|(p, _)| p)
}

pub fn cat_uncertainty_at(
    z: C64,
    n: usize,
    omega: f64,
    t: f64,
    total_time: f64,
    model: &DephasingModel,
) -> Result<UncertaintyRecord> {
    check_times(t, total_time)?;
    let (p, slope) = cat_readout_with_slope(z, n, omega, t, model)?;
    Ok(UncertaintyRecord::propagate(
        p * (1.0 - p),
        slope,
        total_time / t,
        Method::CatClosedForm,
    ))
}

pub fn cat_uncertainty(
    z: C64,
    n: usize,
    t: f64,
    total_time: f64,
    model: &DephasingModel,
) -> Result<UncertaintyRecord> {
    cat_uncertainty_at(z, n, 0.0, t, total_time, model)
}

/// Linear-response value `(1 + |z|^2)/(N t |z|^2) sqrt(t/T)`.
pub fn cat_linear_uncertainty(z: C64, n: usize, t: f64, total_time: f64) -> f64 {
    let r2 = z.norm_sqr();
    (1.0 + r2) / (n as f64 * t * r2) * (t / total_time).sqrt()
}

/// Quantum Fisher information of `rho` for the family
/// `exp(-i w H) rho exp(i w H)`; pass `H = t J_n` for the field.
pub fn qfi_exact(rho: &CMatrix, generator: &CMatrix) -> Result<f64> {
    let dim = rho.nrows();
    if rho.ncols() != dim || generator.nrows() != dim || generator.ncols() != dim {
        return Err(Error::Validation("QFI needs square matrices of equal size".into()));
    }
    let herm = (rho - rho.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if herm > 1e-10 {
        return Err(Error::Validation(format!("density matrix not Hermitian ({herm:e})")));
    }
    let tr = rho.trace();
    if (tr - C64::from(1.0)).norm() > 1e-9 {
        return Err(Error::Validation(format!("density matrix trace {tr}")));
    }
    let sym = (rho + rho.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(sym);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-9 {
        return Err(Error::Validation(format!(
            "density matrix not positive (min eigenvalue {min:e})"
        )));
    }
    let i = C64::new(0.0, 1.0);
    let drho = (generator * rho - rho * generator) * (-i);
    let v = &eig.eigenvectors;
    let d = v.adjoint() * drho * v;
    let mut f = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let s = eig.eigenvalues[a] + eig.eigenvalues[b];
            if s > QFI_CUTOFF {
                f += d[(a, b)].norm_sqr() / s;
            }
        }
    }
    Ok(2.0 * f)
}

/// `|psi><psi|` in the Dicke basis.
pub fn dicke_density(state: &DickeState) -> CMatrix {
    let v = state.to_vector();
    &v * v.adjoint()
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > rel_tol * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimizes `f(t)` over `[lo, hi]` on a log scale: a grid scan followed by
/// golden-section refinement of `log t`. A minimum on the bracket edge is a
/// failure.
pub fn minimize_log_bracket<F>(mut f: F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let points = 121;
    let (la, lb) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..points)
        .map(|i| la + (lb - la) * i as f64 / (points - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(points);
    for &x in &grid {
        let v = f(x.exp().clamp(lo, hi))?;
        values.push(if v.is_nan() { f64::INFINITY } else { v });
    }
    let best = (0..points)
        .min_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap())
        .unwrap();
    if !values[best].is_finite() {
        return Err(Error::Numerical("objective is infinite over the whole bracket".into()));
    }
    if best == 0 || best == points - 1 {
        return Err(Error::Numerical(format!(
            "minimum sits on the bracket edge [{lo:e}, {hi:e}]"
        )));
    }
    let mut failure = None;
    let (lx, val) = golden_section(
        |x| match f(x.exp().clamp(lo, hi)) {
            Ok(v) if !v.is_nan() => v,
            Ok(_) => f64::INFINITY,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        grid[best - 1],
        grid[best + 1],
        1e-10,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((lx.exp().clamp(lo, hi), val))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiOptimum {
    pub chi: f64,
    pub xi2: f64,
}

const CHI_PER_DECADE: usize = 20;
const CHI_REL_TOL: f64 = 1e-6;

fn xi2_or_inf(state: Result<DickeState>) -> Result<f64> {
    match squeezing_parameter(&state?) {
        Ok(x) => Ok(x),
        Err(Error::NoMeanSpin(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Scans `chi` upward on a log grid from `1e-3/N` and stops once the
/// objective has clearly passed its first minimum. Returns the grid and
/// values and the index of the best point.
fn scan_first_minimum<F>(n: usize, mut eval: F) -> Result<(Vec<f64>, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let lo = 1e-3 / n as f64;
    let hi = std::f64::consts::PI;
    let ratio = 10f64.powf(1.0 / CHI_PER_DECADE as f64);
    let mut grid = Vec::new();
    let mut best = (0usize, f64::INFINITY);
    let mut chi = lo;
    while chi <= hi {
        let v = eval(chi)?;
        grid.push(chi);
        if v < best.1 {
            best = (grid.len() - 1, v);
        } else if best.1.is_finite() && grid.len() - 1 > best.0 && v > 2.0 * best.1 {
            break;
        }
        chi *= ratio;
    }
    if best.0 == 0 || !best.1.is_finite() {
        return Err(Error::Numerical(format!(
            "no interior squeezing minimum found for N = {n}"
        )));
    }
    if best.0 + 1 == grid.len() {
        grid.push(grid[best.0] * ratio);
    }
    Ok((grid, best.0))
}

/// Twisting strength minimizing the squeezing parameter of the one-axis
/// twisted state seeded at `z` (`|z| = 1`).
pub fn optimize_oat_chi(z: C64, n: usize) -> Result<ChiOptimum> {
    // validates z and n once
    oat_state(z, 0.0, n)?;
    let seed = spin_coherent(z, n)?;
    let eval = |chi: f64| xi2_or_inf(Ok(crate::states::twist_one_axis(&seed, chi)));
    let (grid, best) = scan_first_minimum(n, eval)?;
    let mut failure = None;
    let (chi, xi2) = golden_section(
        |chi| match eval(chi) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        grid[best - 1],
        grid[best + 1],
        CHI_REL_TOL,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(ChiOptimum { chi, xi2 }),
    }
}

/// Twisting strength minimizing the squeezing parameter of the two-axis
/// twisted state.
pub fn optimize_tat_chi(n: usize) -> Result<ChiOptimum> {
    let mut path = TwoAxisPath::new(n)?;
    let mut checkpoints = Vec::new();
    let eval = |chi: f64| -> Result<f64> {
        checkpoints.push(path.clone());
        path.advance_to(chi)?;
        xi2_or_inf(path.state())
    };
    let (grid, best) = scan_first_minimum(n, eval)?;
    // checkpoints[i] holds the path before the advance to grid[i]
    let start = checkpoints[best].clone();
    let mut failure = None;
    let (chi, xi2) = golden_section(
        |chi| {
            let mut p = start.clone();
            match p.advance_to(chi).and_then(|_| xi2_or_inf(p.state())) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            }
        },
        grid[best - 1],
        grid[best + 1],
        CHI_REL_TOL,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(ChiOptimum { chi, xi2 }),
    }
}

pub fn optimize_chi(kind: StateKind, z: C64, n: usize) -> Result<ChiOptimum> {
    match kind {
        StateKind::Oat => optimize_oat_chi(z, n),
        StateKind::Tat => optimize_tat_chi(n),
        other => Err(Error::Unsupported(format!(
            "no twisting strength to optimize for {} states",
            other.as_str()
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizedExposure {
    pub n_qubits: usize,
    pub t: f64,
    pub delta_omega: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovianComparison {
    pub fit: FitResult,
    pub points: Vec<OptimizedExposure>,
}

/// Per-N exposure optimization under exponential (Markovian) dephasing,
/// searching `t` in `[1e-4/gamma, 1e2/gamma]`, followed by an exponent fit.
pub fn markovian_comparison(
    kind: StateKind,
    z: C64,
    n_grid: &[usize],
    gamma: f64,
    total_time: f64,
) -> Result<MarkovianComparison> {
    if n_grid.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: n_grid.len(),
        });
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Validation("Markovian comparison needs gamma > 0".into()));
    }
    let (lo, hi) = (1e-4 / gamma, 1e2 / gamma);
    if !(total_time.is_finite() && total_time >= hi) {
        return Err(Error::Validation(format!(
            "total time must cover the exposure bracket (>= {hi:e})"
        )));
    }
    let model = DephasingModel {
        kind: NoiseKind::ExponentialMarkovian,
        gamma,
        axis: Vec3::z(),
    };
    let mut points = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let (t, delta_omega) = match kind {
            StateKind::Cat => minimize_log_bracket(
                |t| cat_uncertainty(z, n, t, total_time, &model).map(|r| r.delta_omega),
                lo,
                hi,
            )?,
            StateKind::Coherent => {
                let state = spin_coherent(z, n)?;
                let frame = squeezing_frame(&state)?;
                minimize_log_bracket(
                    |t| {
                        let cfg = SensingConfig::from_frame(&frame, t, total_time);
                        uncertainty_moment_propagation(&state, &model, &cfg)
                            .map(|r| r.delta_omega)
                    },
                    lo,
                    hi,
                )?
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "Markovian comparison not available for {} states",
                    other.as_str()
                )))
            }
        };
        points.push(OptimizedExposure {
            n_qubits: n,
            t,
            delta_omega,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.n_qubits as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.delta_omega).collect();
    Ok(MarkovianComparison {
        fit: fit_exponent(&xs, &ys)?,
        points,
    })
}
