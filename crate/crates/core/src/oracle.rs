//! Brute-force reference in the full 2^N Hilbert space (N <= 10).
//!
//! Nothing here reuses the Dicke-space kernels: states are built qubit by
//! qubit, channels act through explicit Kraus operators and rotations are
//! products of closed-form single-qubit unitaries.
//!
//! Qubit `q` of an `n`-qubit register is bit `n - 1 - q` of the basis index,
//! with `|g> = 0` and `|e> = 1`.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};

use crate::dephasing::{DephasingModel, NoiseKind};
use crate::dicke::{DickeState, Vec3, C64};
use crate::error::{Error, Result};

pub const ORACLE_MAX_QUBITS: usize = 10;

type Op2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

const SX: Op2 = [[ZERO, ONE], [ONE, ZERO]];
const SY: Op2 = [[ZERO, I], [C64::new(0.0, -1.0), ZERO]];
const SZ: Op2 = [[C64::new(-1.0, 0.0), ZERO], [ZERO, ONE]];
const SPLUS: Op2 = [[ZERO, ZERO], [ONE, ZERO]];
const SMINUS: Op2 = [[ZERO, ONE], [ZERO, ZERO]];

fn check_scale(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("need at least one qubit".into()));
    }
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::OracleScale {
            n,
            max: ORACLE_MAX_QUBITS,
        });
    }
    Ok(())
}

fn along(axis: &Vec3) -> Op2 {
    let mut out = [[ZERO; 2]; 2];
    for (w, s) in [(axis.x, SX), (axis.y, SY), (axis.z, SZ)] {
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] += s[r][c] * w;
            }
        }
    }
    out
}

/// `exp(-i angle/2 axis.sigma) = cos(angle/2) I - i sin(angle/2) axis.sigma`.
fn qubit_rotation(axis: &Vec3, angle: f64) -> Op2 {
    let s = along(axis);
    let (c, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            let id = if r == col { c } else { 0.0 };
            out[r][col] = C64::from(id) - I * sn * s[r][col];
        }
    }
    out
}

/// Row pairs `(i0, i1)` differing only in the bit of qubit `q`.
fn bit_pairs(q: usize, n: usize) -> impl Iterator<Item = (usize, usize)> {
    let bit = 1usize << (n - 1 - q);
    (0..1usize << n)
        .filter(move |i| i & bit == 0)
        .map(move |i| (i, i | bit))
}

/// `op` acting on qubit `q` from the left.
fn apply_left(m: &DMatrix<C64>, q: usize, n: usize, op: &Op2) -> DMatrix<C64> {
    let mut out = m.clone();
    for (i0, i1) in bit_pairs(q, n) {
        for j in 0..m.ncols() {
            let (a, b) = (m[(i0, j)], m[(i1, j)]);
            out[(i0, j)] = op[0][0] * a + op[0][1] * b;
            out[(i1, j)] = op[1][0] * a + op[1][1] * b;
        }
    }
    out
}

/// `m op^dag` with `op` on qubit `q`.
fn apply_right_adjoint(m: &DMatrix<C64>, q: usize, n: usize, op: &Op2) -> DMatrix<C64> {
    let mut out = m.clone();
    for (j0, j1) in bit_pairs(q, n) {
        for i in 0..m.nrows() {
            let (a, b) = (m[(i, j0)], m[(i, j1)]);
            out[(i, j0)] = a * op[0][0].conj() + b * op[0][1].conj();
            out[(i, j1)] = a * op[1][0].conj() + b * op[1][1].conj();
        }
    }
    out
}

fn conjugate(m: &DMatrix<C64>, q: usize, n: usize, op: &Op2) -> DMatrix<C64> {
    apply_right_adjoint(&apply_left(m, q, n, op), q, n, op)
}

fn apply_left_vec(v: &DVector<C64>, q: usize, n: usize, op: &Op2) -> DVector<C64> {
    let mut out = v.clone();
    for (i0, i1) in bit_pairs(q, n) {
        let (a, b) = (v[i0], v[i1]);
        out[i0] = op[0][0] * a + op[0][1] * b;
        out[i1] = op[1][0] * a + op[1][1] * b;
    }
    out
}

/// Density matrix of `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct FullState {
    n_qubits: usize,
    rho: DMatrix<C64>,
}

impl FullState {
    pub fn from_density(n_qubits: usize, rho: DMatrix<C64>) -> Result<Self> {
        check_scale(n_qubits)?;
        let dim = 1usize << n_qubits;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::InvalidDimension(format!(
                "{n_qubits} qubits need a {dim}x{dim} density matrix"
            )));
        }
        Ok(Self { n_qubits, rho })
    }

    pub fn pure(n_qubits: usize, psi: &DVector<C64>) -> Result<Self> {
        Self::from_density(n_qubits, psi * psi.adjoint())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn density(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.rho + self.rho.adjoint()) * C64::from(0.5);
        SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// `exp(-i angle axis.J) rho exp(i angle axis.J)`, one qubit at a time.
    pub fn rotate(&self, axis: &Vec3, angle: f64) -> FullState {
        let u = qubit_rotation(axis, angle);
        let mut rho = self.rho.clone();
        for q in 0..self.n_qubits {
            rho = conjugate(&rho, q, self.n_qubits, &u);
        }
        FullState {
            n_qubits: self.n_qubits,
            rho,
        }
    }

    /// Exchanges qubits `a` and `b`.
    pub fn swap_qubits(&self, a: usize, b: usize) -> FullState {
        let n = self.n_qubits;
        let (ba, bb) = (1usize << (n - 1 - a), 1usize << (n - 1 - b));
        let perm = |i: usize| -> usize {
            let (xa, xb) = (i & ba != 0, i & bb != 0);
            let mut j = i & !ba & !bb;
            if xa {
                j |= bb;
            }
            if xb {
                j |= ba;
            }
            j
        };
        let dim = 1usize << n;
        let rho = DMatrix::from_fn(dim, dim, |r, c| self.rho[(perm(r), perm(c))]);
        FullState { n_qubits: n, rho }
    }

    /// Reduced state of the listed qubits, in the order given.
    pub fn partial_trace_keep(&self, keep: &[usize]) -> DMatrix<C64> {
        let n = self.n_qubits;
        let k = keep.len();
        let mut out = DMatrix::<C64>::zeros(1 << k, 1 << k);
        let dim = 1usize << n;
        let sub = |i: usize| -> usize {
            keep.iter()
                .fold(0, |acc, &q| (acc << 1) | ((i >> (n - 1 - q)) & 1))
        };
        let rest_mask: usize = !keep.iter().fold(0usize, |acc, &q| acc | 1 << (n - 1 - q));
        for r in 0..dim {
            for c in 0..dim {
                if r & rest_mask == c & rest_mask {
                    out[(sub(r), sub(c))] += self.rho[(r, c)];
                }
            }
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Spreads each Dicke level uniformly over its bit strings.
pub fn embed_dicke_vector(state: &DickeState) -> Result<DVector<C64>> {
    let n = state.n_qubits();
    check_scale(n)?;
    let c = state.amplitudes();
    Ok(DVector::from_fn(1 << n, |i, _| {
        let k = (i as u32).count_ones() as usize;
        c[k] / binomial(n, k).sqrt()
    }))
}

pub fn embed_dicke(state: &DickeState) -> Result<FullState> {
    FullState::pure(state.n_qubits(), &embed_dicke_vector(state)?)
}

/// `(|g> + z|e>)^N` normalized.
pub fn product_state(z: C64, n: usize) -> Result<DVector<C64>> {
    check_scale(n)?;
    let norm = (1.0 + z.norm_sqr()).sqrt();
    Ok(DVector::from_fn(1 << n, |i, _| {
        let k = (i as u32).count_ones() as i32;
        z.powi(k) / norm.powi(n as i32)
    }))
}

pub fn oracle_cat(z: C64, n: usize) -> Result<DVector<C64>> {
    if z.norm() == 0.0 {
        return Err(Error::DegenerateCat);
    }
    let mut v = product_state(z, n)?;
    v[0] += ONE;
    let norm = v.norm();
    Ok(v / C64::from(norm))
}

pub fn oracle_ghz(n: usize) -> Result<DVector<C64>> {
    check_scale(n)?;
    let mut v = DVector::zeros(1 << n);
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    v[0] = s;
    v[(1 << n) - 1] = s;
    Ok(v)
}

/// `exp(-i chi J_z^2)` applied to `(|g> + z|e>)^N`.
pub fn oracle_oat(z: C64, chi: f64, n: usize) -> Result<DVector<C64>> {
    let mut v = product_state(z, n)?;
    for (i, a) in v.iter_mut().enumerate() {
        let m = (i as u32).count_ones() as f64 - n as f64 / 2.0;
        *a *= C64::from_polar(1.0, -chi * m * m);
    }
    Ok(v)
}

fn collective_apply(v: &DVector<C64>, n: usize, op: &Op2) -> DVector<C64> {
    (0..n).fold(DVector::zeros(v.len()), |acc, q| acc + apply_left_vec(v, q, n, op))
}

/// `exp(chi (J_+^2 - J_-^2)) |g...g>` by a sub-stepped Taylor series.
pub fn oracle_tat(chi: f64, n: usize) -> Result<DVector<C64>> {
    check_scale(n)?;
    let mut v = DVector::zeros(1 << n);
    v[0] = ONE;
    let generator = |x: &DVector<C64>| -> DVector<C64> {
        let pp = collective_apply(&collective_apply(x, n, &SPLUS), n, &SPLUS);
        let mm = collective_apply(&collective_apply(x, n, &SMINUS), n, &SMINUS);
        pp - mm
    };
    let bound = (n * n) as f64;
    let steps = ((chi.abs() * bound).ceil() as usize).max(1);
    let h = chi / steps as f64;
    for _ in 0..steps {
        let mut term = v.clone();
        let mut sum = v.clone();
        for k in 1..100 {
            term = generator(&term) * C64::from(h / k as f64);
            sum += &term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        v = sum;
    }
    let norm = v.norm();
    Ok(v / C64::from(norm))
}

/// Per-qubit dephasing with Kraus pair `{sqrt(p) I, sqrt(1-p) axis.sigma}`,
/// `p = (1 + d(t))/2`.
pub fn oracle_dephase(state: &FullState, model: &DephasingModel, t: f64) -> Result<FullState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Validation(format!("exposure time must be >= 0, got {t}")));
    }
    if model.kind == NoiseKind::None {
        return Ok(state.clone());
    }
    let d = match model.kind {
        NoiseKind::GaussianNonMarkovian => (-(model.gamma * t).powi(2)).exp(),
        NoiseKind::ExponentialMarkovian => (-model.gamma * t).exp(),
        NoiseKind::None => 1.0,
    };
    let p = (1.0 + d) / 2.0;
    let s = along(&model.axis);
    let n = state.n_qubits;
    let mut rho = state.rho.clone();
    for q in 0..n {
        let flipped = conjugate(&rho, q, n, &s);
        rho = rho * C64::from(p) + flipped * C64::from(1.0 - p);
    }
    Ok(FullState { n_qubits: n, rho })
}

/// Dephasing along `axis` followed by the field rotation about the same
/// axis by `omega t`.
pub fn oracle_expose(
    state: &FullState,
    model: &DephasingModel,
    axis: &Vec3,
    omega: f64,
    t: f64,
) -> Result<FullState> {
    let noisy = oracle_dephase(state, &model.with_axis(*axis), t)?;
    Ok(noisy.rotate(axis, omega * t))
}

/// `<J_a>` and symmetrized `<J_a J_b>` by direct traces.
pub fn oracle_moments(state: &FullState) -> (Vec3, Matrix3<f64>) {
    let n = state.n_qubits;
    let ops = [SX, SY, SZ];
    let half = C64::from(0.5);
    let j_rho: Vec<DMatrix<C64>> = ops
        .iter()
        .map(|op| {
            (0..n).fold(DMatrix::zeros(1 << n, 1 << n), |acc, q| {
                acc + apply_left(&state.rho, q, n, op)
            }) * half
        })
        .collect();
    let mut first = Vec3::zeros();
    for a in 0..3 {
        first[a] = j_rho[a].trace().re;
    }
    let mut second = Matrix3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let jb_ja_rho = (0..n).fold(ZERO, |acc, q| {
                acc + apply_left(&j_rho[a], q, n, &ops[b]).trace()
            }) * half;
            second[(a, b)] += 0.5 * jb_ja_rho.re;
            second[(b, a)] += 0.5 * jb_ja_rho.re;
        }
    }
    (first, second)
}

/// Squeezing parameter from the smallest transverse variance.
pub fn oracle_squeezing(state: &FullState) -> Result<f64> {
    let (first, second) = oracle_moments(state);
    let norm = first.norm();
    if norm <= 1e-9 * state.n_qubits as f64 {
        return Err(Error::NoMeanSpin(norm));
    }
    let m = first / norm;
    let cov = second - first * first.transpose();
    let helper = if m.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = (helper - m * m.dot(&helper)).normalize();
    let v = m.cross(&u);
    let a = u.dot(&(cov * u));
    let b = u.dot(&(cov * v));
    let c = v.dot(&(cov * v));
    let lam = (a + c) / 2.0 - (((a - c) / 2.0).powi(2) + b * b).sqrt();
    Ok(state.n_qubits as f64 * lam / (norm * norm))
}

/// Dense `axis . J` in the full space.
pub fn collective_operator(n: usize, axis: &Vec3) -> Result<DMatrix<C64>> {
    check_scale(n)?;
    let id = DMatrix::<C64>::identity(1 << n, 1 << n);
    let s = along(axis);
    Ok((0..n).fold(DMatrix::zeros(1 << n, 1 << n), |acc, q| {
        acc + apply_left(&id, q, n, &s)
    }) * C64::from(0.5))
}

/// QFI via `2 sum (l_i - l_j)^2 / (l_i + l_j) |<i|H|j>|^2`.
pub fn oracle_qfi(rho: &DMatrix<C64>, generator: &DMatrix<C64>) -> f64 {
    let h = (rho + rho.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(h);
    let v = &eig.eigenvectors;
    let g = v.adjoint() * generator * v;
    let l = &eig.eigenvalues;
    let mut f = 0.0;
    for i in 0..l.len() {
        for j in 0..l.len() {
            let s = l[i] + l[j];
            if s > 1e-12 {
                f += (l[i] - l[j]).powi(2) / s * g[(i, j)].norm_sqr();
            }
        }
    }
    2.0 * f
}

/// Joint control-memory state with the control as the leading qubit.
fn joint_with_ground_control(memory: &FullState) -> DMatrix<C64> {
    let d = 1usize << memory.n_qubits;
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    out.view_mut((0, 0), (d, d)).copy_from(&memory.rho);
    out
}

/// Control pulse `exp(-i angle/2 (cos phi sx + sin phi sy))`.
fn control_pulse(angle: f64, phase: f64) -> Op2 {
    qubit_rotation(&Vec3::new(phase.cos(), phase.sin(), 0.0), angle)
}

/// Readout probability of `sigma_y = +1` on the control after the
/// selective pi pulse (phase `-pi/2`, memory in `|g...g>`) and the memory
/// rotation to `|z,N>` conditioned on the control being excited.
pub fn oracle_cat_readout(memory: &FullState, z: C64) -> Result<f64> {
    let n = memory.n_qubits;
    check_scale(n)?;
    let d = 1usize << n;
    let rho = joint_with_ground_control(memory);

    let x = control_pulse(std::f64::consts::PI, -std::f64::consts::FRAC_PI_2);
    let mut u1 = DMatrix::<C64>::identity(2 * d, 2 * d);
    // memory block |g..g> is index 0 in each control sector
    for (r, c) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
        u1[(r * d, c * d)] = x[r][c];
    }

    let a = 1.0 / (1.0 + z.norm_sqr()).sqrt();
    let r1: Op2 = [[C64::from(a), -z.conj() * a], [z * a, C64::from(a)]];
    let mut rot = DMatrix::<C64>::identity(d, d);
    for q in 0..n {
        rot = apply_left(&rot, q, n, &r1);
    }
    let mut u2 = DMatrix::<C64>::identity(2 * d, 2 * d);
    u2.view_mut((d, d), (d, d)).copy_from(&rot);

    let u = u2 * u1;
    let out = &u * rho * u.adjoint();
    let plus = [C64::from(std::f64::consts::FRAC_1_SQRT_2), C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2)];
    let mut p = ZERO;
    for r in 0..2 {
        for c in 0..2 {
            let block = out.view((r * d, c * d), (d, d));
            p += plus[r].conj() * block.trace() * plus[c];
        }
    }
    Ok(p.re)
}

/// Whole cat protocol in the full space: build the cat, dephase along z,
/// rotate by `omega t` about z and read out.
pub fn oracle_cat_protocol(
    z: C64,
    n: usize,
    omega: f64,
    t: f64,
    model: &DephasingModel,
) -> Result<f64> {
    let cat = FullState::pure(n, &oracle_cat(z, n)?)?;
    let exposed = oracle_expose(&cat, model, &Vec3::z(), omega, t)?;
    oracle_cat_readout(&exposed, z)
}

/// Pure-state vector for a state kind, built independently of the Dicke
/// factory.
pub fn oracle_state(
    kind: crate::states::StateKind,
    z: C64,
    chi: f64,
    n: usize,
) -> Result<DVector<C64>> {
    use crate::states::StateKind;
    match kind {
        StateKind::Coherent => product_state(z, n),
        StateKind::Oat => oracle_oat(z, chi, n),
        StateKind::Tat => oracle_tat(chi, n),
        StateKind::Cat => oracle_cat(z, n),
        StateKind::Ghz => oracle_ghz(n),
    }
}
