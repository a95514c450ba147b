//! Independent per-qubit dephasing and the collective moments of the
//! dephased, field-rotated probe.
//!
//! Everything here works from the one- and two-qubit reduced density
//! matrices of the symmetric state, so cost is linear in N and the 2^N
//! state is never formed.

use nalgebra::{Matrix2, Matrix3, Matrix4};
use serde::{Deserialize, Serialize};

use crate::dicke::{check_unit_axis, DickeState, Vec3, C64};
use crate::error::{Error, Result};

/// Basis order for single-qubit matrices is `(|g>, |e>)`; for two qubits it
/// is `(gg, ge, eg, ee)`. With this order `sigma_z = diag(-1, +1)`.
pub fn pauli(axis: usize) -> Matrix2<C64> {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match axis {
        0 => Matrix2::new(o, one, one, o),
        1 => Matrix2::new(o, i, -i, o),
        2 => Matrix2::new(-one, o, o, one),
        _ => panic!("pauli axis {axis} out of range"),
    }
}

/// `n . sigma`.
pub fn pauli_along(axis: &Vec3) -> Matrix2<C64> {
    pauli(0) * C64::from(axis.x) + pauli(1) * C64::from(axis.y) + pauli(2) * C64::from(axis.z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Coherences decay as `exp(-(gamma t)^2)`.
    GaussianNonMarkovian,
    /// Coherences decay as `exp(-gamma t)`.
    ExponentialMarkovian,
    None,
}

impl NoiseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseKind::GaussianNonMarkovian => "gaussian",
            NoiseKind::ExponentialMarkovian => "markovian",
            NoiseKind::None => "none",
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "gaussian_nonmarkovian" | "gaussian_non_markovian" => {
                Ok(NoiseKind::GaussianNonMarkovian)
            }
            "markovian" | "exponential_markovian" => Ok(NoiseKind::ExponentialMarkovian),
            "none" => Ok(NoiseKind::None),
            other => Err(Error::Config(format!("unknown noise kind '{other}'"))),
        }
    }
}

/// Independent dephasing in the eigenbasis of `axis . sigma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DephasingModel {
    pub kind: NoiseKind,
    pub gamma: f64,
    pub axis: Vec3,
}

impl DephasingModel {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            gamma: 0.0,
            axis: Vec3::z(),
        }
    }

    pub fn gaussian(gamma: f64, axis: Vec3) -> Self {
        Self {
            kind: NoiseKind::GaussianNonMarkovian,
            gamma,
            axis,
        }
    }

    pub fn markovian(gamma: f64, axis: Vec3) -> Self {
        Self {
            kind: NoiseKind::ExponentialMarkovian,
            gamma,
            axis,
        }
    }

    pub fn with_axis(self, axis: Vec3) -> Self {
        Self { axis, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::Validation(format!(
                "dephasing rate must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        if self.kind != NoiseKind::None {
            check_unit_axis(&self.axis, "dephasing axis")?;
        }
        Ok(())
    }

    /// Coherence decay factor `d(t)`; underflow clamps to 0.
    pub fn decay(&self, t: f64) -> f64 {
        let d = match self.kind {
            NoiseKind::None => 1.0,
            NoiseKind::GaussianNonMarkovian => (-(self.gamma * t).powi(2)).exp(),
            NoiseKind::ExponentialMarkovian => (-self.gamma * t).exp(),
        };
        if d.is_finite() {
            d.clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == NoiseKind::None || self.gamma == 0.0
    }
}

/// First and symmetrized second moments of `(J_x, J_y, J_z)`, with their
/// derivatives with respect to the field at the evaluation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollectiveMoments {
    pub n_qubits: usize,
    pub first: Vec3,
    pub second: Matrix3<f64>,
    pub dfirst_domega: Vec3,
    pub dsecond_domega: Matrix3<f64>,
}

impl CollectiveMoments {
    pub fn mean(&self, axis: &Vec3) -> f64 {
        axis.dot(&self.first)
    }

    pub fn covariance(&self) -> Matrix3<f64> {
        self.second - self.first * self.first.transpose()
    }

    pub fn variance(&self, axis: &Vec3) -> f64 {
        (axis.transpose() * self.covariance() * axis)[(0, 0)]
    }

    pub fn dmean(&self, axis: &Vec3) -> f64 {
        axis.dot(&self.dfirst_domega)
    }

    pub fn dvariance(&self, axis: &Vec3) -> f64 {
        (axis.transpose() * self.dsecond_domega * axis)[(0, 0)]
            - 2.0 * self.mean(axis) * self.dmean(axis)
    }

    /// `j(j + 1)` with `j = N/2`.
    pub fn casimir(&self) -> f64 {
        let j = self.n_qubits as f64 / 2.0;
        j * (j + 1.0)
    }
}

/// Single-qubit reduced density matrix of a symmetric state.
pub fn reduced_density_1(state: &DickeState) -> Matrix2<C64> {
    let n = state.n_qubits();
    let c = state.amplitudes();
    let nf = n as f64;
    let mut rho = Matrix2::<C64>::zeros();
    for j in 0..n {
        let g = c[j] * ((n - j) as f64 / nf).sqrt();
        let e = c[j + 1] * ((j + 1) as f64 / nf).sqrt();
        rho[(0, 0)] += g * g.conj();
        rho[(0, 1)] += g * e.conj();
        rho[(1, 0)] += e * g.conj();
        rho[(1, 1)] += e * e.conj();
    }
    rho
}

/// Two-qubit reduced density matrix of a symmetric state (N >= 2).
pub fn reduced_density_2(state: &DickeState) -> Result<Matrix4<C64>> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::InvalidDimension(
            "two-qubit reduced state needs N >= 2".into(),
        ));
    }
    let c = state.amplitudes();
    let pairs = (n * (n - 1)) as f64;
    let mut rho = Matrix4::<C64>::zeros();
    for j in 0..=n - 2 {
        let gg = c[j] * (((n - j) * (n - j - 1)) as f64 / pairs).sqrt();
        let mixed = c[j + 1] * (((j + 1) * (n - j - 1)) as f64 / pairs).sqrt();
        let ee = c[j + 2] * (((j + 2) * (j + 1)) as f64 / pairs).sqrt();
        let v = [gg, mixed, mixed, ee];
        for r in 0..4 {
            for s in 0..4 {
                rho[(r, s)] += v[r] * v[s].conj();
            }
        }
    }
    Ok(rho)
}

/// Columns are the `+1` and `-1` eigenvectors of `axis . sigma`.
fn axis_eigenbasis(axis: &Vec3) -> Matrix2<C64> {
    let (nx, ny, nz) = (axis.x, axis.y, axis.z);
    let first = [C64::new(nx, ny), C64::from(1.0 + nz)];
    let second = [C64::from(1.0 - nz), C64::new(nx, -ny)];
    let norm_sq = |v: &[C64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
    let v = if norm_sq(&first) >= norm_sq(&second) {
        first
    } else {
        second
    };
    let norm = norm_sq(&v).sqrt();
    let up = [v[0] / norm, v[1] / norm];
    let down = [-up[1].conj(), up[0].conj()];
    Matrix2::new(up[0], down[0], up[1], down[1])
}

/// A reduced density matrix of one or two qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LocalDensity {
    One(Matrix2<C64>),
    Two(Matrix4<C64>),
}

/// Multiplies every coherence between distinct `axis . sigma` eigenvalues by
/// `d(t)`, independently on each qubit.
pub fn apply_local_dephasing(
    rdm: &LocalDensity,
    model: &DephasingModel,
    t: f64,
) -> Result<LocalDensity> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Validation(format!("exposure time must be >= 0, got {t}")));
    }
    model.validate()?;
    if model.is_trivial() {
        return Ok(*rdm);
    }
    let d = model.decay(t);
    let v = axis_eigenbasis(&model.axis);
    Ok(match rdm {
        LocalDensity::One(rho) => {
            let mut rot = v.adjoint() * rho * v;
            rot[(0, 1)] *= d;
            rot[(1, 0)] *= d;
            LocalDensity::One(v * rot * v.adjoint())
        }
        LocalDensity::Two(rho) => {
            let vv = v.kronecker(&v);
            let mut rot = vv.adjoint() * rho * vv;
            for r in 0..4 {
                for s in 0..4 {
                    let flips = ((r >> 1) != (s >> 1)) as i32 + ((r & 1) != (s & 1)) as i32;
                    rot[(r, s)] *= d.powi(flips);
                }
            }
            LocalDensity::Two(vv * rot * vv.adjoint())
        }
    })
}

fn cross_matrix(n: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -n.z, n.y, n.z, 0.0, -n.x, -n.y, n.x, 0.0)
}

/// Rotation by `angle` about `axis` acting on moment vectors. Conjugating by
/// `exp(-i angle n.J)` turns `<J>` into `R <J>`.
pub fn moment_rotation(axis: &Vec3, angle: f64) -> Matrix3<f64> {
    let k = cross_matrix(axis);
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// Moments of `exp(-i omega t J_n) E(psi) exp(i omega t J_n)`.
///
/// The dephasing axis must coincide with the sensing axis (unless the model
/// is `None`); misaligned dephasing is rejected.
pub fn collective_moments(
    state: &DickeState,
    model: &DephasingModel,
    sense_axis: &Vec3,
    omega: f64,
    t: f64,
) -> Result<CollectiveMoments> {
    check_unit_axis(sense_axis, "sensing axis")?;
    model.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Validation(format!("exposure time must be >= 0, got {t}")));
    }
    if !omega.is_finite() {
        return Err(Error::Validation("field must be finite".into()));
    }
    if model.kind != NoiseKind::None && (model.axis - sense_axis).norm() > 1e-12 {
        return Err(Error::Unsupported(
            "dephasing axis must equal the sensing axis".into(),
        ));
    }

    let n = state.n_qubits();
    let nf = n as f64;
    let rho1 = match apply_local_dephasing(&LocalDensity::One(reduced_density_1(state)), model, t)? {
        LocalDensity::One(m) => m,
        LocalDensity::Two(_) => unreachable!(),
    };
    let mut first = Vec3::zeros();
    for a in 0..3 {
        first[a] = 0.5 * nf * (pauli(a) * rho1).trace().re;
    }
    let mut second = Matrix3::identity() * (nf / 4.0);
    if n >= 2 {
        let rho2 = match apply_local_dephasing(
            &LocalDensity::Two(reduced_density_2(state)?),
            model,
            t,
        )? {
            LocalDensity::Two(m) => m,
            LocalDensity::One(_) => unreachable!(),
        };
        let pair_weight = nf * (nf - 1.0) / 4.0;
        for a in 0..3 {
            for b in a..3 {
                let ab = (pauli(a).kronecker(&pauli(b)) * rho2).trace().re;
                let ba = (pauli(b).kronecker(&pauli(a)) * rho2).trace().re;
                let v = pair_weight * 0.5 * (ab + ba);
                second[(a, b)] += v;
                if a != b {
                    second[(b, a)] += v;
                }
            }
        }
    }

    let rot = moment_rotation(sense_axis, omega * t);
    let k = cross_matrix(sense_axis);
    let first = rot * first;
    let second = rot * second * rot.transpose();
    let dfirst_domega = k * first * t;
    let dsecond_domega = (k * second - second * k) * t;
    Ok(CollectiveMoments {
        n_qubits: n,
        first,
        second,
        dfirst_domega,
        dsecond_domega,
    })
}

fn single_qubit_bracket(
    x: C64,
    y: C64,
    w: C64,
    v: C64,
    d: f64,
    omega: f64,
    t: f64,
) -> (C64, C64) {
    let norm = ((1.0 + x.norm_sqr()) * (1.0 + y.norm_sqr()) * (1.0 + w.norm_sqr())
        * (1.0 + v.norm_sqr()))
    .sqrt();
    let phase = C64::from_polar(1.0, omega * t);
    let up = d * phase * w.conj() * v;
    let down = d * phase.conj() * y * x.conj();
    let value = (C64::from(1.0) + up + down + y * w.conj() * x.conj() * v) / norm;
    let derivative = C64::new(0.0, t) * (up - down) / norm;
    (value, derivative)
}

fn check_label(z: C64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation("coherent label must be finite".into()))
    }
}

/// `<x,N| U E(|y,N><w,N|) U^dag |v,N>` with `U = exp(-i omega t J_z)`, and
/// its derivative with respect to `omega`.
///
/// Exact for every N: the bracket factorizes into the N-th power of a
/// single-qubit expression.
pub fn coherent_sandwich_with_derivative(
    labels: [C64; 4],
    n: usize,
    model: &DephasingModel,
    omega: f64,
    t: f64,
) -> Result<(C64, C64)> {
    labels.iter().try_for_each(|z| check_label(*z))?;
    model.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Validation(format!("exposure time must be >= 0, got {t}")));
    }
    if model.kind != NoiseKind::None && (model.axis - Vec3::z()).norm() > 1e-12 {
        return Err(Error::Unsupported(
            "coherent sandwiches are defined for dephasing along z".into(),
        ));
    }
    let [x, y, w, v] = labels;
    let (b, db) = single_qubit_bracket(x, y, w, v, model.decay(t), omega, t);
    if b.norm() == 0.0 {
        return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    }
    let nf = n as f64;
    let value = C64::from_polar((nf * b.norm().ln()).exp(), nf * b.arg());
    // d(b^N) = N b^(N-1) db
    let derivative = value * nf * db / b;
    Ok((value, derivative))
}

pub fn coherent_sandwich(
    labels: [C64; 4],
    n: usize,
    model: &DephasingModel,
    omega: f64,
    t: f64,
) -> Result<C64> {
    coherent_sandwich_with_derivative(labels, n, model, omega, t).map(|(v, _)| v)
}
