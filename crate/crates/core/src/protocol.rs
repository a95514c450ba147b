//! Control qubit coupled to the memory ensemble through `g1 sz J_z`:
//! cat preparation with selective pulses and the phase readout.
//!
//! Joint amplitudes are stored control-major: index `c * (N + 1) + k` with
//! `c = 0` for `|g>` and `c = 1` for `|e>`.
//!
//! Time-domain pulses run in the frame rotating at the control frequency
//! `w_c - g1 N` and the memory frequency `w_m - g1`. There the bare levels
//! sit at `E(g, k) = 0` and `E(e, k) = 2 g1 k` (up to a common offset) and
//! every rectangular pulse is a time-independent Hamiltonian.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dephasing::{DephasingModel, NoiseKind};
use crate::dicke::{
    build_collective_ops, check_qubits, rotation_unitary, unitary_exp, CMatrix, DickeState, Vec3,
    C64,
};
use crate::error::{Error, Result};
use crate::states::{ln_binomials, spin_cat};

/// Largest ensemble for which the dephased readout is evaluated exactly.
pub const DEPHASED_READOUT_MAX_QUBITS: usize = 24;

const STEP1_PHASE: f64 = -FRAC_PI_2;
const STEP3_PHASE: f64 = FRAC_PI_2;
const READOUT_PHASE: f64 = -FRAC_PI_2;

#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl JointState {
    pub fn new(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if amps.len() != 2 * (n_qubits + 1) {
            return Err(Error::InvalidDimension(format!(
                "joint state of {n_qubits} memory qubits needs {} amplitudes, got {}",
                2 * (n_qubits + 1),
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!("joint state norm {norm} is not 1")));
        }
        Ok(Self { n_qubits, amps })
    }

    /// `|g>_c |0,N>_m`
    pub fn ground(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut amps = vec![C64::new(0.0, 0.0); 2 * (n_qubits + 1)];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// `|c>_c (x) memory`
    pub fn product(control_excited: bool, memory: &DickeState) -> Self {
        let n = memory.n_qubits();
        let mut amps = vec![C64::new(0.0, 0.0); 2 * (n + 1)];
        let offset = if control_excited { n + 1 } else { 0 };
        amps[offset..offset + n + 1].copy_from_slice(memory.amplitudes());
        Self { n_qubits: n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Unnormalized memory amplitudes of the `|g>` (false) or `|e>` (true)
    /// control branch.
    pub fn branch(&self, excited: bool) -> &[C64] {
        let d = self.n_qubits + 1;
        if excited {
            &self.amps[d..]
        } else {
            &self.amps[..d]
        }
    }

    fn branch_mut(&mut self, excited: bool) -> &mut [C64] {
        let d = self.n_qubits + 1;
        if excited {
            &mut self.amps[d..]
        } else {
            &mut self.amps[..d]
        }
    }

    pub fn overlap(&self, other: &JointState) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &JointState) -> Result<f64> {
        self.overlap(other).map(|c| c.norm_sqr())
    }

    fn apply_dense(&self, u: &CMatrix) -> JointState {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        JointState {
            n_qubits: self.n_qubits,
            amps: (u * v).iter().copied().collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseTarget {
    Control,
    Memory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseMode {
    IdealGate,
    TimeDomain,
}

/// A rectangular microwave pulse.
///
/// `frequency` is the detuning from the bare transition in units of `g1`:
/// a control pulse at `-N + 2k` addresses memory level `k`; a memory pulse
/// at `-1` (`+1`) addresses the control in `|g>` (`|e>`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub target: PulseTarget,
    pub frequency: f64,
    pub angle: f64,
    pub phase: f64,
    pub mode: PulseMode,
    /// Rabi frequency in units of `g1`; ignored for ideal gates.
    pub rabi: f64,
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.angle > 0.0 && self.angle <= 2.0 * PI) {
            return Err(Error::Validation(format!(
                "pulse angle must lie in (0, 2pi], got {}",
                self.angle
            )));
        }
        if !(self.frequency.is_finite() && self.phase.is_finite()) {
            return Err(Error::Validation("pulse frequency and phase must be finite".into()));
        }
        if self.mode == PulseMode::TimeDomain && !(self.rabi.is_finite() && self.rabi > 0.0) {
            return Err(Error::Validation("time-domain pulses need a Rabi frequency > 0".into()));
        }
        Ok(())
    }

    pub fn is_selective(&self) -> bool {
        self.mode == PulseMode::IdealGate || self.rabi < 1.0
    }
}

fn near_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < 1e-9).then_some(r as i64)
}

/// Single-qubit pulse `exp(-i angle/2 (cos phi sx + sin phi sy))` in
/// `(g, e)` order.
fn qubit_pulse(angle: f64, phase: f64) -> [[C64; 2]; 2] {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    // cos phi sx + sin phi sy = [[0, e^{i phi}], [e^{-i phi}, 0]]
    let up = C64::from_polar(1.0, phase);
    let minus_i = C64::new(0.0, -1.0);
    [
        [C64::from(c), minus_i * s * up],
        [minus_i * s * up.conj(), C64::from(c)],
    ]
}

fn memory_axis(phase: f64) -> Vec3 {
    Vec3::new(phase.cos(), phase.sin(), 0.0)
}

/// Exact conditional gate.
fn apply_ideal(state: &JointState, pulse: &PulseSpec) -> Result<JointState> {
    let n = state.n_qubits;
    let mut out = state.clone();
    match pulse.target {
        PulseTarget::Control => {
            let shift = near_integer(pulse.frequency + n as f64)
                .filter(|s| s % 2 == 0 && *s >= 0 && (*s as usize) / 2 <= n)
                .ok_or_else(|| {
                    Error::Validation(format!(
                        "control pulse at {} g1 addresses no memory level",
                        pulse.frequency
                    ))
                })?;
            let k = (shift / 2) as usize;
            let u = qubit_pulse(pulse.angle, pulse.phase);
            let (g, e) = (state.amps[k], state.amps[n + 1 + k]);
            out.amps[k] = u[0][0] * g + u[0][1] * e;
            out.amps[n + 1 + k] = u[1][0] * g + u[1][1] * e;
        }
        PulseTarget::Memory => {
            let excited = match near_integer(pulse.frequency) {
                Some(-1) => false,
                Some(1) => true,
                _ => {
                    return Err(Error::Validation(format!(
                        "memory pulse at {} g1 addresses no control state",
                        pulse.frequency
                    )))
                }
            };
            let u = rotation_unitary(n, &memory_axis(pulse.phase), pulse.angle)?;
            let branch = nalgebra::DVector::from_column_slice(state.branch(excited));
            let turned = u * branch;
            out.branch_mut(excited).copy_from_slice(turned.as_slice());
        }
    }
    Ok(out)
}

/// Rotating-frame Hamiltonian (units of `g1`) while `pulse` is on.
fn pulse_hamiltonian(n: usize, pulse: &PulseSpec) -> Result<CMatrix> {
    let d = n + 1;
    let mut h = CMatrix::zeros(2 * d, 2 * d);
    for k in 0..d {
        h[(d + k, d + k)] = C64::from(2.0 * k as f64);
    }
    match pulse.target {
        PulseTarget::Control => {
            if near_integer(pulse.frequency + n as f64) != Some(0) {
                return Err(Error::Unsupported(
                    "time-domain control pulses run at the k = 0 resonance only".into(),
                ));
            }
            let coupling = C64::from_polar(pulse.rabi / 2.0, -pulse.phase);
            for k in 0..d {
                // (rabi/2)(cos phi sx + sin phi sy): <e|H|g> = (rabi/2) e^{-i phi}
                h[(d + k, k)] += coupling;
                h[(k, d + k)] += coupling.conj();
            }
        }
        PulseTarget::Memory => {
            if near_integer(pulse.frequency) != Some(-1) {
                return Err(Error::Unsupported(
                    "time-domain memory pulses run at the control-g resonance only".into(),
                ));
            }
            let ops = build_collective_ops(n)?;
            let drive = ops.along(&memory_axis(pulse.phase)) * C64::from(pulse.rabi);
            for c in 0..2 {
                let mut block = h.view_mut((c * d, c * d), (d, d));
                block += &drive;
            }
        }
    }
    Ok(h)
}

/// Free rotating-frame Hamiltonian (units of `g1`).
pub fn free_hamiltonian(n: usize) -> Result<CMatrix> {
    check_qubits(n)?;
    let d = n + 1;
    Ok(CMatrix::from_diagonal(&nalgebra::DVector::from_fn(2 * d, |i, _| {
        if i < d {
            C64::from(0.0)
        } else {
            C64::from(2.0 * (i - d) as f64)
        }
    })))
}

/// Evolves for `duration` (units of `1/g1`) under the free Hamiltonian.
pub fn free_evolution(state: &JointState, duration: f64) -> Result<JointState> {
    let h = free_hamiltonian(state.n_qubits)?;
    let u = unitary_exp(&(h * C64::new(0.0, -duration)))?;
    Ok(state.apply_dense(&u))
}

fn apply_time_domain(state: &JointState, pulse: &PulseSpec) -> Result<JointState> {
    let h = pulse_hamiltonian(state.n_qubits, pulse)?;
    let duration = pulse.angle / pulse.rabi;
    let u = unitary_exp(&(h * C64::new(0.0, -duration)))?;
    Ok(state.apply_dense(&u))
}

pub fn apply_pulse(state: &JointState, pulse: &PulseSpec) -> Result<JointState> {
    pulse.validate()?;
    match pulse.mode {
        PulseMode::IdealGate => apply_ideal(state, pulse),
        PulseMode::TimeDomain => apply_time_domain(state, pulse),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PrepMode {
    Ideal,
    /// Rabi frequency of every pulse as a fraction of `g1`.
    TimeDomain { rabi_ratio: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preparation {
    pub state: JointState,
    pub warning: Option<String>,
}

/// Memory rotation taking `|0,N>` to `|z,N>`.
pub fn memory_rotation_for(z: C64) -> (f64, f64) {
    (2.0 * z.norm().atan(), -z.arg() - FRAC_PI_2)
}

fn pulse_mode(mode: PrepMode) -> (PulseMode, f64) {
    match mode {
        PrepMode::Ideal => (PulseMode::IdealGate, 0.0),
        PrepMode::TimeDomain { rabi_ratio } => (PulseMode::TimeDomain, rabi_ratio),
    }
}

fn sequence(n: usize, z: C64, mode: PrepMode, first: f64, last: f64) -> Vec<PulseSpec> {
    let (pulse_mode, rabi) = pulse_mode(mode);
    let control = |angle, phase| PulseSpec {
        target: PulseTarget::Control,
        frequency: -(n as f64),
        angle,
        phase,
        mode: pulse_mode,
        rabi,
    };
    let (theta, phi) = memory_rotation_for(z);
    vec![
        control(first, STEP1_PHASE),
        PulseSpec {
            target: PulseTarget::Memory,
            frequency: -1.0,
            angle: theta,
            phase: phi,
            mode: pulse_mode,
            rabi,
        },
        control(last, STEP3_PHASE),
    ]
}

/// `<0,N|z,N> = (1 + |z|^2)^(-N/2)`
fn branch_overlap(z: C64, n: usize) -> f64 {
    (-(n as f64) / 2.0 * z.norm_sqr().ln_1p()).exp()
}

/// The textbook sequence: pi/2, conditional memory rotation, pi. Its
/// output misses the cat by `3 c0^2 / 4` in fidelity, `c0 = <0,N|z,N>`.
pub fn nominal_preparation_pulses(n: usize, z: C64, mode: PrepMode) -> Vec<PulseSpec> {
    sequence(n, z, mode, FRAC_PI_2, PI)
}

/// The three pulses of the cat preparation, with the control angles
/// corrected for the branch overlap `c0` so that the output is exactly
/// `|g> (|0,N> + |z,N>)/norm`:
/// `cos^2(a1/2) = 1/(2(1 + c0))` and `tan(a3/2) = b/(a c0)` with `a, b`
/// the amplitudes left by the first pulse. Both reduce to pi/2 and pi as
/// `c0 -> 0`.
pub fn preparation_pulses(n: usize, z: C64, mode: PrepMode) -> Vec<PulseSpec> {
    let c0 = branch_overlap(z, n);
    let a = (1.0 / (2.0 * (1.0 + c0))).sqrt();
    let b = ((1.0 + 2.0 * c0) / (2.0 * (1.0 + c0))).sqrt();
    let first = 2.0 * b.atan2(a);
    let last = 2.0 * b.atan2(a * c0);
    sequence(n, z, mode, first, last)
}

/// Applies `pulses` in order starting from `|g>|0,N>`.
pub fn run_pulses(n: usize, pulses: &[PulseSpec]) -> Result<JointState> {
    let mut state = JointState::ground(n)?;
    for p in pulses {
        state = apply_pulse(&state, p)?;
    }
    Ok(state)
}

/// Runs the preparation from `|g>|0,N>`.
pub fn prepare_cat(n: usize, z: C64, mode: PrepMode) -> Result<Preparation> {
    if z.norm() == 0.0 {
        return Err(Error::DegenerateCat);
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Validation("z must be finite".into()));
    }
    let pulses = preparation_pulses(n, z, mode);
    let warning = pulses.iter().find(|p| !p.is_selective()).map(|p| {
        format!(
            "Rabi frequency {} g1 is not selective; conditional pulses will leak",
            p.rabi
        )
    });
    let state = run_pulses(n, &pulses)?;
    Ok(Preparation { state, warning })
}

/// `|<target|prepared>|^2` with `target = |g> (|0,N> + |z,N>)/norm`.
pub fn cat_fidelity(prepared: &JointState, z: C64) -> Result<f64> {
    let target = JointState::product(false, &spin_cat(z, prepared.n_qubits)?);
    target.fidelity(prepared)
}

type Op2 = [[C64; 2]; 2];

fn op_mul(a: &Op2, b: &Op2) -> Op2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn op_adjoint(a: &Op2) -> Op2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// `<D_l| B^(x)N |D_k>` for all `l, k`.
fn symmetric_power(b: &Op2, n: usize) -> CMatrix {
    let lnc = ln_binomials(n);
    let mut pascal = vec![vec![1.0f64; 1]; n + 1];
    for m in 1..=n {
        let mut row = vec![1.0; m + 1];
        for j in 1..m {
            row[j] = pascal[m - 1][j - 1] + pascal[m - 1][j];
        }
        pascal[m] = row;
    }
    let binom = |m: usize, j: usize| -> f64 { pascal[m].get(j).copied().unwrap_or(0.0) };
    let (bgg, bge, beg, bee) = (b[0][0], b[0][1], b[1][0], b[1][1]);
    CMatrix::from_fn(n + 1, n + 1, |l, k| {
        let lo = l.saturating_sub(n - k);
        let hi = k.min(l);
        let mut acc = C64::new(0.0, 0.0);
        for q in lo..=hi {
            let w = binom(k, q) * binom(n - k, l - q);
            acc += bee.powi(q as i32)
                * bge.powi((k - q) as i32)
                * beg.powi((l - q) as i32)
                * bgg.powi(((n - k) - (l - q)) as i32)
                * w;
        }
        acc * ((lnc[k] - lnc[l]) / 2.0).exp()
    })
}

/// A memory operator written as a sum of tensor powers `c B^(x)N`.
type PowerSum = Vec<(C64, Op2)>;

/// Readout operators `K_c = <y+| W |c>` on the memory, for `c = g, e`.
fn readout_operators(z: C64) -> [PowerSum; 2] {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    let id: Op2 = [[one, zero], [zero, one]];
    let p0: Op2 = [[one, zero], [zero, zero]];
    let (theta, phi) = memory_rotation_for(z);
    let r = qubit_pulse(theta, phi);
    let rp0 = op_mul(&r, &p0);
    let x = qubit_pulse(PI, READOUT_PHASE);
    // <y+| with |y+> = (|g> - i|e>)/sqrt2
    let y_g = s;
    let y_e = i * s;
    // |g> psi -> |g>((I-P0) psi + x_gg P0 psi) + |e> R x_eg P0 psi
    let k_g = vec![
        (y_g, id),
        (-y_g + y_g * x[0][0], p0),
        (y_e * x[1][0], rp0),
    ];
    // |e> psi -> |g> x_ge P0 psi + |e> R ((I-P0) psi + x_ee P0 psi)
    let k_e = vec![
        (y_g * x[0][1], p0),
        (y_e, r),
        (y_e * (x[1][1] - one), rp0),
    ];
    [k_g, k_e]
}

/// Heisenberg-picture exposure `E(u^dag A u)` on one qubit, with
/// `u = exp(-i omega t sz/2)` and dephasing along z.
fn expose_dual(a: &Op2, d: f64, omega_t: f64) -> Op2 {
    let phase = C64::from_polar(1.0, omega_t);
    // (u^dag A u)_{ge} = A_ge e^{-i wt}, (u^dag A u)_{eg} = A_eg e^{+i wt}
    [
        [a[0][0], a[0][1] * phase.conj() * d],
        [a[1][0] * phase * d, a[1][1]],
    ]
}

/// Probability of `sigma_y = +1` on the control after exposure of the
/// memory (field along z, dephasing along z), the selective control pi
/// pulse and the memory rotation conditioned on the excited control.
pub fn readout_phase(
    joint: &JointState,
    omega: f64,
    t: f64,
    model: &DephasingModel,
    z: C64,
) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0 && omega.is_finite()) {
        return Err(Error::Validation("exposure needs finite omega and t >= 0".into()));
    }
    if z.norm() == 0.0 {
        return Err(Error::DegenerateCat);
    }
    model.validate()?;
    let n = joint.n_qubits;
    let d = if model.kind == NoiseKind::None {
        1.0
    } else {
        model.decay(t)
    };
    if d == 1.0 {
        return readout_pure(joint, omega * t, z);
    }
    if n > DEPHASED_READOUT_MAX_QUBITS {
        return Err(Error::Unsupported(format!(
            "dephased joint readout limited to N <= {DEPHASED_READOUT_MAX_QUBITS}"
        )));
    }
    let ks = readout_operators(z);
    let branches = [
        nalgebra::DVector::from_column_slice(joint.branch(false)),
        nalgebra::DVector::from_column_slice(joint.branch(true)),
    ];
    let mut p = C64::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            if branches[a].norm() == 0.0 || branches[b].norm() == 0.0 {
                continue;
            }
            for (ca, oa) in &ks[a] {
                for (cb, ob) in &ks[b] {
                    let m = op_mul(&op_adjoint(ob), oa);
                    let sym = symmetric_power(&expose_dual(&m, d, omega * t), n);
                    let val = (branches[b].adjoint() * &sym * &branches[a])[(0, 0)];
                    p += cb.conj() * ca * val;
                }
            }
        }
    }
    Ok(p.re)
}

/// Noiseless readout on the state vector.
fn readout_pure(joint: &JointState, omega_t: f64, z: C64) -> Result<f64> {
    let n = joint.n_qubits;
    let half = n as f64 / 2.0;
    let mut state = joint.clone();
    for c in [false, true] {
        for (k, a) in state.branch_mut(c).iter_mut().enumerate() {
            *a *= C64::from_polar(1.0, -omega_t * (k as f64 - half));
        }
    }
    let state = apply_ideal(
        &state,
        &PulseSpec {
            target: PulseTarget::Control,
            frequency: -(n as f64),
            angle: PI,
            phase: READOUT_PHASE,
            mode: PulseMode::IdealGate,
            rabi: 0.0,
        },
    )?;
    let (theta, phi) = memory_rotation_for(z);
    let state = apply_ideal(
        &state,
        &PulseSpec {
            target: PulseTarget::Memory,
            frequency: 1.0,
            angle: theta,
            phase: phi,
            mode: PulseMode::IdealGate,
            rabi: 0.0,
        },
    )?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let y_g = C64::from(s);
    let y_e = C64::new(0.0, s);
    let p = state
        .branch(false)
        .iter()
        .zip(state.branch(true))
        .map(|(g, e)| (y_g * g + y_e * e).norm_sqr())
        .sum();
    Ok(p)
}

/// Seeded Bernoulli sampling of the readout: number of `+1` outcomes in
/// `shots` repetitions.
pub fn sample_readout(p_plus: f64, shots: u64, seed: u64) -> Result<u64> {
    if !(0.0..=1.0).contains(&p_plus) {
        return Err(Error::Validation(format!("probability {p_plus} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..shots).filter(|_| rng.random_bool(p_plus)).count() as u64)
}

/// Flip-flop coupling `g2 (s+ J- + s- J+)` on the joint space.
pub fn flip_flop_generator(n: usize, g2: f64) -> Result<CMatrix> {
    let ops = build_collective_ops(n)?;
    let d = n + 1;
    let mut h = CMatrix::zeros(2 * d, 2 * d);
    // s+ = |e><g| : block (e, g) carries J-
    h.view_mut((d, 0), (d, d)).copy_from(&ops.jm.matrix);
    h.view_mut((0, d), (d, d)).copy_from(&ops.jp.matrix);
    Ok(h * C64::from(g2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::max_abs_diff;
    use crate::metrology::cat_readout_probability;
    use crate::states::spin_coherent;

    #[test]
    fn step_one_makes_equal_superposition() {
        let n = 5;
        let pulses = nominal_preparation_pulses(n, C64::new(1.0, 0.0), PrepMode::Ideal);
        let s = apply_pulse(&JointState::ground(n).unwrap(), &pulses[0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - C64::from(h)).norm() < 1e-15);
        assert!((s.amplitudes()[n + 1] - C64::from(h)).norm() < 1e-15);
    }

    #[test]
    fn step_two_rotates_ground_branch() {
        let n = 6;
        let z = C64::new(-0.4, 1.3);
        let pulses = nominal_preparation_pulses(n, z, PrepMode::Ideal);
        let mut s = JointState::ground(n).unwrap();
        for p in &pulses[..2] {
            s = apply_pulse(&s, p).unwrap();
        }
        let coh = spin_coherent(z, n).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (a, b) in s.branch(false).iter().zip(coh.amplitudes()) {
            assert!((a - b * h).norm() < 1e-12);
        }
        assert!((s.branch(true)[0] - C64::from(h)).norm() < 1e-15);
    }

    #[test]
    fn nominal_fidelity_follows_overlap_formula() {
        for n in [1usize, 4, 16, 40, 64] {
            let z = C64::new(1.0, 0.0);
            let pulses = nominal_preparation_pulses(n, z, PrepMode::Ideal);
            let f = cat_fidelity(&run_pulses(n, &pulses).unwrap(), z).unwrap();
            let c0 = 2f64.powf(-(n as f64) / 2.0);
            let want = (1.0 + c0) * (2.0 - c0).powi(2) / 4.0;
            assert!((f - want).abs() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn corrected_preparation_is_exact() {
        for n in [1usize, 2, 3, 4, 9, 16, 33, 64] {
            for z in [C64::new(1.0, 0.0), C64::new(0.2, -0.3), C64::new(-2.0, 1.5)] {
                let prep = prepare_cat(n, z, PrepMode::Ideal).unwrap();
                let f = cat_fidelity(&prep.state, z).unwrap();
                assert!((1.0 - f).abs() < 1e-13, "N={n} z={z} f={f}");
                assert!(prep.warning.is_none());
            }
        }
        let p = preparation_pulses(200, C64::new(1.0, 0.0), PrepMode::Ideal);
        assert!((p[0].angle - FRAC_PI_2).abs() < 1e-15);
        assert!((p[2].angle - PI).abs() < 1e-15);
    }

    #[test]
    fn prepare_then_read_is_half() {
        for n in [1usize, 2, 7, 30, 64] {
            let z = C64::new(0.7, -0.2);
            let prep = prepare_cat(n, z, PrepMode::Ideal).unwrap();
            let p = readout_phase(&prep.state, 0.0, 1.0, &DephasingModel::none(), z).unwrap();
            assert!((p - 0.5).abs() < 1e-12, "N={n} p={p}");
        }
    }

    #[test]
    fn readout_on_cat_matches_metrology() {
        for (n, gamma, omega) in [(4usize, 0.2, 0.05), (6, 0.0, 0.3), (8, 0.9, 0.7), (3, 0.4, -0.2)] {
            let z = C64::new(0.8, 0.5);
            let joint = JointState::product(false, &spin_cat(z, n).unwrap());
            let model = DephasingModel::gaussian(gamma, Vec3::z());
            let p = readout_phase(&joint, omega, 1.0, &model, z).unwrap();
            let q = cat_readout_probability(z, n, omega, 1.0, &model).unwrap();
            assert!((p - q).abs() < 1e-12, "N={n} {p} {q}");
        }
    }

    #[test]
    fn dephased_algebra_agrees_with_pure_path() {
        let n = 7;
        let z = C64::new(1.1, -0.3);
        let prep = prepare_cat(n, z, PrepMode::Ideal).unwrap();
        let tiny = DephasingModel::gaussian(1e-12, Vec3::z());
        let a = readout_phase(&prep.state, 0.4, 1.0, &tiny, z).unwrap();
        let b = readout_phase(&prep.state, 0.4, 1.0, &DephasingModel::none(), z).unwrap();
        assert!((a - b).abs() < 1e-11);
    }

    #[test]
    fn symmetric_power_of_rotation_matches_dense() {
        let n = 9;
        let axis = Vec3::new(0.6, 0.8, 0.0);
        let b = qubit_pulse(1.1, 0.8_f64.atan2(0.6));
        let dense = rotation_unitary(n, &axis, 1.1).unwrap();
        assert!(max_abs_diff(&symmetric_power(&b, n), &dense) < 1e-12);
    }

    #[test]
    fn time_domain_converges() {
        let n = 4;
        let z = C64::new(1.0, 0.0);
        let ideal = prepare_cat(n, z, PrepMode::Ideal).unwrap().state;
        let mut last = f64::INFINITY;
        for ratio in [1.0 / 5.0, 1.0 / 10.0, 1.0 / 20.0, 1.0 / 40.0] {
            let td = prepare_cat(n, z, PrepMode::TimeDomain { rabi_ratio: ratio }).unwrap();
            let defect = 1.0 - td.state.fidelity(&ideal).unwrap();
            assert!(defect < last, "ratio {ratio}: {defect} !< {last}");
            last = defect;
        }
        let warned = prepare_cat(n, z, PrepMode::TimeDomain { rabi_ratio: 2.0 }).unwrap();
        assert!(warned.warning.is_some());
    }

    #[test]
    fn free_evolution_keeps_populations() {
        let n = 5;
        let prep = prepare_cat(n, C64::new(0.9, 0.9), PrepMode::Ideal).unwrap().state;
        let later = free_evolution(&prep, 3.7).unwrap();
        for (a, b) in prep.amplitudes().iter().zip(later.amplitudes()) {
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-10);
        }
    }

    #[test]
    fn flip_flop_is_hermitian_and_conserves_excitations() {
        let n = 4;
        let h = flip_flop_generator(n, 0.3).unwrap();
        assert!(max_abs_diff(&h, &h.adjoint()) < 1e-15);
        let d = n + 1;
        // excitation number: c + k
        for r in 0..2 * d {
            for c in 0..2 * d {
                if h[(r, c)].norm() > 0.0 {
                    let ex = |i: usize| i / d + i % d;
                    assert_eq!(ex(r), ex(c));
                }
            }
        }
    }

    #[test]
    fn pulse_validation() {
        let mut p = nominal_preparation_pulses(3, C64::new(1.0, 0.0), PrepMode::Ideal)[0];
        p.angle = 0.0;
        assert!(p.validate().is_err());
        p.angle = PI;
        p.frequency = -2.5;
        assert!(apply_pulse(&JointState::ground(3).unwrap(), &p).is_err());
        assert!(JointState::new(2, vec![C64::new(1.0, 0.0); 6]).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let a = sample_readout(0.3, 1000, 9).unwrap();
        assert_eq!(a, sample_readout(0.3, 1000, 9).unwrap());
        assert!((200..400).contains(&a));
        assert_eq!(sample_readout(1.0, 50, 1).unwrap(), 50);
    }
}
