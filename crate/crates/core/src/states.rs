//! Probe states: spin coherent, one- and two-axis twisted, spin cat and GHZ.

use serde::{Deserialize, Serialize};

use crate::dicke::{check_qubits, DickeState, C64};
use crate::error::{Error, Result};

/// Largest ensemble for which two-axis twisted states are built.
pub const TAT_MAX_QUBITS: usize = 4000;

const OAT_UNIT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Coherent,
    Oat,
    Tat,
    Cat,
    Ghz,
}

impl StateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateKind::Coherent => "coherent",
            StateKind::Oat => "oat",
            StateKind::Tat => "tat",
            StateKind::Cat => "cat",
            StateKind::Ghz => "ghz",
        }
    }

    pub fn uses_z(&self) -> bool {
        matches!(self, StateKind::Coherent | StateKind::Oat | StateKind::Cat)
    }

    pub fn uses_chi(&self) -> bool {
        matches!(self, StateKind::Oat | StateKind::Tat)
    }
}

impl std::str::FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent" => Ok(StateKind::Coherent),
            "oat" => Ok(StateKind::Oat),
            "tat" => Ok(StateKind::Tat),
            "cat" => Ok(StateKind::Cat),
            "ghz" => Ok(StateKind::Ghz),
            other => Err(Error::Config(format!("unknown state kind '{other}'"))),
        }
    }
}

/// A fully specified probe state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateSpec {
    pub kind: StateKind,
    pub z: C64,
    pub chi: f64,
    pub n_qubits: usize,
}

impl StateSpec {
    pub fn validate(&self) -> Result<()> {
        check_qubits(self.n_qubits)?;
        if self.kind.uses_z() && !(self.z.re.is_finite() && self.z.im.is_finite()) {
            return Err(Error::Validation("z must be finite".into()));
        }
        if self.kind.uses_chi() && !self.chi.is_finite() {
            return Err(Error::Validation("chi must be finite".into()));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<DickeState> {
        self.validate()?;
        match self.kind {
            StateKind::Coherent => spin_coherent(self.z, self.n_qubits),
            StateKind::Oat => oat_state(self.z, self.chi, self.n_qubits),
            StateKind::Tat => tat_state(self.chi, self.n_qubits),
            StateKind::Cat => spin_cat(self.z, self.n_qubits),
            StateKind::Ghz => ghz_state(self.n_qubits),
        }
    }
}

/// `ln C(n, k)` for all `k`, by running sums of logarithms.
pub(crate) fn ln_binomials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += ((n - k + 1) as f64).ln() - (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `ln(1 + x^2)` without overflow for large `x`.
fn ln1p_sq(x: f64) -> f64 {
    if x > 1.0 {
        2.0 * x.ln() + (1.0 / (x * x)).ln_1p()
    } else {
        (x * x).ln_1p()
    }
}

/// `|z, N>`: every qubit in `(|g> + z|e>)/sqrt(1 + |z|^2)`.
pub fn spin_coherent(z: C64, n: usize) -> Result<DickeState> {
    check_qubits(n)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Validation("z must be finite".into()));
    }
    if z.norm() == 0.0 {
        return DickeState::basis(n, 0);
    }
    let r = z.norm();
    let arg = z.arg();
    let ln_r = r.ln();
    let ln_norm = 0.5 * n as f64 * ln1p_sq(r);
    let amps = ln_binomials(n)
        .into_iter()
        .enumerate()
        .map(|(k, lb)| {
            let ln_mag = 0.5 * lb + k as f64 * ln_r - ln_norm;
            C64::from_polar(ln_mag.exp(), k as f64 * arg)
        })
        .collect();
    DickeState::from_amplitudes(amps)
}

/// One-axis twisted state `exp(-i chi J_z^2)|z, N>` with `|z| = 1`.
pub fn oat_state(z: C64, chi: f64, n: usize) -> Result<DickeState> {
    if (z.norm() - 1.0).abs() > OAT_UNIT_TOL {
        return Err(Error::Validation(format!(
            "one-axis twisting needs |z| = 1, got |z| = {}",
            z.norm()
        )));
    }
    if !chi.is_finite() {
        return Err(Error::Validation("chi must be finite".into()));
    }
    let seed = spin_coherent(z, n)?;
    Ok(twist_one_axis(&seed, chi))
}

/// Applies `exp(-i chi J_z^2)`, which is diagonal in the Dicke basis.
pub fn twist_one_axis(state: &DickeState, chi: f64) -> DickeState {
    let half = state.n_qubits() as f64 / 2.0;
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let m = k as f64 - half;
            c * C64::from_polar(1.0, -chi * m * m)
        })
        .collect();
    DickeState::from_amplitudes(amps).expect("phase twist keeps a valid state")
}

/// Two-axis twisted state `exp(chi (J_+^2 - J_-^2))|0, N>`.
pub fn tat_state(chi: f64, n: usize) -> Result<DickeState> {
    let mut path = TwoAxisPath::new(n)?;
    path.advance_to(chi)?;
    path.state()
}

/// Propagates `exp(chi G)|0,N>` with `G = J_+^2 - J_-^2` forward in `chi`.
///
/// Starting from `|0,N>`, `G` only couples even excitation numbers and acts
/// there as a real antisymmetric tridiagonal matrix, so the amplitudes stay
/// real. The exponential is applied by Taylor series on sub-steps with
/// `|| h G ||_inf <= 1/2`.
#[derive(Clone, Debug)]
pub struct TwoAxisPath {
    n_qubits: usize,
    /// `<2j+2| J_+^2 |2j>`
    couplings: Vec<f64>,
    chi: f64,
    amps: Vec<f64>,
    op_norm: f64,
}

impl TwoAxisPath {
    pub fn new(n: usize) -> Result<Self> {
        check_qubits(n)?;
        if n > TAT_MAX_QUBITS {
            return Err(Error::Unsupported(format!(
                "two-axis twisting limited to N <= {TAT_MAX_QUBITS}, got {n}"
            )));
        }
        let dim = n / 2 + 1;
        let couplings: Vec<f64> = (0..dim - 1)
            .map(|j| {
                let k = 2 * j;
                let a1 = (((k + 1) * (n - k)) as f64).sqrt();
                let a2 = (((k + 2) * (n - k - 1)) as f64).sqrt();
                a1 * a2
            })
            .collect();
        let op_norm = (0..dim)
            .map(|i| {
                let left = if i > 0 { couplings[i - 1] } else { 0.0 };
                let right = couplings.get(i).copied().unwrap_or(0.0);
                left + right
            })
            .fold(0.0_f64, f64::max);
        let mut amps = vec![0.0; dim];
        amps[0] = 1.0;
        Ok(Self {
            n_qubits: n,
            couplings,
            chi: 0.0,
            amps,
            op_norm,
        })
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    fn apply_generator(&self, v: &[f64], out: &mut [f64]) {
        let a = &self.couplings;
        let dim = v.len();
        for i in 0..dim {
            let mut acc = 0.0;
            if i > 0 {
                acc += a[i - 1] * v[i - 1];
            }
            if i + 1 < dim {
                acc -= a[i] * v[i + 1];
            }
            out[i] = acc;
        }
    }

    fn step(&mut self, h: f64) {
        let dim = self.amps.len();
        let mut term = self.amps.clone();
        let mut next = vec![0.0; dim];
        let mut sum = self.amps.clone();
        for k in 1..80 {
            self.apply_generator(&term, &mut next);
            let scale = h / k as f64;
            let mut term_norm = 0.0_f64;
            for (t, nx) in term.iter_mut().zip(&next) {
                *t = nx * scale;
                term_norm = term_norm.max(t.abs());
            }
            for (s, t) in sum.iter_mut().zip(&term) {
                *s += t;
            }
            if term_norm < 1e-18 {
                break;
            }
        }
        let norm = sum.iter().map(|x| x * x).sum::<f64>().sqrt();
        for s in sum.iter_mut() {
            *s /= norm;
        }
        self.amps = sum;
    }

    /// Moves forward to `target`; going backwards is an error.
    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        if !target.is_finite() {
            return Err(Error::Validation("chi must be finite".into()));
        }
        if target < self.chi {
            return Err(Error::Validation(format!(
                "two-axis path only advances forward ({} -> {target})",
                self.chi
            )));
        }
        let span = target - self.chi;
        if span == 0.0 {
            return Ok(());
        }
        let steps = ((span * self.op_norm * 2.0).ceil() as usize).max(1);
        let h = span / steps as f64;
        for _ in 0..steps {
            self.step(h);
        }
        self.chi = target;
        Ok(())
    }

    pub fn state(&self) -> Result<DickeState> {
        let mut full = vec![C64::new(0.0, 0.0); self.n_qubits + 1];
        for (j, a) in self.amps.iter().enumerate() {
            full[2 * j] = C64::from(*a);
        }
        DickeState::from_amplitudes(full)
    }
}

/// `(|0,N> + |z,N>)` normalized with the exact overlap.
pub fn spin_cat(z: C64, n: usize) -> Result<DickeState> {
    check_qubits(n)?;
    if z.norm() == 0.0 {
        return Err(Error::DegenerateCat);
    }
    let coherent = spin_coherent(z, n)?;
    let mut amps = coherent.amplitudes().to_vec();
    amps[0] += C64::new(1.0, 0.0);
    DickeState::from_amplitudes(amps)
}

/// `(|0,N> + |N,N>)/sqrt(2)`.
pub fn ghz_state(n: usize) -> Result<DickeState> {
    check_qubits(n)?;
    let mut amps = vec![C64::new(0.0, 0.0); n + 1];
    amps[0] = C64::new(1.0, 0.0);
    amps[n] = C64::new(1.0, 0.0);
    DickeState::from_amplitudes(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::{build_collective_ops, unitary_exp};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn jz_mean(s: &DickeState) -> f64 {
        let half = s.n_qubits() as f64 / 2.0;
        s.amplitudes()
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm_sqr() * (k as f64 - half))
            .sum()
    }

    fn fidelity(a: &DickeState, b: &DickeState) -> f64 {
        a.inner(b).unwrap().norm_sqr()
    }

    #[test]
    fn coherent_at_origin_is_ground() {
        let s = spin_coherent(C64::new(0.0, 0.0), 5).unwrap();
        assert_eq!(s.amplitudes()[0], C64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn coherent_two_qubits() {
        let s = spin_coherent(C64::new(1.0, 0.0), 2).unwrap();
        let want = [0.5, FRAC_1_SQRT_2, 0.5];
        for (c, w) in s.amplitudes().iter().zip(want) {
            assert!(close(*c, C64::from(w), 1e-15));
        }
    }

    #[test]
    fn coherent_mean_jz() {
        for (z, n) in [
            (C64::new(1.0, 0.0), 9),
            (C64::new(0.3, -1.2), 17),
            (C64::new(2.5, 0.5), 40),
        ] {
            let s = spin_coherent(z, n).unwrap();
            let r2 = z.norm_sqr();
            let want = n as f64 / 2.0 * (r2 - 1.0) / (1.0 + r2);
            assert!((jz_mean(&s) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn coherent_overlaps() {
        let n = 2;
        let ground = DickeState::basis(n, 0).unwrap();
        let one = spin_coherent(C64::new(1.0, 0.0), n).unwrap();
        assert!(close(ground.inner(&one).unwrap(), C64::from(0.5), 1e-15));

        let (z, w) = (C64::new(0.4, 0.7), C64::new(-1.1, 0.2));
        let n = 11;
        let a = spin_coherent(z, n).unwrap();
        let b = spin_coherent(w, n).unwrap();
        let per_qubit = (C64::from(1.0) + z.conj() * w)
            / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt();
        assert!(close(a.inner(&b).unwrap(), per_qubit.powi(n as i32), 1e-12));
    }

    #[test]
    fn coherent_survives_large_n_and_z() {
        let s = spin_coherent(C64::new(1e3, 1e3), 100_000).unwrap();
        assert!(s.norm_defect() < 1e-6);
        let norm: f64 = s.amplitudes().iter().map(|c| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oat_reduces_to_seed() {
        let z = C64::from_polar(1.0, 0.3);
        let seed = spin_coherent(z, 8).unwrap();
        assert!((fidelity(&oat_state(z, 0.0, 8).unwrap(), &seed) - 1.0).abs() < 1e-15);
        let turned = oat_state(z, 2.0 * PI, 8).unwrap();
        assert!((fidelity(&turned, &seed) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oat_requires_unit_z() {
        assert!(matches!(
            oat_state(C64::new(1.1, 0.0), 0.1, 4),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn tat_zero_is_ground() {
        let s = tat_state(0.0, 6).unwrap();
        assert_eq!(s, DickeState::basis(6, 0).unwrap());
    }

    #[test]
    fn tat_has_even_parity() {
        for (chi, n) in [(0.05, 7), (0.3, 12), (1.7, 9)] {
            let s = tat_state(chi, n).unwrap();
            for (k, c) in s.amplitudes().iter().enumerate() {
                if k % 2 == 1 {
                    assert_eq!(c.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn tat_matches_dense_exponential() {
        for (chi, n) in [(0.05, 6), (0.4, 11), (0.02, 40)] {
            let ops = build_collective_ops(n).unwrap();
            let jp2 = &ops.jp.matrix * &ops.jp.matrix;
            let jm2 = &ops.jm.matrix * &ops.jm.matrix;
            let u = unitary_exp(&((jp2 - jm2) * C64::from(chi))).unwrap();
            let dense = DickeState::basis(n, 0).unwrap().evolve(&u).unwrap();
            let banded = tat_state(chi, n).unwrap();
            for (a, b) in dense.amplitudes().iter().zip(banded.amplitudes()) {
                assert!(close(*a, *b, 1e-10), "chi = {chi}, N = {n}");
            }
        }
    }

    #[test]
    fn tat_path_is_incremental() {
        let mut path = TwoAxisPath::new(30).unwrap();
        path.advance_to(0.01).unwrap();
        path.advance_to(0.03).unwrap();
        let direct = tat_state(0.03, 30).unwrap();
        assert!((fidelity(&path.state().unwrap(), &direct) - 1.0).abs() < 1e-12);
        assert!(path.advance_to(0.02).is_err());
    }

    #[test]
    fn tat_size_limit() {
        assert!(matches!(
            tat_state(0.001, TAT_MAX_QUBITS + 2),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn cat_two_qubits() {
        let s = spin_cat(C64::new(1.0, 0.0), 2).unwrap();
        let raw = [1.5, FRAC_1_SQRT_2, 0.5];
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (c, r) in s.amplitudes().iter().zip(raw) {
            assert!(close(*c, C64::from(r / norm), 1e-15));
        }
        // exact normalization: 2(1 + Re<0|z>)
        assert!((norm * norm - 2.0 * (1.0 + 0.5)).abs() < 1e-14);
        assert!((fidelity(&s, &s) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cat_normalization_tends_to_two() {
        let z = C64::new(1.0, 0.0);
        let overlap = |n: usize| {
            let g = DickeState::basis(n, 0).unwrap();
            g.inner(&spin_coherent(z, n).unwrap()).unwrap().re
        };
        assert!(overlap(200) < 1e-29);
        assert!(2.0 * (1.0 + overlap(200)) - 2.0 < 1e-28);
    }

    #[test]
    fn cat_rejects_zero_label() {
        assert!(matches!(
            spin_cat(C64::new(0.0, 0.0), 4),
            Err(Error::DegenerateCat)
        ));
    }

    #[test]
    fn ghz_properties() {
        let one = ghz_state(1).unwrap();
        assert!(close(one.amplitudes()[0], C64::from(FRAC_1_SQRT_2), 1e-15));
        assert!(close(one.amplitudes()[1], C64::from(FRAC_1_SQRT_2), 1e-15));
        for n in [2, 5, 10] {
            let s = ghz_state(n).unwrap();
            assert!(jz_mean(&s).abs() < 1e-15);
            let half = n as f64 / 2.0;
            let second: f64 = s
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(k, c)| c.norm_sqr() * (k as f64 - half).powi(2))
                .sum();
            assert!((second - (n * n) as f64 / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_dispatch() {
        let spec = StateSpec {
            kind: StateKind::Oat,
            z: C64::new(1.0, 0.0),
            chi: 0.1,
            n_qubits: 10,
        };
        assert_eq!(spec.build().unwrap(), oat_state(spec.z, 0.1, 10).unwrap());
        let bad = StateSpec {
            chi: f64::NAN,
            ..spec
        };
        assert!(bad.build().is_err());
        assert_eq!("tat".parse::<StateKind>().unwrap(), StateKind::Tat);
    }
}
