//! Dense reference simulation for small registers.
//!
//! Slow and exact. Tests and the `oracle-check`/`verify` subcommands use it.
//! The enumeration path never calls into this module.
//!
//! Basis index bit `q` is the value of qubit `q`. Density matrices are
//! vectorised as `|rho>> = sum rho_ij |i>|j>`, so a k-qubit density matrix is
//! a 2k-qubit vector and `U rho U†` is `U ⊗ conj(U)` on that vector.

use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, Event, Prep};
use crate::error::{Error, Result};
use crate::pauli::{CliffordGate, PauliString};

pub const MAX_STATE_QUBITS: usize = 12;
pub const MAX_DENSITY_QUBITS: usize = 6;

pub type Mat2 = [[C64; 2]; 2];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn gate_matrix(g: &CliffordGate) -> Option<Mat2> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    Some(match g {
        CliffordGate::H(_) => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        CliffordGate::S(_) => [[o, z], [z, c(0.0, 1.0)]],
        CliffordGate::Sdg(_) => [[o, z], [z, c(0.0, -1.0)]],
        CliffordGate::X(_) => [[z, o], [o, z]],
        CliffordGate::Y(_) => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        CliffordGate::Z(_) => [[o, z], [z, -o]],
        _ => return None,
    })
}

pub fn t_matrix() -> Mat2 {
    let w = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), w]]
}

/// A linear combination of Pauli strings, used for logical operators such as
/// `(X_L + Y_L)/sqrt(2)`.
pub type PauliCombo = Vec<(C64, PauliString)>;

#[derive(Clone, Debug)]
pub struct DenseState {
    k: usize,
    amp: Vec<C64>,
}

impl DenseState {
    pub fn zero(k: usize) -> Result<Self> {
        if k > MAX_STATE_QUBITS {
            return Err(Error::OracleTooLarge {
                max: MAX_STATE_QUBITS,
                asked: k,
            });
        }
        let mut amp = vec![C64::new(0.0, 0.0); 1 << k];
        amp[0] = C64::new(1.0, 0.0);
        Ok(DenseState { k, amp })
    }

    pub fn from_amplitudes(amp: Vec<C64>) -> Result<Self> {
        let k = amp.len().trailing_zeros() as usize;
        if amp.len() != 1 << k || k > MAX_STATE_QUBITS {
            return Err(Error::OracleTooLarge {
                max: MAX_STATE_QUBITS,
                asked: k,
            });
        }
        Ok(DenseState { k, amp })
    }

    pub fn qubits(&self) -> usize {
        self.k
    }
    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> f64 {
        let n = self.norm_sqr();
        if n > 0.0 {
            let s = 1.0 / n.sqrt();
            for a in &mut self.amp {
                *a *= s;
            }
        }
        n
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.k {
            Err(Error::OutOfRange {
                qubit: q,
                n: self.k,
            })
        } else {
            Ok(())
        }
    }

    pub fn apply_1q(&mut self, q: usize, m: &Mat2) -> Result<()> {
        self.check(q)?;
        let bit = 1usize << q;
        for i in 0..self.amp.len() {
            if i & bit == 0 {
                let a0 = self.amp[i];
                let a1 = self.amp[i | bit];
                self.amp[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amp[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &CliffordGate) -> Result<()> {
        g.validate(self.k)?;
        match *g {
            CliffordGate::Cnot(ctl, tgt) => {
                let (cb, tb) = (1usize << ctl, 1usize << tgt);
                for i in 0..self.amp.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amp.swap(i, i | tb);
                    }
                }
                Ok(())
            }
            CliffordGate::Cz(a, b) => {
                let m = (1usize << a) | (1usize << b);
                for i in 0..self.amp.len() {
                    if i & m == m {
                        self.amp[i] = -self.amp[i];
                    }
                }
                Ok(())
            }
            _ => {
                let m = gate_matrix(g).expect("single-qubit gate");
                self.apply_1q(g.qubits().0, &m)
            }
        }
    }

    /// Applies the Pauli operator (including its phase).
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.n() != self.k {
            return Err(Error::SizeMismatch(p.n(), self.k));
        }
        let x = p.x_bits() as usize;
        let z = p.z_bits() as usize;
        let base = C64::new(0.0, 1.0).powu(u32::from(p.phase()) + (x & z).count_ones());
        let mut out = vec![C64::new(0.0, 0.0); self.amp.len()];
        for (i, a) in self.amp.iter().enumerate() {
            let sign = if (z & i).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            out[i ^ x] = base * sign * a;
        }
        self.amp = out;
        Ok(())
    }

    pub fn apply_combo(&self, op: &[(C64, PauliString)]) -> Result<Self> {
        let mut acc = DenseState {
            k: self.k,
            amp: vec![C64::new(0.0, 0.0); self.amp.len()],
        };
        for (coef, p) in op {
            let mut t = self.clone();
            t.apply_pauli(p)?;
            for (a, b) in acc.amp.iter_mut().zip(&t.amp) {
                *a += coef * b;
            }
        }
        Ok(acc)
    }

    /// Applies `(I + sign*A)/2` for a Hermitian involution `A`; returns the
    /// squared norm of the result relative to the input.
    pub fn project(&mut self, op: &[(C64, PauliString)], sign: f64) -> Result<f64> {
        let before = self.norm_sqr();
        let a = self.apply_combo(op)?;
        for (x, y) in self.amp.iter_mut().zip(&a.amp) {
            *x = (*x + sign * y) * 0.5;
        }
        Ok(if before > 0.0 {
            self.norm_sqr() / before
        } else {
            0.0
        })
    }

    /// `|0><0|_c ⊗ I + |1><1|_c ⊗ A`.
    pub fn apply_controlled_combo(
        &mut self,
        control: usize,
        op: &[(C64, PauliString)],
    ) -> Result<()> {
        self.check(control)?;
        let a = self.apply_combo(op)?;
        let cb = 1usize << control;
        for i in 0..self.amp.len() {
            if i & cb != 0 {
                self.amp[i] = a.amp[i];
            }
        }
        Ok(())
    }

    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        let mut t = self.clone();
        t.apply_pauli(p)?;
        Ok(self.inner(&t).re)
    }

    /// Probability that qubit `q` reads `value` in the Z basis.
    pub fn prob_z(&self, q: usize, value: bool) -> Result<f64> {
        self.check(q)?;
        let bit = 1usize << q;
        Ok(self
            .amp
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & bit != 0) == value)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects qubit `q` onto Z outcome `value` without renormalising.
    pub fn collapse_z(&mut self, q: usize, value: bool) -> Result<()> {
        self.check(q)?;
        let bit = 1usize << q;
        for (i, a) in self.amp.iter_mut().enumerate() {
            if (i & bit != 0) != value {
                *a = C64::new(0.0, 0.0);
            }
        }
        Ok(())
    }
}

/// Density matrix on k ≤ 6 qubits, stored as a 2k-qubit vector.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    k: usize,
    v: DenseState,
}

impl DensityMatrix {
    pub fn from_state(s: &DenseState) -> Result<Self> {
        let k = s.qubits();
        if k > MAX_DENSITY_QUBITS {
            return Err(Error::OracleTooLarge {
                max: MAX_DENSITY_QUBITS,
                asked: k,
            });
        }
        let d = 1usize << k;
        let mut amp = vec![C64::new(0.0, 0.0); d * d];
        for j in 0..d {
            for i in 0..d {
                amp[i + d * j] = s.amp[i] * s.amp[j].conj();
            }
        }
        Ok(DensityMatrix {
            k,
            v: DenseState { k: 2 * k, amp },
        })
    }

    /// Builds from a row-major `d x d` matrix.
    pub fn from_matrix(k: usize, m: &[C64]) -> Result<Self> {
        if k > MAX_DENSITY_QUBITS {
            return Err(Error::OracleTooLarge {
                max: MAX_DENSITY_QUBITS,
                asked: k,
            });
        }
        let d = 1usize << k;
        let mut amp = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                amp[i + d * j] = m[i * d + j];
            }
        }
        Ok(DensityMatrix {
            k,
            v: DenseState { k: 2 * k, amp },
        })
    }

    pub fn qubits(&self) -> usize {
        self.k
    }

    /// `self ⊗ other`, with `other` on the higher qubit indices.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let k = self.k + other.k;
        if k > MAX_DENSITY_QUBITS {
            return Err(Error::OracleTooLarge {
                max: MAX_DENSITY_QUBITS,
                asked: k,
            });
        }
        let (d, da) = (1usize << k, 1usize << self.k);
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = self.entry(i % da, j % da) * other.entry(i / da, j / da);
            }
        }
        DensityMatrix::from_matrix(k, &m)
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.v.amp[i + (j << self.k)]
    }

    pub fn trace(&self) -> f64 {
        (0..1usize << self.k).map(|i| self.entry(i, i).re).sum()
    }

    pub fn apply_1q(&mut self, q: usize, m: &Mat2) -> Result<()> {
        let mc = [
            [m[0][0].conj(), m[0][1].conj()],
            [m[1][0].conj(), m[1][1].conj()],
        ];
        self.v.apply_1q(q, m)?;
        self.v.apply_1q(q + self.k, &mc)
    }

    pub fn apply_gate(&mut self, g: &CliffordGate) -> Result<()> {
        g.validate(self.k)?;
        match *g {
            CliffordGate::Cnot(a, b) => {
                self.v.apply_gate(g)?;
                self.v
                    .apply_gate(&CliffordGate::Cnot(a + self.k, b + self.k))
            }
            CliffordGate::Cz(a, b) => {
                self.v.apply_gate(g)?;
                self.v.apply_gate(&CliffordGate::Cz(a + self.k, b + self.k))
            }
            _ => self.apply_1q(g.qubits().0, &gate_matrix(g).expect("single-qubit gate")),
        }
    }

    fn lifted(&self, p: &PauliString) -> Result<(PauliString, PauliString)> {
        if p.n() != self.k {
            return Err(Error::SizeMismatch(p.n(), self.k));
        }
        let k = self.k;
        let lo = PauliString::from_bits(2 * k, p.x_bits(), p.z_bits(), p.phase())?;
        // conj(P): Y picks up a sign under conjugation, as does an odd phase.
        let ny = (p.x_bits() & p.z_bits()).count_ones() as u8;
        let conj_phase = (4 - p.phase()) % 4 + 2 * (ny % 2);
        let hi = PauliString::from_bits(2 * k, p.x_bits() << k, p.z_bits() << k, conj_phase)?;
        Ok((lo, hi))
    }

    /// `P rho P†`.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        let (lo, hi) = self.lifted(p)?;
        self.v.apply_pauli(&lo)?;
        self.v.apply_pauli(&hi)
    }

    /// `rho -> (1 - sum probs) rho + sum_P probs[P] P rho P` for Paulis on
    /// the listed qubits.
    pub fn apply_pauli_channel(&mut self, terms: &[(f64, PauliString)]) -> Result<()> {
        let total: f64 = terms.iter().map(|t| t.0).sum();
        let mut acc: Vec<C64> = self.v.amp.iter().map(|a| a * (1.0 - total)).collect();
        for (pr, p) in terms {
            if *pr == 0.0 {
                continue;
            }
            let mut t = self.clone();
            t.apply_pauli(p)?;
            for (a, b) in acc.iter_mut().zip(&t.v.amp) {
                *a += b * *pr;
            }
        }
        self.v.amp = acc;
        Ok(())
    }

    /// Z-dephases qubit `q` (a measurement whose outcome is discarded).
    pub fn dephase(&mut self, q: usize) -> Result<()> {
        if q >= self.k {
            return Err(Error::OutOfRange {
                qubit: q,
                n: self.k,
            });
        }
        let (b1, b2) = (1usize << q, 1usize << (q + self.k));
        for (i, a) in self.v.amp.iter_mut().enumerate() {
            if ((i & b1) != 0) != ((i & b2) != 0) {
                *a = C64::new(0.0, 0.0);
            }
        }
        Ok(())
    }

    /// Applies `gates` conditioned on qubit `q` being |1> (deferred
    /// measurement form of a classically controlled correction).
    pub fn controlled_1q(&mut self, q: usize, target: usize, m: &Mat2) -> Result<()> {
        let id = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let d = 1usize << self.k;
        let mut out = self.v.amp.clone();
        let qb = 1usize << q;
        let tb = 1usize << target;
        for j in 0..d {
            for i in 0..d {
                let mi = if i & qb != 0 { m } else { &id };
                let mj = if j & qb != 0 { m } else { &id };
                let (ib, jb) = ((i & tb != 0) as usize, (j & tb != 0) as usize);
                let mut s = C64::new(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        let ii = if a == 1 { i | tb } else { i & !tb };
                        let jj = if b == 1 { j | tb } else { j & !tb };
                        s += mi[ib][a] * self.entry(ii, jj) * mj[jb][b].conj();
                    }
                }
                out[i + d * j] = s;
            }
        }
        self.v.amp = out;
        Ok(())
    }

    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        // tr(P rho) = sum_ij P_ji rho_ij
        if p.n() != self.k {
            return Err(Error::SizeMismatch(p.n(), self.k));
        }
        let d = 1usize << self.k;
        let mut tot = C64::new(0.0, 0.0);
        for i in 0..d {
            let mut e = DenseState {
                k: self.k,
                amp: vec![C64::new(0.0, 0.0); d],
            };
            e.amp[i] = C64::new(1.0, 0.0);
            e.apply_pauli(p)?;
            for j in 0..d {
                tot += e.amp[j] * self.entry(i, j);
            }
        }
        Ok(tot.re)
    }

    /// Reduced density matrix on the qubits in `keep` (in increasing order).
    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let k2 = keep.len();
        let d = 1usize << self.k;
        let d2 = 1usize << k2;
        let mut m = vec![C64::new(0.0, 0.0); d2 * d2];
        let keep_mask: usize = keep.iter().map(|q| 1usize << q).sum();
        let sub = |i: usize| -> usize {
            keep.iter()
                .enumerate()
                .map(|(n, q)| ((i >> q) & 1) << n)
                .sum()
        };
        for i in 0..d {
            for j in 0..d {
                if (i & !keep_mask) == (j & !keep_mask) {
                    m[sub(i) * d2 + sub(j)] += self.entry(i, j);
                }
            }
        }
        DensityMatrix::from_matrix(k2, &m)
    }
}

/// Runs a circuit made of preparations (each on a fresh qubit), gates and
/// cuts. Measurements and non-Clifford elements are rejected.
pub fn run_unitary_part(c: &Circuit) -> Result<DenseState> {
    let mut s = DenseState::zero(c.n_qubits())?;
    for ev in c.events() {
        match ev {
            Event::Gate(g) => s.apply_gate(g)?,
            Event::Prepare { q, state } => match state {
                Prep::ZPlus => {}
                Prep::ZMinus => s.apply_gate(&CliffordGate::X(*q))?,
                Prep::XPlus => s.apply_gate(&CliffordGate::H(*q))?,
                Prep::YPlus => {
                    s.apply_gate(&CliffordGate::H(*q))?;
                    s.apply_gate(&CliffordGate::S(*q))?;
                }
                Prep::Magic => {
                    s.apply_gate(&CliffordGate::H(*q))?;
                    s.apply_1q(*q, &t_matrix())?;
                }
            },
            Event::Cut { .. } => {}
            Event::Measure { .. } | Event::NonClifford { .. } => {
                return Err(Error::Circuit(
                    "dense runner handles unitary circuits only".into(),
                ))
            }
        }
    }
    Ok(s)
}

/// Pauli transfer matrix of a single-qubit map given as a closure on
/// density matrices. Rows/columns ordered (I, X, Y, Z).
pub fn ptm_of_map(f: impl Fn(&DensityMatrix) -> Result<DensityMatrix>) -> Result<[[f64; 4]; 4]> {
    let paulis = ["I", "X1", "Y1", "Z1"];
    let ps: Vec<PauliString> = paulis
        .iter()
        .map(|s| PauliString::parse(1, s).unwrap())
        .collect();
    let mut out = [[0.0; 4]; 4];
    for (j, pj) in ps.iter().enumerate() {
        // P_j / 2 written out as a matrix
        let mut m = vec![C64::new(0.0, 0.0); 4];
        for col in 0..2 {
            let mut e = DenseState::from_amplitudes(vec![
                C64::new((col == 0) as u8 as f64, 0.0),
                C64::new((col == 1) as u8 as f64, 0.0),
            ])?;
            e.apply_pauli(pj)?;
            for row in 0..2 {
                m[row * 2 + col] = e.amplitudes()[row] * 0.5;
            }
        }
        let rho = DensityMatrix::from_matrix(1, &m)?;
        let out_rho = f(&rho)?;
        for (i, pi) in ps.iter().enumerate() {
            out[i][j] = out_rho.expectation(pi)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_on_zero_is_plus() {
        let mut s = DenseState::zero(1).unwrap();
        s.apply_gate(&CliffordGate::H(0)).unwrap();
        let x = PauliString::parse(1, "X1").unwrap();
        assert!((s.expectation(&x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_application_matches_gates() {
        let mut a = DenseState::zero(2).unwrap();
        a.apply_gate(&CliffordGate::H(0)).unwrap();
        a.apply_gate(&CliffordGate::S(1)).unwrap();
        a.apply_gate(&CliffordGate::H(1)).unwrap();
        let mut b = a.clone();
        a.apply_pauli(&PauliString::parse(2, "Y1Z2").unwrap())
            .unwrap();
        b.apply_gate(&CliffordGate::Y(0)).unwrap();
        b.apply_gate(&CliffordGate::Z(1)).unwrap();
        assert!((a.inner(&b).norm() - 1.0).abs() < 1e-12);
        assert!((a.inner(&b).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_on_displaced_magic_state() {
        // P+ of (X+Y)/sqrt2 applied to X|T>: survival 1/2, post-state |T>.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut t = DenseState::zero(1).unwrap();
        t.apply_gate(&CliffordGate::H(0)).unwrap();
        t.apply_1q(0, &t_matrix()).unwrap();
        let ideal = t.clone();
        t.apply_pauli(&PauliString::parse(1, "X1").unwrap())
            .unwrap();
        let op: PauliCombo = vec![
            (C64::new(h, 0.0), PauliString::parse(1, "X1").unwrap()),
            (C64::new(h, 0.0), PauliString::parse(1, "Y1").unwrap()),
        ];
        let p = t.project(&op, 1.0).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        t.normalize();
        assert!((t.inner(&ideal).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_gate_matches_state() {
        let mut s = DenseState::zero(2).unwrap();
        s.apply_gate(&CliffordGate::H(0)).unwrap();
        let mut r = DensityMatrix::from_state(&s).unwrap();
        s.apply_gate(&CliffordGate::Cnot(0, 1)).unwrap();
        s.apply_gate(&CliffordGate::S(1)).unwrap();
        r.apply_gate(&CliffordGate::Cnot(0, 1)).unwrap();
        r.apply_gate(&CliffordGate::S(1)).unwrap();
        let r2 = DensityMatrix::from_state(&s).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((r.entry(i, j) - r2.entry(i, j)).norm() < 1e-12);
            }
        }
        for p in ["Y1Y2", "X1Y2", "Z1Z2"] {
            let p = PauliString::parse(2, p).unwrap();
            assert!((r.expectation(&p).unwrap() - s.expectation(&p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_conjugation_on_density() {
        let mut s = DenseState::zero(1).unwrap();
        s.apply_gate(&CliffordGate::H(0)).unwrap();
        s.apply_gate(&CliffordGate::S(0)).unwrap();
        let mut r = DensityMatrix::from_state(&s).unwrap();
        r.apply_pauli(&PauliString::parse(1, "Z1").unwrap())
            .unwrap();
        let y = PauliString::parse(1, "Y1").unwrap();
        assert!((r.expectation(&y).unwrap() + 1.0).abs() < 1e-12);
        r.apply_pauli(&PauliString::parse(1, "+iY1").unwrap())
            .unwrap();
        assert!((r.expectation(&y).unwrap() + 1.0).abs() < 1e-12);
        assert!((r.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_ptm() {
        let r = ptm_of_map(|rho| Ok(rho.clone())).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((r[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }
}
