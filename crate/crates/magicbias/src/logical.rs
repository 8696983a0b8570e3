//! Two-logical-qubit model of the injection gadget.
//!
//! Qubit 0 is the computational block, qubit 1 the magic block. The table
//! gives, for a logical Pauli `L` displacing the magic state before its
//! check, the check sign `t`, the input state, the readout basis, the true
//! magic outcome `m`, the readout variant actually applied (selected by the
//! recorded outcome `b`) and the final logical outcome `o`, the joint
//! probability with no further errors.

use num_complex::Complex64 as C64;

use crate::circuit::Basis;
use crate::pauli::Pauli1;
use crate::steane::LogicalGate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InputState {
    Zero,
    One,
    Plus,
    PlusY,
}

impl InputState {
    pub const ALL: [InputState; 4] = [
        InputState::Zero,
        InputState::One,
        InputState::Plus,
        InputState::PlusY,
    ];

    pub fn bloch(self) -> [f64; 3] {
        match self {
            InputState::Zero => [0.0, 0.0, 1.0],
            InputState::One => [0.0, 0.0, -1.0],
            InputState::Plus => [1.0, 0.0, 0.0],
            InputState::PlusY => [0.0, 1.0, 0.0],
        }
    }

    /// Logical gates preparing the state from |0>.
    pub fn prep(self) -> &'static [LogicalGate] {
        match self {
            InputState::Zero => &[],
            InputState::One => &[LogicalGate::X],
            InputState::Plus => &[LogicalGate::H],
            InputState::PlusY => &[LogicalGate::H, LogicalGate::S],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InputState::Zero => "0",
            InputState::One => "1",
            InputState::Plus => "+",
            InputState::PlusY => "+i",
        }
    }
}

pub const BASES: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

pub fn basis_index(b: Basis) -> usize {
    match b {
        Basis::X => 0,
        Basis::Y => 1,
        Basis::Z => 2,
    }
}

/// The distinct readout rotations. The S correction for magic outcome 1 is
/// folded in, so six (basis, branch) pairs need five circuits.
pub const VARIANTS: [&[LogicalGate]; 5] = [
    &[],
    &[LogicalGate::H],
    &[LogicalGate::Sdg, LogicalGate::H],
    &[LogicalGate::S, LogicalGate::H],
    &[LogicalGate::S],
];

pub fn variant(basis: Basis, branch: bool) -> usize {
    match (basis, branch) {
        (Basis::Z, false) => 0,
        (Basis::X, false) => 1,
        (Basis::Y, false) => 2,
        (Basis::X, true) => 3,
        (Basis::Y, true) => 1,
        (Basis::Z, true) => 4,
    }
}

type M2 = [[C64; 2]; 2];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn gate(g: LogicalGate) -> M2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (z, o) = (c(0.0, 0.0), c(1.0, 0.0));
    match g {
        LogicalGate::I => [[o, z], [z, o]],
        LogicalGate::X => [[z, o], [o, z]],
        LogicalGate::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        LogicalGate::S => [[o, z], [z, c(0.0, 1.0)]],
        LogicalGate::Sdg => [[o, z], [z, c(0.0, -1.0)]],
    }
}

fn pauli(p: Pauli1) -> M2 {
    let (z, o) = (c(0.0, 0.0), c(1.0, 0.0));
    match p {
        Pauli1::I => [[o, z], [z, o]],
        Pauli1::X => [[z, o], [o, z]],
        Pauli1::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        Pauli1::Z => [[o, z], [z, -o]],
    }
}

fn apply(m: &M2, v: [C64; 2]) -> [C64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn magic_state() -> [C64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [c(h, 0.0), C64::from_polar(h, std::f64::consts::FRAC_PI_4)]
}

/// `(I + (-1)^t A)/2 · L|T>` with `A = (X+Y)/sqrt2`, unnormalised.
pub fn checked_magic(l: Pauli1, t: bool) -> [C64; 2] {
    let v = apply(&pauli(l), magic_state());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ax = apply(&pauli(Pauli1::X), v);
    let ay = apply(&pauli(Pauli1::Y), v);
    let sign = if t { -1.0 } else { 1.0 };
    [0, 1].map(|i| (v[i] + (ax[i] + ay[i]) * (sign * h)) * 0.5)
}

pub fn input_state(s: InputState) -> [C64; 2] {
    let mut v = [c(1.0, 0.0), c(0.0, 0.0)];
    for &g in s.prep() {
        v = apply(&gate(g), v);
    }
    v
}

pub fn pauli_index(p: Pauli1) -> usize {
    match p {
        Pauli1::I => 0,
        Pauli1::X => 1,
        Pauli1::Y => 2,
        Pauli1::Z => 3,
    }
}

#[derive(Clone, Debug)]
pub struct LogicalModel {
    table: Vec<f64>,
}

fn idx(l: usize, t: usize, s: usize, beta: usize, m: usize, b: usize, o: usize) -> usize {
    ((((((l * 2 + t) * 4 + s) * 3 + beta) * 2 + m) * 2 + b) * 2) + o
}

impl LogicalModel {
    pub fn build() -> Self {
        let mut table = vec![0.0; 4 * 2 * 4 * 3 * 2 * 2 * 2];
        let paulis = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z];
        for (li, &l) in paulis.iter().enumerate() {
            for t in 0..2 {
                let mg = checked_magic(l, t == 1);
                for (si, &s) in InputState::ALL.iter().enumerate() {
                    let cs = input_state(s);
                    // |c>|m> then CNOT(c -> m); amplitude [comp][magic]
                    let mut psi = [[c(0.0, 0.0); 2]; 2];
                    for a in 0..2 {
                        for b in 0..2 {
                            psi[a][b ^ a] = cs[a] * mg[b];
                        }
                    }
                    for (bi, &basis) in BASES.iter().enumerate() {
                        for m in 0..2 {
                            let branch = [psi[0][m], psi[1][m]];
                            for b in 0..2 {
                                let mut v = branch;
                                for &g in VARIANTS[variant(basis, b == 1)] {
                                    v = apply(&gate(g), v);
                                }
                                for o in 0..2 {
                                    // projections onto orthogonal states leave ~1e-33
                                    let pr = v[o].norm_sqr();
                                    table[idx(li, t, si, bi, m, b, o)] =
                                        if pr < 1e-15 { 0.0 } else { pr };
                                }
                            }
                        }
                    }
                }
            }
        }
        LogicalModel { table }
    }

    #[inline]
    pub fn prob(
        &self,
        l: usize,
        t: usize,
        s: usize,
        beta: usize,
        m: usize,
        b: usize,
        o: usize,
    ) -> f64 {
        self.table[idx(l, t, s, beta, m, b, o)]
    }

    /// Born probabilities of measuring `T|s>` in `basis`.
    pub fn ideal(&self, s: usize, beta: usize) -> [f64; 2] {
        let mut out = [0.0; 2];
        for m in 0..2 {
            for (o, slot) in out.iter_mut().enumerate() {
                *slot += self.prob(0, 0, s, beta, m, m, o);
            }
        }
        out
    }
}
