//! The [[7,1,3]] code: stabilisers, decoding, frame reduction, transversal
//! logical gates and the circuit library used by the injection gadget.
//!
//! Qubits are 0-based in code and 1-based in text. Faces:
//! red {1,3,5,7}, green {2,3,6,7}, blue {1,2,4,7}. Within a block, a
//! Pauli is a pair of 7-bit masks `(x, z)`.

use std::fmt::Write as _;

use crate::circuit::{Basis, Circuit, ControlledLogical, Prep};
use crate::error::{Error, Result};
use crate::pauli::{CliffordGate, Pauli1, PauliString};

pub const FACES: [u8; 3] = [0b101_0101, 0b110_0110, 0b100_1011];
pub const LOGICAL_SUPPORT: u8 = 0b101_0010;
pub const FACE_NAMES: [&str; 3] = ["red", "green", "blue"];

/// Physical S on every qubit acts as logical S†, so logical S is
/// transversal S†. Pinned by the dense-oracle test `transversal_s_convention`.
pub const TRANSVERSAL_S_IS_ADJOINT: bool = true;

fn parity(v: u8) -> u8 {
    (v.count_ones() & 1) as u8
}

/// Syndrome bits in the order (X-red, X-green, X-blue, Z-red, Z-green, Z-blue).
/// The X-type checks see `z`, the Z-type checks see `x`.
pub fn syndrome_bits(x: u8, z: u8) -> u8 {
    let mut s = 0;
    for (i, f) in FACES.iter().enumerate() {
        s |= parity(z & f) << i;
        s |= parity(x & f) << (i + 3);
    }
    s
}

/// Logical X parity of an X mask (anticommutation with Z_L).
pub fn x_logical_parity(x: u8) -> u8 {
    parity(x & LOGICAL_SUPPORT)
}

/// Extracts the `(x, z)` masks of `e` restricted to a block.
pub fn block_bits(e: &PauliString, data: &[usize; 7]) -> (u8, u8) {
    let (mut x, mut z) = (0u8, 0u8);
    for (i, &q) in data.iter().enumerate() {
        x |= ((e.x_bits() >> q & 1) as u8) << i;
        z |= ((e.z_bits() >> q & 1) as u8) << i;
    }
    (x, z)
}

fn to_pauli7(x: u8, z: u8) -> PauliString {
    PauliString::from_bits(7, u64::from(x), u64::from(z), 0).expect("seven qubits")
}

fn weight7(x: u8, z: u8) -> u32 {
    (x | z).count_ones()
}

/// Ordering key: weight first, then the sorted (qubit, letter) list with
/// X < Y < Z compared lexicographically.
fn order_key(x: u8, z: u8) -> (u32, Vec<(u8, u8)>) {
    let mut v = Vec::new();
    for q in 0..7 {
        let (a, b) = (x >> q & 1, z >> q & 1);
        if a | b != 0 {
            let letter = match (a, b) {
                (1, 0) => 0,
                (1, 1) => 1,
                _ => 2,
            };
            v.push((q, letter));
        }
    }
    (weight7(x, z), v)
}

pub fn check7(e: &PauliString) -> Result<()> {
    if e.n() != 7 {
        Err(Error::SizeMismatch(e.n(), 7))
    } else {
        Ok(())
    }
}

pub fn syndrome(e: &PauliString) -> Result<u8> {
    check7(e)?;
    Ok(syndrome_bits(e.x_bits() as u8, e.z_bits() as u8))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Code {
    pub generators: Vec<PauliString>,
    pub x_logical: PauliString,
    pub z_logical: PauliString,
    pub y_logical: PauliString,
}

impl Code {
    pub fn steane() -> Self {
        let mut generators = Vec::new();
        for f in FACES {
            generators.push(to_pauli7(f, 0));
        }
        for f in FACES {
            generators.push(to_pauli7(0, f));
        }
        let x_logical = to_pauli7(LOGICAL_SUPPORT, 0);
        let z_logical = to_pauli7(0, LOGICAL_SUPPORT);
        // Y_L = i X_L Z_L
        let y_logical = x_logical.multiply(&z_logical).expect("same size");
        let y_logical = y_logical.with_phase((y_logical.phase() + 1) % 4);
        Code {
            generators,
            x_logical,
            z_logical,
            y_logical,
        }
    }

    pub fn logical(&self, p: Pauli1) -> PauliString {
        match p {
            Pauli1::I => PauliString::identity(7).expect("seven"),
            Pauli1::X => self.x_logical,
            Pauli1::Y => self.y_logical,
            Pauli1::Z => self.z_logical,
        }
    }

    /// The stabiliser product selected by the 6 bits of `sel` (generator
    /// order), multiplied left to right.
    pub fn stabilizer(&self, sel: u8) -> PauliString {
        let mut s = PauliString::identity(7).expect("seven");
        for (i, g) in self.generators.iter().enumerate() {
            if sel >> i & 1 == 1 {
                s = s.multiply(g).expect("same size");
            }
        }
        s
    }

    /// Lowest-order element of `(x, z)` times the stabiliser group.
    pub fn min_equivalent(&self, x: u8, z: u8) -> (u8, u8) {
        let mut best = (x, z);
        let mut key = order_key(x, z);
        for sel in 1u8..64 {
            let (mut a, mut b) = (x, z);
            for i in 0..3 {
                if sel >> i & 1 == 1 {
                    a ^= FACES[i];
                }
                if sel >> (i + 3) & 1 == 1 {
                    b ^= FACES[i];
                }
            }
            let k = order_key(a, b);
            if k < key {
                key = k;
                best = (a, b);
            }
        }
        best
    }

    /// Weight of the lightest representative of the logical class of a
    /// syndrome-free operator. Used for the distance check.
    pub fn min_weight_in_class(&self, x: u8, z: u8) -> u32 {
        let (a, b) = self.min_equivalent(x, z);
        weight7(a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoderTable {
    entries: [(u8, u8); 64],
}

impl DecoderTable {
    /// Minimum-weight corrections by brute force over all 4^7 Paulis.
    pub fn build() -> Self {
        let mut best: [Option<(u8, u8)>; 64] = [None; 64];
        for x in 0u8..128 {
            for z in 0u8..128 {
                let s = syndrome_bits(x, z) as usize;
                match best[s] {
                    Some((bx, bz)) if order_key(bx, bz) <= order_key(x, z) => {}
                    _ => best[s] = Some((x, z)),
                }
            }
        }
        DecoderTable {
            entries: best.map(|e| e.expect("every syndrome reachable")),
        }
    }

    pub fn decode_bits(&self, s: u8) -> (u8, u8) {
        self.entries[(s & 63) as usize]
    }

    pub fn decode(&self, s: u8) -> PauliString {
        let (x, z) = self.decode_bits(s);
        to_pauli7(x, z)
    }

    /// X-only correction for a Z-type syndrome (3 bits, red/green/blue).
    pub fn x_correction(&self, zsyn: u8) -> u8 {
        self.decode_bits((zsyn & 7) << 3).0
    }

    /// Test hook: a deliberately corrupted table.
    pub fn with_entry(mut self, s: u8, x: u8, z: u8) -> Self {
        self.entries[(s & 63) as usize] = (x, z);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameReduction {
    pub syndrome: u8,
    pub rep: PauliString,
    /// Generator selection bits, in generator order.
    pub stabilizer: u8,
    pub class: Pauli1,
    /// `e = i^phase * rep * stabilizer * logical(class)`.
    pub phase: u8,
}

pub fn logical_class(code: &Code, e: &PauliString) -> Pauli1 {
    let xc = !e.commutes_unchecked(&code.z_logical);
    let zc = !e.commutes_unchecked(&code.x_logical);
    Pauli1::from_bits(xc, zc)
}

pub fn logical_frame_reduce(
    code: &Code,
    dec: &DecoderTable,
    e: &PauliString,
) -> Result<FrameReduction> {
    let s = syndrome(e)?;
    let rep = dec.decode(s);
    let r = rep.multiply(e)?;
    let class = logical_class(code, &r);
    let t = r.multiply(&code.logical(class))?;
    for sel in 0u8..64 {
        let g = code.stabilizer(sel);
        if g.x_bits() == t.x_bits() && g.z_bits() == t.z_bits() {
            // t = i^k g  with  g.phase + k = t.phase
            let phase = (t.phase() + 4 - g.phase()) % 4;
            return Ok(FrameReduction {
                syndrome: s,
                rep,
                stabilizer: sel,
                class,
                phase,
            });
        }
    }
    Err(Error::Reconstruction(format!(
        "{e} did not reduce to a stabiliser"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicalGate {
    I,
    X,
    H,
    S,
    Sdg,
}

/// Physical gates realising the logical gates `ops` (first applied first).
pub fn transversal(ops: &[LogicalGate], data: &[usize; 7]) -> Vec<CliffordGate> {
    let mut out = Vec::new();
    for op in ops {
        for &q in data {
            let g = match op {
                LogicalGate::I => continue,
                LogicalGate::X => CliffordGate::X(q),
                LogicalGate::H => CliffordGate::H(q),
                LogicalGate::S if TRANSVERSAL_S_IS_ADJOINT => CliffordGate::Sdg(q),
                LogicalGate::S => CliffordGate::S(q),
                LogicalGate::Sdg if TRANSVERSAL_S_IS_ADJOINT => CliffordGate::S(q),
                LogicalGate::Sdg => CliffordGate::Sdg(q),
            };
            out.push(g);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Circuit library.
//
// Syndrome-extraction gadgets address 13 "local" qubits: data 0..=6, then
// ancillas xR, xG, xB (prepared |+>, controls) and zR, zG, zB (prepared |0>,
// targets). Ancilla-to-ancilla CNOTs are the flags.

pub const ENCODE_ZERO_PLUS: [usize; 3] = [0, 1, 3];
pub const ENCODE_ZERO_CNOTS: [(usize, usize); 8] = [
    (0, 2),
    (0, 4),
    (1, 2),
    (1, 5),
    (1, 6),
    (3, 4),
    (3, 5),
    (4, 6),
];

pub const ENCODE_T_INPUT: usize = 2;
pub const ENCODE_T_CNOTS: [(usize, usize); 11] = [
    (2, 4),
    (2, 5),
    (0, 2),
    (0, 4),
    (0, 6),
    (1, 2),
    (1, 5),
    (1, 6),
    (3, 0),
    (3, 1),
    (3, 6),
];

pub const CHECK_0M_SUPPORT: [usize; 3] = [1, 4, 6];

pub const EC_FLAGGED: [(usize, usize); 30] = [
    (8, 2),
    (7, 2),
    (6, 12),
    (2, 11),
    (2, 10),
    (8, 11),
    (9, 6),
    (9, 12),
    (0, 12),
    (9, 0),
    (9, 1),
    (1, 11),
    (8, 6),
    (1, 12),
    (8, 1),
    (7, 10),
    (5, 11),
    (9, 12),
    (9, 3),
    (8, 11),
    (6, 10),
    (8, 5),
    (3, 12),
    (0, 10),
    (7, 4),
    (7, 0),
    (7, 10),
    (7, 6),
    (4, 10),
    (6, 11),
];

pub const ED_MODIFIED: [(usize, usize); 30] = [
    (6, 12),
    (2, 10),
    (8, 2),
    (7, 2),
    (7, 10),
    (6, 10),
    (0, 10),
    (2, 11),
    (9, 6),
    (9, 12),
    (0, 12),
    (4, 10),
    (7, 4),
    (1, 12),
    (8, 11),
    (8, 6),
    (8, 1),
    (3, 12),
    (9, 0),
    (7, 0),
    (9, 1),
    (7, 6),
    (1, 11),
    (8, 5),
    (9, 3),
    (5, 11),
    (6, 11),
    (9, 12),
    (8, 11),
    (7, 10),
];

/// Position in `EC_FLAGGED` of the flag CNOT whose (X, Z) fault leaves
/// `X6 Z7` on the data with every ancilla and flag outcome trivial.
pub const EC_HOOK_SITE: usize = 19;

pub const ANC_LABELS: [&str; 6] = ["x0", "x1", "x2", "z0", "z1", "z2"];

fn local(data: &[usize; 7], anc: &[usize; 6], b: usize) -> usize {
    if b < 7 {
        data[b]
    } else {
        anc[b - 7]
    }
}

pub fn encode_zero(c: &mut Circuit, data: &[usize; 7], noisy: bool, tag: u8) -> Result<()> {
    for (i, &q) in data.iter().enumerate() {
        c.prepare(
            q,
            if ENCODE_ZERO_PLUS.contains(&i) {
                Prep::XPlus
            } else {
                Prep::ZPlus
            },
        )?;
    }
    for (a, b) in ENCODE_ZERO_CNOTS {
        c.cnot(data[a], data[b], noisy, tag)?;
    }
    Ok(())
}

pub fn encode_t(c: &mut Circuit, data: &[usize; 7], noisy: bool, tag: u8) -> Result<()> {
    for (i, &q) in data.iter().enumerate() {
        let st = if i == ENCODE_T_INPUT {
            Prep::Magic
        } else if ENCODE_ZERO_PLUS.contains(&i) {
            Prep::XPlus
        } else {
            Prep::ZPlus
        };
        c.prepare(q, st)?;
    }
    for (a, b) in ENCODE_T_CNOTS {
        c.cnot(data[a], data[b], noisy, tag)?;
    }
    Ok(())
}

/// Non-destructive Z_L check, post-selected on +1.
pub fn check_0m(
    c: &mut Circuit,
    data: &[usize; 7],
    anc: usize,
    noisy: bool,
    tag: u8,
    label: &str,
) -> Result<()> {
    c.prepare(anc, Prep::ZPlus)?;
    for i in CHECK_0M_SUPPORT {
        c.cnot(data[i], anc, noisy, tag)?;
    }
    c.measure(anc, Basis::Z, label)?;
    Ok(())
}

/// Logical `(X_L+Y_L)/sqrt2` check: control `anc` in a Bell pair with `flag`,
/// the ideal controlled-logical element between two noisy CNOTs, then `anc`
/// read in X (the check outcome) and `flag` in Z (post-selected).
/// Labels: `{p}_pre` (cut), `{p}` (element), `{p}_t`, `{p}_flag`.
pub fn check_tm(
    c: &mut Circuit,
    data: &[usize; 7],
    anc: usize,
    flag: usize,
    noisy: bool,
    tag: u8,
    p: &str,
) -> Result<()> {
    c.prepare(anc, Prep::XPlus)?;
    c.prepare(flag, Prep::ZPlus)?;
    c.cnot(anc, flag, noisy, tag)?;
    c.cut(&format!("{p}_pre"))?;
    let mut xl = 0u64;
    for (i, &q) in data.iter().enumerate() {
        if LOGICAL_SUPPORT >> i & 1 == 1 {
            xl |= 1 << q;
        }
    }
    let frame = ControlledLogical {
        block: data.to_vec(),
        x_logical: xl,
        z_logical: xl,
        control: anc,
        flag,
    };
    c.nonclifford(p, frame)?;
    c.cnot(anc, flag, noisy, tag)?;
    c.measure(anc, Basis::X, &format!("{p}_t"))?;
    c.measure(flag, Basis::Z, &format!("{p}_flag"))?;
    Ok(())
}

fn extraction(
    c: &mut Circuit,
    data: &[usize; 7],
    anc: &[usize; 6],
    cnots: &[(usize, usize)],
    noisy: bool,
    tag: u8,
    p: &str,
) -> Result<()> {
    for (i, &a) in anc.iter().enumerate() {
        c.prepare(a, if i < 3 { Prep::XPlus } else { Prep::ZPlus })?;
    }
    for &(a, b) in cnots {
        c.cnot(local(data, anc, a), local(data, anc, b), noisy, tag)?;
    }
    for (i, &a) in anc.iter().enumerate() {
        c.measure(
            a,
            if i < 3 { Basis::X } else { Basis::Z },
            &format!("{p}_{}", ANC_LABELS[i]),
        )?;
    }
    Ok(())
}

/// Flagged error detection; any nontrivial outcome rejects.
pub fn ed_modified(
    c: &mut Circuit,
    data: &[usize; 7],
    anc: &[usize; 6],
    noisy: bool,
    tag: u8,
    p: &str,
) -> Result<()> {
    extraction(c, data, anc, &ED_MODIFIED, noisy, tag, p)
}

/// One flagged extraction round.
pub fn ec_flagged(
    c: &mut Circuit,
    data: &[usize; 7],
    anc: &[usize; 6],
    noisy: bool,
    tag: u8,
    p: &str,
) -> Result<()> {
    extraction(c, data, anc, &EC_FLAGGED, noisy, tag, p)
}

/// Unflagged extraction: each X check in full, then each Z check.
pub fn plain_round_cnots() -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for (i, f) in FACES.iter().enumerate() {
        for q in 0..7 {
            if f >> q & 1 == 1 {
                v.push((7 + i, q));
            }
        }
    }
    for (i, f) in FACES.iter().enumerate() {
        for q in 0..7 {
            if f >> q & 1 == 1 {
                v.push((q, 10 + i));
            }
        }
    }
    v
}

/// One round of flagged EC followed by a cut `{p}_out`. Outcome labels
/// are `{p}_x0` .. `{p}_z2`.
pub fn ec_round(
    c: &mut Circuit,
    data: &[usize; 7],
    anc: &[usize; 6],
    noisy: bool,
    tag: u8,
    p: &str,
) -> Result<()> {
    ec_flagged(c, data, anc, noisy, tag, p)?;
    c.cut(&format!("{p}_out"))?;
    Ok(())
}

pub const LOCAL_DATA: [usize; 7] = [0, 1, 2, 3, 4, 5, 6];
pub const LOCAL_ANC: [usize; 6] = [7, 8, 9, 10, 11, 12];

/// A single extraction round on 13 qubits with a cut `out` at the end.
pub fn standalone_round(cnots: &[(usize, usize)]) -> Result<Circuit> {
    let mut c = Circuit::new(13)?;
    extraction(&mut c, &LOCAL_DATA, &LOCAL_ANC, cnots, true, 0, "s")?;
    c.cut("out")?;
    Ok(c)
}

/// Order-1 faults of one extraction round that fire no ancilla or flag and
/// leave a data error of minimum weight >= 2, as `(site, pauli, error)`.
pub fn undetected_heavy(cnots: &[(usize, usize)]) -> Result<Vec<(usize, usize, PauliString)>> {
    let code = Code::steane();
    let c = standalone_round(cnots)?;
    let mut bad = Vec::new();
    for s in 0..c.fault_sites().len() {
        for k in 0..15 {
            let e = c.propagate_fault(s, k)?;
            if e.flips.iter().any(|f| *f) {
                continue;
            }
            let (x, z) = block_bits(&e.residuals[0], &LOCAL_DATA);
            let (a, b) = code.min_equivalent(x, z);
            if (a | b).count_ones() >= 2 {
                bad.push((
                    s,
                    k,
                    PauliString::from_bits(7, u64::from(a), u64::from(b), 0)?,
                ));
            }
        }
    }
    Ok(bad)
}

/// The flagged EC round on 13 qubits with label prefix `ec`.
pub fn standalone_ec() -> Result<Circuit> {
    let mut c = Circuit::new(13)?;
    ec_round(&mut c, &LOCAL_DATA, &LOCAL_ANC, true, 1, "ec")?;
    Ok(c)
}

/// Six outcome bits of an extraction round, in `ANC_LABELS` order.
pub fn round_signature(c: &Circuit, flips: &[bool], p: &str) -> Result<u8> {
    let mut s = 0u8;
    for (i, l) in ANC_LABELS.iter().enumerate() {
        let idx = c
            .measure_index(&format!("{p}_{l}"))
            .ok_or_else(|| Error::Circuit(format!("missing label {p}_{l}")))?;
        s |= (flips[idx] as u8) << i;
    }
    Ok(s)
}

/// Correction tables for the flagged EC round.
///
/// The X correction is a function of the three Z-check outcomes and the Z
/// correction of the three X-check outcomes, so one Pauli type never steers
/// the correction of the other. The final transversal readout measures the
/// syndrome again, so a correction only has to avoid turning an order-1
/// event into an undetectable logical error; leftovers with a nonzero
/// syndrome are discarded as leakage.
///
/// Events are every single-qubit error entering the round and every single
/// fault inside it. For each key the correction minimises (logical errors,
/// incoming errors not removed, leaks, weight), ties to the smaller mask
/// with qubit 1 as the top bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EcDecoder {
    x_table: [u8; 8],
    z_table: [u8; 8],
    x_unsafe: usize,
    z_unsafe: usize,
}

/// Best correction per key; counts keys where some event still ends in an
/// undetectable logical error.
fn choose(events: &[Vec<(u8, bool)>; 8], unsafe_keys: &mut usize) -> [u8; 8] {
    let mut table = [0u8; 8];
    for (key, cands) in events.iter().enumerate() {
        if cands.is_empty() {
            continue;
        }
        let score = |c: u8| {
            let (mut bad, mut missed, mut leaks) = (0, 0, 0);
            for &(r, incoming) in cands {
                let e = r ^ c;
                let clean = syndrome_bits(e, 0) == 0 && x_logical_parity(e) == 0;
                if syndrome_bits(e, 0) != 0 {
                    leaks += 1;
                } else if x_logical_parity(e) != 0 {
                    bad += 1;
                }
                if incoming && !clean {
                    missed += 1;
                }
            }
            (bad, missed, leaks, c.count_ones(), c.reverse_bits())
        };
        let best = (0u8..128).min_by_key(|&c| score(c)).expect("nonempty");
        if score(best).0 > 0 {
            *unsafe_keys += 1;
        }
        table[key] = best;
    }
    table
}

impl EcDecoder {
    pub fn build(_code: &Code, dec: &DecoderTable) -> Result<Self> {
        let c = standalone_ec()?;
        let out = c.cut_index("ec_out").expect("cut");
        let mut xs: [Vec<(u8, bool)>; 8] = Default::default();
        let mut zs: [Vec<(u8, bool)>; 8] = Default::default();
        let mut record = |eff: &crate::circuit::PropagatedEffect, incoming: bool| -> Result<()> {
            let s = round_signature(&c, &eff.flips, "ec")?;
            let (x, z) = block_bits(&eff.residuals[out], &LOCAL_DATA);
            xs[(s >> 3) as usize].push((x, incoming));
            // self-dual code: Z parts use the same face masks
            zs[(s & 7) as usize].push((z, incoming));
            Ok(())
        };
        record(
            &c.propagate_with_initial(&PauliString::identity(13)?, &[])?,
            true,
        )?;
        for q in 0..7 {
            for p in [Pauli1::X, Pauli1::Y, Pauli1::Z] {
                let e = PauliString::single(13, q, p)?;
                record(&c.propagate_with_initial(&e, &[])?, true)?;
            }
        }
        for s in 0..c.fault_sites().len() {
            for k in 0..15 {
                record(&c.propagate_fault(s, k)?, false)?;
            }
        }
        let (mut x_unsafe, mut z_unsafe) = (0, 0);
        let x_table = choose(&xs, &mut x_unsafe);
        let z_table = choose(&zs, &mut z_unsafe);
        // a single data error must be corrected exactly
        for q in 0..7 {
            let syn = syndrome_bits(1 << q, 0) >> 3;
            debug_assert_eq!(x_table[syn as usize], dec.x_correction(syn));
        }
        Ok(EcDecoder {
            x_table,
            z_table,
            x_unsafe,
            z_unsafe,
        })
    }

    /// `(x, z)` correction for the six round outcomes.
    pub fn correction(&self, sig: u8) -> (u8, u8) {
        (
            self.x_table[(sig >> 3 & 7) as usize],
            self.z_table[(sig & 7) as usize],
        )
    }

    /// Keys where some order-1 event still ends in an undetectable logical
    /// X error after correction.
    pub fn x_unsafe(&self) -> usize {
        self.x_unsafe
    }
    pub fn z_unsafe(&self) -> usize {
        self.z_unsafe
    }
}

fn mask_text(x: u8, z: u8) -> String {
    let s = to_pauli7(x, z).to_text();
    s.trim_start_matches('+').to_string()
}

/// Human-readable generator, decoder and EC tables.
pub fn tables_text(code: &Code, dec: &DecoderTable, ec: &EcDecoder) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Steane [[7,1,3]] tables (qubits 1-based)");
    let _ = writeln!(
        s,
        "# generators (X-red, X-green, X-blue, Z-red, Z-green, Z-blue)"
    );
    for (i, g) in code.generators.iter().enumerate() {
        let _ = writeln!(
            s,
            "{} {} {}",
            if i < 3 { "X" } else { "Z" },
            FACE_NAMES[i % 3],
            g.to_text()
        );
    }
    let _ = writeln!(s, "XL {}", code.x_logical.to_text());
    let _ = writeln!(s, "ZL {}", code.z_logical.to_text());
    let _ = writeln!(s, "YL {}", code.y_logical.to_text());
    let _ = writeln!(s, "# decoder: syndrome bits (X-red..Z-blue) -> correction");
    for syn in 0u8..64 {
        let bits: String = (0..6)
            .map(|i| if syn >> i & 1 == 1 { '1' } else { '0' })
            .collect();
        let (x, z) = dec.decode_bits(syn);
        let _ = writeln!(s, "{bits} {}", mask_text(x, z));
    }
    let f = |v: usize| -> String {
        (0..3)
            .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    };
    let _ = writeln!(s, "# flagged EC, X part: Z-check bits -> correction");
    for (k, &x) in ec.x_table.iter().enumerate() {
        let _ = writeln!(s, "{} {}", f(k), mask_text(x, 0));
    }
    let _ = writeln!(s, "# flagged EC, Z part: X-check bits -> correction");
    for (k, &z) in ec.z_table.iter().enumerate() {
        let _ = writeln!(s, "{} {}", f(k), mask_text(0, z));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p7(s: &str) -> PauliString {
        PauliString::parse(7, s).unwrap()
    }

    #[test]
    fn generators_and_logicals_consistent() {
        let code = Code::steane();
        for a in &code.generators {
            for b in &code.generators {
                assert!(a.commutes(b).unwrap());
            }
            assert!(a.commutes(&code.x_logical).unwrap());
            assert!(a.commutes(&code.z_logical).unwrap());
        }
        assert!(!code.x_logical.commutes(&code.z_logical).unwrap());
        assert_eq!(code.z_logical.to_text(), "+Z2Z5Z7");
    }

    #[test]
    fn distance_three() {
        let code = Code::steane();
        let mut min = 7;
        for x in 0u8..128 {
            for z in 0u8..128 {
                if syndrome_bits(x, z) == 0 && logical_class(&code, &to_pauli7(x, z)) != Pauli1::I {
                    min = min.min(weight7(x, z));
                }
            }
        }
        assert_eq!(min, 3);
    }

    #[test]
    fn syndrome_examples() {
        assert_eq!(syndrome(&p7("Z2Z5Z7")).unwrap(), 0);
        // X1 lies on red and blue faces
        assert_eq!(syndrome(&p7("X1")).unwrap(), 0b101_000);
    }

    #[test]
    fn single_qubit_errors_decoded_exactly() {
        let dec = DecoderTable::build();
        assert!(dec.decode(0).is_identity());
        for q in 0..7 {
            for p in [Pauli1::X, Pauli1::Y, Pauli1::Z] {
                let e = PauliString::single(7, q, p).unwrap();
                assert_eq!(dec.decode(syndrome(&e).unwrap()), e);
            }
        }
    }

    #[test]
    fn corrections_clear_syndromes() {
        let dec = DecoderTable::build();
        for x in 0u8..128 {
            for z in 0u8..128 {
                let (cx, cz) = dec.decode_bits(syndrome_bits(x, z));
                assert_eq!(syndrome_bits(x ^ cx, z ^ cz), 0);
            }
        }
    }

    #[test]
    fn frame_reduction_examples() {
        let code = Code::steane();
        let dec = DecoderTable::build();
        let r = logical_frame_reduce(&code, &dec, &p7("Z2Z5Z7")).unwrap();
        assert_eq!((r.syndrome, r.class, r.phase), (0, Pauli1::Z, 0));
        // X1 Z4 Z5 = Y1 Z_L up to stabilisers and phase
        let r = logical_frame_reduce(&code, &dec, &p7("X1Z4Z5")).unwrap();
        assert_eq!(r.rep.to_text(), "+Y1");
        assert_eq!(r.class, Pauli1::Z);
        for g in &code.generators {
            let r = logical_frame_reduce(&code, &dec, g).unwrap();
            assert_eq!((r.syndrome, r.class, r.phase), (0, Pauli1::I, 0));
        }
        // Z5 Y7 = Z2 X7 Z_L from the encoder hook
        let a = logical_frame_reduce(&code, &dec, &p7("Z5Y7")).unwrap();
        let b = logical_frame_reduce(&code, &dec, &p7("Z2X7")).unwrap();
        assert_eq!(a.syndrome, b.syndrome);
        assert_eq!(
            logical_class(&code, &a.rep.multiply(&p7("Z5Y7")).unwrap()),
            logical_class(
                &code,
                &b.rep
                    .multiply(&p7("Z2X7"))
                    .unwrap()
                    .multiply(&code.z_logical)
                    .unwrap()
            )
        );
    }

    #[test]
    fn frame_reduction_reassembles() {
        let code = Code::steane();
        let dec = DecoderTable::build();
        for (x, z) in [(3u8, 5u8), (0x7f, 0x11), (0x52, 0x52), (9, 0)] {
            let e = to_pauli7(x, z);
            let r = logical_frame_reduce(&code, &dec, &e).unwrap();
            let back = r
                .rep
                .multiply(&code.stabilizer(r.stabilizer))
                .unwrap()
                .multiply(&code.logical(r.class))
                .unwrap();
            let back = back.with_phase((back.phase() + r.phase) % 4);
            assert_eq!(back, e);
        }
    }

    #[test]
    fn transversal_h_swaps_check_types() {
        let g = transversal(&[LogicalGate::H], &LOCAL_DATA);
        for (x, z) in [(1u8, 0u8), (0, 6), (5, 9)] {
            let mut e = to_pauli7(x, z);
            for h in &g {
                e = e.conjugate(h).unwrap();
            }
            let (s0, s1) = (syndrome_bits(x, z), syndrome(&e).unwrap());
            assert_eq!(s1, (s0 >> 3) | ((s0 & 7) << 3));
        }
    }

    #[test]
    fn plain_round_has_24_cnots() {
        assert_eq!(plain_round_cnots().len(), 24);
    }

    #[test]
    fn ec_decoder_is_safe_for_the_readout() {
        let code = Code::steane();
        let dec = DecoderTable::build();
        let ec = EcDecoder::build(&code, &dec).unwrap();
        assert_eq!(ec.x_unsafe(), 0);
        assert_eq!(ec.correction(0), (0, 0));
        for q in 0..7u8 {
            let syn = syndrome_bits(1 << q, 0);
            assert_eq!(ec.correction(syn).0, 1 << q);
        }
    }
}
