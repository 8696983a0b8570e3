//! The full tomography gadget: circuit assembly, reduced effects, exhaustive
//! enumeration and per-circuit tallies.
//!
//! Twenty physical circuits share one list of fault sites: four input
//! preparations times five readout rotations. A fault's footprint on all of
//! them is packed into one `ReducedEffect`, so composing a configuration is a
//! handful of XORs.
//!
//! Counts are binned by fault order `k` and, for every bias set, by the
//! number of high-rate Paulis in the configuration. Every (eta, p) point of
//! a set is then a weighted sum over the same integer counts.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Basis, Circuit, PropagatedEffect};
use crate::enumerate::{config_count, truncated_mass};
use crate::error::{Error, Result};
use crate::logical::{basis_index, variant, InputState, LogicalModel, BASES, VARIANTS};
use crate::noise::{BiasSet, NoiseSpec};
use crate::steane::{
    block_bits, check_0m, check_tm, ec_round, ed_modified, encode_t, encode_zero, logical_class,
    round_signature, syndrome_bits, transversal, x_logical_parity, Code, DecoderTable, EcDecoder,
};

pub const TAG_STATE_PREP: u8 = 0;
pub const TAG_MAGIC_PREP: u8 = 1;
pub const TAG_INJECTION: u8 = 2;
pub const TAG_EC: u8 = 3;

pub const N_QUBITS: usize = 35;
pub const COMP: [usize; 7] = [0, 1, 2, 3, 4, 5, 6];
pub const MAGIC: [usize; 7] = [7, 8, 9, 10, 11, 12, 13];
pub const ZERO_ANC: usize = 14;
pub const TM_ANC: usize = 15;
pub const TM_FLAG: usize = 16;
pub const ED_COMP: [usize; 6] = [17, 18, 19, 20, 21, 22];
pub const ED_MAGIC: [usize; 6] = [23, 24, 25, 26, 27, 28];
pub const EC_ANC: [usize; 6] = [29, 30, 31, 32, 33, 34];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NoisyFlags {
    pub stabilizer_state_prep: bool,
    pub magic_prep: bool,
    pub injection_cnot: bool,
    pub error_correction: bool,
}

impl NoisyFlags {
    pub const ALL: NoisyFlags = NoisyFlags {
        stabilizer_state_prep: true,
        magic_prep: true,
        injection_cnot: true,
        error_correction: true,
    };
    pub const NONE: NoisyFlags = NoisyFlags {
        stabilizer_state_prep: false,
        magic_prep: false,
        injection_cnot: false,
        error_correction: false,
    };
    pub const MAGIC_ONLY: NoisyFlags = NoisyFlags {
        magic_prep: true,
        ..NoisyFlags::NONE
    };
    /// State preparation and EC ideal.
    pub const MAGIC_AND_INJECTION: NoisyFlags = NoisyFlags {
        magic_prep: true,
        injection_cnot: true,
        ..NoisyFlags::NONE
    };

    pub fn enabled(&self, tag: u8) -> bool {
        match tag {
            TAG_STATE_PREP => self.stabilizer_state_prep,
            TAG_MAGIC_PREP => self.magic_prep,
            TAG_INJECTION => self.injection_cnot,
            TAG_EC => self.error_correction,
            _ => false,
        }
    }

    /// Compact key: one letter per noisy component (S, M, I, E), or "none".
    pub fn key(&self) -> String {
        let mut s = String::new();
        for (on, c) in [
            (self.stabilizer_state_prep, 'S'),
            (self.magic_prep, 'M'),
            (self.injection_cnot, 'I'),
            (self.error_correction, 'E'),
        ] {
            if on {
                s.push(c);
            }
        }
        if s.is_empty() {
            s.push_str("none");
        }
        s
    }

    pub fn parse_key(s: &str) -> Result<Self> {
        let mut f = NoisyFlags::NONE;
        if s == "none" {
            return Ok(f);
        }
        for c in s.chars() {
            match c {
                'S' => f.stabilizer_state_prep = true,
                'M' => f.magic_prep = true,
                'I' => f.injection_cnot = true,
                'E' => f.error_correction = true,
                _ => return Err(Error::Config(format!("bad flag key {s:?}"))),
            }
        }
        Ok(f)
    }
}

impl fmt::Display for NoisyFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// One physical tomography circuit: input state, readout basis, and the
/// magic outcome the readout rotation was chosen for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TomographyId {
    pub state: InputState,
    pub basis: Basis,
    pub branch: bool,
}

impl TomographyId {
    pub fn variant(&self) -> usize {
        variant(self.basis, self.branch)
    }
}

impl fmt::Display for TomographyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{:?}/m{}",
            self.state.name(),
            self.basis,
            self.branch as u8
        )
    }
}

pub const REJECT_LABELS: [&str; 14] = [
    "zero_check",
    "edc_x0",
    "edc_x1",
    "edc_x2",
    "edc_z0",
    "edc_z1",
    "edc_z2",
    "tm_flag",
    "edm_x0",
    "edm_x1",
    "edm_x2",
    "edm_z0",
    "edm_z1",
    "edm_z2",
];

/// The gadget on 35 qubits for input `state` and readout rotation `variant`
/// (an index into `logical::VARIANTS`).
pub fn build_gadget_circuit(state: InputState, var: usize, flags: NoisyFlags) -> Result<Circuit> {
    if var >= VARIANTS.len() {
        return Err(Error::TomographyId(format!("variant {var}")));
    }
    let mut c = Circuit::new(N_QUBITS)?;
    let sp = flags.stabilizer_state_prep;
    let mp = flags.magic_prep;
    encode_zero(&mut c, &COMP, sp, TAG_STATE_PREP)?;
    check_0m(&mut c, &COMP, ZERO_ANC, sp, TAG_STATE_PREP, "zero_check")?;
    ed_modified(&mut c, &COMP, &ED_COMP, sp, TAG_STATE_PREP, "edc")?;
    c.cut("comp_ready")?;
    c.gates(transversal(state.prep(), &COMP))?;

    encode_t(&mut c, &MAGIC, mp, TAG_MAGIC_PREP)?;
    check_tm(&mut c, &MAGIC, TM_ANC, TM_FLAG, mp, TAG_MAGIC_PREP, "tm")?;
    ed_modified(&mut c, &MAGIC, &ED_MAGIC, mp, TAG_MAGIC_PREP, "edm")?;
    c.cut("magic_ready")?;

    for i in 0..7 {
        c.cnot(COMP[i], MAGIC[i], flags.injection_cnot, TAG_INJECTION)?;
    }
    c.cut("magic_pre_meas")?;
    for (i, &q) in MAGIC.iter().enumerate() {
        c.measure(q, Basis::Z, &format!("mz{}", i + 1))?;
    }
    c.gates(transversal(VARIANTS[var], &COMP))?;
    c.cut("comp_pre_ec")?;
    ec_round(&mut c, &COMP, &EC_ANC, flags.error_correction, TAG_EC, "ec")?;
    for (i, &q) in COMP.iter().enumerate() {
        c.measure(q, Basis::Z, &format!("fz{}", i + 1))?;
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// Reduced effects.
//
// word 0: bits 0..14 reject, 14 check sign t, 15..17 magic logical class
//         before the check (x, z), 17 + 7 s .. magic readout flips per input.
// words 1..5: twenty 10-bit fields, six per word, field s * 5 + v: EC
//         outcome bits (6), then the data X syndrome (3) and logical parity
//         (1) after the EC round.

pub const WORDS: usize = 5;
const REJECT_MASK: u64 = (1 << 14) - 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ReducedEffect(pub [u64; WORDS]);

impl ReducedEffect {
    #[inline(always)]
    pub fn xor(&self, o: &Self) -> Self {
        let mut w = self.0;
        for i in 0..WORDS {
            w[i] ^= o.0[i];
        }
        ReducedEffect(w)
    }

    pub fn reject_bits(&self) -> u16 {
        (self.0[0] & REJECT_MASK) as u16
    }

    pub fn t(&self) -> bool {
        self.0[0] >> 14 & 1 == 1
    }

    /// Logical class index (I, X, Y, Z) of the magic block before its check.
    pub fn magic_class(&self) -> usize {
        CLASS_OF_BITS[(self.0[0] >> 15 & 3) as usize]
    }

    pub fn magic_flips(&self, s: usize) -> u8 {
        (self.0[0] >> (17 + 7 * s) & 127) as u8
    }

    /// Adds an X pattern to the magic readout of every input.
    pub fn with_magic_flips(mut self, mask: u8) -> Self {
        for s in 0..4 {
            self.0[0] ^= u64::from(mask & 127) << (17 + 7 * s);
        }
        self
    }

    #[inline(always)]
    pub fn field(&self, s: usize, v: usize) -> u32 {
        let f = s * 5 + v;
        (self.0[1 + f / 6] >> (10 * (f % 6)) & 0x3FF) as u32
    }

    fn set_field(&mut self, s: usize, v: usize, val: u32) {
        let f = s * 5 + v;
        self.0[1 + f / 6] |= u64::from(val) << (10 * (f % 6));
    }
}

/// (x, z) anticommutation bits to class index I=0, X=1, Y=2, Z=3.
const CLASS_OF_BITS: [usize; 4] = [0, 1, 3, 2];

pub const N_CLASSES: usize = 4 * 2 * 2 * 243;
const POW3: [u16; 5] = [1, 3, 9, 27, 81];
pub const LEAK: u8 = 2;

/// Packs the effects of one fault on all twenty circuits.
struct Packer {
    reject: Vec<usize>,
    t: usize,
    tm_pre: usize,
    mz: Vec<usize>,
    out: usize,
}

impl Packer {
    fn new(c: &Circuit) -> Result<Self> {
        let m = |l: &str| {
            c.measure_index(l)
                .ok_or_else(|| Error::Circuit(format!("missing {l}")))
        };
        let k = |l: &str| {
            c.cut_index(l)
                .ok_or_else(|| Error::Circuit(format!("missing {l}")))
        };
        Ok(Packer {
            reject: REJECT_LABELS.iter().map(|l| m(l)).collect::<Result<_>>()?,
            t: m("tm_t")?,
            tm_pre: k("tm_pre")?,
            mz: (1..=7)
                .map(|i| m(&format!("mz{i}")))
                .collect::<Result<_>>()?,
            out: k("ec_out")?,
        })
    }

    fn common(&self, code: &Code, e: &PropagatedEffect, into: &mut ReducedEffect) {
        for (i, &r) in self.reject.iter().enumerate() {
            into.0[0] |= (e.flips[r] as u64) << i;
        }
        into.0[0] |= (e.flips[self.t] as u64) << 14;
        let (x, z) = block_bits(&e.residuals[self.tm_pre], &MAGIC);
        let p = crate::pauli::PauliString::from_bits(7, x.into(), z.into(), 0).expect("seven");
        let (xb, zb) = logical_class(code, &p).bits();
        into.0[0] |= ((xb as u64) | (zb as u64) << 1) << 15;
    }

    fn readout(&self, s: usize, e: &PropagatedEffect, into: &mut ReducedEffect) {
        for (i, &r) in self.mz.iter().enumerate() {
            into.0[0] |= (e.flips[r] as u64) << (17 + 7 * s + i);
        }
    }

    fn post(
        &self,
        c: &Circuit,
        s: usize,
        v: usize,
        e: &PropagatedEffect,
        into: &mut ReducedEffect,
    ) -> Result<()> {
        let sig = round_signature(c, &e.flips, "ec")? as u32;
        let (x, _) = block_bits(&e.residuals[self.out], &COMP);
        let data = (u32::from(syndrome_bits(x, 0) >> 3)) | (u32::from(x_logical_parity(x)) << 3);
        into.set_field(s, v, sig | data << 6);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SiteInfo {
    pub tag: u8,
    pub control: usize,
    pub target: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CircuitTally {
    pub accept: f64,
    pub leak: f64,
    pub outcome: [f64; 2],
}

impl CircuitTally {
    fn add(&mut self, o: &CircuitTally) {
        self.accept += o.accept;
        self.leak += o.leak;
        self.outcome[0] += o.outcome[0];
        self.outcome[1] += o.outcome[1];
    }
}

/// Probability masses per (input, basis, recorded magic outcome).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tallies {
    /// Mass of every enumerated configuration.
    pub total: f64,
    pub per: Vec<CircuitTally>,
}

impl Tallies {
    pub fn new(total: f64) -> Self {
        Tallies {
            total,
            per: vec![CircuitTally::default(); 24],
        }
    }

    fn slot(s: usize, beta: usize, b: usize) -> usize {
        (s * 3 + beta) * 2 + b
    }

    /// Non-adaptive circuit: readout rotation fixed for branch `b`, shots
    /// kept only when the recorded outcome is `b`.
    pub fn branch(&self, s: usize, beta: usize, b: usize) -> &CircuitTally {
        &self.per[Self::slot(s, beta, b)]
    }

    /// Adaptive circuit: both recorded outcomes kept.
    pub fn adaptive(&self, s: usize, beta: usize) -> CircuitTally {
        let mut t = self.branch(s, beta, 0).clone();
        t.add(self.branch(s, beta, 1));
        t
    }

    pub fn reject(&self, s: usize, beta: usize) -> f64 {
        let t = self.adaptive(s, beta);
        self.total - t.accept - t.leak
    }

    /// Keyed by tomography circuit, e.g. `+/X/m1`.
    pub fn by_circuit(&self) -> BTreeMap<String, CircuitTally> {
        let mut m = BTreeMap::new();
        for (s, &state) in InputState::ALL.iter().enumerate() {
            for (beta, &basis) in BASES.iter().enumerate() {
                for b in 0..2 {
                    let id = TomographyId {
                        state,
                        basis,
                        branch: b == 1,
                    };
                    m.insert(id.to_string(), self.branch(s, beta, b).clone());
                }
            }
        }
        m
    }
}

pub struct Gadget {
    flags: NoisyFlags,
    sites: Vec<SiteInfo>,
    effects: Vec<[ReducedEffect; 15]>,
    model: LogicalModel,
    flipm: [u8; 128],
    out_lut: Vec<u8>,
}

impl Gadget {
    pub fn new(flags: NoisyFlags) -> Result<Self> {
        let code = Code::steane();
        let dec = DecoderTable::build();
        let ec = EcDecoder::build(&code, &dec)?;
        Self::with_decoders(flags, &code, &dec, &ec)
    }

    pub fn with_decoders(
        flags: NoisyFlags,
        code: &Code,
        dec: &DecoderTable,
        ec: &EcDecoder,
    ) -> Result<Self> {
        let mut circuits = Vec::with_capacity(20);
        for s in InputState::ALL {
            for v in 0..VARIANTS.len() {
                circuits.push(build_gadget_circuit(s, v, NoisyFlags::ALL)?);
            }
        }
        let base = &circuits[0];
        let packer = Packer::new(base)?;
        let all_sites = base.fault_sites().len();
        for c in &circuits {
            if c.fault_sites().len() != all_sites {
                return Err(Error::Circuit(
                    "tomography circuits disagree on fault sites".into(),
                ));
            }
        }
        let mut sites = Vec::new();
        let mut effects = Vec::new();
        for (si, site) in base.fault_sites().iter().enumerate() {
            if !flags.enabled(site.tag) {
                continue;
            }
            let (control, target) = base.site_qubits(si)?;
            sites.push(SiteInfo {
                tag: site.tag,
                control,
                target,
            });
            let mut row = [ReducedEffect::default(); 15];
            for (k, slot) in row.iter_mut().enumerate() {
                for (ci, c) in circuits.iter().enumerate() {
                    let (s, v) = (ci / 5, ci % 5);
                    let e = c.propagate_fault(si, k)?;
                    if ci == 0 {
                        packer.common(code, &e, slot);
                    }
                    if v == 0 {
                        packer.readout(s, &e, slot);
                    }
                    packer.post(c, s, v, &e, slot)?;
                }
            }
            effects.push(row);
        }

        let mut flipm = [0u8; 128];
        for (m, slot) in flipm.iter_mut().enumerate() {
            let m = m as u8;
            let corr = dec.x_correction(syndrome_bits(m, 0) >> 3);
            *slot = x_logical_parity(m ^ corr);
        }
        let mut out_lut = vec![0u8; 1 << 10];
        for (f, slot) in out_lut.iter_mut().enumerate() {
            let (cx, _) = ec.correction((f & 63) as u8);
            let syn = (f >> 6 & 7) as u8 ^ (syndrome_bits(cx, 0) >> 3);
            let par = (f >> 9 & 1) as u8 ^ x_logical_parity(cx);
            *slot = if syn != 0 { LEAK } else { par };
        }
        Ok(Gadget {
            flags,
            sites,
            effects,
            model: LogicalModel::build(),
            flipm,
            out_lut,
        })
    }

    pub fn flags(&self) -> NoisyFlags {
        self.flags
    }
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }
    pub fn sites(&self) -> &[SiteInfo] {
        &self.sites
    }
    pub fn effect(&self, site: usize, pauli: usize) -> &ReducedEffect {
        &self.effects[site][pauli]
    }
    pub fn model(&self) -> &LogicalModel {
        &self.model
    }

    /// Outcome of readout variant `v` for input `s`: 0, 1 (logical flip) or
    /// `LEAK`.
    pub fn readout_outcome(&self, e: &ReducedEffect, s: usize, v: usize) -> u8 {
        self.out_lut[e.field(s, v) as usize]
    }

    /// Whether the recorded magic outcome is flipped for input `s`.
    pub fn magic_flip(&self, e: &ReducedEffect, s: usize) -> u8 {
        self.flipm[e.magic_flips(s) as usize]
    }

    #[inline(always)]
    fn classes(&self, e: &ReducedEffect) -> [u16; 4] {
        let w0 = e.0[0];
        let lt = (CLASS_OF_BITS[(w0 >> 15 & 3) as usize] as u16) * 2 + (w0 >> 14 & 1) as u16;
        let mut out = [0u16; 4];
        for (s, slot) in out.iter_mut().enumerate() {
            let fm = self.flipm[(w0 >> (17 + 7 * s) & 127) as usize] as u16;
            let mut c = (lt * 2 + fm) * 243;
            for v in 0..5 {
                c += self.out_lut[e.field(s, v) as usize] as u16 * POW3[v];
            }
            *slot = c;
        }
        out
    }

    fn add_class(&self, t: &mut Tallies, s: usize, class: usize, mass: f64) {
        let mut rest = class;
        let mut outs = [0u8; 5];
        for o in outs.iter_mut() {
            *o = (rest % 3) as u8;
            rest /= 3;
        }
        let fm = rest % 2;
        rest /= 2;
        let tt = rest % 2;
        let l = rest / 2;
        for (beta, &basis) in BASES.iter().enumerate() {
            for m in 0..2 {
                let b = m ^ fm;
                let out = outs[variant(basis, b == 1)];
                let slot = &mut t.per[Tallies::slot(s, beta, b)];
                for o in 0..2 {
                    let pr = self.model.prob(l, tt, s, beta, m, b, o) * mass;
                    if pr == 0.0 {
                        continue;
                    }
                    if out == LEAK {
                        slot.leak += pr;
                    } else {
                        slot.accept += pr;
                        slot.outcome[o ^ out as usize] += pr;
                    }
                }
            }
        }
    }

    /// Tallies of a single configuration with unit weight.
    pub fn evaluate(&self, e: &ReducedEffect) -> Tallies {
        let mut t = Tallies::new(1.0);
        if e.reject_bits() != 0 {
            return t;
        }
        for (s, c) in self.classes(e).iter().enumerate() {
            self.add_class(&mut t, s, *c as usize, 1.0);
        }
        t
    }

    /// Composed effect of `(site, pauli)` faults.
    pub fn compose(&self, faults: &[(usize, usize)]) -> ReducedEffect {
        faults
            .iter()
            .fold(ReducedEffect::default(), |acc, &(s, k)| {
                acc.xor(&self.effects[s][k])
            })
    }

    pub fn estimate(&self, order: usize) -> f64 {
        config_count(self.n_sites(), order)
    }

    /// Exhaustive enumeration to `order`, binned for every set in `sets`
    /// (two-qubit sets, at most four).
    pub fn enumerate(&self, order: usize, sets: &[BiasSet], workers: usize) -> Result<Counts> {
        if sets.is_empty() || sets.len() > 4 {
            return Err(Error::Noise(
                "between one and four bias sets per enumeration".into(),
            ));
        }
        if order > 3 {
            return Err(Error::Config(format!(
                "truncation order {order} not supported (max 3)"
            )));
        }
        for s in sets {
            if s.n() != 2 {
                return Err(Error::Noise("CNOT bias sets act on two qubits".into()));
            }
        }
        let started = Instant::now();
        let layout = PatternLayout::new(order, sets.len());
        let hc: [u32; 15] = std::array::from_fn(|k| {
            sets.iter()
                .enumerate()
                .map(|(i, s)| (s.contains_index(k) as u32) << (8 * i))
                .sum()
        });
        let sites: Vec<SiteGroups> = self
            .effects
            .iter()
            .map(|row| SiteGroups::new(row, &hc))
            .collect();
        let n = sites.len();
        let run = || {
            (0..n)
                .into_par_iter()
                .fold(
                    || Acc::new(&layout),
                    |mut acc, i| {
                        self.first_site(i, order, &sites, &layout, &mut acc);
                        acc
                    },
                )
                .reduce(|| Acc::new(&layout), Acc::merge)
        };
        let mut acc = if workers == 0 {
            run()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?
                .install(run)
        };
        let zero = self.classes(&ReducedEffect::default());
        for (s, c) in zero.iter().enumerate() {
            acc.data[layout.index(0, 0, s, *c as usize)] += 1;
        }
        Ok(Counts {
            order,
            n_sites: n,
            sets: sets.to_vec(),
            layout,
            data: acc.data,
            seconds: started.elapsed().as_secs_f64(),
        })
    }

    #[inline(always)]
    fn record(&self, acc: &mut Acc, layout: &PatternLayout, k: usize, hc: u32, e: &ReducedEffect) {
        let pat = layout.pattern(k, hc);
        let cls = self.classes(e);
        for (s, c) in cls.iter().enumerate() {
            acc.data[layout.index_pat(pat, s, *c as usize)] += 1;
        }
    }

    fn first_site(
        &self,
        i: usize,
        order: usize,
        sites: &[SiteGroups],
        layout: &PatternLayout,
        acc: &mut Acc,
    ) {
        let si = &sites[i];
        if order >= 1 {
            if let Some(g) = si.group(0) {
                for e in g {
                    self.record(acc, layout, 1, e.hc, &e.effect);
                }
            }
        }
        if order < 2 {
            return;
        }
        let mut pairs: Vec<Entry> = Vec::with_capacity(225);
        for j in i + 1..sites.len() {
            let sj = &sites[j];
            for (r, gi) in si.groups() {
                if let Some(gj) = sj.group(r) {
                    for a in gi {
                        for b in gj {
                            self.record(acc, layout, 2, a.hc + b.hc, &a.effect.xor(&b.effect));
                        }
                    }
                }
            }
            if order < 3 {
                continue;
            }
            pairs.clear();
            for a in &si.entries {
                for b in &sj.entries {
                    pairs.push(Entry {
                        rej: a.rej ^ b.rej,
                        hc: a.hc + b.hc,
                        effect: a.effect.xor(&b.effect),
                    });
                }
            }
            pairs.sort_by_key(|e| e.rej);
            for sl in &sites[j + 1..] {
                for (r, gl) in sl.groups() {
                    let lo = pairs.partition_point(|e| e.rej < r);
                    let hi = pairs.partition_point(|e| e.rej <= r);
                    for ab in &pairs[lo..hi] {
                        for c in gl {
                            self.record(acc, layout, 3, ab.hc + c.hc, &ab.effect.xor(&c.effect));
                        }
                    }
                }
            }
        }
    }

    /// Tallies for bias set `set` (an index into the enumeration's sets) at
    /// the given bias and error rate.
    pub fn tallies(&self, counts: &Counts, set: usize, eta: f64, p: f64) -> Result<Tallies> {
        let bs = counts
            .sets
            .get(set)
            .ok_or_else(|| Error::Noise(format!("set index {set}")))?;
        let spec = NoiseSpec::new(bs.clone(), eta, p)?;
        let (h, l) = spec.rates();
        let layout = &counts.layout;
        let mut mass = vec![0.0f64; 4 * N_CLASSES];
        for pat in 0..layout.len() {
            let (k, lanes) = layout.decode(pat);
            let a = lanes[set];
            let w = h.powi(a as i32)
                * l.powi((k - a) as i32)
                * (1.0 - p).powi((counts.n_sites - k) as i32);
            if w == 0.0 {
                continue;
            }
            let base = pat * 4 * N_CLASSES;
            for (m, &c) in mass
                .iter_mut()
                .zip(&counts.data[base..base + 4 * N_CLASSES])
            {
                if c != 0 {
                    *m += c as f64 * w;
                }
            }
        }
        let mut t = Tallies::new(truncated_mass(counts.n_sites, counts.order, p));
        for s in 0..4 {
            for class in 0..N_CLASSES {
                let m = mass[s * N_CLASSES + class];
                if m != 0.0 {
                    self.add_class(&mut t, s, class, m);
                }
            }
        }
        Ok(t)
    }

    /// Every single fault whose accepted, non-leaked outcome distribution
    /// differs from the ideal T gate for some tomography circuit.
    pub fn order_one_violations(&self) -> Vec<(usize, usize, TomographyId)> {
        let mut bad = Vec::new();
        for site in 0..self.n_sites() {
            for k in 0..15 {
                let t = self.evaluate(&self.effects[site][k]);
                for (si, &state) in InputState::ALL.iter().enumerate() {
                    for (beta, &basis) in BASES.iter().enumerate() {
                        let ideal = self.model.ideal(si, beta);
                        for b in 0..2 {
                            let c = t.branch(si, beta, b);
                            // branch b of the ideal circuit has mass 1/2
                            if c.accept <= 1e-15 {
                                continue;
                            }
                            let ok =
                                (0..2).all(|o| (c.outcome[o] / c.accept - ideal[o]).abs() < 1e-12);
                            if !ok {
                                bad.push((
                                    site,
                                    k,
                                    TomographyId {
                                        state,
                                        basis,
                                        branch: b == 1,
                                    },
                                ));
                            }
                        }
                    }
                }
            }
        }
        bad
    }
}

#[derive(Clone, Copy)]
struct Entry {
    rej: u16,
    hc: u32,
    effect: ReducedEffect,
}

struct SiteGroups {
    entries: Vec<Entry>,
    bounds: Vec<(u16, usize, usize)>,
}

impl SiteGroups {
    fn new(row: &[ReducedEffect; 15], hc: &[u32; 15]) -> Self {
        let mut entries: Vec<Entry> = (0..15)
            .map(|k| Entry {
                rej: row[k].reject_bits(),
                hc: hc[k],
                effect: row[k],
            })
            .collect();
        entries.sort_by_key(|e| e.rej);
        let mut bounds = Vec::new();
        let mut start = 0;
        for i in 1..=entries.len() {
            if i == entries.len() || entries[i].rej != entries[start].rej {
                bounds.push((entries[start].rej, start, i));
                start = i;
            }
        }
        SiteGroups { entries, bounds }
    }

    fn group(&self, r: u16) -> Option<&[Entry]> {
        self.bounds
            .iter()
            .find(|b| b.0 == r)
            .map(|&(_, a, b)| &self.entries[a..b])
    }

    fn groups(&self) -> impl Iterator<Item = (u16, &[Entry])> {
        self.bounds
            .iter()
            .map(|&(r, a, b)| (r, &self.entries[a..b]))
    }
}

/// Bins `(k, a_1, .., a_nsets)` laid out by order, then mixed radix `k + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternLayout {
    order: usize,
    nsets: usize,
    offsets: Vec<usize>,
    total: usize,
}

impl PatternLayout {
    fn new(order: usize, nsets: usize) -> Self {
        let mut offsets = Vec::new();
        let mut total = 0;
        for k in 0..=order {
            offsets.push(total);
            total += (k + 1).pow(nsets as u32);
        }
        PatternLayout {
            order,
            nsets,
            offsets,
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.total
    }
    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    #[inline(always)]
    fn pattern(&self, k: usize, hc: u32) -> usize {
        let mut idx = 0;
        for i in 0..self.nsets {
            idx = idx * (k + 1) + (hc >> (8 * i) & 0xff) as usize;
        }
        self.offsets[k] + idx
    }

    fn decode(&self, pat: usize) -> (usize, Vec<usize>) {
        let k = (0..=self.order)
            .rev()
            .find(|&k| self.offsets[k] <= pat)
            .expect("in range");
        let mut rest = pat - self.offsets[k];
        let mut lanes = vec![0; self.nsets];
        for i in (0..self.nsets).rev() {
            lanes[i] = rest % (k + 1);
            rest /= k + 1;
        }
        (k, lanes)
    }

    #[inline(always)]
    fn index_pat(&self, pat: usize, s: usize, class: usize) -> usize {
        (pat * 4 + s) * N_CLASSES + class
    }

    fn index(&self, k: usize, hc: u32, s: usize, class: usize) -> usize {
        self.index_pat(self.pattern(k, hc), s, class)
    }
}

struct Acc {
    data: Vec<u64>,
}

impl Acc {
    fn new(layout: &PatternLayout) -> Self {
        Acc {
            data: vec![0; layout.len() * 4 * N_CLASSES],
        }
    }

    fn merge(mut self, o: Acc) -> Acc {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += b;
        }
        self
    }
}

/// Exact configuration counts of one enumeration.
#[derive(Clone, Debug)]
pub struct Counts {
    pub order: usize,
    pub n_sites: usize,
    pub sets: Vec<BiasSet>,
    layout: PatternLayout,
    data: Vec<u64>,
    pub seconds: f64,
}

impl Counts {
    /// Total number of configurations accepted by every check, summed over
    /// inputs (each configuration counts once per input).
    pub fn accepted_configs(&self) -> u64 {
        self.data.iter().sum::<u64>() / 4
    }

    pub fn raw(&self) -> &[u64] {
        &self.data
    }
}

/// Index of a basis in tallies.
pub fn beta(b: Basis) -> usize {
    basis_index(b)
}
