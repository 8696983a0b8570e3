//! Self-checks run by the `verify` and `oracle-check` subcommands and by the
//! acceptance tests.

use std::fmt;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Basis, Circuit};
use crate::enumerate::{for_each_config, truncated_mass};
use crate::error::{Error, Result};
use crate::gadget::{Gadget, NoisyFlags, ReducedEffect};
use crate::noise::{channel_probs, NoiseSpec, Preset};
use crate::oracle::{gate_matrix, ptm_of_map, t_matrix, DenseState, DensityMatrix, Mat2};
use crate::pauli::{CliffordGate, PauliString};
use crate::steane::{
    block_bits, encode_t, encode_zero, standalone_ec, syndrome_bits, undetected_heavy,
    x_logical_parity, Code, DecoderTable, EcDecoder, EC_FLAGGED, ED_MODIFIED, LOCAL_DATA,
    LOGICAL_SUPPORT,
};
use crate::tomography::{
    analyse, compose, extract_noise, forward, ideal_t_ptm, pauli_channel_ptm, reconstruct_ptm,
    Mode, Ptm,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

pub fn max_abs_diff(a: &Ptm, b: &Ptm) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Every single fault in every tomography circuit leaves the accepted,
/// non-leaked outcome distribution ideal.
pub fn order_one(g: &Gadget) -> Check {
    let bad = g.order_one_violations();
    let detail = match bad.first() {
        None => format!("{} sites x 15 Paulis x 24 circuits clean", g.n_sites()),
        Some((s, k, id)) => format!(
            "{} violations, first site {s} pauli {k} circuit {id}",
            bad.len()
        ),
    };
    Check::new("order-1 fault tolerance", bad.is_empty(), detail)
}

/// Stabiliser algebra, decoder tables and the dense encoders agree.
pub fn code_consistency() -> Result<Check> {
    let code = Code::steane();
    let dec = DecoderTable::build();
    let ec = EcDecoder::build(&code, &dec)?;
    let mut problems = Vec::new();
    for g in &code.generators {
        for h in &code.generators {
            if !g.commutes(h)? {
                problems.push(format!("{g} and {h} anticommute"));
            }
        }
        for l in [&code.x_logical, &code.z_logical] {
            if !g.commutes(l)? {
                problems.push(format!("{g} anticommutes with logical {l}"));
            }
        }
    }
    if code.x_logical.commutes(&code.z_logical)? {
        problems.push("X_L and Z_L commute".into());
    }
    for q in 0..7 {
        for (x, z) in [(1u8 << q, 0u8), (0, 1 << q), (1 << q, 1 << q)] {
            let (cx, cz) = dec.decode_bits(syndrome_bits(x, z));
            if syndrome_bits(cx ^ x, cz ^ z) != 0 || code.min_weight_in_class(cx ^ x, cz ^ z) != 0 {
                problems.push(format!("decoder fails on single error ({x:07b}, {z:07b})"));
            }
        }
        let (ex, _) = ec.correction(syndrome_bits(1 << q, 0));
        if ex != 1 << q {
            problems.push(format!("EC table does not correct X{}", q + 1));
        }
    }
    if ec.x_unsafe() != 0 {
        problems.push(format!("{} unsafe EC X keys", ec.x_unsafe()));
    }
    for (name, magic) in [("encode_zero", false), ("encode_t", true)] {
        let mut c = Circuit::new(7)?;
        if magic {
            encode_t(&mut c, &LOCAL_DATA, true, 0)?;
        } else {
            encode_zero(&mut c, &LOCAL_DATA, true, 0)?;
        }
        let s = crate::oracle::run_unitary_part(&c)?;
        for g in &code.generators {
            if (s.expectation(g)? - 1.0).abs() > 1e-12 {
                problems.push(format!("{name}: <{g}> != 1"));
            }
        }
    }
    let pass = problems.is_empty();
    let detail = if pass {
        "generators, decoders and encoders consistent".into()
    } else {
        problems.join("; ")
    };
    Ok(Check::new("code self-consistency", pass, detail))
}

/// The flagged EC round lets the X6 Z7 hook through undetected; the
/// modified ED round catches every correlated order-1 fault.
pub fn hook_discrimination() -> Result<Check> {
    let hook = PauliString::parse(7, "X6Z7")?;
    let ec = undetected_heavy(&EC_FLAGGED)?;
    let ed = undetected_heavy(&ED_MODIFIED)?;
    let ec_misses = ec.iter().any(|b| b.2 == hook);
    let pass = ec_misses && ed.is_empty();
    Ok(Check::new(
        "hook fault discrimination",
        pass,
        format!("flagged EC: {} undetected weight-2 faults (X6Z7 among them: {ec_misses}); modified ED: {}", ec.len(), ed.len()),
    ))
}

/// The p = 0 gadget reconstructs as a noiseless T gate.
pub fn zero_noise(g: &Gadget) -> Result<Check> {
    let counts = g.enumerate(1, &[Preset::Z.set()], 0)?;
    let r = analyse(&g.tallies(&counts, 0, 1.0, 0.0)?, Mode::Adaptive)?;
    let dev = max_abs_diff(&r.ptm, &ideal_t_ptm());
    let m = &r.metrics;
    let pass = dev < 1e-12
        && m.r_proc.abs() < 1e-12
        && (m.accept_rate - 1.0).abs() < 1e-12
        && m.leak_rate == 0.0;
    Ok(Check::new(
        "zero noise",
        pass,
        format!("|R - R_T| = {dev:.1e}, r_proc = {:.1e}", m.r_proc),
    ))
}

/// A forced X_L on the magic block before its readout gives
/// `E(rho) = (rho + Z rho Z) / 2`.
pub fn misapplication(g: &Gadget) -> Result<Check> {
    let e = ReducedEffect::default().with_magic_flips(LOGICAL_SUPPORT);
    let r = analyse(&g.evaluate(&e), Mode::Adaptive)?;
    let expected = compose(&pauli_channel_ptm(0.0, 0.0, 0.5), &ideal_t_ptm());
    let dev = max_abs_diff(&r.ptm, &expected);
    let m = &r.metrics;
    let pass = dev <= 1e-10
        && (m.p_zl - 0.5).abs() <= 1e-10
        && m.p_xl.abs() <= 1e-10
        && m.p_yl.abs() <= 1e-10;
    Ok(Check::new(
        "misapplication channel",
        pass,
        format!("|R - R_closed| = {dev:.1e}, p_ZL = {:.12}", m.p_zl),
    ))
}

/// Only the magic preparation noisy: the logical noise is pure dephasing.
pub fn magic_prep_dephasing(order: usize, etas: &[f64], p: f64) -> Result<Check> {
    let g = Gadget::new(NoisyFlags::MAGIC_ONLY)?;
    let sets: Vec<_> = Preset::ALL.iter().map(|s| s.set()).collect();
    let counts = g.enumerate(order, &sets, 0)?;
    let mut worst: f64 = 0.0;
    let mut min_pz = f64::INFINITY;
    for (i, _) in Preset::ALL.iter().enumerate() {
        for &eta in etas {
            let m = analyse(&g.tallies(&counts, i, eta, p)?, Mode::Adaptive)?.metrics;
            worst = worst.max(m.p_xl.abs()).max(m.p_yl.abs());
            min_pz = min_pz.min(m.p_zl);
        }
    }
    let pass = worst <= 1e-12 && min_pz > 0.0;
    Ok(Check::new(
        "magic-prep-only dephasing",
        pass,
        format!("max |p_XL|, |p_YL| = {worst:.1e}, min p_ZL = {min_pz:.3e} over sets Z X Y M"),
    ))
}

/// `n` random Pauli channels composed with T survive forward model and
/// reconstruction.
pub fn ptm_round_trip(n: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let scale: f64 = rng.random_range(0.0..0.5);
        let w: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>());
        let s: f64 = w.iter().sum();
        let (px, py, pz) = (scale * w[0] / s, scale * w[1] / s, scale * w[2] / s);
        let r = compose(&pauli_channel_ptm(px, py, pz), &ideal_t_ptm());
        let back = reconstruct_ptm(&forward(&r))?;
        let m = extract_noise(&back)?;
        worst = worst
            .max(max_abs_diff(&back, &r))
            .max((m.p_xl - px).abs())
            .max((m.p_yl - py).abs())
            .max((m.p_zl - pz).abs());
    }
    Ok(Check::new(
        "PTM round trip",
        worst <= 1e-10,
        format!("{n} random channels, max deviation {worst:.1e}"),
    ))
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn pure(amp: [C64; 2]) -> Result<DensityMatrix> {
    DensityMatrix::from_state(&DenseState::from_amplitudes(amp.to_vec())?)
}

fn magic_rho() -> Result<DensityMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    pure([c(h), C64::from_polar(h, std::f64::consts::FRAC_PI_4)])
}

fn adjoint(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

fn add_scaled(acc: &mut Ptm, r: &Ptm, w: f64) {
    for (a, b) in acc.iter_mut().flatten().zip(r.iter().flatten()) {
        *a += w * b;
    }
}

fn site_probs(spec: &NoiseSpec) -> [f64; 15] {
    let d = channel_probs(spec);
    std::array::from_fn(|k| d.probs()[k])
}

/// Noise models used by the small oracle comparisons.
fn oracle_specs(p: f64) -> Result<Vec<(String, NoiseSpec)>> {
    let mut v = Vec::new();
    for (preset, eta) in [
        (Preset::Z, 0.25),
        (Preset::Z, 10.0),
        (Preset::X, f64::INFINITY),
        (Preset::M, 3.0),
    ] {
        v.push((
            format!("{preset} eta {eta}"),
            NoiseSpec::new(preset.set(), eta, p)?,
        ));
    }
    Ok(v)
}

/// Outcome of comparing a truncated enumeration against an exact channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Agreement {
    pub label: String,
    pub order: usize,
    pub deviation: f64,
    pub bound: f64,
}

impl Agreement {
    pub fn ok(&self) -> bool {
        self.deviation <= self.bound + 1e-12
    }
}

/// Unencoded injection: data qubit 0 controls a CNOT onto a |T> qubit 1,
/// qubit 1 is measured in Z and S is applied to the data on outcome 1. The
/// CNOT is noisy.
///
/// The exact side inserts the Pauli channel in a dense density matrix. The
/// enumeration side propagates each fault configuration as a Pauli frame and
/// evaluates it the way the encoded gadget does: the frame's magic X part
/// flips the recorded outcome, so the S correction follows the wrong branch,
/// and the data part acts as a Pauli on the output.
pub fn unencoded_injection(spec: &NoiseSpec, order: usize) -> Result<Agreement> {
    let mut circ = Circuit::new(2)?;
    circ.cnot(0, 1, true, 0)?
        .cut("out")?
        .measure(1, Basis::Z, "m")?;
    let probs = site_probs(spec);
    let terms = channel_probs(spec).terms();
    let s = gate_matrix(&CliffordGate::S(0)).expect("single-qubit");
    let t = t_matrix();
    let exact = ptm_of_map(|rho| {
        let mut full = rho.tensor(&magic_rho()?)?;
        full.apply_gate(&CliffordGate::Cnot(0, 1))?;
        full.apply_pauli_channel(&terms)?;
        full.controlled_1q(1, 0, &s)?;
        full.partial_trace_keep(&[0])
    })?;
    // true outcome m leaves T (m = 0) or T† (m = 1) on the data
    let branch = [t, adjoint(&t)];
    let mut frames = Vec::new();
    let mut err = None;
    for_each_config(&[probs], order, |cfg, w| match circ.propagate_config(cfg) {
        Ok(e) => frames.push((e, w)),
        Err(x) => err = Some(x),
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut approx = [[0.0; 4]; 4];
    for (e, w) in &frames {
        let data = PauliString::from_factors(1, &[(0, e.residuals[0].get(0))])?;
        let flip = e.flips[0] as usize;
        for (m, u) in branch.iter().enumerate() {
            let recorded = m ^ flip;
            let r = ptm_of_map(|rho| {
                let mut out = rho.clone();
                out.apply_1q(0, u)?;
                out.apply_pauli(&data)?;
                if recorded == 1 {
                    out.apply_1q(0, &s)?;
                }
                Ok(out)
            })?;
            add_scaled(&mut approx, &r, 0.5 * w);
        }
    }
    Ok(Agreement {
        label: "unencoded injection".into(),
        order,
        deviation: max_abs_diff(&approx, &exact),
        bound: 1.0 - truncated_mass(1, order, spec.p),
    })
}

/// Two-qubit toy circuits mapping qubit 0 to itself, with a fixed ancilla
/// that ends in a product state.
pub struct Toy {
    pub name: &'static str,
    pub ancilla_plus: bool,
    /// `(gate, noisy)`; only CNOTs may be noisy.
    pub gates: Vec<(CliffordGate, bool)>,
}

pub fn toys() -> Vec<Toy> {
    use CliffordGate::*;
    vec![
        Toy {
            name: "two-site toy",
            ancilla_plus: false,
            gates: vec![(Cnot(0, 1), true), (Cnot(0, 1), true)],
        },
        Toy {
            name: "three-site toy",
            ancilla_plus: true,
            gates: vec![
                (Cnot(0, 1), true),
                (S(0), false),
                (Cnot(0, 1), true),
                (H(0), false),
                (Cnot(0, 1), true),
            ],
        },
    ]
}

fn toy_circuit(toy: &Toy) -> Result<Circuit> {
    let mut c = Circuit::new(2)?;
    for &(g, noisy) in &toy.gates {
        match g {
            CliffordGate::Cnot(a, b) => c.cnot(a, b, noisy, 0)?,
            g => c.gate(g)?,
        };
    }
    c.cut("out")?;
    Ok(c)
}

fn toy_input(toy: &Toy, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let anc = if toy.ancilla_plus {
        pure([c(h), c(h)])?
    } else {
        pure([c(1.0), c(0.0)])?
    };
    rho.tensor(&anc)
}

/// Exact channel (Pauli channel after every noisy CNOT) against the
/// truncated sum over propagated frames, each applied after the ideal
/// circuit.
pub fn toy_agreement(toy: &Toy, spec: &NoiseSpec, order: usize) -> Result<Agreement> {
    let circ = toy_circuit(toy)?;
    let terms = channel_probs(spec).terms();
    let exact = ptm_of_map(|rho| {
        let mut full = toy_input(toy, rho)?;
        for &(g, noisy) in &toy.gates {
            full.apply_gate(&g)?;
            if noisy {
                let (a, b) = (g.qubits().0, g.qubits().1.expect("noisy gates are CNOTs"));
                let local: Vec<(f64, PauliString)> = terms
                    .iter()
                    .map(|(p, q)| Ok((*p, crate::pauli::embed_two(2, a, b, (q.get(0), q.get(1)))?)))
                    .collect::<Result<_>>()?;
                full.apply_pauli_channel(&local)?;
            }
        }
        full.partial_trace_keep(&[0])
    })?;
    let n_sites = circ.fault_sites().len();
    let probs = vec![site_probs(spec); n_sites];
    let mut frames = Vec::new();
    let mut err = None;
    for_each_config(&probs, order, |cfg, w| match circ.propagate_config(cfg) {
        Ok(e) => frames.push((e, w)),
        Err(x) => err = Some(x),
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut approx = [[0.0; 4]; 4];
    for (e, w) in &frames {
        let r = ptm_of_map(|rho| {
            let mut full = toy_input(toy, rho)?;
            for &(g, _) in &toy.gates {
                full.apply_gate(&g)?;
            }
            full.apply_pauli(&e.residuals[0])?;
            full.partial_trace_keep(&[0])
        })?;
        add_scaled(&mut approx, &r, *w);
    }
    Ok(Agreement {
        label: toy.name.into(),
        order,
        deviation: max_abs_diff(&approx, &exact),
        bound: 1.0 - truncated_mass(n_sites, order, spec.p),
    })
}

/// All oracle comparisons at physical rate `p`.
pub fn oracle_agreements(p: f64) -> Result<Vec<Agreement>> {
    let mut out = Vec::new();
    for (label, spec) in oracle_specs(p)? {
        for order in 0..=1 {
            let mut a = unencoded_injection(&spec, order)?;
            a.label = format!("{} ({label})", a.label);
            out.push(a);
        }
        for toy in toys() {
            for order in 0..=toy.gates.iter().filter(|g| g.1).count() {
                let mut a = toy_agreement(&toy, &spec, order)?;
                a.label = format!("{} ({label})", a.label);
                out.push(a);
            }
        }
    }
    Ok(out)
}

pub fn oracle_equivalence(p: f64) -> Result<Check> {
    let all = oracle_agreements(p)?;
    let bad: Vec<_> = all.iter().filter(|a| !a.ok()).collect();
    let detail = match bad.first() {
        None => format!(
            "{} truncated channels within their omitted-mass bound",
            all.len()
        ),
        Some(a) => format!(
            "{} at order {}: deviation {:.2e} > bound {:.2e}",
            a.label, a.order, a.deviation, a.bound
        ),
    };
    Ok(Check::new("oracle equivalence", bad.is_empty(), detail))
}

/// Order-1 events of the standalone EC round either leak at the final
/// readout or leave no logical X after correction.
pub fn ec_readout_safety(ec: &EcDecoder) -> Result<Check> {
    let c = standalone_ec()?;
    let mut bad = 0usize;
    for s in 0..c.fault_sites().len() {
        for k in 0..15 {
            let e = c.propagate_fault(s, k)?;
            let sig = crate::steane::round_signature(&c, &e.flips, "ec")?;
            let (x, _) = block_bits(&e.residuals[0], &LOCAL_DATA);
            let x = x ^ ec.correction(sig).0;
            if syndrome_bits(x, 0) == 0 && x_logical_parity(x) == 1 {
                bad += 1;
            }
        }
    }
    Ok(Check::new(
        "EC readout safety",
        bad == 0,
        format!("{bad} single faults turn into logical X"),
    ))
}

/// Checks run by `verify`.
pub fn suite(g: &Gadget) -> Result<Vec<Check>> {
    if g.flags() != NoisyFlags::ALL {
        return Err(Error::Config(
            "verify needs the gadget with every component noisy".into(),
        ));
    }
    Ok(vec![
        code_consistency()?,
        ec_readout_safety(&EcDecoder::build(&Code::steane(), &DecoderTable::build())?)?,
        hook_discrimination()?,
        order_one(g),
        zero_noise(g)?,
        misapplication(g)?,
        oracle_equivalence(0.02)?,
        ptm_round_trip(100, 7)?,
    ])
}
