use magicbias::circuit::{compose_effects, Circuit};
use magicbias::oracle::run_unitary_part;
use magicbias::pauli::{Pauli1, PauliString};
use magicbias::steane::*;

fn embed(e: &PauliString, n: usize) -> PauliString {
    PauliString::from_bits(n, e.x_bits(), e.z_bits(), e.phase()).unwrap()
}

fn zero_circuit() -> Circuit {
    let mut c = Circuit::new(7).unwrap();
    encode_zero(&mut c, &LOCAL_DATA, true, 0).unwrap();
    c.cut("end").unwrap();
    c
}

#[test]
fn encode_zero_prepares_logical_zero() {
    let code = Code::steane();
    let s = run_unitary_part(&zero_circuit()).unwrap();
    for g in &code.generators {
        assert!((s.expectation(g).unwrap() - 1.0).abs() < 1e-12, "{g}");
    }
    assert!((s.expectation(&code.z_logical).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn encode_t_prepares_logical_magic_state() {
    let code = Code::steane();
    let mut c = Circuit::new(7).unwrap();
    encode_t(&mut c, &LOCAL_DATA, true, 0).unwrap();
    let s = run_unitary_part(&c).unwrap();
    for g in &code.generators {
        assert!((s.expectation(g).unwrap() - 1.0).abs() < 1e-12, "{g}");
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((s.expectation(&code.x_logical).unwrap() - h).abs() < 1e-12);
    assert!((s.expectation(&code.y_logical).unwrap() - h).abs() < 1e-12);
    assert!(s.expectation(&code.z_logical).unwrap().abs() < 1e-12);
}

#[test]
fn transversal_s_convention() {
    let code = Code::steane();
    let mut c = zero_circuit();
    c.gates(transversal(&[LogicalGate::H], &LOCAL_DATA))
        .unwrap();
    let plus = run_unitary_part(&c).unwrap();
    assert!((plus.expectation(&code.x_logical).unwrap() - 1.0).abs() < 1e-12);

    let mut raw = plus.clone();
    for q in 0..7 {
        raw.apply_gate(&magicbias::pauli::CliffordGate::S(q))
            .unwrap();
    }
    // physical S everywhere rotates +X_L to -Y_L: logical S†
    assert!((raw.expectation(&code.y_logical).unwrap() + 1.0).abs() < 1e-12);
    assert!(TRANSVERSAL_S_IS_ADJOINT);

    let mut s = plus.clone();
    for g in transversal(&[LogicalGate::S], &LOCAL_DATA) {
        s.apply_gate(&g).unwrap();
    }
    assert!((s.expectation(&code.y_logical).unwrap() - 1.0).abs() < 1e-12);

    let mut y = zero_circuit();
    y.gates(transversal(&[LogicalGate::H, LogicalGate::S], &LOCAL_DATA))
        .unwrap();
    let y = run_unitary_part(&y).unwrap();
    assert!((y.expectation(&code.y_logical).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn encoder_hook_spreads_y7_to_z5y7() {
    let c = zero_circuit();
    let site = ENCODE_ZERO_CNOTS.iter().position(|&p| p == (1, 6)).unwrap();
    // (I, Y) on (control, target)
    let e = c.propagate_fault(site, 1).unwrap();
    assert_eq!(e.residuals[0].to_text(), "+Z5Y7");
    assert_eq!(e.residuals[0].weight(), 2);
}

#[test]
fn encoder_effects_compose_linearly() {
    let c = zero_circuit();
    let n = c.fault_sites().len();
    let table = c.effect_table().unwrap();
    assert_eq!(table.len(), 15 * n);
    for s1 in 0..n {
        for a in 0..15 {
            assert_eq!(table.get(s1, a), &c.propagate_fault(s1, a).unwrap());
            for s2 in 0..n {
                for b in 0..15 {
                    let mono = c.propagate_config(&[(s1, a), (s2, b)]).unwrap();
                    let comp =
                        compose_effects(&[table.get(s1, a).clone(), table.get(s2, b).clone()])
                            .unwrap();
                    let (m, k) = (mono.residuals[0], comp.residuals[0]);
                    assert_eq!((m.x_bits(), m.z_bits()), (k.x_bits(), k.z_bits()));
                    assert_eq!(mono.flips, comp.flips);
                }
            }
        }
    }
}

fn undetected_heavy_text(cnots: &[(usize, usize)]) -> Vec<String> {
    undetected_heavy(cnots)
        .unwrap()
        .into_iter()
        .map(|b| b.2.to_text())
        .collect()
}

#[test]
fn modified_ed_leaves_no_undetected_weight_two() {
    assert_eq!(ED_MODIFIED.len(), 30);
    let c = standalone_round(&ED_MODIFIED).unwrap();
    assert_eq!(c.effect_table().unwrap().len(), 15 * 30);
    assert!(undetected_heavy(&ED_MODIFIED).unwrap().is_empty());
}

#[test]
fn flagged_ec_hook_is_undetected_and_ed_catches_it() {
    let c = standalone_round(&EC_FLAGGED).unwrap();
    // (X, Z) on the flag pair: index 4*1 + 3 - 1
    let e = c.propagate_fault(EC_HOOK_SITE, 6).unwrap();
    assert!(e.flips.iter().all(|f| !*f));
    let (x, z) = block_bits(&e.residuals[0], &LOCAL_DATA);
    assert_eq!(
        PauliString::from_bits(7, x.into(), z.into(), 0)
            .unwrap()
            .to_text(),
        "+X6Z7"
    );
    assert!(undetected_heavy_text(&EC_FLAGGED)
        .iter()
        .any(|b| b == "+X6Z7"));
    assert!(!undetected_heavy_text(&ED_MODIFIED)
        .iter()
        .any(|b| b == "+X6Z7"));
}

#[test]
fn extraction_rounds_measure_the_syndrome() {
    for cnots in [
        ED_MODIFIED.to_vec(),
        EC_FLAGGED.to_vec(),
        plain_round_cnots(),
    ] {
        let c = standalone_round(&cnots).unwrap();
        for x in 0u8..128 {
            for z in [0u8, 1, 6, 0x55, 0x7f] {
                let e = PauliString::from_bits(13, x.into(), z.into(), 0).unwrap();
                let eff = c.propagate_with_initial(&e, &[]).unwrap();
                assert_eq!(
                    round_signature(&c, &eff.flips, "s").unwrap(),
                    syndrome_bits(x, z)
                );
                assert_eq!(block_bits(&eff.residuals[0], &LOCAL_DATA), (x, z));
            }
        }
    }
}

/// Every order-1 event around the flagged EC round, after correction,
/// leaves an X part that is either detectable at the final Z readout or
/// logically trivial.
#[test]
fn ec_round_protects_the_readout() {
    let code = Code::steane();
    let dec = DecoderTable::build();
    let ec = EcDecoder::build(&code, &dec).unwrap();
    let c = standalone_ec().unwrap();
    let out = c.cut_index("ec_out").unwrap();
    let mut events = Vec::new();
    for q in 0..7 {
        for p in [Pauli1::X, Pauli1::Y, Pauli1::Z] {
            let e = embed(&PauliString::single(7, q, p).unwrap(), 13);
            events.push(c.propagate_with_initial(&e, &[]).unwrap());
        }
    }
    for s in 0..c.fault_sites().len() {
        for k in 0..15 {
            events.push(c.propagate_fault(s, k).unwrap());
        }
    }
    let (mut leaks, mut heavy) = (0, 0);
    for eff in &events {
        let sig = round_signature(&c, &eff.flips, "ec").unwrap();
        let (x, z) = block_bits(&eff.residuals[out], &LOCAL_DATA);
        let (cx, cz) = ec.correction(sig);
        let (x, z) = (x ^ cx, z ^ cz);
        if syndrome_bits(x, 0) != 0 {
            leaks += 1;
        } else {
            assert_eq!(x_logical_parity(x), 0, "logical X after EC");
        }
        let (a, b) = code.min_equivalent(x, z);
        if (a | b).count_ones() > 1 {
            heavy += 1;
        }
    }
    // The flagged round lets some correlated pairs through (the X6 Z7 hook
    // among them); the readout catches what the correction cannot fix.
    assert!(leaks > 0 && heavy > 0);
}

#[test]
fn checked_in_tables_match() {
    let code = Code::steane();
    let dec = DecoderTable::build();
    let ec = EcDecoder::build(&code, &dec).unwrap();
    let text = tables_text(&code, &dec, &ec);
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/steane_tables.txt");
    if std::env::var_os("MAGICBIAS_BLESS").is_some() {
        std::fs::write(path, &text).unwrap();
    }
    let on_disk = std::fs::read_to_string(path).unwrap();
    assert_eq!(on_disk, text);
}
