use magicbias::circuit::Basis;
use magicbias::gadget::*;
use magicbias::logical::{basis_index, InputState};
use magicbias::noise::{BiasSet, Preset};

#[test]
fn site_counts_per_component() {
    let g = Gadget::new(NoisyFlags::ALL).unwrap();
    assert_eq!(g.n_sites(), 121);
    let inj = Gadget::new(NoisyFlags {
        injection_cnot: true,
        ..NoisyFlags::NONE
    })
    .unwrap();
    assert_eq!(inj.n_sites(), 7);
}

#[test]
fn fault_free_gadget_is_a_t_gate() {
    let g = Gadget::new(NoisyFlags::ALL).unwrap();
    let t = g.evaluate(&ReducedEffect::default());
    for s in 0..4 {
        for beta in 0..3 {
            let a = t.adaptive(s, beta);
            assert!((a.accept - 1.0).abs() < 1e-14, "{s} {beta} {a:?}");
            let ideal = g.model().ideal(s, beta);
            for o in 0..2 {
                assert!((a.outcome[o] / a.accept - ideal[o]).abs() < 1e-14);
            }
            assert_eq!(a.leak, 0.0);
        }
    }
}

#[test]
fn single_faults_never_cause_logical_errors() {
    let g = Gadget::new(NoisyFlags::ALL).unwrap();
    let bad = g.order_one_violations();
    assert!(
        bad.is_empty(),
        "{} violations, first {:?}",
        bad.len(),
        bad.first()
    );
}

#[test]
fn misapplied_correction_flips_every_branch() {
    let g = Gadget::new(NoisyFlags::ALL).unwrap();
    // an X_L pattern on the magic readout of every input
    let e = ReducedEffect::default().with_magic_flips(0b1010010);
    assert!(g.magic_flip(&e, 0) == 1);
    let t = g.evaluate(&e);
    let z = basis_index(Basis::Z);
    let a = t.adaptive(0, z);
    assert!((a.outcome[0] / a.accept - 1.0).abs() < 1e-14);
    let x = basis_index(Basis::X);
    // the S correction lands on the wrong branch and the two branches
    // cancel in the equatorial plane
    for s in [2, 3] {
        for beta in [x, basis_index(Basis::Y)] {
            let a = t.adaptive(s, beta);
            let got = (a.outcome[0] - a.outcome[1]) / a.accept;
            assert!(got.abs() < 1e-14, "{s} {beta} {got}");
        }
    }
}

#[test]
fn enumeration_counts_are_consistent() {
    let g = Gadget::new(NoisyFlags::MAGIC_AND_INJECTION).unwrap();
    let sets: Vec<BiasSet> = Preset::ALL.iter().map(|p| p.set()).collect();
    let c = g.enumerate(2, &sets, 1).unwrap();
    let again = g.enumerate(2, &sets, 0).unwrap();
    assert_eq!(c.raw(), again.raw());
    for set in 0..sets.len() {
        let t = g.tallies(&c, set, 10.0, 1e-3).unwrap();
        for s in 0..4 {
            for beta in 0..3 {
                let a = t.adaptive(s, beta);
                let r = t.reject(s, beta);
                assert!(a.accept > 0.0 && a.leak >= 0.0 && r > -1e-15, "{a:?} {r}");
                assert!(((a.outcome[0] + a.outcome[1]) - a.accept).abs() < 1e-15);
            }
        }
    }
    let _ = InputState::ALL;
}
