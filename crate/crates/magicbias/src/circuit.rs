//! Circuit representation and forward Pauli propagation.
//!
//! Noise enters after a faulty CNOT. The inserted Pauli is conjugated through
//! every later event. Measurements record an anticommutation bit and then
//! drop the qubit's factor. Cuts snapshot the whole register.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pauli::{embed_two, two_qubit_paulis, CliffordGate, Pauli1, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn observable(self) -> Pauli1 {
        match self {
            Basis::X => Pauli1::X,
            Basis::Y => Pauli1::Y,
            Basis::Z => Pauli1::Z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prep {
    ZPlus,
    ZMinus,
    XPlus,
    YPlus,
    /// `T|+>`; only the dense oracle distinguishes it.
    Magic,
}

/// How a Pauli frame crosses an ideal controlled-`(X_L+Y_L)/sqrt2` element.
///
/// The block's logical part is stripped (the logical evaluator has already
/// read it at the preceding cut). `X` on the control is swapped for `X` on
/// the flag, which is valid because control and flag sit in a Bell pair
/// stabilised by `X_c X_f` at this point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlledLogical {
    pub block: Vec<usize>,
    pub x_logical: u64,
    pub z_logical: u64,
    pub control: usize,
    pub flag: usize,
}

impl ControlledLogical {
    fn apply(&self, e: &mut PauliString) {
        let n = e.n();
        let xl = PauliString::from_bits(n, self.x_logical, 0, 0).expect("in range");
        let zl = PauliString::from_bits(n, 0, self.z_logical, 0).expect("in range");
        let mut out = *e;
        if !out.commutes_unchecked(&xl) {
            out = out.mul_unchecked(&zl);
        }
        if !out.commutes_unchecked(&zl) {
            out = out.mul_unchecked(&xl);
        }
        if out.x_bits() >> self.control & 1 == 1 {
            let swap = PauliString::from_bits(n, (1 << self.control) | (1 << self.flag), 0, 0)
                .expect("in range");
            out = out.mul_unchecked(&swap);
        }
        *e = out;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Gate(CliffordGate),
    Prepare {
        q: usize,
        state: Prep,
    },
    Measure {
        q: usize,
        basis: Basis,
        label: String,
    },
    Cut {
        label: String,
    },
    NonClifford {
        label: String,
        frame: ControlledLogical,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaultSite {
    pub event: usize,
    pub tag: u8,
}

#[derive(Clone, Debug)]
pub struct Circuit {
    n: usize,
    events: Vec<Event>,
    sites: Vec<FaultSite>,
    cut_events: Vec<usize>,
    measure_events: Vec<usize>,
    labels: HashSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagatedEffect {
    pub residuals: Vec<PauliString>,
    pub flips: Vec<bool>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Self> {
        PauliString::identity(n)?;
        Ok(Circuit {
            n,
            events: Vec::new(),
            sites: Vec::new(),
            cut_events: Vec::new(),
            measure_events: Vec::new(),
            labels: HashSet::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }
    pub fn events(&self) -> &[Event] {
        &self.events
    }
    pub fn fault_sites(&self) -> &[FaultSite] {
        &self.sites
    }

    fn check_q(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(Error::OutOfRange {
                qubit: q,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    fn claim(&mut self, label: &str) -> Result<()> {
        if !self.labels.insert(label.to_string()) {
            return Err(Error::Circuit(format!("duplicate label {label:?}")));
        }
        Ok(())
    }

    pub fn gate(&mut self, g: CliffordGate) -> Result<&mut Self> {
        g.validate(self.n)?;
        self.events.push(Event::Gate(g));
        Ok(self)
    }

    pub fn gates(&mut self, gs: impl IntoIterator<Item = CliffordGate>) -> Result<&mut Self> {
        for g in gs {
            self.gate(g)?;
        }
        Ok(self)
    }

    /// A CNOT that is a fault site when `noisy` holds.
    pub fn cnot(&mut self, c: usize, t: usize, noisy: bool, tag: u8) -> Result<&mut Self> {
        self.gate(CliffordGate::Cnot(c, t))?;
        if noisy {
            self.sites.push(FaultSite {
                event: self.events.len() - 1,
                tag,
            });
        }
        Ok(self)
    }

    pub fn prepare(&mut self, q: usize, state: Prep) -> Result<&mut Self> {
        self.check_q(q)?;
        self.events.push(Event::Prepare { q, state });
        Ok(self)
    }

    pub fn measure(&mut self, q: usize, basis: Basis, label: &str) -> Result<&mut Self> {
        self.check_q(q)?;
        self.claim(label)?;
        self.measure_events.push(self.events.len());
        self.events.push(Event::Measure {
            q,
            basis,
            label: label.to_string(),
        });
        Ok(self)
    }

    pub fn cut(&mut self, label: &str) -> Result<&mut Self> {
        self.claim(label)?;
        self.cut_events.push(self.events.len());
        self.events.push(Event::Cut {
            label: label.to_string(),
        });
        Ok(self)
    }

    /// Must directly follow a cut, so the incoming frame is harvested first.
    pub fn nonclifford(&mut self, label: &str, frame: ControlledLogical) -> Result<&mut Self> {
        for &q in frame.block.iter().chain([&frame.control, &frame.flag]) {
            self.check_q(q)?;
        }
        if !matches!(self.events.last(), Some(Event::Cut { .. })) {
            return Err(Error::Circuit(format!(
                "nonclifford {label:?} must follow a cut"
            )));
        }
        self.claim(label)?;
        self.events.push(Event::NonClifford {
            label: label.to_string(),
            frame,
        });
        Ok(self)
    }

    pub fn cut_labels(&self) -> Vec<&str> {
        self.cut_events
            .iter()
            .map(|&i| match &self.events[i] {
                Event::Cut { label } => label.as_str(),
                _ => unreachable!(),
            })
            .collect()
    }

    pub fn measure_labels(&self) -> Vec<&str> {
        self.measure_events
            .iter()
            .map(|&i| match &self.events[i] {
                Event::Measure { label, .. } => label.as_str(),
                _ => unreachable!(),
            })
            .collect()
    }

    pub fn cut_index(&self, label: &str) -> Option<usize> {
        self.cut_labels().iter().position(|l| *l == label)
    }

    pub fn measure_index(&self, label: &str) -> Option<usize> {
        self.measure_labels().iter().position(|l| *l == label)
    }

    pub fn cnot_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Gate(CliffordGate::Cnot(..))))
            .count()
    }

    pub fn site_qubits(&self, site: usize) -> Result<(usize, usize)> {
        let s = self.sites.get(site).ok_or(Error::OutOfRange {
            qubit: site,
            n: self.sites.len(),
        })?;
        match self.events[s.event] {
            Event::Gate(CliffordGate::Cnot(c, t)) => Ok((c, t)),
            _ => Err(Error::Circuit("fault site is not a CNOT".into())),
        }
    }

    pub fn identity_effect(&self) -> PropagatedEffect {
        PropagatedEffect {
            residuals: vec![PauliString::identity(self.n).expect("valid n"); self.cut_events.len()],
            flips: vec![false; self.measure_events.len()],
        }
    }

    /// Propagates a set of `(site, two-qubit Pauli index)` insertions through
    /// the whole circuit at once.
    pub fn propagate_config(&self, faults: &[(usize, usize)]) -> Result<PropagatedEffect> {
        self.propagate_with_initial(&PauliString::identity(self.n)?, faults)
    }

    /// As `propagate_config`, with `initial` present before the first event.
    pub fn propagate_with_initial(
        &self,
        initial: &PauliString,
        faults: &[(usize, usize)],
    ) -> Result<PropagatedEffect> {
        if initial.n() != self.n {
            return Err(Error::SizeMismatch(initial.n(), self.n));
        }
        let table = two_qubit_paulis();
        let mut inserts: Vec<(usize, PauliString)> = Vec::with_capacity(faults.len());
        for &(site, k) in faults {
            let (c, t) = self.site_qubits(site)?;
            let p = *table.get(k).ok_or(Error::OutOfRange { qubit: k, n: 15 })?;
            inserts.push((self.sites[site].event, embed_two(self.n, c, t, p)?));
        }
        let mut e = *initial;
        let mut out = self.identity_effect();
        let (mut ci, mut mi) = (0, 0);
        for (i, ev) in self.events.iter().enumerate() {
            match ev {
                Event::Gate(g) => e.conjugate_in_place(g),
                Event::Prepare { q, .. } => e.clear(*q),
                Event::Measure { q, basis, .. } => {
                    let obs = PauliString::single(self.n, *q, basis.observable())?;
                    out.flips[mi] = !e.commutes_unchecked(&obs);
                    e.clear(*q);
                    mi += 1;
                }
                Event::Cut { .. } => {
                    out.residuals[ci] = e;
                    ci += 1;
                }
                Event::NonClifford { frame, .. } => frame.apply(&mut e),
            }
            for (at, p) in &inserts {
                if *at == i {
                    e = p.mul_unchecked(&e);
                }
            }
        }
        Ok(out)
    }

    pub fn propagate_fault(&self, site: usize, pauli: usize) -> Result<PropagatedEffect> {
        self.propagate_config(&[(site, pauli)])
    }

    pub fn effect_table(&self) -> Result<EffectTable> {
        let mut effects = Vec::with_capacity(self.sites.len() * 15);
        for s in 0..self.sites.len() {
            for k in 0..15 {
                effects.push(self.propagate_fault(s, k)?);
            }
        }
        Ok(EffectTable { effects })
    }

    /// One event per line; qubits are 0-based.
    pub fn dump(&self) -> String {
        let noisy: HashSet<usize> = self.sites.iter().map(|s| s.event).collect();
        let mut s = format!("qubits {}\n", self.n);
        for (i, ev) in self.events.iter().enumerate() {
            let mark = if noisy.contains(&i) { " *" } else { "" };
            let _ = match ev {
                Event::Gate(g) => writeln!(s, "{i:4} {}{mark}", g.name()),
                Event::Prepare { q, state } => writeln!(s, "{i:4} PREP {q} {state:?}"),
                Event::Measure { q, basis, label } => {
                    writeln!(s, "{i:4} MEAS {q} {basis:?} {label}")
                }
                Event::Cut { label } => writeln!(s, "{i:4} CUT {label}"),
                Event::NonClifford { label, frame } => writeln!(
                    s,
                    "{i:4} NONCLIFFORD {label} ctrl {} flag {} block {:?}",
                    frame.control, frame.flag, frame.block
                ),
            };
        }
        s
    }
}

impl PropagatedEffect {
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.residuals.len() != other.residuals.len() || self.flips.len() != other.flips.len() {
            return Err(Error::LabelMismatch);
        }
        let mut residuals = Vec::with_capacity(self.residuals.len());
        for (a, b) in self.residuals.iter().zip(&other.residuals) {
            residuals.push(a.multiply(b).map_err(|_| Error::LabelMismatch)?);
        }
        let flips = self
            .flips
            .iter()
            .zip(&other.flips)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(PropagatedEffect { residuals, flips })
    }

    pub fn is_trivial(&self) -> bool {
        self.residuals.iter().all(|r| r.is_trivial()) && !self.flips.iter().any(|f| *f)
    }
}

pub fn compose_effects(effects: &[PropagatedEffect]) -> Result<PropagatedEffect> {
    let (first, rest) = effects.split_first().ok_or(Error::LabelMismatch)?;
    rest.iter().try_fold(first.clone(), |acc, e| acc.compose(e))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectTable {
    effects: Vec<PropagatedEffect>,
}

impl EffectTable {
    pub fn get(&self, site: usize, pauli: usize) -> &PropagatedEffect {
        &self.effects[site * 15 + pauli]
    }
    pub fn len(&self) -> usize {
        self.effects.len()
    }
    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}
