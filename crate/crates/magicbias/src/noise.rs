//! Biased Pauli channels and bias-set algebra.
//!
//! Non-identity n-qubit Paulis are indexed by `k - 1` for `k` in `1..4^n`,
//! qubit `q` taking the base-4 digit at position `n - 1 - q`
//! (0 = I, 1 = X, 2 = Y, 3 = Z). For n = 2 this is the
//! `pauli::two_qubit_paulis` order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{CliffordGate, Pauli1, PauliString};

const LETTERS: [Pauli1; 4] = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z];

fn letter_index(p: Pauli1) -> usize {
    match p {
        Pauli1::I => 0,
        Pauli1::X => 1,
        Pauli1::Y => 2,
        Pauli1::Z => 3,
    }
}

pub fn pauli_at(n: usize, index: usize) -> PauliString {
    let k = index + 1;
    let mut p = PauliString::identity(n).expect("n checked by caller");
    for q in 0..n {
        let d = (k >> (2 * (n - 1 - q))) & 3;
        p.set(q, LETTERS[d]).expect("in range");
    }
    p
}

pub fn index_of(p: &PauliString) -> Option<usize> {
    let n = p.n();
    let mut k = 0;
    for q in 0..n {
        k |= letter_index(p.get(q)) << (2 * (n - 1 - q));
    }
    k.checked_sub(1)
}

/// Named high-rate sets on two qubits (CNOT control first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Preset {
    Z,
    X,
    Y,
    M,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Z, Preset::X, Preset::Y, Preset::M];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Z => "Z",
            Preset::X => "X",
            Preset::Y => "Y",
            Preset::M => "M",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "Z" | "z" => Ok(Preset::Z),
            "X" | "x" => Ok(Preset::X),
            "Y" | "y" => Ok(Preset::Y),
            "M" | "m" => Ok(Preset::M),
            _ => Err(Error::Noise(format!("unknown bias set {s:?}"))),
        }
    }

    pub fn set(self) -> BiasSet {
        let g = |s: &str| PauliString::parse(2, s).expect("static");
        let gens = match self {
            Preset::Z => vec![g("Z1"), g("Z2")],
            Preset::X => vec![g("X1"), g("X2")],
            Preset::Y => vec![g("Y1"), g("Y2")],
            Preset::M => vec![g("Z1"), g("X2")],
        };
        BiasSet::new(gens).expect("valid preset")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiasSet {
    n: usize,
    generators: Vec<PauliString>,
    member: Vec<bool>,
}

impl BiasSet {
    /// `generators` must be n independent, mutually commuting Paulis on n
    /// qubits.
    pub fn new(generators: Vec<PauliString>) -> Result<Self> {
        let n = generators.len();
        if n == 0 || n > 6 {
            return Err(Error::Noise(
                "bias set needs between 1 and 6 generators".into(),
            ));
        }
        for g in &generators {
            if g.n() != n {
                return Err(Error::Noise(format!("generator {g} is not on {n} qubits")));
            }
            for h in &generators {
                if !g.commutes(h)? {
                    return Err(Error::Noise(format!("generators {g} and {h} anticommute")));
                }
            }
        }
        let mut member = vec![false; (1 << (2 * n)) - 1];
        for sel in 1u32..(1 << n) {
            let mut p = PauliString::identity(n)?;
            for (i, g) in generators.iter().enumerate() {
                if sel >> i & 1 == 1 {
                    p = p.multiply(g)?;
                }
            }
            let idx =
                index_of(&p).ok_or_else(|| Error::Noise("generators are dependent".into()))?;
            if member[idx] {
                return Err(Error::Noise("generators are dependent".into()));
            }
            member[idx] = true;
        }
        Ok(BiasSet {
            n,
            generators,
            member,
        })
    }

    pub fn single(p: Pauli1) -> Self {
        BiasSet::new(vec![PauliString::single(1, 0, p).expect("one qubit")]).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.member[index]
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        p.n() == self.n && index_of(p).is_some_and(|i| self.member[i])
    }

    pub fn members(&self) -> Vec<PauliString> {
        (0..self.member.len())
            .filter(|&i| self.member[i])
            .map(|i| pauli_at(self.n, i))
            .collect()
    }

    pub fn size(&self) -> usize {
        (1 << self.n) - 1
    }

    pub fn complement_size(&self) -> usize {
        (1 << (2 * self.n)) - (1 << self.n)
    }

    /// The bias of the depolarising channel against this set, `|Q| / |Q^C|`.
    pub fn depolarizing_eta(&self) -> f64 {
        self.size() as f64 / self.complement_size() as f64
    }

    pub fn conjugate(&self, g: &CliffordGate) -> Result<BiasSet> {
        let gens = self
            .generators
            .iter()
            .map(|p| p.conjugate(g).map(|q| q.with_phase(0)))
            .collect::<Result<_>>()?;
        BiasSet::new(gens)
    }
}

/// `eta` of `f64::INFINITY` means the low-rate Paulis have probability zero.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    pub set: BiasSet,
    pub eta: f64,
    pub p: f64,
}

impl NoiseSpec {
    pub fn new(set: BiasSet, eta: f64, p: f64) -> Result<Self> {
        if !(eta >= 0.0) {
            return Err(Error::Noise(format!("eta must be non-negative, got {eta}")));
        }
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Noise(format!("p must lie in [0, 1), got {p}")));
        }
        Ok(NoiseSpec { set, eta, p })
    }

    /// `(high, low)` per-Pauli probabilities.
    pub fn rates(&self) -> (f64, f64) {
        let q = self.set.size() as f64;
        let qc = self.set.complement_size() as f64;
        if self.eta.is_infinite() {
            (self.p / q, 0.0)
        } else {
            (
                self.p * self.eta / ((self.eta + 1.0) * q),
                self.p / ((self.eta + 1.0) * qc),
            )
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaultDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl FaultDistribution {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != (1 << (2 * n)) - 1 {
            return Err(Error::Noise(format!(
                "expected {} probabilities",
                (1 << (2 * n)) - 1
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::Noise("probabilities must be non-negative".into()));
        }
        Ok(FaultDistribution { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
    pub fn prob(&self, p: &PauliString) -> f64 {
        index_of(p).map_or(0.0, |i| self.probs[i])
    }
    pub fn terms(&self) -> Vec<(f64, PauliString)> {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, pauli_at(self.n, i)))
            .collect()
    }
}

pub fn channel_probs(spec: &NoiseSpec) -> FaultDistribution {
    let (h, l) = spec.rates();
    let probs = (0..spec.set.member.len())
        .map(|i| if spec.set.member[i] { h } else { l })
        .collect();
    FaultDistribution {
        n: spec.set.n,
        probs,
    }
}

pub fn bias_of(dist: &FaultDistribution, set: &BiasSet) -> Result<f64> {
    if dist.n != set.n {
        return Err(Error::SizeMismatch(dist.n, set.n));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &p) in dist.probs.iter().enumerate() {
        if set.member[i] {
            num += p;
        } else {
            den += p;
        }
    }
    if num == 0.0 && den == 0.0 {
        return Err(Error::UndefinedBias);
    }
    if num == 0.0 {
        Ok(0.0)
    } else if den == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(num / den)
    }
}

/// The distribution of `g P g†` when `P` is drawn from `dist`.
pub fn conjugate_distribution(
    dist: &FaultDistribution,
    g: &CliffordGate,
) -> Result<FaultDistribution> {
    g.validate(dist.n)?;
    let mut probs = vec![0.0; dist.probs.len()];
    for (i, &p) in dist.probs.iter().enumerate() {
        let q = pauli_at(dist.n, i).conjugate(g)?;
        probs[index_of(&q).expect("conjugation preserves non-identity")] += p;
    }
    Ok(FaultDistribution { n: dist.n, probs })
}

/// Probability of one configuration: the chosen Paulis' probabilities times
/// `(1-p)` for every other site.
pub fn config_weight(chosen: &[f64], n_sites: usize, p: f64) -> f64 {
    let k = chosen.len();
    debug_assert!(k <= n_sites);
    chosen.iter().product::<f64>() * (1.0 - p).powi((n_sites - k) as i32)
}

/// Weight of a `(k, a)` bin element: `a` high-rate and `k - a` low-rate
/// faults among `n_sites`.
pub fn bin_weight(high: f64, low: f64, p: f64, n_sites: usize, k: usize, a: usize) -> f64 {
    high.powi(a as i32) * low.powi((k - a) as i32) * (1.0 - p).powi((n_sites - k) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(s: &str) -> PauliString {
        PauliString::parse(2, s).unwrap()
    }

    #[test]
    fn index_round_trip() {
        for n in 1..4 {
            for i in 0..(1 << (2 * n)) - 1 {
                assert_eq!(index_of(&pauli_at(n, i)), Some(i));
            }
        }
        assert_eq!(pauli_at(2, 0), p2("X2"));
        assert_eq!(pauli_at(2, 3), p2("X1"));
    }

    #[test]
    fn set_sizes() {
        for pr in Preset::ALL {
            let s = pr.set();
            assert_eq!(s.members().len(), 3);
            assert_eq!(s.complement_size(), 12);
            for a in s.members() {
                for b in s.members() {
                    assert!(a.commutes(&b).unwrap());
                }
            }
        }
        assert!(BiasSet::new(vec![p2("X1"), p2("Z1")]).is_err());
        assert!(BiasSet::new(vec![p2("Z1"), p2("Z1")]).is_err());
    }

    #[test]
    fn depolarizing_point() {
        let spec = NoiseSpec::new(Preset::Z.set(), 0.25, 0.03).unwrap();
        let d = channel_probs(&spec);
        for &p in d.probs() {
            assert!((p - 0.002).abs() < 1e-15);
        }
        assert!((d.total() - 0.03).abs() < 1e-12);
    }

    #[test]
    fn infinite_bias() {
        let spec = NoiseSpec::new(Preset::Z.set(), f64::INFINITY, 0.03).unwrap();
        let d = channel_probs(&spec);
        assert!((d.prob(&p2("Z1Z2")) - 0.01).abs() < 1e-15);
        assert_eq!(d.prob(&p2("X1")), 0.0);
        assert_eq!(bias_of(&d, &spec.set).unwrap(), f64::INFINITY);
    }

    #[test]
    fn single_qubit_depolarizing_bias_is_half() {
        let spec = NoiseSpec::new(BiasSet::single(Pauli1::Z), 0.5, 0.03).unwrap();
        for &p in channel_probs(&spec).probs() {
            assert!((p - 0.01).abs() < 1e-15);
        }
    }

    #[test]
    fn bias_round_trip() {
        for eta in [0.1, 1.0, 10.0, 100.0] {
            let spec = NoiseSpec::new(Preset::Y.set(), eta, 0.01).unwrap();
            let b = bias_of(&channel_probs(&spec), &spec.set).unwrap();
            assert!((b - eta).abs() < 1e-12 * eta);
        }
        let zero = FaultDistribution::new(1, vec![0.0; 3]).unwrap();
        assert_eq!(
            bias_of(&zero, &BiasSet::single(Pauli1::Z)),
            Err(Error::UndefinedBias)
        );
    }

    #[test]
    fn depolarizing_bias_against_maximal_sets() {
        for n in 1..4 {
            let gens: Vec<_> = (0..n)
                .map(|q| PauliString::single(n, q, Pauli1::X).unwrap())
                .collect();
            let set = BiasSet::new(gens).unwrap();
            let len = (1 << (2 * n)) - 1;
            let d = FaultDistribution::new(n, vec![1.0 / len as f64; len]).unwrap();
            let b = bias_of(&d, &set).unwrap();
            assert!((b - ((1 << n) - 1) as f64 / ((1 << (2 * n)) - (1 << n)) as f64).abs() < 1e-12);
            let _ = b;
        }
    }

    #[test]
    fn cz_z_bias_is_cnot_m_bias() {
        // CNOT = H_t CZ H_t: Z-biased noise after a CZ, moved past the final H
        // on the target, is M-biased with the same eta.
        let spec = NoiseSpec::new(Preset::Z.set(), 7.0, 0.01).unwrap();
        let d = conjugate_distribution(&channel_probs(&spec), &CliffordGate::H(1)).unwrap();
        let m = Preset::M.set();
        assert!((bias_of(&d, &m).unwrap() - 7.0).abs() < 1e-12);
        assert_eq!(d, channel_probs(&NoiseSpec::new(m, 7.0, 0.01).unwrap()));
    }

    #[test]
    fn conjugation_relabels_sets() {
        let spec = NoiseSpec::new(Preset::Z.set(), 3.0, 0.02).unwrap();
        let d = channel_probs(&spec);
        for g in [
            CliffordGate::H(0),
            CliffordGate::S(1),
            CliffordGate::Cnot(0, 1),
            CliffordGate::Cz(0, 1),
        ] {
            let d2 = conjugate_distribution(&d, &g).unwrap();
            let s2 = spec.set.conjugate(&g).unwrap();
            assert!((bias_of(&d2, &s2).unwrap() - 3.0).abs() < 1e-12);
        }
        let dep = FaultDistribution::new(2, vec![0.001; 15]).unwrap();
        assert_eq!(
            conjugate_distribution(&dep, &CliffordGate::Cnot(0, 1)).unwrap(),
            dep
        );
    }

    #[test]
    fn m_set_commutes_with_cnot() {
        for p in Preset::M.set().members() {
            assert_eq!(p.conjugate(&CliffordGate::Cnot(0, 1)).unwrap(), p);
        }
    }

    #[test]
    fn cnot_placement_invariance() {
        let g = CliffordGate::Cnot(0, 1);
        for pr in [Preset::Z, Preset::X] {
            let s = pr.set();
            for p in s.members() {
                assert!(s.contains(&p.conjugate(&g).unwrap().with_phase(0)));
            }
        }
        let y = Preset::Y.set();
        assert!(y
            .members()
            .iter()
            .any(|p| !y.contains(&p.conjugate(&g).unwrap().with_phase(0))));
    }

    #[test]
    fn weights() {
        assert!((config_weight(&[], 10, 0.01) - 0.99f64.powi(10)).abs() < 1e-15);
        assert!(
            (config_weight(&[0.01 / 15.0], 10, 0.01) - 0.01 / 15.0 * 0.99f64.powi(9)).abs() < 1e-15
        );
    }

    #[test]
    fn full_order_mass_is_one() {
        let spec = NoiseSpec::new(Preset::M.set(), 4.0, 0.05).unwrap();
        let d = channel_probs(&spec);
        let mut total = 0.0;
        // three sites, every subset, every assignment
        for mask in 0u32..8 {
            let k = mask.count_ones() as usize;
            let mut acc = 1.0;
            for _ in 0..k {
                acc *= d.total();
            }
            total += acc * (1.0 - spec.p).powi(3 - k as i32);
        }
        assert!((total - 1.0).abs() < 1e-14);
    }
}
