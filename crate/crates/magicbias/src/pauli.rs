//! Pauli strings in symplectic form with phases, and the single-gate
//! Clifford conjugation rules used by the propagation engine.
//!
//! A `PauliString` is `i^phase * P_1 ⊗ ... ⊗ P_n` where each factor is
//! picked from {I, X, Y, Z} by its (x, z) bit pair, with (1, 1) meaning Y.
//! Bits are packed into one word, so at most 64 qubits are representable.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli1 {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        Ok(PauliString {
            n,
            x: 0,
            z: 0,
            phase: 0,
        })
    }

    /// Builds from raw bit words; bits above `n` must be clear.
    pub fn from_bits(n: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        if (x | z) & !mask(n) != 0 {
            let q = 63 - ((x | z) & !mask(n)).leading_zeros() as usize;
            return Err(Error::OutOfRange { qubit: q, n });
        }
        Ok(PauliString {
            n,
            x,
            z,
            phase: phase & 3,
        })
    }

    pub fn single(n: usize, q: usize, p: Pauli1) -> Result<Self> {
        let mut s = Self::identity(n)?;
        s.set(q, p)?;
        Ok(s)
    }

    /// Product of single-qubit factors, each with its own phase-free letter.
    pub fn from_factors(n: usize, factors: &[(usize, Pauli1)]) -> Result<Self> {
        let mut s = Self::identity(n)?;
        for &(q, p) in factors {
            s = s.multiply(&Self::single(n, q, p)?)?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn x_bits(&self) -> u64 {
        self.x
    }
    pub fn z_bits(&self) -> u64 {
        self.z
    }
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    pub fn get(&self, q: usize) -> Pauli1 {
        Pauli1::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli1) -> Result<()> {
        if q >= self.n {
            return Err(Error::OutOfRange {
                qubit: q,
                n: self.n,
            });
        }
        let (xb, zb) = p.bits();
        self.x = (self.x & !(1 << q)) | (u64::from(xb) << q);
        self.z = (self.z & !(1 << q)) | (u64::from(zb) << q);
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0 && self.phase == 0
    }

    /// True when the bit part is trivial, whatever the phase.
    pub fn is_trivial(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::SizeMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, o: &Self) -> Self {
        let (x1, z1, x2, z2) = (self.x, self.z, o.x, o.z);
        let y1 = x1 & z1;
        let xo1 = x1 & !z1;
        let zo1 = !x1 & z1;
        let y2 = x2 & z2;
        let xo2 = x2 & !z2;
        let zo2 = !x2 & z2;
        // sigma_a sigma_b = i^{g} sigma_{a+b}; plus/minus collect g = +1 / -1.
        let plus = (y1 & zo2) | (xo1 & y2) | (zo1 & xo2);
        let minus = (y1 & xo2) | (xo1 & zo2) | (zo1 & y2);
        let g = plus.count_ones() as i64 - minus.count_ones() as i64;
        let phase = (i64::from(self.phase) + i64::from(o.phase) + g).rem_euclid(4) as u8;
        PauliString {
            n: self.n,
            x: x1 ^ x2,
            z: z1 ^ z2,
            phase,
        }
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_size(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, o: &Self) -> bool {
        ((self.x & o.z) ^ (self.z & o.x)).count_ones().is_multiple_of(2)
    }

    /// Restriction to the qubits in `keep`, phase dropped.
    pub fn restrict(&self, keep: u64) -> Self {
        PauliString {
            n: self.n,
            x: self.x & keep,
            z: self.z & keep,
            phase: 0,
        }
    }

    /// Removes the factor on qubit `q` (used when a measurement consumes it).
    pub fn clear(&mut self, q: usize) {
        self.x &= !(1 << q);
        self.z &= !(1 << q);
    }

    /// `g · self · g†`.
    pub fn conjugate(&self, g: &CliffordGate) -> Result<Self> {
        g.validate(self.n)?;
        let mut p = *self;
        p.conjugate_in_place(g);
        Ok(p)
    }

    pub(crate) fn conjugate_in_place(&mut self, g: &CliffordGate) {
        match *g {
            CliffordGate::Cnot(c, t) => self.cnot(c, t),
            CliffordGate::Cz(a, b) => {
                self.h(b);
                self.cnot(a, b);
                self.h(b);
            }
            CliffordGate::H(q) => self.h(q),
            CliffordGate::S(q) => {
                let xq = self.x >> q & 1;
                let zq = self.z >> q & 1;
                if xq & zq == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
                self.z ^= xq << q;
            }
            CliffordGate::Sdg(q) => {
                let xq = self.x >> q & 1;
                let zq = self.z >> q & 1;
                if xq == 1 && zq == 0 {
                    self.phase = (self.phase + 2) & 3;
                }
                self.z ^= xq << q;
            }
            CliffordGate::X(q) => {
                if self.z >> q & 1 == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
            }
            CliffordGate::Z(q) => {
                if self.x >> q & 1 == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
            }
            CliffordGate::Y(q) => {
                if (self.x ^ self.z) >> q & 1 == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
            }
        }
    }

    fn h(&mut self, q: usize) {
        let xq = self.x >> q & 1;
        let zq = self.z >> q & 1;
        if xq & zq == 1 {
            self.phase = (self.phase + 2) & 3;
        }
        self.x = (self.x & !(1 << q)) | (zq << q);
        self.z = (self.z & !(1 << q)) | (xq << q);
    }

    fn cnot(&mut self, c: usize, t: usize) {
        let xc = self.x >> c & 1;
        let zc = self.z >> c & 1;
        let xt = self.x >> t & 1;
        let zt = self.z >> t & 1;
        if xc & zt & (xt ^ zc ^ 1) == 1 {
            self.phase = (self.phase + 2) & 3;
        }
        self.x ^= xc << t;
        self.z ^= zt << c;
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses the canonical text form, e.g. `+X1Z4Z5`, `-iY2`, `I`.
    /// Indices are 1-based.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let err = || Error::ParsePauli(s.to_string());
        let t = s.trim();
        let (phase, mut rest) = if let Some(r) = t.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (2, r)
        } else {
            (0, t)
        };
        let mut out = Self::identity(n)?.with_phase(phase);
        if rest == "I" || rest.is_empty() {
            return if rest.is_empty() && t.is_empty() {
                Err(err())
            } else {
                Ok(out)
            };
        }
        while !rest.is_empty() {
            let mut chars = rest.chars();
            let letter = match chars.next() {
                Some('X') => Pauli1::X,
                Some('Y') => Pauli1::Y,
                Some('Z') => Pauli1::Z,
                _ => return Err(err()),
            };
            let digits: String = chars.clone().take_while(|c| c.is_ascii_digit()).collect();
            if digits.is_empty() {
                return Err(err());
            }
            let idx: usize = digits.parse().map_err(|_| err())?;
            if idx == 0 || idx > n {
                return Err(Error::OutOfRange {
                    qubit: idx.saturating_sub(1),
                    n,
                });
            }
            if out.get(idx - 1) != Pauli1::I {
                return Err(err());
            }
            out.set(idx - 1, letter)?;
            rest = &rest[1 + digits.len()..];
        }
        Ok(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{sign}")?;
        if self.is_trivial() {
            return write!(f, "I");
        }
        for q in 0..self.n {
            let p = self.get(q);
            if p != Pauli1::I {
                write!(f, "{}{}", p.letter(), q + 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({}; n={})", self, self.n)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CliffordGate {
    Cnot(usize, usize),
    Cz(usize, usize),
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            CliffordGate::Cnot(a, b) | CliffordGate::Cz(a, b) => (a, Some(b)),
            CliffordGate::H(q)
            | CliffordGate::S(q)
            | CliffordGate::Sdg(q)
            | CliffordGate::X(q)
            | CliffordGate::Y(q)
            | CliffordGate::Z(q) => (q, None),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let (a, b) = self.qubits();
        if a >= n {
            return Err(Error::OutOfRange { qubit: a, n });
        }
        if let Some(b) = b {
            if b >= n {
                return Err(Error::OutOfRange { qubit: b, n });
            }
            if a == b {
                return Err(Error::RepeatedQubit(a));
            }
        }
        Ok(())
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    pub fn inverse(&self) -> CliffordGate {
        match *self {
            CliffordGate::S(q) => CliffordGate::Sdg(q),
            CliffordGate::Sdg(q) => CliffordGate::S(q),
            g => g,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            CliffordGate::Cnot(c, t) => format!("CNOT {} {}", c, t),
            CliffordGate::Cz(a, b) => format!("CZ {} {}", a, b),
            CliffordGate::H(q) => format!("H {}", q),
            CliffordGate::S(q) => format!("S {}", q),
            CliffordGate::Sdg(q) => format!("SDG {}", q),
            CliffordGate::X(q) => format!("X {}", q),
            CliffordGate::Y(q) => format!("Y {}", q),
            CliffordGate::Z(q) => format!("Z {}", q),
        }
    }
}

/// The 15 non-identity two-qubit Paulis in a fixed order: index `4a + b - 1`
/// for first-qubit letter `a` and second-qubit letter `b` (0=I,1=X,2=Y,3=Z).
pub fn two_qubit_paulis() -> [(Pauli1, Pauli1); 15] {
    const L: [Pauli1; 4] = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z];
    let mut out = [(Pauli1::I, Pauli1::I); 15];
    for k in 1..16 {
        out[k - 1] = (L[k / 4], L[k % 4]);
    }
    out
}

/// Embeds a two-qubit Pauli on qubits `(a, b)` of an n-qubit register.
pub fn embed_two(n: usize, a: usize, b: usize, p: (Pauli1, Pauli1)) -> Result<PauliString> {
    PauliString::from_factors(n, &[(a, p.0), (b, p.1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> PauliString {
        PauliString::parse(n, s).unwrap()
    }

    #[test]
    fn xz_is_minus_i_y() {
        let r = p(1, "X1").multiply(&p(1, "Z1")).unwrap();
        assert_eq!(r, p(1, "-iY1"));
    }

    #[test]
    fn squares_are_phases() {
        for s in ["X1", "Y1", "Z1", "X1Z2", "Y1Y2"] {
            let a = p(2, s);
            let sq = a.multiply(&a).unwrap();
            assert!(sq.is_trivial());
            assert_eq!(sq.phase(), 0);
        }
    }

    #[test]
    fn qubitwise_product() {
        let r = p(2, "X1Z2").multiply(&p(2, "Z1X2")).unwrap();
        assert_eq!(r.restrict(u64::MAX), p(2, "Y1Y2"));
    }

    #[test]
    fn commutation_examples() {
        assert!(!p(2, "X1").commutes(&p(2, "Z1")).unwrap());
        assert!(p(2, "X1").commutes(&p(2, "Z2")).unwrap());
        assert!(p(2, "Y1Y2").commutes(&p(2, "X1X2")).unwrap());
    }

    #[test]
    fn weights() {
        assert_eq!(PauliString::identity(7).unwrap().weight(), 0);
        assert_eq!(p(7, "Z5Y7").weight(), 2);
        assert_eq!(p(7, "X1Z4Z5").weight(), 3);
    }

    #[test]
    fn conjugation_examples() {
        let x0 = p(2, "X1");
        assert_eq!(
            x0.conjugate(&CliffordGate::Cnot(0, 1)).unwrap(),
            p(2, "X1X2")
        );
        assert_eq!(x0.conjugate(&CliffordGate::Cz(0, 1)).unwrap(), p(2, "X1Z2"));
        assert_eq!(
            p(1, "X1").conjugate(&CliffordGate::S(0)).unwrap(),
            p(1, "Y1")
        );
        assert_eq!(
            p(1, "Y1").conjugate(&CliffordGate::S(0)).unwrap(),
            p(1, "-X1")
        );
        assert_eq!(
            p(1, "X1").conjugate(&CliffordGate::Sdg(0)).unwrap(),
            p(1, "-Y1")
        );
        assert_eq!(
            p(1, "Y1").conjugate(&CliffordGate::H(0)).unwrap(),
            p(1, "-Y1")
        );
        assert_eq!(
            p(2, "Z2").conjugate(&CliffordGate::Cnot(0, 1)).unwrap(),
            p(2, "Z1Z2")
        );
    }

    #[test]
    fn text_round_trip() {
        for s in ["+X1Z4Z5", "-Y3", "+iZ2", "-iX1X7", "+I"] {
            assert_eq!(p(7, s).to_string(), s);
        }
        assert!(PauliString::parse(7, "X8").is_err());
        assert!(PauliString::parse(7, "X1X1").is_err());
        assert!(PauliString::parse(7, "Q1").is_err());
    }

    #[test]
    fn bad_gates_rejected() {
        let a = p(2, "X1");
        assert!(a.conjugate(&CliffordGate::Cnot(0, 0)).is_err());
        assert!(a.conjugate(&CliffordGate::H(2)).is_err());
        assert!(a.multiply(&p(3, "X1")).is_err());
    }
}
