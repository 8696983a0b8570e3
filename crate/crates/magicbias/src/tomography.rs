//! Logical process tomography: expectations from tallies, pseudoinverse
//! reconstruction of the PTM, and Pauli-twirled noise metrics.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::Tallies;
use crate::logical::{InputState, BASES};

/// Rows and columns ordered I, X, Y, Z; `r[i][j] = tr(P_i L(P_j)) / 2`.
pub type Ptm = [[f64; 4]; 4];

/// `<P>` for input state s (rows, `InputState::ALL` order) and basis X, Y, Z.
pub type Expectations = [[f64; 3]; 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// One readout rotation chosen per recorded magic outcome: 12 circuits.
    #[default]
    Adaptive,
    /// Both rotations run for every (state, basis), each post-selected on
    /// its own outcome: 24 circuits.
    NonAdaptive,
}

impl Mode {
    pub fn circuits(self) -> usize {
        match self {
            Mode::Adaptive => 12,
            Mode::NonAdaptive => 24,
        }
    }
}

pub fn ideal_t_ptm() -> Ptm {
    let (c, s) = (FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn identity_ptm() -> Ptm {
    let mut r = [[0.0; 4]; 4];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    r
}

pub fn pauli_channel_ptm(p_x: f64, p_y: f64, p_z: f64) -> Ptm {
    let p_i = 1.0 - p_x - p_y - p_z;
    let mut r = identity_ptm();
    r[1][1] = p_i + p_x - p_y - p_z;
    r[2][2] = p_i - p_x + p_y - p_z;
    r[3][3] = p_i - p_x - p_y + p_z;
    r
}

pub fn compose(a: &Ptm, b: &Ptm) -> Ptm {
    to_ptm(&(from_ptm(a) * from_ptm(b)))
}

fn from_ptm(r: &Ptm) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| r[i][j])
}

fn to_ptm(m: &Matrix4<f64>) -> Ptm {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// Predicted expectations of a process.
pub fn forward(r: &Ptm) -> Expectations {
    let mut y = [[0.0; 3]; 4];
    for (s, st) in InputState::ALL.iter().enumerate() {
        let b = st.bloch();
        for j in 0..3 {
            y[s][j] = r[j + 1][0] + (0..3).map(|i| r[j + 1][i + 1] * b[i]).sum::<f64>();
        }
    }
    y
}

/// Conditioned on acceptance and no leakage.
pub fn expectations(t: &Tallies, mode: Mode) -> Result<Expectations> {
    let mut y = [[0.0; 3]; 4];
    for (s, st) in InputState::ALL.iter().enumerate() {
        for (beta, basis) in BASES.iter().enumerate() {
            let (o0, o1) = match mode {
                Mode::Adaptive => {
                    let a = t.adaptive(s, beta);
                    (a.outcome[0], a.outcome[1])
                }
                Mode::NonAdaptive => {
                    let (b0, b1) = (t.branch(s, beta, 0), t.branch(s, beta, 1));
                    (b0.outcome[0] + b1.outcome[0], b0.outcome[1] + b1.outcome[1])
                }
            };
            if o0 + o1 <= 0.0 {
                return Err(Error::NoAcceptedMass(format!("{}/{basis:?}", st.name())));
            }
            y[s][beta] = (o0 - o1) / (o0 + o1);
        }
    }
    Ok(y)
}

/// 12 x 12 design matrix; unknowns are rows X, Y, Z of the PTM, four
/// entries each.
fn design() -> DMatrix<f64> {
    let mut a = DMatrix::zeros(12, 12);
    for (s, st) in InputState::ALL.iter().enumerate() {
        let b = st.bloch();
        for j in 0..3 {
            let row = s * 3 + j;
            a[(row, j * 4)] = 1.0;
            for i in 0..3 {
                a[(row, j * 4 + i + 1)] = b[i];
            }
        }
    }
    a
}

/// Least-squares PTM; the first row is fixed to (1, 0, 0, 0).
pub fn reconstruct_ptm(y: &Expectations) -> Result<Ptm> {
    let a = design();
    let pinv = a
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::Reconstruction(e.to_string()))?;
    let check = &pinv * &a;
    if (check - DMatrix::identity(12, 12)).amax() > 1e-9 {
        return Err(Error::Reconstruction(
            "design matrix is rank deficient".into(),
        ));
    }
    let rhs = DVector::from_iterator(12, y.iter().flat_map(|r| r.iter().copied()));
    let sol = pinv * rhs;
    let mut r = [[0.0; 4]; 4];
    r[0][0] = 1.0;
    for j in 0..3 {
        for i in 0..4 {
            r[j + 1][i] = sol[j * 4 + i];
        }
    }
    Ok(r)
}

/// `p_z / (p_x + p_y)` style ratio; NaN when both sides vanish.
pub fn bias_ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseMetrics {
    pub r_avg: f64,
    pub r_proc: f64,
    pub p_xl: f64,
    pub p_yl: f64,
    pub p_zl: f64,
    pub eta_zl: f64,
    pub eta_xl: f64,
    pub eta_yl: f64,
    /// Frobenius norm of the off-diagonal part of the noise map.
    pub residual: f64,
    pub accept_rate: f64,
    pub leak_rate: f64,
}

/// Noise map `E = R R_T^-1`.
pub fn noise_map(r: &Ptm) -> Ptm {
    let rt = from_ptm(&ideal_t_ptm());
    to_ptm(&(from_ptm(r) * rt.transpose()))
}

pub fn extract_noise(r: &Ptm) -> Result<NoiseMetrics> {
    let e = noise_map(r);
    let (lx, ly, lz) = (e[1][1], e[2][2], e[3][3]);
    let p_i = (1.0 + lx + ly + lz) / 4.0;
    let p_x = (1.0 + lx - ly - lz) / 4.0;
    let p_y = (1.0 - lx + ly - lz) / 4.0;
    let p_z = (1.0 - lx - ly + lz) / 4.0;
    for (name, v) in [("p_I", p_i), ("p_X", p_x), ("p_Y", p_y), ("p_Z", p_z)] {
        if v < -1e-9 {
            return Err(Error::Reconstruction(format!("{name} = {v:e}")));
        }
    }
    let mut residual = 0.0;
    for (i, row) in e.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                residual += v * v;
            }
        }
    }
    let r_proc = 1.0 - p_i;
    Ok(NoiseMetrics {
        r_avg: 2.0 / 3.0 * r_proc,
        r_proc,
        p_xl: p_x,
        p_yl: p_y,
        p_zl: p_z,
        eta_zl: bias_ratio(p_z, p_x + p_y),
        eta_xl: bias_ratio(p_x, p_y + p_z),
        eta_yl: bias_ratio(p_y, p_x + p_z),
        residual: residual.sqrt(),
        accept_rate: 1.0,
        leak_rate: 0.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub ptm: Ptm,
    pub noise: Ptm,
    pub metrics: NoiseMetrics,
}

/// Full pipeline from tallies; rates are fractions of the enumerated mass
/// averaged over the twelve (state, basis) settings.
pub fn analyse(t: &Tallies, mode: Mode) -> Result<Reconstruction> {
    let y = expectations(t, mode)?;
    let ptm = reconstruct_ptm(&y)?;
    let mut metrics = extract_noise(&ptm)?;
    let (mut acc, mut leak) = (0.0, 0.0);
    for s in 0..4 {
        for beta in 0..3 {
            let a = t.adaptive(s, beta);
            acc += a.accept;
            leak += a.leak;
        }
    }
    metrics.accept_rate = acc / (12.0 * t.total);
    metrics.leak_rate = leak / (12.0 * t.total);
    Ok(Reconstruction {
        noise: noise_map(&ptm),
        ptm,
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Ptm, b: &Ptm, tol: f64) -> bool {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn ideal_and_identity_round_trip() {
        for r in [ideal_t_ptm(), identity_ptm()] {
            assert!(close(&reconstruct_ptm(&forward(&r)).unwrap(), &r, 1e-12));
        }
        let y = forward(&ideal_t_ptm());
        assert_eq!(y[0][2], 1.0);
        assert!((y[2][0] - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn depolarizing_closed_form() {
        let p = 0.03;
        let r = compose(
            &pauli_channel_ptm(p / 3.0, p / 3.0, p / 3.0),
            &ideal_t_ptm(),
        );
        let m = extract_noise(&r).unwrap();
        assert!((m.r_proc - 0.03).abs() < 1e-14);
        assert!((m.r_avg - 0.02).abs() < 1e-14);
        assert!((m.eta_zl - 0.5).abs() < 1e-12);
        assert!(m.residual < 1e-14);
    }

    #[test]
    fn identity_noise_has_undefined_bias() {
        let m = extract_noise(&ideal_t_ptm()).unwrap();
        assert!(m.r_proc.abs() < 1e-15 && m.eta_zl.is_nan());
    }

    #[test]
    fn negative_rates_are_rejected() {
        let mut r = ideal_t_ptm();
        r[3][3] = 1.5;
        assert!(matches!(extract_noise(&r), Err(Error::Reconstruction(_))));
    }
}
