//! Channel model: antenna/scaling profiles and i.i.d. Rayleigh realizations
//! with counter-based deterministic sampling.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("antenna counts must all be at least 1")]
    EmptyProfile,
    #[error("SNR sweep must be strictly increasing with at least 2 points")]
    BadSweep,
    #[error("cross-link exponent must be nonnegative and finite")]
    BadAlpha,
    #[error("channel matrix {name} has shape {got_rows}x{got_cols}, expected {rows}x{cols}")]
    DimensionMismatch {
        name: &'static str,
        got_rows: usize,
        got_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("channel matrix entries must be finite")]
    NonFinite,
    #[error("channel file is malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Antenna counts `(M1, N1, M2, N2)` of the two transmit-receive pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntennaProfile {
    pub m1: usize,
    pub n1: usize,
    pub m2: usize,
    pub n2: usize,
}

impl AntennaProfile {
    pub fn new(m1: usize, n1: usize, m2: usize, n2: usize) -> Result<Self, SimError> {
        if m1 == 0 || n1 == 0 || m2 == 0 || n2 == 0 {
            return Err(SimError::EmptyProfile);
        }
        Ok(Self { m1, n1, m2, n2 })
    }

    /// The `(n,n,n,n)` shorthand.
    pub fn symmetric(n: usize) -> Result<Self, SimError> {
        Self::new(n, n, n, n)
    }

    pub fn is_symmetric(&self) -> bool {
        self.m1 == self.n1 && self.n1 == self.m2 && self.m2 == self.n2
    }
}

/// SNR/INR scaling: direct links scale as `rho`, cross links as
/// `rho^alpha`, over the given nominal-SNR sweep in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingProfile {
    pub alpha: f64,
    pub rho_db: Vec<f64>,
}

impl ScalingProfile {
    pub fn new(alpha: f64, rho_db: Vec<f64>) -> Result<Self, SimError> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(SimError::BadAlpha);
        }
        if rho_db.len() < 2 || rho_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SimError::BadSweep);
        }
        Ok(Self { alpha, rho_db })
    }
}

pub(crate) type CMatrix = DMatrix<Complex<f64>>;

/// One quasi-static fading realization: `h_ij` is the `N_j x M_i` matrix of
/// the link from transmitter `i` to receiver `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub profile: AntennaProfile,
    pub h11: CMatrix,
    pub h12: CMatrix,
    pub h21: CMatrix,
    pub h22: CMatrix,
}

impl ChannelRealization {
    pub fn new(
        profile: AntennaProfile,
        h11: CMatrix,
        h12: CMatrix,
        h21: CMatrix,
        h22: CMatrix,
    ) -> Result<Self, SimError> {
        let check = |name: &'static str, m: &CMatrix, rows: usize, cols: usize| {
            if m.nrows() != rows || m.ncols() != cols {
                return Err(SimError::DimensionMismatch {
                    name,
                    got_rows: m.nrows(),
                    got_cols: m.ncols(),
                    rows,
                    cols,
                });
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(SimError::NonFinite);
            }
            Ok(())
        };
        check("h11", &h11, profile.n1, profile.m1)?;
        check("h12", &h12, profile.n2, profile.m1)?;
        check("h21", &h21, profile.n1, profile.m2)?;
        check("h22", &h22, profile.n2, profile.m2)?;
        Ok(Self {
            profile,
            h11,
            h12,
            h21,
            h22,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ChannelFile::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, SimError> {
        let file: ChannelFile =
            serde_json::from_str(s).map_err(|e| SimError::Malformed(e.to_string()))?;
        file.try_into()
    }
}

/// On-disk JSON schema: complex matrices as nested arrays of `[re, im]`.
#[derive(Serialize, Deserialize)]
struct ChannelFile {
    profile: AntennaProfile,
    h11: Vec<Vec<[f64; 2]>>,
    h12: Vec<Vec<[f64; 2]>>,
    h21: Vec<Vec<[f64; 2]>>,
    h22: Vec<Vec<[f64; 2]>>,
}

fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, SimError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if nrows == 0 || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(SimError::Malformed("ragged or empty matrix".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| {
        Complex::new(rows[r][c][0], rows[r][c][1])
    }))
}

impl From<&ChannelRealization> for ChannelFile {
    fn from(h: &ChannelRealization) -> Self {
        Self {
            profile: h.profile,
            h11: matrix_to_rows(&h.h11),
            h12: matrix_to_rows(&h.h12),
            h21: matrix_to_rows(&h.h21),
            h22: matrix_to_rows(&h.h22),
        }
    }
}

impl TryFrom<ChannelFile> for ChannelRealization {
    type Error = SimError;
    fn try_from(f: ChannelFile) -> Result<Self, SimError> {
        ChannelRealization::new(
            f.profile,
            rows_to_matrix(&f.h11)?,
            rows_to_matrix(&f.h12)?,
            rows_to_matrix(&f.h21)?,
            rows_to_matrix(&f.h22)?,
        )
    }
}

/// Draws one i.i.d. Rayleigh realization. Entries are circularly symmetric
/// complex Gaussian with unit variance (real and imaginary parts each of
/// variance 1/2). The `(seed, trial_index)` pair fully determines the
/// realization: the trial index selects an independent stream of the
/// counter-based generator, so trials carry no sequential dependence and can
/// be drawn on any number of workers.
pub fn sample_channel(profile: &AntennaProfile, seed: u64, trial_index: u64) -> ChannelRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    let mut draw = |rows: usize, cols: usize| -> CMatrix {
        DMatrix::from_fn(rows, cols, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
    };
    let h11 = draw(profile.n1, profile.m1);
    let h12 = draw(profile.n2, profile.m1);
    let h21 = draw(profile.n1, profile.m2);
    let h22 = draw(profile.n2, profile.m2);
    ChannelRealization::new(*profile, h11, h12, h21, h22).expect("sampled dimensions consistent")
}
