//! The seven mutual-information bounds and the Han-Kobayashi power split for
//! a given channel realization.

use super::channel::{CMatrix, ChannelRealization, SimError};
use nalgebra::DMatrix;
use num_complex::Complex;

/// Values of the seven capacity bounds, bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBounds {
    pub ib1: f64,
    pub ib2: f64,
    pub ib3: f64,
    pub ib4: f64,
    pub ib5: f64,
    pub ib6: f64,
    pub ib7: f64,
}

impl RateBounds {
    pub fn get(&self, index: usize) -> f64 {
        match index {
            1 => self.ib1,
            2 => self.ib2,
            3 => self.ib3,
            4 => self.ib4,
            5 => self.ib5,
            6 => self.ib6,
            7 => self.ib7,
            _ => panic!("bound index out of range: {index}"),
        }
    }
}

fn eye(n: usize) -> CMatrix {
    DMatrix::identity(n, n)
}

fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex::new(0.5, 0.0)
}

/// `log2 det` of a Hermitian positive-definite matrix via Cholesky, with an
/// eigendecomposition fallback should the factorization fail numerically.
fn logdet2(a: &CMatrix) -> f64 {
    let h = hermitize(a);
    if let Some(chol) = h.clone().cholesky() {
        let l = chol.l();
        2.0 * (0..l.nrows()).map(|i| l[(i, i)].re.log2()).sum::<f64>()
    } else {
        let eig = h.symmetric_eigen();
        eig.eigenvalues.iter().map(|&ev| ev.max(1e-300).log2()).sum()
    }
}

fn inverse_hpd(a: &CMatrix) -> CMatrix {
    let h = hermitize(a);
    if let Some(c) = h.clone().cholesky() {
        return c.inverse();
    }
    let eig = h.symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(1.0f64, f64::max);
    let floor = max_ev * 1e-14;
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|ev| Complex::new(1.0 / ev.max(floor), 0.0)));
    v * d * v.adjoint()
}

/// `A^(-1/2)` of a Hermitian positive-definite matrix via eigendecomposition.
/// The matrices used here are `I` plus a positive-semidefinite part, hence
/// eigenvalues at least 1; the relative floor is a safety net only.
pub(crate) fn inverse_sqrt_hpd(a: &CMatrix) -> CMatrix {
    let h = hermitize(a);
    let eig = h.symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(1.0f64, f64::max);
    let floor = max_ev * 1e-14;
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|ev| Complex::new(1.0 / ev.max(floor).sqrt(), 0.0)),
    );
    v * d * v.adjoint()
}

fn scaled_gram(h: &CMatrix, scale: f64) -> CMatrix {
    (h * h.adjoint()) * Complex::new(scale, 0.0)
}

/// Evaluates the seven log-det bounds at nominal SNR `rho` with cross-link
/// scaling `rho^alpha`. The fourth bound is the sum of its two log-det
/// terms, mirroring the third under user exchange.
pub fn mutual_info_bounds(
    h: &ChannelRealization,
    rho: f64,
    alpha: f64,
) -> Result<RateBounds, SimError> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(SimError::Malformed(format!("rho must be positive, got {rho}")));
    }
    let all = [&h.h11, &h.h12, &h.h21, &h.h22];
    if all
        .iter()
        .any(|m| m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()))
    {
        return Err(SimError::NonFinite);
    }
    let p = &h.profile;
    let rho_c = rho.powf(alpha);

    // whitening matrices of the cross links
    let p12 = eye(p.m1) + (h.h12.adjoint() * &h.h12) * Complex::new(rho_c, 0.0);
    let p21 = eye(p.m2) + (h.h21.adjoint() * &h.h21) * Complex::new(rho_c, 0.0);
    let p12_inv = inverse_hpd(&p12);
    let p21_inv = inverse_hpd(&p21);

    // recurring building blocks
    let g11 = scaled_gram(&h.h11, rho); // rho H11 H11^+
    let g22 = scaled_gram(&h.h22, rho);
    let g12 = scaled_gram(&h.h12, rho_c); // rho^a H12 H12^+
    let g21 = scaled_gram(&h.h21, rho_c);
    let w11 = (&h.h11 * &p12_inv * h.h11.adjoint()) * Complex::new(rho, 0.0);
    let w22 = (&h.h22 * &p21_inv * h.h22.adjoint()) * Complex::new(rho, 0.0);

    let ib1 = logdet2(&(eye(p.n1) + &g11));
    let ib2 = logdet2(&(eye(p.n2) + &g22));
    let ib3 = logdet2(&(eye(p.n2) + &g12 + &g22)) + logdet2(&(eye(p.n1) + &w11));
    let ib4 = logdet2(&(eye(p.n1) + &g21 + &g11)) + logdet2(&(eye(p.n2) + &w22));
    let ib5 = logdet2(&(eye(p.n1) + &w11 + &g21)) + logdet2(&(eye(p.n2) + &g12 + &w22));
    let ib6 = logdet2(&(eye(p.n1) + &g21 + &g11))
        + logdet2(&(eye(p.n2) + &g12 + &w22))
        + logdet2(&(eye(p.n1) + &w11));
    let ib7 = logdet2(&(eye(p.n2) + &g12 + &g22))
        + logdet2(&(eye(p.n1) + &g21 + &w11))
        + logdet2(&(eye(p.n2) + &w22));

    Ok(RateBounds {
        ib1,
        ib2,
        ib3,
        ib4,
        ib5,
        ib6,
        ib7,
    })
}

/// The channel-dependent Han-Kobayashi covariance split: each transmitter
/// spends half its power on the common part and whitens the private part
/// against the cross link it creates.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSplit {
    /// Common-part covariance of user 1: `I/2`.
    pub k11: CMatrix,
    /// Private-part covariance of user 1: `(1/2)(I + rho^a H12^+ H12)^-1`.
    pub k12: CMatrix,
    /// Common-part covariance of user 2: `I/2`.
    pub k21: CMatrix,
    /// Private-part covariance of user 2: `(1/2)(I + rho^a H21^+ H21)^-1`.
    pub k22: CMatrix,
}

pub fn hk_power_split(h: &ChannelRealization, rho: f64, alpha: f64) -> PowerSplit {
    let p = &h.profile;
    let rho_c = rho.powf(alpha);
    let half = Complex::new(0.5, 0.0);
    let p12 = eye(p.m1) + (h.h12.adjoint() * &h.h12) * Complex::new(rho_c, 0.0);
    let p21 = eye(p.m2) + (h.h21.adjoint() * &h.h21) * Complex::new(rho_c, 0.0);
    PowerSplit {
        k11: eye(p.m1) * half,
        k12: inverse_hpd(&p12) * half,
        k21: eye(p.m2) * half,
        k22: inverse_hpd(&p21) * half,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::channel::{sample_channel, AntennaProfile, ChannelRealization};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use num_complex::Complex;

    fn scalar_channel(h11: f64, h12: f64, h21: f64, h22: f64) -> ChannelRealization {
        let p = AntennaProfile::symmetric(1).unwrap();
        let m = |x: f64| DMatrix::from_element(1, 1, Complex::new(x, 0.0));
        ChannelRealization::new(p, m(h11), m(h12), m(h21), m(h22)).unwrap()
    }

    #[test]
    fn zero_channel_gives_zero_bounds() {
        let h = scalar_channel(0.0, 0.0, 0.0, 0.0);
        let b = mutual_info_bounds(&h, 10.0, 1.0).unwrap();
        for k in 1..=7 {
            assert_abs_diff_eq!(b.get(k), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn scalar_unit_gains_examples() {
        let h = scalar_channel(1.0, 1.0, 1.0, 1.0);
        let b = mutual_info_bounds(&h, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(b.ib1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.ib2, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.ib3, 3f64.log2() + 1.5f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn user_swap_symmetry() {
        let p = AntennaProfile::symmetric(2).unwrap();
        let h = sample_channel(&p, 11, 3);
        let swapped = ChannelRealization::new(
            p,
            h.h22.clone(),
            h.h21.clone(),
            h.h12.clone(),
            h.h11.clone(),
        )
        .unwrap();
        let b = mutual_info_bounds(&h, 31.6, 0.7).unwrap();
        let s = mutual_info_bounds(&swapped, 31.6, 0.7).unwrap();
        assert_abs_diff_eq!(b.ib1, s.ib2, epsilon = 1e-9);
        assert_abs_diff_eq!(b.ib2, s.ib1, epsilon = 1e-9);
        assert_abs_diff_eq!(b.ib3, s.ib4, epsilon = 1e-9);
        assert_abs_diff_eq!(b.ib4, s.ib3, epsilon = 1e-9);
        assert_abs_diff_eq!(b.ib5, s.ib5, epsilon = 1e-9);
        assert_abs_diff_eq!(b.ib6, s.ib7, epsilon = 1e-9);
        assert_abs_diff_eq!(b.ib7, s.ib6, epsilon = 1e-9);
    }

    #[test]
    fn bounds_nondecreasing_in_rho() {
        let p = AntennaProfile::symmetric(2).unwrap();
        for trial in 0..20 {
            let h = sample_channel(&p, 5, trial);
            let lo = mutual_info_bounds(&h, 10.0, 0.8).unwrap();
            let hi = mutual_info_bounds(&h, 100.0, 0.8).unwrap();
            for k in 1..=7 {
                assert!(hi.get(k) >= lo.get(k) - 1e-9, "bound {k} decreased");
            }
        }
    }

    #[test]
    fn power_split_examples() {
        // scalar, |h12| = 1, rho^alpha = 1 -> K12 = 1/4
        let h = scalar_channel(1.0, 1.0, 0.0, 1.0);
        let s = hk_power_split(&h, 1.0, 1.0);
        assert_abs_diff_eq!(s.k12[(0, 0)].re, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(s.k11[(0, 0)].re, 0.5, epsilon = 1e-12);
        // zero cross link: private part gets the full remaining half
        let s = hk_power_split(&scalar_channel(1.0, 0.0, 0.0, 1.0), 1.0, 1.0);
        assert_abs_diff_eq!(s.k12[(0, 0)].re, 0.5, epsilon = 1e-12);
        let total = s.k11[(0, 0)].re + s.k12[(0, 0)].re;
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn power_split_respects_power_constraint() {
        let p = AntennaProfile::new(2, 2, 3, 2).unwrap();
        for trial in 0..10 {
            let h = sample_channel(&p, 3, trial);
            let s = hk_power_split(&h, 100.0, 1.2);
            let tr = |m: &super::CMatrix| m.diagonal().iter().map(|z| z.re).sum::<f64>();
            assert!(tr(&s.k11) + tr(&s.k12) <= p.m1 as f64 + 1e-9);
            assert!(tr(&s.k21) + tr(&s.k22) <= p.m2 as f64 + 1e-9);
        }
    }
}
