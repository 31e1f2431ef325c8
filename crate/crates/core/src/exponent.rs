//! Eigenvalue-exponent calculus for the whitened channel matrices.
//!
//! Eigenvalues are written as negative powers of the nominal SNR,
//! `lambda_i = rho^(-e_i)`; with eigenvalues ordered descending the exponents
//! come out ascending, and that is the storage convention everywhere in this
//! module. Probabilities of exponent configurations decay polynomially in
//! `rho`; each function here returns the decay exponent, with `f64::INFINITY`
//! standing for faster-than-polynomial decay (outside the support).

use thiserror::Error;

/// Slack used when testing the linear support constraints, so that grid
/// points sitting exactly on a constraint boundary are not lost to rounding.
const SUPPORT_TOL: f64 = 1e-12;

/// Decay exponent that may be `+infinity` (event outside the support).
pub type ExtendedExponent = f64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExponentError {
    #[error("exponent vector must be non-empty")]
    Empty,
    #[error("exponent values must be finite")]
    NonFinite,
    #[error("exponent vectors must have equal length")]
    DimensionMismatch,
    #[error("cross-link exponent must be nonnegative")]
    NegativeCrossExponent,
    #[error("expected vector of length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
}

/// Ordered eigenvalue scaling exponents.
///
/// Values are sorted ascending on construction, so the caller may pass them
/// in any order; the smallest exponent (largest eigenvalue) is first.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentVector {
    values: Vec<f64>,
}

impl ExponentVector {
    pub fn new(mut values: Vec<f64>) -> Result<Self, ExponentError> {
        if values.is_empty() {
            return Err(ExponentError::Empty);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ExponentError::NonFinite);
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The exponent triple `(beta, gamma, alpha_vec)` together with the scalar
/// cross-link exponent `alpha`: the full argument of the conditional density
/// exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTriple {
    pub beta: ExponentVector,
    pub gamma: ExponentVector,
    pub alpha_vec: ExponentVector,
    pub cross_exponent: f64,
}

impl ExponentTriple {
    pub fn new(
        beta: ExponentVector,
        gamma: ExponentVector,
        alpha_vec: ExponentVector,
        cross_exponent: f64,
    ) -> Result<Self, ExponentError> {
        if beta.len() != gamma.len() || beta.len() != alpha_vec.len() {
            return Err(ExponentError::DimensionMismatch);
        }
        if !(cross_exponent >= 0.0) {
            return Err(ExponentError::NegativeCrossExponent);
        }
        Ok(Self {
            beta,
            gamma,
            alpha_vec,
            cross_exponent,
        })
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Membership in the support set of the conditional eigenvalue-exponent
/// density: `beta_1 >= 0` and, for every index pair with `i + j >= n + 1`,
/// `alpha_i + beta_j >= alpha` and `gamma_i + beta_j >= alpha`.
pub fn support_contains(t: &ExponentTriple) -> bool {
    let n = t.dim();
    let beta = t.beta.values();
    let gamma = t.gamma.values();
    let avec = t.alpha_vec.values();
    let a = t.cross_exponent;
    if beta[0] < -SUPPORT_TOL {
        return false;
    }
    for i in 1..=n {
        for j in 1..=n {
            if i + j >= n + 1 {
                if avec[i - 1] + beta[j - 1] < a - SUPPORT_TOL {
                    return false;
                }
                if gamma[i - 1] + beta[j - 1] < a - SUPPORT_TOL {
                    return false;
                }
            }
        }
    }
    true
}

/// Decay exponent of the conditional density of `beta` given
/// `(gamma, alpha_vec)`, evaluated literally as
///
/// ```text
/// sum_j [ (2n+1-2j) beta_j - n (alpha - alpha_j)^+ - n (alpha - gamma_j)^+
///         + sum_{i=1}^{n-j} ( alpha - beta_j
///             - min( min(alpha_i, gamma_i), gamma_i + alpha_i - alpha ) )^+ ]
/// ```
///
/// Returns `+infinity` outside the support. The `gamma_i + alpha_i - alpha`
/// term may be negative; it is used unclipped, the outer `(.)^+` clips the
/// whole expression.
pub fn conditional_exponent(t: &ExponentTriple) -> ExtendedExponent {
    if !support_contains(t) {
        return f64::INFINITY;
    }
    let n = t.dim();
    let nf = n as f64;
    let beta = t.beta.values();
    let gamma = t.gamma.values();
    let avec = t.alpha_vec.values();
    let a = t.cross_exponent;
    let mut total = 0.0;
    for j in 1..=n {
        let bj = beta[j - 1];
        let mut term = (2.0 * nf + 1.0 - 2.0 * j as f64) * bj
            - nf * pos(a - avec[j - 1])
            - nf * pos(a - gamma[j - 1]);
        for i in 1..=(n - j) {
            let inner = avec[i - 1].min(gamma[i - 1]).min(gamma[i - 1] + avec[i - 1] - a);
            term += pos(a - bj - inner);
        }
        total += term;
    }
    total
}

/// Decay exponent of a point-to-point Wishart eigenvalue-exponent
/// configuration: with `m = min(p, q)` and ascending exponents `e`, the
/// weight on `e_j` is `2m + 1 - 2j + |p - q|`. Any negative exponent means
/// an eigenvalue above the `O(1)` level, which has exponentially small
/// probability, encoded as `+infinity`.
pub fn wishart_marginal_exponent(p: usize, q: usize, e: &ExponentVector) -> ExtendedExponent {
    let m = p.min(q);
    assert_eq!(
        e.len(),
        m,
        "exponent vector length {} does not match min({p},{q})",
        e.len()
    );
    let gap = p.abs_diff(q) as f64;
    let mf = m as f64;
    let mut total = 0.0;
    for (j, &ej) in e.values().iter().enumerate() {
        if ej < 0.0 {
            return f64::INFINITY;
        }
        total += (2.0 * mf - 1.0 - 2.0 * j as f64 + gap) * ej;
    }
    total
}

/// High-SNR exponent of `log det(I + rho^level W)` when the eigenvalues of
/// `W` scale as `rho^(-e_i)`: the log-det grows like
/// `sum_i (level - e_i)^+ * log(rho)`.
pub fn logdet_exponent(level: f64, e: &ExponentVector) -> f64 {
    e.values().iter().map(|&ei| pos(level - ei)).sum()
}

/// Joint decay exponent of the four-matrix event behind the fifth capacity
/// bound: the two whitened direct links are conditionally independent given
/// the cross links, so the joint exponent is the sum of both conditional
/// exponents and both cross-link marginals.
pub fn joint_exponent_b5(
    beta1: &ExponentVector,
    beta2: &ExponentVector,
    a21: &ExponentVector,
    a12: &ExponentVector,
    alpha: f64,
) -> ExtendedExponent {
    let t1 = ExponentTriple::new(beta1.clone(), a12.clone(), a21.clone(), alpha)
        .expect("b5 vectors must have equal length");
    let t2 = ExponentTriple::new(beta2.clone(), a21.clone(), a12.clone(), alpha)
        .expect("b5 vectors must have equal length");
    let n = beta1.len();
    let c1 = conditional_exponent(&t1);
    let c2 = conditional_exponent(&t2);
    let m1 = wishart_marginal_exponent(n, n, a21);
    let m2 = wishart_marginal_exponent(n, n, a12);
    c1 + c2 + m1 + m2
}
