//! Numerical re-derivation of outage exponents.
//!
//! By the Laplace principle the outage exponent is the minimum of the joint
//! eigenvalue-exponent decay rate over all exponent configurations that put
//! the mutual-information bound below the target rate. This module minimizes
//! that joint exponent by exhaustive search on a grid over the exponent box,
//! followed by local refinement rounds that halve the step around the
//! incumbent. The reported `certificate_gap` is the objective's Lipschitz
//! bound (sum of absolute weights) times the final step.

use crate::exponent::{
    conditional_exponent, wishart_marginal_exponent, ExponentTriple, ExponentVector,
};

const TOL: f64 = 1e-9;

/// Which exponent vector a rate term applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorId {
    /// Whitened direct link of user 1.
    Beta1,
    /// Whitened direct link of user 2.
    Beta2,
    /// Cross link into receiver 1.
    Cross21,
    /// Cross link into receiver 2.
    Cross12,
    /// Single point-to-point eigenvalue vector.
    Mu,
}

/// One `logdet_exponent(level, vector)` term of the rate-outage constraint.
#[derive(Debug, Clone, Copy)]
pub struct RateTerm {
    pub level: f64,
    pub vector: VectorId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Point-to-point marginal exponent of a `p x q` channel.
    PtpMarginal { p: usize, q: usize },
    /// Joint exponent of the fifth-bound event (two conditionals plus the
    /// two cross-link marginals). With `restrict_typical` the search is
    /// limited to configurations where both conditional terms are
    /// nonnegative and each whitened link is determinant-consistent:
    /// the determinant identity det(W) = det(HH†) / prod(1 + rho^a mu_i) /
    /// prod(1 + rho^a lambda_i) forces sum(beta) >= sum(a - gamma_i)^+ +
    /// sum(a - alpha_i)^+, because det(HH†) is O(1) with a super-polynomial
    /// upper tail. The printed support set omits this, and without it the
    /// density exponent admits configurations of probability zero at
    /// polynomial order.
    B5Joint { restrict_typical: bool },
}

/// A fully specified exponent-minimization problem.
#[derive(Debug, Clone)]
pub struct OutageProblem {
    pub n: usize,
    pub alpha: f64,
    pub rate_terms: Vec<RateTerm>,
    /// Rate threshold `r`: the constraint is `sum of logdet exponents <= r`.
    /// `f64::INFINITY` removes the constraint.
    pub threshold: f64,
    pub objective: Objective,
}

impl OutageProblem {
    pub fn ptp(p: usize, q: usize, r: f64) -> Self {
        Self {
            n: p.min(q),
            alpha: 1.0,
            rate_terms: vec![RateTerm {
                level: 1.0,
                vector: VectorId::Mu,
            }],
            threshold: r,
            objective: Objective::PtpMarginal { p, q },
        }
    }

    pub fn b5(n: usize, alpha: f64, r_s: f64, restrict_typical: bool) -> Self {
        Self {
            n,
            alpha,
            rate_terms: vec![
                RateTerm {
                    level: 1.0,
                    vector: VectorId::Beta1,
                },
                RateTerm {
                    level: 1.0,
                    vector: VectorId::Beta2,
                },
                RateTerm {
                    level: alpha,
                    vector: VectorId::Cross21,
                },
                RateTerm {
                    level: alpha,
                    vector: VectorId::Cross12,
                },
            ],
            threshold: r_s,
            objective: Objective::B5Joint { restrict_typical },
        }
    }
}

/// Grid discretization: initial step, exponent search ceiling and number of
/// step-halving refinement rounds.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub step: f64,
    pub upper_bound: f64,
    pub refinement_rounds: u32,
}

impl GridSpec {
    /// Default grid for a given cross-link exponent. The rate terms
    /// saturate beyond `max(1, alpha)`, but keeping both conditional terms
    /// nonnegative can push a direct-link exponent up to twice that, so the
    /// box ceiling is `2 max(1, alpha) + 1`; four halvings of 0.32 end at
    /// step 0.02.
    pub fn for_alpha(alpha: f64) -> Self {
        Self {
            step: 0.32,
            upper_bound: 2.0 * alpha.max(1.0) + 1.0,
            refinement_rounds: 4,
        }
    }

    pub fn final_step(&self) -> f64 {
        self.step / f64::powi(2.0, self.refinement_rounds as i32)
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    /// Minimum joint exponent found; `f64::INFINITY` only when infeasible.
    pub value: f64,
    /// Minimizing exponent vectors, in problem order
    /// (`mu` for PTP; `beta1, beta2, a21, a12` for the fifth bound).
    pub argmin: Vec<Vec<f64>>,
    /// Grid-resolution error bound: Lipschitz constant times final step.
    pub certificate_gap: f64,
    pub feasible: bool,
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Sum of the absolute weights of the objective, used as its Lipschitz
/// constant for the certificate.
fn lipschitz(problem: &OutageProblem) -> f64 {
    match problem.objective {
        Objective::PtpMarginal { p, q } => {
            let m = p.min(q);
            (0..m)
                .map(|j| (2 * m - 1 - 2 * j + p.abs_diff(q)) as f64)
                .sum()
        }
        Objective::B5Joint { .. } => {
            let n = problem.n;
            let beta_w: f64 = (0..n).map(|j| (2 * n - 1 - 2 * j) as f64).sum();
            // per conditional term: beta weights, n per cross exponent entry
            // from the two clipped sums, and up to three unit weights per
            // inner max term
            let cond = beta_w + 2.0 * (n * n) as f64 + 3.0 * (0..n).map(|j| (n - 1 - j) as f64).sum::<f64>();
            let marg = beta_w;
            2.0 * cond + 2.0 * marg
        }
    }
}

/// All weakly ascending tuples drawing the i-th coordinate from `lists[i]`.
fn ascending_tuples(lists: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(lists.len());
    fn rec(lists: &[Vec<f64>], depth: usize, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if depth == lists.len() {
            out.push(cur.clone());
            return;
        }
        let floor = cur.last().copied().unwrap_or(f64::NEG_INFINITY);
        for &v in &lists[depth] {
            if v >= floor - 1e-12 {
                cur.push(v);
                rec(lists, depth + 1, cur, out);
                cur.pop();
            }
        }
    }
    rec(lists, 0, &mut cur, &mut out);
    out
}

fn full_lattice(spec_step: f64, ub: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut x = 0.0;
    while x < ub - 1e-12 {
        v.push(x);
        x += spec_step;
    }
    v.push(ub);
    v
}

fn window(center: f64, step: f64, ub: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (-4i32..=4)
        .map(|k| (center + k as f64 * step).clamp(0.0, ub))
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

fn lex_less(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

struct Incumbent {
    value: f64,
    argmin: Vec<Vec<f64>>,
}

impl Incumbent {
    fn offer(&mut self, value: f64, argmin: impl FnOnce() -> Vec<Vec<f64>>) {
        if value < self.value {
            self.value = value;
            self.argmin = argmin();
        } else if value == self.value && self.value.is_finite() {
            let cand = argmin();
            if lex_less(&cand, &self.argmin) {
                self.argmin = cand;
            }
        }
    }
}

/// Best-K configurations kept as refinement centers, ordered by value then
/// lexicographically. Tracking several basins (including rate-slack
/// near-feasible ones) keeps the local refinement from locking onto a
/// coarse-grid artifact.
struct Candidates {
    cap: usize,
    items: Vec<(f64, Vec<Vec<f64>>)>,
}

impl Candidates {
    fn new(cap: usize) -> Self {
        Self {
            cap,
            items: Vec::with_capacity(cap + 1),
        }
    }

    /// Value a new configuration must beat (or tie) to be kept.
    fn bound(&self) -> f64 {
        if self.items.len() < self.cap {
            f64::INFINITY
        } else {
            self.items.last().expect("full list").0
        }
    }

    fn offer(&mut self, value: f64, argmin: impl FnOnce() -> Vec<Vec<f64>>) {
        if value > self.bound() {
            return;
        }
        let arg = argmin();
        if self.items.iter().any(|(v, a)| *v == value && *a == arg) {
            return;
        }
        let pos = self
            .items
            .partition_point(|(v, a)| *v < value || (*v == value && lex_less(a, &arg)));
        self.items.insert(pos, (value, arg));
        if self.items.len() > self.cap {
            self.items.pop();
        }
    }
}

fn rate_cost(level: f64, values: &[f64]) -> f64 {
    values.iter().map(|&v| pos(level - v)).sum()
}

fn scan_ptp(
    p: usize,
    q: usize,
    threshold: f64,
    slack: f64,
    lists: &[Vec<f64>],
    best: &mut Incumbent,
    cands: &mut Candidates,
) {
    for tuple in ascending_tuples(lists) {
        let cost = rate_cost(1.0, &tuple);
        if cost > threshold + slack + TOL {
            continue;
        }
        let ev = ExponentVector::new(tuple.clone()).unwrap();
        let v = wishart_marginal_exponent(p, q, &ev);
        if v.is_finite() {
            cands.offer(v, || vec![tuple.clone()]);
            if cost <= threshold + TOL {
                best.offer(v, || vec![tuple.clone()]);
            }
        }
    }
}

struct B5Entry {
    cost: f64,
    value: f64,
    tuple: Vec<f64>,
}

fn b5_entries(
    tuples: &[Vec<f64>],
    gamma: &ExponentVector,
    avec: &ExponentVector,
    alpha: f64,
    restrict_typical: bool,
    det_floor: f64,
) -> Vec<B5Entry> {
    let mut out = Vec::with_capacity(tuples.len());
    for t in tuples {
        if restrict_typical && t.iter().sum::<f64>() < det_floor - TOL {
            continue;
        }
        let beta = ExponentVector::new(t.clone()).unwrap();
        let triple = ExponentTriple::new(beta, gamma.clone(), avec.clone(), alpha).unwrap();
        let v = conditional_exponent(&triple);
        if !v.is_finite() {
            continue;
        }
        if restrict_typical && v < -TOL {
            continue;
        }
        out.push(B5Entry {
            cost: rate_cost(1.0, t),
            value: v,
            tuple: t.clone(),
        });
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn scan_b5(
    n: usize,
    alpha: f64,
    threshold: f64,
    slack: f64,
    restrict_typical: bool,
    beta1_lists: &[Vec<f64>],
    beta2_lists: &[Vec<f64>],
    a21_lists: &[Vec<f64>],
    a12_lists: &[Vec<f64>],
    best: &mut Incumbent,
    cands: &mut Candidates,
) {
    let a21_tuples = ascending_tuples(a21_lists);
    let a12_tuples = ascending_tuples(a12_lists);
    let beta1_tuples = ascending_tuples(beta1_lists);
    let beta2_tuples = ascending_tuples(beta2_lists);

    for a21 in &a21_tuples {
        let a21_ev = ExponentVector::new(a21.clone()).unwrap();
        let m21 = wishart_marginal_exponent(n, n, &a21_ev);
        if !m21.is_finite() {
            continue;
        }
        let c21 = rate_cost(alpha, a21);
        for a12 in &a12_tuples {
            let a12_ev = ExponentVector::new(a12.clone()).unwrap();
            let m12 = wishart_marginal_exponent(n, n, &a12_ev);
            if !m12.is_finite() {
                continue;
            }
            let c12 = rate_cost(alpha, a12);
            let strict_budget = threshold - c21 - c12;
            let budget = strict_budget + slack;
            if budget < -TOL {
                continue;
            }
            // total whitening exponent shared by both direct links (the two
            // cross Grams have the same nonzero spectrum either way round)
            let det_floor = c21 + c12;
            let base = m21 + m12;
            // under the typical restriction the conditional terms are
            // nonnegative, so a pair whose marginals alone exceed both the
            // incumbent and the candidate cutoff cannot contribute
            if restrict_typical
                && base > best.value + 1e-6
                && base > cands.bound() + 1e-6
            {
                continue;
            }
            let e1 = b5_entries(&beta1_tuples, &a12_ev, &a21_ev, alpha, restrict_typical, det_floor);
            if e1.is_empty() {
                continue;
            }
            let mut e2 = b5_entries(&beta2_tuples, &a21_ev, &a12_ev, alpha, restrict_typical, det_floor);
            if e2.is_empty() {
                continue;
            }
            e2.sort_by(|a, b| {
                a.cost
                    .partial_cmp(&b.cost)
                    .unwrap()
                    .then_with(|| a.tuple.partial_cmp(&b.tuple).unwrap())
            });
            // prefix[i] = index of the best entry among e2[0..=i]
            let mut prefix = Vec::with_capacity(e2.len());
            let mut best_idx = 0usize;
            for (i, e) in e2.iter().enumerate() {
                let b = &e2[best_idx];
                if e.value < b.value || (e.value == b.value && e.tuple < b.tuple) {
                    best_idx = i;
                }
                prefix.push(best_idx);
            }
            for ent1 in &e1 {
                let rem = budget - ent1.cost;
                if rem < -TOL {
                    continue;
                }
                // last index of e2 with cost <= rem (+ tolerance)
                let hi = e2.partition_point(|e| e.cost <= rem + TOL);
                if hi == 0 {
                    continue;
                }
                let ent2 = &e2[prefix[hi - 1]];
                let v = base + ent1.value + ent2.value;
                cands.offer(v, || {
                    vec![
                        ent1.tuple.clone(),
                        ent2.tuple.clone(),
                        a21.clone(),
                        a12.clone(),
                    ]
                });
                let strict_hi = e2
                    .partition_point(|e| e.cost <= strict_budget - ent1.cost + TOL);
                if strict_hi > 0 {
                    let ent2 = &e2[prefix[strict_hi - 1]];
                    let v = base + ent1.value + ent2.value;
                    best.offer(v, || {
                        vec![
                            ent1.tuple.clone(),
                            ent2.tuple.clone(),
                            a21.clone(),
                            a12.clone(),
                        ]
                    });
                }
            }
        }
    }
}

fn scan(
    problem: &OutageProblem,
    slack: f64,
    lists: &[Vec<Vec<f64>>],
    best: &mut Incumbent,
    cands: &mut Candidates,
) {
    match problem.objective {
        Objective::PtpMarginal { p, q } => {
            scan_ptp(p, q, problem.threshold, slack, &lists[0], best, cands)
        }
        Objective::B5Joint { restrict_typical } => scan_b5(
            problem.n,
            problem.alpha,
            problem.threshold,
            slack,
            restrict_typical,
            &lists[0],
            &lists[1],
            &lists[2],
            &lists[3],
            best,
            cands,
        ),
    }
}

fn vector_count(problem: &OutageProblem) -> usize {
    match problem.objective {
        Objective::PtpMarginal { .. } => 1,
        Objective::B5Joint { .. } => 4,
    }
}

/// Number of refinement centers carried between rounds.
const CANDIDATE_POOL: usize = 32;

/// Minimizes the problem's joint exponent over the feasible exponent box.
///
/// The search is an exhaustive scan of the ascending-ordered lattice at the
/// grid step, followed by `refinement_rounds` step-halving local scans.
/// Refinement tracks the best [`CANDIDATE_POOL`] configurations rather than
/// a single incumbent, and the rate constraint carries a slack
/// proportional to the current step, so a basin whose coarse rounding is
/// slightly rate-infeasible is still followed down to the final grid.
/// Identical problem and grid give identical results regardless of thread
/// count (the scan is sequential and order-fixed).
pub fn minimize_exponent(problem: &OutageProblem, grid: &GridSpec) -> SolverResult {
    assert!(grid.step > 0.0 && grid.step <= grid.upper_bound);
    let nvec = vector_count(problem);
    let dim = match problem.objective {
        Objective::PtpMarginal { p, q } => p.min(q),
        Objective::B5Joint { .. } => problem.n,
    };
    // worst-case change of the rate cost when every coordinate moves by one
    // step
    let rate_dim = (nvec * dim) as f64;
    let lattice = full_lattice(grid.step, grid.upper_bound);
    let lists: Vec<Vec<Vec<f64>>> = vec![vec![lattice; dim]; nvec];
    let mut best = Incumbent {
        value: f64::INFINITY,
        argmin: Vec::new(),
    };
    let mut cands = Candidates::new(CANDIDATE_POOL);
    scan(problem, rate_dim * grid.step, &lists, &mut best, &mut cands);
    let mut step = grid.step;
    for _ in 0..grid.refinement_rounds {
        step /= 2.0;
        let mut centers: Vec<Vec<Vec<f64>>> =
            cands.items.iter().map(|(_, arg)| arg.clone()).collect();
        // slack-feasible candidates can crowd out the strict incumbent's
        // basin, so it is always refined as well
        if best.value.is_finite() && !centers.contains(&best.argmin) {
            centers.push(best.argmin.clone());
        }
        for center in centers {
            let lists: Vec<Vec<Vec<f64>>> = center
                .iter()
                .map(|vals| {
                    vals.iter()
                        .map(|&c| window(c, step, grid.upper_bound))
                        .collect()
                })
                .collect();
            scan(problem, rate_dim * step, &lists, &mut best, &mut cands);
        }
    }
    if !best.value.is_finite() {
        return SolverResult {
            value: f64::INFINITY,
            argmin: Vec::new(),
            certificate_gap: 0.0,
            feasible: false,
        };
    }
    SolverResult {
        value: best.value,
        argmin: best.argmin,
        certificate_gap: lipschitz(problem) * step,
        feasible: true,
    }
}

/// Numerical oracle for the point-to-point DMT: minimizes the Wishart
/// marginal exponent subject to the single-link rate-outage constraint.
pub fn d_ptp_numeric(p: usize, q: usize, r: f64, grid: &GridSpec) -> SolverResult {
    minimize_exponent(&OutageProblem::ptp(p, q, r), grid)
}

/// Numerical oracle for the fifth bound's outage exponent. With
/// `restrict_typical` the minimization is confined to the typical region:
/// both conditional exponent terms nonnegative and both direct links
/// determinant-consistent (see [`Objective::B5Joint`]).
pub fn d_o5_numeric(
    n: usize,
    alpha: f64,
    r_s: f64,
    grid: &GridSpec,
    restrict_typical: bool,
) -> SolverResult {
    minimize_exponent(&OutageProblem::b5(n, alpha, r_s, restrict_typical), grid)
}

/// Diagnostic: minimum of the fifth-bound joint exponent with no rate
/// constraint. A proper density exponent would attain 0; any negative value
/// is reported verbatim with its argmin.
pub fn normalization_check(n: usize, alpha: f64, grid: &GridSpec) -> SolverResult {
    minimize_exponent(
        &OutageProblem::b5(n, alpha, f64::INFINITY, false),
        grid,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{d_o5, d_ptp};
    use approx::assert_abs_diff_eq;

    fn grid(alpha: f64) -> GridSpec {
        GridSpec::for_alpha(alpha)
    }

    #[test]
    fn ptp_oracle_examples() {
        let g = grid(1.0);
        let r = d_ptp_numeric(2, 2, 1.0, &g);
        assert_abs_diff_eq!(r.value, 1.0, epsilon = r.certificate_gap);
        // minimizer sits at mu = (0, 1) up to lattice rounding noise
        assert_eq!(r.argmin.len(), 1);
        assert_abs_diff_eq!(r.argmin[0][0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.argmin[0][1], 1.0, epsilon = 1e-9);

        assert_abs_diff_eq!(d_ptp_numeric(2, 2, 0.0, &g).value, 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            d_ptp_numeric(2, 2, 1.5, &g).value,
            0.5,
            epsilon = d_ptp_numeric(2, 2, 1.5, &g).certificate_gap
        );
        assert_abs_diff_eq!(d_ptp_numeric(1, 3, 0.5, &g).value, 1.5, epsilon = 0.1);
        assert_abs_diff_eq!(d_ptp_numeric(2, 6, 1.0, &g).value, 5.0, epsilon = 0.2);
    }

    #[test]
    fn b5_oracle_examples() {
        let g = grid(1.0);
        let r = d_o5_numeric(1, 1.0, 0.5, &g, true);
        assert_abs_diff_eq!(r.value, 2.5, epsilon = r.certificate_gap);

        let g = grid(0.25);
        let r = d_o5_numeric(1, 0.25, 0.0, &g, true);
        assert_abs_diff_eq!(r.value, 2.5, epsilon = r.certificate_gap);
        let r = d_o5_numeric(1, 0.25, 0.5, &g, true);
        assert_abs_diff_eq!(r.value, 1.0, epsilon = r.certificate_gap);

        let g = grid(1.0);
        let r = d_o5_numeric(1, 1.0, 2.0, &g, true);
        assert_abs_diff_eq!(r.value, 0.0, epsilon = r.certificate_gap);
    }

    #[test]
    fn normalization_examples() {
        let g = grid(0.0);
        assert_abs_diff_eq!(normalization_check(1, 0.0, &g).value, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(normalization_check(2, 0.0, &g).value, 0.0, epsilon = 1e-9);
        // documented anomaly of the verbatim density exponent
        let g = grid(1.0);
        let r = normalization_check(1, 1.0, &g);
        assert_abs_diff_eq!(r.value, -2.0, epsilon = r.certificate_gap);
    }

    #[test]
    fn monotone_in_threshold() {
        let g = grid(1.0);
        let mut prev = f64::INFINITY;
        for k in 0..=10 {
            let r_s = 0.2 * k as f64;
            let v = d_o5_numeric(1, 1.0, r_s, &g, true).value;
            assert!(v <= prev + 1e-9);
            prev = v;
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let g = grid(0.75);
        let a = d_o5_numeric(2, 0.75, 0.7, &g, true);
        let b = d_o5_numeric(2, 0.75, 0.7, &g, true);
        assert_eq!(a.value, b.value);
        assert_eq!(a.argmin, b.argmin);
    }

    #[test]
    fn refinement_never_worsens_beyond_gap() {
        for rounds in 1..=4u32 {
            let g = GridSpec {
                step: 0.32,
                upper_bound: 2.0,
                refinement_rounds: rounds,
            };
            let coarse = GridSpec {
                refinement_rounds: rounds - 1,
                ..g
            };
            let fine = d_ptp_numeric(2, 2, 0.7, &g);
            let base = d_ptp_numeric(2, 2, 0.7, &coarse);
            assert!(fine.value <= base.value + 1e-12);
            assert!(base.value - fine.value <= base.certificate_gap + 1e-12);
        }
    }

    #[test]
    fn b5_matches_closed_form_spot_checks() {
        for &(n, alpha) in &[(1usize, 0.5), (1, 1.5), (2, 1.0)] {
            let g = grid(alpha);
            for k in 0..=4 {
                let r_s = 0.4 * k as f64;
                let num = d_o5_numeric(n, alpha, r_s, &g, true);
                let closed = d_o5(n, alpha, r_s);
                assert_abs_diff_eq!(num.value, closed, epsilon = num.certificate_gap);
            }
        }
        // and the PTP line for reference
        let g = grid(1.0);
        let num = d_ptp_numeric(3, 3, 1.3, &g);
        assert_abs_diff_eq!(num.value, d_ptp(3, 3, 1.3), epsilon = num.certificate_gap);
    }
}
