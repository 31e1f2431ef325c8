//! End-to-end acceptance gate. Each test covers one release criterion and
//! prints a single pass/fail line; together they certify the closed forms,
//! the independent numerical oracle, the figure-level curve shapes, the
//! Monte-Carlo slopes and the finite-SNR region gap.

use dmt_core::closed_form::{
    d_ic_alpha1, d_ic_nocsit_asym, d_ic_optimal, d_mac, d_o3, d_o5, d_o6, d_o_single, d_ptp,
    BoundId,
};
use dmt_core::curve::PiecewiseCurve;
use dmt_core::sim::{
    achievable_region, constant_gap, estimate_outage, mutual_info_bounds, sample_channel,
    upper_region, AntennaProfile, ScalingProfile, SlopeFit,
};
use dmt_core::solver::{d_o5_numeric, d_ptp_numeric, normalization_check, GridSpec};

const ALPHAS: [f64; 8] = [0.25, 1.0 / 3.0, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0];

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("[{}] {criterion}: {detail}", if pass { "pass" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

/// One-sided limits at `b` via linear extrapolation from just inside each
/// neighbouring piece; exact for piecewise-linear curves.
fn one_sided_limits(f: &dyn Fn(f64) -> f64, b: f64) -> (f64, f64) {
    let eps = 1e-6;
    let left = 2.0 * f(b - eps) - f(b - 2.0 * eps);
    let right = 2.0 * f(b + eps) - f(b + 2.0 * eps);
    (left, right)
}

/// Interior formula seams and the support endpoint of each curve family.
/// Discontinuities can only arise where the formula switches branches;
/// within a branch every term is continuous in the rate.
fn curve_family(
    n: usize,
    alpha: f64,
) -> Vec<(&'static str, Box<dyn Fn(f64) -> f64>, Vec<f64>, f64)> {
    let nf = n as f64;
    let mut out: Vec<(&'static str, Box<dyn Fn(f64) -> f64>, Vec<f64>, f64)> = Vec::new();
    out.push((
        "single-user",
        Box::new(move |r| d_ptp(n, n, r)),
        (1..n).map(|k| k as f64).collect(),
        nf,
    ));
    if alpha <= 1.0 {
        out.push((
            "third-bound",
            Box::new(move |r| d_o3(n, alpha, r)),
            if alpha < 1.0 { vec![nf * alpha] } else { vec![] },
            nf * (2.0 - alpha),
        ));
    } else {
        out.push((
            "third-bound",
            Box::new(move |r| d_o3(n, alpha, r)),
            vec![nf],
            nf * alpha,
        ));
    }
    if alpha <= 0.5 {
        out.push((
            "fifth-bound",
            Box::new(move |r| d_o5(n, alpha, r)),
            if alpha < 0.5 { vec![2.0 * nf * alpha] } else { vec![] },
            2.0 * nf * (1.0 - alpha),
        ));
    } else {
        out.push((
            "fifth-bound",
            Box::new(move |r| d_o5(n, alpha, r)),
            vec![nf],
            2.0 * nf * alpha,
        ));
    }
    let sixth_defined = alpha >= 1.0 || n % 2 == 0;
    if sixth_defined {
        let (seams, end) = if alpha >= 1.0 {
            (vec![nf], 2.0 * nf * alpha)
        } else if alpha <= 0.5 {
            (
                vec![
                    nf * alpha / 2.0,
                    1.5 * nf * alpha,
                    nf * (1.0 + 2.0 * alpha) / 2.0,
                    nf * (2.0 - alpha),
                ],
                nf * (3.0 - 2.0 * alpha),
            )
        } else {
            (
                vec![
                    nf * alpha / 2.0,
                    nf * (1.0 + alpha) / 2.0,
                    nf * (1.0 + 2.0 * alpha) / 2.0,
                    nf * (1.0 + alpha),
                ],
                2.0 * nf,
            )
        };
        out.push((
            "sixth-bound",
            Box::new(move |r| d_o6(n, alpha, r).expect("closed form defined")),
            seams,
            end,
        ));
    }
    out
}

#[test]
fn criterion_1_closed_form_continuity() {
    let mut max_jump = 0.0f64;
    let mut max_endpoint = 0.0f64;
    for n in [1usize, 2, 4] {
        for alpha in ALPHAS {
            for (label, f, seams, end) in curve_family(n, alpha) {
                for b in seams {
                    let (l, r) = one_sided_limits(f.as_ref(), b);
                    let jump = (l - r).abs();
                    assert!(
                        jump <= 1e-9,
                        "{label} n={n} alpha={alpha}: jump {jump:.3e} at r={b}"
                    );
                    max_jump = max_jump.max(jump);
                }
                let v = f(end);
                assert!(
                    v.abs() <= 1e-9,
                    "{label} n={n} alpha={alpha}: endpoint value {v:.3e}"
                );
                max_endpoint = max_endpoint.max(v.abs());
                // coarse scan guarding against jumps away from the seams
                let h = 1e-4;
                let cap = 100.0 * (n * n) as f64 * (1.0 + alpha) * h;
                let mut prev = f(0.0);
                let mut r = h;
                while r <= end + 0.5 {
                    let v = f(r);
                    assert!(
                        (v - prev).abs() <= cap,
                        "{label} n={n} alpha={alpha}: jump near r={r}"
                    );
                    prev = v;
                    r += h;
                }
            }
        }
    }
    report(
        "criterion 1 closed-form continuity",
        true,
        &format!("max seam jump {max_jump:.2e}, max endpoint residual {max_endpoint:.2e}"),
    );
}

#[test]
fn criterion_2_oracle_equivalence() {
    let grid = GridSpec::for_alpha(1.0);
    let mut max_dev_ptp = 0.0f64;
    for p in 1..=3usize {
        for q in 1..=3usize {
            let m = p.min(q) as f64;
            let mut r = 0.0;
            while r <= m + 1e-9 {
                let result = d_ptp_numeric(p, q, r, &grid);
                let dev = (result.value - d_ptp(p, q, r)).abs();
                assert!(
                    dev <= result.certificate_gap,
                    "point-to-point oracle p={p} q={q} r={r}: dev {dev} > {}",
                    result.certificate_gap
                );
                max_dev_ptp = max_dev_ptp.max(dev);
                r += 0.1;
            }
        }
    }
    // the joint-exponent minimizer is restricted to the typical region of
    // the conditional law (nonnegative conditional terms); the
    // unconstrained density is an exponent approximation and dips negative
    let mut max_dev_b5 = 0.0f64;
    for n in [1usize, 2] {
        for alpha in [0.25, 0.5, 0.75, 1.0, 1.5] {
            let grid = GridSpec::for_alpha(alpha);
            let mut r = 0.0;
            let r_max = 2.0 * n as f64 * alpha.max(1.0);
            while r <= r_max + 1e-9 {
                let result = d_o5_numeric(n, alpha, r, &grid, true);
                let dev = (result.value - d_o5(n, alpha, r)).abs();
                assert!(
                    dev <= result.certificate_gap,
                    "fifth-bound oracle n={n} alpha={alpha} r={r}: dev {dev} > {}",
                    result.certificate_gap
                );
                max_dev_b5 = max_dev_b5.max(dev);
                r += 0.1;
            }
        }
    }
    report(
        "criterion 2 oracle equivalence",
        true,
        &format!(
            "max deviation: point-to-point {max_dev_ptp:.2e}, fifth bound {max_dev_b5:.2e} \
             (final grid step {})",
            GridSpec::for_alpha(1.0).final_step()
        ),
    );
}

#[test]
fn criterion_3_equal_scaling_equality() {
    let mut max_dev = 0.0f64;
    for n in [1usize, 2, 4] {
        let steps = (n as f64 / 0.1).round() as usize;
        for i in 0..=steps {
            for j in 0..=steps {
                let (r1, r2) = (i as f64 * 0.1, j as f64 * 0.1);
                let full = d_ic_optimal(n, 1.0, r1, r2).expect("alpha = 1 supported");
                let reduced = d_ic_alpha1(n, r1, r2);
                let dev = (full - reduced).abs();
                assert!(
                    dev == 0.0,
                    "n={n} r1={r1} r2={r2}: {full} vs {reduced}"
                );
                max_dev = max_dev.max(dev);
            }
        }
    }
    report(
        "criterion 3 equal-scaling reduction",
        true,
        &format!("exact equality on the 0.1 grid (max dev {max_dev:.1e})"),
    );
}

#[test]
fn criterion_4_strong_interference_threshold() {
    let mut max_dev = 0.0f64;
    for n in [1usize, 2] {
        for alpha in [1.25, 1.5, 2.0] {
            let steps = (n as f64 / 0.05).round() as usize;
            for i in 0..=steps {
                let r = i as f64 * 0.05;
                let full = d_ic_optimal(n, alpha, r, r).expect("alpha >= 1 supported");
                let mac = d_mac(n, alpha, r).expect("alpha >= 1");
                let dev = (full - mac).abs();
                assert!(dev <= 1e-9, "n={n} alpha={alpha} r={r}: dev {dev}");
                max_dev = max_dev.max(dev);
            }
        }
    }
    report(
        "criterion 4 strong-interference threshold",
        true,
        &format!("max |optimal - mac| = {max_dev:.2e}"),
    );
}

#[test]
fn criterion_5_bound_crossing_shape() {
    let (n, alpha) = (2usize, 1.0 / 3.0);
    let at_zero_ordered = d_o3(n, alpha, 0.0) < d_o5(n, alpha, 0.0);
    let crossing = (0..400)
        .map(|i| i as f64 * 0.01)
        .find(|&r| d_o5(n, alpha, r) < d_o3(n, alpha, r) - 1e-12);
    // emit the two curves the way the curve writer would
    let c3 = PiecewiseCurve::from_samples(|r| d_o3(n, alpha, r), 4.0, 0.01).unwrap();
    let c5 = PiecewiseCurve::from_samples(|r| d_o5(n, alpha, r), 4.0, 0.01).unwrap();
    let mut buf = Vec::new();
    c3.write_csv(&mut buf).unwrap();
    c5.write_csv(&mut buf).unwrap();
    let pass = at_zero_ordered && crossing.is_some() && !buf.is_empty();
    report(
        "criterion 5 sum-rate bound crossing",
        pass,
        &format!(
            "third < fifth at r=0 ({:.3} < {:.3}); fifth dips below third at r={:?}",
            d_o3(n, alpha, 0.0),
            d_o5(n, alpha, 0.0),
            crossing
        ),
    );
}

#[test]
fn criterion_6_low_rate_coincidence() {
    let (n, alpha) = (4usize, 1.0);
    // first rate where the no-transmitter-knowledge sum bound undercuts the
    // single-user curve
    let crossing_index = (0..800)
        .find(|&i| {
            let r = i as f64 * 0.005;
            d_ptp(n, 2 * n, 2.0 * r) < d_o_single(n, r)
        })
        .expect("curves must cross");
    let crossing = crossing_index as f64 * 0.005;
    let mut max_dev = 0.0f64;
    for i in 0..crossing_index {
        let r = i as f64 * 0.005;
        let with_csit = d_o_single(n, r).min(d_o3(n, alpha, 2.0 * r));
        let without = d_o_single(n, r).min(d_ptp(n, 2 * n, 2.0 * r));
        let dev = (with_csit - without).abs();
        assert!(dev <= 1e-9, "r={r}: dev {dev}");
        max_dev = max_dev.max(dev);
    }
    report(
        "criterion 6 low-rate coincidence",
        true,
        &format!("curves agree below crossing r={crossing:.3} (max dev {max_dev:.2e})"),
    );
}

#[test]
fn criterion_7_monte_carlo_slopes() {
    let profile = AntennaProfile::symmetric(1).unwrap();
    let scaling = ScalingProfile::new(1.0, vec![20.0, 25.0, 30.0, 35.0, 40.0]).unwrap();
    let trials = 1_000_000;

    let single = estimate_outage(&profile, &scaling, BoundId::B1, 0.5, 0.0, trials, 42).unwrap();
    let slope1 = match single.slope {
        SlopeFit::Fitted { slope, .. } => slope,
        SlopeFit::Unresolved { ref reason } => panic!("single-user slope unresolved: {reason}"),
    };

    let sum = estimate_outage(&profile, &scaling, BoundId::B3, 0.25, 0.25, trials, 42).unwrap();
    let slope3 = match sum.slope {
        SlopeFit::Fitted { slope, .. } => slope,
        SlopeFit::Unresolved { ref reason } => panic!("sum-rate slope unresolved: {reason}"),
    };

    let pass = (slope1 - 0.5).abs() <= 0.1 && (slope3 - 1.5).abs() <= 0.3;
    report(
        "criterion 7 Monte-Carlo slopes",
        pass,
        &format!("single-user slope {slope1:.3} (target 0.5 +- 0.1), sum-rate slope {slope3:.3} (target 1.5 +- 0.3)"),
    );
}

#[test]
fn criterion_8_constant_gap() {
    let mut max_gap_dev = 0.0f64;
    for n in [1usize, 2] {
        let profile = AntennaProfile::symmetric(n).unwrap();
        for rho_db in [10.0, 20.0, 30.0] {
            let rho = 10f64.powf(rho_db / 10.0);
            for trial in 0..1000u64 {
                let h = sample_channel(&profile, 99, trial);
                let upper = upper_region(&h, rho, 1.0).unwrap();
                let achievable = achievable_region(&h, rho, 1.0).unwrap();
                let bounds = mutual_info_bounds(&h, rho, 1.0).unwrap();
                for (i, id) in BoundId::ALL.iter().enumerate() {
                    assert!(
                        achievable[i].rhs <= upper[i].rhs + 1e-12,
                        "nesting violated at n={n} rho={rho_db} trial={trial}"
                    );
                    let (a1, a2) = id.rate_coefficients();
                    let pre_clip = bounds.get(id.index())
                        - 2.0 * (a1 as f64 * profile.n1 as f64 + a2 as f64 * profile.n2 as f64);
                    let dev = (upper[i].rhs - pre_clip - constant_gap(&profile, *id)).abs();
                    assert!(
                        dev <= 1e-9,
                        "gap drifted at n={n} rho={rho_db} trial={trial}: {dev}"
                    );
                    max_gap_dev = max_gap_dev.max(dev);
                }
            }
        }
    }
    report(
        "criterion 8 constant gap",
        true,
        &format!("nesting holds; max gap deviation {max_gap_dev:.2e}"),
    );
}

#[test]
fn criterion_9_asymmetric_continuity() {
    let cases = [(1usize, 2usize, 2usize, 1.0), (1, 2, 2, 2.0), (1, 2, 3, 1.5), (2, 4, 4, 1.25)];
    let mut max_jump = 0.0f64;
    for (m, n1, n2, alpha) in cases {
        let seam = m as f64 * alpha;
        let f = |rs: f64| {
            d_ic_nocsit_asym(m, n1, n2, alpha, rs / 2.0, rs / 2.0).expect("valid profile")
        };
        let (l, r) = one_sided_limits(&f, seam);
        let jump = (l - r).abs();
        assert!(
            jump <= 1e-9,
            "profile ({m},{n1},{n2}) alpha={alpha}: jump {jump:.3e} at rate sum {seam}"
        );
        max_jump = max_jump.max(jump);
    }
    report(
        "criterion 9 asymmetric no-CSIT continuity",
        true,
        &format!("max jump at the sum-rate seam {max_jump:.2e}"),
    );
}

#[test]
fn criterion_10_normalization_diagnostic() {
    for n in [1usize, 2] {
        let zero = normalization_check(n, 0.0, &GridSpec::for_alpha(0.0));
        assert!(
            zero.value.abs() <= 1e-12,
            "n={n} alpha=0: minimum {} should be 0",
            zero.value
        );
    }
    let anomalous = normalization_check(1, 1.0, &GridSpec::for_alpha(1.0));
    report(
        "criterion 10 normalization diagnostic",
        true,
        &format!(
            "zero at alpha=0 for n in {{1,2}}; at n=1 alpha=1 the unconstrained minimum is {} \
             at {:?} (documented anomaly, diagnostic only)",
            anomalous.value, anomalous.argmin
        ),
    );
}
