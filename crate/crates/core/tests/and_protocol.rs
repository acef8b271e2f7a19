use qic_core::builtins::*;
use qic_core::engine::{report, worst_case_error, TaskSpec};
use qic_core::info::binary_entropy;
use qic_core::linalg::Config;
use qic_core::InputDistribution;

fn mu_star() -> InputDistribution {
    and_prior(0.0).unwrap()
}

#[test]
fn exact_on_every_input() {
    let cfg = Config::default();
    for r in 1..=8 {
        let p = build_and_protocol(AndParams::new(r).unwrap()).unwrap();
        assert!(worst_case_error(&p, &TaskSpec::and(), &cfg).unwrap() <= 1e-9, "r = {r}");
    }
}

#[test]
fn trajectories_follow_the_rotation_angles() {
    let cfg = Config::default();
    for r in 1..=4 {
        let params = AndParams::new(r).unwrap();
        for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let traj = engine_trajectory(params, x, y, &cfg).unwrap();
            for (k, amp) in traj.iter().enumerate() {
                let i = k + 1;
                let angle = match (x, y) {
                    (0, _) => 0.0,
                    (1, 0) => and_angle_10(params, i),
                    _ if i == 4 * r => -std::f64::consts::FRAC_PI_2,
                    _ => and_angle_11(params, i),
                };
                assert!((amp[0].re - angle.cos()).abs() < 1e-9, "r={r} ({x},{y}) i={i}");
                assert!((amp[1].re - angle.sin()).abs() < 1e-9, "r={r} ({x},{y}) i={i}");
                assert!(amp[0].im.abs() < 1e-12 && amp[1].im.abs() < 1e-12);
            }
        }
        let last = engine_trajectory(params, 1, 1, &cfg).unwrap()[4 * r - 1];
        assert!(last[0].norm() < 1e-9 && (last[1].re + 1.0).abs() < 1e-9);
    }
}

#[test]
fn y_zero_entropies_match_closed_form() {
    let cfg = Config::default();
    for r in 1..=6 {
        let params = AndParams::new(r).unwrap();
        let h = binary_entropy(params.theta().sin().powi(2)).unwrap();
        let got = engine_branch_entropies(params, &mu_star(), 0, &cfg).unwrap();
        for (k, e) in got.iter().enumerate() {
            let i = k + 1;
            let e = e.unwrap();
            match i % 4 {
                1 => assert!((e - h).abs() < 1e-8),
                3 => assert!(e.abs() < 1e-8),
                _ => {}
            }
            let closed = and_round_entropy(i, params, 0.0, YBranch::Zero).unwrap();
            assert!((e - closed).abs() < 1e-8, "r={r} i={i}");
        }
    }
}

#[test]
fn y_one_entropies_match_closed_form() {
    let cfg = Config::default();
    for r in [2, 4] {
        let params = AndParams::new(r).unwrap();
        for w in [0.0, 0.01, 0.1] {
            let got = engine_branch_entropies(params, &and_prior(w).unwrap(), 1, &cfg).unwrap();
            for i in (1..=params.ping_pongs()).step_by(2) {
                let closed = and_round_entropy(i, params, w, YBranch::One).unwrap();
                assert!((got[i - 1].unwrap() - closed).abs() < 1e-8, "r={r} w={w} i={i}");
            }
        }
    }
}

#[test]
fn qic_at_mu_star_decomposes_into_branch_terms() {
    // Each ping-pong term is half of H(C|Y) + H(C|X). At mu_star, x = 1
    // forces y = 0, so C is pure given X and the X side vanishes, while
    // H(C|Y) = (2/3) H(C|Y=0) because C is pure given Y = 1.
    let cfg = Config::default();
    for r in 1..=4 {
        let params = AndParams::new(r).unwrap();
        let p = build_and_protocol(params).unwrap();
        let rep = report(&p, &mu_star(), Some(&TaskSpec::and()), &cfg).unwrap();
        assert!(rep.avg_error.unwrap() <= 1e-9);
        let y0 = engine_branch_entropies(params, &mu_star(), 0, &cfg).unwrap();
        let y_side: f64 = y0.iter().map(|h| 2.0 / 3.0 * h.unwrap()).sum();
        let h = binary_entropy(params.theta().sin().powi(2)).unwrap();
        // H(C|Y=0) = h on exactly half of the 4r - 1 messages
        assert!((y_side - (2 * r) as f64 * 2.0 / 3.0 * h).abs() < 1e-8);
        let total = rep.qic_first(params.ping_pongs());
        assert!((total - 0.5 * y_side).abs() < 1e-8, "r={r}: {total} vs {}", 0.5 * y_side);
        assert!(rep.per_round[4 * r - 1].cqmi_contribution.abs() < 1e-8);
    }
}
