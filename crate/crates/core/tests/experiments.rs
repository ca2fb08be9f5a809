use rand::Rng;
use weyl_lab::calibration::{key, limit};
use weyl_lab::contfrac::{angle_from_cf, construct_f_member, ContinuedFraction};
use weyl_lab::experiments::*;
use weyl_lab::rng::{sample_rng, uniform_angle};
use weyl_lab::weylsum::{dirichlet_b, weyl_sum};
use weyl_lab::Angle;

fn constructed() -> (ContinuedFraction, Angle) {
    let (cf, _) = construct_f_member(0.5, 4, &[2]).unwrap();
    let theta = angle_from_cf(&cf);
    (cf, theta)
}

#[test]
fn deep_level_witness_and_box() {
    let (cf, theta) = constructed();
    let w = resume_witness(theta, &cf, &ResumeConfig::default()).unwrap();
    assert_eq!(w.q, 83523);
    assert!((w.product_value - 0.5).abs() <= 0.05);
    assert!(w.eps_n <= 0.1);
    assert!(w.valid());
    assert!((w.m as f64) <= 83523f64.powf(0.625));
    assert!(w.dist >= 0.1 && w.dist <= 0.2);
    assert!((w.check_i.bound - 83523f64.powf(-2.875)).abs() < 1e-20);
    assert_eq!(w.check_iii.value, phase_check(theta, w.x, w.big_m));
    assert_eq!(w.grid_deviation.len(), 33);

    let deep = box_experiment(theta, &w, DEFAULT_J, 0.1, 20_000, 3).unwrap();
    assert!(deep.symdiff_ratio.mean <= 0.1);
    assert!(deep.modulus_fraction.mean >= 0.9);

    // the shallower level with its best nonzero multiplier
    let q = 17u64;
    let t = w.x.scale_u64(2 * q);
    let a = weyl_sum(theta, w.x, Angle::ZERO, q).norm();
    let m = (1..=m_range(q, 0.5))
        .min_by(|&i, &j| {
            let f = |m| (a * dirichlet_b(t, m).norm() - 0.5).abs();
            f(i).total_cmp(&f(j))
        })
        .unwrap();
    let shallow = box_sample(theta, w.x, 17f64.powf(-2.75), DEFAULT_J, m * q, 0.1, 20_000, 3).unwrap();
    assert!(shallow.symdiff_ratio.mean > deep.symdiff_ratio.mean, "{shallow:?}");

    let mut bad = w.clone();
    bad.check_iii.ok = false;
    assert!(box_experiment(theta, &bad, DEFAULT_J, 0.1, 10, 1).is_err());
}

#[test]
fn raw_error_at_scheduled_levels() {
    let (_, theta) = constructed();
    let c_cal = limit(key::APPROX_RATIO).unwrap();
    for (q, wanted) in [(17u64, 40usize), (83523, 4)] {
        let qf = q as f64;
        let m_cap = qf.powf(0.625).floor() as u64;
        let mut checked = 0;
        let mut i = 0;
        while checked < wanted {
            let mut r = sample_rng(21, 500 + q, i);
            i += 1;
            let x = uniform_angle(&mut r);
            let a = weyl_sum(theta, x, Angle::ZERO, q);
            if a.norm() > 2.0 * qf.powf(0.55) {
                continue;
            }
            let m = r.gen_range(1..=m_cap);
            let raw = (weyl_sum(theta, x, Angle::ZERO, m * q) - a * dirichlet_b(x.scale_u64(2 * q), m)).norm();
            assert!(raw <= c_cal * qf.powf(-0.0625), "q={q} m={m} raw={raw}");
            checked += 1;
        }
    }
}

#[test]
fn tail_bound_at_every_scheduled_level() {
    let (cf, theta) = constructed();
    let s = select_qn(&cf, theta, 0.5, 0.5).unwrap();
    for l in &s.levels {
        let t = tail_measure(theta, l.q_u64().unwrap(), 0.5, 20_000, 13).unwrap();
        assert!(t.estimate.mean <= t.bound + 5.0 * t.estimate.std_err, "{t:?}");
    }
}

#[test]
fn reports_serialize_deterministically() {
    let (_, theta) = constructed();
    let g = growth_report(theta, &[10, 100], 16).unwrap();
    let a = weyl_lab::report::to_json(&g).unwrap();
    assert_eq!(a, weyl_lab::report::to_json(&growth_report(theta, &[10, 100], 16).unwrap()).unwrap());
    let back: GrowthReport = serde_json::from_str(&a).unwrap();
    assert_eq!(back, g);
}
