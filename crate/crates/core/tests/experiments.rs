use qergo::experiments::*;

#[test]
fn config_defaults_and_validation() {
    let cfg = ProtocolConfig::default();
    cfg.validate().unwrap();
    assert_eq!(cfg.sizes, vec![250, 500, 1000, 2000]);
    let bad = ProtocolConfig {
        eta0: 1.5,
        ..ProtocolConfig::default()
    };
    assert!(bad.validate().is_err());
    let wide = ProtocolConfig {
        interval: (-5.0, 5.0),
        ..ProtocolConfig::default()
    };
    assert!(wide.validate().is_err());
}

#[test]
fn medians_and_trends() {
    assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    let t = trend_verdict(&[1.0, 0.8, 0.85, 0.5], 0.6, 1);
    assert!(t.pass && t.inversions == 1);
    let t = trend_verdict(&[1.0, 1.1, 1.2, 0.5], 0.6, 1);
    assert!(!t.pass);
    let t = trend_verdict(&[1.0, 0.9, 0.8, 0.7], 0.6, 1);
    assert!(!t.pass && t.ratio > 0.6);
}

#[test]
fn small_instance_runs() {
    let cfg = ProtocolConfig {
        sizes: vec![60],
        seeds: vec![1],
        ..ProtocolConfig::default()
    };
    let r = run_instance(&cfg, 60, 1).unwrap();
    assert!(r.variance > 0.0);
    assert_eq!(r.terms.len(), r.eigenvalues_in_interval);
    assert!(r.terms.iter().all(|&t| t >= 0.0));
    let again = run_instance(&cfg, 60, 1).unwrap();
    assert_eq!(r.terms, again.terms);
    assert!((r.average_mean - 0.5).abs() < 1e-9);
}
