mod common;

use std::sync::Arc;

use common::{k4, mixed_instance, petersen};
use num_complex::Complex64;
use proptest::prelude::*;
use qergo::error::Error;
use qergo::quantization::*;
use qergo::{eigensystem, PathSet, Potential};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn delta(n: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); n];
    v[i] = c(1.0, 0.0);
    v
}

#[test]
fn lifting() {
    let g = k4();
    let fam = lift_kernel(|x, y| if x == y { c(x as f64 * 0.1, 0.0) } else { c(0.0, 0.0) }, 0, &g).unwrap();
    assert_eq!(fam.len(), 1);
    assert_eq!(fam[0].value(&[2]), c(0.2, 0.0));

    let fam = lift_kernel(|x, y| if x != y { c(1.0, 0.0) } else { c(0.0, 0.0) }, 1, &g).unwrap();
    assert_eq!(fam[1].dense_values().unwrap().len(), 12);
    assert!(fam[1].dense_values().unwrap().iter().all(|&v| v == c(1.0, 0.0)));

    let p = petersen();
    let adj = |x: usize, y: usize| p.has_edge(x, y);
    let fam = lift_kernel(|x, y| if x != y && !adj(x, y) { c(1.0, 0.0) } else { c(0.0, 0.0) }, 2, &p).unwrap();
    let vals = fam[2].dense_values().unwrap();
    assert_eq!(vals.len(), 60);
    assert!(vals.iter().all(|&v| v == c(1.0, 0.0)));

    assert!(matches!(
        lift_kernel(|_, _| c(2.0, 0.0), 1, &g),
        Err(Error::SupBoundViolated { .. })
    ));
}

#[test]
fn kg_examples() {
    let g = k4();
    let es = eigensystem::<f64>(&g, &Potential::zero(4), 1e-12).unwrap();
    let psi: Vec<Complex64> = es.vector(3).iter().map(|&x| c(x, 0.0)).collect();
    let one0 = Observable::constant(&g, 0, c(1.0, 0.0)).unwrap();
    assert!((kg_matrix_element(&one0, &psi, &psi) - 1.0).norm() < 1e-12);
    let one1 = Observable::constant(&g, 1, c(1.0, 0.0)).unwrap();
    assert!((kg_matrix_element(&one1, &psi, &psi) - 3.0).norm() < 1e-12);
    // A^2 - D counts length-2 nb paths
    let one2 = Observable::constant(&g, 2, c(1.0, 0.0)).unwrap();
    let mut a2d = 0.0;
    for x in 0..4 {
        for y in 0..4 {
            let mut v = 0.0;
            for z in 0..4 {
                if g.has_edge(x, z) && g.has_edge(z, y) {
                    v += 1.0;
                }
            }
            if x == y {
                v -= g.degree(x) as f64;
            }
            a2d += psi[x].re * v * psi[y].re;
        }
    }
    assert!((kg_matrix_element(&one2, &psi, &psi) - a2d).norm() < 1e-12);
}

#[test]
fn kb_examples() {
    let g = k4();
    let one1 = Observable::constant(&g, 1, c(1.0, 0.0)).unwrap();
    let d = delta(12, 5);
    assert_eq!(kb_matrix_element(&one1, &d, &d).unwrap(), c(1.0, 0.0));
    let one2 = Observable::constant(&g, 2, c(1.0, 0.0)).unwrap();
    let ones = vec![c(1.0, 0.0); 12];
    assert_eq!(kb_matrix_element(&one2, &ones, &ones).unwrap(), c(24.0, 0.0));
    // successor indicator of e contracted with delta_e through length 2
    let e = 5;
    let mut succ = vec![c(0.0, 0.0); 12];
    for f in qergo::graph::nb_successors(&g, e) {
        succ[f] = c(1.0, 0.0);
    }
    let v = kb_matrix_element(&one2, &delta(12, e), &succ).unwrap();
    assert_eq!(v, c((g.degree(g.terminus(e)) - 1) as f64, 0.0));
    let one0 = Observable::constant(&g, 0, c(1.0, 0.0)).unwrap();
    assert!(matches!(kb_matrix_element(&one0, &ones, &ones), Err(Error::KZeroNotEdgeBased)));
}

#[test]
fn lift_is_faithful_on_tree_like_balls() {
    let g = qergo::ensembles::random_regular(&qergo::ensembles::EnsembleConfig::regular(200, 3, 4)).unwrap();
    let kernel = |x: usize, y: usize| c(((x * 31 + y * 17) % 13) as f64 / 13.0, 0.0);
    let fam = lift_kernel(kernel, 2, &g).unwrap();
    for x in 0..g.n() {
        if qergo::graph::injectivity_radius(&g, x) < 2 {
            continue;
        }
        for &y in g.neighbors(x) {
            for &z in g.neighbors(y) {
                if z != x {
                    let v = kg_matrix_element(&fam[2], &delta(200, x), &delta(200, z));
                    assert_eq!(v, kernel(x, z));
                }
            }
        }
    }
}

#[test]
fn dense_and_rule_agree() {
    let (g, _) = mixed_instance(20, 1.0, 2);
    let f = |p: &[usize]| c((p[0] + p[2]) as f64 * 0.01, p[1] as f64 * -0.02);
    let dense = Observable::from_fn(&g, 2, f).unwrap();
    let rule = Observable::rule(&g, 2, 1.0, f);
    let phi: Vec<Complex64> = (0..20).map(|x| c((x as f64).cos(), 0.3)).collect();
    let fe: Vec<Complex64> = (0..g.num_oriented_edges()).map(|e| c((e as f64).sin(), 1.0)).collect();
    assert!((kg_matrix_element(&dense, &phi, &phi) - kg_matrix_element(&rule, &phi, &phi)).norm() < 1e-12);
    assert!(
        (kb_matrix_element(&dense, &fe, &fe).unwrap() - kb_matrix_element(&rule, &fe, &fe).unwrap()).norm() < 1e-12
    );
    let back = rule.to_dense().unwrap();
    assert_eq!(back.dense_values(), dense.dense_values());
}

#[test]
fn text_round_trip() {
    let g = petersen();
    let k = Observable::from_fn(&g, 2, |p| c(p[0] as f64 * 0.5, -(p[2] as f64))).unwrap();
    let back = Observable::from_text(&g, &k.to_text()).unwrap();
    assert_eq!(back.dense_values(), k.dense_values());
    assert!(Observable::<f64>::from_text(&g, "k 1 1\n0 0 1 0\n").is_err());
}

#[test]
fn dense_rejects_wrong_length() {
    let g = k4();
    let ps = Arc::new(PathSet::new(&g, 1).unwrap());
    assert!(matches!(
        Observable::dense(&g, ps, vec![c(0.0, 0.0); 3]),
        Err(Error::DimensionMismatch { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sesquilinear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let (g, _) = mixed_instance(15, 1.0, seed);
        let n = 15;
        let ne = g.num_oriented_edges();
        let s = c(a, b);
        let k = Observable::from_fn(&g, 2, |p| c((p[0] * 3 + p[2]) as f64 * 0.1, (p[1] as f64).sin())).unwrap();
        let l = Observable::from_fn(&g, 2, |p| c((p[1] as f64).cos(), 0.5)).unwrap();
        let sum = Observable::from_fn(&g, 2, |p| k.value(p) + l.value(p)).unwrap();
        let u: Vec<Complex64> = (0..n).map(|x| c(x as f64, 1.0)).collect();
        let v: Vec<Complex64> = (0..n).map(|x| c(1.0, -(x as f64))).collect();
        let su: Vec<Complex64> = u.iter().map(|x| x * s).collect();
        let lin = kg_matrix_element(&sum, &u, &v) - kg_matrix_element(&k, &u, &v) - kg_matrix_element(&l, &u, &v);
        prop_assert!(lin.norm() < 1e-9);
        let anti = kg_matrix_element(&k, &su, &v) - s.conj() * kg_matrix_element(&k, &u, &v);
        prop_assert!(anti.norm() < 1e-9);
        let fe: Vec<Complex64> = (0..ne).map(|e| c(e as f64 * 0.1, 1.0)).collect();
        let he: Vec<Complex64> = (0..ne).map(|e| c(1.0, e as f64 * 0.2)).collect();
        let sh: Vec<Complex64> = he.iter().map(|x| x * s).collect();
        let lin_b = kb_matrix_element(&k, &fe, &sh).unwrap() - s * kb_matrix_element(&k, &fe, &he).unwrap();
        prop_assert!(lin_b.norm() < 1e-9);
    }
}
