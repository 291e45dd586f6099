mod common;

use common::{naive_activate, random_genome};
use neatflow::Phenotype;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn compiled_network_matches_recursive_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..500 {
        let n_in = rng.gen_range(1..=9);
        let n_out = rng.gen_range(1..=3);
        let g = random_genome(&mut rng, n_in, n_out, 10);
        g.validate().unwrap();
        let net = Phenotype::compile(&g).unwrap();
        for _ in 0..4 {
            let x: Vec<f64> = (0..n_in).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let got = net.activate(&x).unwrap();
            let want = naive_activate(&g, &x);
            assert_eq!(got.len(), n_out);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() <= 1e-12, "case {case}: {a} vs {b}");
                assert!((0.0..=1.0).contains(a));
            }
        }
    }
}

#[test]
fn wrong_input_length_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_genome(&mut rng, 4, 1, 3);
    let net = Phenotype::compile(&g).unwrap();
    assert!(net.activate(&[0.0; 3]).is_err());
}
