mod common;

use std::collections::HashSet;

use common::{mutation_chain, random_genome};
use neatflow::genome::{Genome, NodeRole};
use neatflow::mutation::{mutate, MutationConfig};
use neatflow::reproduction::{compatibility_distance, crossover, speciate, SpeciationConfig};
use neatflow::InnovationRegistry;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn mutation_chain_iris() {
    mutation_chain(4, 3, 10_000, 1).unwrap();
}

#[test]
fn mutation_chain_wdbc() {
    mutation_chain(9, 1, 10_000, 2).unwrap();
}

#[test]
fn mutation_chain_cartpole() {
    mutation_chain(4, 1, 10_000, 3).unwrap();
}

/// A small evolved population sharing one registry.
fn population(seed: u64, size: usize, rounds: usize) -> Vec<Genome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let template = Genome::initial(4, 3, 6, &mut rng);
    let mut registry = InnovationRegistry::from_genome(&template);
    let cfg = MutationConfig::default();
    let mut pop = vec![template; size];
    for _ in 0..rounds {
        for g in pop.iter_mut() {
            mutate(g, &cfg, &mut rng, &mut registry);
        }
        registry.next_generation();
    }
    pop
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crossover_children_are_valid_and_inherit_only_parent_genes(seed in any::<u64>(), fa in -2i32..2, fb in -2i32..2) {
        let pop = population(seed, 6, 25);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..10 {
            let a = &pop[rng.gen_range(0..pop.len())];
            let b = &pop[rng.gen_range(0..pop.len())];
            let child = crossover(a, fa as f64, b, fb as f64, &mut rng);
            prop_assert!(child.validate().is_ok());
            let parents: HashSet<_> = a.connections.iter().chain(&b.connections).map(|c| c.innovation).collect();
            prop_assert!(child.connections.iter().all(|c| parents.contains(&c.innovation)));
            let roles = |g: &Genome, r| { let mut v = g.ids_with_role(r); v.sort(); v };
            prop_assert_eq!(roles(&child, NodeRole::Input), roles(a, NodeRole::Input));
            prop_assert_eq!(roles(&child, NodeRole::Output), roles(a, NodeRole::Output));
        }
    }

    #[test]
    fn distance_is_symmetric_and_zero_on_self(seed in any::<u64>()) {
        let pop = population(seed, 5, 15);
        let cfg = SpeciationConfig::default();
        for a in &pop {
            prop_assert_eq!(compatibility_distance(a, a, &cfg), 0.0);
            for b in &pop {
                let d = compatibility_distance(a, b, &cfg);
                prop_assert!(d >= 0.0);
                prop_assert_eq!(d, compatibility_distance(b, a, &cfg));
            }
        }
    }

    #[test]
    fn speciation_partitions_the_population(seed in any::<u64>(), threshold in 0.1f64..4.0) {
        let pop = population(seed, 12, 20);
        let cfg = SpeciationConfig { threshold, ..SpeciationConfig::default() };
        let species = speciate(&pop, &cfg, &[]);
        let mut seen: Vec<usize> = species.iter().flat_map(|s| s.members.iter().copied()).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..pop.len()).collect::<Vec<_>>());
        prop_assert!(species.iter().all(|s| !s.members.is_empty()));
        let again = speciate(&pop, &cfg, &species);
        let total: usize = again.iter().map(|s| s.members.len()).sum();
        prop_assert_eq!(total, pop.len());
    }

    #[test]
    fn genome_json_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_genome(&mut rng, 4, 3, 8);
        let back = Genome::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(back, g);
    }
}
