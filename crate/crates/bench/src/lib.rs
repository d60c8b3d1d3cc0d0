//! Inputs shared by the benchmarks, built once from fixed seeds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schemata::fuzz::{random_net_a, random_net_b, random_scheme, random_structure, SchemeShape};
use schemata::lang::Scheme;
use schemata::model::Structure;
use schemata::petri::{ExplicitNet, GeneralNet, PartitionedNet};
use schemata::problems::{self, GraphView};

pub const SEED: u64 = 0xBE_4C;

/// Graphs for the cubic-subgraph scheme, smallest first.
pub fn cub_graphs() -> Vec<(&'static str, Structure)> {
    vec![
        ("k4", problems::complete_graph(4).to_structure("k4")),
        (
            "prism-minus",
            GraphView::new(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (1, 4)]).to_structure("p"),
        ),
        ("k5", problems::complete_graph(5).to_structure("k5")),
    ]
}

/// Random schemes paired with random structures of size 3.
pub fn scheme_corpus(count: usize) -> Vec<(Scheme, Structure)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count)
        .map(|_| {
            let s = random_scheme(&mut rng, SchemeShape::default());
            (s, random_structure(&mut rng, 3, 0.4))
        })
        .collect()
}

pub fn partitioned_nets(count: usize, size: usize) -> Vec<PartitionedNet> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    (0..count)
        .map(|_| PartitionedNet::from_structure_b(&random_net_b(&mut rng, size)).expect("sigma_b"))
        .collect()
}

pub fn general_nets(count: usize, size: usize) -> Vec<ExplicitNet> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    (0..count)
        .map(|_| {
            GeneralNet::from_structure_a(&random_net_a(&mut rng, size))
                .expect("sigma_a")
                .to_explicit()
        })
        .collect()
}
