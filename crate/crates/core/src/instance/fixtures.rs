//! Built-in worked examples, addressable by name from the CLI.

use super::Instance;
use crate::tour::Tour;

/// Cost of the "prohibitive" arcs in the 10-vertex cancel example.
pub const FIGURE3_PROHIBITIVE: i64 = 1000;

/// Ten vertices on a ring. Ring arcs alternate 12 (from an odd 1-based
/// vertex) and 2 (from an even one); chords `(i, i+5)` cost 7; every other
/// arc costs 1000. Costs are the same in both directions.
///
/// The ring tour costs 70 and is 2-opt and 3-opt optimal, while a single
/// alternating cycle cancel reaches the optimum 45.
pub fn figure3_instance() -> Instance {
    Instance::from_fn("fig3", 10, |a, b| {
        // 1-based labels, ring arithmetic mod 10 with 0 = 10
        let (i, j) = (a + 1, b + 1);
        let step = |x: usize| x % 10 + 1;
        if j == step(i) || i == step(j) {
            let from = if j == step(i) { i } else { j };
            if from % 2 == 1 {
                12
            } else {
                2
            }
        } else if (i + 5 - 1) % 10 + 1 == j || (j + 5 - 1) % 10 + 1 == i {
            7
        } else {
            FIGURE3_PROHIBITIVE
        }
    })
    .expect("fixture is valid")
}

/// The ring tour 1 → 2 → … → 10 → 1 (cost 70).
pub fn figure3_tour() -> Tour {
    Tour::from_sequence(&(0..10).collect::<Vec<_>>()).expect("fixture is valid")
}

/// Eight vertices with tour 1 → … → 8 → 1. The tour arcs (2,3), (3,4),
/// (6,7), (7,8) cost 10 and the other tour arcs 1; the chords 2–8, 3–7 and
/// 4–6 cost 3 in both directions; all remaining arcs cost 20.
///
/// Canceling the circulation built from the cycles
/// {−(2,3), −(7,8), +(2,8), +(7,3)} and {−(3,4), −(6,7), +(3,7), +(6,4)}
/// uses the opposite pair (3,7)/(7,3) and leaves 3 and 7 isolated.
pub fn figure5_instance() -> Instance {
    Instance::from_fn("fig5", 8, |a, b| {
        let (i, j) = (a.min(b) + 1, a.max(b) + 1);
        match (i, j) {
            (2, 3) | (3, 4) | (6, 7) | (7, 8) => 10,
            (1, 2) | (4, 5) | (5, 6) | (1, 8) => 1,
            (2, 8) | (3, 7) | (4, 6) => 3,
            _ => 20,
        }
    })
    .expect("fixture is valid")
}

/// The ring tour 1 → 2 → … → 8 → 1.
pub fn figure5_tour() -> Tour {
    Tour::from_sequence(&(0..8).collect::<Vec<_>>()).expect("fixture is valid")
}

/// Looks up a built-in fixture by name (`fig3`, `fig5`).
pub fn fixture(name: &str) -> Option<Instance> {
    match name {
        "fig3" => Some(figure3_instance()),
        "fig5" => Some(figure5_instance()),
        _ => None,
    }
}
