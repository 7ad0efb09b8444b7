pub mod oracles;

use poplearn::games::Observation;
use poplearn::TabularPolicy;

/// The acting table of a tabular policy in the oracles' layout.
#[allow(dead_code)]
pub fn table_of(p: &TabularPolicy) -> oracles::Table {
    let mut t = [[0.0; 3]; 10];
    for (k, row) in t.iter_mut().enumerate() {
        row.copy_from_slice(p.dist(Observation::from_index(k)).probs());
    }
    t
}
