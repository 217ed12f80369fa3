//! Shared fixtures for the kernel benchmarks.

use std::sync::Arc;

use gamma2lab_core::corpus::{corpus, CorpusSpec};
use gamma2lab_core::{SphereDim, ZonalField, ZonalSpace};

/// Grid and one seeded corpus field on `S^n`.
pub fn fixture(n: usize, order: usize) -> (Arc<ZonalSpace>, ZonalField) {
    let space = ZonalSpace::new(SphereDim::new(n).expect("n >= 2"), order).expect("valid order");
    let field = corpus(&space, &CorpusSpec::default(), 1)
        .expect("positive corpus")
        .remove(0);
    (space, field)
}
