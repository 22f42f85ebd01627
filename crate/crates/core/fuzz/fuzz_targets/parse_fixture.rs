#![no_main]

use contextuality::corpus::{run_fixture, Fixture};
use contextuality::reductions::ReductionBudget;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(fixture) = serde_json::from_slice::<Fixture>(data) else { return };
    let budget = ReductionBudget { vertices: 12, subsets: 10_000 };
    if let Ok(h) = fixture.build() {
        if h.vertex_count() <= 12 {
            let _ = run_fixture(&fixture, budget);
        }
    }
});
