#![no_main]

use contextuality::io::parse_product;
use contextuality::reductions::ReductionBudget;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // Small budgets keep every input cheap.
    let budget = ReductionBudget { vertices: 16, subsets: 10_000 };
    let _ = parse_product(text, 2_000, budget);
});
