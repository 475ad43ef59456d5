mod common;

use padic_transfer_core::padic::Ctx;

#[test]
fn orbital_derivative_matches_max_order_intersections() {
    let c = Ctx::new(3).unwrap();
    let mut failures = Vec::new();
    for n in [2usize, 3] {
        for t in 0..=n {
            for seed in 0..8 {
                if let Some(f) = common::maxorder_case(c, n, t, seed).unwrap() {
                    failures.push(f);
                }
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}
