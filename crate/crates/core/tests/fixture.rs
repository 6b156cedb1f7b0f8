//! The committed example fixture must be reproducible from its pinned seeds.
//! Run with `KDDS_BLESS=1` to rewrite it after an intentional change.

use kdds::influence::{objective, SeedSet};
use kdds::prompting::{build_pinned_example_fixture, validate_fixture, ExampleFixture};

#[test]
fn golden_fixture_regenerates_byte_for_byte() {
    let fresh = build_pinned_example_fixture().unwrap().to_json().unwrap();
    if std::env::var_os("KDDS_BLESS").is_some() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/example_fixture.json");
        std::fs::write(path, &fresh).unwrap();
        return;
    }
    assert_eq!(fresh, ExampleFixture::golden_json());
}

#[test]
fn golden_solution_beats_top_out_degree() {
    let fx = ExampleFixture::golden();
    let seeds = validate_fixture(fx).unwrap();
    let g = fx.graph().unwrap();
    assert_eq!(objective(&g, &seeds, fx.d), fx.objective);

    let mut order: Vec<usize> = g.nodes().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.out_degree(v)), v));
    order.truncate(fx.k);
    let greedy = SeedSet::new(order, fx.k, g.node_count()).unwrap();
    assert!(fx.objective >= objective(&g, &greedy, fx.d));
}
