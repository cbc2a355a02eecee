use fgt_core::oracle::{format_fixture, parse_fixtures, Fixture};

const GOLDEN: &str = include_str!("fixtures/golden.csv");

#[test]
fn golden_probabilities_reproduce() {
    let fixtures = parse_fixtures(GOLDEN).unwrap();
    assert_eq!(fixtures.len(), 4);
    for f in fixtures {
        let fresh = Fixture::compute(f.event, f.q, f.n, f.theta.clone()).unwrap();
        assert_eq!(fresh.probability, f.probability, "{}", format_fixture(&f));
    }
}

#[test]
fn golden_file_is_canonical() {
    let body: Vec<String> = parse_fixtures(GOLDEN).unwrap().iter().map(format_fixture).collect();
    let expected: Vec<&str> = GOLDEN.lines().skip(1).collect();
    assert_eq!(body, expected);
}
