use lsrk::conditions::{is_two_n_storage, linear_coeffs, order_residuals};
use lsrk::numerics::q;
use lsrk::schemes::registry_get;
use lsrk::search::{search, Family, Filter, SearchSpec};

fn filtered_spec(max_den: u32, jobs: usize) -> SearchSpec {
    let mut spec = SearchSpec::new(Family::F43, max_den);
    spec.filters = vec![
        Filter::IncreasingNodes,
        Filter::min_weight_default(),
        Filter::LinearFourthOrder,
        Filter::RationalRootsOnly,
    ];
    spec.jobs = jobs;
    spec
}

#[test]
fn finds_published_schemes_deterministically() {
    let r1 = search(&filtered_spec(15, 1)).unwrap();
    let r4 = search(&filtered_spec(15, 4)).unwrap();
    assert_eq!(r1.schemes, r4.schemes);
    assert_eq!(r1.counters, r4.counters);
    for name in ["43-2", "43-3"] {
        let want = registry_get(name).unwrap();
        assert!(r1.schemes.iter().any(|s| s.as_rational().map(|f| f.tableau == *want.rational_tableau()).unwrap_or(false)), "{name}");
    }
    for s in &r1.schemes {
        let t = s.rational_tableau();
        assert!(order_residuals(t, 3).unwrap().all_zero());
        assert!(is_two_n_storage(t).0);
        assert!(t.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(t.weights().iter().all(|b| *b >= q(-3, 8)));
    }
}

#[test]
fn linear_filter_gives_gamma4() {
    let mut spec = SearchSpec::new(Family::F43, 12);
    spec.filters = vec![Filter::LinearFourthOrder, Filter::RationalRootsOnly, Filter::IncreasingNodes];
    let r = search(&spec).unwrap();
    assert!(!r.schemes.is_empty());
    for s in &r.schemes {
        assert_eq!(linear_coeffs(s.rational_tableau()).gamma[3], q(1, 24));
    }
}
