use toric_kring::charpair::{euler_characteristic, CharPair};
use toric_kring::fan::{to_char_pair, Fan};
use toric_kring::lattice::LatticeVector;
use toric_kring::presentations::{adaptive_verify, PresentationError};

fn square_quasitoric() -> CharPair {
    CharPair::new(
        2,
        4,
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        [[1, 0], [0, 1], [1, 2], [0, -1]]
            .iter()
            .map(|v| LatticeVector::from_i64s(v))
            .collect(),
    )
    .unwrap()
}

#[test]
fn quasitoric_square_verifies() {
    let cp = square_quasitoric();
    let r = adaptive_verify(&cp, 3).unwrap();
    assert!(r.all_passed(), "{:?}", r.witnesses);
    assert_eq!(r.rank, 4);
    assert_eq!(r.cohomology_graded.per_degree, vec![1, 2, 1]);
    assert_eq!(r.basis.as_ref().unwrap().len(), 4);
}

#[test]
fn threefold_product_verifies() {
    let p1 = Fan::projective_space(1);
    let cp = to_char_pair(&p1.product(&p1).product(&p1)).unwrap();
    let r = adaptive_verify(&cp, 2).unwrap();
    assert!(r.all_passed(), "{:?}", r.witnesses);
    assert_eq!(r.rank, 8);
    assert_eq!(r.kring_graded.unwrap().per_degree, vec![1, 3, 3, 1]);
}

#[test]
fn rank_equals_euler_characteristic_on_projective_spaces() {
    for n in 1..=4 {
        let cp = to_char_pair(&Fan::projective_space(n)).unwrap();
        let r = adaptive_verify(&cp, 1).unwrap();
        assert_eq!(r.rank, euler_characteristic(&cp).unwrap());
        assert_eq!(r.rank, n + 1);
        assert!(r.all_passed());
    }
}

#[test]
fn non_locally_standard_pair_is_refused() {
    let mut data = square_quasitoric().to_data();
    data.lambda[2] = vec![2, 0];
    let cp = CharPair::from_data(&data).unwrap();
    match adaptive_verify(&cp, 3) {
        Err(PresentationError::InvalidPair(report)) => {
            assert!(!report.is_locally_standard);
            assert!(!report.witnesses.is_empty());
        }
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn report_serializes_with_integer_fields() {
    let cp = to_char_pair(&Fan::projective_space(2)).unwrap();
    let r = adaptive_verify(&cp, 3).unwrap();
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["rank"], 3);
    assert_eq!(json["u_radius_used"], 1);
    assert_eq!(json["cohomology_graded"], serde_json::json!([1, 1, 1]));
    assert_eq!(json["basis_determinant"].as_i64().unwrap().abs(), 1);
}
