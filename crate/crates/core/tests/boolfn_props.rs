use commcap::{make_family, parse_ccf, serialize_ccf, sign_matrix, BooleanFunction, Family};
use proptest::prelude::*;

fn random_function() -> impl Strategy<Value = BooleanFunction> {
    (1usize..=5)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(0u8..=1, 1 << (2 * n))))
        .prop_map(|(n, table)| BooleanFunction::new(n, table).unwrap())
}

proptest! {
    #[test]
    fn ccf_round_trip(f in random_function()) {
        let text = serialize_ccf(&f);
        prop_assert_eq!(parse_ccf(text.as_bytes()).unwrap(), f);
    }

    #[test]
    fn sign_entries_square_to_one(f in random_function()) {
        let m = sign_matrix(&f);
        for x in 0..f.dim() {
            for y in 0..f.dim() {
                let s = m.get(x, y);
                prop_assert_eq!(s * s, 1);
                prop_assert_eq!(s == -1, f.value(x, y) == 1);
            }
        }
    }

    #[test]
    fn random_family_is_reproducible(n in 1usize..=6, seed in any::<u64>()) {
        let a = make_family(Family::Random, n, Some(seed)).unwrap();
        let b = make_family(Family::Random, n, Some(seed)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn hundred_random_functions_round_trip_at_n3() {
    for seed in 0..100 {
        let f = make_family(Family::Random, 3, Some(seed)).unwrap();
        assert_eq!(parse_ccf(serialize_ccf(&f).as_bytes()).unwrap(), f);
    }
}

#[test]
fn packed_rows_mark_negative_entries() {
    let m = sign_matrix(&make_family(Family::Random, 7, Some(3)).unwrap());
    let (words, packed) = m.packed_rows();
    for x in 0..m.dim() {
        for y in 0..m.dim() {
            let bit = packed[x * words + y / 64] >> (y % 64) & 1;
            assert_eq!(bit == 1, m.get(x, y) == -1);
        }
    }
}
