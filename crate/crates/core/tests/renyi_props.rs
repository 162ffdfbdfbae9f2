use commcap::capacity::quartic_sum;
use commcap::randfn::{s2_from_t, t_statistic, t_statistic_with};
use commcap::{
    capacity_entropy, make_family, renyi2_of_spectrum, renyi2_uniform_fast, sign_matrix, Execution,
    Family, SignMatrix, SimplexVector,
};
use proptest::prelude::*;

fn random_matrix() -> impl Strategy<Value = SignMatrix> {
    (1usize..=5, any::<u64>())
        .prop_map(|(n, seed)| sign_matrix(&make_family(Family::Random, n, Some(seed)).unwrap()))
}

/// Permutes and sign-flips columns, and optionally flips every sign.
fn remix(m: &SignMatrix, shift: usize, flips: u64, global: bool) -> SignMatrix {
    let d = m.dim();
    let entries = (0..d)
        .flat_map(|x| (0..d).map(move |y| (x, y)))
        .map(|(x, y)| {
            let col = (5 * y + shift) % d;
            let s = if flips >> (col % 64) & 1 == 1 { -1 } else { 1 };
            let g = if global { -1 } else { 1 };
            m.get(x, col) * s * g
        })
        .collect();
    SignMatrix::from_entries(m.n(), entries).unwrap()
}

fn transpose(m: &SignMatrix) -> SignMatrix {
    let d = m.dim();
    let entries = (0..d)
        .flat_map(|x| (0..d).map(move |y| m.get(y, x)))
        .collect();
    SignMatrix::from_entries(m.n(), entries).unwrap()
}

fn rows_orthogonal(m: &SignMatrix) -> bool {
    let d = m.dim();
    (0..d).all(|i| {
        (i + 1..d).all(|j| {
            m.row(i)
                .iter()
                .zip(m.row(j))
                .map(|(a, b)| i32::from(a * b))
                .sum::<i32>()
                == 0
        })
    })
}

proptest! {
    #[test]
    fn fast_path_matches_spectrum(m in random_matrix()) {
        let u = SimplexVector::uniform(m.dim());
        let spectrum = capacity_entropy(&m, &u, &u).unwrap();
        let fast = renyi2_uniform_fast(&m).s2_bits;
        let slow = renyi2_of_spectrum(&spectrum.sigma_sq).unwrap().s2_bits;
        prop_assert!((fast - slow).abs() <= 1e-8);
        prop_assert!(fast <= spectrum.entropy_bits + 1e-9);
    }

    #[test]
    fn t_route_matches_fast_path(m in random_matrix()) {
        let t = t_statistic(&m);
        prop_assert!((s2_from_t(m.n(), t) - renyi2_uniform_fast(&m).s2_bits).abs() <= 1e-10);
        prop_assert_eq!(t_statistic_with(&m, Execution::Parallel), t);
    }

    #[test]
    fn t_invariant_under_column_moves(m in random_matrix(), shift in 0usize..32, flips in any::<u64>()) {
        prop_assert_eq!(t_statistic(&remix(&m, shift, flips, false)), t_statistic(&m));
    }

    #[test]
    fn s2_invariant_under_permutation_and_sign(m in random_matrix(), shift in 0usize..32, global in any::<bool>()) {
        let base = renyi2_uniform_fast(&m).s2_bits;
        prop_assert_eq!(renyi2_uniform_fast(&remix(&m, shift, 0, global)).s2_bits, base);
        // Row moves are column moves of the transpose, and tr((MM^T)^2) = tr((M^T M)^2).
        let rows = transpose(&remix(&transpose(&m), shift, 0, false));
        prop_assert_eq!(renyi2_uniform_fast(&rows).s2_bits, base);
    }

    #[test]
    fn t_zero_iff_orthogonal_rows(m in random_matrix(), n in 1usize..=6, shift in 0usize..64, flips in any::<u64>()) {
        prop_assert_eq!(t_statistic(&m) == 0, rows_orthogonal(&m));
        let ip = sign_matrix(&make_family(Family::Ip, n, None).unwrap());
        let ip = remix(&ip, shift, flips, false);
        prop_assert!(rows_orthogonal(&ip));
        prop_assert_eq!(t_statistic(&ip), 0);
    }
}

#[test]
fn quartic_sum_is_t_plus_diagonal() {
    for n in 1..=6 {
        let m = sign_matrix(&make_family(Family::Random, n, Some(n as u64)).unwrap());
        let d = m.dim() as u128;
        assert_eq!(quartic_sum(&m), t_statistic(&m) + d * d * d);
    }
}

#[test]
fn nonorthogonal_families_have_positive_t() {
    for family in [
        Family::Eq,
        Family::Ne,
        Family::Disj,
        Family::Const0,
        Family::Const1,
    ] {
        let m = sign_matrix(&make_family(family, 3, None).unwrap());
        assert!(t_statistic(&m) > 0, "{family}");
    }
}
