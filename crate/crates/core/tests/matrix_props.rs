use markovspan::{kron, mat_mul, mat_pow, ratio, solve_linear, Matrix, Rational};
use num_traits::One;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<Rational>> {
    proptest::collection::vec(proptest::collection::vec(small_rational(), cols), rows)
        .prop_map(|d| Matrix::from_dense(d).unwrap())
}

fn any_matrix() -> impl Strategy<Value = Matrix<Rational>> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| matrix(r, c))
}

fn stochastic(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    proptest::collection::vec(proptest::collection::vec(0i64..=3, n), n).prop_map(move |mut rows| {
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] += 1;
        }
        let dense = rows
            .iter()
            .map(|r| {
                let s: i64 = r.iter().sum();
                r.iter().map(|&x| ratio(x, s)).collect()
            })
            .collect();
        Matrix::from_dense(dense).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in any_matrix(), b in any_matrix(), c in any_matrix()) {
        prop_assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
    }

    #[test]
    fn mixed_product(
        (a, c) in (1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(r, m, s)| (matrix(r, m), matrix(m, s))),
        (b, d) in (1usize..=2, 1usize..=2, 1usize..=2).prop_flat_map(|(r, m, s)| (matrix(r, m), matrix(m, s))),
    ) {
        let lhs = mat_mul(&kron(&a, &b), &kron(&c, &d)).unwrap();
        let rhs = kron(&mat_mul(&a, &c).unwrap(), &mat_mul(&b, &d).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn solve_substitutes_back(n in 1usize..=4, seed in any::<u64>()) {
        // diagonally dominant, hence nonsingular
        let mut s = seed;
        let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as i64 % 7 - 3 };
        let dense: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { ratio(20 + next(), 1) } else { ratio(next(), 2) }).collect())
            .collect();
        let a = Matrix::from_dense(dense).unwrap();
        let b = Matrix::from_dense((0..n).map(|_| vec![ratio(next(), 3), ratio(next(), 1)]).collect()).unwrap();
        let x = solve_linear(&a, &b).unwrap();
        prop_assert_eq!(mat_mul(&a, &x).unwrap(), b);
    }

    #[test]
    fn powers_stay_stochastic(m in (1usize..=3).prop_flat_map(stochastic), k in 0u64..=100) {
        let p = mat_pow(&m, k).unwrap();
        prop_assert!(p.row_sums().iter().all(One::is_one));
    }
}
