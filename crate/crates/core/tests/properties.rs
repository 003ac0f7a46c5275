use kronfact::metrics::{frob_metric, is_exact_kronecker, nearest_binary_kronecker, var_metric};
use kronfact::search::{outsiders, random_perturbation, Outsiders};
use kronfact::{BinaryMatrix, BlockGrid, Graph, Permutation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix(max_side: usize) -> impl Strategy<Value = BinaryMatrix> {
    (1..=max_side).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n)
            .prop_map(move |bits| BinaryMatrix::from_fn(n, |i, j| bits[i * n + j]))
    })
}

fn square(n: usize, density: f64) -> impl Strategy<Value = BinaryMatrix> {
    proptest::collection::vec(proptest::bool::weighted(density), n * n)
        .prop_map(move |bits| BinaryMatrix::from_fn(n, |i, j| bits[i * n + j]))
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_vec(v).unwrap())
}

/// `(dim_b, dim_c, b, c)` with both factors nonzero.
fn factor_pair() -> impl Strategy<Value = (usize, usize, BinaryMatrix, BinaryMatrix)> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(db, dc)| (Just(db), Just(dc), square(db, 0.5), square(dc, 0.5)))
        .prop_filter("nonzero factors", |(_, _, b, c)| b.popcount() > 0 && c.popcount() > 0)
}

/// A product together with a permutation of its side.
fn permuted_product() -> impl Strategy<Value = (usize, usize, BinaryMatrix, Permutation)> {
    factor_pair().prop_flat_map(|(db, dc, b, c)| {
        let a = BinaryMatrix::kronecker(&b, &c);
        (Just(db), Just(dc), Just(a), permutation(db * dc))
    })
}

fn sorted_row_sums(a: &BinaryMatrix) -> Vec<u32> {
    let mut v: Vec<u32> = (0..a.n()).map(|i| a.row_sum(i)).collect();
    v.sort_unstable();
    v
}

fn sorted_col_sums(a: &BinaryMatrix) -> Vec<u32> {
    let mut v: Vec<u32> = (0..a.n()).map(|j| a.col_sum(j)).collect();
    v.sort_unstable();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn kronecker_is_associative(a in matrix(3), b in matrix(3), c in matrix(3)) {
        let left = BinaryMatrix::kronecker(&BinaryMatrix::kronecker(&a, &b), &c);
        let right = BinaryMatrix::kronecker(&a, &BinaryMatrix::kronecker(&b, &c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn direct_product_adjacency_is_kronecker(a in matrix(5), b in matrix(5)) {
        let g = Graph::from_adjacency(&a);
        let h = Graph::from_adjacency(&b);
        let product = Graph::direct_product(&g, &h);
        prop_assert_eq!(product.edge_count(), g.edge_count() * h.edge_count());
        prop_assert_eq!(product.adjacency(), BinaryMatrix::kronecker(&a, &b));
    }

    #[test]
    fn inverse_permutation_restores(a in matrix(9), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Permutation::random(a.n(), &mut rng);
        let q = Permutation::random(a.n(), &mut rng);
        let back = a.permute_symmetric(&p).unwrap().permute_symmetric(&p.inverse()).unwrap();
        prop_assert_eq!(&back, &a);
        let twice = a.permute_symmetric(&p).unwrap().permute_symmetric(&q).unwrap();
        prop_assert_eq!(twice, a.permute_symmetric(&p.then(&q)).unwrap());
    }

    #[test]
    fn swap_preserves_sum_multisets(a in matrix(10), i in 0usize..10, j in 0usize..10) {
        let n = a.n();
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        let s = a.swap_pair(i, j).unwrap();
        prop_assert_eq!(s.popcount(), a.popcount());
        prop_assert_eq!(sorted_row_sums(&s), sorted_row_sums(&a));
        prop_assert_eq!(sorted_col_sums(&s), sorted_col_sums(&a));
        prop_assert_eq!(s.swap_pair(i, j).unwrap(), a);
    }

    #[test]
    fn residual_zero_iff_exact(a in square(8, 0.4), split in 0usize..2) {
        let (db, dc) = [(2, 4), (4, 2)][split];
        let f = nearest_binary_kronecker(&a, db, dc).unwrap();
        prop_assert_eq!(f.residual == 0, is_exact_kronecker(&a, db, dc).unwrap());
        prop_assert_eq!(
            f.residual,
            a.hamming(&BinaryMatrix::kronecker(&f.b, &f.c)).unwrap()
        );
    }

    #[test]
    fn product_factors_are_recovered((db, dc, b, c) in factor_pair()) {
        let a = BinaryMatrix::kronecker(&b, &c);
        let f = nearest_binary_kronecker(&a, db, dc).unwrap();
        prop_assert_eq!(f.residual, 0);
        prop_assert_eq!(&f.b, &b);
        prop_assert_eq!(&f.c, &c);
        let k = b.popcount();
        let s = c.popcount();
        prop_assert_eq!(frob_metric(&a, db, dc).unwrap(), k * k * s * s);
    }

    #[test]
    fn nearest_is_idempotent(a in square(6, 0.5), split in 0usize..2) {
        let (db, dc) = [(2, 3), (3, 2)][split];
        let f = nearest_binary_kronecker(&a, db, dc).unwrap();
        let rebuilt = BinaryMatrix::kronecker(&f.b, &f.c);
        let g = nearest_binary_kronecker(&rebuilt, db, dc).unwrap();
        prop_assert_eq!(g.residual, 0);
        prop_assert_eq!(BinaryMatrix::kronecker(&g.b, &g.c), rebuilt);
    }

    #[test]
    fn frob_is_bounded_by_squared_popcount(a in square(12, 0.3), split in 0usize..4) {
        let (db, dc) = [(2, 6), (3, 4), (4, 3), (6, 2)][split];
        let total = a.popcount();
        let frob = frob_metric(&a, db, dc).unwrap();
        prop_assert!(frob <= total * total);
        prop_assert_eq!(frob == total * total, is_exact_kronecker(&a, db, dc).unwrap());
    }

    #[test]
    fn exact_product_beats_every_single_swap((db, dc, a, _p) in permuted_product()) {
        let n = a.n();
        prop_assume!(n >= 2);
        let best = frob_metric(&a, db, dc).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                prop_assert!(frob_metric(&a.swap_pair(i, j).unwrap(), db, dc).unwrap() <= best);
            }
        }
    }

    #[test]
    fn metrics_ignore_block_preserving_permutations(
        (db, dc, a, _p) in permuted_product(),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // whole blocks move, and one common order is used inside every block
        let outer = Permutation::random(db, &mut rng);
        let inner = Permutation::random(dc, &mut rng);
        let map: Vec<usize> = (0..db * dc)
            .map(|x| outer.as_slice()[x / dc] * dc + inner.as_slice()[x % dc])
            .collect();
        let moved = a.permute_symmetric(&Permutation::from_vec(map).unwrap()).unwrap();
        let before = BlockGrid::new(&a, db, dc).unwrap();
        let after = BlockGrid::new(&moved, db, dc).unwrap();
        prop_assert_eq!(var_metric(&before), var_metric(&after));
        prop_assert_eq!(frob_metric(&a, db, dc).unwrap(), frob_metric(&moved, db, dc).unwrap());
        prop_assert!(is_exact_kronecker(&moved, db, dc).unwrap());
    }

    #[test]
    fn perturbation_is_a_symmetric_permutation(a in matrix(12), frac in 0.05f64..=1.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, p) = random_perturbation(&a, frac, &mut rng).unwrap();
        prop_assert_eq!(&m, &a.permute_symmetric(&p).unwrap());
        prop_assert_eq!(sorted_row_sums(&m), sorted_row_sums(&a));
        prop_assert_eq!(sorted_col_sums(&m), sorted_col_sums(&a));
        let moved = p.as_slice().iter().enumerate().filter(|(i, &x)| *i != x).count();
        prop_assert!(moved as f64 <= (frac * a.n() as f64).ceil());
    }

    #[test]
    fn outsiders_signal_matches_predicate(a in square(12, 0.25), split in 0usize..4) {
        let (db, dc) = [(2, 6), (3, 4), (4, 3), (6, 2)][split];
        let grid = BlockGrid::new(&a, db, dc).unwrap();
        let signalled = matches!(outsiders(&a, db, dc).unwrap(), Outsiders::BlockMatrix);
        prop_assert_eq!(signalled, grid.is_block_matrix());
        if let Outsiders::Swaps(list) = outsiders(&a, db, dc).unwrap() {
            prop_assert!(list.iter().all(|&(i, j)| i < j && i / dc != j / dc));
        }
    }
}
