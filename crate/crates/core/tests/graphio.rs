mod common;

use common::*;
use proptest::prelude::*;
use qswalk::graphio::*;
use qswalk::linalg::{CsrMatrix, Operator};

fn sparse_strategy(complex: bool) -> impl Strategy<Value = Operator> {
    (1usize..12).prop_flat_map(move |n| {
        proptest::collection::btree_map((0..n, 0..n), (-1e3f64..1e3, -1e3f64..1e3), 0..n * n)
            .prop_map(move |entries| {
                let triplets = entries
                    .into_iter()
                    .map(|((r, col), (re, im))| (r, col, c(re, if complex { im } else { 0.0 })))
                    .filter(|(_, _, v)| v.norm() > 0.0);
                Operator::Sparse(CsrMatrix::from_triplets(n, n, triplets))
            })
    })
}

proptest! {
    #[test]
    fn matrix_market_round_trip(m in sparse_strategy(true)) {
        prop_assert_eq!(parse_matrix_market(&write_matrix_market(&m)).unwrap(), m);
    }

    #[test]
    fn edge_list_round_trip(m in sparse_strategy(false)) {
        prop_assert_eq!(parse_edge_list(&write_edge_list(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn erdos_renyi_extremes(n in 1usize..15, seed in any::<u64>()) {
        let full = erdos_renyi(n, 1.0, true, seed).unwrap();
        prop_assert_eq!(full.nnz(), n * (n - 1));
        prop_assert!((0..n).all(|i| full.get(i, i).norm() == 0.0));
        prop_assert_eq!(erdos_renyi(n, 0.0, true, seed).unwrap().nnz(), 0);
        prop_assert_eq!(erdos_renyi(n, 0.3, true, seed).unwrap(), erdos_renyi(n, 0.3, true, seed).unwrap());
    }
}

#[test]
fn files_are_read_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("two_parent.edges");
    std::fs::write(&edges, "# moralization example\n1 3\n2 3\n").unwrap();
    let spec: GraphSpec = format!("file:{}", edges.display()).parse().unwrap();
    assert!(spec.is_directed());
    let a_in = adjacency(&spec, Orientation::In).unwrap();
    assert_eq!(a_in.to_dense(), two_parent_adjacency().to_dense());
    assert_eq!(
        adjacency(&spec, Orientation::Out).unwrap().to_dense(),
        two_parent_adjacency().transpose().to_dense()
    );

    let mtx = dir.path().join("two_parent.mtx");
    std::fs::write(
        &mtx,
        "%%MatrixMarket matrix coordinate pattern general\n3 3 2\n1 3\n2 3\n",
    )
    .unwrap();
    let spec = GraphSpec::File { path: mtx };
    assert_eq!(
        adjacency(&spec, Orientation::In).unwrap().to_dense(),
        two_parent_adjacency().to_dense()
    );

    let missing = GraphSpec::File {
        path: dir.path().join("absent.edges"),
    };
    assert!(matches!(
        adjacency(&missing, Orientation::Out),
        Err(qswalk::Error::Io(_))
    ));
}

#[test]
fn self_loops_pass_through() {
    let a = parse_edge_list("1 1\n1 2\n").unwrap();
    assert_eq!(a.get(0, 0), c(1.0, 0.0));
    assert_eq!(orient(&a, Orientation::Undirected).get(0, 0), c(1.0, 0.0));
}

#[test]
fn random_specs_are_reproducible() {
    let spec: GraphSpec = "er:10:0.5:9".parse().unwrap();
    assert_eq!(
        adjacency(&spec, Orientation::In).unwrap(),
        adjacency(&spec, Orientation::In).unwrap()
    );
    let und: GraphSpec = "uer:10:0.5:9".parse().unwrap();
    assert!(adjacency(&und, Orientation::In).is_err());
    assert!(adjacency(&und, Orientation::Undirected)
        .unwrap()
        .is_hermitian(0.0));
}
