use ogl_core::data_io::{
    balanced_error_rate, load_groups, load_matrix_csv, load_sparse_solution, load_vector,
    synth_overlap_dataset, write_groups, write_matrix_csv, write_sparse_solution, write_vector,
    SynthSpec,
};
use ogl_core::{DenseMatrix, GroupStructure, OglError};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_survives_write_and_read(
        (rows, cols, data) in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec(prop::num::f64::NORMAL, r * c))
        })
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = DenseMatrix::new(rows, cols, data).unwrap();
        write_matrix_csv(&path, &m).unwrap();
        prop_assert_eq!(load_matrix_csv(&path).unwrap(), m);
    }

    #[test]
    fn sparse_solution_survives_write_and_read(
        x in prop::collection::vec(prop_oneof![Just(0.0), prop::num::f64::NORMAL], 1..40)
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        write_sparse_solution(&path, &x).unwrap();
        prop_assert_eq!(load_sparse_solution(&path, x.len()).unwrap(), x);
    }

    #[test]
    fn balanced_error_ignores_class_sizes(
        (pred, labels) in (2usize..30).prop_flat_map(|n| {
            let pm = prop_oneof![Just(1.0), Just(-1.0)];
            (prop::collection::vec(pm.clone(), n), prop::collection::vec(pm, n))
        })
    ) {
        prop_assume!(labels.contains(&1.0) && labels.contains(&-1.0));
        let ber = balanced_error_rate(&pred, &labels).unwrap();
        // duplicating every negative example leaves both class error rates intact
        let (mut p2, mut l2) = (pred.clone(), labels.clone());
        for (p, l) in pred.iter().zip(&labels) {
            if *l < 0.0 {
                p2.push(*p);
                l2.push(*l);
            }
        }
        prop_assert!((balanced_error_rate(&p2, &l2).unwrap() - ber).abs() < 1e-15);
    }
}

#[test]
fn vector_and_groups_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let v = vec![1.0, -0.1, 1e-300, 3.5e12];
    write_vector(&dir.path().join("b.txt"), &v).unwrap();
    assert_eq!(load_vector(&dir.path().join("b.txt")).unwrap(), v);

    let gs = GroupStructure::new(vec![vec![0, 2], vec![1, 2, 3]], vec![0.7, 2.0f64.sqrt()], 5)
        .unwrap()
        .with_names(vec!["alpha".into(), "beta".into()])
        .unwrap();
    let path = dir.path().join("groups.txt");
    write_groups(&path, &gs).unwrap();
    assert_eq!(load_groups(&path, 5).unwrap(), gs);
}

#[test]
fn synthetic_data_is_deterministic() {
    let spec = SynthSpec {
        p: 40,
        n: 15,
        g: 5,
        group_size: 6,
        overlap: 2,
        active_groups: 2,
        noise_sigma: 0.3,
        seed: 99,
    };
    let (a1, g1, x1) = synth_overlap_dataset(&spec).unwrap();
    let (a2, g2, x2) = synth_overlap_dataset(&spec).unwrap();
    assert_eq!(a1.a, a2.a);
    assert_eq!(a1.b, a2.b);
    assert_eq!(g1, g2);
    assert_eq!(x1, x2);
    let other = synth_overlap_dataset(&SynthSpec { seed: 100, ..spec }).unwrap();
    assert_ne!(other.0.b, a1.b);
}

#[test]
fn missing_file_is_an_input_error() {
    let err = load_matrix_csv(std::path::Path::new("/nonexistent/a.csv")).unwrap_err();
    assert!(matches!(err, OglError::Io { .. }));
    assert!(err.is_input_error());
}

#[test]
fn ragged_csv_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "1,2,3\n4,5\n").unwrap();
    match load_matrix_csv(&path).unwrap_err() {
        OglError::RaggedRows {
            line,
            expected,
            got,
            ..
        } => {
            assert_eq!((line, expected, got), (2, 3, 2));
        }
        other => panic!("unexpected error {other}"),
    }
}
