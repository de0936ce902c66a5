use bellfilter::formats::{parse_state, read_counts, state_to_string, write_counts};
use bellfilter::Error;
use bellfilter_core::channels::rho_form1;
use bellfilter_core::tomography::simulate_counts;
use bellfilter_core::Error as CoreError;

#[test]
fn state_file_roundtrip_is_exact() {
    let rho = rho_form1(0.23, 0.97, 0.013).unwrap();
    let back = parse_state(&state_to_string(&rho).unwrap()).unwrap();
    assert_eq!(back.matrix(), rho.matrix());
}

#[test]
fn state_file_is_row_major_pairs() {
    let text = r#"[
        [[0.5, 0], [0, 0], [0, 0], [0.5, 0]],
        [[0, 0], [0, 0], [0, 0], [0, 0]],
        [[0, 0], [0, 0], [0, 0], [0, 0]],
        [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]
    ]"#;
    let rho = parse_state(text).unwrap();
    assert_eq!(rho.entry(0, 3).re, 0.5);
}

#[test]
fn non_hermitian_state_rejected() {
    let text = r#"[
        [[0.5, 0], [0, 0], [0, 0], [0.5, 1e-6]],
        [[0, 0], [0, 0], [0, 0], [0, 0]],
        [[0, 0], [0, 0], [0, 0], [0, 0]],
        [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]
    ]"#;
    assert!(matches!(
        parse_state(text),
        Err(Error::Core(CoreError::NotHermitian { .. }))
    ));
}

#[test]
fn malformed_state_rejected() {
    assert!(matches!(parse_state("[[1, 2]]"), Err(Error::Json(_))));
}

#[test]
fn counts_csv_roundtrip() {
    let rec = simulate_counts(&rho_form1(0.23, 0.97, 0.013).unwrap(), 1e3, 4).unwrap();
    let mut buf = Vec::new();
    write_counts(&mut buf, &rec).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("setting_index,alice_basis,bob_basis,count\n0,H,H,"));
    assert!(text.contains("\n15,L,L,"));
    assert_eq!(read_counts(text.as_bytes()).unwrap(), rec.counts);
}

#[test]
fn counts_csv_checks_labels_and_coverage() {
    let header = "setting_index,alice_basis,bob_basis,count\n";
    let wrong = format!("{header}0,H,V,3\n");
    assert!(read_counts(wrong.as_bytes()).is_err());
    let missing = format!("{header}0,H,H,3\n");
    assert!(read_counts(missing.as_bytes()).is_err());
    let twice = format!("{header}0,H,H,3\n0,H,H,4\n");
    assert!(read_counts(twice.as_bytes()).is_err());
}
