//! Cross-module checks against values frozen from an independent numpy
//! evaluation.

mod common;

use bellfilter_core::channels::{rho_form1, rho_form2};
use bellfilter_core::measures::{chsh_max, concurrence};
use bellfilter_core::normal_form::optimal_filters;
use bellfilter_core::state::{apply_local, fidelity, reduced_state};
use bellfilter_core::{LocalOp, Side};
use common::*;

const A: f64 = 0.23;
const P: f64 = 0.013;

fn b_of(a: f64) -> f64 {
    (1.0 - a * a).sqrt()
}

#[test]
fn form1_correlation_and_marginal() {
    let rho = rho_form1(A, b_of(A), P).unwrap();
    let r = rho.to_rmatrix();
    assert!((r.get(3, 3) - 0.948676).abs() < 1e-9);
    let ra = reduced_state(&rho, Side::Alice);
    assert!((ra[(0, 0)].re - 0.0645246).abs() < 1e-9);
    assert!((ra[(1, 1)].re - 0.9354754).abs() < 1e-9);
    assert!(cabs(ra[(0, 1)]) < 1e-15);
}

#[test]
fn form1_distilled_values() {
    let rho = rho_form1(A, b_of(A), P).unwrap();
    assert!((concurrence(&rho) - 0.4105176410).abs() < 1e-8);
    assert!((chsh_max(&rho).unwrap().s_value - 2.0979919094).abs() < 1e-8);

    let nf = optimal_filters(&rho).unwrap();
    assert!((singular_ratio(nf.filter_a.matrix()) - 0.4865199050).abs() < 1e-6);
    assert!((singular_ratio(nf.filter_b.matrix()) - 0.4865199050).abs() < 1e-6);
    assert!((nf.probability - 0.1094614399).abs() < 1e-8);
    assert!((concurrence(&nf.state) - 0.8877115987).abs() < 1e-8);
    assert!((chsh_max(&nf.state).unwrap().s_value - 2.6687078511).abs() < 1e-8);
}

#[test]
fn form1_published_amplitudes() {
    // (0.23, 0.97) taken literally: a² + b² = 0.9938
    let rho = rho_form1(0.23, 0.97, P).unwrap();
    let nf = optimal_filters(&rho).unwrap();
    assert!((singular_ratio(nf.filter_a.matrix()) - 0.5009671924).abs() < 1e-6);
    assert!((chsh_max(&nf.state).unwrap().s_value - 2.5641106309).abs() < 1e-8);
    assert!((nf.probability - 0.1219051489).abs() < 1e-8);
}

#[test]
fn form2_unilateral_filter() {
    for a in [0.44, 0.52] {
        let b = b_of(a);
        let rho = rho_form2(a, b, 0.063).unwrap();
        let filtered = apply_local(
            &rho,
            &LocalOp::identity(),
            &LocalOp::filter(diag2(1.0, a / b)).unwrap(),
        )
        .unwrap();
        assert!((concurrence(&filtered.state) - 0.763876).abs() < 1e-9);
        assert!((filtered.probability - 2.0 * a * a).abs() < 1e-12);
    }
    assert!(
        (concurrence(&rho_form2(0.44, b_of(0.44), 0.063).unwrap()) - 0.6036438731).abs() < 1e-9
    );
    assert!(
        (chsh_max(&rho_form2(0.44, b_of(0.44), 0.063).unwrap())
            .unwrap()
            .s_value
            - 2.3361386308)
            .abs()
            < 1e-9
    );
}

#[test]
fn fidelity_of_pure_states_is_overlap() {
    let mut g = rng(7);
    for _ in 0..50 {
        let u = bellfilter_core::random::random_pure_vector(&mut g);
        let v = bellfilter_core::random::random_pure_vector(&mut g);
        let overlap = u.dotc(&v).norm_sqr();
        let f = fidelity(
            &bellfilter_core::DensityMatrix::from_pure(&u).unwrap(),
            &bellfilter_core::DensityMatrix::from_pure(&v).unwrap(),
        );
        assert!((f - overlap).abs() < 1e-7, "{f} vs {overlap}");
    }
}

#[test]
fn r_matrix_entries_match_direct_traces() {
    let paulis = [
        diag2(1.0, 1.0),
        sigma_x(),
        nalgebra::Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        diag2(1.0, -1.0),
    ];
    let mut g = rng(8);
    for _ in 0..20 {
        let rho = bellfilter_core::random::random_density(&mut g);
        let r = rho.to_rmatrix();
        for i in 0..4 {
            for j in 0..4 {
                let op = paulis[i].kronecker(&paulis[j]);
                let direct = (rho.matrix() * op).trace().re;
                assert!((r.get(i, j) - direct).abs() < 1e-12);
            }
        }
    }
}
