mod common;

use bellfilter_core::channels::{
    apply_bilateral, dephasing_channel, prepare_spdc, rho_form1, rho_form2, DephasingBasis,
};
use bellfilter_core::measures::{chsh_max, concurrence};
use bellfilter_core::normal_form::{
    bell_weights, is_proper_orthochronous, lorentz_of, optimal_filters, Classification,
};
use bellfilter_core::random::{
    random_density, random_filter, random_pure_vector, random_sl2, random_unitary,
};
use bellfilter_core::state::{
    apply_local, apply_local_unnormalized, bell_vectors, from_rmatrix, rmatrix_of,
};
use bellfilter_core::{DensityMatrix, LocalOp, PrepParams};
use common::*;
use proptest::prelude::*;

fn product_state(seed: u64) -> DensityMatrix {
    let mut g = rng(seed);
    let a = random_density(&mut g);
    let b = random_density(&mut g);
    let ra = bellfilter_core::state::reduced_state(&a, bellfilter_core::Side::Alice);
    let rb = bellfilter_core::state::reduced_state(&b, bellfilter_core::Side::Bob);
    DensityMatrix::new(ra.kronecker(&rb)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rmatrix_roundtrip(seed in any::<u64>()) {
        let rho = random_density(&mut rng(seed));
        let back = from_rmatrix(&rho.to_rmatrix()).unwrap();
        prop_assert!(max_diff4(back.matrix(), rho.matrix()) < 1e-12);
        prop_assert!((rho.to_rmatrix().get(0, 0) - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn lorentz_images_are_polt(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a1 = random_sl2(&mut g);
        let a2 = random_sl2(&mut g);
        let l1 = lorentz_of(&LocalOp::general(a1)).unwrap();
        let l2 = lorentz_of(&LocalOp::general(a2)).unwrap();
        prop_assert!(is_proper_orthochronous(&l1, 1e-9 * l1.abs().max().max(1.0).powi(2)));
        prop_assert!(l1[(0, 0)] >= 1.0 - 1e-12);
        let l12 = lorentz_of(&LocalOp::general(a1 * a2)).unwrap();
        let scale = l12.abs().max().max(1.0);
        prop_assert!((l12 - l1 * l2).abs().max() <= 1e-9 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn transformation_law(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rho = random_density(&mut g);
        let a = LocalOp::general(random_sl2(&mut g));
        let b = LocalOp::general(random_sl2(&mut g));
        let lhs = rmatrix_of(&apply_local_unnormalized(&rho, &a, &b));
        let rhs = lorentz_of(&a).unwrap() * rho.to_rmatrix().matrix() * lorentz_of(&b).unwrap().transpose();
        let scale = rhs.abs().max().max(1.0);
        prop_assert!((lhs - rhs).abs().max() <= 1e-9 * scale);
    }

    #[test]
    fn apply_local_composes(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rho = random_density(&mut g);
        let (a1, b1) = (random_filter(&mut g), random_filter(&mut g));
        let (a2, b2) = (random_filter(&mut g), random_filter(&mut g));
        let step = apply_local(&rho, &a1, &b1).unwrap();
        let two = apply_local(&step.state, &a2, &b2).unwrap();
        let once = apply_local(&rho, &a1.then(&a2), &b1.then(&b2)).unwrap();
        prop_assert!(max_diff4(two.state.matrix(), once.state.matrix()) < 1e-9);
        prop_assert!((step.probability * two.probability - once.probability).abs() < 1e-12);
    }

    #[test]
    fn local_unitaries_preserve_measures(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rho = random_density(&mut g);
        let (u, v) = (random_unitary(&mut g), random_unitary(&mut g));
        let moved = apply_local(&rho, &u, &v).unwrap().state;
        prop_assert!((concurrence(&moved) - concurrence(&rho)).abs() < 1e-9);
        let (s0, s1) = (chsh_max(&rho).unwrap().s_value, chsh_max(&moved).unwrap().s_value);
        prop_assert!((s0 - s1).abs() < 1e-9);
    }

    #[test]
    fn chsh_bounds(seed in any::<u64>()) {
        let mut g = rng(seed);
        let pure = DensityMatrix::from_pure(&random_pure_vector(&mut g)).unwrap();
        prop_assert!(chsh_max(&pure).unwrap().s_value <= 2.0 * 2f64.sqrt() + 1e-9);
        if let Ok(m) = chsh_max(&product_state(seed)) {
            prop_assert!(m.s_value <= 2.0 + 1e-9);
        }
    }

    #[test]
    fn bell_diagonal_concurrence(seed in any::<u64>()) {
        let mut g = rng(seed);
        let w: [f64; 4] = core::array::from_fn(|_| rand::Rng::random_range(&mut g, 0.0..1.0));
        let total: f64 = w.iter().sum();
        let bell = bell_vectors();
        let mut m = Mat4::zeros();
        for k in 0..4 {
            m += bell[k] * bell[k].adjoint() * c(w[k] / total, 0.0);
        }
        let rho = DensityMatrix::new(m).unwrap();
        let top = w.iter().cloned().fold(0.0, f64::max) / total;
        prop_assert!((concurrence(&rho) - (2.0 * top - 1.0).max(0.0)).abs() < 1e-10);
    }

    #[test]
    fn z_dephasing_composes(seed in any::<u64>(), p1 in 0.0f64..1.0, p2 in 0.0f64..1.0) {
        let rho = random_density(&mut rng(seed));
        let id = bellfilter_core::LocalChannel::identity();
        let twice = apply_bilateral(
            &apply_bilateral(&rho, &dephasing_channel(DephasingBasis::Z, p1).unwrap(), &id),
            &dephasing_channel(DephasingBasis::Z, p2).unwrap(),
            &id,
        );
        let once = apply_bilateral(&rho, &dephasing_channel(DephasingBasis::Z, p1 + p2 - 2.0 * p1 * p2).unwrap(), &id);
        prop_assert!(max_diff4(twice.matrix(), once.matrix()) < 1e-12);
    }

    #[test]
    fn optimal_filters_reproduce_state(seed in any::<u64>()) {
        let rho = random_density(&mut rng(seed));
        let nf = optimal_filters(&rho).unwrap();
        prop_assert_eq!(nf.classification, Classification::BellDiagonalizable);
        let out = apply_local(&rho, &nf.filter_a, &nf.filter_b).unwrap();
        prop_assert!(max_diff4(out.state.matrix(), nf.state.matrix()) < 1e-10);
        prop_assert!((out.probability - nf.probability).abs() < 1e-10);
        let w = bell_weights(&nf.state);
        prop_assert!((concurrence(&nf.state) - (2.0 * w[0] - 1.0).max(0.0)).abs() < 1e-8);
        prop_assert!(nf.filter_a.singular_values().0 <= 1.0 + 1e-12);
    }
}

#[test]
fn closed_forms_match_kraus_grid() {
    for i in 1..10 {
        let a = i as f64 / 10.0;
        let b = (1.0 - a * a).sqrt();
        for j in 0..=10 {
            let p = j as f64 / 10.0;
            let src = prepare_spdc(PrepParams::new(a, b)).unwrap();
            let x = dephasing_channel(DephasingBasis::X, p).unwrap();
            let z = dephasing_channel(DephasingBasis::Z, p).unwrap();
            let k1 = apply_bilateral(&src, &x, &x);
            let k2 = apply_bilateral(&src, &z, &z);
            assert!(max_diff4(k1.matrix(), rho_form1(a, b, p).unwrap().matrix()) <= 1e-12);
            assert!(max_diff4(k2.matrix(), rho_form2(a, b, p).unwrap().matrix()) <= 1e-12);
        }
    }
}

#[test]
fn form2_coherence_symmetric_in_p() {
    for p in [0.0, 0.063, 0.2, 0.45] {
        let x = rho_form2(0.44, (1.0 - 0.44f64 * 0.44).sqrt(), p).unwrap();
        let y = rho_form2(0.44, (1.0 - 0.44f64 * 0.44).sqrt(), 1.0 - p).unwrap();
        assert!(max_diff4(x.matrix(), y.matrix()) < 1e-15);
    }
}

#[test]
fn paper_inputs_gain_from_filtering() {
    let b = |a: f64| (1.0 - a * a).sqrt();
    for rho in [
        rho_form1(0.23, b(0.23), 0.013).unwrap(),
        rho_form2(0.44, b(0.44), 0.063).unwrap(),
        rho_form2(0.52, b(0.52), 0.063).unwrap(),
    ] {
        let nf = optimal_filters(&rho).unwrap();
        assert!(concurrence(&nf.state) > concurrence(&rho));
        assert!(chsh_max(&nf.state).unwrap().s_value > chsh_max(&rho).unwrap().s_value);
    }
}
