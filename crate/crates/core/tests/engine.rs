use gricci::algebra::{metric_report, random_metric};
use gricci::diagrams::{automorphism_count, preset_graph, PRESET_GRAPHS};
use gricci::flow::{beta, beta_antisymmetry, integrate_flow, off_block_residual, t_d, StepOptions};
use gricci::io::{read_trajectory_csv, write_trajectory_csv, AlgebraDocument};
use gricci::{Algebra, Algebra32};
use proptest::prelude::*;

#[test]
fn single_precision_tracks_double() {
    let a64 = Algebra::su2_double();
    let a32 = Algebra32::su2_double();
    let m64 = random_metric(&a64, 4).unwrap();
    let m32 = random_metric(&a32, 4).unwrap();
    let t64 = t_d(&a64, &m64).unwrap();
    let t32 = t_d(&a32, &m32).unwrap();
    let scale = t64.amax();
    for (x, y) in t64.iter().zip(t32.iter()) {
        assert!((x - *y as f64).abs() <= 1e-4 * scale.max(1.0));
    }
}

#[test]
fn algebra_documents_round_trip_exactly() {
    let alg = Algebra::su2_double().with_level(0.7).unwrap();
    let metric = random_metric(&alg, 2).unwrap();
    let doc = AlgebraDocument::from_algebra(&alg, Some(&metric));
    let back = AlgebraDocument::from_json(&doc.to_json()).unwrap();
    let alg2: Algebra = back.algebra().unwrap();
    assert_eq!(alg2.pairing(), alg.pairing());
    assert_eq!(alg2.structure(), alg.structure());
    assert_eq!(back.metric(&alg2, 1e-10).unwrap().unwrap().tau(), metric.tau());
}

#[test]
fn trajectory_csv_round_trips() {
    let alg = Algebra::su2_double();
    let traj = integrate_flow(&alg, &random_metric(&alg, 1).unwrap(), (0.0, 0.5), 0.1, 1.0, &StepOptions::default())
        .unwrap();
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &traj.states).unwrap();
    let rows = read_trajectory_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(rows.len(), traj.states.len());
    for ((s, r, tau), st) in rows.iter().zip(&traj.states) {
        assert_eq!(*s, st.s);
        assert_eq!(*r, st.residual);
        assert_eq!(tau, st.metric.tau());
    }
}

#[test]
fn automorphism_groups_shrink_when_leaves_are_fixed() {
    for name in PRESET_GRAPHS {
        let g = preset_graph(name).unwrap();
        let (all, fixed) = (automorphism_count(&g, false).unwrap(), automorphism_count(&g, true).unwrap());
        assert!(fixed >= 1 && all % fixed == 0, "{name}: {all} / {fixed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn beta_is_skew_and_exchanges_the_blocks(seed in any::<u64>(), level in 0.2f64..5.0) {
        let alg = Algebra::su2_double().with_level(level).unwrap();
        let m = random_metric(&alg, seed).unwrap();
        let b = beta(&alg, &m).unwrap();
        let scale = b.amax().max(1.0);
        prop_assert!(beta_antisymmetry(&alg, &b) <= 1e-12 * scale);
        // as an operator B exchanges V₊ and V₋
        let same = (m.pplus() * &b * m.pplus()).amax().max((m.pminus() * &b * m.pminus()).amax());
        prop_assert!(same <= 1e-12 * scale);
        prop_assert!(off_block_residual(&m, &t_d(&alg, &m).unwrap()) <= 1e-12 * scale);
    }

    #[test]
    fn flow_keeps_the_metric_valid(seed in any::<u64>()) {
        let alg = Algebra::su2_double();
        let traj = integrate_flow(&alg, &random_metric(&alg, seed).unwrap(), (0.0, 1.0), 0.05, 1.0, &StepOptions::default())
            .unwrap();
        for st in &traj.states {
            let r = metric_report(&alg, st.metric.tau());
            prop_assert!(r.involution <= 1e-10 && r.pairing_symmetry <= 1e-10 && r.positivity_margin > 0.0);
        }
    }
}
