use aps_core::diff::seed;
use aps_core::energies::{builtin_names, Compressibility};
use aps_core::{catalog, EnergyModel, ParamTable};
use proptest::prelude::*;

#[test]
fn every_builtin_constructs_and_displays() {
    for name in builtin_names() {
        let m = EnergyModel::by_name(name).unwrap();
        assert!(m.to_string().contains(name));
    }
    assert!(EnergyModel::by_name("no-such-model").is_err());
}

#[test]
fn path_and_reduced_jets_agree() {
    for e in catalog() {
        for r in [0.0, 0.3, 1.0, 2.5, 7.0] {
            let p = e.model.path_jet(r).unwrap();
            let q = e.model.reduced_jet(r * r).unwrap();
            assert!((p.value() - q.value()).abs() <= 1e-12 * p.value().abs().max(1.0), "{}", e.label);
            // d/dR = 2R d/dx
            assert!((p.d(0) - 2.0 * r * q.d(0)).abs() <= 1e-10 * p.d(0).abs().max(1.0), "{}", e.label);
        }
    }
}

#[test]
fn principal_and_invariant_forms_agree() {
    for e in catalog() {
        let m = &e.model;
        if !m.has_native_principal_form() || !m.is_compressible() {
            continue;
        }
        for l in [[1.2, 0.9, 1.1], [2.0, 0.5, 1.3], [0.7, 0.7, 1.9]] {
            let i1 = l[0] + l[1] + l[2];
            let i2 = l[0] * l[1] + l[1] * l[2] + l[0] * l[2];
            let i3 = l[0] * l[1] * l[2];
            let jets = seed(l, 3).unwrap();
            let a = m.eval_principal(&jets).unwrap().value();
            let b = m.energy([i1, i2, i3]).unwrap();
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "{}: {a} vs {b}", e.label);
        }
    }
}

#[test]
fn scaling_multiplies_energy() {
    let m = EnergyModel::by_name("veronda-westman").unwrap();
    let s = m.clone().scaled(3.0).unwrap();
    let inv = [4.0, 3.7, 1.2];
    assert!((s.energy(inv).unwrap() - 3.0 * m.energy(inv).unwrap()).abs() < 1e-12);
}

#[test]
fn dsl_reproduces_a_hand_written_energy() {
    let p = ParamTable::from_pairs([("c", 0.7)]).unwrap();
    let m = EnergyModel::from_dsl("t", "c*(I1-3) + (1-c)*(I2-3)", p, Compressibility::IncompressibleOnly).unwrap();
    let j = m.invariant_jet([5.0, 4.0, 1.0]).unwrap();
    assert!((j.value() - (0.7 * 2.0 + 0.3 * 1.0)).abs() < 1e-14);
    assert!((j.d(0) - 0.7).abs() < 1e-14);
    assert!((j.d(1) - 0.3).abs() < 1e-14);
}

#[test]
fn quasi_incompressible_adds_a_penalty() {
    let m = EnergyModel::by_name("mooney-rivlin").unwrap();
    let q = m.quasi_incompressible(100.0).unwrap();
    let (_, kappa) = q.split_penalty();
    assert_eq!(kappa, 100.0);
    let iso = m.with_param("kappa", 0.0).unwrap();
    for inv in [[4.0f64, 4.0, 1.0], [3.5, 3.9, 1.21]] {
        let penalty = 50.0 * (inv[2].sqrt() - 1.0).powi(2);
        let want = iso.energy(inv).unwrap() + penalty;
        assert!((q.energy(inv).unwrap() - want).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn invariant_gradient_matches_differences(a in 3.0f64..20.0, b in 3.0f64..20.0, c in 0.5f64..2.0) {
        for e in catalog() {
            let m = &e.model;
            if !m.is_compressible() { continue; }
            let Ok(j) = m.invariant_jet([a, b, c]) else { continue };
            for k in 0..3 {
                let h = 1e-5;
                let mut p = [a, b, c];
                let mut q = [a, b, c];
                p[k] += h;
                q[k] -= h;
                let (Ok(fp), Ok(fq)) = (m.energy(p), m.energy(q)) else { continue };
                let fd = (fp - fq) / (2.0 * h);
                let roundoff = 1e-15 * fp.abs().max(fq.abs()) / h;
                prop_assert!((j.d(k) - fd).abs() < 1e-5 * j.d(k).abs().max(1.0) + roundoff,
                    "{} at {:?}: W{} = {} vs {}", e.label, [a, b, c], k + 1, j.d(k), fd);
            }
        }
    }
}
