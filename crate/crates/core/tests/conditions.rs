mod common;

use aps_core::conditions::{self, DEFAULT_TOL};
use aps_core::diff::{fd_first_derivative_richardson, fd_second_derivative_richardson};
use aps_core::{catalog, pucci_energy, CheckConfig, EnergyModel, Grid, Verdict};

fn path_energy(m: &EnergyModel) -> impl Fn(f64) -> f64 + '_ {
    move |g: f64| m.energy([3.0 + g * g, 3.0 + g * g, 1.0]).unwrap()
}

#[test]
fn shear_stress_is_derivative_of_path_energy() {
    // in simple shear σ12 = dŴ/dγ for any isotropic energy
    for e in catalog() {
        let m = &e.model;
        for gamma in [0.0, 0.2, 0.7, 1.5, 3.0] {
            let (sigma, dsigma) = conditions::cauchy_shear_stress(m, gamma).unwrap();
            let w = path_energy(m);
            let fd = fd_first_derivative_richardson(&w, gamma, 1e-3);
            let fd2 = fd_second_derivative_richardson(&w, gamma, 1e-2);
            let scale = sigma.abs().max(1.0);
            assert!((sigma - fd).abs() < 1e-6 * scale, "{m} γ={gamma}: {sigma} vs {fd}");
            assert!((dsigma - fd2).abs() < 1e-5 * dsigma.abs().max(1.0), "{m} γ={gamma}: {dsigma} vs {fd2}");
        }
    }
}

#[test]
fn aps2_matches_sign_of_path_curvature() {
    let grid = Grid::default();
    for m in [pucci_energy(1.0, 0.95).unwrap(), EnergyModel::by_name("hencky").unwrap()] {
        let w = path_energy(&m);
        let first_negative = grid
            .points
            .iter()
            .copied()
            .filter(|r| *r > 0.0)
            .find(|r| fd_second_derivative_richardson(&w, *r, 1e-3 * r.min(1.0)) < -1e-6);
        let v = conditions::check_aps2(&m, &grid, DEFAULT_TOL);
        assert!(v.failed(), "{m}: {v}");
        assert!(first_negative.is_some(), "{m}: no negative curvature found");
    }
    let nh = EnergyModel::by_name("neo-hooke").unwrap();
    assert_eq!(conditions::check_aps2(&nh, &grid, DEFAULT_TOL), Verdict::Pass);
}

#[test]
fn pucci_threshold_separates_parameters() {
    let grid = Grid::default();
    for (alpha, convex) in [(0.5, true), (0.85, true), (0.9, false), (0.99, false)] {
        let m = pucci_energy(1.0, alpha).unwrap();
        assert_eq!(conditions::check_aps2(&m, &grid, DEFAULT_TOL).passed(), convex, "alpha {alpha}");
        let r = conditions::reference_state(&m).unwrap();
        assert!(r.residual_stress.abs() < 1e-12);
        assert!((r.shear_modulus - 1.0).abs() < 1e-12);
    }
    assert!(pucci_energy(1.0, 1.5).is_err());
}

#[test]
fn k1_constant_is_scale_invariant() {
    let grid = Grid::default();
    for e in catalog() {
        let base = conditions::check_k1(&e.model, &grid);
        for c in [0.5, 2.0, 10.0] {
            let scaled = e.model.clone().scaled(c).unwrap();
            let k = conditions::check_k1(&scaled, &grid);
            assert_eq!(k.verdict.passed(), base.verdict.passed(), "{} × {c}", e.label);
            if let (Some(a), Some(b)) = (base.b, k.b) {
                assert!((a - b).abs() < 1e-9, "{} × {c}: {a} vs {b}", e.label);
            }
        }
    }
}

#[test]
fn k2_matches_difference_route_for_linear_energies() {
    let grid = Grid::default();
    for src in ["I1 - 3", "I2 - 3", "I1 + I2 - 6"] {
        let m = EnergyModel::from_dsl(
            "linear",
            src,
            aps_core::ParamTable::new(),
            aps_core::energies::Compressibility::Compressible,
        )
        .unwrap();
        let p = conditions::k2_equivalence_probe(&m, &grid);
        assert!(p.verdict.passed(), "{src}: {}", p.verdict);
        assert!(p.max_discrepancy < 1e-8, "{src}: {}", p.max_discrepancy);
    }
}

#[test]
fn random_energies_agree_between_aps_forms() {
    let grid = Grid::new(6.0, 80).unwrap();
    for m in common::random_dsl_energies(10, 99) {
        let a2 = conditions::check_aps2(&m, &grid, DEFAULT_TOL);
        let a3 = conditions::check_aps3(&m, &grid, DEFAULT_TOL);
        assert_eq!(a2.passed(), a3.passed(), "{m}: {a2} vs {a3}");
    }
}

#[test]
fn tension_compression_symmetric_models_pass_symmetry_check() {
    let grid = Grid::default();
    for name in ["bazant", "hencky", "exp-hencky", "martin-neff"] {
        let m = EnergyModel::by_name(name).unwrap();
        let t = conditions::tc_symmetry(&m, &grid, DEFAULT_TOL);
        assert!(t.invariant.passed(), "{name}: {}", t.invariant);
    }
    let t = conditions::tc_symmetry(&EnergyModel::by_name("neo-hooke").unwrap(), &grid, DEFAULT_TOL);
    assert!(t.invariant.failed());
}

#[test]
fn report_rows_are_consistent() {
    let cfg = CheckConfig::default();
    let r = conditions::report(&EnergyModel::by_name("mooney-rivlin").unwrap(), &cfg);
    assert!(r.aps_convex());
    assert_eq!(r.rows().len(), 13);
    assert!(r.local_shear_modulus > 0.0);
    let r = conditions::report(&pucci_energy(1.0, 0.95).unwrap(), &cfg);
    assert!(!r.aps_convex());
    assert!(r.empirical.passed());
}
