use aps_core::aps2d::{self, Aps2dProblem, BoundaryData, ScalarField2D};
use aps_core::{pucci_energy, EnergyModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn solved(name: &str, n: usize) -> Aps2dProblem {
    let mut p = Aps2dProblem::new(EnergyModel::by_name(name).unwrap(), n, &BoundaryData::default()).unwrap();
    aps2d::solve(&mut p).unwrap();
    p
}

#[test]
fn energy_decreases_monotonically() {
    for name in ["neo-hooke", "veronda-westman", "exp-hencky", "blatz-ko"] {
        let mut p = Aps2dProblem::new(EnergyModel::by_name(name).unwrap(), 33, &BoundaryData::default()).unwrap();
        let r = aps2d::solve(&mut p).unwrap();
        for w in r.energy_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{name}: {:?}", r.energy_history);
        }
        assert!(r.convex);
    }
}

#[test]
fn solutions_obey_the_maximum_principle() {
    for name in ["neo-hooke", "veronda-westman", "knowles"] {
        let p = solved(name, 33);
        let f = &p.field;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (v, fixed) in f.values.iter().zip(&f.fixed) {
            if *fixed {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
        }
        assert!(f.values.iter().all(|v| *v >= lo - 1e-12 && *v <= hi + 1e-12), "{name}");
    }
}

#[test]
fn gradient_matches_energy_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let model = EnergyModel::by_name("veronda-westman").unwrap();
    let base = ScalarField2D::from_fn(9, 9, |x, y| 0.3 * (3.0 * x).sin() * y).unwrap();
    for _ in 0..20 {
        let mut f = base.clone();
        for v in f.values.iter_mut() {
            *v += rng.random_range(-0.2..0.2);
        }
        let g = aps2d::energy_gradient(&model, &f).unwrap();
        let k = rng.random_range(0..f.values.len());
        let h = 1e-5;
        let mut p = f.clone();
        p.values[k] += h;
        let mut q = f.clone();
        q.values[k] -= h;
        let fd = (aps2d::reduced_energy(&model, &p).unwrap() - aps2d::reduced_energy(&model, &q).unwrap()) / (2.0 * h);
        assert!((g[k] - fd).abs() < 1e-7 * g[k].abs().max(1.0), "node {k}: {} vs {fd}", g[k]);
    }
}

#[test]
fn residual_detects_non_equilibrium() {
    let mut p = solved("neo-hooke", 33);
    let at_solution = aps2d::residual_iii(&p.field, &p.model).unwrap();
    let mid = p.field.index(16, 16);
    p.field.values[mid] += 1e-3;
    let perturbed = aps2d::residual_iii(&p.field, &p.model).unwrap();
    assert!(at_solution < 1e-6, "{at_solution}");
    assert!(perturbed > 100.0 * at_solution, "{perturbed}");
}

#[test]
fn quadratic_path_energies_share_the_minimizer() {
    // Mooney-Rivlin and neo-Hooke both reduce to a multiple of x on the path
    let a = solved("neo-hooke", 17);
    let b = solved("mooney-rivlin", 17);
    let d = a.field.values.iter().zip(&b.field.values).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(d < 1e-10, "{d}");
}

#[test]
fn strict_mode_rejects_non_convex_models() {
    let mut p = Aps2dProblem::new(pucci_energy(1.0, 0.95).unwrap(), 9, &BoundaryData::default()).unwrap();
    p.strict = true;
    assert!(aps2d::solve(&mut p).is_err());
}
