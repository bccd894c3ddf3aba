use aps_core::aps2d::{self, Aps2dProblem, BoundaryData};
use aps_core::fem3d::{self, Displacement3D, Fem3dOptions, HexMesh, TopBottom};
use aps_core::EnergyModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn opts(n: usize) -> Fem3dOptions {
    Fem3dOptions { n, ..Fem3dOptions::default() }
}

#[test]
fn gradient_matches_energy_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mesh = HexMesh::new(4).unwrap();
    for name in ["mooney-rivlin", "blatz-ko", "veronda-westman"] {
        let m = EnergyModel::by_name(name).unwrap();
        let mut d = Displacement3D::new(mesh, &BoundaryData::default(), TopBottom::Free).unwrap();
        for u in d.u.iter_mut() {
            for c in u.iter_mut() {
                *c += rng.random_range(-0.05..0.05);
            }
        }
        let (_, g) = fem3d::assemble_energy(&m, &d).unwrap();
        for _ in 0..10 {
            let k = rng.random_range(0..d.u.len());
            let c = rng.random_range(0..3);
            let h = 1e-6;
            let mut p = d.clone();
            p.u[k][c] += h;
            let mut q = d.clone();
            q.u[k][c] -= h;
            let fd = (fem3d::total_energy(&m, &p).unwrap() - fem3d::total_energy(&m, &q).unwrap()) / (2.0 * h);
            assert!((g[k][c] - fd).abs() < 1e-6 * g[k][c].abs().max(1e-2), "{name} node {k}.{c}: {} vs {fd}", g[k][c]);
        }
    }
}

#[test]
fn homogeneous_shear_is_an_equilibrium() {
    let bc = BoundaryData::Affine([0.4, -0.3, 0.1]);
    for name in ["neo-hooke", "blatz-ko", "veronda-westman", "hencky"] {
        let m = EnergyModel::by_name(name).unwrap();
        let r = fem3d::minimize(&m, &bc, &opts(5)).unwrap();
        for (k, u) in r.displacement.u.iter().enumerate() {
            let x = r.displacement.mesh.coords(k);
            let want = 0.4 * x[0] - 0.3 * x[1] + 0.1;
            assert!(u[0].abs() < 1e-9 && u[1].abs() < 1e-9 && (u[2] - want).abs() < 1e-9, "{name} node {k}: {u:?}");
        }
    }
}

#[test]
fn mirror_symmetry_of_the_default_problem() {
    let m = EnergyModel::by_name("mooney-rivlin").unwrap();
    let r = fem3d::minimize(&m, &BoundaryData::default(), &opts(7)).unwrap();
    let d = &r.displacement;
    let n = d.mesh.n;
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let a = d.u[d.mesh.node(i, j, k)];
                // half turn about the x2 axis through the centre
                let b = d.u[d.mesh.node(n - 1 - i, j, n - 1 - k)];
                assert!((a[0] + b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9 && (a[2] + b[2]).abs() < 1e-9);
                // x1 ↔ x2
                let c = d.u[d.mesh.node(j, i, k)];
                assert!((a[0] - c[1]).abs() < 1e-9 && (a[1] - c[0]).abs() < 1e-9 && (a[2] - c[2]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn minimum_is_below_the_anti_plane_candidate() {
    let bc = BoundaryData::default();
    let m = EnergyModel::by_name("mooney-rivlin").unwrap();
    let n = 7;
    let mut plane = Aps2dProblem::new(m.clone(), n, &bc).unwrap();
    aps2d::solve(&mut plane).unwrap();
    let candidate = Displacement3D::extrude(HexMesh::new(n).unwrap(), &plane.field, TopBottom::Periodic).unwrap();
    let e_candidate = fem3d::total_energy(&m, &candidate).unwrap();
    let r = fem3d::minimize(&m, &bc, &opts(n)).unwrap();
    assert!(r.energy <= e_candidate + 1e-12, "{} > {e_candidate}", r.energy);
    assert!(r.max_interior_deviation > 1e-6);
}

#[test]
fn free_faces_relax_further_than_periodic_ones() {
    let bc = BoundaryData::default();
    let m = EnergyModel::by_name("mooney-rivlin").unwrap();
    let periodic = fem3d::minimize(&m, &bc, &opts(5)).unwrap();
    let free = fem3d::minimize(&m, &bc, &Fem3dOptions { top_bottom: TopBottom::Free, ..opts(5) }).unwrap();
    assert!(free.energy <= periodic.energy + 1e-12, "{} > {}", free.energy, periodic.energy);
}

#[test]
fn incompressible_models_need_a_penalty() {
    let m = EnergyModel::by_name("svk").unwrap();
    assert!(fem3d::minimize(&m, &BoundaryData::default(), &opts(3)).is_err());
    let q = m.quasi_incompressible(100.0).unwrap();
    assert!(fem3d::minimize(&q, &BoundaryData::default(), &opts(3)).is_ok());
}
