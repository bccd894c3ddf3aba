#![allow(dead_code)]

use aps_core::energies::Compressibility;
use aps_core::{EnergyModel, ParamTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random compressible energies assembled from smooth invariant terms.
/// Some coefficients may be negative, so both convex and non-convex
/// energies turn up.
pub fn random_dsl_energies(count: usize, seed: u64) -> Vec<EnergyModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut terms = vec![format!("{:.4}*(I1 - 3)", rng.random_range(0.1..2.0))];
        let pool: [&dyn Fn(&mut ChaCha8Rng) -> String; 8] = [
            &|r| format!("{:.4}*(I2 - 3)", r.random_range(-0.3..1.0)),
            &|r| format!("{:.5}*(I1 - 3)^2", r.random_range(-0.01..0.05)),
            &|r| format!("{:.5}*(I1 - 3)*(I2 - 3)", r.random_range(-0.01..0.02)),
            &|r| format!("{:.4}*(exp({:.4}*(I1 - 3)) - 1)", r.random_range(0.0..0.5), r.random_range(0.01..0.1)),
            &|r| format!("{:.4}*log(1 + (I2 - 3))", r.random_range(-1.0..1.0)),
            &|r| format!("{:.4}*(sqrt(I3) - 1)^2", r.random_range(0.0..5.0)),
            &|r| format!("{:.4}*(I1 - 3)/(1 + (I1 - 3))", r.random_range(-1.0..1.0)),
            &|r| format!("{:.4}*(I1*I3^(-1/3) - 3)", r.random_range(0.0..1.0)),
        ];
        let extra = rng.random_range(2..5);
        for _ in 0..extra {
            let i = rng.random_range(0..pool.len());
            terms.push(pool[i](&mut rng));
        }
        let src = terms.join(" + ");
        out.push(
            EnergyModel::from_dsl(&format!("random-{k}"), &src, ParamTable::new(), Compressibility::Compressible)
                .unwrap_or_else(|e| panic!("{src}: {e}")),
        );
    }
    out
}
