//! Fixtures shared by the benchmarks.

use aps_core::EnergyModel;

/// One closed-form, one exponential and one spectral energy.
pub fn sample_models() -> Vec<EnergyModel> {
    ["mooney-rivlin", "veronda-westman", "hencky"]
        .into_iter()
        .map(|n| EnergyModel::by_name(n).expect("catalog model"))
        .collect()
}
