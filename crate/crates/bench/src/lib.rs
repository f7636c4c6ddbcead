//! Fixtures shared by the benchmarks.

use scaling_lab::seed;
use scaling_lab::{ChannelMatrix, FadingModel, LinkParams, RelayConfig};

pub fn rayleigh_square(n: usize, seed_value: u64) -> ChannelMatrix {
    let model = FadingModel::rayleigh(1.0).expect("valid model");
    ChannelMatrix::draw(n, n, &model, &mut seed::stream(seed_value)).expect("valid size")
}

pub fn unit_params() -> LinkParams {
    LinkParams::new(10.0, 1.0).expect("valid parameters")
}

pub fn extremal_relays(n: usize) -> RelayConfig {
    RelayConfig::extremal_sqrt(n, 10.0).expect("valid configuration")
}
