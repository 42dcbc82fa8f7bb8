//! Spatial coherence of ultra-massive MIMO links in turbulence: array geometry,
//! the normalized covariance ρ between SISO sub-channels, the loss of spatial
//! coherence, the turbulent array gain and the ergodic capacity bound.

pub mod array;
pub mod losc;
pub mod nc;
pub mod sampling;

pub use array::{displacement_histogram, steering_vector, DisplacementHistogram, PlanarArray};
pub use losc::{
    array_gain_turbulent, capacity_without_turbulence, coherence_sum, ergodic_capacity_bound,
    losc_loss, CapacityInputs,
};
pub use nc::{
    nc_closed_form, nc_closed_form_exponent, nc_numeric, nc_numeric_exponent, nc_sum_form,
    nc_sum_form_exponent, separation_kernel_sum, structure_integral, NCQuery, NcQuadrature,
    PathProfile, SeparationGeometry, NC_COEFFICIENT, NC_EQUAL_COEFFICIENT, TIE_QUANTUM,
};
pub use sampling::{
    channel_matrix_sample, copula_factor, entry_correlation, los_channel, ChannelSampleSpec,
    CorrelationModel, LinkAngles, MAX_COPULA_ENTRIES,
};
