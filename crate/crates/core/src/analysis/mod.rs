//! Prediction, decoding, error sweeps, spectra and membership residuals.

mod compare;
mod decoder;
mod membership;
mod predict;
mod spectrum;
mod sweep;

pub use compare::{compare_trajectories, count_rebounds, write_comparison_csv, write_trajectory_csv, Comparison};
pub use decoder::{fit_decoder, LinearDecoder};
pub use membership::{membership_residuals, write_membership_csv, MembershipRow};
pub use predict::{predict, predict_lifted, Decoder, PhaseDecoder, DIVERGENCE_FACTOR};
pub use spectrum::{classify, spectrum, write_spectrum_csv, Spectrum, Stability, STABILITY_EPS};
pub use sweep::{rmse_sweep, write_sweep_csv, SweepPoint};
