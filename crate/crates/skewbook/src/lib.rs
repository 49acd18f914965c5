//! Statistics-adapted limited-feedback precoder codebooks for spatially
//! correlated MIMO channels.
//!
//! A transmitter with `N_t` antennas sends `M` data streams through a
//! semiunitary precoder picked from a shared codebook of `2^B` entries; the
//! receiver measures the channel and feeds back the index of the best
//! codeword. When the channel is spatially correlated, a codebook tuned to
//! the channel statistics beats a fixed isotropic design by a wide margin.
//! This crate builds such codebooks and measures what they buy:
//!
//! - [`numerics`]: a small dense complex-matrix kernel (Hermitian
//!   eigendecomposition, SVD, null-space completion, Haar sampling).
//! - [`channel`]: canonical / separable / virtual correlated Rayleigh
//!   channel models and their covariance statistics.
//! - [`grassmann`]: geometry of the Grassmann manifold `G(N_t, M)`:
//!   projection 2-norm distance, spherical caps, the rotation and scaling
//!   maps that reposition a packing, and Monte Carlo root-codeset search.
//! - [`codebook`]: the three-component codebook (statistical eigen-subspaces,
//!   scaled local packings, RVQ fill), codeword selection, and structural
//!   diagnostics.
//! - [`linkperf`]: MMSE filters, per-stream SINR, mutual information,
//!   waterfilling, and QPSK bit error rate.
//! - [`harness`]: Monte Carlo experiment runner with scenario presets and
//!   CSV output, plus the `sim` command line front-end.
//!
//! Everything is deterministic: all randomness flows through explicitly
//! seeded [`rng::SimRng`] instances, and Monte Carlo sweeps derive one
//! independent stream per trial so serial and parallel runs agree bit for
//! bit.
//!
//! See the `examples/` directory for one runnable walkthrough per major
//! capability.

pub mod channel;
pub mod codebook;
pub mod error;
pub mod grassmann;
pub mod harness;
pub mod linkperf;
pub mod numerics;
pub mod rng;
pub mod wire;

pub use channel::{dft_matrix, matched_statistics, CanonicalModel, CovEigen};
pub use codebook::{Codebook, CodebookPlan, GeneralizedSubspace, Provenance};
pub use error::{Error, Result};
pub use grassmann::{Cap, Codeset, Subspace};
pub use harness::{Metric, ResultTable, Scenario};
pub use linkperf::{PowerPolicy, Precoder};
pub use numerics::{CMat, CVec};
pub use rng::SimRng;
