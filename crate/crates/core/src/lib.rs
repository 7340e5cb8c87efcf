/*!
Stochastic network calculus for heavy-tailed self-similar traffic.

The crate builds rigorous probabilistic backlog and delay bounds for flows
whose deviations from their mean rate follow a power law: statistical
envelopes and their sample-path versions, heavy-tailed service curves
(leftover capacity under cross traffic, packetizers), min-plus concatenation
of per-node service into an end-to-end network service curve, quantile
inversion and scaling studies over the path length, plus the supporting
machinery — a closed algebra over violation-probability bounds, α-stable
sampling, packet-trace envelope fitting, and a tandem-queue simulator to
sandwich the analytical bounds against empirical delay distributions.

The analytic core is generic over the scalar type via [`real::Real`]
(`f32` or `f64`); the aliases at the crate root fix `f64`, which all stated
tolerances assume. Internal units are bits and seconds.
*/

pub mod algebra;
pub mod bounds;
pub mod config;
pub mod envelope;
mod error;
pub mod network;
mod numeric;
pub mod real;
pub mod service;
pub mod sim;
pub mod stable;
pub mod trace;

pub use error::{Error, Result};

/// `f64` instantiations of the generic core types.
pub type TailBound = algebra::TailBound<f64>;
pub type PowerLaw = algebra::PowerLaw<f64>;
pub type PowerLawLog = algebra::PowerLawLog<f64>;
pub type Weibull = algebra::Weibull<f64>;
pub type HtssEnvelope = envelope::HtssEnvelope<f64>;
pub type GaussEnvelope = envelope::GaussEnvelope<f64>;
pub type SamplePathEnvelope = envelope::SamplePathEnvelope<f64>;
pub type HtServiceCurve = service::HtServiceCurve<f64>;
pub type TailExpr = service::TailExpr<f64>;
pub type LinkSpec = service::LinkSpec<f64>;
pub type Packetizer = service::Packetizer<f64>;
pub type CrossTraffic = service::CrossTraffic<f64>;
pub type BacklogBound = bounds::BacklogBound<f64>;
pub type DelayBound = bounds::DelayBound<f64>;
pub type NetworkServiceCurve = network::NetworkServiceCurve<f64>;
pub type PathSpec = network::PathSpec<f64>;
pub type ThroughFlow = network::ThroughFlow<f64>;
pub type MuPolicy = network::MuPolicy<f64>;
pub type ScalingStudy = network::ScalingStudy<f64>;
