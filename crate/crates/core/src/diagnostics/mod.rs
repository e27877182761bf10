//! Enhancement probes: dissipation times, the eigenvector obstruction
//! certificate, RAGE and H¹-growth time averages, eigenreports and Nash fits.

mod certificate;
mod dissipation;
mod eigenreport;
mod nash;
mod rage;

pub use certificate::{obstruction_certificate, Certificate, CertificateOptions, CertificatePoint};
pub use dissipation::{
    decay_curve, dissipation_time, DecayBudget, DecayCurve, DecayPoint, DissipationTime,
    BISECTION_RTOL,
};
pub use eigenreport::{eigenreport, EigenRecord, ReportThresholds, Roughness, SpectralReport};
pub use nash::{gaussian_bump, nash_exponent_fit, nash_run, NashFit, NashRunConfig};
pub use rage::{h1_growth_average, rage_average, H1Growth, Selection};
