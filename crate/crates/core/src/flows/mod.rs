//! Time-changed translation flows on T² made Lebesgue-incompressible by a
//! relabeling map, plus stream-function comparison flows.

mod density;
mod homology;
mod relabel;
mod stream;

pub use density::{build_density_f, Bump, Density, DensityGrid, Marginal, TimeChangedFlowSpec, UniformDensity};
pub use homology::{
    default_alpha, default_q, factorial_lacunary_q, lacunary_q, solve_homology, CircleSeries,
    HomologySolution,
};
pub use relabel::{relabel_to_lebesgue, RelabelMap, RelabelReport, RelabelSettings};
pub use stream::{stream_function_flow, StreamKind};
