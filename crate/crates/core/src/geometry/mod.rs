//! Grid charts with an h/v split, N-connections, N-adapted frames and d-metrics.
//!
//! Frame indices run over `0..n` (horizontal) and `n..n+m` (vertical). Vertical block
//! components are addressed with indices counted from 0 inside the block.

mod chart;
mod fields;
mod frames;

pub use chart::GridChart;
pub use fields::{CoordinateMetric, DMetric, FrameTransform, NConnectionField};
pub use frames::{
    anholonomy, coordinate_to_dmetric, dmetric_to_coordinate, nadapted_derivative, vielbein, Anholonomy,
    FrameDerivative,
};
