//! Vietoris–Rips and Čech complexes of glued metric spaces.
//!
//! Distances are exact rationals ([`Length`]). Complexes are flag complexes of
//! threshold graphs, collapses come with replayable certificates, and homology
//! is computed over GF(2).

pub mod cliques;
pub mod collapse;
pub mod families;
pub mod gluing;
pub mod homology;
pub mod length;
pub mod metric;
pub mod par;
pub mod simplicial;

pub use length::Length;
pub use metric::{FiniteMetricSpace, GluingSpec, MetricGraph};
pub use simplicial::{Convention, Filtration, Simplex, SimplicialComplex};
