//! Half-trek identifiability and model-constraint computations for linear
//! structural equation models on mixed graphs.

pub mod algebra;
pub mod census;
pub mod constraints;
pub mod fixtures;
pub mod flow;
pub mod graph;
pub mod identify;
pub mod io;
pub mod model;
pub mod recovery;
pub mod trek;

pub use graph::{GraphError, MixedGraph};
pub use identify::{htc_identify, linear_identify, quasi_linear_vertices, Certificate, Verdict};
