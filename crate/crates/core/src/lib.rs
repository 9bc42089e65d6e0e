//! Stallings graphs, graphs of free groups and finite stature certificates
//! for triangle Artin groups.

pub mod artin;
pub mod crosscheck;
pub mod error;
pub mod fold;
pub mod gog;
pub mod graph;
pub mod io;
pub mod iso;
pub mod morphism;
pub mod precover;
pub mod report;
pub mod stature;
pub mod topology;
pub mod words;

pub use error::{Error, Result};
pub use graph::{BasedGraph, Color, ColorLengthTable, Graph};
pub use morphism::GraphMorphism;
pub use precover::Precover;
