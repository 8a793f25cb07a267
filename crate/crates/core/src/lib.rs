pub mod error;
pub mod lattice;
pub mod quadform;
pub mod voronoi;
pub mod coset;
pub mod linalg;
pub mod smith;
pub mod complex;
pub mod sharbly;
pub mod poly;
pub mod eigen;
pub mod modsym;
pub mod gl3;
pub mod classify;
pub mod forms;
pub mod pipeline;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/retract.md")]
    pub mod retract {}
    #[doc = include_str!("../../../book/src/cohomology.md")]
    pub mod cohomology {}
    #[doc = include_str!("../../../book/src/hecke.md")]
    pub mod hecke {}
    #[doc = include_str!("../../../book/src/classification.md")]
    pub mod classification {}
    #[doc = include_str!("../../../book/src/forms.md")]
    pub mod forms {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
