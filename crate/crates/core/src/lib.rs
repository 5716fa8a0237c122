//! Exact polytope geometry together with numerical verification of
//! translational tilings, spectra, weak tilings and diffraction measures.

pub mod autocorr;
pub mod belts;
pub mod dd;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod holes;
pub mod json;
pub mod lattice;
pub mod measure;
pub mod pointset;
pub mod rational;
pub mod region;
pub mod spectra;
pub mod tiling;

pub use autocorr::{
    autocorr_property_check, autocorrelation_periodic, autocorrelation_window, convergence_diagnostic,
    diffraction_periodic, AutocorrPropertyReport,
};
pub use belts::{all_belts, belt_of, construct_tiling_lattice, vm_check, Belt, Condition, Verdict, VmReport};
pub use error::{Error, Result};
pub use fourier::{ft_indicator, is_ft_zero, FtValue};
pub use geometry::{cube, Face, FaceLattice, Halfspace, Polytope, PolytopeSpec, SymmetryReport};
pub use holes::{hole_detector, NonSpectralityCertificate};
pub use lattice::Lattice;
pub use measure::{eval_convolution, Atom, Component, MeasureSpec};
pub use pointset::{PointSet, WindowShape};
pub use rational::{QVec, Q};
pub use region::{AxisBox, BoxUnion, Region};
pub use spectra::{
    completeness_residual, lattice_tiling_check, orthogonality_check, GridSpec, LatticeTilingReport,
    OrthogonalityReport, SpectrumReport,
};
pub use tiling::{weak_tiling_verify, WeakTilingReport};
