//! Finite frame analysis on discrete point sets: frame operators and
//! bounds, weighted Beurling-type density estimates, structured system
//! generators, windowed frame-measure averages, one-per-cell selector
//! search with certified Bessel bounds, and iterative density reduction.
//!
//! The crate is no_std with `alloc`; all heavy lifting is dense complex
//! linear algebra sized for systems of up to a few hundred vectors.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod frame;
pub mod generators;
pub mod geometry;
pub mod linalg;
pub mod measure;
pub mod selector;
pub mod thinning;

pub use error::{FrameError, Result};
pub use frame::{
    bessel_bound, canonical_dual, diagonal_coefficients, frame_bounds, frame_operator,
    parseval_transform, FrameBounds, FrameSystem, HermitianOperator,
};
pub use generators::{
    exponential_system, full_index_set, gabor_system, lattice_index_set, localization_profile,
    periodized_gaussian, pw_kernel_system, pw_kernel_value, time_frequency_shift, GaborSpec,
    LocalizationRow, PwKernelSystem, SpectrumSpec, TimeGrid,
};
pub use geometry::{
    beurling_density, relative_separation, DensityReport, GeometryKind, KernelDiagonal, Point,
    PointGeometry, SeparationReport, WindowFamily,
};
pub use linalg::{hermitian_eigen, CMatrix, HermitianEigen};
pub use measure::{
    check_density_bounds, frame_measure, frd_from_reports, verify_frd, DensityBoundsReport,
    FrdReport, MeasureEntry, MeasureReport, DEFAULT_TOLERANCE_BAND,
};
pub use selector::{
    find_selector, theorem_bound, verify_selector_bound, CellPartition, SelectorCertificate,
    SelectorOptions, SelectorResult, Strategy,
};
pub use thinning::{
    alpha_set, check_near_critical_lemma, choose_alpha_r, partition_cells, thin_once,
    thin_to_density, AlphaR, IterationRecord, NearCriticalReport, StopReason, ThinStep,
    ThinningConfig, ThinningError, ThinningTrace,
};
