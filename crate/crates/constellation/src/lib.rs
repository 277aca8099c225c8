//! Labeled multidimensional constellations.
//!
//! The core object is a [`LabeledConstellation`]: `M = 2^m` points in `N`
//! real dimensions, each carrying a distinct `m`-bit label. Orthant-symmetric
//! formats are generated from a [`FirstOrthantSeed`] (strictly positive
//! points plus in-orthant labels) by mirroring into all `2^N` orthants; the
//! sign bits of the label select the orthant. See [`expand_orthant_symmetric`]
//! and its inverse [`extract_first_orthant`].
//!
//! All built-in formats ship normalized to mean symbol energy `Es = 2`
//! (unit energy per polarization for dual-polarization 4D formats).

mod builtins;
mod error;
mod io;
mod labeled;
mod orthant;

pub use builtins::{
    builtin, d4_select, d4_spherical_subset, gray_16qam_2d, os128_4d, pm_16qam, pm_64qam, pm_qpsk,
    sp128_16qam, two_a8psk, BUILTIN_NAMES,
};
pub use error::{ConstellationError, NotOrthantSymmetric};
pub use io::{from_str, load, save, to_string};
pub use labeled::LabeledConstellation;
pub use orthant::{
    expand_orthant_symmetric, extract_first_orthant, mirror_matrices, seed_from_positive_orthant,
    FirstOrthantSeed, MirrorSet,
};
