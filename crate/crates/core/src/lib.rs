//! Saliency-based image cropping with a demographic-parity audit harness.
//!
//! The crate is organised around one intermediate: the [`SaliencyMap`], a
//! grid of non-negative scores over an image. Everything else either
//! produces one ([`saliency`]), turns one into crops ([`crop`]), or runs
//! many of them to measure which group of images a cropper favours
//! ([`audit`]). [`corpus`] holds the manifest format and image IO shared by
//! the audits, the CLI and the HTTP service.

pub mod audit;
pub mod corpus;
pub mod crop;
mod error;
mod image;
pub mod rng;
pub mod saliency;

pub use crate::error::{Error, Result};
pub use crate::image::{ImageBuffer, Rgb};
pub use crate::saliency::{Point, SaliencyBackend, SaliencyMap};
