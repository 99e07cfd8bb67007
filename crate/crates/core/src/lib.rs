//! Exact jet algebra and A-equivalence recognition of frontal map-germs.

pub mod jetcalc;
pub mod linalg;
pub mod error;
pub mod frontal;
pub mod germs;
pub mod recognize;
pub mod gallery;
pub mod openings;
pub mod document;

pub use error::{Error, Result};
