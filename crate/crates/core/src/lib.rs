//! Interleaving and bottleneck distances for persistence modules indexed by
//! finite totally ordered posets with a point at infinity.

pub mod cloud;
pub mod error;
pub mod interval;
pub mod io;
pub mod linalg;
pub mod matching;
pub mod poset;
pub mod quiver;
pub mod rational;
pub mod refinement;

pub use error::{Error, Result};
pub use interval::{Barcode, Interval};
pub use poset::{PosetPoint, Translation, WeightedPoset};
pub use rational::Rational;
