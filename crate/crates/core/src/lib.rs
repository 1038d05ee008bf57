//! Coordinate-level machinery for Teichmüller space and the Lorentzian
//! space-times it parametrizes.
//!
//! The crate is organised bottom-up:
//!
//! * [`surface`]: signatures, presentations, curve words, multicurves.
//! * [`traintrack`]: train tracks, weight systems, the Thurston form.
//! * [`teich`]: shear and Fenchel–Nielsen charts, holonomy, lengths.
//! * [`flows`]: earthquakes, double earthquakes, the covector map, grafting.
//! * [`lorentz`]: anti-de Sitter pairs, Minkowski cocycles, de Sitter data.
//! * [`symplectic`]: Goldman cup products, the cotangent form, pullback checks.
//! * [`checks`]: the named verification runs.
//!
//! ```
//! use wick_core::traintrack::{one_switch, thurston_form, validate_weights};
//! use wick_core::exact::q;
//!
//! let t = one_switch();
//! let a = validate_weights(&t, vec![q(5), q(2), q(3)]).unwrap();
//! let b = validate_weights(&t, vec![q(3), q(1), q(2)]).unwrap();
//! assert_eq!(thurston_form(&t, &a, &b).unwrap(), q(1));
//! ```

pub mod checks;
pub mod error;
pub mod exact;
pub mod fd;
pub mod flows;
pub mod lorentz;
pub mod mat2;
pub mod serial;
pub mod surface;
pub mod symplectic;
pub mod teich;
pub mod testbed;
pub mod traintrack;

pub use error::{Error, Result};
