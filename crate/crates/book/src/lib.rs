//! Compiles every listing in the guide as a doctest. One module per chapter
//! so a failure points at its chapter.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/train-tracks.md")]
pub mod train_tracks {}
#[doc = include_str!("../../../book/src/charts.md")]
pub mod charts {}
#[doc = include_str!("../../../book/src/earthquakes.md")]
pub mod earthquakes {}
#[doc = include_str!("../../../book/src/lorentz.md")]
pub mod lorentz {}
#[doc = include_str!("../../../book/src/pairings.md")]
pub mod pairings {}
#[doc = include_str!("../../../book/src/checks.md")]
pub mod checks {}
