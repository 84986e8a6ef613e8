pub mod error;
pub mod fitting;
pub mod lincomb;
pub mod mceval;
pub mod rng;
mod roots;
pub mod selftest;
pub mod specfun;
pub mod tdist;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/intro.md")]
mod book_intro {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/tdist.md")]
mod book_tdist {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/lincomb.md")]
mod book_lincomb {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/fitting.md")]
mod book_fitting {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/mceval.md")]
mod book_mceval {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
