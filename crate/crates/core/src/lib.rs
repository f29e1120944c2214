//! Values and Iwasawa power series of p-adic L-functions of the rationals
//! and of real quadratic fields, computed through Shintani cone
//! decompositions and p-adic measures, certified at desk scale by an
//! exact-rational oracle side.

pub mod error;
pub mod padic;

pub mod cyclotomic;
pub mod mahler;

pub mod field;
pub mod shintani;

pub mod conezeta;
pub mod lfunction;

pub mod oracle;

pub use error::{Error, Result};
pub use padic::{PAdicInt, ValuedPAdic};
