// Shared imports. `Float` supplies sqrt/exp/trig on f64 without std.
pub(crate) use crate::error::{Error, Result};
pub(crate) use crate::linalg::{CMatrix, RMatrix, C64};
pub(crate) use alloc::format;
pub(crate) use alloc::sync::Arc;
pub(crate) use alloc::vec;
pub(crate) use alloc::vec::Vec;
// With std linked (tests) the inherent float methods shadow the trait.
#[allow(unused_imports)]
pub(crate) use num_traits::Float;
