pub mod error;
pub mod fields;
pub mod group_ring;
pub mod groups;
pub mod linalg;
pub mod near_ring;
pub mod pipeline;
pub mod poly;
pub mod sca;
pub mod surjunctivity;

pub use error::{Error, Result};
pub use fields::{Fe, Field};
pub use groups::{Group, GroupElem, MemorySet};
