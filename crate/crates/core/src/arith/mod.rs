//! Exact arithmetic over Z, Q, F_p and Z/p^k.

pub mod factor;
pub mod fp;
pub mod int;
pub mod poly;
pub mod qmat;
pub mod zpmat;
