//! Modular symbols for Γ₀(M): presentations, Hecke operators, eigensymbols,
//! divisor evaluation and normalization.

pub mod eigen;
pub mod hpoly;
pub mod mat2;
pub mod normalize;
pub mod p1;
pub mod space;
pub mod symbol;

pub use hpoly::{act, HomogeneousPoly};
pub use mat2::Mat2;
pub use space::{build_space, build_space_with_budget, hecke_matrix, HeckeOp, ManinSymbolSpace};
pub use symbol::{CosetSymbol, Cusp, Divisor};
pub use eigen::{cuspidal_eigensymbols, eigensymbols_at, Eigensymbol, HeckeCache, MatrixStore};
pub use normalize::{alpha_map, filtration_depth, mu_min, normalize, theta_op, NormalizedSymbol};
