//! Number fields, primes above p, valuations, residue fields and
//! Teichmüller lifts.

pub mod embedding;
pub mod field;
pub(crate) mod order;
pub mod pnum;

pub use embedding::{
    embedding_at, primes_above, teichmuller, EmbeddingSpec, LocalElement, PAdicEmbedding, ResidueElement,
    ResidueField, DEFAULT_PRECISION,
};
pub use field::{make_field, rational_field, FieldElem, NumberField};
pub use pnum::PAdic;
