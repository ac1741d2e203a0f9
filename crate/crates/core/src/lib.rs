//! Exact arithmetic for sums of weighted partial isometries on `ℓ²(ℕ)`.

pub mod index_arith;
pub mod op_algebra;
pub mod constructions;
pub mod wold;
pub mod mi_space;
pub mod numeric_oracle;
pub mod json;
