//! Finite linear combinations of weighted partial injections of ℕ.

mod coefficient;
mod injection;
mod line;
mod normal_form;
mod operator;
mod prefix;

pub use coefficient::{parse_rational, rational_to_string, Coefficient, RationalParseError};
pub use injection::{AffinePiece, InjectionError, PartialInjection};
pub use line::Line;
pub use operator::{decisive_columns, Classification, ColumnAccess, Operator, ScalarTest, Term};
pub use prefix::{PairingShift, PairingShiftError, PrefixOperator, PrefixTerm};
