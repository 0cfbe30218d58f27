//! Finite colored operads, their categories of operators and symmetric
//! monoidal envelopes, and the set-valued un/straightening correspondence
//! between algebras and operadic left fibrations, checked exhaustively on
//! small instances.

pub mod category;
pub mod dendroidal;
pub mod envelope;
pub mod grothendieck;
pub mod instance;
pub mod operad;
pub mod operators;
pub mod perm;
pub mod pointed;
pub mod sweep;
