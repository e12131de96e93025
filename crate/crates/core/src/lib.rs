pub mod corpus;
pub mod cutelim;
pub mod engine;
pub mod normalize;
pub mod oracle;
pub mod proofs;
pub mod sequent;
pub mod syntax;
