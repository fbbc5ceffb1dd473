pub mod corpus;
pub mod fixgen;
pub mod localize;
pub mod runtime;
pub mod session;
pub mod syntax;
pub mod testgen;
pub mod validate;
