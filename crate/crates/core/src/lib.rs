pub mod control;
pub mod corpus;
pub mod letrec_machine;
pub mod machine;
pub mod oracle;
pub mod syntax;
pub mod translate;

pub use syntax::{parse, print, Name, NameSet, Prim, Term};
