//! Terms, substitutions, unification and the deductive database.

mod program;
mod symbol;
pub mod syntax;
mod term;
mod unify;

pub use program::{facts_visible, load_program, Database, DatabaseBuilder, Example, ExampleSet, FactTable, LoadError};
pub use symbol::Sym;
pub use syntax::{parse_conjunction, ParseError, VarScope};
pub use term::{Atom, Builtin, Clause, Conjunction, PredKey, Substitution, Term, Var};
pub use unify::{apply, apply_atom, unify};

pub(crate) use term::compare_ground;
