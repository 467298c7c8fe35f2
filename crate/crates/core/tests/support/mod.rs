pub mod derivations;
pub mod terms;
