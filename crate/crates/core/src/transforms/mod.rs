//! Model surgery: conservative extensions, witness killing, the stability
//! chain, and normality orders built from the equations.

mod conservative;
mod respect;
mod stability;
mod witness_killing;

pub use conservative::{
    check_formula_agreement, is_conservative_extension, is_conservative_extension_extended,
    random_formula, Counterexample, Disagreement, ExtensionReport,
};
pub use respect::{
    deviating_variables, normality_from_respect, respects_equations, DeviationRecord, RespectReport,
};
pub use stability::build_stability_model;
pub use witness_killing::{kill_all_witnesses, kill_witness, KillOutcome};
