//! Library face of the batch front door: run configuration, pipeline
//! orchestration, pipeline comparison, and the summary schema.

pub mod compare;
pub mod config;
pub mod run;
pub mod summary;

pub use compare::{compare_pipelines, CompareReport};
pub use config::{parse_generator_spec, InputSpec, Pipeline, RunConfig};
pub use run::run;
pub use summary::{validate_summary, Summary};

/// Exit codes: 2 malformed input, 3 degree cap exceeded, 4 axiom violation,
/// 1 anything else.
pub fn exit_code_for(err: &pannld_core::Error) -> i32 {
    use pannld_core::Error as E;
    match err {
        E::Csv { .. } | E::InvalidInput(_) | E::Io(_) => 2,
        E::DegreeCapExceeded { .. } => 3,
        E::AxiomViolation { .. } => 4,
        E::Inconsistency(_) => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::exit_code_for;
    use pannld_core::{Axiom, Error};

    #[test]
    fn exit_codes_map_error_classes() {
        assert_eq!(exit_code_for(&Error::InvalidInput("x".into())), 2);
        assert_eq!(
            exit_code_for(&Error::Csv {
                path: "f".into(),
                row: 1,
                col: None,
                msg: "m".into()
            }),
            2
        );
        assert_eq!(
            exit_code_for(&Error::DegreeCapExceeded {
                cap: 4,
                vertices: vec![(0, 9)]
            }),
            3
        );
        let axiom = Error::AxiomViolation {
            axiom: Axiom::Antisymmetry,
            x: 0,
            y: 1,
            z: 2,
        };
        assert_eq!(exit_code_for(&axiom), 4);
        assert!(axiom.to_string().contains("(x=0; y=1, z=2)"));
        assert_eq!(exit_code_for(&Error::Inconsistency("i".into())), 1);
    }
}
