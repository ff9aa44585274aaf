use serde::{Deserialize, Serialize};

use super::error::EngineError;
use super::state::ExecutionState;
use crate::syntax::Kind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    Developer,
    Computer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponsibilityStep {
    pub actor: Actor,
    pub description: String,
}

use Actor::{Computer as C, Developer as D};

const ACTION: &[(Actor, &str)] = &[
    (D, "Perform the described action"),
    (D, "Click Next when the action is done"),
    (C, "Move the program counter to the next statement"),
];

const CONDITIONAL: &[(Actor, &str)] = &[
    (D, "Find the values of any referenced variables"),
    (D, "Interpret the query to determine if it is true or false"),
    (D, "Click True or False"),
    (C, "Determine the next statement to execute"),
    (C, "Advance the program counter"),
];

const FOR_EACH: &[(Actor, &str)] = &[
    (D, "Review the element the loop variable will take"),
    (D, "Click Next to work through it"),
    (C, "Assign the next element of the list to the loop variable"),
    (C, "Enter the loop body, or move past the loop once every element was visited"),
];

const UNTIL: &[(Actor, &str)] = &[
    (D, "Find the values of any referenced variables"),
    (D, "Decide whether the condition now holds"),
    (D, "Click True or False"),
    (C, "Repeat the block while the condition is false"),
    (C, "Advance the program counter once it is true"),
];

const ASSIGNMENT: &[(Actor, &str)] = &[
    (D, "Find the information the query describes"),
    (D, "Record it as the value, separating list elements with commas"),
    (C, "Store the value in the variable"),
    (C, "Advance the program counter"),
];

const CALL: &[(Actor, &str)] = &[
    (D, "Click Next to enter the sub-strategy"),
    (C, "Create a stack frame and copy the argument values into it"),
    (C, "Hide the caller's variables until the sub-strategy returns"),
];

const RETURN: &[(Actor, &str)] = &[
    (D, "Find the value the query describes, if one is asked for"),
    (D, "Click Next to return it"),
    (C, "Pop the stack frame"),
    (C, "Deliver the value to the calling statement"),
];

/// The fixed division of labour for one statement kind.
pub fn responsibilities_for(kind: Kind) -> Vec<ResponsibilityStep> {
    let table = match kind {
        Kind::Action => ACTION,
        Kind::Conditional => CONDITIONAL,
        Kind::ForEach => FOR_EACH,
        Kind::Until => UNTIL,
        Kind::Assignment => ASSIGNMENT,
        Kind::Call => CALL,
        Kind::Return => RETURN,
    };
    table
        .iter()
        .map(|(actor, text)| ResponsibilityStep {
            actor: *actor,
            description: (*text).to_string(),
        })
        .collect()
}

impl ExecutionState {
    /// Who does what for the current statement.
    pub fn responsibility_steps(&self) -> Result<Vec<ResponsibilityStep>, EngineError> {
        let (_, stmt) = self.current().ok_or(EngineError::SessionCompleted)?;
        Ok(responsibilities_for(stmt.kind.kind()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_kind_involves_both_actors() {
        for kind in Kind::ALL {
            let steps = responsibilities_for(kind);
            assert!(steps.iter().any(|s| s.actor == Actor::Developer), "{kind}");
            assert!(steps.iter().any(|s| s.actor == Actor::Computer), "{kind}");
        }
    }

    #[test]
    fn conditional_mirrors_the_if_walkthrough() {
        let actors: Vec<Actor> = responsibilities_for(Kind::Conditional)
            .iter()
            .map(|s| s.actor)
            .collect();
        assert_eq!(actors, [D, D, D, C, C]);
    }
}
