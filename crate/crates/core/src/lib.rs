//! Compile ISA-95 production models into PDDL planning tasks, solve them with
//! an embedded forward-search planner (or an external solver), and merge the
//! resulting plans back into the model as operations data.

pub mod bench;
pub mod io;
pub mod merge;
pub mod model;
pub mod pddl;
pub mod pipeline;
pub mod planner;
pub mod transform;
