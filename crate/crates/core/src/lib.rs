//! Superincreasing integer knapsacks: greedy and minimal packings, a
//! linear-time optimizer, complete facet descriptions of the knapsack
//! polytope and of two-sided lexicographic sets, extended formulations,
//! and an exact brute-force oracle that certifies all of it at small scale.

pub mod apps;
pub mod dpopt;
pub mod facets;
pub mod greedy;
pub mod identities;
pub mod instance;
pub mod intersect;
pub mod linalg;
pub mod lp;
pub mod num;
pub mod oracle;
pub mod polytope;

pub use instance::{KnapsackInstance, Sense, ValidatedKnapsack};
pub use polytope::{HPolytope, LinearInequality, RowTag};

/// Coarse failure classes; each maps to a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Infeasible,
    Guard,
    Certificate,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Validation => 2,
            ErrorClass::Infeasible => 3,
            ErrorClass::Guard => 4,
            ErrorClass::Certificate => 5,
        }
    }
}

pub trait Classify {
    fn class(&self) -> ErrorClass;
}

impl Classify for instance::InstanceError {
    fn class(&self) -> ErrorClass {
        match self {
            instance::InstanceError::InfeasibleDemand => ErrorClass::Infeasible,
            _ => ErrorClass::Validation,
        }
    }
}

impl Classify for greedy::GreedyError {
    fn class(&self) -> ErrorClass {
        match self {
            greedy::GreedyError::Infeasible { .. } => ErrorClass::Infeasible,
            greedy::GreedyError::Instance(e) => e.class(),
            _ => ErrorClass::Validation,
        }
    }
}

impl Classify for facets::FacetError {
    fn class(&self) -> ErrorClass {
        use facets::FacetError::*;
        match self {
            CertificateFailed { .. } => ErrorClass::Certificate,
            InfeasibleShift => ErrorClass::Infeasible,
            Greedy(e) => e.class(),
            Instance(e) => e.class(),
            IndexNotInSupportTail { .. } | NotPackingRow { .. } => ErrorClass::Validation,
        }
    }
}

impl Classify for dpopt::DpError {
    fn class(&self) -> ErrorClass {
        match self {
            dpopt::DpError::TooLarge { .. } => ErrorClass::Guard,
            dpopt::DpError::Instance(e) => e.class(),
            dpopt::DpError::NotSupportIndex(_) => ErrorClass::Validation,
        }
    }
}

impl Classify for oracle::OracleError {
    fn class(&self) -> ErrorClass {
        use oracle::OracleError::*;
        match self {
            TooLarge { .. } | DimensionTooLarge { .. } | TooManyRows { .. } => ErrorClass::Guard,
            EmptyCloud => ErrorClass::Infeasible,
            UnboundedDetected => ErrorClass::Certificate,
            LengthMismatch { .. } => ErrorClass::Validation,
        }
    }
}

impl Classify for intersect::IntersectError {
    fn class(&self) -> ErrorClass {
        use intersect::IntersectError::*;
        match self {
            EmptyIntersection => ErrorClass::Infeasible,
            LiftCheckFailed { .. } => ErrorClass::Certificate,
            Instance(e) => e.class(),
            Greedy(e) => e.class(),
            Facet(e) => e.class(),
            _ => ErrorClass::Validation,
        }
    }
}

impl Classify for apps::AppsError {
    fn class(&self) -> ErrorClass {
        use apps::AppsError::*;
        match self {
            EmptyIntersection => ErrorClass::Infeasible,
            Instance(e) => e.class(),
            Greedy(e) => e.class(),
            Facet(e) => e.class(),
            _ => ErrorClass::Validation,
        }
    }
}
