//! Bundled example problems.

use crate::problem::{parse_problem, ProblemFile};

/// `(name, source)` for every bundled problem.
pub const ENTRIES: &[(&str, &str)] = &[
    ("running", include_str!("../corpus/running.pop")),
    ("robinson", include_str!("../corpus/robinson.pop")),
    ("motzkin", include_str!("../corpus/motzkin.pop")),
    ("l01_ex1", include_str!("../corpus/l01_ex1.pop")),
    ("l01_ex2", include_str!("../corpus/l01_ex2.pop")),
    ("l01_ex5", include_str!("../corpus/l01_ex5.pop")),
    ("tensor_ex3_1", include_str!("../corpus/tensor_ex3_1.pop")),
    ("tensor_ex3_8", include_str!("../corpus/tensor_ex3_8.pop")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parsed bundled problem. The sources are fixed, so parsing cannot fail.
pub fn load(name: &str) -> Option<ProblemFile> {
    source(name).map(|s| parse_problem(s).expect("bundled problem parses"))
}
