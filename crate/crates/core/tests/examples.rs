//! Every cargo example runs to completion.

#[path = "../examples/polynomials.rs"]
mod polynomials;

#[test]
fn polynomials_runs() {
    polynomials::run().unwrap();
}

#[path = "../examples/border_basis.rs"]
mod border_basis;

#[test]
fn border_basis_runs() {
    border_basis::run().unwrap();
}

#[path = "../examples/moment_relaxation.rs"]
mod moment_relaxation;

#[test]
fn moment_relaxation_runs() {
    moment_relaxation::run().unwrap();
}

#[path = "../examples/sdp_solve.rs"]
mod sdp_solve;

#[test]
fn sdp_solve_runs() {
    sdp_solve::run().unwrap();
}

#[path = "../examples/sdpa_files.rs"]
mod sdpa_files;

#[test]
fn sdpa_files_runs() {
    sdpa_files::run().unwrap();
}

#[path = "../examples/decompose.rs"]
mod decompose;

#[test]
fn decompose_runs() {
    decompose::run().unwrap();
}

#[path = "../examples/minimizers.rs"]
mod minimizers;

#[test]
fn minimizers_runs() {
    minimizers::run().unwrap();
}

#[path = "../examples/minimize.rs"]
mod minimize;

#[test]
fn minimize_runs() {
    minimize::run().unwrap();
}

#[path = "../examples/problem_file.rs"]
mod problem_file;

#[test]
fn problem_file_runs() {
    problem_file::run().unwrap();
}

#[path = "../examples/corpus.rs"]
mod corpus;

#[test]
fn corpus_runs() {
    corpus::run().unwrap();
}
