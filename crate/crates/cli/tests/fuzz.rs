mod common;

use common::malformed;

#[test]
fn malformed_expressions_never_panic() {
    let errors = malformed::expressions(3000, 7);
    assert!(errors > 1000, "the corpus should be mostly malformed, got {errors} errors");
}

#[test]
fn malformed_command_lines_never_panic() {
    malformed::command_lines(600, 11);
}

#[test]
fn malformed_script_lines_never_panic() {
    malformed::script_lines(1500, 13);
}
