#![allow(dead_code)]

pub mod malformed;
pub mod values;

use std::io;

use jsonschema::{Draft, JSONSchema};
use serde_json::Value as Json;

use nearca_cli::{run_args, Exit, SCHEMA};

pub fn run(args: &[&str]) -> Exit {
    let argv = std::iter::once("nearca").chain(args.iter().copied());
    run_args(argv, io::empty(), io::sink())
}

/// Runs with `--format json` and parses stdout.
pub fn run_json(args: &[&str]) -> (i32, Json) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let exit = run(&full);
    let json = serde_json::from_str(&exit.stdout).unwrap_or_else(|e| panic!("{args:?}: not JSON ({e}): {}", exit.stdout));
    (exit.code, json)
}

pub fn schema() -> JSONSchema {
    let schema: Json = serde_json::from_str(SCHEMA).expect("schema parses");
    JSONSchema::options().with_draft(Draft::Draft7).compile(&schema).expect("schema compiles")
}

pub fn assert_valid(schema: &JSONSchema, report: &Json) {
    if let Err(errors) = schema.validate(report) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("report does not match the schema:\n{}\n{report:#}", msgs.join("\n"));
    }
}
