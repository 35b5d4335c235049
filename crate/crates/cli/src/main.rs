use std::io::{self, Write};

fn main() {
    let exit = nearca_cli::run_args(std::env::args_os(), io::stdin().lock(), io::stdout());
    if !exit.stdout.is_empty() {
        let _ = writeln!(io::stdout(), "{}", exit.stdout.trim_end());
    }
    if !exit.stderr.is_empty() {
        let _ = writeln!(io::stderr(), "{}", exit.stderr.trim_end());
    }
    std::process::exit(exit.code);
}
