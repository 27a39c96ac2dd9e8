use std::process::ExitCode;

fn main() -> ExitCode {
    coded_shuffle::cli::main_entry()
}
