use std::process::ExitCode;

fn main() -> ExitCode {
    slu2::cli::main()
}
