use std::process::ExitCode;

fn main() -> ExitCode {
    medlink::cli::main()
}
