fn main() -> std::process::ExitCode {
    weyltop::cli::main_entry()
}
