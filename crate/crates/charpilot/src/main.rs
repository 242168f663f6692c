fn main() -> std::process::ExitCode {
    charpilot::cli::main()
}
