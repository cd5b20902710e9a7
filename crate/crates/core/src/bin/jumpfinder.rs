fn main() -> std::process::ExitCode {
    jumpfinder::cli::main()
}
