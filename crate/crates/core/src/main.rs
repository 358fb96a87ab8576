fn main() -> std::process::ExitCode {
    edmrepair::cli::main()
}
