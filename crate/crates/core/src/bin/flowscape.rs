fn main() {
    std::process::exit(flowscape::cli::main_with_args(std::env::args_os()));
}
