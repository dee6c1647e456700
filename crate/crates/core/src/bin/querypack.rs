fn main() {
    std::process::exit(querypack::cli::main_with_args(std::env::args_os()));
}
