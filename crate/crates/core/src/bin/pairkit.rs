fn main() {
    std::process::exit(pairkit::cli::main_with_args(std::env::args_os()));
}
