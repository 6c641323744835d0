fn main() {
    std::process::exit(cknkit::cli::main_with_args(std::env::args_os()));
}
