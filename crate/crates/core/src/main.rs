fn main() {
    std::process::exit(gflux::cli::main_with_args(std::env::args_os()));
}
