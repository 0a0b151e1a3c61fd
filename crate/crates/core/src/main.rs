fn main() {
    std::process::exit(haldane::cli::main_with_args(std::env::args_os()));
}
