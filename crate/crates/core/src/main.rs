fn main() {
    std::process::exit(brauer_core::cli::main_with_args(std::env::args_os()));
}
