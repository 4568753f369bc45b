fn main() {
    std::process::exit(maxop::cli::main_with_args(std::env::args_os()));
}
