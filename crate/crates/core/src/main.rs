fn main() {
    std::process::exit(pairframe::cli::main_with_args(std::env::args_os()));
}
