fn main() {
    std::process::exit(reforder::cli::main_with_args(std::env::args_os()));
}
