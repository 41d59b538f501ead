fn main() {
    std::process::exit(assoc3d::cli::main_with_args(std::env::args_os()));
}
