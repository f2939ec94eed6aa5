fn main() {
    std::process::exit(fiber_ground::cli::main_with(std::env::args_os()));
}
