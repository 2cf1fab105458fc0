fn main() {
    std::process::exit(spinlift::cli::main_with_args(std::env::args()));
}
