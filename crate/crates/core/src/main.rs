fn main() {
    std::process::exit(union_bounds::cli::run(std::env::args_os()));
}
