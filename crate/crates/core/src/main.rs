fn main() {
    std::process::exit(divcode::cli::run(std::env::args_os()));
}
