fn main() {
    std::process::exit(rydberg_rk::cli::run(std::env::args_os()));
}
