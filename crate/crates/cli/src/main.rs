fn main() {
    std::process::exit(causalflow_cli::run(std::env::args_os()));
}
