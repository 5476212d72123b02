fn main() {
    env_logger::init();
    std::process::exit(fracspline::cli::main_with_args(std::env::args_os()));
}
