fn main() {
    std::process::exit(gft_risk::cli::main_with_args(std::env::args_os()));
}
