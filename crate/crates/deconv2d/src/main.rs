fn main() {
    std::process::exit(deconv2d::cli::main_with_args(std::env::args().collect()));
}
