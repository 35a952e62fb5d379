fn main() {
    std::process::exit(covnorm::cli::run(std::env::args_os()));
}
