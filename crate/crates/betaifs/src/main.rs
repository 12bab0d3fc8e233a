fn main() {
    std::process::exit(betaifs::cli::run(std::env::args_os()));
}
