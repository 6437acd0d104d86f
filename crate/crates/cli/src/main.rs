fn main() {
    std::process::exit(circuma_cli::run(std::env::args_os()));
}
