fn main() {
    std::process::exit(longwave::cli::run(std::env::args_os()));
}
