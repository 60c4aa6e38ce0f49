fn main() {
    std::process::exit(lieforge::cli::run(std::env::args_os()));
}
