fn main() {
    std::process::exit(spanlab::cli::run(std::env::args_os()));
}
