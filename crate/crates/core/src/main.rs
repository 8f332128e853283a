fn main() {
    std::process::exit(entwine::cli::run(std::env::args_os()));
}
