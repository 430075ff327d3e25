fn main() {
    std::process::exit(qtransport::cli::run(std::env::args_os()));
}
