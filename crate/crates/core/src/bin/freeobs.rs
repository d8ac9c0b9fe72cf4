fn main() {
    std::process::exit(freeobs::cli::run(std::env::args_os()));
}
