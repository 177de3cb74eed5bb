fn main() {
    std::process::exit(cvbell::cli::run(std::env::args_os()));
}
