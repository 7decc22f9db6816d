fn main() {
    std::process::exit(msens_cli::run(std::env::args_os()));
}
