fn main() {
    std::process::exit(refswap_cli::run(std::env::args_os()));
}
