fn main() {
    std::process::exit(rdpce_cli::app::run_from(std::env::args_os()));
}
