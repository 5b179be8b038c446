fn main() {
    std::process::exit(mv3_cli::run(std::env::args_os()));
}
