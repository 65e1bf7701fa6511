fn main() {
    std::process::exit(fso_cli::run(std::env::args_os()));
}
