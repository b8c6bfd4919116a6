fn main() {
    std::process::exit(motkit_cli::run(std::env::args_os()));
}
