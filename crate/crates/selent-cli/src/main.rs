fn main() {
    std::process::exit(selent_cli::cli::run(std::env::args_os()));
}
