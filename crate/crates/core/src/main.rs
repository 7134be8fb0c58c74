fn main() {
    std::process::exit(busyloss::cli::run(std::env::args_os()));
}
