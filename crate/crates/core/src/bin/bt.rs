fn main() {
    std::process::exit(bandit_transfer::cli::run(std::env::args_os()));
}
