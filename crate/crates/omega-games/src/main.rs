fn main() {
    std::process::exit(omega_games::cli::run());
}
