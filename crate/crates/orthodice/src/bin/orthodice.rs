fn main() {
    std::process::exit(orthodice::cli::run());
}
