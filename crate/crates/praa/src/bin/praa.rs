fn main() {
    env_logger::init();
    std::process::exit(praa::cli::run());
}
