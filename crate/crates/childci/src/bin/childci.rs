fn main() {
    std::process::exit(childci::cli::run(std::env::args()));
}
