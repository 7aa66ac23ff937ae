fn main() {
    std::process::exit(roundtrap::cli::main());
}
