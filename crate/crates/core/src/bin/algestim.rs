fn main() {
    std::process::exit(algestim::expcli::cli::main());
}
