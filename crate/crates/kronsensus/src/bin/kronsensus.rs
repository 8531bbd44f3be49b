fn main() {
    std::process::exit(kronsensus::cli::main());
}
