fn main() {
    std::process::exit(uhcs::cli::main());
}
