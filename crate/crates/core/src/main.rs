fn main() {
    std::process::exit(polarkit::cli::main());
}
