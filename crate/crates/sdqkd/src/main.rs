fn main() {
    std::process::exit(sdqkd::cli::main());
}
