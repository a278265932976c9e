fn main() {
    std::process::exit(fuzzobs::cli::main_entry());
}
