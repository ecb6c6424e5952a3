fn main() {
    std::process::exit(projmed_core::cli::main_entry());
}
