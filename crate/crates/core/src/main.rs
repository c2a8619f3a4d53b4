fn main() {
    std::process::exit(milne::cli::main_entry());
}
