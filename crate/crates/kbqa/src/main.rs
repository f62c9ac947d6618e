fn main() {
    std::process::exit(kbqa::cli::main_entry());
}
