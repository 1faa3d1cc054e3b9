fn main() {
    std::process::exit(norm1_cli::main_entry());
}
