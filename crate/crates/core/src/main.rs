fn main() {
    std::process::exit(rvkloosterman::cli::main_entry());
}
