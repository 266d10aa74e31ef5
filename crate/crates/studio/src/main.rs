fn main() {
    std::process::exit(evd_studio::cli::main_entry(std::env::args().collect()));
}
