fn main() {
    std::process::exit(proven_in_use::cli::main_from_env());
}
