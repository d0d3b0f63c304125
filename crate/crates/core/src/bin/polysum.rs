fn main() { std::process::exit(polysum_core::cli::main_exit_code()) }
