fn main() { std::process::exit(steinperm::cli::main()); }
