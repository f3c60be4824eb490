fn main() { std::process::exit(curiosity::cli::run(std::env::args().collect())); }
