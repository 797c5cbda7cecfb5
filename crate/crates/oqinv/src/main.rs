fn main() { std::process::exit(oqinv::cli::run(std::env::args().collect())); }
