fn main() { std::process::exit(choropop::cli::run(std::env::args().skip(1).collect())); }
