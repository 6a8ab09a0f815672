fn main() {
    std::process::exit(latproj::cli::run(std::env::args_os()));
}
