fn main() {
    std::process::exit(dialseg::cli::run(std::env::args_os()));
}
