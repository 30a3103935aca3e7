fn main() {
    std::process::exit(vistk::cli::run(std::env::args_os()));
}
