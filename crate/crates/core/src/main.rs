fn main() {
    std::process::exit(gendiff::cli::run(std::env::args_os()));
}
