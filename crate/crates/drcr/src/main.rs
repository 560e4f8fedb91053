fn main() {
    std::process::exit(drcr::cli::run(std::env::args_os()));
}
