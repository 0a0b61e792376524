fn main() {
    std::process::exit(coarselab::cli::run(std::env::args_os()));
}
