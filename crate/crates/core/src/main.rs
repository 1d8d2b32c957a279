fn main() {
    std::process::exit(pgcache::cli::main_with_args(std::env::args_os()));
}
