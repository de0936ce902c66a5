fn main() {
    std::process::exit(bellfilter::cli::main_with_args(std::env::args_os()));
}
