fn main() {
    std::process::exit(tw2count::cli::main_with_args(std::env::args_os()));
}
