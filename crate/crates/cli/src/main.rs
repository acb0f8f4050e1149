fn main() {
    std::process::exit(spinres_cli::main_with_args(std::env::args_os()));
}
