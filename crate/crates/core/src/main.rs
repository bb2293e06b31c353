fn main() {
    std::process::exit(resalg::cli::main_with_args(std::env::args_os()));
}
