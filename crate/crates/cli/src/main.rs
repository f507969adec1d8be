fn main() {
    std::process::exit(superpat_cli::main_with_args(std::env::args_os()));
}
