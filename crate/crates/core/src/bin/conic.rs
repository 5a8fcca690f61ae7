fn main() {
    std::process::exit(conic_spectra::cli::main_with_args(std::env::args_os()));
}
