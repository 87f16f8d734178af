fn main() {
    std::process::exit(chemodecay::cli::main_with(std::env::args_os()));
}
