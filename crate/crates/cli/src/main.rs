fn main() {
    std::process::exit(esr_cli::main_with(std::env::args_os()));
}
