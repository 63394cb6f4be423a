fn main() {
    std::process::exit(coulomb_cli::run(std::env::args_os()));
}
