fn main() {
    std::process::exit(gamma2lab_cli::run(std::env::args_os()));
}
