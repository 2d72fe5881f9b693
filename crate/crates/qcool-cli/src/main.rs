fn main() {
    std::process::exit(qcool_cli::run_cli(std::env::args_os()));
}
