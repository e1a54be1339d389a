fn main() {
    std::process::exit(replicax::run_cli(std::env::args_os()));
}
