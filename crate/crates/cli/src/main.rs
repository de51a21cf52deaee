fn main() {
    std::process::exit(shapeinv_cli::run(std::env::args_os()));
}
