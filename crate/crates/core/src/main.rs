fn main() {
    std::process::exit(polyest::cli::cli_dispatch(std::env::args_os()));
}
