fn main() {
    std::process::exit(localfactor::harness::cli_main(std::env::args_os()));
}
