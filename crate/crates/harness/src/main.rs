fn main() {
    std::process::exit(ftpl_harness::cli_main(std::env::args_os()));
}
