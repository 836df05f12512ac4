fn main() {
    std::process::exit(kaczmarz_bench::cli::cli_main(std::env::args_os()));
}
