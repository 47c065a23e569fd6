fn main() {
    std::process::exit(pf_wcl::cli::run(std::env::args_os()));
}
