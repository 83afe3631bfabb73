fn main() {
    std::process::exit(skein_ym::cli::main_with_args(std::env::args_os()));
}
