fn main() {
    std::process::exit(localcent::cli::main_with_args(std::env::args_os()));
}
